//! Nonrelativistic 1-D eigenvalues and their relativistic images
//! `E = √(1 + 2ε)` (Compton units), together with the two-term series
//! `1 + ε − ε²/2`.

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// External potential `U(x)`, Compton units.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    /// `U = ½ω₀²x²`
    Harmonic {
        omega0: f64,
    },
    /// Infinite walls at `±width/2`.
    Box {
        width: f64,
    },
    /// One value per grid point.
    Tabulated(Vec<f64>),
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Harmonic { omega0 } if !(omega0.is_finite() && *omega0 > 0.0) => {
                Err(Error::input(format!("harmonic omega0 must be > 0, got {omega0}")))
            }
            PotentialSpec::Box { width } if !(width.is_finite() && *width > 0.0) => {
                Err(Error::input(format!("box width must be > 0, got {width}")))
            }
            PotentialSpec::Tabulated(v) if v.iter().any(|u| !u.is_finite()) => {
                Err(Error::input("tabulated potential has non-finite values"))
            }
            _ => Ok(()),
        }
    }

    /// Potential values at the grid points (zero inside the box).
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            PotentialSpec::Free | PotentialSpec::Box { .. } => Ok(vec![0.0; grid.n()]),
            PotentialSpec::Harmonic { omega0 } => {
                Ok(grid.xs().into_iter().map(|x| 0.5 * omega0 * omega0 * x * x).collect())
            }
            PotentialSpec::Tabulated(v) => {
                if v.len() != grid.n() {
                    return Err(Error::input(format!(
                        "tabulated potential has {} values, grid has {}",
                        v.len(),
                        grid.n()
                    )));
                }
                Ok(v.clone())
            }
        }
    }

    /// Closed-form levels where they exist.
    pub fn analytic_levels(&self, count: usize) -> Option<Vec<f64>> {
        match *self {
            PotentialSpec::Harmonic { omega0 } => Some((0..count).map(|n| (n as f64 + 0.5) * omega0).collect()),
            PotentialSpec::Box { width } => Some(
                (1..=count)
                    .map(|n| {
                        let q = std::f64::consts::PI * n as f64 / width;
                        0.5 * q * q
                    })
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`
/// (Sturm sequence count).
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `count` eigenvalues of a symmetric tridiagonal matrix by bisection.
fn tridiagonal_lowest(diag: &[f64], off: &[f64], count: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    (0..count)
        .map(|m| {
            let (mut a, mut b) = (lo - 1e-3 * span, hi + 1e-3 * span);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(diag, off, mid) > m {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let value = 0.5 * (a + b);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::numerical("eigenvalue bisection produced a non-finite value"))
            }
        })
        .collect()
}

/// Lowest `count` eigenvalues of `−½∂ₓ² + U`.
///
/// `Free` uses the periodic plane-wave spectrum `k_j²/2` of the grid; the
/// other potentials use the 3-point finite-difference Hamiltonian with
/// Dirichlet ends (the grid ends, or the box walls).
pub fn nonrel_eigen(potential: &PotentialSpec, grid: &Grid1D, count: usize) -> Result<Vec<f64>> {
    potential.validate()?;
    if count == 0 || count > grid.n() / 4 {
        return Err(Error::input(format!(
            "eigenvalue count must be in 1..={} for n = {}, got {count}",
            grid.n() / 4,
            grid.n()
        )));
    }
    let (diag, off) = match potential {
        PotentialSpec::Free => {
            let mut e: Vec<f64> = grid.wavenumbers().iter().map(|k| 0.5 * k * k).collect();
            e.sort_by(f64::total_cmp);
            e.truncate(count);
            return Ok(e);
        }
        PotentialSpec::Box { width } => {
            if *width > grid.length() {
                return Err(Error::input(format!(
                    "box width {width} exceeds the grid length {}",
                    grid.length()
                )));
            }
            let interior = ((width / grid.dx()).round() as usize).saturating_sub(1);
            if interior < 4 * count {
                return Err(Error::input("box is under-resolved for the requested count"));
            }
            let h = width / (interior + 1) as f64;
            (vec![1.0 / (h * h); interior], vec![-0.5 / (h * h); interior - 1])
        }
        _ => {
            let u = potential.sample(grid)?;
            let h = grid.dx();
            (
                u.iter().map(|u| 1.0 / (h * h) + u).collect(),
                vec![-0.5 / (h * h); grid.n() - 1],
            )
        }
    };
    tridiagonal_lowest(&diag, &off, count)
}

/// One Richardson step: `(4 ε(dx/2) − ε(dx)) / 3`, cancelling the `dx²` error.
pub fn nonrel_eigen_richardson(potential: &PotentialSpec, grid: &Grid1D, count: usize) -> Result<Vec<f64>> {
    let coarse = nonrel_eigen(potential, grid, count)?;
    if let PotentialSpec::Free | PotentialSpec::Tabulated(_) = potential {
        // exact spectrum / no finer data
        return Ok(coarse);
    }
    let fine_grid = Grid1D::new(2 * grid.n(), grid.length())?;
    let fine = nonrel_eigen(potential, &fine_grid, count)?;
    Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub epsilon: Vec<f64>,
    pub energy: Vec<f64>,
    pub energy_series: Vec<f64>,
    pub rel_gap: Vec<f64>,
}

/// `E − (1 + ε − ε²/2)` without cancellation:
/// with `a = √(1 + 2ε)`, the gap is `ε²(a − 1 + ε) / (2(a + 1 + ε))`.
pub fn series_gap(epsilon: f64) -> f64 {
    let a = (1.0 + 2.0 * epsilon).sqrt();
    let a_minus_one = 2.0 * epsilon / (a + 1.0);
    epsilon * epsilon * (a_minus_one + epsilon) / (2.0 * (a + 1.0 + epsilon))
}

pub fn relativistic_map(epsilon: &[f64]) -> Result<SpectrumResult> {
    let mut out = SpectrumResult {
        epsilon: epsilon.to_vec(),
        energy: Vec::with_capacity(epsilon.len()),
        energy_series: Vec::with_capacity(epsilon.len()),
        rel_gap: Vec::with_capacity(epsilon.len()),
    };
    for (index, &e) in epsilon.iter().enumerate() {
        let radicand = 1.0 + 2.0 * e;
        if !(radicand > 0.0) || !e.is_finite() {
            return Err(Error::Domain {
                index,
                message: format!("epsilon = {e} gives 1 + 2·epsilon = {radicand} <= 0"),
            });
        }
        let energy = radicand.sqrt();
        out.energy.push(energy);
        out.energy_series.push(1.0 + e - 0.5 * e * e);
        out.rel_gap.push(series_gap(e).abs() / energy);
    }
    Ok(out)
}
