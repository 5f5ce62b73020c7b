//! Dispersion relations `P(ω, k) = 0` of the linearized density equations.
//!
//! Conventions: density perturbations go as `e^{i(ωt − kx)}`, so a root with
//! `Im ω > 0` is damped and one with `Im ω < 0` grows. The conservative field
//! itself uses the quantum convention `ψ ∝ e^{i(kx − ωt)}`; its polynomial
//! `ω² + 2ω − k²` is written in that convention.
//!
//! In Compton units every dissipative polynomial is
//! `¼(k² − ω²)² − ω² + F(ω, k)` with the friction term `F`:
//!
//! | model               | `F(ω, k)`        | effective `γ`   |
//! |---------------------|------------------|-----------------|
//! | collisional         | `iγω`            | `γ`             |
//! | radiative           | `iτω³`           | `τω²`           |
//! | phase diffusion     | `iDk²ω`          | `Dk²`           |
//! | d'Alembert diffusion| `iDω(k² − ω²)`   | `D(k² − ω²)`    |

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{self, Polynomial, SolverTolerances};
use crate::units::{ModelKind, ModelParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Dispersion polynomial at fixed `k`, ascending coefficients `c₀..c₄`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionPoly {
    pub coeffs: [Complex64; 5],
    pub k: f64,
    pub model: ModelParams,
}

impl DispersionPoly {
    pub fn degree(&self) -> usize {
        match self.model {
            ModelParams::Conservative => 2,
            _ => 4,
        }
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs[..=self.degree()].to_vec())
    }

    pub fn eval(&self, omega: Complex64) -> Complex64 {
        self.polynomial().eval(omega)
    }
}

pub fn build_polynomial(params: &ModelParams, k: f64) -> Result<DispersionPoly> {
    if !(k >= 0.0) || k.is_infinite() {
        return Err(Error::input(format!("k must be finite and >= 0, got {k}")));
    }
    let k2 = k * k;
    let mut c = [Complex64::new(0.0, 0.0); 5];
    if let ModelParams::Conservative = params {
        c[0] = re(-k2);
        c[1] = re(2.0);
        c[2] = re(1.0);
    } else {
        // ¼(k² − ω²)² − ω² = ¼k⁴ − (1 + ½k²)ω² + ¼ω⁴
        c[0] = re(0.25 * k2 * k2);
        c[2] = re(-(1.0 + 0.5 * k2));
        c[4] = re(0.25);
        match *params {
            ModelParams::Collisional { gamma } => c[1] += I * gamma,
            ModelParams::Radiative { tau } => c[3] += I * tau,
            ModelParams::PhaseDiffusion { diffusion } => c[1] += I * (diffusion * k2),
            ModelParams::DAlembertDiffusion { diffusion } => {
                c[1] += I * (diffusion * k2);
                c[3] -= I * diffusion;
            }
            ModelParams::Conservative => unreachable!(),
        }
    }
    Ok(DispersionPoly {
        coeffs: c,
        k,
        model: *params,
    })
}

/// The dispersion expression in its unexpanded form, used to cross-check
/// the coefficient expansion.
pub fn dispersion_value(params: &ModelParams, omega: Complex64, k: f64) -> Complex64 {
    let k2 = re(k * k);
    let w2 = omega * omega;
    let base = 0.25 * (k2 - w2) * (k2 - w2) - w2;
    match *params {
        ModelParams::Conservative => w2 + 2.0 * omega - k2,
        ModelParams::Collisional { gamma } => base + I * omega * gamma,
        ModelParams::Radiative { tau } => base + I * w2 * omega * tau,
        ModelParams::PhaseDiffusion { diffusion } => base + I * omega * k2 * diffusion,
        ModelParams::DAlembertDiffusion { diffusion } => base + I * omega * (k2 - w2) * diffusion,
    }
}

/// Collisional expression with an arbitrary complex friction coefficient.
pub fn collisional_value(gamma: Complex64, omega: Complex64, k: f64) -> Complex64 {
    let k2 = re(k * k);
    let w2 = omega * omega;
    0.25 * (k2 - w2) * (k2 - w2) - w2 + I * omega * gamma
}

/// Solved roots at one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Backward-error residuals `|P(ω)| / Σ|cⱼ||ω|ʲ`.
    pub residuals: Vec<f64>,
    pub multiplicity: Vec<usize>,
    pub k: f64,
}

impl RootSet {
    /// Roots that grow in time under the density convention (`Im ω < 0`).
    pub fn growing(&self) -> Vec<Complex64> {
        self.roots.iter().copied().filter(|w| w.im < 0.0).collect()
    }
}

pub fn solve_roots(poly: &DispersionPoly) -> Result<RootSet> {
    solve_roots_with(poly, &SolverTolerances::default())
}

pub fn solve_roots_with(poly: &DispersionPoly, tol: &SolverTolerances) -> Result<RootSet> {
    let r = poly::solve(&poly.polynomial(), tol)?;
    Ok(RootSet {
        roots: r.roots,
        residuals: r.residuals,
        multiplicity: r.multiplicity,
        k: poly.k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Low,
    High,
}

/// Closed-form asymptotic root. Where the limiting equation is a cubic all
/// three roots are in `candidates`; `principal` uses the principal cube root.
#[derive(Debug, Clone, PartialEq)]
pub struct Asymptote {
    pub principal: Complex64,
    pub candidates: Vec<Complex64>,
}

fn cube_roots(z: Complex64) -> Vec<Complex64> {
    let r = z.norm().cbrt();
    let theta = z.arg() / 3.0;
    (0..3)
        .map(|j| Complex64::from_polar(r, theta + 2.0 * std::f64::consts::PI * j as f64 / 3.0))
        .collect()
}

fn single(w: Complex64) -> Asymptote {
    Asymptote {
        principal: w,
        candidates: vec![w],
    }
}

fn cubic(rhs: Complex64) -> Asymptote {
    let candidates = cube_roots(rhs);
    Asymptote {
        principal: candidates[0],
        candidates,
    }
}

pub fn asymptotic_omega(params: &ModelParams, k: f64, regime: Regime) -> Result<Asymptote> {
    if !(k >= 0.0) || k.is_infinite() {
        return Err(Error::input(format!("k must be finite and >= 0, got {k}")));
    }
    let positive = |name: &str, v: f64| -> Result<f64> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::input(format!("the {regime:?} asymptote needs {name} > 0")))
        }
    };
    let k2 = k * k;
    match (*params, regime) {
        (ModelParams::Conservative, Regime::Low) => Ok(single(re(0.5 * k2))),
        (ModelParams::Collisional { gamma }, Regime::Low) => {
            Ok(single(I * (0.25 * k2 * k2 / positive("gamma", gamma)?)))
        }
        (ModelParams::Collisional { .. }, Regime::High) => Ok(Asymptote {
            principal: re(2.0),
            candidates: vec![re(2.0), re(-2.0)],
        }),
        (ModelParams::Radiative { tau }, Regime::Low) => Ok(cubic(I * (0.25 * k2 * k2 / positive("tau", tau)?))),
        (ModelParams::Radiative { tau }, Regime::High) => Ok(single(-4.0 * I * tau)),
        (ModelParams::PhaseDiffusion { diffusion }, Regime::Low) => {
            Ok(single(I * (0.25 * k2 / positive("diffusion", diffusion)?)))
        }
        (ModelParams::PhaseDiffusion { diffusion }, Regime::High) => Ok(cubic(-4.0 * I * diffusion * k2)),
        (p, r) => Err(Error::Unsupported(format!(
            "no closed-form {r:?}-frequency root for the {} model",
            p.kind()
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchLabel {
    /// `ω → 0` as `k → 0`; the root of least magnitude at the first grid point.
    Hydrodynamic,
    /// Starts near the Zitterbewegung frequency `|ω| ≈ 2`.
    ZitterbewegungGapped,
    Other,
}

impl BranchLabel {
    pub fn name(self) -> &'static str {
        match self {
            BranchLabel::Hydrodynamic => "hydrodynamic",
            BranchLabel::ZitterbewegungGapped => "zitterbewegung-gapped",
            BranchLabel::Other => "other",
        }
    }
}

/// Continuity-matched root branches over a k sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchCurve {
    pub k_grid: Vec<f64>,
    /// `branches[b][j]` is branch `b` at `k_grid[j]`.
    pub branches: Vec<Vec<Complex64>>,
    pub residuals: Vec<Vec<f64>>,
    pub labels: Vec<BranchLabel>,
}

impl BranchCurve {
    pub fn branch(&self, label: BranchLabel) -> Option<&[Complex64]> {
        self.labels
            .iter()
            .position(|l| *l == label)
            .map(|b| self.branches[b].as_slice())
    }

    pub fn hydrodynamic(&self) -> &[Complex64] {
        self.branch(BranchLabel::Hydrodynamic)
            .expect("every curve has a hydrodynamic branch")
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Relative gap below which the best and runner-up pairings are considered
/// indistinguishable.
pub const AMBIGUITY_MARGIN: f64 = 0.1;

pub fn track_branches(params: &ModelParams, k_grid: &[f64]) -> Result<BranchCurve> {
    track_branches_with(params, k_grid, &SolverTolerances::default())
}

pub fn track_branches_with(params: &ModelParams, k_grid: &[f64], tol: &SolverTolerances) -> Result<BranchCurve> {
    if k_grid.len() < 2 {
        return Err(Error::input("branch tracking needs at least two k values"));
    }
    if k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::input("k grid must be strictly ascending"));
    }

    let first_poly = build_polynomial(params, k_grid[0])?;
    let first = solve_roots_with(&first_poly, tol)?;
    let n = first.roots.len();
    let mut prev_radii = poly::inclusion_radii(&first_poly.polynomial(), &first.roots);
    let mut branches: Vec<Vec<Complex64>> = first.roots.iter().map(|w| vec![*w]).collect();
    let mut residuals: Vec<Vec<f64>> = first.residuals.iter().map(|r| vec![*r]).collect();
    let perms = permutations(n);

    for j in 1..k_grid.len() {
        let poly = build_polynomial(params, k_grid[j])?;
        let next = solve_roots_with(&poly, tol)?;
        let next_radii = poly::inclusion_radii(&poly.polynomial(), &next.roots);
        let prev: Vec<Complex64> = branches.iter().map(|b| *b.last().unwrap()).collect();
        let cost = |p: &[usize]| -> f64 { (0..n).map(|b| (next.roots[p[b]] - prev[b]).norm()).sum() };

        let mut best = perms.iter().min_by(|a, b| cost(a).total_cmp(&cost(b))).unwrap().clone();

        // A rival pairing only matters if it assigns different values to
        // distinguishable branches; it is a real rival when, over the
        // branches where it differs, its distance is within the margin.
        let scale = prev.iter().map(|w| w.norm()).fold(1.0, f64::max);
        let mut by_convention: Vec<usize> = Vec::new();
        for p in perms.iter().filter(|p| **p != best) {
            let differ: Vec<usize> = (0..n).filter(|&b| p[b] != best[b]).collect();
            let mut best_part = 0.0;
            let mut rival_part = 0.0;
            let mut distinct = false;
            for &b in &differ {
                best_part += (next.roots[best[b]] - prev[b]).norm();
                rival_part += (next.roots[p[b]] - prev[b]).norm();
                let owner = best.iter().position(|&t| t == p[b]).unwrap();
                // roots are told apart only if their inclusion discs are disjoint
                let (x, y) = (p[b], best[b]);
                if (next.roots[x] - next.roots[y]).norm() > tol.degeneracy.max(next_radii[x] + next_radii[y])
                    && (prev[b] - prev[owner]).norm() > tol.degeneracy.max(prev_radii[b] + prev_radii[owner])
                {
                    distinct = true;
                }
            }
            if !distinct || rival_part - best_part > AMBIGUITY_MARGIN * best_part + 1e-14 * scale {
                continue;
            }
            let targets: Vec<usize> = differ.iter().map(|&b| best[b]).collect();
            if mirror_closed(&differ, &prev, &prev_radii) && mirror_closed(&targets, &next.roots, &next_radii) {
                by_convention.extend(differ);
                continue;
            }
            return Err(Error::Ambiguous {
                k_prev: k_grid[j - 1],
                k_next: k_grid[j],
            });
        }
        if !by_convention.is_empty() {
            by_convention.sort_unstable();
            by_convention.dedup();
            let mut targets: Vec<usize> = by_convention.iter().map(|&b| best[b]).collect();
            let mut sources = by_convention;
            mirror_sort(&mut sources, &prev, &prev_radii);
            mirror_sort(&mut targets, &next.roots, &next_radii);
            for (b, r) in sources.into_iter().zip(targets) {
                best[b] = r;
            }
        }
        for b in 0..n {
            branches[b].push(next.roots[best[b]]);
            residuals[b].push(next.residuals[best[b]]);
        }
        prev_radii = best.iter().map(|&r| next_radii[r]).collect();
    }

    let start: Vec<Complex64> = branches.iter().map(|b| b[0]).collect();
    let hydro = (0..n)
        .min_by(|&a, &b| start[a].norm().total_cmp(&start[b].norm()))
        .unwrap();
    let labels = (0..n)
        .map(|b| {
            if b == hydro {
                BranchLabel::Hydrodynamic
            } else if (start[b].norm() - 2.0).abs() <= 0.5 {
                BranchLabel::ZitterbewegungGapped
            } else {
                BranchLabel::Other
            }
        })
        .collect();

    Ok(BranchCurve {
        k_grid: k_grid.to_vec(),
        branches,
        residuals,
        labels,
    })
}

/// Every dispersion polynomial satisfies `P(−ω̄) = conj P(ω)`, so roots
/// lie on the imaginary axis or in mirror pairs `±x + iy`. Where roots
/// collide on the axis and leave as mirror pairs (or the reverse), the
/// competing pairings are equally close at any k spacing. Such ties are
/// settled by convention instead of being reported as ambiguous: both
/// sides are sorted by Im when all roots are on the axis, by Re otherwise,
/// and matched in order.
fn on_axis(z: Complex64, radius: f64) -> bool {
    z.re.abs() <= (1e-7 * z.norm()).max(radius)
}

fn mirror_closed(idx: &[usize], roots: &[Complex64], radii: &[f64]) -> bool {
    idx.iter().all(|&i| {
        idx.iter().any(|&j| {
            let tol = (1e-7 * roots[i].norm().max(roots[j].norm())).max(radii[i] + radii[j]);
            (roots[i] + roots[j].conj()).norm() <= tol
        })
    })
}

fn mirror_sort(idx: &mut [usize], roots: &[Complex64], radii: &[f64]) {
    let axis = idx.iter().all(|&i| on_axis(roots[i], radii[i]));
    idx.sort_by(|&a, &b| {
        let (x, y) = (roots[a], roots[b]);
        if axis {
            x.im.total_cmp(&y.im)
        } else {
            x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
        }
    });
}

/// Maximum relative deviation between the collisional polynomial with the
/// effective friction substituted and the other model's polynomial.
///
/// Substitutions: radiative `γ → τω²`, phase diffusion `γ → Dk²`,
/// d'Alembert diffusion `γ → D(k² − ω²)`.
pub fn friction_equivalence(
    params_a: &ModelParams,
    params_b: &ModelParams,
    samples: &[(Complex64, f64)],
) -> Result<f64> {
    let other = match (params_a.kind(), params_b.kind()) {
        (ModelKind::Collisional, _) => params_b,
        (_, ModelKind::Collisional) => params_a,
        _ => {
            return Err(Error::input(format!(
                "friction equivalence pairs the collisional model with another, got {} and {}",
                params_a.kind(),
                params_b.kind()
            )))
        }
    };
    let effective = |omega: Complex64, k: f64| -> Result<Complex64> {
        match *other {
            ModelParams::Radiative { tau } => Ok(tau * omega * omega),
            ModelParams::PhaseDiffusion { diffusion } => Ok(re(diffusion * k * k)),
            ModelParams::DAlembertDiffusion { diffusion } => Ok(diffusion * (re(k * k) - omega * omega)),
            _ => Err(Error::input(format!(
                "no friction equivalence between collisional and {}",
                other.kind()
            ))),
        }
    };
    let mut worst: f64 = 0.0;
    for &(omega, k) in samples {
        let a = collisional_value(effective(omega, k)?, omega, k);
        let poly = build_polynomial(other, k)?.polynomial();
        let b = poly.eval(omega);
        let scale = poly.term_scale(omega);
        let diff = (a - b).norm();
        if diff > 0.0 {
            worst = worst.max(diff / scale);
        }
    }
    Ok(worst)
}

/// `n` log-spaced values from `k_min` to `k_max` inclusive.
pub fn log_grid(k_min: f64, k_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) || n < 2 {
        return Err(Error::input(format!(
            "log grid needs 0 < k_min < k_max and >= 2 points, got [{k_min}, {k_max}] x {n}"
        )));
    }
    let (a, b) = (k_min.ln(), k_max.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => k_min,
            _ if i == n - 1 => k_max,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// `n` evenly spaced values from `k_min` to `k_max` inclusive.
pub fn linear_grid(k_min: f64, k_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(k_min >= 0.0 && k_max > k_min && k_max.is_finite()) || n < 2 {
        return Err(Error::input(format!(
            "linear grid needs 0 <= k_min < k_max and >= 2 points, got [{k_min}, {k_max}] x {n}"
        )));
    }
    Ok((0..n)
        .map(|i| match i {
            _ if i == n - 1 => k_max,
            _ => k_min + (k_max - k_min) * i as f64 / (n - 1) as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn nearest(roots: &[Complex64], target: Complex64) -> Complex64 {
        *roots
            .iter()
            .min_by(|a, b| (**a - target).norm().total_cmp(&(**b - target).norm()))
            .unwrap()
    }

    #[test]
    fn collisional_k0_coefficients() {
        let p = build_polynomial(&ModelParams::collisional(0.0).unwrap(), 0.0).unwrap();
        assert_eq!(p.coeffs, [c(0., 0.), c(0., 0.), c(-1., 0.), c(0., 0.), c(0.25, 0.)]);
        let p = build_polynomial(&ModelParams::collisional(1.0).unwrap(), 1.0).unwrap();
        assert_eq!(p.eval(c(0., 0.)), c(0.25, 0.));
    }

    #[test]
    fn rejects_bad_k() {
        let m = ModelParams::Conservative;
        assert!(build_polynomial(&m, -1.0).is_err());
        assert!(build_polynomial(&m, f64::NAN).is_err());
        assert!(build_polynomial(&m, f64::INFINITY).is_err());
    }

    #[test]
    fn collisional_k0_roots() {
        let p = build_polynomial(&ModelParams::collisional(0.0).unwrap(), 0.0).unwrap();
        let r = solve_roots(&p).unwrap();
        for t in [c(0., 0.), c(2., 0.), c(-2., 0.)] {
            assert!((nearest(&r.roots, t) - t).norm() < 1e-12);
        }
        assert_eq!(r.roots.iter().filter(|w| w.norm() == 0.0).count(), 2);
    }

    #[test]
    fn radiative_k0_roots_match_factorization() {
        let tau: f64 = 100.0;
        let r = solve_roots(&build_polynomial(&ModelParams::radiative(tau).unwrap(), 0.0).unwrap()).unwrap();
        let s = (tau * tau - 1.0).sqrt();
        for t in [c(0., 2.0 * (-tau + s)), c(0., 2.0 * (-tau - s))] {
            let w = nearest(&r.roots, t);
            assert!((w - t).norm() / t.norm() < 1e-8, "{w} vs {t}");
        }
        assert!((c(0., 2.0 * (-tau + s)).im + 0.0100).abs() < 1e-5);
    }

    #[test]
    fn conservative_roots() {
        let r = solve_roots(&build_polynomial(&ModelParams::Conservative, 1.0).unwrap()).unwrap();
        assert_eq!(r.roots.len(), 2);
        let s2 = 2f64.sqrt();
        assert!((nearest(&r.roots, c(0.414, 0.)) - c(s2 - 1.0, 0.)).norm() < 1e-15);
        assert!((nearest(&r.roots, c(-2.4, 0.)) - c(-s2 - 1.0, 0.)).norm() < 1e-15);
    }

    #[test]
    fn asymptote_values() {
        let col = ModelParams::collisional(1.0).unwrap();
        let a = asymptotic_omega(&col, 0.1, Regime::Low).unwrap().principal;
        assert!((a - c(0., 2.5e-5)).norm() < 1e-18);
        let pd = ModelParams::phase_diffusion(1.0).unwrap();
        let a = asymptotic_omega(&pd, 0.1, Regime::Low).unwrap().principal;
        assert!((a - c(0., 2.5e-3)).norm() < 1e-16);
        let rad = ModelParams::radiative(100.0).unwrap();
        assert_eq!(
            asymptotic_omega(&rad, 0.0, Regime::High).unwrap().principal,
            c(0., -400.)
        );
        let low = asymptotic_omega(&rad, 0.5, Regime::Low).unwrap();
        for w in &low.candidates {
            let cube = w * w * w;
            assert!((cube - c(0., 0.0625 * 0.25 / 100.0)).norm() < 1e-15);
        }
        let hi = asymptotic_omega(&pd, 5.0, Regime::High).unwrap();
        for w in &hi.candidates {
            assert!((I * w * w * w - c(100., 0.)).norm() < 1e-12);
        }
        assert!(matches!(
            asymptotic_omega(&ModelParams::dalembert_diffusion(1.0).unwrap(), 0.1, Regime::Low),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            asymptotic_omega(&ModelParams::Conservative, 0.1, Regime::High),
            Err(Error::Unsupported(_))
        ));
        assert!(asymptotic_omega(&ModelParams::collisional(0.0).unwrap(), 0.1, Regime::Low).is_err());
    }

    #[test]
    fn collisional_hydrodynamic_branch_follows_low_asymptote() {
        let col = ModelParams::collisional(1.0).unwrap();
        let grid = log_grid(0.01, 0.1, 40).unwrap();
        let curve = track_branches(&col, &grid).unwrap();
        let end = *curve.hydrodynamic().last().unwrap();
        assert!((end - c(0., 2.5e-5)).norm() / 2.5e-5 < 0.01);

        // error shrinks as k halves
        let mut last = f64::INFINITY;
        for k in [0.08, 0.04, 0.02, 0.01] {
            let roots = solve_roots(&build_polynomial(&col, k).unwrap()).unwrap().roots;
            let a = asymptotic_omega(&col, k, Regime::Low).unwrap().principal;
            let err = (nearest(&roots, a) - a).norm() / a.norm();
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn phase_diffusion_low_asymptote_needs_large_diffusion() {
        // Exact small roots are k²u with u² − iDu − ¼ = 0; ik²/4D is the
        // large-D branch, accurate to O(1/D²).
        let pd = ModelParams::phase_diffusion(100.0).unwrap();
        for k in [0.08, 0.01] {
            let roots = solve_roots(&build_polynomial(&pd, k).unwrap()).unwrap().roots;
            let a = asymptotic_omega(&pd, k, Regime::Low).unwrap().principal;
            let err = (nearest(&roots, a) - a).norm() / a.norm();
            assert!(err < 1e-4, "k = {k}: {err}");
        }
        let hi = asymptotic_omega(&pd, 5.0, Regime::High).unwrap().principal;
        let roots = solve_roots(&build_polynomial(&pd, 5.0).unwrap()).unwrap().roots;
        assert!((nearest(&roots, hi) - hi).norm() / hi.norm() < 0.05);
    }

    #[test]
    fn conservative_branch_is_particle_dispersion() {
        let grid = linear_grid(0.0, 3.0, 31).unwrap();
        let curve = track_branches(&ModelParams::Conservative, &grid).unwrap();
        let particle = curve.hydrodynamic();
        for (k, w) in grid.iter().zip(particle) {
            assert!((w.re - ((1.0 + k * k).sqrt() - 1.0)).abs() < 1e-14 && w.im == 0.0);
        }
        let gapped = curve.branch(BranchLabel::ZitterbewegungGapped).unwrap();
        assert_eq!(gapped[0], c(-2.0, 0.0));
    }

    #[test]
    fn branch_tracking_guards() {
        let m = ModelParams::collisional(1.0).unwrap();
        assert!(track_branches(&m, &[0.1]).is_err());
        assert!(track_branches(&m, &[0.1, 0.1]).is_err());
        assert!(track_branches(&m, &[0.2, 0.1]).is_err());
    }

    #[test]
    fn coarse_grid_is_ambiguous_until_refined() {
        let m = ModelParams::collisional(1.0).unwrap();
        let err = track_branches(&m, &log_grid(0.01, 10.0, 5).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Ambiguous { .. }));
        assert!(track_branches(&m, &log_grid(0.01, 10.0, 200).unwrap()).is_ok());
    }

    #[test]
    fn exceptional_points_are_tracked() {
        // imaginary roots collide and leave as ±x + iy
        let m = ModelParams::collisional(1.0).unwrap();
        let curve = track_branches(&m, &log_grid(0.01, 10.0, 2000).unwrap()).unwrap();
        for b in &curve.branches {
            let jumps = b.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
            assert!(jumps < 0.1, "{jumps}");
        }
        // d'Alembert at D = 1 is a perfect square with a fourfold root at k = 1
        let d = ModelParams::dalembert_diffusion(1.0).unwrap();
        assert!(track_branches(&d, &log_grid(0.01, 10.0, 300).unwrap()).is_ok());
    }

    #[test]
    fn labels_survive_refinement() {
        let m = ModelParams::radiative(1.0).unwrap();
        let coarse = track_branches(&m, &linear_grid(0.0, 1.0, 41).unwrap()).unwrap();
        let fine = track_branches(&m, &linear_grid(0.0, 1.0, 161).unwrap()).unwrap();
        for (bc, lc) in coarse.branches.iter().zip(&coarse.labels) {
            let bf = fine
                .branches
                .iter()
                .position(|b| (b[0] - bc[0]).norm() < 1e-12 && (b[160] - bc[40]).norm() < 1e-9);
            if let Some(bf) = bf {
                assert_eq!(fine.labels[bf], *lc);
            }
        }
        assert_eq!(
            coarse
                .labels
                .iter()
                .filter(|l| **l == BranchLabel::Hydrodynamic)
                .count(),
            1
        );
    }

    #[test]
    fn friction_equivalence_pairs() {
        let samples: Vec<(Complex64, f64)> = (0..50)
            .map(|i| {
                let t = i as f64;
                (c((0.37 * t).sin() * 3.0, (0.91 * t).cos() * 2.0), 0.05 * t)
            })
            .collect();
        let col = ModelParams::collisional(0.3).unwrap();
        for other in [
            ModelParams::radiative(0.7).unwrap(),
            ModelParams::phase_diffusion(1.3).unwrap(),
            ModelParams::dalembert_diffusion(2.1).unwrap(),
        ] {
            assert!(friction_equivalence(&col, &other, &samples).unwrap() <= 1e-12);
            assert!(friction_equivalence(&other, &col, &samples).unwrap() <= 1e-12);
        }
        assert_eq!(
            friction_equivalence(&col, &ModelParams::radiative(1.0).unwrap(), &[]).unwrap(),
            0.0
        );
        assert!(friction_equivalence(
            &ModelParams::radiative(1.0).unwrap(),
            &ModelParams::phase_diffusion(1.0).unwrap(),
            &samples
        )
        .is_err());
        assert!(friction_equivalence(&col, &ModelParams::Conservative, &samples).is_err());
    }

    #[test]
    fn real_coefficient_cases_pair_roots() {
        for p in [
            ModelParams::collisional(0.0).unwrap(),
            ModelParams::radiative(0.0).unwrap(),
            ModelParams::phase_diffusion(0.0).unwrap(),
        ] {
            for k in [0.1, 0.7, 2.5] {
                let r = solve_roots(&build_polynomial(&p, k).unwrap()).unwrap();
                for w in &r.roots {
                    assert!(w.re.abs() < 1e-12 * w.norm() || w.im.abs() < 1e-12 * w.norm());
                    assert!((nearest(&r.roots, -w) + w).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn radiative_runaway_is_reported_growing() {
        let r = solve_roots(&build_polynomial(&ModelParams::radiative(1.0).unwrap(), 0.5).unwrap()).unwrap();
        assert_eq!(r.growing().len(), 2);
        let r = solve_roots(&build_polynomial(&ModelParams::radiative(10.0).unwrap(), 0.5).unwrap()).unwrap();
        let grow = r.growing();
        assert!(grow.iter().any(|w| (w.im + 40.0).abs() < 0.5), "{grow:?}");
    }

    #[test]
    fn grids() {
        let g = log_grid(0.01, 10.0, 4).unwrap();
        assert_eq!(g[0], 0.01);
        assert_eq!(g[3], 10.0);
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert!(log_grid(0.0, 1.0, 4).is_err());
        assert_eq!(linear_grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
    }

    proptest! {
        #[test]
        fn expansion_matches_unexpanded_form(
            wr in -10.0f64..10.0, wi in -10.0f64..10.0, k in 0.0f64..5.0,
            rate in 0.0f64..3.0, which in 0usize..5,
        ) {
            let params = [
                ModelParams::Conservative,
                ModelParams::collisional(rate).unwrap(),
                ModelParams::radiative(rate).unwrap(),
                ModelParams::phase_diffusion(rate).unwrap(),
                ModelParams::dalembert_diffusion(rate).unwrap(),
            ][which];
            let w = c(wr, wi);
            let poly = build_polynomial(&params, k).unwrap();
            let direct = dispersion_value(&params, w, k);
            let scale = poly.polynomial().term_scale(w);
            prop_assert!((poly.eval(w) - direct).norm() <= 1e-14 * scale);
        }

        #[test]
        fn solved_roots_certify(k in 0.0f64..8.0, rate in 0.0f64..50.0, which in 0usize..5) {
            let params = [
                ModelParams::Conservative,
                ModelParams::collisional(rate).unwrap(),
                ModelParams::radiative(rate).unwrap(),
                ModelParams::phase_diffusion(rate).unwrap(),
                ModelParams::dalembert_diffusion(rate).unwrap(),
            ][which];
            let poly = build_polynomial(&params, k).unwrap();
            let r = solve_roots(&poly).unwrap();
            prop_assert_eq!(r.roots.len(), poly.degree());
            prop_assert!(r.residuals.iter().all(|x| *x <= 1e-10));
            let v = poly::vieta_check(&poly.polynomial(), &r.roots);
            prop_assert!(v.sum <= 1e-10 && v.product <= 1e-10, "{:?}", v);
        }
    }
}
