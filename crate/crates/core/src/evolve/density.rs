//! Linearized density perturbations of the dissipative models.
//!
//! Per spatial mode the density obeys a fourth-order linear ODE in time
//! whose characteristic polynomial (with `ρ ∝ e^{iωt}`) is the model's
//! dispersion polynomial. The exact propagator expands the state in
//! `tᵖ e^{iωt}` over the roots, with confluent terms for repeated roots.

use num_complex::Complex64;

use crate::dispersion::{build_polynomial, solve_roots};
use crate::error::{Error, Result};
use crate::poly::SolverTolerances;
use crate::units::ModelParams;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(ρ, ∂ₜρ, ∂ₜ²ρ, ∂ₜ³ρ)` for each tracked mode.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityModeState {
    pub k: Vec<f64>,
    pub derivs: Vec<[Complex64; 4]>,
    pub t: f64,
}

impl DensityModeState {
    pub fn new(k: Vec<f64>, derivs: Vec<[Complex64; 4]>, t: f64) -> Result<Self> {
        if k.len() != derivs.len() {
            return Err(Error::input("one derivative set per mode is required"));
        }
        Ok(DensityModeState { k, derivs, t })
    }

    /// Initial data lying entirely on the hydrodynamic root (least `|ω|`)
    /// of each mode: `ρ⁽ⁿ⁾ = (iω)ⁿ ρ`.
    pub fn hydrodynamic(params: &ModelParams, k: Vec<f64>, amplitudes: &[Complex64]) -> Result<Self> {
        if k.len() != amplitudes.len() {
            return Err(Error::input("one amplitude per mode is required"));
        }
        let derivs = k
            .iter()
            .zip(amplitudes)
            .map(|(&k, &a)| {
                let w = hydrodynamic_root(params, k)?;
                let l = I * w;
                Ok([a, l * a, l * l * a, l * l * l * a])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DensityModeState { k, derivs, t: 0.0 })
    }
}

/// The dispersion root of least magnitude at `|k|`.
pub fn hydrodynamic_root(params: &ModelParams, k: f64) -> Result<Complex64> {
    let roots = solve_roots(&build_polynomial(params, k.abs())?)?.roots;
    Ok(roots
        .into_iter()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("quartic has roots"))
}

/// Exact propagator for one mode.
#[derive(Debug, Clone)]
pub struct ModePropagator {
    /// Distinct characteristic exponents `λ = iω` with their multiplicities.
    exponents: Vec<(Complex64, usize)>,
    /// Roots `ω` as solved, before clustering.
    pub roots: Vec<Complex64>,
}

impl ModePropagator {
    pub fn new(params: &ModelParams, k: f64) -> Result<Self> {
        if !params.is_dissipative() {
            return Err(Error::input("density evolution needs a dissipative model"));
        }
        let tol = SolverTolerances::default();
        let roots = solve_roots(&build_polynomial(params, k.abs())?)?.roots;
        let mut clusters: Vec<(Complex64, usize)> = Vec::new();
        for w in &roots {
            match clusters
                .iter_mut()
                .find(|(c, m)| (*c / *m as f64 - w).norm() <= tol.degeneracy)
            {
                Some((sum, m)) => {
                    *sum += w;
                    *m += 1;
                }
                None => clusters.push((*w, 1)),
            }
        }
        let exponents = clusters.into_iter().map(|(sum, m)| (I * (sum / m as f64), m)).collect();
        Ok(ModePropagator { exponents, roots })
    }

    /// `q`-th time derivative of every basis function `tᵖ e^{λt}` at `t`.
    fn basis_derivatives(&self, t: f64) -> [[Complex64; 4]; 4] {
        let mut m = [[ZERO; 4]; 4];
        let mut col = 0;
        for &(lambda, mult) in &self.exponents {
            let e = (lambda * t).exp();
            for p in 0..mult {
                for (q, row) in m.iter_mut().enumerate() {
                    // dq/dtq [tᵖ e^{λt}] = Σ_r C(q,r) p!/(p−r)! t^{p−r} λ^{q−r} e^{λt}
                    let mut acc = ZERO;
                    for r in 0..=q.min(p) {
                        let coeff = binomial(q, r) * falling(p, r);
                        acc += coeff * t.powi((p - r) as i32) * lambda.powu((q - r) as u32);
                    }
                    row[col] = acc * e;
                }
                col += 1;
            }
        }
        m
    }

    pub fn propagate(&self, init: &[Complex64; 4], t: f64) -> Result<[Complex64; 4]> {
        let coeffs = solve4(self.basis_derivatives(0.0), *init)?;
        let m = self.basis_derivatives(t);
        let mut out = [ZERO; 4];
        for q in 0..4 {
            out[q] = (0..4).map(|b| m[q][b] * coeffs[b]).sum();
        }
        Ok(out)
    }
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling(p: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (p - i) as f64)
}

/// Gaussian elimination with partial pivoting on a 4×4 complex system.
fn solve4(mut a: [[Complex64; 4]; 4], mut b: [Complex64; 4]) -> Result<[Complex64; 4]> {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col] == ZERO {
            return Err(Error::numerical("singular confluent Vandermonde system"));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            let pivot = a[col];
            for (dst, src) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *dst -= f * src;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [ZERO; 4];
    for row in (0..4).rev() {
        let s: Complex64 = (row + 1..4).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}

/// Advance every mode of `init` by `t`.
pub fn evolve_density(params: &ModelParams, init: &DensityModeState, t: f64) -> Result<DensityModeState> {
    let derivs = init
        .k
        .iter()
        .zip(&init.derivs)
        .map(|(&k, d)| {
            if d.iter().all(|v| *v == ZERO) {
                return Ok([ZERO; 4]);
            }
            ModePropagator::new(params, k)?.propagate(d, t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityModeState {
        k: init.k.clone(),
        derivs,
        t: init.t + t,
    })
}

/// `∂ₜ⁴ρ` of one mode, written directly from the linear density equations
/// (`□ → ∂ₜ² + k²` per mode):
///
/// - collisional: `ρ'' + γρ' + ¼□²ρ = 0`
/// - radiative: `ρ'' − τρ''' + ¼□²ρ = 0`
/// - phase diffusion: `ρ'' + Dk²ρ' + ¼□²ρ = 0`
/// - d'Alembert diffusion: `ρ'' + D□ρ' + ¼□²ρ = 0`
fn fourth_derivative(params: &ModelParams, k: f64, y: &[Complex64; 4]) -> Complex64 {
    let k2 = k * k;
    // ¼□²ρ = ¼(ρ'''' + 2k²ρ'' + k⁴ρ), solved for ρ''''
    let base = -(2.0 * k2 + 4.0) * y[2] - k2 * k2 * y[0];
    match *params {
        ModelParams::Collisional { gamma } => base - 4.0 * gamma * y[1],
        ModelParams::Radiative { tau } => base + 4.0 * tau * y[3],
        ModelParams::PhaseDiffusion { diffusion } => base - 4.0 * diffusion * k2 * y[1],
        ModelParams::DAlembertDiffusion { diffusion } => base - 4.0 * diffusion * (y[3] + k2 * y[1]),
        ModelParams::Conservative => base,
    }
}

/// Classical RK4 integration of one mode, independent of the root solver.
pub fn rk4_density_mode(params: &ModelParams, k: f64, init: &[Complex64; 4], t: f64, steps: usize) -> [Complex64; 4] {
    let h = t / steps as f64;
    let f = |y: &[Complex64; 4]| -> [Complex64; 4] { [y[1], y[2], y[3], fourth_derivative(params, k, y)] };
    let axpy = |y: &[Complex64; 4], s: f64, d: &[Complex64; 4]| -> [Complex64; 4] {
        [y[0] + s * d[0], y[1] + s * d[1], y[2] + s * d[2], y[3] + s * d[3]]
    };
    let mut y = *init;
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, 0.5 * h, &k1));
        let k3 = f(&axpy(&y, 0.5 * h, &k2));
        let k4 = f(&axpy(&y, h, &k3));
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

/// `‖a − b‖ / ‖a‖` over the four derivatives.
pub fn relative_difference(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    if num == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}
