//! Browser bindings for three interactive views: a dispersion sweep, a
//! free wave-packet evolution with its quantum potential, and the
//! relativistic map of harmonic-oscillator levels.
//!
//! Each view has a plain Rust function (tested natively) and a thin
//! `wasm_bindgen` wrapper that turns errors into JS exceptions.
// `!(x > 0.0)` is used deliberately so NaN falls into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rqbm::dispersion::{log_grid, track_branches};
use rqbm::evolve::{particle_branch_project, propagate_exact};
use rqbm::grid::{ComplexField, Grid1D};
use rqbm::madelung::{decompose, quantum_potential};
use rqbm::spectrum::{nonrel_eigen_richardson, relativistic_map, PotentialSpec};
use rqbm::units::{ModelKind, ModelParams};
use wasm_bindgen::prelude::*;

/// Tracked roots over a log-spaced k grid.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Sweep {
    k: Vec<f64>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    labels: Vec<String>,
}

#[wasm_bindgen]
impl Sweep {
    pub fn k(&self) -> Vec<f64> {
        self.k.clone()
    }

    pub fn branch_count(&self) -> usize {
        self.re.len()
    }

    pub fn re(&self, branch: usize) -> Vec<f64> {
        self.re.get(branch).cloned().unwrap_or_default()
    }

    pub fn im(&self, branch: usize) -> Vec<f64> {
        self.im.get(branch).cloned().unwrap_or_default()
    }

    pub fn label(&self, branch: usize) -> String {
        self.labels.get(branch).cloned().unwrap_or_default()
    }
}

/// `rate` is γ, τ or D according to `model`; ignored for the conservative model.
pub fn sweep(model: &str, rate: f64, k_min: f64, k_max: f64, steps: usize) -> rqbm::Result<Sweep> {
    let kind: ModelKind = model.parse()?;
    let params = match kind {
        ModelKind::Conservative => ModelParams::Conservative,
        ModelKind::Collisional => ModelParams::collisional(rate)?,
        ModelKind::Radiative => ModelParams::radiative(rate)?,
        ModelKind::PhaseDiffusion => ModelParams::phase_diffusion(rate)?,
        ModelKind::DAlembertDiffusion => ModelParams::dalembert_diffusion(rate)?,
    };
    let k = log_grid(k_min, k_max, steps)?;
    let curve = track_branches(&params, &k)?;
    Ok(Sweep {
        re: curve
            .branches
            .iter()
            .map(|b| b.iter().map(|w| w.re).collect())
            .collect(),
        im: curve
            .branches
            .iter()
            .map(|b| b.iter().map(|w| w.im).collect())
            .collect(),
        labels: curve.labels.iter().map(|l| l.name().to_string()).collect(),
        k,
    })
}

#[wasm_bindgen(js_name = dispersionSweep)]
pub fn dispersion_sweep(model: &str, rate: f64, k_min: f64, k_max: f64, steps: usize) -> Result<Sweep, JsError> {
    sweep(model, rate, k_min, k_max, steps).map_err(|e| JsError::new(&e.to_string()))
}

/// Gaussian packet at time `t`, particle branch only, exact propagation.
/// Returns `[x…, ρ…, Q…]`, each block `n` long; `Q` is 0 where ρ is masked.
pub fn packet(k0: f64, sigma: f64, n: usize, length: f64, t: f64) -> rqbm::Result<Vec<f64>> {
    let grid = Grid1D::new(n, length)?;
    if !(sigma > 0.0) {
        return Err(rqbm::Error::Input(format!("sigma must be positive, got {sigma}")));
    }
    let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
    let psi0 = ComplexField::from_fn(&grid, |x| {
        norm * Complex64::new(-x * x / (4.0 * sigma * sigma), k0 * x).exp()
    });
    let state = particle_branch_project(&psi0);
    let dt = 0.05;
    let levels: Vec<Vec<f64>> = [t - dt, t, t + dt]
        .iter()
        .map(|&s| {
            let psi = propagate_exact(&state, s).psi;
            decompose(&psi, s, None).map(|m| m.rho)
        })
        .collect::<rqbm::Result<_>>()?;
    let refs: Vec<&[f64]> = levels.iter().map(|l| l.as_slice()).collect();
    let q = quantum_potential(&grid, &refs, dt)?;
    let mut out = grid.xs();
    out.extend_from_slice(&levels[1]);
    out.extend_from_slice(&q.values);
    Ok(out)
}

#[wasm_bindgen(js_name = packetSnapshot)]
pub fn packet_snapshot(k0: f64, sigma: f64, n: usize, length: f64, t: f64) -> Result<Vec<f64>, JsError> {
    packet(k0, sigma, n, length, t).map_err(|e| JsError::new(&e.to_string()))
}

/// Lowest `count` harmonic levels on a grid wide enough for `omega0`.
/// Returns `[ε…, E…, E_series…]`.
pub fn harmonic_levels(omega0: f64, count: usize) -> rqbm::Result<Vec<f64>> {
    if !(omega0 > 0.0) {
        return Err(rqbm::Error::Input(format!("omega0 must be positive, got {omega0}")));
    }
    // ground-state width 1/√ω₀; twelve widths per side plus room for `count` levels
    let width = 1.0 / omega0.sqrt();
    let length = 2.0 * width * (12.0 + (2.0 * count as f64).sqrt());
    let n = (length / (width / 16.0)).ceil() as usize;
    let n = (n + n % 2).clamp(64, 4096);
    let grid = Grid1D::new(n, length)?;
    let eps = nonrel_eigen_richardson(&PotentialSpec::Harmonic { omega0 }, &grid, count)?;
    let map = relativistic_map(&eps)?;
    let mut out = map.epsilon;
    out.extend(map.energy);
    out.extend(map.energy_series);
    Ok(out)
}

#[wasm_bindgen(js_name = harmonicSpectrum)]
pub fn harmonic_spectrum(omega0: f64, count: usize) -> Result<Vec<f64>, JsError> {
    harmonic_levels(omega0, count).map_err(|e| JsError::new(&e.to_string()))
}
