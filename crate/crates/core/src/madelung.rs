//! Madelung form `ψ = √ρ e^{iS}` of the relativistic field, the Bohm
//! quantum potential `Q = □√ρ / (2√ρ)`, and residual checks of the
//! continuity and Hamilton-Jacobi equations
//!
//! ```text
//! ∂ₜρ = ∂ₜ(ρ∂ₜS) − ∇·(ρ∇S)
//! ∂ₜS − [(∂ₜS)² − (∇S)²]/2 + U + Q = RHS
//! ```
//!
//! with `RHS = 0, −γS, τ∂ₜ²S, D∇²S, −D□S` for the five models.
//!
//! Time derivatives always come from three stored levels, never from the
//! equation of motion. Spatial derivatives are taken spectrally on the field
//! `√ρ e^{iS}` rebuilt from the Madelung variables, so the checks see exactly
//! the `(ρ, S)` they are given while avoiding derivatives of an unwrapped,
//! non-periodic phase.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid1D};
use crate::units::ModelParams;

/// Densities below this are treated as nodes.
pub const RHO_FLOOR: f64 = 1e-30;

/// Q and the residuals are also skipped below this fraction of the peak
/// density: there, roundoff and boundary leakage in ψ are amplified by the
/// spectral derivatives.
pub const RHO_REL_FLOOR: f64 = 1e-8;

/// Where Q and the residuals are evaluated: above both floors.
pub fn density_mask(rho: &[f64]) -> Vec<bool> {
    let floor = RHO_FLOOR.max(RHO_REL_FLOOR * rho.iter().fold(0.0, |a: f64, &b| a.max(b)));
    rho.iter().map(|&r| r >= floor).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MadelungFields {
    pub grid: Grid1D,
    pub rho: Vec<f64>,
    pub s: Vec<f64>,
    /// False where `rho < RHO_FLOOR`; `s` there is a nearest-neighbour fill.
    pub valid: Vec<bool>,
    pub t: f64,
}

impl MadelungFields {
    /// Build from given `ρ` and `S`, e.g. a linearized trajectory.
    pub fn new(grid: Grid1D, rho: Vec<f64>, s: Vec<f64>, t: f64) -> Result<Self> {
        if rho.len() != grid.n() || s.len() != grid.n() {
            return Err(Error::input("rho and S must have one value per grid point"));
        }
        if rho.iter().chain(&s).any(|v| !v.is_finite()) {
            return Err(Error::input("rho and S must be finite"));
        }
        if rho.iter().any(|&r| r < 0.0) {
            return Err(Error::input("rho must be non-negative"));
        }
        let valid = rho.iter().map(|&r| r >= RHO_FLOOR).collect();
        Ok(MadelungFields { grid, rho, s, valid, t })
    }

    /// `√ρ e^{iS}`.
    pub fn reconstruct(&self) -> ComplexField {
        let values = self
            .rho
            .iter()
            .zip(&self.s)
            .map(|(&r, &s)| Complex64::from_polar(r.sqrt(), s))
            .collect();
        ComplexField {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn excluded_fraction(&self) -> f64 {
        self.valid.iter().filter(|v| !**v).count() as f64 / self.valid.len() as f64
    }
}

fn wrap(d: f64) -> f64 {
    d - 2.0 * PI * (d / (2.0 * PI)).round()
}

/// Split `ψ` at time `t` into density and spatially unwrapped phase.
///
/// With `prior_s`, the phase is shifted by the multiple of 2π closest to
/// the prior in the least-squares sense.
pub fn decompose(psi: &ComplexField, t: f64, prior_s: Option<&[f64]>) -> Result<MadelungFields> {
    let n = psi.values.len();
    if psi.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("psi must be finite"));
    }
    let rho: Vec<f64> = psi.values.iter().map(|v| v.norm_sqr()).collect();
    let valid: Vec<bool> = rho.iter().map(|&r| r >= RHO_FLOOR).collect();
    let first = valid
        .iter()
        .position(|v| *v)
        .ok_or_else(|| Error::input("cannot decompose a field that vanishes everywhere"))?;

    let mut s = vec![0.0; n];
    s[first] = psi.values[first].arg();
    for i in first + 1..n {
        s[i] = if valid[i] {
            s[i - 1] + wrap(psi.values[i].arg() - s[i - 1])
        } else {
            s[i - 1]
        };
    }
    for i in (0..first).rev() {
        s[i] = s[i + 1];
    }

    if let Some(prior) = prior_s {
        if prior.len() != n {
            return Err(Error::input("prior phase has the wrong length"));
        }
        let (sum, count) = (0..n)
            .filter(|&i| valid[i])
            .fold((0.0, 0usize), |(a, c), i| (a + prior[i] - s[i], c + 1));
        let shift = 2.0 * PI * (sum / count as f64 / (2.0 * PI)).round();
        s.iter_mut().for_each(|v| *v += shift);
    }

    Ok(MadelungFields {
        grid: psi.grid.clone(),
        rho,
        s,
        valid,
        t,
    })
}

/// Real field with an evaluation mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedField {
    /// Zero where masked.
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

/// `Q = ½[∂ₜ²√ρ − ∇²√ρ]/√ρ` at the middle of three levels spaced by `dt`.
pub fn quantum_potential(grid: &Grid1D, levels: &[&[f64]], dt: f64) -> Result<MaskedField> {
    if levels.len() != 3 {
        return Err(Error::input(format!(
            "quantum potential needs three time levels, got {}",
            levels.len()
        )));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::input("time spacing must be positive"));
    }
    let amp: Vec<Vec<f64>> = levels
        .iter()
        .map(|l| check_rho(grid, l).map(|_| l.iter().map(|r| r.sqrt()).collect()))
        .collect::<Result<_>>()?;
    let lap = grid.derivative_real(&amp[1], 2)?;
    Ok(mask_quotient(levels[1], |i| {
        let ddt = (amp[2][i] - 2.0 * amp[1][i] + amp[0][i]) / (dt * dt);
        0.5 * (ddt - lap[i]) / amp[1][i]
    }))
}

/// `Q = −½∇²√ρ/√ρ` for a single level, ignoring any time dependence.
pub fn quantum_potential_static(grid: &Grid1D, rho: &[f64]) -> Result<MaskedField> {
    check_rho(grid, rho)?;
    let amp: Vec<f64> = rho.iter().map(|r| r.sqrt()).collect();
    let lap = grid.derivative_real(&amp, 2)?;
    Ok(mask_quotient(rho, |i| -0.5 * lap[i] / amp[i]))
}

/// Static `Q` at an arbitrary `x`, from trigonometric interpolation of
/// `√ρ` and `∇²√ρ` separately. Interpolating `Q` itself would pick up the
/// ill-conditioned values near nodes.
pub fn quantum_potential_static_at(grid: &Grid1D, rho: &[f64], x: f64) -> Result<f64> {
    check_rho(grid, rho)?;
    let amp: Vec<f64> = rho.iter().map(|r| r.sqrt()).collect();
    let lap = grid.derivative_real(&amp, 2)?;
    let a = grid.interpolate_real(&amp, x)?;
    let peak = rho.iter().fold(0.0, |m: f64, &r| m.max(r));
    if a * a < RHO_FLOOR.max(RHO_REL_FLOOR * peak) {
        return Err(Error::input(format!("density at x = {x} is below the node floor")));
    }
    Ok(-0.5 * grid.interpolate_real(&lap, x)? / a)
}

fn check_rho(grid: &Grid1D, rho: &[f64]) -> Result<()> {
    if rho.len() != grid.n() {
        return Err(Error::input("density has the wrong length for the grid"));
    }
    if rho.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::input("density must be finite and non-negative"));
    }
    Ok(())
}

fn mask_quotient(rho: &[f64], f: impl Fn(usize) -> f64) -> MaskedField {
    let valid = density_mask(rho);
    let values = (0..rho.len()).map(|i| if valid[i] { f(i) } else { 0.0 }).collect();
    MaskedField { values, valid }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Charges {
    /// `∫ρ`.
    pub n: f64,
    /// `∫ρ(1 − ∂ₜS)`.
    pub n_mod: f64,
    /// `−∫ρ∂ₜS`.
    pub e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub continuity_residual: f64,
    pub hj_residual: f64,
    pub n: f64,
    pub n_mod: f64,
    pub e: f64,
    pub t: f64,
    /// Fraction of points left out of the residual norms.
    pub excluded_fraction: f64,
}

fn spacing(history: &[MadelungFields]) -> Result<f64> {
    if history.len() != 3 {
        return Err(Error::input(format!(
            "three consecutive levels are needed, got {}",
            history.len()
        )));
    }
    if history[1].grid != history[0].grid || history[2].grid != history[0].grid {
        return Err(Error::input("all levels must share one grid"));
    }
    let d0 = history[1].t - history[0].t;
    let d1 = history[2].t - history[1].t;
    if !(d0 > 0.0) || (d1 - d0).abs() > 1e-9 * d0 + 8.0 * f64::EPSILON * history[2].t.abs() {
        return Err(Error::input(format!(
            "levels must be equally spaced in time (got steps {d0} and {d1})"
        )));
    }
    Ok(0.5 * (d0 + d1))
}

/// `ρ∂ₜS` at `t₁ ± dt/2` and at `t₁`, from the bilinear form `Im(ψ̄ψ')`.
struct PhaseFlux {
    lower: Vec<f64>,
    upper: Vec<f64>,
    centre: Vec<f64>,
}

fn phase_flux(psi: &[ComplexField; 3], dt: f64) -> PhaseFlux {
    let n = psi[0].values.len();
    let im = |a: &ComplexField, b: &ComplexField, i: usize| (a.values[i].conj() * b.values[i]).im;
    PhaseFlux {
        lower: (0..n).map(|i| im(&psi[0], &psi[1], i) / dt).collect(),
        upper: (0..n).map(|i| im(&psi[1], &psi[2], i) / dt).collect(),
        centre: (0..n)
            .map(|i| (psi[1].values[i].conj() * (psi[2].values[i] - psi[0].values[i])).im / (2.0 * dt))
            .collect(),
    }
}

/// `N`, `N_mod` and `E` at the middle level.
pub fn conserved_charges(history: &[MadelungFields]) -> Result<Charges> {
    let dt = spacing(history)?;
    let psi = [
        history[0].reconstruct(),
        history[1].reconstruct(),
        history[2].reconstruct(),
    ];
    let flux = phase_flux(&psi, dt);
    let grid = &history[1].grid;
    let n = grid.integrate(&history[1].rho);
    let e = -grid.integrate(&flux.centre);
    Ok(Charges { n, n_mod: n + e, e })
}

/// Continuity and Hamilton-Jacobi residual norms at the middle level.
///
/// `potential` is the static `U`; `None` means `U = 0`.
pub fn residuals(history: &[MadelungFields], params: &ModelParams, potential: Option<&[f64]>) -> Result<Diagnostics> {
    let dt = spacing(history)?;
    let mid = &history[1];
    let grid = &mid.grid;
    let n = grid.n();
    if let Some(u) = potential {
        if u.len() != n {
            return Err(Error::input("potential has the wrong length for the grid"));
        }
    }
    let psi = [
        history[0].reconstruct(),
        history[1].reconstruct(),
        history[2].reconstruct(),
    ];
    let flux = phase_flux(&psi, dt);

    // ψ identities at the middle level
    let p = &psi[1].values;
    let d1 = grid.derivative(p, 1)?;
    let d2 = grid.derivative(p, 2)?;
    let div_flux: Vec<f64> = (0..n).map(|i| (p[i].conj() * d2[i]).im).collect();

    let rho_levels = [&history[0].rho[..], &history[1].rho[..], &history[2].rho[..]];
    let q = quantum_potential(grid, &rho_levels, dt)?;

    let resolved = density_mask(&mid.rho);
    let valid: Vec<bool> = (0..n)
        .map(|i| resolved[i] && history.iter().all(|h| h.valid[i]))
        .collect();

    let mut cont = vec![0.0; n];
    let mut hj = vec![0.0; n];
    for i in 0..n {
        if !valid[i] {
            continue;
        }
        let drho = (history[2].rho[i] - history[0].rho[i]) / (2.0 * dt);
        let dflux = (flux.upper[i] - flux.lower[i]) / dt;
        cont[i] = drho - (dflux - div_flux[i]);

        let ds_up = wrap(history[2].s[i] - mid.s[i]);
        let ds_down = wrap(mid.s[i] - history[0].s[i]);
        let st = (ds_up + ds_down) / (2.0 * dt);
        let stt = (ds_up - ds_down) / (dt * dt);
        let g = d1[i] / p[i];
        let grad_s = g.im;
        let lap_s = (d2[i] / p[i] - g * g).im;
        let rhs = match *params {
            ModelParams::Conservative => 0.0,
            ModelParams::Collisional { gamma } => -gamma * mid.s[i],
            ModelParams::Radiative { tau } => tau * stt,
            ModelParams::PhaseDiffusion { diffusion } => diffusion * lap_s,
            ModelParams::DAlembertDiffusion { diffusion } => -diffusion * (stt - lap_s),
        };
        let u = potential.map_or(0.0, |u| u[i]);
        hj[i] = st - 0.5 * (st * st - grad_s * grad_s) + u + q.values[i] - rhs;
    }

    let charges = conserved_charges(history)?;
    let excluded = valid.iter().filter(|v| !**v).count() as f64 / n as f64;
    let out = Diagnostics {
        continuity_residual: grid.l2_norm(&cont),
        hj_residual: grid.l2_norm(&hj),
        n: charges.n,
        n_mod: charges.n_mod,
        e: charges.e,
        t: mid.t,
        excluded_fraction: excluded,
    };
    if !(out.continuity_residual.is_finite() && out.hj_residual.is_finite()) {
        return Err(Error::numerical("non-finite Madelung residual"));
    }
    Ok(out)
}
