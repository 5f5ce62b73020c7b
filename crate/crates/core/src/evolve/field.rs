//! Relativistic Schrödinger field, `□ψ − 2i∂ₜψ = 0` in Compton units.
//!
//! A plane wave `e^{i(kx − ωt)}` solves it for `ω² + 2ω − k² = 0`, i.e. on
//! the particle branch `ω₊ = √(1+k²) − 1` or the gapped branch
//! `ω₋ = −√(1+k²) − 1`. Each Fourier mode is therefore
//! `ψ_k(t) = A e^{−iω₊t} + B e^{−iω₋t}` with `(A, B)` fixed by `(ψ, ∂ₜψ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid1D};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(ω₊, ω₋)` for wavenumber `k`. `ω₊` is evaluated as `k²/(√(1+k²) + 1)`
/// so it keeps full relative precision in the nonrelativistic limit.
pub fn conservative_mode_frequencies(k: f64) -> (f64, f64) {
    let root = (1.0 + k * k).sqrt();
    (k * k / (root + 1.0), -root - 1.0)
}

/// `ψ` and `∂ₜψ` at time `t`; the equation is second order in time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub psi: ComplexField,
    pub dpsi_dt: ComplexField,
    pub t: f64,
}

impl FieldState {
    pub fn new(psi: ComplexField, dpsi_dt: ComplexField, t: f64) -> Result<Self> {
        if psi.grid != dpsi_dt.grid || psi.values.len() != dpsi_dt.values.len() {
            return Err(Error::input("psi and dpsi_dt must live on the same grid"));
        }
        Ok(FieldState { psi, dpsi_dt, t })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.psi.grid
    }
}

/// Sets `∂ₜψ_k = −iω₊(k) ψ_k` for every mode so no gapped-branch
/// component is present.
pub fn particle_branch_project(psi: &ComplexField) -> FieldState {
    let grid = &psi.grid;
    let modes = grid.forward(&psi.values).expect("field length matches its grid");
    let dmodes: Vec<Complex64> = modes
        .iter()
        .enumerate()
        .map(|(j, m)| -I * conservative_mode_frequencies(grid.wavenumber(j)).0 * m)
        .collect();
    let dpsi = grid.inverse(&dmodes).expect("field length matches its grid");
    FieldState {
        psi: psi.clone(),
        dpsi_dt: ComplexField {
            grid: grid.clone(),
            values: dpsi,
        },
        t: 0.0,
    }
}

/// Per-mode `(A, B)`: particle- and gapped-branch amplitudes at the state's time.
pub fn branch_coefficients(state: &FieldState) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = state.grid();
    let psi = grid.forward(&state.psi.values).expect("grid-consistent state");
    let dpsi = grid.forward(&state.dpsi_dt.values).expect("grid-consistent state");
    let mut a = Vec::with_capacity(psi.len());
    let mut b = Vec::with_capacity(psi.len());
    for j in 0..psi.len() {
        let (wp, wm) = conservative_mode_frequencies(grid.wavenumber(j));
        let gap = wp - wm;
        a.push((I * dpsi[j] - wm * psi[j]) / gap);
        b.push((wp * psi[j] - I * dpsi[j]) / gap);
    }
    (a, b)
}

/// Gapped-branch amplitude `B` of every mode.
pub fn gapped_coefficients(state: &FieldState) -> Vec<Complex64> {
    branch_coefficients(state).1
}

/// Exact free evolution of `state` by `t` (any sign).
pub fn propagate_exact(state: &FieldState, t: f64) -> FieldState {
    let grid = state.grid();
    let (a, b) = branch_coefficients(state);
    let (psi, dpsi) = exact_modes(grid, &a, &b, t);
    FieldState {
        psi: ComplexField {
            grid: grid.clone(),
            values: grid.inverse(&psi).expect("grid-consistent"),
        },
        dpsi_dt: ComplexField {
            grid: grid.clone(),
            values: grid.inverse(&dpsi).expect("grid-consistent"),
        },
        t: state.t + t,
    }
}

fn exact_modes(grid: &Grid1D, a: &[Complex64], b: &[Complex64], t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut psi = Vec::with_capacity(a.len());
    let mut dpsi = Vec::with_capacity(a.len());
    for j in 0..a.len() {
        let (wp, wm) = conservative_mode_frequencies(grid.wavenumber(j));
        let ea = a[j] * Complex64::from_polar(1.0, -wp * t);
        let eb = b[j] * Complex64::from_polar(1.0, -wm * t);
        psi.push(ea + eb);
        dpsi.push(-I * (wp * ea + wm * eb));
    }
    (psi, dpsi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Per-mode 2×2 propagator; free field only.
    ExactMode,
    /// Central differences in time, spectral Laplacian, `U` allowed.
    Stepper,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "exact_mode" | "exact" => Ok(Method::ExactMode),
            "stepper" => Ok(Method::Stepper),
            _ => Err(Error::input(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
    pub snapshot_stride: usize,
}

impl EvolutionConfig {
    pub fn validate(&self, grid: &Grid1D) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::input(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 || self.snapshot_stride == 0 {
            return Err(Error::input("steps and snapshot_stride must be positive"));
        }
        if self.method == Method::Stepper {
            if self.dt >= 0.5 * grid.dx() {
                return Err(Error::input(format!(
                    "CFL violation: stepper needs dt < 0.5·dx = {}, got {}",
                    0.5 * grid.dx(),
                    self.dt
                )));
            }
            if self.dt >= 0.1 {
                return Err(Error::input(format!(
                    "stepper needs dt < 0.1 to resolve the Zitterbewegung period, got {}",
                    self.dt
                )));
            }
        }
        Ok(())
    }
}

enum Scheme {
    Exact { a: Vec<Complex64>, b: Vec<Complex64> },
    Stepper { potential: Vec<f64> },
}

/// Walks the time levels `ψ(t₀ + n·dt)`, always holding the previous,
/// current and next level so central differences are available at every
/// emitted time, including `n = 0`.
pub struct FieldEvolution {
    grid: Grid1D,
    dt: f64,
    t0: f64,
    step: usize,
    scheme: Scheme,
    prev: Vec<Complex64>,
    cur: Vec<Complex64>,
    next: Vec<Complex64>,
}

impl FieldEvolution {
    pub fn new(initial: &FieldState, config: &EvolutionConfig, potential: Option<&[f64]>) -> Result<Self> {
        let grid = initial.grid().clone();
        config.validate(&grid)?;
        let potential = match potential {
            Some(u) if u.len() != grid.n() => {
                return Err(Error::input(format!(
                    "potential has {} values, grid has {}",
                    u.len(),
                    grid.n()
                )))
            }
            Some(u) if u.iter().any(|v| !v.is_finite()) => return Err(Error::input("potential has non-finite values")),
            Some(u) if u.iter().any(|v| *v != 0.0) => Some(u.to_vec()),
            _ => None,
        };
        let dt = config.dt;
        let (scheme, prev, next) = match config.method {
            Method::ExactMode => {
                if potential.is_some() {
                    return Err(Error::Unsupported(
                        "exact_mode evolution requires U = 0; use the stepper".into(),
                    ));
                }
                let (a, b) = branch_coefficients(initial);
                let prev = grid.inverse(&exact_modes(&grid, &a, &b, -dt).0)?;
                let next = grid.inverse(&exact_modes(&grid, &a, &b, dt).0)?;
                (Scheme::Exact { a, b }, prev, next)
            }
            Method::Stepper => {
                let u = potential.unwrap_or_else(|| vec![0.0; grid.n()]);
                let prev = taylor_start(&grid, &initial.psi.values, &initial.dpsi_dt.values, &u, -dt)?;
                let scheme = Scheme::Stepper { potential: u };
                let next = stepper_update(&grid, &scheme, dt, &prev, &initial.psi.values)?;
                (scheme, prev, next)
            }
        };
        Ok(FieldEvolution {
            grid,
            dt,
            t0: initial.t,
            step: 0,
            scheme,
            prev,
            cur: initial.psi.values.clone(),
            next,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.t0 + self.step as f64 * self.dt
    }

    /// `(ψ(t − dt), ψ(t), ψ(t + dt))` around the current level.
    pub fn levels(&self) -> (&[Complex64], &[Complex64], &[Complex64]) {
        (&self.prev, &self.cur, &self.next)
    }

    pub fn advance(&mut self) -> Result<()> {
        self.step += 1;
        let next = match &self.scheme {
            Scheme::Exact { a, b } => {
                let t = (self.step + 1) as f64 * self.dt;
                self.grid.inverse(&exact_modes(&self.grid, a, b, t).0)?
            }
            Scheme::Stepper { .. } => stepper_update(&self.grid, &self.scheme, self.dt, &self.cur, &self.next)?,
        };
        self.prev = std::mem::replace(&mut self.cur, std::mem::replace(&mut self.next, next));
        if self.next.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::numerical(format!(
                "field became non-finite at t = {}",
                self.time() + self.dt
            )));
        }
        Ok(())
    }

    /// Current level with its time derivative (exact for the mode
    /// propagator, central difference for the stepper).
    pub fn state(&self) -> FieldState {
        let t = self.time();
        let dpsi = match &self.scheme {
            Scheme::Exact { a, b } => {
                let local = self.step as f64 * self.dt;
                self.grid
                    .inverse(&exact_modes(&self.grid, a, b, local).1)
                    .expect("grid-consistent")
            }
            Scheme::Stepper { .. } => self
                .next
                .iter()
                .zip(&self.prev)
                .map(|(n, p)| (n - p) / (2.0 * self.dt))
                .collect(),
        };
        FieldState {
            psi: ComplexField {
                grid: self.grid.clone(),
                values: self.cur.clone(),
            },
            dpsi_dt: ComplexField {
                grid: self.grid.clone(),
                values: dpsi,
            },
            t,
        }
    }
}

/// `∂ₜ²ψ = ∇²ψ + 2i∂ₜψ − 2Uψ` evaluated pointwise.
fn second_derivative(grid: &Grid1D, psi: &[Complex64], dpsi: &[Complex64], u: &[f64]) -> Result<Vec<Complex64>> {
    let lap = grid.derivative(psi, 2)?;
    Ok((0..psi.len())
        .map(|i| lap[i] + 2.0 * I * dpsi[i] - 2.0 * u[i] * psi[i])
        .collect())
}

/// Fourth-order Taylor value `ψ(h)` from `(ψ, ∂ₜψ)`, using the equation of
/// motion for the higher derivatives.
fn taylor_start(grid: &Grid1D, psi: &[Complex64], dpsi: &[Complex64], u: &[f64], h: f64) -> Result<Vec<Complex64>> {
    let d2 = second_derivative(grid, psi, dpsi, u)?;
    let d3 = second_derivative(grid, dpsi, &d2, u)?;
    let d4 = second_derivative(grid, &d2, &d3, u)?;
    Ok((0..psi.len())
        .map(|i| psi[i] + h * dpsi[i] + h * h / 2.0 * d2[i] + h.powi(3) / 6.0 * d3[i] + h.powi(4) / 24.0 * d4[i])
        .collect())
}

/// One central-difference step. The first-order term is averaged over the
/// newest and oldest levels, so the newest level follows from a pointwise
/// scalar division.
fn stepper_update(
    grid: &Grid1D,
    scheme: &Scheme,
    dt: f64,
    prev: &[Complex64],
    cur: &[Complex64],
) -> Result<Vec<Complex64>> {
    let Scheme::Stepper { potential } = scheme else {
        unreachable!("stepper update on an exact scheme")
    };
    let lap = grid.derivative(cur, 2)?;
    let inv_dt2 = 1.0 / (dt * dt);
    let lhs = Complex64::new(inv_dt2, -1.0 / dt);
    Ok((0..cur.len())
        .map(|i| {
            let rhs = (2.0 * cur[i] - prev[i]) * inv_dt2 + lap[i] - 2.0 * potential[i] * cur[i] - I * prev[i] / dt;
            rhs / lhs
        })
        .collect())
}

/// Snapshots every `snapshot_stride` steps from `t₀` to `t₀ + steps·dt`.
pub fn evolve_field(
    state: &FieldState,
    config: &EvolutionConfig,
    potential: Option<&[f64]>,
) -> Result<Vec<FieldState>> {
    let mut evo = FieldEvolution::new(state, config, potential)?;
    let mut out = Vec::with_capacity(config.steps / config.snapshot_stride + 1);
    loop {
        if evo.step() % config.snapshot_stride == 0 {
            out.push(evo.state());
        }
        if evo.step() == config.steps {
            break;
        }
        evo.advance()?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plane_wave(grid: &Grid1D, k: f64) -> ComplexField {
        ComplexField::from_fn(grid, |x| Complex64::from_polar(1.0, k * x))
    }

    #[test]
    fn mode_frequencies() {
        assert_eq!(conservative_mode_frequencies(0.0), (0.0, -2.0));
        let (p, m) = conservative_mode_frequencies(1.0);
        assert!((p - 0.414_213_562_373_095_1).abs() < 1e-15);
        assert!((m + 2.414_213_562_373_095).abs() < 1e-15);
        let (p, _) = conservative_mode_frequencies(0.01);
        assert!((p / 5.0e-5 - 1.0).abs() < 1e-4);
        // both are roots of ω² + 2ω − k²
        for k in [0.0, 0.3, 2.0, 40.0] {
            let (p, m) = conservative_mode_frequencies(k);
            for w in [p, m] {
                assert!((w * w + 2.0 * w - k * k).abs() < 1e-12 * (1.0 + k * k));
            }
        }
    }

    #[test]
    fn projection() {
        let g = Grid1D::new(16, 2.0 * PI).unwrap();
        let constant = ComplexField::from_fn(&g, |_| c(0.7, -0.2));
        let s = particle_branch_project(&constant);
        assert!(s.dpsi_dt.values.iter().all(|v| v.norm() < 1e-15));

        let wave = plane_wave(&g, 1.0);
        let s = particle_branch_project(&wave);
        for (d, p) in s.dpsi_dt.values.iter().zip(&wave.values) {
            assert!((d - (-I * 0.414_213_562_373_095_1 * p)).norm() < 1e-14);
        }
        let twice = particle_branch_project(&s.psi);
        assert!(twice.dpsi_dt.max_abs_diff(&s.dpsi_dt) < 1e-15);
        assert!(gapped_coefficients(&s).iter().all(|b| b.norm() < 1e-14));
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = Grid1D::new(16, 10.0).unwrap();
        let s = particle_branch_project(&ComplexField::zeros(&g));
        for method in [Method::ExactMode, Method::Stepper] {
            let cfg = EvolutionConfig {
                dt: 0.05,
                steps: 20,
                method,
                snapshot_stride: 5,
            };
            let snaps = evolve_field(&s, &cfg, None).unwrap();
            assert_eq!(snaps.len(), 5);
            assert!(snaps.iter().all(|s| s.psi.norm_sqr() == 0.0));
        }
    }

    #[test]
    fn single_mode_phase_rotation() {
        let g = Grid1D::new(8, 2.0 * PI).unwrap();
        let s = particle_branch_project(&plane_wave(&g, 1.0));
        let cfg = EvolutionConfig {
            dt: 0.5,
            steps: 20,
            method: Method::ExactMode,
            snapshot_stride: 20,
        };
        let last = evolve_field(&s, &cfg, None).unwrap().pop().unwrap();
        assert_eq!(last.t, 10.0);
        let rot = Complex64::from_polar(1.0, -4.142_135_623_730_951);
        for (a, b) in last.psi.values.iter().zip(&s.psi.values) {
            assert!((a - rot * b).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_semigroup_and_gap_stays_empty() {
        let g = Grid1D::new(64, 40.0).unwrap();
        let psi = ComplexField::from_fn(&g, |x| Complex64::from_polar((-x * x / 8.0).exp(), 0.8 * x));
        let s = particle_branch_project(&psi);
        let once = propagate_exact(&s, 7.5);
        let twice = propagate_exact(&propagate_exact(&s, 3.0), 4.5);
        assert!(once.psi.max_abs_diff(&twice.psi) < 1e-10);
        assert!(once.dpsi_dt.max_abs_diff(&twice.dpsi_dt) < 1e-10);
        for t in [1.0, 25.0, 100.0] {
            assert!(gapped_coefficients(&propagate_exact(&s, t))
                .iter()
                .all(|b| b.norm() < 1e-12));
        }
    }

    #[test]
    fn stepper_converges_at_second_order() {
        let g = Grid1D::new(32, 4.0 * PI).unwrap();
        let psi = ComplexField::from_fn(&g, |x| {
            Complex64::from_polar(1.0, x) + 0.5 * Complex64::from_polar(1.0, -0.5 * x)
        });
        let s = particle_branch_project(&psi);
        let exact = propagate_exact(&s, 10.0);
        let errs: Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .map(|&dt| {
                let cfg = EvolutionConfig {
                    dt,
                    steps: (10.0 / dt).round() as usize,
                    method: Method::Stepper,
                    snapshot_stride: (10.0 / dt).round() as usize,
                };
                let last = evolve_field(&s, &cfg, None).unwrap().pop().unwrap();
                last.psi.max_abs_diff(&exact.psi)
            })
            .collect();
        assert!(errs[2] < 1e-4, "{errs:?}");
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..4.5).contains(&ratio), "{errs:?}");
        }
    }

    #[test]
    fn stepper_with_uniform_potential_matches_shifted_frequency() {
        // Uniform U: plane wave solves ω² + 2ω − k² − 2U = 0.
        let g = Grid1D::new(16, 2.0 * PI).unwrap();
        let u: f64 = 0.3;
        let w = -1.0 + (1.0 + 1.0 + 2.0 * u).sqrt();
        let psi = plane_wave(&g, 1.0);
        let dpsi = ComplexField {
            grid: g.clone(),
            values: psi.values.iter().map(|p| -I * w * p).collect(),
        };
        let s = FieldState::new(psi.clone(), dpsi, 0.0).unwrap();
        let cfg = EvolutionConfig {
            dt: 0.005,
            steps: 400,
            method: Method::Stepper,
            snapshot_stride: 400,
        };
        let last = evolve_field(&s, &cfg, Some(&[u; 16])).unwrap().pop().unwrap();
        let rot = Complex64::from_polar(1.0, -w * 2.0);
        for (a, b) in last.psi.values.iter().zip(&psi.values) {
            assert!((a - rot * b).norm() < 1e-5);
        }
    }

    #[test]
    fn config_validation() {
        let g = Grid1D::new(16, 1.6).unwrap(); // dx = 0.1
        let s = particle_branch_project(&ComplexField::zeros(&g));
        let mut cfg = EvolutionConfig {
            dt: 0.06,
            steps: 10,
            method: Method::Stepper,
            snapshot_stride: 1,
        };
        assert!(matches!(evolve_field(&s, &cfg, None), Err(Error::Input(_))));
        cfg.method = Method::ExactMode;
        assert!(evolve_field(&s, &cfg, None).is_ok());
        assert!(matches!(
            evolve_field(&s, &cfg, Some(&[0.1; 16])),
            Err(Error::Unsupported(_))
        ));
        cfg.steps = 0;
        assert!(evolve_field(&s, &cfg, None).is_err());
        let big = Grid1D::new(16, 100.0).unwrap();
        let cfg = EvolutionConfig {
            dt: 0.2,
            steps: 1,
            method: Method::Stepper,
            snapshot_stride: 1,
        };
        assert!(cfg.validate(&big).is_err());
        assert_eq!("exact_mode".parse::<Method>().unwrap(), Method::ExactMode);
        assert!("rk4".parse::<Method>().is_err());
    }
}
