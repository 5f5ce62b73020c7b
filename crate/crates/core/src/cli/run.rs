use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use num_complex::Complex64;

use super::output::{write_atomic, Cell, Format, Table};
use super::{DensityRun, FieldRun, Init, RunConfig, Task};
use crate::dispersion::{asymptotic_omega, track_branches, Regime};
use crate::error::{Error, Result};
use crate::evolve::{evolve_density, particle_branch_project, DensityModeState, FieldEvolution, FieldState};
use crate::grid::{ComplexField, Grid1D};
use crate::madelung::{decompose, quantum_potential, residuals, MadelungFields};
use crate::spectrum::{nonrel_eigen, nonrel_eigen_richardson, relativistic_map, PotentialSpec};
use crate::units::ModelParams;

type Outputs = Vec<(String, Table)>;

/// Run a validated config and write its files. Nothing is written unless
/// the whole computation succeeds.
pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    info!("seed = {}", cfg.seed);
    let outputs = match &cfg.task {
        Task::Dispersion { params, k_grid } => vec![("roots".into(), run_dispersion(params, k_grid)?)],
        Task::Field(run) => run_evolve(run)?,
        Task::Density(run) => vec![("modes".into(), run_density(run)?)],
        Task::Madelung {
            inputs,
            params,
            potential,
        } => vec![("madelung".into(), run_madelung(inputs, params, potential)?)],
        Task::Spectrum {
            potential,
            grid,
            count,
            richardson,
        } => vec![("spectrum".into(), run_spectrum(potential, grid, *count, *richardson)?)],
    };
    write_all(&cfg.out, cfg.format, &outputs)
}

fn write_all(dir: &Path, format: Format, outputs: &Outputs) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::input(format!("cannot create {}: {e}", dir.display())))?;
    outputs
        .iter()
        .map(|(stem, table)| {
            let path = dir.join(format!("{stem}.{}", format.extension()));
            write_atomic(&path, &table.render(format))?;
            info!("wrote {}", path.display());
            Ok(path)
        })
        .collect()
}

fn re_im(w: Option<Complex64>) -> [Cell; 2] {
    match w {
        Some(w) => [Cell::Num(w.re), Cell::Num(w.im)],
        None => [Cell::Empty, Cell::Empty],
    }
}

pub fn run_dispersion(params: &ModelParams, k_grid: &[f64]) -> Result<Table> {
    let curve = track_branches(params, k_grid)?;
    let mut header = vec!["model".to_string(), "k".to_string()];
    for i in 1..=4 {
        header.push(format!("re_w{i}"));
        header.push(format!("im_w{i}"));
    }
    header.extend((1..=4).map(|i| format!("res{i}")));
    header.extend((1..=4).map(|i| format!("branch{i}")));
    header.extend(["asym_low_re".to_string(), "asym_low_im".to_string()]);

    let mut table = Table::new(header);
    for (j, &k) in k_grid.iter().enumerate() {
        let mut row = vec![Cell::Text(params.kind().name().into()), Cell::Num(k)];
        for b in 0..4 {
            row.extend(re_im(curve.branches.get(b).map(|br| br[j])));
        }
        for b in 0..4 {
            row.push(curve.residuals.get(b).map(|r| r[j]).into());
        }
        for b in 0..4 {
            row.push(curve.labels.get(b).map_or(Cell::Empty, |l| Cell::Text(l.name().into())));
        }
        // Asymptotes the model does not have are left blank.
        row.extend(re_im(
            asymptotic_omega(params, k, Regime::Low).ok().map(|a| a.principal),
        ));
        table.push(row);
    }
    Ok(table)
}

fn initial_field(run: &FieldRun) -> FieldState {
    let g = &run.grid;
    match run.init {
        Init::Zero => FieldState {
            psi: ComplexField::zeros(g),
            dpsi_dt: ComplexField::zeros(g),
            t: 0.0,
        },
        Init::Plane => {
            let m = (run.k0 * g.length() / (2.0 * std::f64::consts::PI)).round();
            let k = 2.0 * std::f64::consts::PI * m / g.length();
            if k != run.k0 {
                warn!("k0 = {} snapped to the grid wavenumber {k}", run.k0);
            }
            particle_branch_project(&ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, k * x)))
        }
        _ => {
            let s2 = run.sigma * run.sigma;
            let norm = (2.0 * std::f64::consts::PI * s2).powf(-0.25);
            particle_branch_project(&ComplexField::from_fn(g, |x| {
                norm * Complex64::new(-x * x / (4.0 * s2), run.k0 * x).exp()
            }))
        }
    }
}

fn is_zero(values: &[Complex64]) -> bool {
    values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
}

/// Snapshot file stem for time `t`, rounded to 12 significant digits so
/// `197 × 0.05` is named `snap_9.85` rather than `snap_9.850000000000001`.
pub fn snapshot_stem(t: f64) -> String {
    let rounded: f64 = format!("{t:.11e}").parse().expect("formatted f64 parses");
    format!("snap_{}", rounded + 0.0)
}

fn snapshot_header() -> Vec<String> {
    ["x", "re_psi", "im_psi", "rho", "S", "Q"].map(String::from).to_vec()
}

fn traj_header() -> Vec<String> {
    ["t", "N", "N_mod", "E", "continuity_residual", "hj_residual"]
        .map(String::from)
        .to_vec()
}

pub fn run_evolve(run: &FieldRun) -> Result<Vec<(String, Table)>> {
    let grid = &run.grid;
    let dt = run.evolution.dt;
    let u = run.potential.sample(grid)?;
    let u_arg = (run.potential != PotentialSpec::Free).then_some(u.as_slice());
    let mut evo = FieldEvolution::new(&initial_field(run), &run.evolution, u_arg)?;

    let mut traj = Table::new(traj_header());
    let mut outputs = Vec::new();
    let mut prior: Option<Vec<f64>> = None;
    loop {
        if evo.step() % run.evolution.snapshot_stride == 0 {
            let t = evo.time();
            let (a, b, c) = evo.levels();
            let mut snap = Table::new(snapshot_header());
            if is_zero(a) && is_zero(b) && is_zero(c) {
                for (i, v) in b.iter().enumerate() {
                    snap.push(vec![
                        grid.x(i).into(),
                        v.re.into(),
                        v.im.into(),
                        0.0.into(),
                        0.0.into(),
                        Cell::Empty,
                    ]);
                }
                traj.push(vec![
                    t.into(),
                    0.0.into(),
                    0.0.into(),
                    0.0.into(),
                    Cell::Empty,
                    Cell::Empty,
                ]);
            } else {
                let hist = history(grid, [a, b, c], t, dt, prior.as_deref())?;
                let rho = [&hist[0].rho[..], &hist[1].rho[..], &hist[2].rho[..]];
                let q = quantum_potential(grid, &rho, dt)?;
                let d = residuals(&hist, &ModelParams::Conservative, u_arg)?;
                for (i, v) in b.iter().enumerate() {
                    let qi = if q.valid[i] {
                        Cell::Num(q.values[i])
                    } else {
                        Cell::Empty
                    };
                    snap.push(vec![
                        grid.x(i).into(),
                        v.re.into(),
                        v.im.into(),
                        hist[1].rho[i].into(),
                        hist[1].s[i].into(),
                        qi,
                    ]);
                }
                traj.push(vec![
                    t.into(),
                    d.n.into(),
                    d.n_mod.into(),
                    d.e.into(),
                    d.continuity_residual.into(),
                    d.hj_residual.into(),
                ]);
                prior = Some(hist[1].s.clone());
            }
            outputs.push((snapshot_stem(t), snap));
        }
        if evo.step() == run.evolution.steps {
            break;
        }
        evo.advance()?;
    }
    outputs.insert(0, ("traj".into(), traj));
    Ok(outputs)
}

/// Madelung fields at `t − dt`, `t`, `t + dt`, phase-aligned in time.
fn history(
    grid: &Grid1D,
    levels: [&[Complex64]; 3],
    t: f64,
    dt: f64,
    prior: Option<&[f64]>,
) -> Result<Vec<MadelungFields>> {
    let mid = decompose(&field(grid, levels[1]), t, prior)?;
    let before = decompose(&field(grid, levels[0]), t - dt, Some(&mid.s))?;
    let after = decompose(&field(grid, levels[2]), t + dt, Some(&mid.s))?;
    Ok(vec![before, mid, after])
}

fn field(grid: &Grid1D, values: &[Complex64]) -> ComplexField {
    ComplexField {
        grid: grid.clone(),
        values: values.to_vec(),
    }
}

fn run_density(run: &DensityRun) -> Result<Table> {
    let one = Complex64::new(1.0, 0.0);
    let init = match run.init {
        Init::Hydrodynamic => {
            DensityModeState::hydrodynamic(&run.params, run.k_grid.clone(), &vec![one; run.k_grid.len()])?
        }
        _ => DensityModeState::new(
            run.k_grid.clone(),
            vec![
                [
                    one,
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0)
                ];
                run.k_grid.len()
            ],
            0.0,
        )?,
    };
    let mut growing = 0u64;
    for &k in &run.k_grid {
        let roots = crate::dispersion::solve_roots(&crate::dispersion::build_polynomial(&run.params, k)?)?;
        let g = roots.growing();
        if !g.is_empty() {
            warn!("k = {k}: {} root(s) with Im ω < 0 (growing): {g:?}", g.len());
        }
        growing += g.len() as u64;
    }

    let mut table = Table::new(["t", "k", "re_rho", "im_rho"].map(String::from).to_vec());
    for j in 0..=run.steps / run.snapshot_stride {
        let t = (j * run.snapshot_stride) as f64 * run.dt;
        let state = evolve_density(&run.params, &init, t)?;
        for (k, d) in state.k.iter().zip(&state.derivs) {
            if !(d[0].re.is_finite() && d[0].im.is_finite()) {
                return Err(Error::numerical(format!("density mode k = {k} overflowed at t = {t}")));
            }
            table.push(vec![t.into(), (*k).into(), d[0].re.into(), d[0].im.into()]);
        }
    }
    table.footer.push(("growing_roots".into(), Cell::Int(growing)));
    Ok(table)
}

struct Snapshot {
    t: f64,
    x: Vec<f64>,
    psi: Vec<Complex64>,
}

fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bad = |msg: String| Error::input(format!("{}: {msg}", path.display()));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let t = name
        .strip_prefix("snap_")
        .and_then(|s| s.strip_suffix(".csv"))
        .and_then(|s| s.parse::<f64>().ok())
        .ok_or_else(|| bad("expected a file named snap_<t>.csv".into()))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))
    };
    let (cx, cre, cim) = (col("x")?, col("re_psi")?, col("im_psi")?);
    let mut snap = Snapshot {
        t,
        x: Vec::new(),
        psi: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let num = |c: usize| -> Result<f64> {
            record
                .get(c)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| bad(format!("line {line}: bad number in column {}", c + 1)))
        };
        snap.x.push(num(cx)?);
        snap.psi.push(Complex64::new(num(cre)?, num(cim)?));
    }
    Ok(snap)
}

/// Rebuild the grid from the `x` column: `n` points from `−L/2` with spacing `L/n`.
fn snapshot_grid(snap: &Snapshot) -> Result<Grid1D> {
    let n = snap.x.len();
    if n < 2 {
        return Err(Error::input("snapshot has fewer than two points"));
    }
    let length = -2.0 * snap.x[0];
    let grid = Grid1D::new(n, length)?;
    let tol = 1e-9 * grid.dx();
    if snap.x.iter().enumerate().any(|(i, x)| (x - grid.x(i)).abs() > tol) {
        return Err(Error::input(
            "snapshot x column is not a periodic grid starting at -L/2",
        ));
    }
    Ok(grid)
}

pub fn run_madelung(inputs: &[PathBuf], params: &ModelParams, potential: &PotentialSpec) -> Result<Table> {
    let mut snaps = inputs.iter().map(|p| read_snapshot(p)).collect::<Result<Vec<_>>>()?;
    snaps.sort_by(|a, b| a.t.total_cmp(&b.t));
    let grid = snapshot_grid(&snaps[1])?;
    for s in &snaps {
        if snapshot_grid(s)? != grid {
            return Err(Error::input("snapshots are on different grids"));
        }
    }
    let mid = decompose(&field(&grid, &snaps[1].psi), snaps[1].t, None)?;
    let before = decompose(&field(&grid, &snaps[0].psi), snaps[0].t, Some(&mid.s))?;
    let after = decompose(&field(&grid, &snaps[2].psi), snaps[2].t, Some(&mid.s))?;
    let hist = vec![before, mid, after];

    let u = potential.sample(&grid)?;
    let u_arg = (*potential != PotentialSpec::Free).then_some(u.as_slice());
    let d = residuals(&hist, params, u_arg)?;
    let dt = hist[1].t - hist[0].t;
    let rho = [&hist[0].rho[..], &hist[1].rho[..], &hist[2].rho[..]];
    let q = quantum_potential(&grid, &rho, dt)?;
    let recon = hist[1]
        .reconstruct()
        .values
        .iter()
        .zip(&snaps[1].psi)
        .zip(&hist[1].valid)
        .filter(|(_, v)| **v)
        .map(|((a, b), _)| (a - b).norm())
        .fold(0.0, f64::max);

    let mut table = Table::new(["x", "rho", "S", "Q"].map(String::from).to_vec());
    for i in 0..grid.n() {
        let qi = if q.valid[i] {
            Cell::Num(q.values[i])
        } else {
            Cell::Empty
        };
        table.push(vec![grid.x(i).into(), hist[1].rho[i].into(), hist[1].s[i].into(), qi]);
    }
    table.footer = vec![
        ("t".into(), d.t.into()),
        ("N".into(), d.n.into()),
        ("N_mod".into(), d.n_mod.into()),
        ("E".into(), d.e.into()),
        ("continuity_residual".into(), d.continuity_residual.into()),
        ("hj_residual".into(), d.hj_residual.into()),
        ("excluded_fraction".into(), d.excluded_fraction.into()),
        ("reconstruction_error".into(), recon.into()),
    ];
    Ok(table)
}

pub fn run_spectrum(potential: &PotentialSpec, grid: &Grid1D, count: usize, richardson: bool) -> Result<Table> {
    let eps = if richardson {
        nonrel_eigen_richardson(potential, grid, count)?
    } else {
        nonrel_eigen(potential, grid, count)?
    };
    let map = relativistic_map(&eps)?;
    let mut table = Table::new(["n", "epsilon", "E", "E_series", "rel_gap"].map(String::from).to_vec());
    for i in 0..eps.len() {
        table.push(vec![
            Cell::Int(i as u64),
            map.epsilon[i].into(),
            map.energy[i].into(),
            map.energy_series[i].into(),
            map.rel_gap[i].into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_names_drop_float_noise() {
        assert_eq!(snapshot_stem(197.0 * 0.05), "snap_9.85");
        assert_eq!(snapshot_stem(0.0), "snap_0");
        assert_eq!(snapshot_stem(-0.0), "snap_0");
        assert_eq!(snapshot_stem(1e-3), "snap_0.001");
    }
}
