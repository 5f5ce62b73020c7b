//! Batch front end: flags and TOML config, validation, and the four
//! subcommands `dispersion`, `evolve`, `madelung` and `spectrum`.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 numerical failure.

mod output;
mod run;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dispersion::{linear_grid, log_grid};
use crate::error::{Error, Result};
use crate::evolve::{EvolutionConfig, Method};
use crate::grid::Grid1D;
use crate::spectrum::PotentialSpec;
use crate::units::{ModelKind, ModelParams};

pub use output::{fmt_num, write_atomic, Cell, Format, Table};
pub use run::{execute, run_dispersion, run_evolve, run_madelung, run_spectrum};

#[derive(Debug, Parser)]
#[command(
    name = "rqbm",
    version,
    about = "Relativistic quantum Bohm-Madelung workbench (Compton units)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep k and write the tracked dispersion roots to roots.csv.
    #[command(allow_negative_numbers = true)]
    Dispersion(Flags),
    /// Evolve the field (conservative) or linearized density modes (dissipative).
    #[command(allow_negative_numbers = true)]
    Evolve(Flags),
    /// Madelung diagnostics from three consecutive snapshot files.
    #[command(allow_negative_numbers = true)]
    Madelung(MadelungArgs),
    /// Nonrelativistic levels and their relativistic energies.
    #[command(allow_negative_numbers = true)]
    Spectrum(Flags),
}

#[derive(Debug, Args)]
pub struct MadelungArgs {
    /// Three snapshot files `snap_<t>.csv` at equally spaced times, in any order.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub flags: Flags,
}

/// Every option, as given on the command line or in the config file.
/// Keys in the file mirror the flag names.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    /// TOML file with defaults for any of the other options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// conservative | collisional | radiative | phase-diffusion | dalembert-diffusion
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub diffusion: Option<f64>,

    #[arg(long)]
    pub k_min: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub k_steps: Option<usize>,
    /// log | linear
    #[arg(long)]
    pub k_scale: Option<String>,

    /// Grid points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Periodic box length.
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// exact_mode | stepper
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
    /// Field runs: packet | plane | zero. Density runs: hydrodynamic | unit.
    #[arg(long)]
    pub init: Option<String>,
    /// Packet or plane-wave wavenumber.
    #[arg(long)]
    pub k0: Option<f64>,
    /// Packet width.
    #[arg(long)]
    pub sigma: Option<f64>,

    /// free | harmonic | box | file
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Box width.
    #[arg(long)]
    pub width: Option<f64>,
    /// One potential value per line (or `x,U` rows), for `--potential file`.
    #[arg(long)]
    pub potential_file: Option<PathBuf>,
    /// Number of spectrum levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Apply one Richardson refinement to the spectrum (default true).
    #[arg(long)]
    pub richardson: Option<bool>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// Recorded with the run; no subcommand currently draws random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Flags {
    /// Overlay these flags on the config file they name, if any.
    pub fn resolve(&self) -> Result<Flags> {
        let Some(path) = &self.config else {
            return Ok(self.clone());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read config {}: {e}", path.display())))?;
        let file: Flags = toml::from_str(&text).map_err(|e| Error::input(format!("config {}: {e}", path.display())))?;
        let mut merged = to_map(&file);
        for (key, value) in to_map(self) {
            if value.is_null() {
                continue;
            }
            if let Some(old) = merged.get(&key).filter(|v| !v.is_null()) {
                if *old != value {
                    info!("{key} = {value} (flag overrides config value {old})");
                }
            }
            merged.insert(key, value);
        }
        let mut out: Flags = serde_json::from_value(Value::Object(merged)).expect("flag map round-trips");
        out.config = self.config.clone();
        Ok(out)
    }
}

fn to_map(flags: &Flags) -> serde_json::Map<String, Value> {
    match serde_json::to_value(flags).expect("flags serialize") {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

fn or_default<T: std::fmt::Debug>(name: &str, value: Option<T>, default: T) -> T {
    value.unwrap_or_else(|| {
        info!("{name} = {default:?} (default)");
        default
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Packet,
    Plane,
    Zero,
    Hydrodynamic,
    Unit,
}

impl std::str::FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "packet" => Ok(Init::Packet),
            "plane" => Ok(Init::Plane),
            "zero" => Ok(Init::Zero),
            "hydrodynamic" => Ok(Init::Hydrodynamic),
            "unit" => Ok(Init::Unit),
            _ => Err(Error::input(format!("unknown init `{s}`"))),
        }
    }
}

/// Field evolution of the conservative model.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRun {
    pub grid: Grid1D,
    pub evolution: EvolutionConfig,
    pub init: Init,
    pub k0: f64,
    pub sigma: f64,
    pub potential: PotentialSpec,
}

/// Linearized density modes of a dissipative model.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRun {
    pub params: ModelParams,
    pub k_grid: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub snapshot_stride: usize,
    pub init: Init,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Dispersion {
        params: ModelParams,
        k_grid: Vec<f64>,
    },
    Field(FieldRun),
    Density(DensityRun),
    Madelung {
        inputs: Vec<PathBuf>,
        params: ModelParams,
        potential: PotentialSpec,
    },
    Spectrum {
        potential: PotentialSpec,
        grid: Grid1D,
        count: usize,
        richardson: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub out: PathBuf,
    pub format: Format,
    pub seed: u64,
}

fn model(f: &Flags) -> Result<ModelParams> {
    let kind: ModelKind = or_default("model", f.model.clone(), "conservative".into()).parse()?;
    ModelParams::from_parts(kind, f.gamma, f.tau, f.diffusion)
}

fn k_grid(f: &Flags) -> Result<Vec<f64>> {
    let k_min = or_default("k-min", f.k_min, 0.01);
    let k_max = or_default("k-max", f.k_max, 10.0);
    let steps = or_default("k-steps", f.k_steps, 200);
    match or_default("k-scale", f.k_scale.clone(), "log".into())
        .to_ascii_lowercase()
        .as_str()
    {
        "log" => log_grid(k_min, k_max, steps),
        "linear" => linear_grid(k_min, k_max, steps),
        other => Err(Error::input(format!(
            "unknown k-scale `{other}` (expected log or linear)"
        ))),
    }
}

fn grid(f: &Flags, n: usize, length: f64) -> Result<Grid1D> {
    Grid1D::new(or_default("n", f.n, n), or_default("length", f.length, length))
}

fn potential(f: &Flags, grid_n: Option<usize>) -> Result<PotentialSpec> {
    let spec = match or_default("potential", f.potential.clone(), "free".into())
        .to_ascii_lowercase()
        .as_str()
    {
        "free" => PotentialSpec::Free,
        "harmonic" => PotentialSpec::Harmonic {
            omega0: f
                .omega0
                .ok_or_else(|| Error::input("the harmonic potential requires omega0"))?,
        },
        "box" => PotentialSpec::Box {
            width: f
                .width
                .ok_or_else(|| Error::input("the box potential requires width"))?,
        },
        "file" => {
            let path = f
                .potential_file
                .as_ref()
                .ok_or_else(|| Error::input("potential = file requires potential-file"))?;
            let values = read_potential_file(path)?;
            if let Some(n) = grid_n {
                if values.len() != n {
                    return Err(Error::input(format!(
                        "{} holds {} potential values, grid has {n}",
                        path.display(),
                        values.len()
                    )));
                }
            }
            PotentialSpec::Tabulated(values)
        }
        other => return Err(Error::input(format!("unknown potential `{other}`"))),
    };
    spec.validate()?;
    Ok(spec)
}

fn read_potential_file(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            let field = l.rsplit(',').next().unwrap_or(l).trim();
            field
                .parse::<f64>()
                .map_err(|_| Error::input(format!("{}:{}: not a number: `{field}`", path.display(), i + 1)))
        })
        .collect()
}

/// Validate the merged options for one subcommand.
pub fn load_config(command: &Command) -> Result<RunConfig> {
    let (flags, inputs) = match command {
        Command::Madelung(m) => (m.flags.resolve()?, Some(m.inputs.clone())),
        Command::Dispersion(f) | Command::Evolve(f) | Command::Spectrum(f) => (f.resolve()?, None),
    };
    let f = &flags;
    let task = match command {
        Command::Dispersion(_) => Task::Dispersion {
            params: model(f)?,
            k_grid: k_grid(f)?,
        },
        Command::Evolve(_) => {
            let params = model(f)?;
            let dt = or_default("dt", f.dt, 0.01);
            let steps = or_default("steps", f.steps, 1000);
            let snapshot_stride = or_default("snapshot-stride", f.snapshot_stride, 100);
            if params.is_dissipative() {
                let init: Init = or_default("init", f.init.clone(), "hydrodynamic".into()).parse()?;
                if !matches!(init, Init::Hydrodynamic | Init::Unit) {
                    return Err(Error::input("density runs take init = hydrodynamic or unit"));
                }
                if !(dt > 0.0 && dt.is_finite()) || steps == 0 || snapshot_stride == 0 {
                    return Err(Error::input("dt, steps and snapshot-stride must be positive"));
                }
                Task::Density(DensityRun {
                    params,
                    k_grid: k_grid(f)?,
                    dt,
                    steps,
                    snapshot_stride,
                    init,
                })
            } else {
                let grid = grid(f, 256, 100.0)?;
                let evolution = EvolutionConfig {
                    dt,
                    steps,
                    method: or_default("method", f.method.clone(), "exact_mode".into()).parse::<Method>()?,
                    snapshot_stride,
                };
                evolution.validate(&grid)?;
                let init: Init = or_default("init", f.init.clone(), "packet".into()).parse()?;
                if !matches!(init, Init::Packet | Init::Plane | Init::Zero) {
                    return Err(Error::input("field runs take init = packet, plane or zero"));
                }
                let sigma = or_default("sigma", f.sigma, grid.length() / 20.0);
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::input(format!("sigma must be positive, got {sigma}")));
                }
                let potential = potential(f, Some(grid.n()))?;
                if evolution.method == Method::ExactMode && potential != PotentialSpec::Free {
                    return Err(Error::Unsupported(
                        "exact_mode evolution requires U = 0; use the stepper".into(),
                    ));
                }
                Task::Field(FieldRun {
                    init,
                    k0: or_default("k0", f.k0, 0.1),
                    sigma,
                    potential,
                    grid,
                    evolution,
                })
            }
        }
        Command::Madelung(_) => {
            let inputs = inputs.expect("madelung carries inputs");
            if inputs.len() != 3 {
                return Err(Error::input(format!(
                    "madelung takes exactly three snapshots, got {}",
                    inputs.len()
                )));
            }
            Task::Madelung {
                inputs,
                params: model(f)?,
                potential: potential(f, None)?,
            }
        }
        Command::Spectrum(_) => {
            let grid = grid(f, 256, 100.0)?;
            let count = or_default("levels", f.levels, 10);
            if count == 0 {
                return Err(Error::input("levels must be positive"));
            }
            Task::Spectrum {
                potential: potential(f, Some(grid.n()))?,
                grid,
                count,
                richardson: or_default("richardson", f.richardson, true),
            }
        }
    };
    Ok(RunConfig {
        task,
        out: or_default("out", f.out.clone(), PathBuf::from(".")),
        format: or_default("format", f.format.clone(), "csv".into()).parse()?,
        seed: or_default("seed", f.seed, 0),
    })
}

/// Process exit code for a result.
pub fn exit_code(result: &Result<()>) -> u8 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_input() => 2,
        Err(_) => 3,
    }
}

/// Parse arguments, run, and report. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = load_config(&cli.command).and_then(|cfg| execute(&cfg).map(|_| ()));
    if let Err(e) = &result {
        eprintln!("rqbm: {e}");
    }
    exit_code(&result)
}
