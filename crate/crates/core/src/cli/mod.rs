//! Command-line front end.
//!
//! Every subcommand reads one parameter source (`--preset` or `--config`)
//! and writes a single table as CSV or JSON. Dimensionless options such
//! as `--g` or `--kappa-eff` are in units of ω_b, and so are the emitted
//! rates and detunings. Output is independent of `--jobs`.

mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fockdyn::Truncation;
use crate::model::DecayConvention;
use crate::params::SystemParams;
use crate::presets::Preset;
pub use table::{format_sig, ResultTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_IO: i32 = 1;

/// Environment variable consulted when `--jobs` is absent.
pub const JOBS_ENV: &str = "MAGNOMECH_JOBS";

#[derive(Parser, Debug)]
#[command(name = "magnomech", version, about = "Ground-state cooling of a magnomechanical resonator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Named parameter set: physical or fig3.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// JSON parameter file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (falls back to MAGNOMECH_JOBS, then all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Mapping of decay constants onto Lindblad rates: master-equation or langevin.
    #[arg(long, default_value = "master-equation")]
    pub convention: DecayConvention,
}

#[derive(Args, Debug, Clone)]
pub struct Coupling {
    /// Coupling |G| in units of ω_b; derived from the drive when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Override of the eliminated magnon decay κ_eff, in units of ω_b.
    #[arg(long)]
    pub kappa_eff: Option<f64>,
    /// Override of the bath occupation.
    #[arg(long)]
    pub n_th: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SteadyMethod {
    /// Closed-form strong-coupling expression.
    Analytic,
    /// Covariance steady state of the effective model.
    Lyapunov,
    /// Weak-coupling noise-spectrum result.
    Spectrum,
    /// Covariance steady state of the three-mode model.
    Full3mode,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvolveMethod {
    Covariance,
    Fock,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Magnon–phonon model after eliminating the cavity.
    Effective,
    /// Linearized cavity–magnon–phonon model.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Initial {
    /// Vacuum magnon and cavity, phonon at the bath occupation.
    Thermal,
    Vacuum,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Steady amplitudes, enhanced coupling and effective parameters.
    Derive {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        coupling: Coupling,
    },
    /// Damping and final phonon number versus effective detuning.
    SweepDetuning {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        coupling: Coupling,
        /// First Δ_eff / ω_b.
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        from: f64,
        /// Last Δ_eff / ω_b.
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 601)]
        points: usize,
    },
    /// Final phonon number versus bias field at fixed drive frequency.
    SweepField {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        coupling: Coupling,
        /// First field in tesla; defaults to the red-sideband field − 3ω_b/γ_g.
        #[arg(long)]
        from: Option<f64>,
        /// Last field in tesla; defaults to the red-sideband field + 3ω_b/γ_g.
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 601)]
        points: usize,
    },
    /// Phonon occupation versus time.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        coupling: Coupling,
        #[arg(long, value_enum, default_value_t = EvolveMethod::Covariance)]
        method: EvolveMethod,
        #[arg(long, value_enum, default_value_t = ModelKind::Effective)]
        model: ModelKind,
        #[arg(long, value_enum, default_value_t = Initial::Thermal)]
        initial: Initial,
        /// Fock truncations, e.g. a=5,m=6,b=8.
        #[arg(long, default_value = "a=5,m=6,b=8")]
        dims: Truncation,
        /// End time in units of 1/ω_b.
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Steady-state phonon number.
    Steady {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        coupling: Coupling,
        #[arg(long, value_enum, default_value_t = SteadyMethod::All)]
        method: SteadyMethod,
    },
    /// Fidelity between the three-mode and the effective two-mode dynamics.
    Fidelity {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        coupling: Coupling,
        #[arg(long, default_value = "a=5,m=6,b=8")]
        dims: Truncation,
        /// End time in units of 1/ω_b.
        #[arg(long, default_value_t = 30.0)]
        t_end: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
    },
    /// Regime checks of the linearized model.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        coupling: Coupling,
        /// Magnon Kerr coefficient 𝒦/2π in Hz.
        #[arg(long, default_value_t = 1e-10)]
        kerr_hz: f64,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Derive { common, .. }
            | Command::SweepDetuning { common, .. }
            | Command::SweepField { common, .. }
            | Command::Evolve { common, .. }
            | Command::Steady { common, .. }
            | Command::Fidelity { common, .. }
            | Command::Validate { common, .. } => common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Derive { .. } => "derive",
            Command::SweepDetuning { .. } => "sweep-detuning",
            Command::SweepField { .. } => "sweep-field",
            Command::Evolve { .. } => "evolve",
            Command::Steady { .. } => "steady",
            Command::Fidelity { .. } => "fidelity",
            Command::Validate { .. } => "validate",
        }
    }
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::DimensionCap { .. } | Error::Json(_) => EXIT_USAGE,
        Error::Singular(_)
        | Error::Unstable(_)
        | Error::Integration { .. }
        | Error::TruncationLeak { .. } => EXIT_UNSTABLE,
        Error::Io(_) => EXIT_IO,
    }
}

impl Common {
    pub fn params(&self) -> Result<SystemParams> {
        match (&self.preset, &self.config) {
            (Some(p), None) => Ok(p.system()),
            (None, Some(path)) => config::load(path),
            (Some(_), Some(_)) => Err(Error::Config("give either --preset or --config, not both".into())),
            (None, None) => {
                Err(Error::Config("a parameter source is required (--preset or --config)".into()))
            }
        }
    }

    pub fn jobs(&self) -> Result<usize> {
        let n = match self.jobs {
            Some(n) => n,
            None => match std::env::var(JOBS_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("{JOBS_ENV} = '{v}' is not a thread count")))?,
                Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        if n == 0 {
            return Err(Error::Config("job count must be at least 1".into()));
        }
        Ok(n)
    }
}

fn emit(common: &Common, table: &ResultTable) -> Result<()> {
    let mut buf = Vec::new();
    match common.format {
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => table.write_json(&mut buf)?,
    }
    match &common.out {
        Some(path) => std::fs::write(path, buf)?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs one parsed command inside a thread pool of the requested size.
pub fn execute(command: &Command) -> Result<()> {
    let common = command.common();
    let jobs = common.jobs()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let table = pool.install(|| commands::build_table(command))?;
    emit(common, &table)
}

/// Runs a command and returns its table without writing it.
pub fn table_for(command: &Command) -> Result<ResultTable> {
    commands::build_table(command)
}
