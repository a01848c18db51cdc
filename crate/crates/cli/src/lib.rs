//! Command-line front end: QES points, spectra, Bethe roots, potential tables
//! and the verification suites, written as CSV or JSON.

pub mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use aqrm_core::potentials::{Form, PotentialKind};
use aqrm_core::{Branch, Error};
use clap::{Args, Parser, Subcommand};

/// Exit status for a failed verification or computation.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for bad flags, configuration or out-of-range requests.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::DegreeTooHigh { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format `{s}` (csv or json)")),
        }
    }
}

/// `+`, `-` or both branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSelection {
    One(Branch),
    Both,
}

impl BranchSelection {
    pub fn branches(self) -> Vec<Branch> {
        match self {
            BranchSelection::One(b) => vec![b],
            BranchSelection::Both => Branch::BOTH.to_vec(),
        }
    }
}

impl FromStr for BranchSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "both" {
            return Ok(BranchSelection::Both);
        }
        s.parse::<Branch>()
            .map(BranchSelection::One)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "aqrm",
    version,
    about = "Exceptional and regular spectra of the asymmetric quantum Rabi model"
)]
pub struct Cli {
    /// File of `key=value` defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Qubit splitting Δ (default 1.2).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Bias ε (default 0.3).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Mode frequency ω (default 1).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// `csv` or `json`.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    /// Output file, written atomically; standard output when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Couplings where level n is exceptional: n, branch, g, E, E+g², residual.
    QesPoints(QesPointsArgs),
    /// Rescaled levels E + g²/ω against the coupling.
    Spectrum(SpectrumArgs),
    /// Spectral parameter 𝓔 of each level for each branch potential.
    PtEnergies(PtEnergiesArgs),
    /// Bethe roots, Gaudin parameters and residuals at one QES point.
    Bethe(BetheArgs),
    /// Potential table V(x), optionally with Ψ(x).
    Potential(PotentialArgs),
    /// Runs every consistency suite and writes a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct QesPointsArgs {
    #[arg(long)]
    pub n_max: Option<usize>,
    /// `+`, `-` or `both`.
    #[arg(long, default_value = "both")]
    pub branch: BranchSelection,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub g_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g_max: Option<f64>,
    /// Number of coupling values (rows).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// Fock-space cutoff.
    #[arg(long)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PtEnergiesArgs {
    #[command(flatten)]
    pub grid: SpectrumArgs,
    #[arg(long, default_value = "both")]
    pub branch: BranchSelection,
    /// Emit the exceptional markers instead of the curves.
    #[arg(long)]
    pub markers: bool,
    /// Largest n for the markers.
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BetheArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "+")]
    pub branch: Branch,
    /// Which QES point of level n, counted from the smallest coupling.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    /// `gaudin`, `qes` or `full`.
    #[arg(long, default_value = "qes")]
    pub kind: PotentialKind,
    #[arg(long, default_value = "+")]
    pub branch: Branch,
    /// Level of the QES or Gaudin potential.
    #[arg(long)]
    pub n: Option<usize>,
    /// Regular energy E of the full potential.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Coupling; by default the QES point selected by `--n` and `--index`.
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// `partial_fraction` or `hyperbolic`.
    #[arg(long)]
    pub form: Option<Form>,
    /// Add a Ψ(x) column (QES and Gaudin kinds).
    #[arg(long)]
    pub psi: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Forces the tolerance of checks with this name prefix to zero.
    #[arg(long)]
    pub fault: Vec<String>,
    #[arg(long)]
    pub qp_draws: Option<usize>,
}

/// Writes `text` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail =
        |e: std::io::Error| CliError::Failure(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.flush().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Parses `args`, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
