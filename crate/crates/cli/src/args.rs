use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "isac", version, about = "Capacity-distortion, rate-distortion and coding simulations for ISAC channels")]
pub struct Cli {
    /// Worker threads for sweeps and simulations (defaults to all cores).
    #[arg(long, global = true, env = "ISAC_THREADS")]
    pub threads: Option<usize>,

    /// TOML file with a table per subcommand; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve C(D_s, B) at one operating point.
    Capacity(CapacityArgs),
    /// Sweep C(D_s, B) over a D_s grid and write CSV.
    Sweep(SweepArgs),
    /// Solve or sweep the rate-distortion function of a source.
    Rd(RdArgs),
    /// Closed-form curves and intersection for the binary example.
    Binary(BinaryArgs),
    /// Monte Carlo simulation of the random-coding or symbolwise scheme.
    Simulate(SimulateArgs),
    /// Parse and validate a spec file.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Capacity(_) => "capacity",
            Command::Sweep(_) => "sweep",
            Command::Rd(_) => "rd",
            Command::Binary(_) => "binary",
            Command::Simulate(_) => "simulate",
            Command::Validate(_) => "validate",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CapacityArgs {
    /// Channel spec file (JSON).
    #[arg(long, value_name = "FILE")]
    pub channel: Option<PathBuf>,
    /// Sensing distortion budget D_s (default: unconstrained).
    #[arg(long, allow_negative_numbers = true)]
    pub ds: Option<f64>,
    /// Input cost budget B (default: unconstrained).
    #[arg(long, allow_negative_numbers = true)]
    pub cost: Option<f64>,
    /// Print the full result as JSON.
    #[arg(long)]
    #[serde(default)]
    pub json: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    pub channel: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub cost: Option<f64>,
    /// Number of grid points (default 21).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Lower end of the grid (default: D_s_min(B)).
    #[arg(long, allow_negative_numbers = true)]
    pub ds_min: Option<f64>,
    /// Upper end of the grid (default: D_s_max(B)).
    #[arg(long, allow_negative_numbers = true)]
    pub ds_max: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RdArgs {
    /// Spec file with a `source` section.
    #[arg(long, value_name = "FILE")]
    pub source: Option<PathBuf>,
    /// Bernoulli source P(U=0) with Hamming distortion, instead of a file.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Single distortion budget; without it a sweep is written.
    #[arg(long, allow_negative_numbers = true)]
    pub du: Option<f64>,
    /// Number of sweep points (default 21).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub json: bool,
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingRule {
    /// D_u on the corner boundary where the correction terms vanish.
    #[default]
    Boundary,
    /// Fixed D_u given by --du.
    Fixed,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BinaryArgs {
    /// Source parameter P(U=0), in (0, 1/2].
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// State parameter P(S=1), in (0, 1/2].
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Number of points over [0, q/2] (default 101).
    #[arg(long)]
    pub grid: Option<usize>,
    /// How D_u follows the distortion axis.
    #[arg(long, value_enum)]
    pub coupling: Option<CouplingRule>,
    /// D_u for the fixed coupling.
    #[arg(long, allow_negative_numbers = true)]
    pub du: Option<f64>,
    /// Bisection tolerance for the intersection (default 1e-15).
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    RandomCoding,
    Symbolwise,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Channel spec file; may also carry `source`, `encoder` and `input_distribution`.
    #[arg(long, value_name = "FILE")]
    pub channel: Option<PathBuf>,
    /// Binary example channel with P(S=1) = q, instead of a file.
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Spec file with a `source` section (symbolwise mode).
    #[arg(long, value_name = "FILE")]
    pub source: Option<PathBuf>,
    /// Bernoulli source P(U=0) with Hamming distortion (symbolwise mode).
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Binary encoder P(X=0|U=0) (symbolwise mode, default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Binary encoder P(X=0|U=1) (symbolwise mode, default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Codebook input distribution, comma separated (default: file, else uniform).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub input: Option<Vec<f64>>,
    /// Code rate in bits per channel use (random-coding mode).
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    /// Blocklength (default 30 for random coding, 100000 for symbolwise).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of blocks (default 1000 for random coding, 1 for symbolwise).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Typicality slack (default 0.5).
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Write the per-trial CSV trace here.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ValidateArgs {
    /// Spec file to check; every section present is validated.
    #[arg(value_name = "FILE")]
    pub file: Option<PathBuf>,
}
