use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod manifest;
mod run;
mod vectors;

/// Exact tiling and Ulam-set point generators with spatial statistics.
#[derive(Parser, Debug)]
#[command(name = "tilestat", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Substitution tilings and lattice calibration sets.
    #[command(subcommand)]
    Tiling(TilingCmd),
    /// Direction, gap, pair-correlation and uniformity statistics of a point set.
    Stats(StatsArgs),
    /// Two-dimensional Ulam sets.
    #[command(subcommand)]
    Ulam(UlamCmd),
    /// Stacked decomposition of the Ammann chair squared-distance set.
    PcDecompose(PcArgs),
}

#[derive(Subcommand, Debug)]
pub enum TilingCmd {
    /// Write the vertex set of a model after the given number of steps.
    Gen {
        #[arg(long, value_enum)]
        model: Model,
        /// Substitution steps (radius for integer-lattice).
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search the Hecke generator images of Ammann chair vertices.
    Hecke {
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        a_max: i64,
        #[arg(long, default_value_t = 12)]
        p_max: i32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    AmmannChair,
    AmmannChair2,
    Chair3,
    IntegerLattice,
    SquareGrid,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::AmmannChair => "ammann-chair",
            Model::AmmannChair2 => "ammann-chair2",
            Model::Chair3 => "chair3",
            Model::IntegerLattice => "integer-lattice",
            Model::SquareGrid => "square-grid",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stat {
    SlopeGaps,
    AngleGaps,
    PairCorrelation,
    PcSquared,
    Directions,
    Ks,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalize {
    /// Multiply gaps by the number of source points.
    Source,
    /// Multiply gaps by the number of distinct directions.
    Distinct,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Slope,
    Angle,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Point set JSON written by `tiling gen`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub stat: Stat,
    /// `edges:e0,e1,...`, `uniform:K:lo:hi` or `auto:K`.
    #[arg(long)]
    pub bins: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the histogram as CSV next to the JSON output.
    #[arg(long)]
    pub csv: bool,
    /// Collapse equal directions.
    #[arg(long)]
    pub dedupe: bool,
    #[arg(long, value_enum, default_value_t = Normalize::Source)]
    pub normalize: Normalize,
    /// Interval `a,b` for `ks` (default 0,pi/2 for angles).
    #[arg(long)]
    pub range: Option<String>,
    /// Direction kind for `directions` and `ks`.
    #[arg(long, value_enum, default_value_t = Kind::Angle)]
    pub kind: Kind,
    /// Distance multiplier for pair correlation.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Report densities instead of raw counts.
    #[arg(long)]
    pub pdf: bool,
}

#[derive(Subcommand, Debug)]
pub enum UlamCmd {
    /// Generate the set and write members with entry steps.
    Gen(UlamArgs),
    /// Entry-time range per line segment with quadratic fits.
    Timing(UlamArgs),
    /// Compare membership with the structure theorem.
    VerifyStructure(UlamArgs),
    /// Per-step addition bound, and the empirical maximum when steps > 0.
    Bounds(UlamArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum UlamModeArg {
    #[value(name = "userdef-2d")]
    Userdef2d,
    #[value(name = "random-2d")]
    Random2d,
}

#[derive(Args, Debug, Clone)]
pub struct UlamArgs {
    #[arg(long, value_enum, default_value_t = UlamModeArg::Userdef2d)]
    pub mode: UlamModeArg,
    /// First vector `x,y`; decimals are exact, `phi` is the golden ratio.
    #[arg(long)]
    pub v0: Option<String>,
    #[arg(long)]
    pub v1: Option<String>,
    /// Alone: v0 = (1, phi), v1 = (phi, 1). With --v0/--v1: read
    /// coordinates within 1e-5 of phi as phi.
    #[arg(long)]
    pub golden: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1500)]
    pub steps: usize,
    /// Probe radius for `bounds`.
    #[arg(long)]
    pub r: Option<f64>,
    /// Smallest segment index used by the timing fits.
    #[arg(long, default_value_t = 20)]
    pub fit_from: i64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PcArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Leave out the per-component float value lists.
    #[arg(long)]
    pub no_values: bool,
}

/// Errors that exit with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("TILESTAT_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Usage(format!("TILESTAT_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match threads().and_then(|_| run::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
