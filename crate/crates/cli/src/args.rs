use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "majorate",
    version,
    about = "Renyi-entropy exchange rates and tensor-power majorization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Rescale weights that do not sum to one.
    #[arg(long, global = true)]
    pub normalize: bool,

    /// Maximum number of type classes enumerated per tensor power.
    #[arg(long, global = true, env = "MAJORATE_BUDGET")]
    pub budget: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Renyi entropies at given orders, or a sweep over [0, inf].
    Entropy {
        dist: PathBuf,
        /// Order(s) to evaluate; `inf` is accepted. Omit for a sweep.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alpha: Vec<String>,
        /// Number of sweep points.
        #[arg(long, default_value_t = 257)]
        points: usize,
    },
    /// Asymptotic exchange rate R(P, Q).
    Rate {
        p: PathBuf,
        q: PathBuf,
        /// Number of grid points on [0, inf].
        #[arg(long, default_value_t = majorate::rate::DEFAULT_GRID)]
        grid: usize,
    },
    /// Mass and size exponent curves.
    Exponents {
        dist: PathBuf,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Decide whether P^n is majorized by Q^m (exit 3 when it is not).
    Majorize {
        p: PathBuf,
        q: PathBuf,
        #[arg(short = 'n', long = "n", default_value_t = 1)]
        n: u32,
        #[arg(short = 'm', long = "m", default_value_t = 1)]
        m: u32,
        /// Re-decide near-zero margins in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
        /// Prefix differences above minus this count as dominated.
        #[arg(long, default_value_t = majorate::oracle::DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Finite-n exponents against their limits.
    Verify {
        dist: PathBuf,
        #[arg(short = 'n', long = "n")]
        n: u32,
        #[arg(long, default_value_t = 16)]
        resolution: usize,
    },
    /// Compare strict Renyi dominance with direct majorization up to n_max.
    Chain {
        p: PathBuf,
        q: PathBuf,
        #[arg(long = "n-max", default_value_t = 8)]
        n_max: u32,
    },
    /// Distinct probability levels of P^n.
    Staircase {
        dist: PathBuf,
        #[arg(short = 'n', long = "n")]
        n: u32,
    },
}
