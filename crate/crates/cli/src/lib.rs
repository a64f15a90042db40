//! Command-line pipelines over the pricing library: exact AIV distributions,
//! analytic European and Bermudan prices, simulation cross-checks, the
//! jump-time bias report, quote calibration, and the CE-vs-RR scaling bench.

pub mod commands;
pub mod config;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    /// Bad inputs: malformed config, invariant violations. Exit code 2.
    Validation(String),
    /// Work refused by a configured resource cap. Exit code 3.
    ResourceCap(String),
    /// Filesystem or serialization trouble. Exit code 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::ResourceCap(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Validation(m) | CliError::ResourceCap(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mssvcj",
    about = "Option pricing under Markov-switching stochastic volatility with co-jumps",
    version
)]
pub struct Cli {
    /// Worker threads (default: all cores). Results are thread-count
    /// invariant.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct ConfigArg {
    /// Model configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Subcommand)]
pub enum Command {
    /// Exact AIV distribution of the volatility chain (CSV + JSON sidecar).
    Aiv {
        #[command(flatten)]
        config: ConfigArg,
        /// Number of chain steps; defaults to market.maturity / tau.
        #[arg(long)]
        steps: Option<usize>,
        /// Also run the enumeration oracle and assert agreement.
        #[arg(long)]
        check_ce: bool,
        /// CSV output path (v,prob); sidecar written next to it as .json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Analytic European price under the configured model.
    PriceEu {
        #[command(flatten)]
        config: ConfigArg,
        /// Emit the per-(jump count, variance atom) contribution table.
        #[arg(long)]
        components: bool,
        /// JSON output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bermudan lower/upper bounds by the tangent/secant rollback.
    PriceBerm {
        #[command(flatten)]
        config: ConfigArg,
        /// Exercise schedule as interval:count, e.g. 0.5:6.
        #[arg(long)]
        schedule: String,
        /// Interpolation point counts (comma separated runs one per value).
        #[arg(long, default_value = "200")]
        n: String,
        /// tangent | secant | both
        #[arg(long, default_value = "both")]
        method: String,
        /// Grid half-width override in stationary-volatility units.
        #[arg(long)]
        span: Option<f64>,
        /// Optional CSV convergence table (n, bounds, per-side seconds).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Euler Monte-Carlo European price (no jump-time relocation).
    Mc {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 1500)]
        substeps: usize,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Zero-discretization conditional estimator instead of Euler.
        #[arg(long)]
        conditional: bool,
        /// With --conditional: relocate jumps to their window starts.
        #[arg(long)]
        relocate: bool,
        #[arg(long)]
        antithetic: bool,
        /// Per-run CSV path.
        #[arg(long)]
        out_runs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares Monte-Carlo Bermudan estimate.
    Lsm {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        schedule: String,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_runs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected AIV bias of the jump-time relocation, with its
    /// implied-volatility impact.
    Bias {
        #[command(flatten)]
        config: ConfigArg,
        /// Jump-count cutoff for the bias sum (default: the pricing cutoff,
        /// but at least 10).
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Box-plot split of a price history plus random-search calibration of
    /// the jump law to option quotes.
    Calibrate {
        #[command(flatten)]
        config: ConfigArg,
        /// CSV of date,close rows.
        #[arg(long)]
        prices: Option<PathBuf>,
        /// CSV of strike,bid,ask rows.
        #[arg(long)]
        quotes: PathBuf,
        #[arg(long, default_value_t = 2_000)]
        iters: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Box-plot fence constant.
        #[arg(long, default_value_t = 1.5)]
        kfence: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CE-vs-RR timing and feasibility study on seeded random chains.
    Bench {
        /// State counts, comma separated.
        #[arg(long, default_value = "2,3,4,5")]
        m_list: String,
        /// Step counts, comma separated.
        #[arg(long, default_value = "20,25,30,35,40,45,50")]
        l_list: String,
        /// Algorithms to run: ce, rr, or ce,rr.
        #[arg(long, default_value = "ce,rr")]
        algos: String,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Path cap above which CE cells are skipped.
        #[arg(long, default_value_t = 100_000_000)]
        ce_cap: u64,
        #[arg(long, default_value_t = 100_000_000)]
        triple_cap: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV: algo,m,L,seconds,repeats,result_hash,status.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses arguments and runs the selected command; returns a process exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path as well
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(threads) = cli.threads {
        // ignore failure: the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
