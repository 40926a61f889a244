mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eqindex::Error;

/// Environment variable naming the default report directory.
pub const OUT_ENV: &str = "EQINDEX_OUT_DIR";
const DEFAULT_OUT: &str = "eqindex-reports";

#[derive(Parser, Debug)]
#[command(name = "eqindex", version, about = "Exact super-algebra checks and a numerical index harness")]
pub struct Cli {
    /// Report directory (default: $EQINDEX_OUT_DIR, then ./eqindex-reports).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Only write the report file, do not echo it.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Clifford relations, matrix-oracle supertrace and graded cyclicity.
    VerifyClifford(SuiteArgs),
    /// Supertrace and Pfaffian identities by brute-force expansion.
    VerifyMq {
        #[command(flatten)]
        suite: SuiteArgs,
        /// Run a single identity (default: all that support n).
        #[arg(long)]
        identity: Option<String>,
    },
    /// Fiber integrals of Thom representatives and the flat Riemann-Roch constant.
    Thom {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Random moments with spectral radius below pi.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Radial profiles: gaussian, compact, compact:INNER,OUTER.
        #[arg(long, value_delimiter = ',', default_values_t = ["gaussian".to_string(), "compact".to_string()])]
        profile: Vec<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Sample a characteristic density on a surface and integrate it.
    Charform {
        /// Built-in geometry (sphere, torus) or a JSON file.
        #[arg(long, default_value = "sphere")]
        geometry: String,
        /// euler, c1 or index.
        #[arg(long, default_value = "index")]
        density: String,
        /// Line-bundle degree for built-in geometries.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        flux: i64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Symbol-calculus constants and product checks.
    Getzler {
        #[command(subcommand)]
        cmd: GetzlerCmd,
    },
    /// Supertrace index and idempotency of the heat-kernel class of a model operator.
    Index(IndexArgs),
    /// Cochain pairing of the index class against the local density.
    Pair(PairArgs),
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum GetzlerCmd {
    /// beta_q, delta_q and their combination.
    Constants {
        /// Range `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "1..3")]
        q: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Associativity, flat degeneration and linear commutators of the star product.
    Star(SuiteArgs),
}

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[arg(long, default_value = "circle")]
    pub model: String,
    /// Sites (per side for the torus); defaults to the model's size.
    #[arg(long = "N")]
    pub size: Option<usize>,
    /// Winding of the circle model.
    #[arg(long, allow_negative_numbers = true)]
    pub w: Option<i64>,
    /// Flux of the torus model.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 1.0, 2.0])]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_idempotent: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_integer: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_spread: f64,
    /// Also fit kernel decay at these t.
    #[arg(long, value_delimiter = ',')]
    pub decay_t: Vec<f64>,
    /// Kernel for the decay fit: heat, wassermann or odd.
    #[arg(long, default_value = "heat")]
    pub kernel: String,
    #[arg(long, default_value_t = 0.99)]
    pub min_r2: f64,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long, default_value = "torus")]
    pub model: String,
    #[arg(long = "N")]
    pub size: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub w: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
    /// Half the cochain degree; 0 pairs the constant cochain.
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    /// Run the documented t-sweep.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = eqindex::index_harness::pairing::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Exponential growth weight on the cochain.
    #[arg(long)]
    pub growth: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) | Error::UnknownName { .. } | Error::Parse(_) | Error::Shape(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out_dir = cli.out.clone().or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let report = match commands::dispatch(&cli.cmd) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    match output::emit(&report, &out_dir, cli.quiet) {
        Ok(path) => eprintln!("report written to {}", path.display()),
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(1);
        }
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: FAILED", report.name);
        ExitCode::from(1)
    }
}
