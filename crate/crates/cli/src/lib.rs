//! The `idealkit` command line: evaluation, builders, certificate checks,
//! envelopes and the bundled verification suite.
//!
//! Exit codes: 0 success, 1 a check failed and its evidence was printed,
//! 2 usage or input error, 3 a window, budget or support cap was exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use idealkit_core::qvalue::Rational;
use idealkit_core::sets::Window;

pub mod commands;
pub mod error;
pub mod report;
pub mod suites;

pub use error::CliError;
pub use report::{Outcome, RunReport};

fn rational_arg(s: &str) -> Result<Rational, String> {
    idealkit_core::dsl::parse_rational(s.trim()).ok_or_else(|| format!("{s:?} is not a rational p or p/q"))
}

#[derive(Parser, Debug)]
#[command(name = "idealkit", version, about = "Exact computations with submeasures on finite windows")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Print a JSON run report instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Window bound W: points of ω are below W
    #[arg(long, global = true, env = "IDEALKIT_WINDOW", default_value_t = Window::DEFAULT_BOUND)]
    pub window: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on candidate sets, subsets or samples a command may examine
    #[arg(long, global = true, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Worker threads for parallel evaluation; output does not depend on it
    #[arg(long, global = true, env = "IDEALKIT_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuildName {
    NuExample,
    CappedExample,
    IntervalDl,
    HatOf,
    MzPartition,
    AdFamily,
    DiracFin,
    DiracFinplus,
    ErdosUlam,
    SimpleDensity,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Disj,
    Incr,
    Int,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Full,
    Even,
}

#[derive(Args, Debug, Clone)]
pub struct BuildParams {
    /// Largest row index n of the ν example
    #[arg(long, default_value_t = 2)]
    pub kmax: u64,
    /// Largest block index m of the ν example
    #[arg(long, default_value_t = 4)]
    pub mmax: u64,
    /// Largest row X_n of the capped example
    #[arg(long, default_value_t = 5)]
    pub nmax: u64,
    /// Number of intervals (interval-dl) or blocks (mz-partition)
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    /// Submeasure on ω to lift (hat-of)
    #[arg(long)]
    pub phi: Option<PathBuf>,
    /// Comma-separated binary seeds, each repeated periodically (ad-family)
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<String>,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Length of the weight sequence (erdos-ulam, simple-density); defaults to the window
    #[arg(long)]
    pub length: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an expression on a set
    Eval {
        expr: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Values after dropping the 0, 1, 2, … smallest points of a set
    NormProfile {
        expr: PathBuf,
        #[arg(long)]
        set: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Build a named construction and print its DSL or JSON
    Build {
        name: BuildName,
        #[command(flatten)]
        params: BuildParams,
    },
    /// Check one family for a t-uniform obstruction (exit 1 when found)
    CheckObstruction {
        expr: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Rational,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        #[arg(long)]
        t: usize,
    },
    /// Search the window for a t-uniform obstruction (exit 1 when found)
    SearchObstruction {
        expr: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Rational,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        /// Family size
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: usize,
    },
    /// Greedy selection for the strongly density-like condition
    CheckSdl {
        expr: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        c: Rational,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Rational,
        #[arg(long, value_enum, default_value_t = FlavorArg::Disj)]
        flavor: FlavorArg,
    },
    /// Selections of K_{s,F} whose union reaches ε (exit 1 when any)
    CheckKsf {
        expr: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Cut sequence s, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        cuts: Vec<u64>,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Rational,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = FlavorArg::Incr)]
        flavor: FlavorArg,
    },
    /// Merge a schedule of cut sequences and build ν = max(φ, ψ)
    RefineDstrong {
        phi: PathBuf,
        /// JSON list of {"epsilon", "delta", "cuts"}
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Restrict an expression to the blocks cut out by s
    Blockize {
        nu: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        cuts: Vec<u64>,
    },
    /// Rebuild disjointly supported submeasures over interval supports
    NormalizeSupports {
        #[arg(required = true)]
        mus: Vec<PathBuf>,
        /// Pad the supports to cover [0, N) first
        #[arg(long)]
        pad: Option<u64>,
    },
    /// Nonpathological envelope at a target, or a scan over sampled targets
    Pathology {
        expr: Option<PathBuf>,
        /// Subset table JSON instead of an expression
        #[arg(long, conflicts_with = "expr")]
        table: Option<PathBuf>,
        #[arg(long)]
        support: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Run the bundled worked-example suite
    VerifyPaper,
}

fn execute(cli: &Cli) -> Result<RunReport, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Eval { expr, set } => commands::eval(g, expr, set),
        Command::NormProfile { expr, set, depth } => commands::norm_profile(g, expr, set, *depth),
        Command::Build { name, params } => commands::build(g, *name, params),
        Command::CheckObstruction { expr, family, epsilon, delta, t } => {
            commands::check_obstruction(g, expr, family, epsilon, delta, *t)
        }
        Command::SearchObstruction { expr, epsilon, delta, m, t } => {
            commands::search_obstruction(g, expr, epsilon, delta, *m, *t)
        }
        Command::CheckSdl { expr, family, c, epsilon, flavor } => {
            commands::check_sdl(g, expr, family, c, epsilon, *flavor)
        }
        Command::CheckKsf { expr, family, cuts, epsilon, maxlen, variant, flavor } => {
            commands::check_ksf(g, expr, family, cuts, epsilon, *maxlen, *variant, *flavor)
        }
        Command::RefineDstrong { phi, schedule } => commands::refine_dstrong(g, phi, schedule),
        Command::Blockize { nu, cuts } => commands::blockize(g, nu, cuts),
        Command::NormalizeSupports { mus, pad } => commands::normalize(g, mus, *pad),
        Command::Pathology { expr, table, support, target, samples } => {
            commands::pathology(g, expr.as_deref(), table.as_deref(), support.as_deref(), target.as_deref(), *samples)
        }
        Command::VerifyPaper => commands::verify_paper(g),
    }
}

/// Parses `args` (program name first), runs the command and writes its
/// report to `out`. Errors go to stderr. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    let result = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(CliError::usage(format!("cannot start {n} threads: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(report) => {
            if out.write_all(report.render(cli.global.json).as_bytes()).is_err() {
                return error::EXIT_USAGE;
            }
            report.outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
