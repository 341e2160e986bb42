use clap::{Args, Parser, Subcommand, ValueEnum};
use randsimplex::montecarlo::canonical_identity;
use randsimplex::Family;
use randsimplex_cli::{
    default_workers, emit, reports_to_csv, table_to_csv, Document, ExperimentConfig, SuiteFile,
    SuiteReport, SuiteSummary,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Verify closed-form identities for random simplices in ellipsoids
/// against seeded Monte Carlo estimates.
#[derive(Parser)]
#[command(name = "randsimplex", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single identity check and write its report.
    Verify(VerifyArgs),
    /// Run every experiment in a suite file and write an aggregate report.
    Suite(SuiteArgs),
    /// Tabulate estimated (and ball-case exact) simplex moments on a grid.
    Table(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity label from the catalog (aliases accepted).
    #[arg(long)]
    identity: String,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    /// Moment exponent, where the identity takes one.
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated semi-axes, length d.
    #[arg(long, value_delimiter = ',', required = true)]
    semiaxes: Vec<f64>,
    /// Apply a deterministic random rotation derived from this seed.
    #[arg(long)]
    rotation_seed: Option<u64>,
    /// Vertex family for distributional laws: uniform-ball or gaussian.
    #[arg(long)]
    family: Option<String>,
    /// Monte Carlo sample count per side.
    #[arg(long)]
    n: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// z threshold for moment identities.
    #[arg(long, default_value_t = 4.0)]
    z_threshold: f64,
    /// KS significance level for distributional identities.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Path to a suite file (JSON, schema in the repository README).
    config: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Inclusive dimension range, e.g. 2..4 or a single value.
    #[arg(long)]
    d_range: String,
    /// Inclusive k range; k is capped at d per row.
    #[arg(long)]
    k_range: String,
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<f64>,
    /// Comma-separated semi-axes; omitted means the unit ball for each d.
    #[arg(long, value_delimiter = ',')]
    semiaxes: Option<Vec<f64>>,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_STAT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn parse_range(text: &str, flag: &str) -> Result<(usize, usize), String> {
    let parse_one =
        |s: &str| s.trim().parse::<usize>().map_err(|_| format!("{flag}: invalid integer '{s}'"));
    match text.split_once("..") {
        Some((lo, hi)) => Ok((parse_one(lo)?, parse_one(hi.trim_start_matches('='))?)),
        None => {
            let v = parse_one(text)?;
            Ok((v, v))
        }
    }
}

fn resolve_workers(flag: Option<usize>) -> Result<usize, String> {
    match flag {
        Some(0) => Err("--workers: must be at least 1".into()),
        Some(w) => Ok(w),
        None => default_workers(),
    }
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let family = match args.family.as_deref().map(str::parse::<Family>).transpose() {
        Ok(f) => f,
        Err(e) => return usage_error(&format!("--family: {e}")),
    };
    if canonical_identity(&args.identity).is_err() {
        return usage_error(&format!("--identity: unknown identity '{}'", args.identity));
    }
    let workers = match resolve_workers(args.workers) {
        Ok(w) => w,
        Err(e) => return usage_error(&e),
    };
    let cfg = ExperimentConfig {
        identity: args.identity,
        d: args.d,
        k: args.k,
        p: args.p,
        semi_axes: args.semiaxes,
        rotation_seed: args.rotation_seed,
        family,
        samples: args.n,
        seed: args.seed,
        workers: Some(workers),
        policy: Some(randsimplex::VerifyPolicy {
            z_threshold: args.z_threshold,
            alpha: args.alpha,
        }),
    };
    if let Err(e) = cfg.validate() {
        return usage_error(&e);
    }
    let report = match cfg.run(workers) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    let text = match args.format {
        Format::Json => Document::new(&report).to_json(),
        Format::Csv => reports_to_csv(std::slice::from_ref(&report)),
    };
    if let Err(e) = emit(args.out.as_deref(), &text) {
        return usage_error(&format!("writing output: {e}"));
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_STAT_FAIL)
    }
}

fn run_suite(args: SuiteArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("{}: {e}", args.config.display())),
    };
    let suite: SuiteFile = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return usage_error(&format!("{}: {e}", args.config.display())),
    };
    let workers = match resolve_workers(args.workers) {
        Ok(w) => w,
        Err(e) => return usage_error(&e),
    };
    for (i, cfg) in suite.experiments.iter().enumerate() {
        if let Err(e) = cfg.validate() {
            return usage_error(&format!("entry {i}: {e}"));
        }
    }
    let mut results = Vec::with_capacity(suite.experiments.len());
    for (i, cfg) in suite.experiments.iter().enumerate() {
        match cfg.run(workers) {
            Ok(r) => results.push(r),
            Err(e) => return usage_error(&format!("entry {i}: {e}")),
        }
    }
    let passed = results.iter().filter(|r| r.pass).count();
    let summary = SuiteSummary {
        total: results.len(),
        passed,
        failed: results.len() - passed,
    };
    let all_pass = summary.failed == 0;
    let out_text = match args.format {
        Format::Json => Document::new(SuiteReport { results, summary }).to_json(),
        Format::Csv => reports_to_csv(&results),
    };
    if let Err(e) = emit(args.out.as_deref(), &out_text) {
        return usage_error(&format!("writing output: {e}"));
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_STAT_FAIL)
    }
}

fn run_table(args: TableArgs) -> ExitCode {
    let d_range = match parse_range(&args.d_range, "--d-range") {
        Ok(r) => r,
        Err(e) => return usage_error(&e),
    };
    let k_range = match parse_range(&args.k_range, "--k-range") {
        Ok(r) => r,
        Err(e) => return usage_error(&e),
    };
    let workers = match resolve_workers(args.workers) {
        Ok(w) => w,
        Err(e) => return usage_error(&e),
    };
    let rows = match randsimplex_cli::run_table(
        d_range,
        k_range,
        &args.p_list,
        args.semiaxes.as_deref(),
        args.n,
        args.seed,
        workers,
    ) {
        Ok(rows) => rows,
        Err(e) => return usage_error(&e.to_string()),
    };
    let text = match args.format {
        Format::Json => Document::new(&rows).to_json(),
        Format::Csv => table_to_csv(&rows),
    };
    if let Err(e) = emit(args.out.as_deref(), &text) {
        return usage_error(&format!("writing output: {e}"));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            e.exit();
        }
    };
    match cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Suite(args) => run_suite(args),
        Command::Table(args) => run_table(args),
    }
}
