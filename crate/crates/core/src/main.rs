use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fair_ksupplier::algo::SolveReport;
use fair_ksupplier::bench::{format_summary, run_grid, summarize, write_csv, GridConfig};
use fair_ksupplier::data::{generate, load_tabular, AlphaRule, GroupMode, SyntheticSpec, TabularConfig};
use fair_ksupplier::{
    read_instance, run_algorithm, write_instance, Algorithm, ExactOptions, Instance, Result,
    SearchMode, SolveOptions, StartRule,
};

/// Fair k-supplier solvers, baselines and experiment harness.
#[derive(Parser)]
#[command(name = "fair-ksupplier", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance (uniform points in the unit cube).
    Gen(GenArgs),
    /// Solve an instance file or tabular dataset and print a JSON report.
    Solve(SolveArgs),
    /// Run an experiment grid and write one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Disjoint,
    Overlapping,
}

#[derive(Args)]
struct GenArgs {
    /// Total number of points.
    #[arg(long)]
    n: usize,
    /// Dimension.
    #[arg(long)]
    d: usize,
    /// Number of groups.
    #[arg(long)]
    t: usize,
    /// Number of centers.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Disjoint)]
    mode: ModeArg,
    /// Expected group size as a multiple of n_f / t (overlapping mode).
    #[arg(long, default_value_t = 2.0)]
    overlap: f64,
    /// Fraction of points that become clients.
    #[arg(long, default_value_t = 0.5)]
    client_fraction: f64,
    /// Comma-separated lower bounds; k / t per group when omitted.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<usize>>,
    /// Output path; standard output when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    instance: Option<PathBuf>,
    /// Tabular dataset config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// unfair | fair-disjoint | fair-intersecting | exact (the `-3apx` ids work too).
    #[arg(long, default_value = "fair-disjoint")]
    algo: Algorithm,
    /// Override the instance's k.
    #[arg(long)]
    k: Option<usize>,
    /// Override the lower bounds (comma-separated).
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<usize>>,
    /// Upper bounds (comma-separated); fair-intersecting and exact only.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<usize>>,
    /// Seed for the traversal's random first client.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start the traversal at this client instead of a seeded random one.
    #[arg(long)]
    start: Option<usize>,
    #[arg(long, value_enum, default_value_t = SearchArg::Exhaustive)]
    search_mode: SearchArg,
    /// Refuse intersecting instances with t * k above this.
    #[arg(long, default_value_t = SolveOptions::default().work_limit)]
    work_limit: usize,
    /// Refuse exact solves with more candidate subsets than this.
    #[arg(long, default_value_t = ExactOptions::default().limit)]
    exact_limit: u64,
    /// Skip multisets whose lower bound cannot beat the incumbent.
    #[arg(long)]
    prune: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Exhaustive,
    Binary,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid config (TOML).
    #[arg(long)]
    grid: PathBuf,
    /// CSV output path; standard output when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let spec = SyntheticSpec {
        n: args.n,
        d: args.d,
        t: args.t,
        k: args.k,
        client_fraction: args.client_fraction,
        group_mode: match args.mode {
            ModeArg::Disjoint => GroupMode::Disjoint,
            ModeArg::Overlapping => GroupMode::Overlapping {
                overlap_factor: args.overlap,
            },
        },
        alpha: args.alpha.map_or(AlphaRule::Uniform, AlphaRule::Explicit),
        seed: args.seed,
    };
    let instance = generate(&spec)?;
    let metadata = json!({ "generator": spec });
    match args.out {
        Some(path) => write_instance(path, &instance, Some(metadata)),
        None => {
            let file = fair_ksupplier::InstanceFile::from_instance(&instance, Some(metadata));
            emit(&serde_json::to_string(&file)?)
        }
    }
}

fn load(args: &SolveArgs) -> Result<Instance> {
    if let Some(path) = &args.instance {
        return read_instance(path);
    }
    let path = args.config.as_ref().expect("clap requires one source");
    let data = load_tabular(&TabularConfig::from_file(path)?)?;
    log::info!("loaded {}: {}", path.display(), serde_json::to_string(&data.provenance)?);
    Ok(data.instance)
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let mut instance = load(&args)?;
    if args.k.is_some() || args.alpha.is_some() || args.beta.is_some() {
        let k = args.k.unwrap_or(instance.k());
        let alpha = args.alpha.clone().unwrap_or_else(|| instance.alpha().to_vec());
        let beta = args.beta.clone().or_else(|| instance.beta().map(<[usize]>::to_vec));
        instance = instance.with_requirements(k, alpha, beta)?;
    }
    let options = SolveOptions {
        search: match args.search_mode {
            SearchArg::Exhaustive => SearchMode::Exhaustive,
            SearchArg::Binary => SearchMode::Binary,
        },
        start: args.start.map_or(StartRule::Seeded(args.seed), StartRule::Point),
        work_limit: args.work_limit,
        prune: args.prune,
    };
    let exact = ExactOptions {
        limit: args.exact_limit,
        all_sizes: false,
    };
    let outcome = run_algorithm(&instance, args.algo, &options, &exact)?;
    let report = SolveReport::new(&instance, args.algo, args.seed, &outcome)?;
    emit(&serde_json::to_string_pretty(&report)?)
}

/// Prints a document; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let grid = GridConfig::from_file(&args.grid)?;
    let rows = run_grid(&grid, args.jobs)?;
    let summary = format_summary(&summarize(&rows));
    match &args.out {
        Some(path) => {
            write_csv(fs::File::create(path)?, &rows)?;
            print!("{summary}");
        }
        None => {
            write_csv(io::stdout().lock(), &rows)?;
            eprint!("{summary}");
        }
    }
    Ok(())
}
