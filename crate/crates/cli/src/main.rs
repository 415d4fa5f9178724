use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use openshop::bench::{bench_instance, write_csv, Algo};
use openshop::bounds::list_scheduling_baseline;
use openshop::eptas::{solve_detailed, SolveConfig, SolveReport, DEFAULT_BUDGET};
use openshop::format::{parse_instance, parse_schedule, serialize_instance, serialize_schedule};
use openshop::generate::generate;
use openshop::oracle::{exact_small, OracleLimits};
use openshop::rational::{self, Rat};
use openshop::validate::validate;
use openshop::{Error, Instance};

const WORKERS_ENV: &str = "OPENSHOP_WORKERS";

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  I/O or internal error
  2  usage error
  3  parse error
  4  enumeration budget exceeded
  5  oracle size caps exceeded
  6  schedule validation failed

Set OPENSHOP_WORKERS to bound the number of bench worker threads.";

#[derive(Parser)]
#[command(name = "openshop", version, about = "Makespan minimization on parallel identical open shops")]
#[command(after_help = EXIT_CODES)]
struct Cli {
    /// Log verbosity (-v debug, -vv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance with uniform integer times.
    Gen(GenArgs),
    /// Solve an instance and write its schedule.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Validate(ValidateArgs),
    /// Run algorithms over every instance in a directory and write a CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    max_time: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Eptas,
    Baseline,
    Oracle,
}

#[derive(Args, Clone)]
struct EptasArgs {
    /// Target error. Alone it selects the theoretical threshold; with --gamma
    /// it sets the bisection precision (default 1/2).
    #[arg(long, value_parser = parse_rat)]
    epsilon: Option<Rat>,
    /// Fixed big-job threshold, strictly between 0 and 1 (desk mode).
    #[arg(long, value_parser = parse_rat)]
    gamma: Option<Rat>,
    /// Maximum number of placement candidates examined.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args, Clone)]
struct OracleArgs {
    #[arg(long, default_value_t = OracleLimits::default().max_jobs)]
    max_jobs: usize,
    #[arg(long, default_value_t = OracleLimits::default().max_shops)]
    max_shops: usize,
    #[arg(long, default_value_t = OracleLimits::default().max_stages)]
    max_stages: usize,
}

impl OracleArgs {
    fn limits(&self) -> OracleLimits {
        OracleLimits {
            max_jobs: self.max_jobs,
            max_shops: self.max_shops,
            max_stages: self.max_stages,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    eptas: EptasArgs,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Schedule output; standard output if omitted.
    #[arg(long)]
    out_schedule: Option<PathBuf>,
    /// Key-value report (eptas only; other algorithms report the makespan).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Report as a CSV header plus one row (eptas only).
    #[arg(long)]
    report_csv: Option<PathBuf>,
    /// Write the assignment LP of the chosen placement in LP format (eptas only).
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    /// Require every positive-time operation to be scheduled.
    #[arg(long)]
    complete: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dir: PathBuf,
    /// Comma-separated algorithms.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "baseline,eptas")]
    algos: Vec<AlgoArg>,
    #[command(flatten)]
    eptas: EptasArgs,
    #[command(flatten)]
    oracle: OracleArgs,
    /// CSV output; standard output if omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Drop the timing and timestamp columns so output depends only on inputs.
    #[arg(long)]
    no_timestamp: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(2, message)
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Failure::new(1, format!("{}: {err}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 3,
            Error::BudgetExceeded { .. } => 4,
            Error::CapsExceeded(_) => 5,
            Error::InvalidParameter(_) => 2,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    rational::parse(s).ok_or_else(|| format!("expected an integer or a/b rational, got {s:?}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))
}

fn eptas_config(args: &EptasArgs) -> Result<SolveConfig, Failure> {
    let cfg = match (&args.gamma, &args.epsilon) {
        (Some(g), eps) => {
            let mut c = SolveConfig::desk(g.clone());
            if let Some(e) = eps {
                c.epsilon = e.clone();
            }
            c
        }
        (None, Some(e)) => SolveConfig::theoretical(e.clone()),
        (None, None) => return Err(Failure::usage("eptas needs --epsilon or --gamma")),
    };
    Ok(cfg.with_budget(args.budget))
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    if args.m == 0 || args.k == 0 {
        return Err(Failure::usage("--m and --k must be positive"));
    }
    let inst = generate(args.m, args.k, args.n, args.max_time, args.seed)?;
    write_or_print(args.out.as_deref(), &serialize_instance(&inst))
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let config = match args.algo {
        AlgoArg::Eptas => Some(eptas_config(&args.eptas)?),
        _ => None,
    };
    let inst = load_instance(&args.input)?;
    let (schedule, report) = match args.algo {
        AlgoArg::Eptas => {
            let config = config.expect("checked above");
            let sol = solve_detailed(&inst, &config)?;
            if let (Some(path), Some(w)) = (&args.dump_lp, &sol.winner) {
                fs::write(path, w.assign.lp.to_lp_format()).map_err(|e| Failure::io(path, e))?;
            }
            (sol.schedule, Some(sol.report))
        }
        AlgoArg::Baseline => (list_scheduling_baseline(&inst), None),
        AlgoArg::Oracle => {
            let r = exact_small(&inst, args.oracle.limits())?;
            log::info!("oracle explored {} nodes", r.nodes_explored);
            (r.witness, None)
        }
    };

    let violations = validate(&inst, &schedule, true);
    if let Some(v) = violations.first() {
        return Err(Failure::new(6, format!("produced schedule is invalid: {v}")));
    }
    write_or_print(args.out_schedule.as_deref(), &serialize_schedule(&schedule))?;

    let makespan = schedule.makespan();
    let text = match &report {
        Some(r) => r.to_key_value(),
        None => format!("makespan = {}\n", rational::render(&makespan)),
    };
    if let Some(path) = &args.report {
        fs::write(path, &text).map_err(|e| Failure::io(path, e))?;
    }
    if let (Some(path), Some(r)) = (&args.report_csv, &report) {
        fs::write(path, report_csv(r)).map_err(|e| Failure::io(path, e))?;
    }
    eprintln!(
        "makespan {} ({})",
        rational::render(&makespan),
        rational::decimal(&makespan)
    );
    Ok(())
}

fn report_csv(r: &SolveReport) -> String {
    format!(
        "{}\n{}\n",
        SolveReport::csv_header().join(","),
        r.csv_record().join(",")
    )
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.instance)?;
    let schedule = parse_schedule(&read(&args.schedule)?)
        .map_err(|e| Failure::new(3, format!("{}: {e}", args.schedule.display())))?;
    let violations = validate(&inst, &schedule, args.complete);
    if violations.is_empty() {
        println!("OK");
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(Failure::new(6, format!("{} violation(s)", violations.len())))
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let mut algos = Vec::new();
    for a in &args.algos {
        algos.push(match a {
            AlgoArg::Eptas => Algo::Eptas(eptas_config(&args.eptas)?),
            AlgoArg::Baseline => Algo::Baseline,
            AlgoArg::Oracle => Algo::Oracle(args.oracle.limits()),
        });
    }
    let entries = fs::read_dir(&args.dir).map_err(|e| Failure::io(&args.dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Failure::io(&args.dir, e))?;
        if entry.path().is_file() {
            files.push(entry.path());
        }
    }
    files.sort();
    let mut instances = Vec::with_capacity(files.len());
    for f in &files {
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        instances.push((name, load_instance(f)?));
    }

    let rows: Vec<_> = instances
        .par_iter()
        .map(|(name, inst)| bench_instance(name, inst, &algos))
        .collect();
    let names: Vec<&str> = algos.iter().map(Algo::name).collect();
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default();
    let mut buf = Vec::new();
    write_csv(&rows, &names, !args.no_timestamp, &stamp, &mut buf)?;
    write_or_print(args.csv.as_deref(), &String::from_utf8_lossy(&buf))
}

fn init_workers() -> Result<(), Failure> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| Failure::usage(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::new(1, e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let result = init_workers().and_then(|()| match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Bench(a) => cmd_bench(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
