use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use recla::oracle::exhaustive_small_sweep;
use recla::provider_from_env;
use recla_bench::{
    breakdown, breakdown_csv, oracle_sweep_rows, predict_shares, run_sweep, sweep_csv,
    write_output, Algorithm, BenchError, OpName, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "recla-bench",
    version,
    about = "Timed sweeps, FLOP-ledger breakdowns and share predictions for the recla algorithms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Time an algorithm over lists of sizes and blocking parameters.
    Sweep(SweepArgs),
    /// Attribute one recursive run's FLOPs to recursion levels.
    Breakdown(BreakdownArgs),
    /// Print the analytic level shares without running anything.
    Predict(PredictArgs),
    /// Run the exhaustive small-size verification sweep.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Operation: trtri|potrf|getrf|lauum|sygst|trsyl.
    #[arg(long)]
    op: String,
    /// Algorithm family: blocked|recursive|unblocked.
    #[arg(long)]
    alg: String,
    /// Matrix orders, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Row counts paired with --n (getrf and trsyl only; default m = n).
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Block sizes for --alg blocked.
    #[arg(long, value_delimiter = ',')]
    b: Option<Vec<usize>>,
    /// Crossovers for --alg recursive.
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<usize>>,
    /// Measured repetitions per cell.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Unrecorded warm-up runs per cell.
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    /// Base seed for input generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Kernel provider threads (forwarded when the provider supports it).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Skip residual verification (pure timing).
    #[arg(long)]
    no_verify: bool,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BreakdownArgs {
    /// Operation: trtri|potrf|getrf|lauum.
    #[arg(long)]
    op: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: usize,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: usize,
}

#[derive(Args)]
struct OracleArgs {
    /// Largest size to sweep (everything from 0 up is covered).
    #[arg(long, default_value_t = 32)]
    n_max: usize,
    /// Block sizes / crossovers to exercise; defaults to 1,2,3,8,n_max.
    #[arg(long, value_delimiter = ',')]
    params: Option<Vec<usize>>,
    /// Number of seeds per cell.
    #[arg(long, default_value_t = 3)]
    seeds: usize,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.cmd {
        Cmd::Sweep(args) => sweep_cmd(args),
        Cmd::Breakdown(args) => breakdown_cmd(args),
        Cmd::Predict(args) => predict_cmd(args),
        Cmd::Oracle(args) => oracle_cmd(args),
    }
}

fn parse<T: FromStr<Err = String>>(what: &str, s: &str) -> Result<T, BenchError> {
    T::from_str(s).map_err(|e| BenchError::Usage(format!("--{what}: {e}")))
}

fn apply_threads(threads: usize) {
    #[cfg(feature = "platform-kernels")]
    recla::kernels::set_num_threads(threads);
    #[cfg(not(feature = "platform-kernels"))]
    if threads > 1 {
        eprintln!("note: the reference provider is single-threaded; --threads {threads} is recorded but has no effect");
    }
}

fn metadata(provider_name: &str, detail: String) -> Vec<String> {
    vec![
        format!("recla-bench {} {detail}", env!("CARGO_PKG_VERSION")),
        format!("kernels={provider_name}"),
    ]
}

fn sweep_cmd(args: SweepArgs) -> Result<(), BenchError> {
    let op: OpName = parse("op", &args.op)?;
    let algorithm: Algorithm = parse("alg", &args.alg)?;

    let sizes: Vec<(usize, usize)> = match &args.m {
        None => args.n.iter().map(|&n| (n, n)).collect(),
        Some(m) if m.len() == args.n.len() => {
            args.n.iter().copied().zip(m.iter().copied()).collect()
        }
        Some(m) => {
            return Err(BenchError::Usage(format!(
                "--m lists {} values but --n lists {}",
                m.len(),
                args.n.len()
            )))
        }
    };

    let params = match (algorithm, &args.b, &args.c) {
        (_, Some(_), Some(_)) => {
            return Err(BenchError::Usage("--b and --c are mutually exclusive".into()))
        }
        (Algorithm::Blocked, Some(b), None) => b.clone(),
        (Algorithm::Blocked, None, None) => Vec::new(),
        (Algorithm::Recursive, None, Some(c)) => c.clone(),
        (Algorithm::Recursive, None, None) => Vec::new(),
        (Algorithm::Unblocked, None, None) => Vec::new(),
        (Algorithm::Blocked, None, Some(_)) => {
            return Err(BenchError::Usage("blocked runs take --b, not --c".into()))
        }
        (Algorithm::Recursive, Some(_), None) => {
            return Err(BenchError::Usage("recursive runs take --c, not --b".into()))
        }
        (Algorithm::Unblocked, _, _) => {
            return Err(BenchError::Usage("unblocked runs take neither --b nor --c".into()))
        }
    };

    apply_threads(args.threads);
    let provider = provider_from_env();
    let cfg = SweepConfig {
        op,
        algorithm,
        sizes,
        params,
        reps: args.reps,
        warmup: args.warmup,
        seed: args.seed,
        threads: args.threads,
        verify: !args.no_verify,
    };
    let rows = run_sweep(&cfg, provider.as_ref())?;
    let comments = metadata(
        provider.name(),
        format!(
            "sweep op={} alg={} seed={} reps={} warmup={} threads={} verify={}",
            op.name(),
            algorithm.name(),
            args.seed,
            args.reps,
            args.warmup,
            args.threads,
            !args.no_verify
        ),
    );
    write_output(args.csv.as_deref(), &comments, &sweep_csv(&rows))
}

fn breakdown_cmd(args: BreakdownArgs) -> Result<(), BenchError> {
    let op: OpName = parse("op", &args.op)?;
    let provider = provider_from_env();
    let (rows, blas3) = breakdown(op, args.n, args.c, provider.as_ref())?;
    let mut comments = metadata(
        provider.name(),
        format!("breakdown op={} n={} c={}", op.name(), args.n, args.c),
    );
    comments.push(format!("cumulative_blas3_share={blas3}"));
    write_output(args.csv.as_deref(), &comments, &breakdown_csv(&rows))
}

fn predict_cmd(args: PredictArgs) -> Result<(), BenchError> {
    if args.n < 1 {
        return Err(BenchError::Usage("--n must be at least 1".into()));
    }
    let mut body = String::from("level,share\n");
    for (level, share) in predict_shares(args.n, args.c) {
        body.push_str(&format!("{level},{share}\n"));
    }
    write_output(None, &[], &body)
}

fn oracle_cmd(args: OracleArgs) -> Result<(), BenchError> {
    if args.seeds < 1 {
        return Err(BenchError::Usage("--seeds must be at least 1".into()));
    }
    let mut params = args.params.unwrap_or_else(|| {
        let mut p = vec![1, 2, 3, 8, args.n_max.max(1)];
        p.dedup();
        p
    });
    params.retain(|&p| p > 0);
    if params.is_empty() {
        return Err(BenchError::Usage("--params needs at least one nonzero value".into()));
    }
    let seeds: Vec<u64> = (0..args.seeds as u64).map(|k| args.seed.wrapping_add(k)).collect();

    let provider = provider_from_env();
    let report = exhaustive_small_sweep(provider.as_ref(), args.n_max, &params, &seeds);
    let rows = oracle_sweep_rows(&report, 1);
    let mut comments = metadata(
        provider.name(),
        format!(
            "oracle n_max={} params={:?} seeds={} seed={}",
            args.n_max, params, args.seeds, args.seed
        ),
    );
    comments.push(format!(
        "checks={} worst_ratio_vs_tolerance={}",
        report.checks, report.worst_ratio
    ));
    write_output(args.csv.as_deref(), &comments, &sweep_csv(&rows))?;
    if !report.all_passed() {
        for f in &report.failures {
            eprintln!("{f}");
        }
        return Err(BenchError::Verification(format!(
            "{} of {} checks failed",
            report.failures.len(),
            report.checks
        )));
    }
    Ok(())
}
