use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use retrotomo::harness::{
    condition_sweep, emit_condition_csv, emit_csv, emit_json, reconstruct_record, run_benchmark, write_condition_csv,
    write_csv, Algorithm, BenchmarkPlan, Binning, ConditionSweep, ExperimentConfig,
};
use retrotomo::linalg::{infidelity, random_ginibre_state};
use retrotomo::measurement::record_io::{load_record, record_to_string, save_record};
use retrotomo::measurement::{coarse_grain, simulate_multiqubit_record, simulate_sparse_record, PhaseDistribution};
use retrotomo::{Result, TomographyError};

#[derive(Parser)]
#[command(name = "retrotomo", version, about = "Tomography with revealed random phase errors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a measurement record from a random full-rank state.
    Simulate(SimulateArgs),
    /// Reconstruct a state from a record file.
    Reconstruct(ReconstructArgs),
    /// Run a Monte Carlo benchmark and write CSV (and optionally JSON).
    Benchmark(BenchmarkArgs),
    /// Sweep the condition number of sampled measurement sets.
    Condition(ConditionArgs),
}

#[derive(Args)]
#[group(multiple = false)]
struct BinningArgs {
    /// Coarse-grain equatorial events into this many bins.
    #[arg(long)]
    bins: Option<usize>,
    /// Keep every equatorial event at its own angle.
    #[arg(long)]
    sparse: bool,
}

impl BinningArgs {
    fn binning(&self) -> Option<Binning> {
        match (self.bins, self.sparse) {
            (Some(n), _) => Some(Binning::Bins(n)),
            (None, true) => Some(Binning::Sparse),
            (None, false) => None,
        }
    }
}

#[derive(Args)]
struct DistArgs {
    /// Phase-error law.
    #[arg(long, value_parser = ["exp", "normal", "uniform"], default_value = "exp")]
    dist: String,
    /// Mean (exp) or standard deviation (normal) in radians; defaults to π/8.
    #[arg(long)]
    param: Option<f64>,
}

impl DistArgs {
    fn distribution(&self) -> Result<PhaseDistribution> {
        let param = match self.dist.as_str() {
            "uniform" => None,
            _ => Some(self.param.unwrap_or(PI / 8.0)),
        };
        PhaseDistribution::from_parts(&self.dist, param)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1)]
    qubits: usize,
    #[arg(long, default_value_t = 10_000)]
    events: usize,
    #[command(flatten)]
    binning: BinningArgs,
    #[command(flatten)]
    dist: DistArgs,
    /// Equatorial reference angle φ (single qubit only).
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record file; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Record file to reconstruct.
    input: PathBuf,
    #[arg(long, default_value = "pgdb", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// Coarse-grain a sparse record before reconstructing.
    #[arg(long)]
    bins: Option<usize>,
    /// Particle count for the Bayesian filter.
    #[arg(long, default_value_t = 1000)]
    particles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the estimate as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// TOML configuration; command-line flags override its base values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    events: Option<usize>,
    #[command(flatten)]
    binning: BinningArgs,
    #[arg(long, value_parser = ["exp", "normal", "uniform"])]
    dist: Option<String>,
    #[arg(long)]
    param: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Summary CSV; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full JSON report with configurations and per-trial results.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ConditionArgs {
    #[arg(long, value_parser = ["exp", "normal", "uniform"], default_value = "normal")]
    dist: String,
    /// Grid values (comma separated); defaults to π/16, π/8, …, 4π.
    #[arg(long, value_delimiter = ',')]
    param: Vec<f64>,
    /// Equatorial projectors per measurement set.
    #[arg(long, default_value_t = 20_000)]
    events: usize,
    /// Seeds per grid point.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: TomographyError| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Reconstruct(args) => reconstruct(args),
        Command::Benchmark(args) => benchmark(args),
        Command::Condition(args) => condition(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    if !(1..=8).contains(&args.qubits) {
        return Err(TomographyError::InvalidArgument(format!("qubits must lie in 1..=8, got {}", args.qubits)));
    }
    let dist = args.dist.distribution()?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let truth = random_ginibre_state(1 << args.qubits, &mut rng);
    let mut record = if args.qubits == 1 {
        simulate_sparse_record(&truth, args.events, &dist, args.phi, &mut rng)?
    } else {
        simulate_multiqubit_record(&truth, args.events, &dist, &mut rng)?
    };
    record.meta_mut().seed = Some(args.seed);
    if let Some(Binning::Bins(n)) = args.binning.binning() {
        record = coarse_grain(&record, n)?;
    }
    match args.out {
        Some(path) => save_record(&record, &path),
        None => write_stdout(record_to_string(&record).as_bytes()),
    }
}

fn reconstruct(args: ReconstructArgs) -> Result<()> {
    let mut record = load_record(&args.input)?;
    if let Some(n) = args.bins {
        record = coarse_grain(&record, n)?;
    }
    let mut cfg = ExperimentConfig {
        qubits: record.qubits(),
        algorithm: args.algorithm,
        ..ExperimentConfig::default()
    };
    cfg.bayes.particles = args.particles;
    cfg.bayes.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (estimate, seconds) = reconstruct_record(&cfg, &record, &mut rng)?;
    let m = estimate.matrix();
    let mut text = format!("algorithm {}\nseconds {seconds:.6}\n", args.algorithm);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:+.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        text.push_str(&row.join("  "));
        text.push('\n');
    }
    let inf = match &record.meta().truth {
        Some(truth) => Some(infidelity(&estimate, truth)?),
        None => None,
    };
    if let Some(inf) = inf {
        text.push_str(&format!("infidelity {inf:.6e}\n"));
    }
    write_stdout(text.as_bytes())?;
    if let Some(path) = args.out {
        let entries: Vec<[f64; 2]> = m.transpose().iter().map(|z| [z.re, z.im]).collect();
        let doc = serde_json::json!({
            "algorithm": args.algorithm,
            "dim": m.nrows(),
            "estimate": entries,
            "infidelity": inf,
            "seconds": seconds,
        });
        write_file(&path, serde_json::to_string_pretty(&doc).expect("json value").as_bytes())?;
    }
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> Result<()> {
    let mut plan = match &args.config {
        Some(path) => BenchmarkPlan::load(path)?,
        None => BenchmarkPlan::single(ExperimentConfig::default()),
    };
    let base = &mut plan.base;
    if let Some(a) = args.algorithm {
        base.algorithm = a;
    }
    if let Some(q) = args.qubits {
        base.qubits = q;
    }
    if let Some(n) = args.events {
        base.events = n;
    }
    if let Some(b) = args.binning.binning() {
        base.binning = b;
    }
    if args.dist.is_some() || args.param.is_some() {
        let kind = args.dist.as_deref().unwrap_or(base.distribution.kind());
        let param = match kind {
            "uniform" => None,
            _ => args.param.or(base.distribution.param()).or(Some(PI / 8.0)),
        };
        base.distribution = PhaseDistribution::from_parts(kind, param)?;
    }
    if let Some(t) = args.trials {
        base.trials = t;
    }
    if let Some(s) = args.seed {
        base.master_seed = s;
    }
    base.validate()?;

    let reports = run_benchmark(&plan)?;
    let rows: Vec<_> = reports.iter().map(|r| r.summary.clone()).collect();
    for r in &reports {
        let failed = r.trials.iter().filter(|t| !t.is_ok()).count();
        if failed > 0 {
            eprintln!("warning: {failed} of {} trials failed for {:?}", r.trials.len(), r.summary);
        }
    }
    match &args.out {
        Some(path) => emit_csv(&rows, path)?,
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    if let Some(path) = &args.json {
        emit_json(&reports, path)?;
    }
    Ok(())
}

fn condition(args: ConditionArgs) -> Result<()> {
    let params = if args.param.is_empty() {
        [1.0 / 16.0, 1.0 / 8.0, 0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|f| f * PI).collect()
    } else {
        args.param
    };
    let rows = condition_sweep(&ConditionSweep {
        dist_kind: args.dist,
        params,
        equatorial: args.events,
        seeds: args.trials,
        master_seed: args.seed,
    })?;
    match &args.out {
        Some(path) => emit_condition_csv(&rows, path),
        None => write_condition_csv(&rows, std::io::stdout().lock()),
    }
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    std::io::stdout()
        .lock()
        .write_all(bytes)
        .map_err(|e| TomographyError::Io { path: "<stdout>".into(), source: e })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| TomographyError::Io { path: path.into(), source: e })
}
