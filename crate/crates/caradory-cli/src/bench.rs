//! The bench subcommand: independent solves fanned out over a worker pool,
//! tabulated by (algorithm, p, seed) in a fixed order regardless of which
//! worker finishes first.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::Args;

use caradory::geometry::DerivedConstants;
use caradory::instances::LowerBoundCurve;
use caradory::objectives::Mode;
use caradory::{Result, SolverConfig};

use crate::build::{build_instance, default_max_iter, GenArgs, GenFlag};
use crate::AlgoFlag;

#[derive(Args)]
pub struct BenchArgs {
    /// Algorithms to compare (comma-separated).
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    algo: Vec<AlgoFlag>,
    /// Norm exponents (comma-separated floats or `inf`) [default: 2].
    #[arg(long, value_delimiter = ',', default_value = "2", value_parser = caradory::serde_p::parse)]
    p: Vec<f64>,
    /// Seeds (comma-separated) [default: 0].
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    /// Accuracy threshold for the cardinality table.
    #[arg(long, default_value_t = 0.02)]
    epsilon: f64,
    #[command(flatten)]
    gen: GenArgs,
    /// Iteration cap per solve [default: 10 × the theorem-implied count].
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Output stem: writes <stem>.csv plus per-run curve files.
    #[arg(long, default_value = "bench")]
    out: PathBuf,
    /// Worker count [default: CARADORY_THREADS or the number of logical CPUs].
    #[arg(long)]
    threads: Option<usize>,
}

struct JobResult {
    line: String,
    curve_name: String,
    curve: String,
}

pub fn run_bench(args: BenchArgs) -> Result<ExitCode> {
    let mut jobs: Vec<(AlgoFlag, f64, u64)> = Vec::new();
    for &a in &args.algo {
        for &p in &args.p {
            for &s in &args.seeds {
                jobs.push((a, p, s));
            }
        }
    }

    let workers = args
        .threads
        .or_else(|| {
            std::env::var("CARADORY_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<JobResult>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..workers.min(jobs.len()).max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let (algo, p, seed) = jobs[i];
                let outcome = run_single(&args, algo, p, seed);
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });

    let mut table = String::from(
        "algorithm,p,seed,threshold,cardinality_at_threshold,iteration_at_threshold,\
         terminal_cardinality,terminal_accuracy,status\n",
    );
    for slot in results.into_inner().unwrap() {
        let job = slot.expect("every job ran")?;
        table.push_str(&job.line);
        let path = args.out.with_file_name(job.curve_name);
        std::fs::write(path, job.curve)?;
    }
    let table_path = args.out.with_extension("csv");
    std::fs::write(&table_path, &table)?;
    print!("{table}");
    println!("table: {}", table_path.display());

    if matches!(args.gen.gen, Some(GenFlag::Hadamard)) {
        let curve = LowerBoundCurve::new(args.gen.n)?;
        let mut text = String::from("s,epsilon\n");
        for (s, eps) in curve.points() {
            text.push_str(&format!("{s},{eps}\n"));
        }
        let path = args.out.with_file_name(format!(
            "{}_lower_bound.csv",
            args.out.file_stem().unwrap_or_default().to_string_lossy()
        ));
        std::fs::write(&path, text)?;
        println!("lower-bound curve: {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_single(args: &BenchArgs, algo: AlgoFlag, p: f64, seed: u64) -> Result<JobResult> {
    let mut gen = args.gen.clone();
    gen.seed = seed;
    let instance = build_instance(&gen, p)?;
    let spec = instance.objective()?;
    let mut config = SolverConfig::new(algo.algorithm(), args.epsilon)
        .with_step(algo.step())
        .with_seed(seed);
    config.max_iter = args
        .max_iter
        .unwrap_or_else(|| default_max_iter(algo, &instance, args.epsilon));
    config.validate(&spec)?;
    let solution = caradory::solvers::solve(&instance.set, &spec, &config)?;

    let accuracy_of = |f: f64| match spec.mode() {
        Mode::SmoothSquared => (2.0 * f).sqrt(),
        Mode::NonsmoothNorm => f,
    };
    let hit = solution
        .trace
        .rows
        .iter()
        .find(|r| accuracy_of(r.f_value) <= args.epsilon);

    let mut curve = String::from("t,cardinality,accuracy\n");
    for row in &solution.trace.rows {
        curve.push_str(&format!(
            "{},{},{}\n",
            row.t,
            row.cardinality,
            accuracy_of(row.f_value)
        ));
    }
    let p_label = if p.is_finite() { p.to_string() } else { "inf".into() };
    let algo_label = format!("{algo:?}").to_lowercase();
    let curve_name = format!(
        "{}_curve_{algo_label}_p{p_label}_s{seed}.csv",
        args.out.file_stem().unwrap_or_default().to_string_lossy()
    );

    let last = solution.trace.final_row();
    let line = format!(
        "{algo_label},{p_label},{seed},{},{},{},{},{},{:?}\n",
        args.epsilon,
        hit.map(|r| r.cardinality.to_string()).unwrap_or_default(),
        hit.map(|r| r.t.to_string()).unwrap_or_default(),
        solution.combination.cardinality(),
        accuracy_of(last.f_value),
        solution.trace.status,
    );

    // touch the derived constants so mis-specified instances fail loudly here
    let _ = DerivedConstants::for_set(&instance.set, p);
    Ok(JobResult {
        line,
        curve_name,
        curve,
    })
}
