//! `caradory` — generate instances, run the Frank-Wolfe solver family, and
//! emit plot-ready traces, benchmark tables, and convergence-bound reports.
//!
//! Exit codes for `solve`: 0 when the run converged, 2 when it hit its
//! iteration cap (or stalled), 1 on any input or configuration error.

mod bench;
mod build;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use caradory::instances::{lower_bound_cardinality, minimal_cardinality, oracle_distance, LowerBoundCurve};
use caradory::solvers::{projection_solve, ProjectionReference};
use caradory::{Algorithm, Status, StepRule};

use build::{build_instance, default_max_iter, GenArgs};
use output::{write_bounds_report, write_trace};

#[derive(Parser)]
#[command(
    name = "caradory",
    version,
    about = "Sparse approximate convex decompositions and lp-projections via Frank-Wolfe",
    after_help = "Environment:\n  CARADORY_THREADS  overrides the bench worker count\n\n\
Defaults are printed in each flag's help text and echoed in trace headers."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one instance and write its trace.
    Solve(SolveArgs),
    /// Fan out solves over algorithms × seeds × exponents and tabulate
    /// cardinalities at an accuracy threshold.
    Bench(bench::BenchArgs),
    /// Emit a Hadamard lower-bound instance as JSON.
    Hadamard(HadamardArgs),
    /// Emit the cardinality lower-bound curve ε(s) = sqrt(1/s − 1/n).
    LowerBound(LowerBoundArgs),
    /// Certified distance and minimal cardinality for a small instance.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoFlag {
    /// Frank-Wolfe, closed-loop steps.
    Fw,
    /// Frank-Wolfe, open-loop 2/(t+2) steps.
    FwOpen,
    /// Nearest-extreme-point oracle, open loop.
    NepFw,
    /// Fully-corrective.
    Fcfw,
    /// Away steps, closed loop.
    Afw,
    /// Hybrid conditional gradient smoothing (p in [1,2) or inf).
    Hcgs,
    /// Frank-Wolfe on the fixed Moreau envelope (p in [1,2) or inf).
    SmoothedFw,
}

impl AlgoFlag {
    pub fn algorithm(self) -> Algorithm {
        match self {
            AlgoFlag::Fw | AlgoFlag::FwOpen => Algorithm::Fw,
            AlgoFlag::NepFw => Algorithm::NepFw,
            AlgoFlag::Fcfw => Algorithm::Fcfw,
            AlgoFlag::Afw => Algorithm::Afw,
            AlgoFlag::Hcgs => Algorithm::Hcgs,
            AlgoFlag::SmoothedFw => Algorithm::SmoothedFw,
        }
    }

    pub fn step(self) -> StepRule {
        match self {
            AlgoFlag::Fw | AlgoFlag::Afw => StepRule::ClosedLoop,
            _ => StepRule::OpenLoop,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatFlag {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BoundFlag {
    /// 2LD²/(t+2) (open loop) or 4LD²/(t+2) (closed loop).
    Thm1,
    /// Interior-target linear rate; needs --mu and --r-const.
    Thm2,
    /// Exterior minimizers on a strongly convex set; needs --alpha and --c-const.
    Thm3,
    /// Strongly convex set + gradient domination; needs --alpha and --mu.
    Thm4,
    /// 4G₂D₂/sqrt(t+1) for the smoothing solver.
    Thm7,
    /// Fixed-smoothing envelope 2D₂²/(β(t+2)) + βG₂²/2.
    Thm8,
    /// LD²/2, the first-iterate bound.
    Lemma2,
}

/// Constants that some bound reports need; missing ones produce an error
/// naming the field.
#[derive(Args, Clone, Copy, Debug, Default)]
pub struct BoundConstants {
    /// Gradient-domination constant μ (1 for the squared lp objective).
    #[arg(long, help_heading = "Bound constants")]
    mu: Option<f64>,
    /// Sharpness constant σ.
    #[arg(long, help_heading = "Bound constants")]
    sigma: Option<f64>,
    /// Interior-ball radius r around the target.
    #[arg(long = "r-const", help_heading = "Bound constants")]
    r_const: Option<f64>,
    /// Lower bound c on the dual gradient norm over the set.
    #[arg(long = "c-const", help_heading = "Bound constants")]
    c_const: Option<f64>,
    /// (Uniform) convexity constant α of the set.
    #[arg(long, help_heading = "Bound constants")]
    alpha: Option<f64>,
    /// Uniform-convexity power q of the set.
    #[arg(long = "q-uc", help_heading = "Bound constants")]
    q_uc: Option<f64>,
    /// Diameter of the smallest vertex subset containing the target.
    #[arg(long = "d-star", help_heading = "Bound constants")]
    d_star: Option<f64>,
    /// Diameter of the sublevel vertex set of the start point.
    #[arg(long = "d0", help_heading = "Bound constants")]
    d_0: Option<f64>,
}

impl BoundConstants {
    pub fn theory_bounds(&self) -> caradory::TheoryBounds {
        caradory::TheoryBounds {
            mu: self.mu,
            sigma: self.sigma,
            r: self.r_const,
            c: self.c_const,
            alpha: self.alpha,
            q_uc: self.q_uc,
            d_star: self.d_star,
            d_0: self.d_0,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Algorithm to run.
    #[arg(long, value_enum)]
    algo: AlgoFlag,
    /// Norm exponent: a float in [1, inf) or `inf` [default: 2].
    #[arg(long, default_value = "2", value_parser = caradory::serde_p::parse)]
    p: f64,
    /// Target accuracy in the lp-norm.
    #[arg(long)]
    epsilon: f64,
    #[command(flatten)]
    gen: GenArgs,
    /// Iteration cap [default: 10 × the theorem-implied iteration count].
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Output path [default: trace.csv or trace.json].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace format.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatFlag,
    /// Projection mode: the target may lie outside the set; gaps are
    /// reported against the known distance when available.
    #[arg(long)]
    project: bool,
    /// Also write a per-iteration convergence-bound report next to the trace.
    #[arg(long, value_enum)]
    bound: Option<BoundFlag>,
    #[command(flatten)]
    constants: BoundConstants,
}

#[derive(Args)]
struct HadamardArgs {
    /// Dimension (a power of two).
    #[arg(long)]
    n: usize,
    /// Norm exponent used to scale the columns [default: 2].
    #[arg(long, default_value = "2", value_parser = caradory::serde_p::parse)]
    p: f64,
    /// Output path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LowerBoundArgs {
    /// Hadamard dimension (a power of two).
    #[arg(long)]
    n: usize,
    /// Also print the cardinality bound 1/(ε² + 1/n) at this accuracy.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output path for the s,epsilon curve [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    gen: GenArgs,
    /// Norm exponent for the distance (must lie in [2, inf)) [default: 2].
    #[arg(long, default_value = "2", value_parser = caradory::serde_p::parse)]
    p: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => bench::run_bench(args),
        Command::Hadamard(args) => run_hadamard(args),
        Command::LowerBound(args) => run_lower_bound(args),
        Command::Oracle(args) => run_oracle(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run_solve(args: SolveArgs) -> caradory::Result<ExitCode> {
    let mut gen = args.gen.clone();
    gen.gen_outside |= args.project;
    let instance = build_instance(&gen, args.p)?;
    let spec = instance.objective()?;
    let mut config = caradory::SolverConfig::new(args.algo.algorithm(), args.epsilon)
        .with_step(args.algo.step())
        .with_seed(args.gen.seed);
    config.max_iter = args
        .max_iter
        .unwrap_or_else(|| default_max_iter(args.algo, &instance, args.epsilon));
    config.validate(&spec)?;

    let solution = if args.project {
        let reference = ProjectionReference {
            dist_p: instance.known_distance,
            proj2: instance.known_proj2.clone(),
        };
        let (solution, report) = projection_solve(&instance.set, &spec, &config, Some(&reference))?;
        println!("projection gap reference: {:?}", report.reference);
        solution
    } else {
        caradory::solvers::solve(&instance.set, &spec, &config)?
    };

    let out = args
        .out
        .unwrap_or_else(|| match args.format {
            FormatFlag::Csv => PathBuf::from("trace.csv"),
            FormatFlag::Json => PathBuf::from("trace.json"),
        });
    write_trace(&solution, args.format, &out)?;
    if let Some(bound) = args.bound {
        write_bounds_report(&solution.trace, bound, &args.constants, &out)?;
    }

    let last = solution.trace.final_row();
    let accuracy = match spec.mode() {
        caradory::Mode::SmoothSquared => (2.0 * last.f_value).sqrt(),
        caradory::Mode::NonsmoothNorm => last.f_value,
    };
    println!(
        "status: {:?}  iterations: {}  cardinality: {}  accuracy: {:.6e}  trace: {}",
        solution.trace.status,
        last.t,
        solution.combination.cardinality(),
        accuracy,
        out.display()
    );

    Ok(match solution.trace.status {
        Status::Converged => ExitCode::SUCCESS,
        Status::IterCap | Status::Degenerate => ExitCode::from(2),
    })
}

fn run_hadamard(args: HadamardArgs) -> caradory::Result<ExitCode> {
    let inst = caradory::instances::hadamard_instance(args.n, args.p)?;
    let json = inst.to_json_string()?;
    match args.out {
        Some(path) => std::fs::write(path, json)?,
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_lower_bound(args: LowerBoundArgs) -> caradory::Result<ExitCode> {
    let curve = LowerBoundCurve::new(args.n)?;
    let mut out = String::from("s,epsilon\n");
    for (s, eps) in curve.points() {
        out.push_str(&format!("{s},{eps}\n"));
    }
    match args.out {
        Some(path) => std::fs::write(path, out)?,
        None => print!("{out}"),
    }
    if let Some(eps) = args.epsilon {
        println!(
            "cardinality bound at epsilon {eps}: {}",
            lower_bound_cardinality(args.n, eps)?
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run_oracle(args: OracleArgs) -> caradory::Result<ExitCode> {
    let instance = build_instance(&args.gen, args.p)?;
    let vertices = instance.set.as_vertices().ok_or_else(|| {
        caradory::Error::Input("the oracle needs an explicit vertex list, not a ball".into())
    })?;
    let distance = oracle_distance(vertices, &instance.target, args.p)?;
    let cardinality = if vertices.len() <= 12 {
        Some(minimal_cardinality(vertices, &instance.target)?)
    } else {
        None
    };
    let report = serde_json::json!({
        "distance_lower": distance.lower,
        "distance_upper": distance.upper,
        "certificate_gap": distance.certificate_gap,
        "minimal_cardinality": cardinality.as_ref().map(|c| c.cardinality),
        "witness_subset": cardinality.as_ref().map(|c| c.subset.clone()),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}
