//! Instance construction shared by the subcommands: load a JSON instance
//! file or generate one from flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use caradory::geometry::DerivedConstants;
use caradory::instances::{ball_instance, gen_random_polytope, hadamard_instance};
use caradory::solvers::smoothed_fw_budget;
use caradory::{Error, InstanceDescriptor, Result};

use crate::AlgoFlag;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GenFlag {
    /// Gaussian vertices with a planted Dirichlet target over a k-subset.
    Random,
    /// lp-normalized Hadamard columns with the uniform-combination target.
    Hadamard,
    /// lq ball around the origin; the target sits at radius/2 on the first
    /// axis, or at 2·radius with --project.
    Ball,
}

#[derive(Args, Clone, Debug)]
pub struct GenArgs {
    /// JSON instance file (mutually exclusive with --gen).
    #[arg(long, conflicts_with = "gen")]
    pub instance: Option<PathBuf>,
    /// Generate the instance instead of loading it.
    #[arg(long, value_enum)]
    pub gen: Option<GenFlag>,
    /// Ambient dimension (random/ball); Hadamard dimension (power of two).
    /// The full-scale reference configuration is --n 500 --m 501 --k 25.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of vertices (random).
    #[arg(long, default_value_t = 101)]
    pub m: usize,
    /// Planted support size of the target (random).
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Ball exponent in [2, inf) (ball).
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Ball radius (ball).
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Seed for instance generation and solver start points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Place the ball target outside the set (projection mode geometry).
    #[arg(long, default_value_t = false, hide = true)]
    pub gen_outside: bool,
}

pub fn build_instance(args: &GenArgs, p: f64) -> Result<InstanceDescriptor> {
    if let Some(path) = &args.instance {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Input(format!("cannot read instance file {}: {e}", path.display()))
        })?;
        let inst = InstanceDescriptor::from_json_str(&text)
            .map_err(|e| Error::Input(format!("malformed instance {}: {e}", path.display())))?;
        return Ok(inst.with_p(p));
    }
    match args.gen {
        Some(GenFlag::Random) => Ok(gen_random_polytope(args.n, args.m, args.k, args.seed).with_p(p)),
        Some(GenFlag::Hadamard) => hadamard_instance(args.n, p),
        Some(GenFlag::Ball) => {
            let mut target = vec![0.0; args.n];
            target[0] = if args.gen_outside {
                2.0 * args.radius
            } else {
                0.5 * args.radius
            };
            ball_instance(args.q, args.radius, target, p)
        }
        None => Err(Error::Input(
            "either --instance <path> or --gen {random|hadamard|ball} is required".into(),
        )),
    }
}

/// Default iteration cap: ten times the theorem-implied iteration count for
/// the algorithm's rate at this accuracy.
pub fn default_max_iter(algo: AlgoFlag, instance: &InstanceDescriptor, epsilon: f64) -> usize {
    let consts = DerivedConstants::for_set(&instance.set, instance.p);
    let l = consts.smoothness.max(1.0);
    let implied = match algo {
        // closed loop: 4LD²/(t+2) ≤ ε²/2
        AlgoFlag::Fw | AlgoFlag::Afw | AlgoFlag::Fcfw => {
            8.0 * l * consts.d_p * consts.d_p / (epsilon * epsilon)
        }
        // open loop: 2LD²/(t+2) ≤ ε²/2, NEP uses the l2 diameter
        AlgoFlag::FwOpen => 4.0 * l * consts.d_p * consts.d_p / (epsilon * epsilon),
        AlgoFlag::NepFw => 4.0 * l * consts.d_2 * consts.d_2 / (epsilon * epsilon),
        // 4G₂D₂/sqrt(t+1) ≤ ε
        AlgoFlag::Hcgs => {
            let r = 4.0 * consts.lipschitz_l2 * consts.d_2 / epsilon;
            r * r
        }
        AlgoFlag::SmoothedFw => {
            smoothed_fw_budget(consts.lipschitz_l2, consts.d_2, epsilon) as f64
        }
    };
    let capped = (10.0 * implied.max(1.0)).min(50_000_000.0);
    capped.ceil() as usize
}
