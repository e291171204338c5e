//! The solver family: Frank-Wolfe with open- and closed-loop steps, the
//! nearest-extreme-point variant, the fully-corrective and away-step
//! variants, hybrid conditional gradient smoothing for nonsmooth exponents,
//! and the fixed-smoothing driver. Every solve returns a sparse
//! decomposition plus a per-iteration trace, and theorem right-hand sides
//! can be evaluated against any trace.

mod afw;
mod engine;
mod fcfw;
mod fw;
mod hcgs;
mod nep;
mod projection;
mod trace;

pub use afw::afw_solve;
pub use fcfw::{fcfw_correction, fcfw_solve, CorrectionResult};
pub use fw::{fw_solve, step_closed_loop, step_open_loop};
pub use hcgs::{hcgs_solve, smoothed_fw_budget, smoothed_fw_solve};
pub use nep::nep_fw_solve;
pub use projection::{projection_solve, GapReference, GapReport, ProjectionReference};
pub use trace::{RunTrace, Status, TraceJson, TraceMeta, TraceRow, CSV_COLUMNS};

pub(crate) use fcfw::minimize_over_hull;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexCombination, FeasibleSet};
use crate::objectives::{Mode, ObjectiveSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    Fw,
    NepFw,
    Fcfw,
    Afw,
    Hcgs,
    SmoothedFw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepRule {
    /// `γ_t = 2/(t+2)`.
    OpenLoop,
    /// Clipped ratio from the smoothness upper bound; needs `L`.
    ClosedLoop,
}

/// Where the first iterate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartRule {
    /// Vertex of smallest index (deterministic default).
    FirstVertex,
    /// Uniform seeded draw from the vertex list.
    RandomVertex,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub step: StepRule,
    /// Target accuracy in the ℓp-norm of the objective.
    pub epsilon: f64,
    pub max_iter: usize,
    /// Overrides the smoothness constant `p − 1` in closed-loop steps and
    /// NEP penalties.
    pub l_override: Option<f64>,
    pub seed: u64,
    /// Frank-Wolfe gap target for the fully-corrective reoptimization;
    /// defaults to `min(1e-12, (ε/10)²)`.
    pub inner_tolerance: Option<f64>,
    pub start: StartRule,
    /// Keep a copy of every iterate (needed for projection gap reports).
    pub record_iterates: bool,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, epsilon: f64) -> Self {
        let step = match algorithm {
            Algorithm::Fw | Algorithm::Afw => StepRule::ClosedLoop,
            Algorithm::NepFw | Algorithm::Hcgs | Algorithm::SmoothedFw | Algorithm::Fcfw => {
                StepRule::OpenLoop
            }
        };
        Self {
            algorithm,
            step,
            epsilon,
            max_iter: 100_000,
            l_override: None,
            seed: 0,
            inner_tolerance: None,
            start: StartRule::FirstVertex,
            record_iterates: false,
        }
    }

    pub fn with_step(mut self, step: StepRule) -> Self {
        self.step = step;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_l_override(mut self, l: f64) -> Self {
        self.l_override = Some(l);
        self
    }

    pub fn with_inner_tolerance(mut self, tol: f64) -> Self {
        self.inner_tolerance = Some(tol);
        self
    }

    pub fn with_start(mut self, start: StartRule) -> Self {
        self.start = start;
        self
    }

    pub fn with_record_iterates(mut self, yes: bool) -> Self {
        self.record_iterates = yes;
        self
    }

    pub fn inner_tolerance(&self) -> f64 {
        self.inner_tolerance
            .unwrap_or_else(|| 1e-12f64.min((self.epsilon / 10.0).powi(2)))
    }

    /// Checks the algorithm/step/mode compatibility rules.
    pub fn validate(&self, spec: &ObjectiveSpec) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        match self.algorithm {
            Algorithm::Hcgs | Algorithm::SmoothedFw => {
                if spec.mode() != Mode::NonsmoothNorm {
                    return Err(Error::Config(format!(
                        "{:?} requires p in [1,2) or inf, got p={}",
                        self.algorithm,
                        spec.p()
                    )));
                }
                if self.step != StepRule::OpenLoop {
                    return Err(Error::Config(format!(
                        "{:?} uses open-loop steps only",
                        self.algorithm
                    )));
                }
            }
            Algorithm::NepFw => {
                if self.step != StepRule::OpenLoop {
                    return Err(Error::Config("nep-fw uses open-loop steps only".into()));
                }
                if spec.mode() != Mode::SmoothSquared {
                    return Err(Error::Config(format!(
                        "nep-fw requires p in [2, inf), got p={}",
                        spec.p()
                    )));
                }
            }
            Algorithm::Afw => {
                if spec.mode() != Mode::SmoothSquared {
                    return Err(Error::Config(format!(
                        "afw requires p in [2, inf), got p={}",
                        spec.p()
                    )));
                }
            }
            Algorithm::Fw | Algorithm::Fcfw => {
                if spec.mode() != Mode::SmoothSquared {
                    return Err(Error::Config(format!(
                        "{:?} requires p in [2, inf); use hcgs or smoothed-fw for p={}",
                        self.algorithm,
                        spec.p()
                    )));
                }
            }
        }
        if self.step == StepRule::ClosedLoop && spec.mode() != Mode::SmoothSquared {
            return Err(Error::Config(
                "closed-loop steps need the smooth squared objective".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a solve: the decomposition, the trace, selected ball boundary
/// points when the feasible set is a ball, and optionally every iterate.
#[derive(Clone, Debug)]
pub struct Solution {
    pub combination: ConvexCombination,
    pub trace: RunTrace,
    pub ball_atoms: Option<Vec<Vec<f64>>>,
    pub iterates: Option<Vec<Vec<f64>>>,
}

impl Solution {
    pub fn to_trace_json(&self) -> TraceJson {
        TraceJson {
            meta: self.trace.meta.clone(),
            rows: self.trace.rows.clone(),
            status: self.trace.status,
            combination: self.combination.clone(),
            ball_atoms: self.ball_atoms.clone(),
        }
    }
}

/// Runs the configured algorithm in target-inside-the-set mode.
pub fn solve(set: &FeasibleSet, spec: &ObjectiveSpec, config: &SolverConfig) -> Result<Solution> {
    match config.algorithm {
        Algorithm::Fw => fw_solve(set, spec, config),
        Algorithm::NepFw => nep_fw_solve(set, spec, config),
        Algorithm::Fcfw => fcfw_solve(set, spec, config),
        Algorithm::Afw => afw_solve(set, spec, config),
        Algorithm::Hcgs => hcgs_solve(set, spec, config),
        Algorithm::SmoothedFw => smoothed_fw_solve(set, spec, config),
    }
}

/// Identifiers for the convergence-rate right-hand sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremId {
    /// `2LD²/(t+2)` (open loop).
    Thm1Open,
    /// `4LD²/(t+2)` (closed loop).
    Thm1Closed,
    /// `LD²/2` — the bound on the first iterate, constant in `t`.
    Lemma2,
    /// Interior target, linear rate `LD²/2 · (1 − (μ/L)(r/D)²)^{t−1}`.
    Thm2Interior,
    /// Exterior minimizers on a strongly convex set:
    /// `LD²/2 · (1 − min{1/2, αc/(4L)})^{t−1}`.
    Thm3Exterior,
    /// Strongly convex set + gradient domination:
    /// `max{(9/2)LD², 144(L/α)²/μ} / (t+2)²`.
    Thm4StrongGd,
    /// Uniformly convex set (`q > 2`) with exterior minimizers.
    Thm5UniformExterior,
    /// Uniformly convex set (`q ≥ 2`) + sharp objective.
    Thm6UniformSharp,
    /// HCGS: `4G₂D₂/√(t+1)` for `t ≥ 2`.
    Thm7Hcgs,
    /// Smoothed FW at fixed `β = ε/G₂²`: `2D₂²/(β(t+2)) + βG₂²/2`.
    Thm8SmoothedFw,
    /// NEP oracle rate `2L(D_*² + D₀²)/(t+2)`.
    NepRate,
}

/// Optional problem constants for bound evaluation. Everything not derivable
/// from the trace itself lives here.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TheoryBounds {
    /// Gradient-domination constant (1 for the ℓp² objective).
    pub mu: Option<f64>,
    /// Sharpness constant (√2 for the ℓp² objective).
    pub sigma: Option<f64>,
    /// Radius of a ball centered at the target and contained in the set.
    pub r: Option<f64>,
    /// Lower bound on the dual gradient norm over the set.
    pub c: Option<f64>,
    /// (Uniform) convexity constant of the set.
    pub alpha: Option<f64>,
    /// Uniform-convexity power of the set.
    pub q_uc: Option<f64>,
    /// Diameter of the smallest vertex subset whose hull holds the target.
    pub d_star: Option<f64>,
    /// Diameter of the sublevel vertex set of the start point.
    pub d_0: Option<f64>,
}

fn need(v: Option<f64>, name: &'static str) -> Result<f64> {
    match v {
        Some(x) if x > 0.0 => Ok(x),
        Some(x) => Err(Error::Config(format!("constant `{name}` must be positive, got {x}"))),
        None => Err(Error::MissingConstant(name)),
    }
}

/// `β₁` of the uniform-convexity rates, with exponent `e = (q−2)/q` for the
/// exterior variant and `e = (q−1)/q` for the sharpness variant.
fn uniform_beta1(e: f64) -> f64 {
    (2.0 - 2f64.powf(e)) / (2f64.powf(e) - 1.0)
}

/// Evaluates the selected theorem right-hand side at every trace row.
pub fn evaluate_bound(
    trace: &RunTrace,
    bounds: &TheoryBounds,
    which: TheoremId,
) -> Result<Vec<f64>> {
    let l = trace.meta.smoothness;
    let d = trace.meta.constants.d_p;
    let d2 = trace.meta.constants.d_2;
    let g2 = trace.meta.constants.lipschitz_l2;
    let at = |f: &dyn Fn(f64) -> f64| trace.rows.iter().map(|r| f(r.t as f64)).collect();

    Ok(match which {
        TheoremId::Thm1Open => at(&|t| 2.0 * l * d * d / (t + 2.0)),
        TheoremId::Thm1Closed => at(&|t| 4.0 * l * d * d / (t + 2.0)),
        TheoremId::Lemma2 => at(&|_| l * d * d / 2.0),
        TheoremId::Thm2Interior => {
            let mu = need(bounds.mu, "mu")?;
            let r = need(bounds.r, "r")?;
            let rate = 1.0 - (mu / l) * (r / d) * (r / d);
            at(&|t| l * d * d / 2.0 * rate.powf((t - 1.0).max(0.0)))
        }
        TheoremId::Thm3Exterior => {
            let alpha = need(bounds.alpha, "alpha")?;
            let c = need(bounds.c, "c")?;
            let rate = 1.0 - (0.5f64).min(alpha * c / (4.0 * l));
            at(&|t| l * d * d / 2.0 * rate.powf((t - 1.0).max(0.0)))
        }
        TheoremId::Thm4StrongGd => {
            let alpha = need(bounds.alpha, "alpha")?;
            let mu = need(bounds.mu, "mu")?;
            let num = (4.5 * l * d * d).max(144.0 * (l / alpha) * (l / alpha) / mu);
            at(&|t| num / ((t + 2.0) * (t + 2.0)))
        }
        TheoremId::Thm5UniformExterior => {
            let alpha = need(bounds.alpha, "alpha")?;
            let c = need(bounds.c, "c")?;
            let q = need(bounds.q_uc, "q_uc")?;
            if q <= 2.0 {
                return Err(Error::Config(format!(
                    "the exterior uniform-convexity rate needs q_uc > 2, got {q}"
                )));
            }
            let e = (q - 2.0) / q;
            let b1 = uniform_beta1(e);
            let b2 = e - (2.0 / q) * (2f64.powf(e) - 1.0);
            if b1 <= 0.0 || b2 <= 0.0 {
                return Err(Error::Config(format!(
                    "derived rate constants must be positive (beta1={b1}, beta2={b2})"
                )));
            }
            let expo = q / (q - 2.0);
            let num = (l * d * d / 2.0 * (1.0 + b1).powf(expo))
                .max(4.0 * (l / b2).powf(expo) * (4.0 / (alpha * c)).powf(2.0 / (q - 2.0)));
            at(&|t| num / (t + b1).powf(expo))
        }
        TheoremId::Thm6UniformSharp => {
            let alpha = need(bounds.alpha, "alpha")?;
            let sigma = need(bounds.sigma, "sigma")?;
            let q = need(bounds.q_uc, "q_uc")?;
            if q < 2.0 {
                return Err(Error::Config(format!(
                    "the sharpness uniform-convexity rate needs q_uc >= 2, got {q}"
                )));
            }
            let e = (q - 1.0) / q;
            let b1 = uniform_beta1(e);
            let b2 = e - (1.0 / q) * (2f64.powf(e) - 1.0);
            if b1 <= 0.0 || b2 <= 0.0 {
                return Err(Error::Config(format!(
                    "derived rate constants must be positive (beta1={b1}, beta2={b2})"
                )));
            }
            let expo = q / (q - 1.0);
            let num = (l * d * d / 2.0 * (1.0 + b1).powf(expo))
                .max(2.0 * (l / b2).powf(expo) * (sigma / alpha).powf(2.0 / (q - 1.0)));
            at(&|t| num / (t + b1).powf(expo))
        }
        TheoremId::Thm7Hcgs => at(&|t| {
            if t < 2.0 {
                f64::INFINITY
            } else {
                4.0 * g2 * d2 / (t + 1.0).sqrt()
            }
        }),
        TheoremId::Thm8SmoothedFw => {
            let beta = trace.meta.epsilon / (g2 * g2);
            at(&|t| 2.0 * d2 * d2 / (beta * (t + 2.0)) + beta * g2 * g2 / 2.0)
        }
        TheoremId::NepRate => {
            let ds = need(bounds.d_star, "d_star")?;
            let d0 = need(bounds.d_0, "d_0")?;
            at(&|t| 2.0 * l * (ds * ds + d0 * d0) / (t + 2.0))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DerivedConstants;

    fn toy_trace(l: f64, d_p: f64, d_2: f64, g_2: f64, ts: &[usize]) -> RunTrace {
        RunTrace {
            meta: TraceMeta {
                algorithm: Algorithm::Fw,
                step: StepRule::OpenLoop,
                p: 2.0,
                mode: Mode::SmoothSquared,
                epsilon: 0.5,
                seed: 0,
                max_iter: 10,
                smoothness: l,
                constants: DerivedConstants {
                    d_p,
                    d_2,
                    smoothness: l,
                    lipschitz_l2: g_2,
                },
            },
            rows: ts
                .iter()
                .map(|&t| TraceRow {
                    t,
                    f_value: 0.0,
                    primal_gap: 0.0,
                    cardinality: 1,
                    gamma: None,
                    beta: None,
                    vertex: None,
                    elapsed_ms: 0.0,
                })
                .collect(),
            status: Status::Converged,
        }
    }

    #[test]
    fn thm1_open_evaluates() {
        let trace = toy_trace(1.0, 1.0, 1.0, 1.0, &[2]);
        let b = evaluate_bound(&trace, &TheoryBounds::default(), TheoremId::Thm1Open).unwrap();
        assert_eq!(b, vec![0.5]);
    }

    #[test]
    fn lemma2_evaluates() {
        let trace = toy_trace(2.0, 3.0, 3.0, 1.0, &[1]);
        let b = evaluate_bound(&trace, &TheoryBounds::default(), TheoremId::Lemma2).unwrap();
        assert_eq!(b, vec![9.0]);
    }

    #[test]
    fn thm7_evaluates() {
        let trace = toy_trace(1.0, 2.0, 2.0, 1.0, &[0, 3]);
        let b = evaluate_bound(&trace, &TheoryBounds::default(), TheoremId::Thm7Hcgs).unwrap();
        assert_eq!(b[0], f64::INFINITY);
        assert_eq!(b[1], 4.0);
    }

    #[test]
    fn missing_constant_is_named() {
        let trace = toy_trace(1.0, 1.0, 1.0, 1.0, &[1]);
        match evaluate_bound(&trace, &TheoryBounds::default(), TheoremId::Thm2Interior) {
            Err(Error::MissingConstant(name)) => assert_eq!(name, "mu"),
            other => panic!("expected missing-constant error, got {other:?}"),
        }
    }

    #[test]
    fn smoothed_budget_example() {
        assert_eq!(smoothed_fw_budget(1.0, 2.0, 0.5), 64);
    }

    #[test]
    fn remaining_bound_formulas_and_guards() {
        let trace = toy_trace(1.0, 1.0, 1.0, 1.0, &[1, 2, 5]);
        // quadratic rate under strong convexity + gradient domination
        let b = evaluate_bound(
            &trace,
            &TheoryBounds {
                alpha: Some(1.0),
                mu: Some(1.0),
                ..Default::default()
            },
            TheoremId::Thm4StrongGd,
        )
        .unwrap();
        assert_eq!(b[0], 144.0 / 9.0);
        assert!(b.windows(2).all(|w| w[1] < w[0]));

        // uniform-convexity variants reject out-of-range powers
        let uc = TheoryBounds {
            alpha: Some(1.0),
            c: Some(1.0),
            sigma: Some(2f64.sqrt()),
            q_uc: Some(2.0),
            ..Default::default()
        };
        assert!(evaluate_bound(&trace, &uc, TheoremId::Thm5UniformExterior).is_err());
        assert!(evaluate_bound(&trace, &uc, TheoremId::Thm6UniformSharp).is_ok());
        let uc4 = TheoryBounds {
            q_uc: Some(4.0),
            ..uc
        };
        let b5 = evaluate_bound(&trace, &uc4, TheoremId::Thm5UniformExterior).unwrap();
        let b6 = evaluate_bound(&trace, &uc4, TheoremId::Thm6UniformSharp).unwrap();
        assert!(b5.iter().all(|x| x.is_finite() && *x > 0.0));
        assert!(b6.iter().all(|x| x.is_finite() && *x > 0.0));
        assert!(b5.windows(2).all(|w| w[1] < w[0]));
        assert!(b6.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn vertex_only_algorithms_reject_balls() {
        let ball = FeasibleSet::Ball(
            crate::geometry::LqBall::new(vec![0.0, 0.0], 1.0, 2.0).unwrap(),
        );
        let spec = ObjectiveSpec::new(vec![0.1, 0.1], 2.0).unwrap();
        for algo in [Algorithm::NepFw, Algorithm::Afw] {
            let cfg = SolverConfig::new(algo, 0.1);
            assert!(
                matches!(solve(&ball, &spec, &cfg), Err(Error::Config(_))),
                "{algo:?} must require an explicit vertex list"
            );
        }
    }

    #[test]
    fn config_validation_rules() {
        let smooth = ObjectiveSpec::new(vec![0.0, 0.0], 2.0).unwrap();
        let nonsmooth = ObjectiveSpec::new(vec![0.0, 0.0], 1.0).unwrap();

        assert!(SolverConfig::new(Algorithm::Hcgs, 0.1).validate(&smooth).is_err());
        assert!(SolverConfig::new(Algorithm::Hcgs, 0.1).validate(&nonsmooth).is_ok());
        assert!(SolverConfig::new(Algorithm::Fw, 0.1).validate(&nonsmooth).is_err());
        assert!(SolverConfig::new(Algorithm::Fw, 0.1).validate(&smooth).is_ok());
        assert!(SolverConfig::new(Algorithm::Fw, -1.0).validate(&smooth).is_err());
        assert!(SolverConfig::new(Algorithm::NepFw, 0.1)
            .with_step(StepRule::ClosedLoop)
            .validate(&smooth)
            .is_err());
    }
}
