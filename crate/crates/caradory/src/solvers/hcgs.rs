//! Nonsmooth exponents (`p ∈ [1,2) ∪ {∞}`): hybrid conditional gradient
//! smoothing and the fixed-smoothing Frank-Wolfe driver. Both replace the
//! gradient with the Moreau-envelope gradient and use open-loop steps; they
//! differ in the smoothing schedule and how the iteration budget is chosen.

use crate::error::Result;
use crate::objectives::{moreau_gradient, SmoothingSchedule};

use super::engine::{Engine, RunOpts};
use super::fw::step_open_loop;
use super::trace::Status;
use super::{FeasibleSet, ObjectiveSpec, Solution, SolverConfig};

/// HCGS: `β_t = 2(D₂/G₂)/√(t+2)` with `D₂` the ℓ2 diameter of the set and
/// `G₂` the ℓ2-Lipschitz constant of the norm objective. Stops when
/// `‖x_t − x*‖_p ≤ ε`.
pub fn hcgs_solve(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
) -> Result<Solution> {
    run_hcgs(set, spec, config, RunOpts::default())
}

pub(crate) fn run_hcgs(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
    opts: RunOpts,
) -> Result<Solution> {
    let mut eng = Engine::new(set, spec, config, opts)?;
    let schedule = SmoothingSchedule::DecayingBeta {
        d_2: eng.consts.d_2,
        g_2: eng.consts.lipschitz_l2,
    };
    run_smoothing_loop(&mut eng, schedule, config.max_iter).map(|status| eng.finish(status))
}

/// Iteration budget `⌊4G₂²D₂²/ε²⌋` of the fixed-smoothing driver.
pub fn smoothed_fw_budget(g_2: f64, d_2: f64, epsilon: f64) -> usize {
    (4.0 * g_2 * g_2 * d_2 * d_2 / (epsilon * epsilon)).floor() as usize
}

/// Frank-Wolfe on the fixed envelope `f_β` with `β = ε/G₂²`, run for the
/// budget `⌊4G₂²D₂²/ε²⌋` (this budget, not `max_iter`, bounds the run —
/// exhausting it already certifies a terminal gap of at most ε). Stops
/// early as soon as `‖x_t − x*‖_p ≤ ε`.
pub fn smoothed_fw_solve(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
) -> Result<Solution> {
    run_smoothed_fw(set, spec, config, RunOpts::default())
}

pub(crate) fn run_smoothed_fw(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
    opts: RunOpts,
) -> Result<Solution> {
    let mut eng = Engine::new(set, spec, config, opts)?;
    let g_2 = eng.consts.lipschitz_l2;
    let budget = smoothed_fw_budget(g_2, eng.consts.d_2, config.epsilon);
    let schedule = SmoothingSchedule::fixed_for_accuracy(config.epsilon, g_2);
    run_smoothing_loop(&mut eng, schedule, budget).map(|status| eng.finish(status))
}

fn run_smoothing_loop(
    eng: &mut Engine<'_>,
    schedule: SmoothingSchedule,
    budget: usize,
) -> Result<Status> {
    for t in 0..=budget {
        let f = eng.objective(&eng.x);
        if eng.primal_converged(f) {
            eng.record(t, f, None, None, None);
            return Ok(Status::Converged);
        }
        if t == budget {
            eng.record(t, f, None, None, None);
            return Ok(Status::IterCap);
        }

        let beta = schedule.beta_at(t);
        let g = moreau_gradient(&eng.x, beta, eng.spec)?;
        let v_idx = match eng.lmo(&g) {
            Ok(idx) => idx,
            Err(crate::error::Error::DegenerateGradient) => {
                // envelope gradient vanished: x_t minimizes f_β over R^n
                eng.record(t, f, None, Some(beta), None);
                return Ok(Status::Degenerate);
            }
            Err(e) => return Err(e),
        };
        if eng.dual_gap_stopping() {
            // the gap certifies the envelope; f ≤ f_β + βG₂²/2 converts it
            // into a norm-gap certificate only once β is small enough
            let g2 = eng.consts.lipschitz_l2;
            let threshold = eng.dual_gap_threshold() - beta * g2 * g2 / 2.0;
            let gap = eng.fw_gap(eng.atom(v_idx), &g);
            if threshold > 0.0 && gap <= threshold {
                eng.record(t, f, None, Some(beta), None);
                return Ok(Status::Converged);
            }
        }
        let gamma = step_open_loop(t);
        eng.record(t, f, Some(gamma), Some(beta), Some(v_idx));
        eng.apply_fw_step(gamma, v_idx);
    }
    unreachable!("loop returns at or before the budget");
}
