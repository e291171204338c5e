//! Frank-Wolfe with the nearest-extreme-point oracle: the vertex scan
//! minimizes `⟨v, g⟩ + λ_t‖v − x_t‖₂²` with `λ_t = Lγ_t/2`, where `L` is the
//! ℓ2-smoothness constant (also `p − 1` for the squared ℓp objective).

use crate::error::Result;
use crate::geometry::nep_select;
use crate::objectives::lp_sq_gradient;

use super::engine::{Engine, RunOpts};
use super::fw::step_open_loop;
use super::trace::Status;
use super::{FeasibleSet, ObjectiveSpec, Solution, SolverConfig};

pub fn nep_fw_solve(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
) -> Result<Solution> {
    run_nep(set, spec, config, RunOpts::default())
}

pub(crate) fn run_nep(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
    opts: RunOpts,
) -> Result<Solution> {
    let mut eng = Engine::new(set, spec, config, opts)?;
    let vertices = eng.vertices()?;
    for t in 0..=config.max_iter {
        let f = eng.objective(&eng.x);
        if eng.primal_converged(f) {
            eng.record(t, f, None, None, None);
            return Ok(eng.finish(Status::Converged));
        }
        if t == config.max_iter {
            eng.record(t, f, None, None, None);
            return Ok(eng.finish(Status::IterCap));
        }

        let g = lp_sq_gradient(&eng.x, spec);
        let gamma = step_open_loop(t);
        let lambda = eng.smoothness * gamma / 2.0;
        let v_idx = nep_select(vertices, &g, &eng.x, lambda)?;

        if eng.dual_gap_stopping() {
            // the duality-gap certificate needs the unpenalized minimizer;
            // the gap at the NEP vertex underestimates it
            let lmo_idx = crate::geometry::lmo_vertices(vertices, &g)?;
            let gap = eng.fw_gap(vertices.vertex(lmo_idx), &g);
            if gap <= eng.dual_gap_threshold() {
                eng.record(t, f, None, None, None);
                return Ok(eng.finish(Status::Converged));
            }
        }

        eng.record(t, f, Some(gamma), None, Some(v_idx));
        eng.apply_fw_step(gamma, v_idx);
    }
    unreachable!("loop returns at or before the iteration cap");
}
