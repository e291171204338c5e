//! Away-step Frank-Wolfe: each iteration compares the usual toward-vertex
//! direction with the direction away from the worst active vertex and takes
//! the better-aligned one. Away steps are capped at `α/(1−α)`; hitting the
//! cap is a drop step and removes that vertex from the support.

use crate::error::Result;
use crate::linalg;
use crate::objectives::lp_sq_gradient;

use super::engine::{Engine, RunOpts};
use super::fw::step_closed_loop;
use super::trace::Status;
use super::{FeasibleSet, ObjectiveSpec, Solution, SolverConfig};

pub fn afw_solve(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
) -> Result<Solution> {
    run_afw(set, spec, config, RunOpts::default())
}

pub(crate) fn run_afw(
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
        let v_idx = crate::geometry::lmo_vertices(vertices, &g)?;
        let fw_align = eng.fw_gap(vertices.vertex(v_idx), &g);
        if eng.dual_gap_stopping() && fw_align <= eng.dual_gap_threshold() {
            eng.record(t, f, None, None, None);
            return Ok(eng.finish(Status::Converged));
        }
        if fw_align <= 0.0 {
            eng.record(t, f, None, None, None);
            return Ok(eng.finish(Status::Degenerate));
        }

        // worst active vertex (largest gradient inner product)
        let (a_idx, a_weight) = {
            let mut best: Option<(usize, f64, f64)> = None;
            for &(i, w) in eng.comb.support() {
                let s = linalg::dot(vertices.vertex(i), &g);
                if best.is_none_or(|(_, _, bs)| s > bs) {
                    best = Some((i, w, s));
                }
            }
            let (i, w, _) = best.expect("support is never empty");
            (i, w)
        };
        let away_align = linalg::dot(vertices.vertex(a_idx), &g) - linalg::dot(&eng.x, &g);

        let take_fw = fw_align >= away_align || a_weight >= 1.0;
        if take_fw {
            let v = vertices.vertex(v_idx).to_vec();
            let gamma = match step_closed_loop(&eng.x, &v, &g, eng.smoothness, spec.p()) {
                Some(gamma) => gamma,
                None => {
                    eng.record(t, f, None, None, None);
                    return Ok(eng.finish(Status::Degenerate));
                }
            };
            eng.record(t, f, Some(gamma), None, Some(v_idx));
            eng.apply_fw_step(gamma, v_idx);
        } else {
            let a = vertices.vertex(a_idx);
            let d: Vec<f64> = eng.x.iter().zip(a).map(|(&xi, &ai)| xi - ai).collect();
            let dist = linalg::lp_norm(&d, spec.p());
            if dist == 0.0 {
                eng.record(t, f, None, None, None);
                return Ok(eng.finish(Status::Degenerate));
            }
            let gamma_max = a_weight / (1.0 - a_weight);
            let gamma = (away_align / (eng.smoothness * dist * dist)).clamp(0.0, gamma_max);
            eng.record(t, f, Some(gamma), None, Some(a_idx));
            eng.apply_away_step(gamma, a_idx);
        }
    }
    unreachable!("loop returns at or before the iteration cap");
}
