//! The plain Frank-Wolfe loop with open- and closed-loop step sizes.

use crate::error::Result;
use crate::linalg;
use crate::objectives::lp_sq_gradient;

use super::engine::{Engine, RunOpts};
use super::trace::Status;
use super::{FeasibleSet, ObjectiveSpec, Solution, SolverConfig, StepRule};

/// `γ_t = 2/(t+2)`.
pub fn step_open_loop(t: usize) -> f64 {
    2.0 / (t as f64 + 2.0)
}

/// Closed-loop step `min{⟨x−v, g⟩ / (L‖x−v‖_p²), 1}`, where `p` is the norm
/// under which `L` certifies smoothness. Returns `None` when `x = v`, the
/// zero-gap degenerate case.
pub fn step_closed_loop(x: &[f64], v: &[f64], g: &[f64], l: f64, p: f64) -> Option<f64> {
    let d = linalg::sub(x, v);
    let dist = linalg::lp_norm(&d, p);
    if dist == 0.0 {
        return None;
    }
    let align = linalg::dot(&d, g);
    Some((align / (l * dist * dist)).clamp(0.0, 1.0))
}

/// Frank-Wolfe on `½‖x − x*‖_p²`: start from the smallest-index vertex (or
/// the ball support point of a seeded random direction), repeatedly move
/// toward the linear minimizer of the gradient. Stops as soon as
/// `‖x_t − x*‖_p ≤ ε`, i.e. when the primal gap falls below `ε²/2`.
pub fn fw_solve(set: &FeasibleSet, spec: &ObjectiveSpec, config: &SolverConfig) -> Result<Solution> {
    run_fw(set, spec, config, RunOpts::default())
}

pub(crate) fn run_fw(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
    opts: RunOpts,
) -> Result<Solution> {
    let mut eng = Engine::new(set, spec, config, opts)?;
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
        let v_idx = eng.lmo(&g)?;
        let v = eng.atom(v_idx).to_vec();
        let gap = eng.fw_gap(&v, &g);
        if eng.dual_gap_stopping() && gap <= eng.dual_gap_threshold() {
            eng.record(t, f, None, None, None);
            return Ok(eng.finish(Status::Converged));
        }

        let gamma = match config.step {
            StepRule::OpenLoop => step_open_loop(t),
            StepRule::ClosedLoop => {
                match step_closed_loop(&eng.x, &v, &g, eng.smoothness, spec.p()) {
                    Some(gamma) if gap > 0.0 => gamma,
                    _ => {
                        // zero Frank-Wolfe gap: x_t is already optimal over C
                        eng.record(t, f, None, None, None);
                        return Ok(eng.finish(Status::Degenerate));
                    }
                }
            }
        };

        eng.record(t, f, Some(gamma), None, Some(v_idx));
        eng.apply_fw_step(gamma, v_idx);
    }
    unreachable!("loop returns at or before the iteration cap");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VertexSet;
    use crate::solvers::Algorithm;

    fn segment() -> FeasibleSet {
        FeasibleSet::Vertices(
            VertexSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap(),
        )
    }

    #[test]
    fn open_loop_schedule() {
        assert_eq!(step_open_loop(0), 1.0);
        assert_eq!(step_open_loop(2), 0.5);
        let mut prev = 1.0;
        for t in 1..100 {
            let g = step_open_loop(t);
            assert!(g < prev && g > 0.0);
            prev = g;
        }
    }

    #[test]
    fn closed_loop_ratio_and_clipping() {
        // <x−v, g> = 1, L‖x−v‖² = 2 → 0.5
        let x = [1.0, 0.0];
        let v = [0.0, 0.0];
        assert_eq!(step_closed_loop(&x, &v, &[1.0, 0.0], 2.0, 2.0), Some(0.5));
        // <x−v, g> = 5, L‖x−v‖² = 2 → clipped to 1
        assert_eq!(step_closed_loop(&x, &v, &[5.0, 0.0], 2.0, 2.0), Some(1.0));
        // x = v → degenerate
        assert_eq!(step_closed_loop(&x, &x, &[1.0, 0.0], 2.0, 2.0), None);
    }

    #[test]
    fn segment_closed_loop_converges_in_one_step() {
        let set = segment();
        let spec = ObjectiveSpec::new(vec![0.5, 0.0], 2.0).unwrap();
        let cfg = SolverConfig::new(Algorithm::Fw, 1e-9).with_max_iter(100);
        let sol = fw_solve(&set, &spec, &cfg).unwrap();
        assert_eq!(sol.trace.status, Status::Converged);
        // x0 = (0,0), v0 = (1,0), γ0 = 0.5, x1 = x*
        let rows = &sol.trace.rows;
        assert_eq!(rows[0].vertex, Some(1));
        assert_eq!(rows[0].gamma, Some(0.5));
        assert_eq!(rows.len(), 2);
        assert_eq!(sol.combination.point(), &[0.5, 0.0]);
        assert_eq!(sol.combination.cardinality(), 2);
    }

    #[test]
    fn segment_open_loop_path() {
        let set = segment();
        let spec = ObjectiveSpec::new(vec![0.5, 0.0], 2.0).unwrap();
        let cfg = SolverConfig::new(Algorithm::Fw, 1e-4)
            .with_step(StepRule::OpenLoop)
            .with_max_iter(10_000);
        let sol = fw_solve(&set, &spec, &cfg).unwrap();
        let rows = &sol.trace.rows;
        // γ0 = 1 → x1 = (1,0); γ1 = 2/3 → x2 = (1/3, 0)
        assert_eq!(rows[0].gamma, Some(1.0));
        assert!((rows[1].f_value - 0.125).abs() < 1e-15);
        assert!((rows[2].f_value - 0.5 * (1.0 / 36.0)).abs() < 1e-15);
        // gap decreasing from t = 1 on
        for w in rows[1..].windows(2) {
            assert!(w[1].primal_gap <= w[0].primal_gap + 1e-15);
        }
        assert_eq!(sol.trace.status, Status::Converged);
    }

    #[test]
    fn start_at_target_converges_immediately() {
        let set = FeasibleSet::Vertices(
            VertexSet::new(vec![vec![2.0, 1.0], vec![0.0, 0.0]]).unwrap(),
        );
        let spec = ObjectiveSpec::new(vec![2.0, 1.0], 3.0).unwrap();
        let cfg = SolverConfig::new(Algorithm::Fw, 1e-9);
        let sol = fw_solve(&set, &spec, &cfg).unwrap();
        assert_eq!(sol.trace.status, Status::Converged);
        assert_eq!(sol.trace.rows.len(), 1);
        assert_eq!(sol.combination.cardinality(), 1);
    }

    #[test]
    fn iteration_cap_reports_itercap() {
        let set = segment();
        let spec = ObjectiveSpec::new(vec![0.5, 0.0], 2.0).unwrap();
        let cfg = SolverConfig::new(Algorithm::Fw, 1e-12)
            .with_step(StepRule::OpenLoop)
            .with_max_iter(3);
        let sol = fw_solve(&set, &spec, &cfg).unwrap();
        assert_eq!(sol.trace.status, Status::IterCap);
        assert_eq!(sol.trace.final_row().t, 3);
    }

    #[test]
    fn traces_are_deterministic() {
        let set = segment();
        let spec = ObjectiveSpec::new(vec![0.3, 0.0], 2.0).unwrap();
        let cfg = SolverConfig::new(Algorithm::Fw, 1e-8)
            .with_step(StepRule::OpenLoop)
            .with_max_iter(500);
        let a = fw_solve(&set, &spec, &cfg).unwrap();
        let b = fw_solve(&set, &spec, &cfg).unwrap();
        assert!(a.trace.same_path(&b.trace));
    }

    #[test]
    fn cardinality_never_exceeds_t_plus_one() {
        let set = FeasibleSet::Vertices(
            VertexSet::new(
                (0..12)
                    .map(|i| {
                        let a = i as f64;
                        vec![(a * 0.7).sin(), (a * 1.3).cos(), (a * 0.2).sin()]
                    })
                    .collect(),
            )
            .unwrap(),
        );
        let spec = ObjectiveSpec::new(vec![0.1, 0.2, 0.05], 2.0).unwrap();
        let cfg = SolverConfig::new(Algorithm::Fw, 1e-6)
            .with_step(StepRule::OpenLoop)
            .with_max_iter(300);
        let sol = fw_solve(&set, &spec, &cfg).unwrap();
        for row in &sol.trace.rows {
            assert!(row.cardinality <= row.t + 1);
        }
    }
}
