//! Fully-corrective Frank-Wolfe: each outer iteration adds the LMO vertex to
//! the active set and reoptimizes the objective over its convex hull.
//!
//! The reoptimization is an away-step Frank-Wolfe run on the weight simplex
//! of the active set, driven to a Frank-Wolfe-gap certificate. It needs no
//! external QP solver and drives useless weights exactly to zero, which is
//! what makes exact sparse recovery possible.

use crate::error::{Error, Result};
use crate::linalg;
use crate::objectives::{lp_sq_gradient, Mode};

use super::engine::{Engine, RunOpts};
use super::trace::Status;
use super::{FeasibleSet, ObjectiveSpec, Solution, SolverConfig};

pub(crate) struct HullSolution {
    pub weights: Vec<f64>,
    pub fw_gap: f64,
    pub iterations: usize,
    pub hit_cap: bool,
}

/// Away-step Frank-Wolfe over the weight simplex of `atoms`, for a smooth
/// objective given by `grad` with smoothness `l` in the ℓ`step_norm_p` norm.
/// Stops when the Frank-Wolfe gap `max_i ⟨y − a_i, ∇f(y)⟩` reaches `tol`.
pub(crate) fn minimize_over_hull(
    atoms: &[&[f64]],
    warm: Option<&[f64]>,
    grad: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    l: f64,
    step_norm_p: f64,
    tol: f64,
    max_iter: usize,
) -> HullSolution {
    let k = atoms.len();
    let dim = atoms[0].len();
    let mut w: Vec<f64> = match warm {
        Some(init) => init.to_vec(),
        None => vec![1.0 / k as f64; k],
    };
    let combine = |w: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; dim];
        for (wi, a) in w.iter().zip(atoms) {
            if *wi == 0.0 {
                continue;
            }
            for (yk, &ak) in y.iter_mut().zip(*a) {
                *yk += wi * ak;
            }
        }
        y
    };

    let mut y = combine(&w);
    let mut gap = f64::INFINITY;
    for it in 0..=max_iter {
        let g = grad(&y);
        let yg = linalg::dot(&y, &g);
        let scores: Vec<f64> = atoms.iter().map(|a| linalg::dot(a, &g)).collect();

        let mut s = 0;
        for i in 1..k {
            if scores[i] < scores[s] {
                s = i;
            }
        }
        gap = yg - scores[s];
        if gap <= tol {
            return HullSolution {
                weights: w,
                fw_gap: gap,
                iterations: it,
                hit_cap: false,
            };
        }
        if it == max_iter {
            break;
        }

        let mut away = None;
        for i in 0..k {
            if w[i] > 0.0 && away.is_none_or(|a: usize| scores[i] > scores[a]) {
                away = Some(i);
            }
        }
        let a = away.expect("simplex weights always have positive mass");

        let fw_align = gap;
        let away_align = scores[a] - yg;
        let take_fw = fw_align >= away_align || w[a] >= 1.0;

        if take_fw {
            let d: Vec<f64> = atoms[s].iter().zip(&y).map(|(&ai, &yi)| ai - yi).collect();
            let dist = linalg::lp_norm(&d, step_norm_p);
            if dist == 0.0 {
                break;
            }
            let gamma = (fw_align / (l * dist * dist)).clamp(0.0, 1.0);
            for wi in &mut w {
                *wi *= 1.0 - gamma;
            }
            w[s] += gamma;
        } else {
            let d: Vec<f64> = y.iter().zip(atoms[a]).map(|(&yi, &ai)| yi - ai).collect();
            let dist = linalg::lp_norm(&d, step_norm_p);
            if dist == 0.0 {
                break;
            }
            let gamma_max = w[a] / (1.0 - w[a]);
            let gamma = (away_align / (l * dist * dist)).clamp(0.0, gamma_max);
            let drop = gamma >= gamma_max * (1.0 - 1e-15);
            for wi in &mut w {
                *wi *= 1.0 + gamma;
            }
            w[a] -= gamma;
            if drop {
                w[a] = 0.0;
            }
        }
        let total: f64 = w.iter().sum();
        for wi in &mut w {
            *wi = (*wi / total).max(0.0);
        }
        y = combine(&w);
    }
    HullSolution {
        weights: w,
        fw_gap: gap,
        iterations: max_iter,
        hit_cap: true,
    }
}

/// Outcome of a fully-corrective reoptimization over an active set.
#[derive(Clone, Debug)]
pub struct CorrectionResult {
    /// Weights aligned with the input atoms; zero entries mark atoms that
    /// leave the active set.
    pub weights: Vec<f64>,
    /// Certified Frank-Wolfe gap of the returned weights.
    pub fw_gap: f64,
    pub iterations: usize,
    /// Set when the inner budget of `10·|active|²` iterations ran out before
    /// the gap target.
    pub hit_cap: bool,
}

/// Minimizes `½‖y − x*‖_p²` over the convex hull of `active`, to the
/// Frank-Wolfe-gap certificate `max_v ⟨y − v, ∇f(y)⟩ ≤ tol`.
pub fn fcfw_correction(
    active: &[&[f64]],
    spec: &ObjectiveSpec,
    tol: f64,
) -> Result<CorrectionResult> {
    fcfw_correction_warm(active, spec, tol, None)
}

pub(crate) fn fcfw_correction_warm(
    active: &[&[f64]],
    spec: &ObjectiveSpec,
    tol: f64,
    warm: Option<&[f64]>,
) -> Result<CorrectionResult> {
    if active.is_empty() {
        return Err(Error::Input("correction needs a nonempty active set".into()));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Input(format!("correction tolerance must be positive, got {tol}")));
    }
    if spec.mode() != Mode::SmoothSquared {
        return Err(Error::Config(
            "fully-corrective reoptimization is defined for p in [2, inf)".into(),
        ));
    }
    let l = spec.p() - 1.0;
    let cap = 10 * active.len() * active.len();
    let sol = minimize_over_hull(
        active,
        warm,
        &mut |y| lp_sq_gradient(y, spec),
        l,
        spec.p(),
        tol,
        cap,
    );
    Ok(CorrectionResult {
        weights: sol.weights,
        fw_gap: sol.fw_gap,
        iterations: sol.iterations,
        hit_cap: sol.hit_cap,
    })
}

/// Fully-corrective Frank-Wolfe. The objective value is nonincreasing across
/// outer iterations, and atoms whose corrected weight hits zero leave the
/// active set, so the cardinality can shrink.
pub fn fcfw_solve(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
) -> Result<Solution> {
    run_fcfw(set, spec, config, RunOpts::default())
}

pub(crate) fn run_fcfw(
    set: &FeasibleSet,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
    opts: RunOpts,
) -> Result<Solution> {
    let mut eng = Engine::new(set, spec, config, opts)?;
    let tol = config.inner_tolerance();
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
        let gap = eng.fw_gap(eng.atom(v_idx), &g);
        if eng.dual_gap_stopping() && gap <= eng.dual_gap_threshold() {
            eng.record(t, f, None, None, None);
            return Ok(eng.finish(Status::Converged));
        }
        if gap <= 0.0 {
            eng.record(t, f, None, None, None);
            return Ok(eng.finish(Status::Degenerate));
        }

        // active set = current support plus the fresh vertex
        let mut indices: Vec<usize> = eng.comb.support().iter().map(|&(i, _)| i).collect();
        let mut warm: Vec<f64> = eng.comb.support().iter().map(|&(_, w)| w).collect();
        if !indices.contains(&v_idx) {
            indices.push(v_idx);
            warm.push(0.0);
        }
        let atoms: Vec<&[f64]> = indices.iter().map(|&i| eng.atom(i)).collect();
        let corrected = fcfw_correction_warm(&atoms, spec, tol, Some(&warm))?;

        eng.record(t, f, None, None, Some(v_idx));
        eng.set_weights(&indices, &corrected.weights);
    }
    unreachable!("loop returns at or before the iteration cap");
}
