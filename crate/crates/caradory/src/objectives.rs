//! The ℓp objective family.
//!
//! For `p ∈ [2, ∞)` the working objective is the smooth `½‖x − x*‖_p²`
//! (convex, `(p−1)`-smooth, 1-gradient dominated in the ℓp-norm). For
//! `p ∈ [1, 2) ∪ {∞}` the norm itself is used, smoothed through its Moreau
//! envelope; the proximity operator reduces to a Euclidean projection onto
//! the dual-norm ball via the Moreau decomposition.

use crate::error::{Error, Result};
use crate::linalg::{self, dual_exponent};

/// Residual target for the dual-ball bisection.
pub const DUAL_BALL_TOLERANCE: f64 = 1e-12;
const DUAL_BALL_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    /// `½‖x − x*‖_p²`, `p ∈ [2, ∞)`.
    SmoothSquared,
    /// `‖x − x*‖_p`, `p ∈ [1, 2) ∪ {∞}`.
    NonsmoothNorm,
}

/// Target point plus norm exponent; the mode is determined by `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveSpec {
    target: Vec<f64>,
    p: f64,
    mode: Mode,
}

impl ObjectiveSpec {
    pub fn new(target: Vec<f64>, p: f64) -> Result<Self> {
        if target.is_empty() || target.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("target must be finite and non-empty".into()));
        }
        let mode = if p == f64::INFINITY || (1.0..2.0).contains(&p) {
            Mode::NonsmoothNorm
        } else if (2.0..f64::INFINITY).contains(&p) {
            Mode::SmoothSquared
        } else {
            return Err(Error::Input(format!("norm exponent must lie in [1, inf], got {p}")));
        };
        Ok(Self { target, p, mode })
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }
}

fn assert_mode(spec: &ObjectiveSpec, expected: Mode, what: &str) {
    assert!(
        spec.mode == expected,
        "{what} requires {expected:?} mode, but p={} gives {:?}",
        spec.p,
        spec.mode
    );
}

/// `½‖x − x*‖_p²`.
pub fn lp_sq_value(x: &[f64], spec: &ObjectiveSpec) -> f64 {
    assert_mode(spec, Mode::SmoothSquared, "lp_sq_value");
    let n = linalg::lp_dist(x, spec.target(), spec.p);
    0.5 * n * n
}

/// Gradient `‖d‖_p^{2−p} · (sign(d_i)|d_i|^{p−1})_i` with `d = x − x*`,
/// extended by continuity to the zero vector at `x = x*`.
///
/// Computed with the largest entry factored out: with `u_i = |d_i|/max|d|`
/// and `T = Σ u_i^p`, the i-th entry is `max|d| · sign(d_i) u_i^{p−1} T^{2/p−1}`,
/// every factor of which stays bounded for arbitrarily large `p`.
pub fn lp_sq_gradient(x: &[f64], spec: &ObjectiveSpec) -> Vec<f64> {
    assert_mode(spec, Mode::SmoothSquared, "lp_sq_gradient");
    let d = linalg::sub(x, spec.target());
    if spec.p == 2.0 {
        return d;
    }
    let m = linalg::max_abs(&d);
    if m == 0.0 {
        return vec![0.0; d.len()];
    }
    let p = spec.p;
    let t: f64 = d.iter().map(|&di| (di.abs() / m).powf(p)).sum();
    let prefactor = m * t.powf(2.0 / p - 1.0);
    d.iter()
        .map(|&di| prefactor * di.signum() * (di.abs() / m).powf(p - 1.0))
        .collect()
}

/// `‖x − x*‖_p` for the nonsmooth range.
pub fn lp_value(x: &[f64], spec: &ObjectiveSpec) -> f64 {
    assert_mode(spec, Mode::NonsmoothNorm, "lp_value");
    linalg::lp_dist(x, spec.target(), spec.p)
}

/// Euclidean projection of `y` onto `{ ‖z‖_q ≤ radius }` where
/// `q = p/(p−1)` is the dual exponent of `p`.
///
/// `q = ∞` is a componentwise clamp, `q = 1` a sorted soft-threshold, and
/// `q ∈ (1, ∞)` a bisection on the Lagrange multiplier of the norm
/// constraint (each multiplier evaluation solves one monotone scalar
/// equation per coordinate).
pub fn project_dual_ball(y: &[f64], radius: f64, p: f64) -> Result<Vec<f64>> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::Input(format!("ball radius must be positive, got {radius}")));
    }
    let q = dual_exponent(p);
    if q == f64::INFINITY {
        return Ok(y.iter().map(|&v| v.clamp(-radius, radius)).collect());
    }
    if linalg::lp_norm(y, q) <= radius {
        return Ok(y.to_vec());
    }
    if q == 1.0 {
        return Ok(project_l1_ball(y, radius));
    }
    project_lq_ball_bisection(y, radius, q)
}

/// Projection onto the ℓ1 ball of a point strictly outside it: soft
/// thresholding at the level that brings the ℓ1 mass down to `radius`.
fn project_l1_ball(y: &[f64], radius: f64) -> Vec<f64> {
    let mut mags: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        cumsum += m;
        let cand = (cumsum - radius) / (k + 1) as f64;
        if cand < m {
            theta = cand;
        } else {
            break;
        }
    }
    y.iter()
        .map(|&v| v.signum() * (v.abs() - theta).max(0.0))
        .collect()
}

/// KKT system for `min ½‖z − y‖²  s.t.  Σ|z_i|^q ≤ r^q` with `q ∈ (1, ∞)`:
/// `|z_i| + λ q |z_i|^{q−1} = |y_i|` for some λ ≥ 0 making `‖z‖_q = r`.
fn project_lq_ball_bisection(y: &[f64], radius: f64, q: f64) -> Result<Vec<f64>> {
    let magnitude = |a: f64, lambda: f64| -> f64 {
        // root of b + λq b^{q−1} = a on [0, a]; LHS is increasing in b
        let (mut lo, mut hi) = (0.0f64, a);
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if mid + lambda * q * mid.powf(q - 1.0) > a {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let norm_at = |lambda: f64| -> f64 {
        let z: Vec<f64> = y.iter().map(|&v| magnitude(v.abs(), lambda)).collect();
        linalg::lp_norm(&z, q)
    };

    let tol = DUAL_BALL_TOLERANCE * radius.max(1.0);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut used = 0usize;
    while norm_at(hi) > radius {
        lo = hi;
        hi *= 65536.0;
        used += 1;
        // beyond this the multiplier itself is not representable: |y_i|^{q−1}
        // has underflowed and no f64 multiplier can satisfy the KKT system
        if hi > 1e300 {
            return Err(Error::NonConvergent {
                what: "dual-ball multiplier bracketing",
                iterations: used,
                residual: norm_at(hi) - radius,
            });
        }
    }
    let mut lambda = hi;
    for it in 0..DUAL_BALL_MAX_ITER {
        lambda = 0.5 * (lo + hi);
        let n = norm_at(lambda);
        let residual = (n - radius).abs();
        if residual <= tol {
            break;
        }
        if n > radius {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if it + 1 == DUAL_BALL_MAX_ITER {
            return Err(Error::NonConvergent {
                what: "dual-ball projection bisection",
                iterations: DUAL_BALL_MAX_ITER,
                residual,
            });
        }
    }
    Ok(y
        .iter()
        .map(|&v| v.signum() * magnitude(v.abs(), lambda))
        .collect())
}

/// `prox_{β‖· − x*‖_p}(x) = x* + d − proj_{βB_q}(d)` with `d = x − x*`,
/// by the Moreau decomposition (the conjugate of a norm is the indicator
/// of its dual unit ball).
pub fn prox_lp(x: &[f64], beta: f64, spec: &ObjectiveSpec) -> Result<Vec<f64>> {
    assert_mode(spec, Mode::NonsmoothNorm, "prox_lp");
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::Input(format!("smoothing parameter must be positive, got {beta}")));
    }
    let d = linalg::sub(x, spec.target());
    let proj = project_dual_ball(&d, beta, spec.p)?;
    Ok(spec
        .target()
        .iter()
        .zip(d.iter().zip(&proj))
        .map(|(&t, (&di, &zi))| t + (di - zi))
        .collect())
}

/// Moreau envelope gradient `∇f_β(x) = (x − prox_{βf}(x)) / β`.
pub fn moreau_gradient(x: &[f64], beta: f64, spec: &ObjectiveSpec) -> Result<Vec<f64>> {
    let prox = prox_lp(x, beta, spec)?;
    Ok(x.iter().zip(&prox).map(|(&xi, &pi)| (xi - pi) / beta).collect())
}

/// Moreau envelope value `f_β(x) = f(prox) + ‖x − prox‖₂² / (2β)`.
pub fn moreau_value(x: &[f64], beta: f64, spec: &ObjectiveSpec) -> Result<f64> {
    let prox = prox_lp(x, beta, spec)?;
    let d2 = linalg::l2_dist(x, &prox);
    Ok(lp_value(&prox, spec) + d2 * d2 / (2.0 * beta))
}

/// Smoothing parameter schedule for the nonsmooth solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmoothingSchedule {
    /// Constant β, chosen as `ε / G₂²` for a target accuracy ε.
    FixedBeta(f64),
    /// `β_t = 2 (D₂/G₂) / √(t+2)`.
    DecayingBeta { d_2: f64, g_2: f64 },
}

impl SmoothingSchedule {
    pub fn fixed_for_accuracy(epsilon: f64, g_2: f64) -> Self {
        SmoothingSchedule::FixedBeta(epsilon / (g_2 * g_2))
    }

    pub fn beta_at(&self, t: usize) -> f64 {
        match *self {
            SmoothingSchedule::FixedBeta(beta) => beta,
            SmoothingSchedule::DecayingBeta { d_2, g_2 } => {
                2.0 * (d_2 / g_2) / ((t as f64) + 2.0).sqrt()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn spec(target: &[f64], p: f64) -> ObjectiveSpec {
        ObjectiveSpec::new(target.to_vec(), p).unwrap()
    }

    fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut hi = x.to_vec();
                let mut lo = x.to_vec();
                hi[i] += h;
                lo[i] -= h;
                (f(&hi) - f(&lo)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn mode_follows_exponent() {
        assert_eq!(spec(&[0.0], 2.0).mode(), Mode::SmoothSquared);
        assert_eq!(spec(&[0.0], 7.0).mode(), Mode::SmoothSquared);
        assert_eq!(spec(&[0.0], 1.0).mode(), Mode::NonsmoothNorm);
        assert_eq!(spec(&[0.0], 1.5).mode(), Mode::NonsmoothNorm);
        assert_eq!(spec(&[0.0], f64::INFINITY).mode(), Mode::NonsmoothNorm);
        assert!(ObjectiveSpec::new(vec![0.0], 0.5).is_err());
    }

    #[test]
    fn lp_sq_value_examples() {
        let s = spec(&[0.0, 0.0], 2.0);
        assert_eq!(lp_sq_value(&[0.0, 0.0], &s), 0.0);
        assert_eq!(lp_sq_value(&[3.0, 4.0], &s), 12.5);

        let s = spec(&[0.0, 0.0], 3.0);
        let expected = 0.5 * 9f64.powf(2.0 / 3.0);
        assert!((lp_sq_value(&[1.0, -2.0], &s) - expected).abs() < 1e-12);
    }

    #[test]
    fn lp_sq_gradient_examples() {
        let s = spec(&[1.0, -1.0], 2.0);
        let g = lp_sq_gradient(&[2.0, 3.0], &s);
        assert_eq!(g, vec![1.0, 4.0]);

        for &p in &[2.0, 3.0, 7.0] {
            let s = spec(&[0.5, 0.5], p);
            assert_eq!(lp_sq_gradient(&[0.5, 0.5], &s), vec![0.0, 0.0]);
        }

        let s = spec(&[0.0, 0.0], 3.0);
        let g = lp_sq_gradient(&[1.0, -2.0], &s);
        let pre = 9f64.powf(-1.0 / 3.0);
        assert!((g[0] - pre).abs() < 1e-12);
        assert!((g[1] + 4.0 * pre).abs() < 1e-12);
        // independent oracle: central differences of the value
        let fd = central_difference(|x| lp_sq_value(x, &s), &[1.0, -2.0], 1e-6);
        assert!((g[0] - fd[0]).abs() < 1e-5 && (g[1] - fd[1]).abs() < 1e-5);
    }

    #[test]
    fn lp_value_examples() {
        let s1 = spec(&[0.0, 0.0], 1.0);
        assert_eq!(lp_value(&[0.0, 0.0], &s1), 0.0);
        assert_eq!(lp_value(&[1.0, -2.0], &s1), 3.0);
        let sinf = spec(&[0.0, 0.0], f64::INFINITY);
        assert_eq!(lp_value(&[1.0, -2.0], &sinf), 2.0);
    }

    #[test]
    fn dual_ball_idempotent_inside() {
        let y = vec![0.1, -0.2];
        assert_eq!(project_dual_ball(&y, 1.0, 1.5).unwrap(), y);
        assert_eq!(project_dual_ball(&y, 1.0, 1.0).unwrap(), y);
        assert_eq!(project_dual_ball(&y, 1.0, f64::INFINITY).unwrap(), y);
    }

    #[test]
    fn dual_ball_clamp_for_p1() {
        // p = 1 → q = ∞
        let z = project_dual_ball(&[3.0, -0.5], 1.0, 1.0).unwrap();
        assert_eq!(z, vec![1.0, -0.5]);
    }

    #[test]
    fn dual_ball_l1_matches_grid_search() {
        // p = ∞ → q = 1; independent oracle: dense scan of the l1 ball
        let y = [2.0, 1.0];
        let z = project_dual_ball(&y, 1.0, f64::INFINITY).unwrap();
        let mut best = f64::INFINITY;
        let mut best_pt = [0.0, 0.0];
        let steps = 2000;
        for a in -steps..=steps {
            let za = a as f64 / steps as f64;
            let rem = 1.0 - za.abs();
            for b in [-rem, 0.0, rem, rem / 2.0, -rem / 2.0] {
                let d = (za - y[0]).powi(2) + (b - y[1]).powi(2);
                if d < best {
                    best = d;
                    best_pt = [za, b];
                }
            }
        }
        assert!((best_pt[0] - 1.0).abs() < 1e-2 && best_pt[1].abs() < 1e-2);
        assert!((z[0] - 1.0).abs() < 1e-12 && z[1].abs() < 1e-12);
    }

    #[test]
    fn dual_ball_bisection_out_of_range_exponent_errors() {
        // q = p/(p−1) ≈ 10⁴: |y_i|^{q−1} underflows, no representable
        // multiplier exists, and the bisection must report that.
        let err = project_dual_ball(&[1.0, 1.0], 0.5, 1.0001);
        assert!(matches!(err, Err(crate::error::Error::NonConvergent { .. })));
    }

    #[test]
    fn dual_ball_bisection_touches_sphere() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..50 {
            let y = rng.gaussian_vec(6);
            let p = 1.1 + 0.7 * rng.next_f64(); // p in (1.1, 1.8) → q in (2.25, 11]
            let q = dual_exponent(p);
            let r = 0.3;
            if crate::linalg::lp_norm(&y, q) <= r {
                continue;
            }
            let z = project_dual_ball(&y, r, p).unwrap();
            assert!((crate::linalg::lp_norm(&z, q) - r).abs() < 1e-9);
            // projection optimality against random feasible points
            let dz = crate::linalg::l2_dist(&y, &z);
            for _ in 0..20 {
                let u = rng.gaussian_vec(6);
                let un = crate::linalg::lp_norm(&u, q);
                let w: Vec<f64> = u.iter().map(|&ui| r * ui / un).collect();
                assert!(dz <= crate::linalg::l2_dist(&y, &w) + 1e-9);
            }
        }
    }

    #[test]
    fn prox_fixes_the_target() {
        for &p in &[1.0, 1.5, f64::INFINITY] {
            let s = spec(&[0.3, -0.7], p);
            let prox = prox_lp(&[0.3, -0.7], 1.0, &s).unwrap();
            assert!(crate::linalg::l2_dist(&prox, s.target()) < 1e-14);
        }
    }

    #[test]
    fn prox_l1_matches_coordinatewise_minimization() {
        let s = spec(&[0.0, 0.0], 1.0);
        let prox = prox_lp(&[3.0, -0.5], 1.0, &s).unwrap();
        // independent oracle: scan |y| + ½(y − x)² per coordinate
        for (i, &x) in [3.0, -0.5].iter().enumerate() {
            let mut best = f64::INFINITY;
            let mut arg = 0.0;
            let steps = 400_000;
            for k in -steps..=steps {
                let y = 4.0 * k as f64 / steps as f64;
                let val = y.abs() + 0.5 * (y - x) * (y - x);
                if val < best {
                    best = val;
                    arg = y;
                }
            }
            assert!((prox[i] - arg).abs() < 1e-4, "coordinate {i}");
        }
        assert!((prox[0] - 2.0).abs() < 1e-12 && prox[1].abs() < 1e-12);
    }

    #[test]
    fn prox_linf_matches_grid_search() {
        let s = spec(&[0.0, 0.0], f64::INFINITY);
        let prox = prox_lp(&[2.0, 1.0], 1.0, &s).unwrap();
        // independent oracle: 2-D grid of ‖y‖_∞ + ½‖y − x‖₂²
        let mut best = f64::INFINITY;
        let mut arg = [0.0, 0.0];
        let steps = 3000;
        for a in 0..=steps {
            for b in 0..=steps {
                let y = [3.0 * a as f64 / steps as f64, 3.0 * b as f64 / steps as f64];
                let val = y[0].max(y[1])
                    + 0.5 * ((y[0] - 2.0).powi(2) + (y[1] - 1.0).powi(2));
                if val < best {
                    best = val;
                    arg = y;
                }
            }
        }
        assert!((arg[0] - 1.0).abs() < 1e-3 && (arg[1] - 1.0).abs() < 1e-3);
        assert!((prox[0] - 1.0).abs() < 1e-10 && (prox[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn moreau_gradient_examples() {
        let s = spec(&[0.0, 0.0], 1.0);
        let g = moreau_gradient(&[0.0, 0.0], 1.0, &s).unwrap();
        assert!(g.iter().all(|&x| x.abs() < 1e-14));

        let g = moreau_gradient(&[3.0, -0.5], 1.0, &s).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-12 && (g[1] + 0.5).abs() < 1e-12);

        let sinf = spec(&[0.0, 0.0], f64::INFINITY);
        let g = moreau_gradient(&[2.0, 1.0], 1.0, &sinf).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-10 && g[1].abs() < 1e-10);
    }

    #[test]
    fn moreau_value_examples() {
        let s = spec(&[0.0, 0.0], 1.0);
        assert!(moreau_value(&[0.0, 0.0], 1.0, &s).unwrap() < 1e-14);
        let v = moreau_value(&[3.0, -0.5], 1.0, &s).unwrap();
        assert!((v - 2.625).abs() < 1e-12);
    }

    #[test]
    fn envelope_lower_bounds_norm() {
        let mut rng = SplitMix64::new(13);
        for &p in &[1.0, 1.5, f64::INFINITY] {
            let s = spec(&rng.gaussian_vec(5), p);
            for _ in 0..100 {
                let x = rng.gaussian_vec(5);
                let beta = 0.1 + rng.next_f64();
                let env = moreau_value(&x, beta, &s).unwrap();
                let f = lp_value(&x, &s);
                let g2 = crate::geometry::lipschitz_l2(5, p);
                assert!(env <= f + 1e-12);
                assert!(f <= env + beta * g2 * g2 / 2.0 + 1e-12);
            }
        }
    }

    #[test]
    fn moreau_gradient_matches_finite_differences() {
        let mut rng = SplitMix64::new(29);
        for &p in &[1.0, 1.5, f64::INFINITY] {
            let s = spec(&rng.gaussian_vec(4), p);
            for _ in 0..20 {
                let x = rng.gaussian_vec(4);
                let beta = 0.5 + rng.next_f64();
                let g = moreau_gradient(&x, beta, &s).unwrap();
                let fd = central_difference(
                    |y| moreau_value(y, beta, &s).unwrap(),
                    &x,
                    1e-6,
                );
                for i in 0..4 {
                    assert!((g[i] - fd[i]).abs() < 1e-5, "p={p} coord {i}");
                }
            }
        }
    }

    #[test]
    fn smoothing_schedules() {
        let dec = SmoothingSchedule::DecayingBeta { d_2: 2.0, g_2: 1.0 };
        assert!((dec.beta_at(0) - 4.0 / 2f64.sqrt()).abs() < 1e-12);
        let fixed = SmoothingSchedule::fixed_for_accuracy(0.5, 1.0);
        assert_eq!(fixed.beta_at(0), 0.5);
        assert_eq!(fixed.beta_at(100), 0.5);
    }
}
