//! Feasible sets, linear-minimization and nearest-extreme-point oracles,
//! diameters, and convex-combination bookkeeping.
//!
//! Every argmin scan breaks ties toward the smallest index so that traces
//! are reproducible. All operations are pure functions of their inputs.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Weights below this are pruned from a decomposition and the remainder is
/// renormalized; the count of surviving weights is the cardinality.
pub const WEIGHT_PRUNE_THRESHOLD: f64 = 1e-12;

/// Tolerance on `Σ w_i = 1` for externally supplied weight vectors.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Finite list of polytope vertices in fixed index order.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSet {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl VertexSet {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Input("vertex set must contain at least one vertex".into()));
        }
        let dim = vertices[0].len();
        if dim == 0 {
            return Err(Error::Input("vertices must have dimension >= 1".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Input(format!(
                    "vertex {i} has dimension {} but vertex 0 has dimension {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Input(format!("vertex {i} has a non-finite entry")));
            }
        }
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Parses the `{"n": int, "vertices": [[...], ...]}` wire format,
    /// checking rectangularity against the declared dimension.
    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            vertices: Vec<Vec<f64>>,
        }
        let wire: Wire = serde_json::from_str(s)?;
        for (i, v) in wire.vertices.iter().enumerate() {
            if v.len() != wire.n {
                return Err(Error::Input(format!(
                    "vertex {i} has {} entries, header says n={}",
                    v.len(),
                    wire.n
                )));
            }
        }
        Self::new(wire.vertices)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::json!({ "n": self.dim, "vertices": self.vertices }).to_string()
    }
}

/// `{ v : ‖v − center‖_q ≤ radius }` for `q ∈ [2, ∞)`. These sets are
/// uniformly convex and admit a closed-form linear minimization oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct LqBall {
    center: Vec<f64>,
    radius: f64,
    q: f64,
}

impl LqBall {
    pub fn new(center: Vec<f64>, radius: f64, q: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::Input(format!("ball radius must be positive, got {radius}")));
        }
        if !(2.0..f64::INFINITY).contains(&q) {
            return Err(Error::Input(format!("ball exponent q must lie in [2, inf), got {q}")));
        }
        if center.is_empty() || center.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("ball center must be finite and non-empty".into()));
        }
        Ok(Self { center, radius, q })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

#[derive(Clone, Debug)]
pub enum FeasibleSet {
    Vertices(VertexSet),
    Ball(LqBall),
}

impl FeasibleSet {
    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Vertices(v) => v.dim(),
            FeasibleSet::Ball(b) => b.dim(),
        }
    }

    pub fn as_vertices(&self) -> Option<&VertexSet> {
        match self {
            FeasibleSet::Vertices(v) => Some(v),
            FeasibleSet::Ball(_) => None,
        }
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Index of the vertex minimizing `⟨v, g⟩`, smallest index on ties.
pub fn lmo_vertices(set: &VertexSet, g: &[f64]) -> Result<usize> {
    check_dim(set.dim(), g.len())?;
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("gradient has a non-finite entry".into()));
    }
    let mut best = 0;
    let mut best_val = linalg::dot(set.vertex(0), g);
    for i in 1..set.len() {
        let val = linalg::dot(set.vertex(i), g);
        if val < best_val {
            best = i;
            best_val = val;
        }
    }
    Ok(best)
}

/// Minimizer of `⟨v, g⟩` over an ℓq ball:
/// `v = center − radius · sign(g) |g|^{s−1} / ‖g‖_s^{s−1}` with `s = q/(q−1)`.
pub fn lmo_lq_ball(ball: &LqBall, g: &[f64]) -> Result<Vec<f64>> {
    check_dim(ball.dim(), g.len())?;
    let scale = linalg::max_abs(g);
    if scale == 0.0 {
        return Err(Error::DegenerateGradient);
    }
    let s = ball.q() / (ball.q() - 1.0);
    // Work on g/scale so the powers stay in [0, 1].
    let mut dir: Vec<f64> = g
        .iter()
        .map(|&gi| (gi / scale).signum() * (gi.abs() / scale).powf(s - 1.0))
        .collect();
    let norm_s_pow: f64 = g.iter().map(|&gi| (gi.abs() / scale).powf(s)).sum::<f64>();
    let denom = norm_s_pow.powf((s - 1.0) / s);
    for d in &mut dir {
        *d /= denom;
    }
    Ok(ball
        .center()
        .iter()
        .zip(&dir)
        .map(|(&c, &d)| c - ball.radius() * d)
        .collect())
}

/// Index minimizing `⟨v, g⟩ + λ ‖v − x‖₂²`; with `λ = 0` this is exactly
/// [`lmo_vertices`].
pub fn nep_select(set: &VertexSet, g: &[f64], x: &[f64], lambda: f64) -> Result<usize> {
    check_dim(set.dim(), g.len())?;
    check_dim(set.dim(), x.len())?;
    if lambda < 0.0 {
        return Err(Error::Input(format!("nep penalty must be nonnegative, got {lambda}")));
    }
    let score = |i: usize| {
        let v = set.vertex(i);
        let d = linalg::l2_dist(v, x);
        linalg::dot(v, g) + lambda * d * d
    };
    let mut best = 0;
    let mut best_val = score(0);
    for i in 1..set.len() {
        let val = score(i);
        if val < best_val {
            best = i;
            best_val = val;
        }
    }
    Ok(best)
}

/// `max_{i,j} ‖v_i − v_j‖_p` by exhaustive pair scan; 0 for a single vertex.
pub fn diameter(set: &VertexSet, p: f64) -> f64 {
    let mut best = 0.0f64;
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            best = best.max(linalg::lp_dist(set.vertex(i), set.vertex(j), p));
        }
    }
    best
}

/// Over this many vertices, derived constants use [`diameter_2approx`]
/// instead of the quadratic scan.
pub const EXACT_DIAMETER_LIMIT: usize = 5000;

/// Upper bound on the diameter within a factor of two: twice the largest
/// distance to the first vertex (triangle inequality). Envelope assertions
/// built on it are looser but still valid.
pub fn diameter_2approx(set: &VertexSet, p: f64) -> f64 {
    let anchor = set.vertex(0);
    let mut best = 0.0f64;
    for i in 1..set.len() {
        best = best.max(linalg::lp_dist(anchor, set.vertex(i), p));
    }
    2.0 * best
}

/// Weighted sum of vertices; weights must be nonnegative and sum to 1.
pub fn combination_point(set: &VertexSet, weights: &[f64]) -> Result<Vec<f64>> {
    check_dim(set.len(), weights.len())?;
    if let Some(w) = weights.iter().find(|&&w| w < 0.0) {
        return Err(Error::InvariantViolation(format!("negative weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::InvariantViolation(format!(
            "weights sum to {total}, deviation exceeds {WEIGHT_SUM_TOLERANCE}"
        )));
    }
    let mut point = vec![0.0; set.dim()];
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (pk, &vk) in point.iter_mut().zip(set.vertex(i)) {
            *pk += w * vk;
        }
    }
    Ok(point)
}

/// Sparse convex decomposition: strictly positive weights over atom indices,
/// plus the reconstructed point. Support entries stay sorted by index.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvexCombination {
    support: Vec<(usize, f64)>,
    point: Vec<f64>,
}

impl ConvexCombination {
    /// Decomposition `1 · atom`.
    pub fn singleton(index: usize, point: Vec<f64>) -> Self {
        Self {
            support: vec![(index, 1.0)],
            point,
        }
    }

    pub fn support(&self) -> &[(usize, f64)] {
        &self.support
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn cardinality(&self) -> usize {
        self.support.len()
    }

    pub fn weight_of(&self, index: usize) -> f64 {
        match self.support.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.support[pos].1,
            Err(_) => 0.0,
        }
    }

    /// `x ← (1−γ)x + γ·v`: scales every weight by `1−γ` and merges `γ` into
    /// the entry for `index` (re-selection does not grow the support).
    pub fn fw_step(&mut self, gamma: f64, index: usize) {
        for (_, w) in &mut self.support {
            *w *= 1.0 - gamma;
        }
        match self.support.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.support[pos].1 += gamma,
            Err(pos) => self.support.insert(pos, (index, gamma)),
        }
        self.prune_and_renormalize();
    }

    /// Away step `x ← (1+γ)x − γ·a`: the away atom sheds weight; a full step
    /// (γ at its cap) drops it from the support entirely.
    pub fn away_step(&mut self, gamma: f64, away_index: usize) {
        for (_, w) in &mut self.support {
            *w *= 1.0 + gamma;
        }
        if let Ok(pos) = self.support.binary_search_by_key(&away_index, |&(i, _)| i) {
            self.support[pos].1 -= gamma;
        }
        self.prune_and_renormalize();
    }

    /// Replaces the weights wholesale (fully-corrective reoptimization).
    /// Entries of `weights` align with `indices`.
    pub fn set_weights(&mut self, indices: &[usize], weights: &[f64]) {
        debug_assert_eq!(indices.len(), weights.len());
        let mut support: Vec<(usize, f64)> = indices
            .iter()
            .zip(weights)
            .map(|(&i, &w)| (i, w))
            .collect();
        support.sort_unstable_by_key(|&(i, _)| i);
        self.support = support;
        self.prune_and_renormalize();
    }

    fn prune_and_renormalize(&mut self) {
        self.support.retain(|&(_, w)| w > WEIGHT_PRUNE_THRESHOLD);
        let total: f64 = self.support.iter().map(|&(_, w)| w).sum();
        if total > 0.0 {
            for (_, w) in &mut self.support {
                *w /= total;
            }
        }
    }

    /// Recomputes the point from the support; `atom` resolves indices.
    pub fn refresh_point<'a>(&mut self, mut atom: impl FnMut(usize) -> &'a [f64]) {
        let dim = self.point.len();
        let mut point = vec![0.0; dim];
        for &(i, w) in &self.support {
            let v = atom(i);
            for k in 0..dim {
                point[k] += w * v[k];
            }
        }
        self.point = point;
    }

    /// Max reconstruction error `‖point − Σ w_i atom_i‖_∞`, for invariant checks.
    pub fn reconstruction_error<'a>(&self, mut atom: impl FnMut(usize) -> &'a [f64]) -> f64 {
        let mut recon = vec![0.0; self.point.len()];
        for &(i, w) in &self.support {
            let v = atom(i);
            for k in 0..recon.len() {
                recon[k] += w * v[k];
            }
        }
        recon
            .iter()
            .zip(&self.point)
            .fold(0.0f64, |m, (&r, &p)| m.max((r - p).abs()))
    }

    pub fn weight_sum(&self) -> f64 {
        self.support.iter().map(|&(_, w)| w).sum()
    }
}

/// Problem constants derived from a feasible set and an objective exponent.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DerivedConstants {
    /// Diameter in the ℓp-norm of the objective.
    pub d_p: f64,
    /// Diameter in the ℓ2-norm.
    pub d_2: f64,
    /// Smoothness constant of `½‖·−x*‖_p²`, namely `p − 1`.
    pub smoothness: f64,
    /// ℓ2-Lipschitz constant of `‖·−x*‖_p`: `n^{1/p−1/2}` for `p ∈ [1,2)`,
    /// `1` for `p = ∞`.
    pub lipschitz_l2: f64,
}

/// `G₂`, the ℓ2-Lipschitz constant of the ℓp-norm objective.
pub fn lipschitz_l2(n: usize, p: f64) -> f64 {
    if p == f64::INFINITY {
        1.0
    } else if p < 2.0 {
        (n as f64).powf(1.0 / p - 0.5)
    } else {
        1.0
    }
}

impl DerivedConstants {
    pub fn for_set(set: &FeasibleSet, p: f64) -> Self {
        let (d_p, d_2) = match set {
            FeasibleSet::Vertices(v) if v.len() > EXACT_DIAMETER_LIMIT => {
                (diameter_2approx(v, p), diameter_2approx(v, 2.0))
            }
            FeasibleSet::Vertices(v) => (diameter(v, p), diameter(v, 2.0)),
            FeasibleSet::Ball(b) => {
                // Diameter of an ℓq ball in the ℓp-norm: the extreme pair is
                // ±radius·u with u the ℓq-unit vector maximizing ‖u‖_p.
                // For p ≥ q the maximizer is a coordinate axis (‖·‖_p ≤ ‖·‖_q
                // region); for p < q it is the uniform vector.
                let n = b.dim() as f64;
                let q = b.q();
                let axis = |p: f64| {
                    if p >= q {
                        2.0 * b.radius()
                    } else {
                        2.0 * b.radius() * n.powf(1.0 / p - 1.0 / q)
                    }
                };
                (axis(p), axis(2.0))
            }
        };
        Self {
            d_p,
            d_2,
            smoothness: if p.is_finite() { (p - 1.0).max(0.0) } else { 0.0 },
            lipschitz_l2: lipschitz_l2(set.dim(), p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn vset(vs: &[&[f64]]) -> VertexSet {
        VertexSet::new(vs.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    #[test]
    fn lmo_picks_min_inner_product() {
        let set = vset(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(lmo_vertices(&set, &[1.0, 0.0]).unwrap(), 1);

        let set = vset(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, -1.0]]);
        assert_eq!(lmo_vertices(&set, &[1.0, 1.0]).unwrap(), 2);
    }

    #[test]
    fn lmo_tie_breaks_to_smallest_index() {
        let set = vset(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(lmo_vertices(&set, &[0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn lmo_dimension_mismatch() {
        let set = vset(&[&[1.0, 0.0]]);
        assert!(matches!(
            lmo_vertices(&set, &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn lmo_certifies_optimality_on_random_inputs() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..50 {
            let set = VertexSet::new((0..7).map(|_| rng.gaussian_vec(4)).collect()).unwrap();
            let g = rng.gaussian_vec(4);
            let i = lmo_vertices(&set, &g).unwrap();
            let best = linalg::dot(set.vertex(i), &g);
            for j in 0..set.len() {
                assert!(best <= linalg::dot(set.vertex(j), &g) + 1e-12);
            }
        }
    }

    #[test]
    fn ball_lmo_l2_cases() {
        let ball = LqBall::new(vec![0.0, 0.0], 1.0, 2.0).unwrap();
        let v = lmo_lq_ball(&ball, &[3.0, 4.0]).unwrap();
        assert!((v[0] + 0.6).abs() < 1e-12 && (v[1] + 0.8).abs() < 1e-12);

        let v = lmo_lq_ball(&ball, &[1.0, 0.0]).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-12 && v[1].abs() < 1e-12);
    }

    #[test]
    fn ball_lmo_l4_matches_grid_search() {
        // Independent oracle: parametrize the l4 unit sphere in 2-D and scan.
        let ball = LqBall::new(vec![0.0, 0.0], 1.0, 4.0).unwrap();
        let g = [1.0, 1.0];
        let v = lmo_lq_ball(&ball, &g).unwrap();

        let mut best = f64::INFINITY;
        let mut best_pt = [0.0, 0.0];
        let steps = 4_000_000usize;
        for k in 0..=steps {
            let t = -1.0 + 2.0 * k as f64 / steps as f64;
            let y = (1.0 - t.abs().powi(4)).powf(0.25);
            for sy in [-y, y] {
                let val = t * g[0] + sy * g[1];
                if val < best {
                    best = val;
                    best_pt = [t, sy];
                }
            }
        }
        let expected = -(2f64.powf(-0.25));
        assert!((best_pt[0] - expected).abs() < 1e-6);
        assert!((v[0] - expected).abs() < 1e-6, "{} vs {}", v[0], expected);
        assert!((v[1] - expected).abs() < 1e-6);
    }

    #[test]
    fn ball_lmo_zero_gradient_is_degenerate() {
        let ball = LqBall::new(vec![0.0, 0.0], 1.0, 2.0).unwrap();
        assert!(matches!(lmo_lq_ball(&ball, &[0.0, 0.0]), Err(Error::DegenerateGradient)));
    }

    #[test]
    fn ball_lmo_lies_on_sphere_and_beats_random_directions() {
        let mut rng = SplitMix64::new(5);
        for &q in &[2.0, 3.0, 4.0, 8.0] {
            let ball = LqBall::new(vec![0.5, -1.0, 2.0], 1.5, q).unwrap();
            let g = rng.gaussian_vec(3);
            let v = lmo_lq_ball(&ball, &g).unwrap();
            let shifted = linalg::sub(&v, ball.center());
            assert!(
                (linalg::lp_norm(&shifted, q) - ball.radius()).abs() < 1e-10,
                "q={q}: boundary violated"
            );
            let opt = linalg::dot(&v, &g);
            for _ in 0..1000 {
                let u = rng.gaussian_vec(3);
                let un = linalg::lp_norm(&u, q);
                if un == 0.0 {
                    continue;
                }
                let cand: Vec<f64> = ball
                    .center()
                    .iter()
                    .zip(&u)
                    .map(|(&c, &ui)| c + ball.radius() * ui / un)
                    .collect();
                assert!(opt <= linalg::dot(&cand, &g) + 1e-8);
            }
        }
    }

    #[test]
    fn nep_reduces_to_lmo_at_zero_penalty() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..30 {
            let set = VertexSet::new((0..6).map(|_| rng.gaussian_vec(3)).collect()).unwrap();
            let g = rng.gaussian_vec(3);
            let x = rng.gaussian_vec(3);
            assert_eq!(
                nep_select(&set, &g, &x, 0.0).unwrap(),
                lmo_vertices(&set, &g).unwrap()
            );
        }
    }

    #[test]
    fn nep_prefers_nearest_on_zero_gradient() {
        let set = vset(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(nep_select(&set, &[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap(), 0);
    }

    #[test]
    fn nep_trades_linear_term_against_proximity() {
        // scores: <(2,0),(1,0)> + 1·4 = 6 vs <(0,1),(1,0)> + 1·1 = 1
        let set = vset(&[&[2.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(nep_select(&set, &[1.0, 0.0], &[0.0, 0.0], 1.0).unwrap(), 1);
    }

    #[test]
    fn nep_equal_norm_identity() {
        // With equal-l2-norm vertices the penalty reduces to a gradient shift.
        let mut rng = SplitMix64::new(21);
        for _ in 0..30 {
            let vs: Vec<Vec<f64>> = (0..8)
                .map(|_| {
                    let v = rng.gaussian_vec(4);
                    let n = linalg::l2_norm(&v);
                    v.iter().map(|x| x / n).collect()
                })
                .collect();
            let set = VertexSet::new(vs).unwrap();
            let g = rng.gaussian_vec(4);
            let x = rng.gaussian_vec(4);
            let lambda = rng.next_f64() * 3.0;
            let shifted: Vec<f64> = g.iter().zip(&x).map(|(&gi, &xi)| gi - 2.0 * lambda * xi).collect();
            assert_eq!(
                nep_select(&set, &g, &x, lambda).unwrap(),
                lmo_vertices(&set, &shifted).unwrap()
            );
        }
    }

    #[test]
    fn diameter_examples() {
        let set = vset(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(diameter(&set, 2.0), 1.0);

        let set = vset(&[&[0.0, 0.0], &[1.0, 1.0]]);
        assert_eq!(diameter(&set, f64::INFINITY), 1.0);

        // three pairs: 1, 1, and 2^{1/3}
        let set = vset(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!((diameter(&set, 3.0) - 2f64.powf(1.0 / 3.0)).abs() < 1e-14);

        let single = vset(&[&[4.0, 5.0]]);
        assert_eq!(diameter(&single, 2.0), 0.0);
    }

    #[test]
    fn approximate_diameter_brackets_the_exact_one() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..20 {
            let set = VertexSet::new((0..15).map(|_| rng.gaussian_vec(4)).collect()).unwrap();
            for &p in &[1.0, 2.0, 4.0, f64::INFINITY] {
                let exact = diameter(&set, p);
                let approx = diameter_2approx(&set, p);
                assert!(approx >= exact - 1e-12);
                assert!(approx <= 2.0 * exact + 1e-12);
            }
        }
    }

    #[test]
    fn combination_point_examples() {
        let set = vset(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(combination_point(&set, &[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(combination_point(&set, &[0.5, 0.5]).unwrap(), vec![0.5, 0.5]);

        let tri = vset(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let p = combination_point(&tri, &[0.25, 0.25, 0.5]).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn combination_point_rejects_bad_weights() {
        let set = vset(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            combination_point(&set, &[-0.1, 1.1]),
            Err(Error::InvariantViolation(_))
        ));
        assert!(matches!(
            combination_point(&set, &[0.7, 0.7]),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn fw_step_merges_reselected_vertex() {
        let set = vset(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let mut comb = ConvexCombination::singleton(0, set.vertex(0).to_vec());
        comb.fw_step(0.5, 1);
        comb.refresh_point(|i| set.vertex(i));
        assert_eq!(comb.cardinality(), 2);
        comb.fw_step(0.5, 1);
        comb.refresh_point(|i| set.vertex(i));
        assert_eq!(comb.cardinality(), 2, "re-selection must not grow support");
        assert!((comb.weight_of(1) - 0.75).abs() < 1e-15);
        assert!((comb.point()[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn away_step_full_drop_removes_atom() {
        let set = vset(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let mut comb = ConvexCombination::singleton(0, set.vertex(0).to_vec());
        comb.fw_step(0.25, 1); // weights (0.75, 0.25)
        let alpha = comb.weight_of(1);
        let cap = alpha / (1.0 - alpha);
        comb.away_step(cap, 1);
        comb.refresh_point(|i| set.vertex(i));
        assert_eq!(comb.cardinality(), 1);
        assert!((comb.weight_of(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vertex_set_json_round_trip_and_validation() {
        let set = vset(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let s = set.to_json_string();
        let back = VertexSet::from_json_str(&s).unwrap();
        assert_eq!(set, back);

        let ragged = r#"{"n": 2, "vertices": [[1.0, 2.0], [3.0]]}"#;
        assert!(VertexSet::from_json_str(ragged).is_err());
    }

    #[test]
    fn derived_constants_norm_comparison() {
        let mut rng = SplitMix64::new(17);
        let set = FeasibleSet::Vertices(
            VertexSet::new((0..9).map(|_| rng.gaussian_vec(5)).collect()).unwrap(),
        );
        for &p in &[1.0, 1.5, 2.0, 3.0, 7.0, f64::INFINITY] {
            let c = DerivedConstants::for_set(&set, p);
            let factor = if p.is_finite() && p < 2.0 {
                (5f64).powf(1.0 / p - 0.5)
            } else {
                1.0
            };
            assert!(c.d_p <= factor * c.d_2 + 1e-12, "p={p}");
            assert!(c.d_p >= 0.0 && c.d_2 >= 0.0);
        }
    }
}
