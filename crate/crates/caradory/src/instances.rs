//! Benchmark instances and ground truth: random polytopes with planted
//! dense or sparse targets, Hadamard lower-bound instances, the cardinality
//! lower-bound curve, and a certified brute-force oracle for small vertex
//! sets. All randomness flows through the seeded [`SplitMix64`] stream, so a
//! `(params, seed)` pair regenerates bit-identical instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, LqBall, VertexSet};
use crate::linalg;
use crate::objectives::{lp_sq_gradient, ObjectiveSpec};
use crate::rng::SplitMix64;
use crate::solvers::minimize_over_hull;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceKind {
    Random { n: usize, m: usize, k: usize, seed: u64 },
    Hadamard { n: usize },
    Ball { q: f64, radius: f64 },
}

/// A realized instance: feasible set, target, objective exponent, and
/// whatever ground truth the construction knows.
#[derive(Clone, Debug)]
pub struct InstanceDescriptor {
    pub kind: InstanceKind,
    pub set: FeasibleSet,
    pub target: Vec<f64>,
    pub p: f64,
    /// Number of atoms in the planting construction, when the target was
    /// planted (upper bound on the minimal cardinality).
    pub ground_truth_cardinality: Option<usize>,
    /// Planted decomposition of the target, index-aligned with the vertex set.
    pub ground_truth_weights: Option<Vec<(usize, f64)>>,
    /// `dist_p(x*, C)` when known in closed form (ball projections).
    pub known_distance: Option<f64>,
    /// Euclidean projection of the target when known in closed form.
    pub known_proj2: Option<Vec<f64>>,
}

impl InstanceDescriptor {
    pub fn objective(&self) -> Result<ObjectiveSpec> {
        ObjectiveSpec::new(self.target.clone(), self.p)
    }

    /// Replaces the objective exponent (generators default to `p = 2`).
    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    /// Whether the target lies outside the feasible set by construction.
    pub fn is_projection_instance(&self) -> bool {
        match (&self.set, &self.known_distance) {
            (_, Some(d)) => *d > 0.0,
            _ => false,
        }
    }
}

/// `m` standard-Gaussian vertices in `R^n`; the target is a Dirichlet(1)
/// convex combination of a uniformly chosen `k`-subset. Draw order (vertices
/// row-major, then the subset, then the weights) is fixed, so a seed pins
/// the instance bit-for-bit.
pub fn gen_random_polytope(n: usize, m: usize, k: usize, seed: u64) -> InstanceDescriptor {
    assert!(n >= 1 && m >= 1 && (1..=m).contains(&k), "need 1 <= k <= m, n >= 1");
    let mut rng = SplitMix64::new(seed);
    let vertices: Vec<Vec<f64>> = (0..m).map(|_| rng.gaussian_vec(n)).collect();
    let subset = rng.choose_k(m, k);
    let weights = rng.dirichlet(k);
    let mut target = vec![0.0; n];
    for (&idx, &w) in subset.iter().zip(&weights) {
        for (t, &v) in target.iter_mut().zip(&vertices[idx]) {
            *t += w * v;
        }
    }
    let set = VertexSet::new(vertices).expect("generated vertices are rectangular and finite");
    InstanceDescriptor {
        kind: InstanceKind::Random { n, m, k, seed },
        set: FeasibleSet::Vertices(set),
        target,
        p: 2.0,
        ground_truth_cardinality: Some(k),
        ground_truth_weights: Some(subset.into_iter().zip(weights).collect()),
        known_distance: None,
        known_proj2: None,
    }
}

/// Sylvester Hadamard matrix: `H_1 = [1]`, `H_{2k} = [[H, H], [H, −H]]`.
pub fn hadamard(n: usize) -> Result<Vec<Vec<i64>>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Input(format!("Hadamard dimension must be a power of two, got {n}")));
    }
    let mut h = vec![vec![1i64]];
    let mut size = 1;
    while size < n {
        let mut next = vec![vec![0i64; 2 * size]; 2 * size];
        for i in 0..size {
            for j in 0..size {
                let v = h[i][j];
                next[i][j] = v;
                next[i][j + size] = v;
                next[i + size][j] = v;
                next[i + size][j + size] = -v;
            }
        }
        h = next;
        size *= 2;
    }
    Ok(h)
}

/// The lower-bound instance: vertices are the ℓp-normalized Hadamard
/// columns `H_n / n^{1/p}`, and the target is their uniform combination
/// `e₁ / n^{1/p}`.
pub fn hadamard_instance(n: usize, p: f64) -> Result<InstanceDescriptor> {
    if !(2.0..f64::INFINITY).contains(&p) {
        return Err(Error::Input(format!(
            "the Hadamard instance is defined for p in [2, inf), got {p}"
        )));
    }
    let h = hadamard(n)?;
    let scale = (n as f64).powf(-1.0 / p);
    let vertices: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| h[i][j] as f64 * scale).collect())
        .collect();
    let mut target = vec![0.0; n];
    target[0] = scale;
    let uniform = 1.0 / n as f64;
    let set = VertexSet::new(vertices)?;
    Ok(InstanceDescriptor {
        kind: InstanceKind::Hadamard { n },
        set: FeasibleSet::Vertices(set),
        target,
        p,
        ground_truth_cardinality: Some(n),
        ground_truth_weights: Some((0..n).map(|j| (j, uniform)).collect()),
        known_distance: None,
        known_proj2: None,
    })
}

/// An ℓq-ball instance centered at the origin with an explicit target.
/// Closed-form ground truth (distance, Euclidean projection) is attached
/// for the `q = 2` case.
pub fn ball_instance(q: f64, radius: f64, target: Vec<f64>, p: f64) -> Result<InstanceDescriptor> {
    let ball = LqBall::new(vec![0.0; target.len()], radius, q)?;
    let (known_distance, known_proj2) = if q == 2.0 && p == 2.0 {
        let norm = linalg::l2_norm(&target);
        if norm > radius {
            let proj: Vec<f64> = target.iter().map(|&t| radius * t / norm).collect();
            (Some(norm - radius), Some(proj))
        } else {
            (Some(0.0), None)
        }
    } else {
        (None, None)
    };
    Ok(InstanceDescriptor {
        kind: InstanceKind::Ball { q, radius },
        set: FeasibleSet::Ball(ball),
        target,
        p,
        ground_truth_cardinality: None,
        ground_truth_weights: None,
        known_distance,
        known_proj2,
    })
}

/// Theorem lower bound: any point of the Hadamard instance within ε of the
/// target is a combination of at least `1/(ε² + 1/n)` vertices.
pub fn lower_bound_cardinality(n: usize, epsilon: f64) -> Result<f64> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Input(format!("Hadamard dimension must be a power of two, got {n}")));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Input(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(1.0 / (epsilon * epsilon + 1.0 / n as f64))
}

/// The accuracy-per-cardinality curve `s ↦ ε(s) = √(1/s − 1/n)`, `s ∈ [1, n]`.
#[derive(Clone, Copy, Debug)]
pub struct LowerBoundCurve {
    pub n: usize,
}

impl LowerBoundCurve {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Input(format!(
                "Hadamard dimension must be a power of two, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn epsilon_at(&self, s: f64) -> f64 {
        (1.0 / s - 1.0 / self.n as f64).max(0.0).sqrt()
    }

    pub fn points(&self) -> Vec<(usize, f64)> {
        (1..=self.n).map(|s| (s, self.epsilon_at(s as f64))).collect()
    }
}

/// A certified two-sided bracket of `dist_p(x*, C)`.
#[derive(Clone, Copy, Debug)]
pub struct CertifiedDistance {
    /// Rigorous lower bound from the Frank-Wolfe duality gap.
    pub lower: f64,
    /// Achieved feasible distance (upper bound).
    pub upper: f64,
    /// Terminal duality gap of the certifying run.
    pub certificate_gap: f64,
}

/// Exhaustive minimal-cardinality certificate.
#[derive(Clone, Debug)]
pub struct CardinalityCertificate {
    pub cardinality: usize,
    /// Vertex subset realizing it.
    pub subset: Vec<usize>,
    /// Membership residual `‖Σ w_i v_i − x*‖₂` of the witness.
    pub residual: f64,
}

/// Ground truth for small instances: the ℓp distance from the target to the
/// hull (certified via duality) and the exact minimal cardinality (by
/// subset enumeration, `m ≤ 12`).
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub distance: CertifiedDistance,
    pub cardinality: CardinalityCertificate,
}

const MEMBERSHIP_RESIDUAL: f64 = 1e-9;
const ORACLE_GAP_TARGET: f64 = 1e-12;

/// Certified `dist_p(x*, C)` for `p ∈ [2, ∞)`: minimizes `½‖Σw_i v_i − x*‖_p²`
/// over the weight simplex and converts the terminal duality gap into a
/// two-sided bracket. The `lower` field is a true lower bound regardless of
/// how tight the run got.
pub fn oracle_distance(set: &VertexSet, target: &[f64], p: f64) -> Result<CertifiedDistance> {
    if !(2.0..f64::INFINITY).contains(&p) {
        return Err(Error::Input(format!(
            "oracle distances are certified for p in [2, inf) only, got {p}"
        )));
    }
    if set.dim() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: target.len(),
        });
    }
    let spec = ObjectiveSpec::new(target.to_vec(), p)?;
    let atoms: Vec<&[f64]> = (0..set.len()).map(|i| set.vertex(i)).collect();
    let cap = 50_000.max(200 * set.len() * set.len());
    let sol = minimize_over_hull(
        &atoms,
        None,
        &mut |y| lp_sq_gradient(y, &spec),
        p - 1.0,
        p,
        ORACLE_GAP_TARGET,
        cap,
    );
    let mut y = vec![0.0; set.dim()];
    for (w, a) in sol.weights.iter().zip(&atoms) {
        for (yk, &ak) in y.iter_mut().zip(*a) {
            *yk += w * ak;
        }
    }
    let f = crate::objectives::lp_sq_value(&y, &spec);
    let gap = sol.fw_gap.max(0.0);
    Ok(CertifiedDistance {
        lower: (2.0 * (f - gap).max(0.0)).sqrt(),
        upper: (2.0 * f).sqrt(),
        certificate_gap: gap,
    })
}

/// Whether the target lies in the convex hull of the given vertex subset,
/// plus the least-squares membership residual.
pub fn hull_membership(set: &VertexSet, subset: &[usize], target: &[f64]) -> Result<(bool, f64)> {
    if subset.is_empty() || subset.iter().any(|&i| i >= set.len()) {
        return Err(Error::Input("subset indices must be nonempty and in range".into()));
    }
    if set.dim() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: target.len(),
        });
    }
    Ok(subset_contains_target(set, subset, target))
}

fn subset_contains_target(set: &VertexSet, subset: &[usize], target: &[f64]) -> (bool, f64) {
    let spec = ObjectiveSpec::new(target.to_vec(), 2.0).expect("finite target");
    let atoms: Vec<&[f64]> = subset.iter().map(|&i| set.vertex(i)).collect();
    let sol = minimize_over_hull(
        &atoms,
        None,
        &mut |y| lp_sq_gradient(y, &spec),
        1.0,
        2.0,
        1e-20,
        20_000,
    );
    let mut y = vec![0.0; set.dim()];
    for (w, a) in sol.weights.iter().zip(&atoms) {
        for (yk, &ak) in y.iter_mut().zip(*a) {
            *yk += w * ak;
        }
    }
    let residual = linalg::l2_dist(&y, target);
    (residual <= MEMBERSHIP_RESIDUAL, residual)
}

fn subsets_of_size(m: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn recurse(m: usize, size: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..m {
            if m - i < size - current.len() {
                break;
            }
            current.push(i);
            recurse(m, size, i + 1, current, out);
            current.pop();
        }
    }
    recurse(m, size, 0, &mut current, &mut out);
    out
}

/// Minimal number of vertices whose hull contains the target, by enumerating
/// subsets in increasing size, each checked with a simplex-constrained
/// least-squares membership test.
pub fn minimal_cardinality(set: &VertexSet, target: &[f64]) -> Result<CardinalityCertificate> {
    if set.len() > 12 {
        return Err(Error::UnsupportedSize(format!(
            "minimal-cardinality search enumerates subsets and supports m <= 12, got m = {}",
            set.len()
        )));
    }
    if set.dim() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: target.len(),
        });
    }
    for size in 1..=set.len() {
        for subset in subsets_of_size(set.len(), size) {
            let (member, residual) = subset_contains_target(set, &subset, target);
            if member {
                return Ok(CardinalityCertificate {
                    cardinality: size,
                    subset,
                    residual,
                });
            }
        }
    }
    Err(Error::Input(
        "target is not in the convex hull of the vertex set (within tolerance)".into(),
    ))
}

/// Distance plus minimal cardinality for a small instance.
pub fn exact_small_oracle(set: &VertexSet, target: &[f64], p: f64) -> Result<OracleResult> {
    let cardinality = minimal_cardinality(set, target)?;
    let distance = oracle_distance(set, target, p)?;
    Ok(OracleResult {
        distance,
        cardinality,
    })
}

// ---------------------------------------------------------------------------
// instance JSON wire format

#[derive(Serialize, Deserialize)]
struct InstanceWire {
    #[serde(flatten)]
    kind: InstanceKind,
    params: serde_json::Value,
    vertices: Option<Vec<Vec<f64>>>,
    target: Vec<f64>,
    #[serde(with = "crate::serde_p")]
    p: f64,
    ground_truth_cardinality: Option<usize>,
}

impl InstanceDescriptor {
    pub fn to_json_string(&self) -> Result<String> {
        let (vertices, params) = match &self.set {
            FeasibleSet::Vertices(v) => (
                Some(v.vertices().to_vec()),
                match &self.kind {
                    InstanceKind::Random { n, m, k, seed } => {
                        serde_json::json!({"n": n, "m": m, "k": k, "seed": seed})
                    }
                    InstanceKind::Hadamard { n } => serde_json::json!({"n": n}),
                    InstanceKind::Ball { .. } => serde_json::Value::Null,
                },
            ),
            FeasibleSet::Ball(b) => (
                None,
                serde_json::json!({"q": b.q(), "radius": b.radius(), "n": b.dim()}),
            ),
        };
        let wire = InstanceWire {
            kind: self.kind.clone(),
            params,
            vertices,
            target: self.target.clone(),
            p: self.p,
            ground_truth_cardinality: self.ground_truth_cardinality,
        };
        Ok(serde_json::to_string_pretty(&wire)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let wire: InstanceWire = serde_json::from_str(s)?;
        let set = match (&wire.kind, wire.vertices) {
            (InstanceKind::Ball { q, radius }, _) => {
                FeasibleSet::Ball(LqBall::new(vec![0.0; wire.target.len()], *radius, *q)?)
            }
            (_, Some(vertices)) => {
                let vs = VertexSet::new(vertices)?;
                if vs.dim() != wire.target.len() {
                    return Err(Error::Input(format!(
                        "target dimension {} does not match vertex dimension {}",
                        wire.target.len(),
                        vs.dim()
                    )));
                }
                FeasibleSet::Vertices(vs)
            }
            (_, None) => {
                return Err(Error::Input("polytope instance is missing its vertices".into()))
            }
        };
        Ok(InstanceDescriptor {
            kind: wire.kind,
            set,
            target: wire.target,
            p: wire.p,
            ground_truth_cardinality: wire.ground_truth_cardinality,
            ground_truth_weights: None,
            known_distance: None,
            known_proj2: None,
        })
    }
}
