//! Sparse approximate convex decompositions and sparse approximate
//! ℓp-projections via the Frank-Wolfe family.
//!
//! Given a compact convex set (an explicit vertex list or an ℓq ball) and a
//! target point, the solvers build the target as a convex combination of few
//! extreme points, to accuracy ε in a chosen ℓp-norm:
//!
//! * `p ∈ [2, ∞)` — Frank-Wolfe on the smooth objective `½‖x − x*‖_p²`, with
//!   open- or closed-loop steps, a nearest-extreme-point oracle variant,
//!   away steps, and a fully-corrective variant;
//! * `p ∈ [1, 2) ∪ {∞}` — conditional gradient over the Moreau envelope of
//!   `‖x − x*‖_p`, with a decaying or fixed smoothing schedule.
//!
//! Each run yields a [`geometry::ConvexCombination`] and a per-iteration
//! [`solvers::RunTrace`]; [`solvers::evaluate_bound`] turns published
//! convergence-rate guarantees into machine-checkable per-iteration
//! envelopes over those traces, and [`instances`] provides seeded benchmark
//! generators, the Hadamard cardinality lower bound, and a certified
//! brute-force oracle for small instances.

pub mod error;
pub mod geometry;
pub mod instances;
pub mod objectives;
pub mod rng;
pub mod solvers;

mod linalg;
pub mod serde_p;

pub use error::{Error, Result};
pub use geometry::{ConvexCombination, DerivedConstants, FeasibleSet, LqBall, VertexSet};
pub use instances::InstanceDescriptor;
pub use objectives::{Mode, ObjectiveSpec};
pub use solvers::{
    Algorithm, RunTrace, Solution, SolverConfig, StartRule, Status, StepRule, TheoremId,
    TheoryBounds,
};
