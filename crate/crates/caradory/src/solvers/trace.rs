//! Per-iteration run records and their CSV / JSON wire formats.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{ConvexCombination, DerivedConstants};
use crate::objectives::Mode;

use super::{Algorithm, StepRule};

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    /// Primal (or dual-gap) stopping criterion met.
    Converged,
    /// Iteration budget exhausted before the criterion.
    IterCap,
    /// Zero Frank-Wolfe gap or zero gradient before the criterion.
    Degenerate,
}

/// One record per iterate `x_t`. `gamma`/`vertex`/`beta` describe the step
/// taken *from* `x_t`; they are absent on the terminal row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub f_value: f64,
    pub primal_gap: f64,
    pub cardinality: usize,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub vertex: Option<usize>,
    pub elapsed_ms: f64,
}

/// Run provenance embedded in every trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub algorithm: Algorithm,
    pub step: StepRule,
    #[serde(with = "crate::serde_p")]
    pub p: f64,
    pub mode: Mode,
    pub epsilon: f64,
    pub seed: u64,
    pub max_iter: usize,
    /// Smoothness constant actually used by step rules.
    pub smoothness: f64,
    pub constants: DerivedConstants,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub meta: TraceMeta,
    pub rows: Vec<TraceRow>,
    pub status: Status,
}

pub const CSV_COLUMNS: &str = "t,f_value,primal_gap,cardinality,gamma,beta,vertex_index,elapsed_ms";

fn fmt_opt_f(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl RunTrace {
    pub fn final_row(&self) -> &TraceRow {
        self.rows.last().expect("trace always has at least one row")
    }

    /// The iteration index of the first row whose objective error (in the
    /// norm of the run) is at most `epsilon`, together with that row.
    pub fn first_row_within(&self, epsilon: f64) -> Option<&TraceRow> {
        self.rows.iter().find(|r| match self.meta.mode {
            Mode::SmoothSquared => r.primal_gap <= epsilon * epsilon / 2.0,
            Mode::NonsmoothNorm => r.primal_gap <= epsilon,
        })
    }

    /// Mathematical equality: identical rows except for wall-clock times.
    pub fn same_path(&self, other: &RunTrace) -> bool {
        self.status == other.status
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| {
                    a.t == b.t
                        && a.f_value.to_bits() == b.f_value.to_bits()
                        && a.primal_gap.to_bits() == b.primal_gap.to_bits()
                        && a.cardinality == b.cardinality
                        && a.gamma.map(f64::to_bits) == b.gamma.map(f64::to_bits)
                        && a.beta.map(f64::to_bits) == b.beta.map(f64::to_bits)
                        && a.vertex == b.vertex
                })
    }

    /// CSV with `# key=value` provenance header lines.
    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        out.push_str(&format!(
            "# algorithm={:?} step={:?} p={} epsilon={} seed={} max_iter={} status={:?}\n",
            m.algorithm,
            m.step,
            if m.p.is_finite() { m.p.to_string() } else { "inf".into() },
            m.epsilon,
            m.seed,
            m.max_iter,
            self.status,
        ));
        out.push_str(&format!(
            "# D_p={} D_2={} L={} G_2={}\n",
            m.constants.d_p, m.constants.d_2, m.smoothness, m.constants.lipschitz_l2
        ));
        out.push_str(CSV_COLUMNS);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.t,
                r.f_value,
                r.primal_gap,
                r.cardinality,
                fmt_opt_f(r.gamma),
                fmt_opt_f(r.beta),
                r.vertex.map(|i| i.to_string()).unwrap_or_default(),
                r.elapsed_ms,
            ));
        }
        out
    }
}

/// JSON mirror of the CSV trace, plus the terminal decomposition. For runs
/// over a ball, `ball_atoms[i]` is the boundary point behind support index `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub meta: TraceMeta,
    pub rows: Vec<TraceRow>,
    pub status: Status,
    pub combination: ConvexCombination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_atoms: Option<Vec<Vec<f64>>>,
}

impl TraceJson {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
