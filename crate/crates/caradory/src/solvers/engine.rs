//! Shared solve state: start-point selection, atom bookkeeping for both
//! polytopes and balls, stopping rules, and trace recording.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{
    lmo_lq_ball, lmo_vertices, ConvexCombination, DerivedConstants, FeasibleSet, VertexSet,
};
use crate::linalg;
use crate::objectives::{lp_sq_value, lp_value, Mode, ObjectiveSpec};
use crate::rng::SplitMix64;

use super::trace::{RunTrace, Status, TraceMeta, TraceRow};
use super::{Solution, SolverConfig, StartRule};

/// Per-run options that the public entry points fix; the projection front
/// end adjusts them.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RunOpts {
    /// Known optimal objective value. `Some(0)` in decomposition mode;
    /// `None` switches stopping to the Frank-Wolfe dual gap.
    pub f_star: Option<f64>,
}

impl Default for RunOpts {
    fn default() -> Self {
        Self { f_star: Some(0.0) }
    }
}

pub(crate) enum AtomStore<'a> {
    Vertices(&'a VertexSet),
    Points { points: Vec<Vec<f64>> },
}

impl AtomStore<'_> {
    pub fn get(&self, i: usize) -> &[f64] {
        match self {
            AtomStore::Vertices(v) => v.vertex(i),
            AtomStore::Points { points } => &points[i],
        }
    }

    /// Registers a ball boundary point, merging bitwise-identical repeats.
    fn intern(&mut self, p: Vec<f64>) -> usize {
        match self {
            AtomStore::Vertices(_) => unreachable!("intern is only for ball runs"),
            AtomStore::Points { points } => {
                if let Some(i) = points
                    .iter()
                    .position(|q| q.len() == p.len() && q.iter().zip(&p).all(|(a, b)| a.to_bits() == b.to_bits()))
                {
                    i
                } else {
                    points.push(p);
                    points.len() - 1
                }
            }
        }
    }
}

pub(crate) struct Engine<'a> {
    pub set: &'a FeasibleSet,
    pub spec: &'a ObjectiveSpec,
    pub cfg: &'a SolverConfig,
    pub opts: RunOpts,
    pub consts: DerivedConstants,
    pub smoothness: f64,
    pub atoms: AtomStore<'a>,
    pub comb: ConvexCombination,
    pub x: Vec<f64>,
    rows: Vec<TraceRow>,
    iterates: Option<Vec<Vec<f64>>>,
    started: Instant,
}

impl<'a> Engine<'a> {
    pub fn new(
        set: &'a FeasibleSet,
        spec: &'a ObjectiveSpec,
        cfg: &'a SolverConfig,
        opts: RunOpts,
    ) -> Result<Self> {
        cfg.validate(spec)?;
        if set.dim() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                got: spec.dim(),
            });
        }
        let consts = DerivedConstants::for_set(set, spec.p());
        let smoothness = cfg.l_override.unwrap_or(consts.smoothness);
        let mut rng = SplitMix64::new(cfg.seed);

        let (atoms, start_index, x0) = match set {
            FeasibleSet::Vertices(v) => {
                let idx = match cfg.start {
                    StartRule::FirstVertex => 0,
                    StartRule::RandomVertex => rng.uniform_index(v.len()),
                };
                (AtomStore::Vertices(v), idx, v.vertex(idx).to_vec())
            }
            FeasibleSet::Ball(ball) => {
                let direction = rng.gaussian_vec(ball.dim());
                let x0 = lmo_lq_ball(ball, &direction)?;
                let mut store = AtomStore::Points { points: Vec::new() };
                let idx = store.intern(x0.clone());
                (store, idx, x0)
            }
        };

        Ok(Self {
            set,
            spec,
            cfg,
            opts,
            consts,
            smoothness,
            atoms,
            comb: ConvexCombination::singleton(start_index, x0.clone()),
            x: x0,
            rows: Vec::new(),
            iterates: cfg.record_iterates.then(Vec::new),
            started: Instant::now(),
        })
    }

    /// True objective at `x`: `½‖x−x*‖_p²` in smooth mode, `‖x−x*‖_p` otherwise.
    pub fn objective(&self, x: &[f64]) -> f64 {
        match self.spec.mode() {
            Mode::SmoothSquared => lp_sq_value(x, self.spec),
            Mode::NonsmoothNorm => lp_value(x, self.spec),
        }
    }

    pub fn primal_gap(&self, f: f64) -> f64 {
        f - self.opts.f_star.unwrap_or(0.0)
    }

    /// Primal stopping check; unavailable (always false) when the optimal
    /// value is unknown.
    pub fn primal_converged(&self, f: f64) -> bool {
        match self.opts.f_star {
            None => false,
            Some(fs) => {
                let gap = f - fs;
                match self.spec.mode() {
                    Mode::SmoothSquared => gap <= self.cfg.epsilon * self.cfg.epsilon / 2.0,
                    Mode::NonsmoothNorm => gap <= self.cfg.epsilon,
                }
            }
        }
    }

    /// Dual-gap stopping threshold, used when the optimal value is unknown.
    pub fn dual_gap_threshold(&self) -> f64 {
        match self.spec.mode() {
            Mode::SmoothSquared => self.cfg.epsilon * self.cfg.epsilon / 2.0,
            Mode::NonsmoothNorm => self.cfg.epsilon,
        }
    }

    pub fn dual_gap_stopping(&self) -> bool {
        self.opts.f_star.is_none()
    }

    /// Linear minimization over the feasible set; ball minimizers are
    /// interned as fresh atoms.
    pub fn lmo(&mut self, g: &[f64]) -> Result<usize> {
        match self.set {
            FeasibleSet::Vertices(v) => lmo_vertices(v, g),
            FeasibleSet::Ball(ball) => {
                let point = lmo_lq_ball(ball, g)?;
                Ok(self.atoms.intern(point))
            }
        }
    }

    pub fn vertices(&self) -> Result<&'a VertexSet> {
        match self.set {
            FeasibleSet::Vertices(v) => Ok(v),
            FeasibleSet::Ball(_) => Err(Error::Config(
                "this algorithm needs an explicit vertex list".into(),
            )),
        }
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        self.atoms.get(i)
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1e3
    }

    pub fn record(
        &mut self,
        t: usize,
        f: f64,
        gamma: Option<f64>,
        beta: Option<f64>,
        vertex: Option<usize>,
    ) {
        let row = TraceRow {
            t,
            f_value: f,
            primal_gap: self.primal_gap(f),
            cardinality: self.comb.cardinality(),
            gamma,
            beta,
            vertex,
            elapsed_ms: self.elapsed_ms(),
        };
        self.rows.push(row);
        if let Some(iterates) = &mut self.iterates {
            iterates.push(self.x.clone());
        }
    }

    /// `x ← (1−γ)x + γ·atom`, with support merging, pruning, and point refresh.
    pub fn apply_fw_step(&mut self, gamma: f64, atom_index: usize) {
        self.comb.fw_step(gamma, atom_index);
        let atoms = &self.atoms;
        self.comb.refresh_point(|i| atoms.get(i));
        self.x = self.comb.point().to_vec();
    }

    /// Away step `x ← x + γ(x − atom)`.
    pub fn apply_away_step(&mut self, gamma: f64, atom_index: usize) {
        self.comb.away_step(gamma, atom_index);
        let atoms = &self.atoms;
        self.comb.refresh_point(|i| atoms.get(i));
        self.x = self.comb.point().to_vec();
    }

    /// Replaces the decomposition weights wholesale (fully-corrective).
    pub fn set_weights(&mut self, indices: &[usize], weights: &[f64]) {
        self.comb.set_weights(indices, weights);
        let atoms = &self.atoms;
        self.comb.refresh_point(|i| atoms.get(i));
        self.x = self.comb.point().to_vec();
    }

    pub fn finish(self, status: Status) -> Solution {
        let ball_atoms = match self.atoms {
            AtomStore::Vertices(_) => None,
            AtomStore::Points { points } => Some(points),
        };
        let meta = TraceMeta {
            algorithm: self.cfg.algorithm,
            step: self.cfg.step,
            p: self.spec.p(),
            mode: self.spec.mode(),
            epsilon: self.cfg.epsilon,
            seed: self.cfg.seed,
            max_iter: self.cfg.max_iter,
            smoothness: self.smoothness,
            constants: self.consts,
        };
        Solution {
            combination: self.comb,
            trace: RunTrace {
                meta,
                rows: self.rows,
                status,
            },
            ball_atoms,
            iterates: self.iterates,
        }
    }

    /// Frank-Wolfe dual gap `⟨x − v, g⟩`.
    pub fn fw_gap(&self, v: &[f64], g: &[f64]) -> f64 {
        linalg::dot(&self.x, g) - linalg::dot(v, g)
    }
}
