//! Expected τ-visible summaries by randomized branch sampling.
//!
//! The search is pivoting Bron–Kerbosch. Before a frame expands, it bounds
//! how many more vertices the growing clique `C` can gain (`d̄`, from a clique
//! size bound on the subgraph induced by the candidates) and how much of the
//! finished clique must overlap the last clique kept in the summary (`r̲`).
//! The frame is expanded with probability `s(r̲)^(1/l̄)` where `l̄ = |C| + d̄`,
//! so a clique of size `l` survives its `l` ancestor frames with probability
//! at least `s(r)`. Every clique the search reaches is kept.
//!
//! Two sampling functions are provided: [`sampling_baseline`] and the
//! smaller [`sampling_opt`], which still keeps each clique's expected
//! visibility at or above τ.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::{vertex_order, BoundKind};
use crate::error::{Error, Result};
use crate::graph::{
    difference_sorted, insert_sorted, intersect_sorted, intersection_size, remove_sorted, Graph, OrderKind, VertexId,
    VertexOrder,
};
use crate::mce::{best_pivot, Clique};
use crate::stats::RunStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingKind {
    Baseline,
    Opt,
}

impl SamplingKind {
    pub fn evaluate(self, r: f64, tau: f64) -> f64 {
        match self {
            SamplingKind::Baseline => sampling_baseline(r, tau),
            SamplingKind::Opt => sampling_opt(r, tau),
        }
    }
}

/// How the number of new vertices outside the last summary clique is
/// bounded when `t` vertices still join `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YEstimator {
    /// `|T \ C'|`
    SetDiff,
    /// `t`
    TValue,
    /// Vertices of `T \ C'` whose degree inside the candidate subgraph is at
    /// least `t - 1`.
    DegreeFiltered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Sample every search frame.
    PerBranch,
    /// Plain enumeration; sample each finished clique once with `s(r)`.
    OneShot,
}

macro_rules! keyword_enum {
    ($ty:ty, $($variant:path => [$($name:literal),+]),+ $(,)?) => {
        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($($name)|+ => Ok($variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        concat!("unknown ", stringify!($ty), " {:?}"),
                        other
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self {
                    $($variant => f.write_str(keyword_enum!(@first $($name),+)),)+
                }
            }
        }
    };
    (@first $first:literal $(, $rest:literal)*) => { $first };
}

keyword_enum!(SamplingKind, SamplingKind::Baseline => ["baseline"], SamplingKind::Opt => ["opt"]);
keyword_enum!(
    YEstimator,
    YEstimator::SetDiff => ["setdiff"],
    YEstimator::TValue => ["t", "tvalue"],
    YEstimator::DegreeFiltered => ["degree", "degreefiltered"],
);
keyword_enum!(SamplingMode, SamplingMode::PerBranch => ["branch", "perbranch"], SamplingMode::OneShot => ["oneshot"]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryConfig {
    pub tau: f64,
    pub sampling: SamplingKind,
    pub bound: BoundKind,
    pub order: OrderKind,
    pub y_estimator: YEstimator,
    pub mode: SamplingMode,
    pub seed: u64,
    /// Keep every branch (and clique) until the summary holds one clique.
    pub force_first: bool,
}

impl SummaryConfig {
    /// Truss bound, truss order, degree-filtered estimator, `s_opt`,
    /// per-branch sampling, seed 0.
    pub fn new(tau: f64) -> Self {
        Self {
            tau,
            sampling: SamplingKind::Opt,
            bound: BoundKind::Truss,
            order: OrderKind::Truss,
            y_estimator: YEstimator::DegreeFiltered,
            mode: SamplingMode::PerBranch,
            seed: 0,
            force_first: false,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_sampling(self, sampling: SamplingKind) -> Self {
        Self { sampling, ..self }
    }

    pub fn with_mode(self, mode: SamplingMode) -> Self {
        Self { mode, ..self }
    }

    pub fn with_bound(self, bound: BoundKind) -> Self {
        Self { bound, ..self }
    }

    pub fn with_order(self, order: OrderKind) -> Self {
        Self { order, ..self }
    }

    pub fn with_y_estimator(self, y_estimator: YEstimator) -> Self {
        Self { y_estimator, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidArgument(format!(
                "tau must lie in [0, 1], got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

impl Default for SummaryConfig {
    fn default() -> Self {
        Self::new(0.5)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    /// Kept maximal cliques in the order they were found, in the input
    /// graph's ids.
    pub cliques: Vec<Clique>,
    pub config: SummaryConfig,
    pub stats: RunStats,
}

impl Summary {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn contains(&self, clique: &Clique) -> bool {
        self.cliques.iter().any(|c| c == clique)
    }
}

/// `(1 - r)(2 - τ) / (2 - r - τ)`, with the `r = τ = 1` corner set to 0.
pub fn sampling_baseline(r: f64, tau: f64) -> f64 {
    if r >= 1.0 {
        return 0.0;
    }
    ((1.0 - r) * (2.0 - tau) / (2.0 - r - tau)).clamp(0.0, 1.0)
}

/// `(τ - r) / (1 - r)` below τ, zero from τ on.
pub fn sampling_opt(r: f64, tau: f64) -> f64 {
    if r < tau {
        ((tau - r) / (1.0 - r)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// `s^(1 / l̄)`, the per-frame share of a clique-level probability `s`.
///
/// Panics if `l_upper` is zero.
pub fn branch_keep_probability(s_value: f64, l_upper: usize) -> f64 {
    assert!(l_upper >= 1, "clique size bound must be positive");
    if s_value <= 0.0 {
        0.0
    } else if s_value >= 1.0 {
        1.0
    } else {
        s_value.powf(1.0 / l_upper as f64)
    }
}

/// Upper bound on how many vertices of `T` can still join the clique, from
/// the chosen bound on `G_T`, clamped to `[1, |T|]` (0 for empty `T`).
pub fn estimate_d_upper(candidate_graph: &Graph, bound: BoundKind) -> usize {
    let n = candidate_graph.vertex_count();
    if n == 0 {
        0
    } else {
        bound.evaluate(candidate_graph).clamp(1, n)
    }
}

/// Degrees (inside `G_T`) of the candidates not covered by `C'`, descending.
struct Uncovered {
    degrees_desc: Vec<usize>,
}

impl Uncovered {
    /// `cand` and `prev` ascending; `candidate_graph` is induced by `cand`.
    fn new(cand: &[VertexId], prev: &[VertexId], candidate_graph: &Graph) -> Self {
        let mut degrees_desc = Vec::with_capacity(cand.len());
        let mut j = 0;
        for (pos, &v) in cand.iter().enumerate() {
            while j < prev.len() && prev[j] < v {
                j += 1;
            }
            if j == prev.len() || prev[j] != v {
                degrees_desc.push(candidate_graph.degree(pos as VertexId));
            }
        }
        degrees_desc.sort_unstable_by(|a, b| b.cmp(a));
        Self { degrees_desc }
    }

    fn y_upper(&self, t: usize, kind: YEstimator) -> usize {
        match kind {
            YEstimator::SetDiff => self.degrees_desc.len(),
            YEstimator::TValue => t,
            YEstimator::DegreeFiltered => {
                let need = t.saturating_sub(1);
                self.degrees_desc.partition_point(|&d| d >= need)
            }
        }
    }
}

/// Upper bound on the number of the `t` joining vertices that lie outside
/// `prev`. `cand` and `prev` must be ascending and `candidate_graph` induced
/// by `cand`.
pub fn estimate_y_upper(
    t: usize,
    cand: &[VertexId],
    prev: &[VertexId],
    candidate_graph: &Graph,
    kind: YEstimator,
) -> usize {
    assert!(t >= 1, "t starts at 1");
    Uncovered::new(cand, prev, candidate_graph).y_upper(t, kind)
}

/// Lower bound on the local visibility of any maximal clique grown from
/// `clique` with candidates `cand`: the minimum over `1 <= t <= d̄` of
/// `(|C ∩ C'| + max(t - ȳ_t, 0)) / (|C| + t)`.
///
/// Returns 0 when `prev` is empty and `|C ∩ C'| / |C|` when `d_upper` is 0.
/// Panics if both `clique` is empty and `d_upper` is 0 while `prev` is not.
pub fn estimate_r_lower(
    clique: &[VertexId],
    prev: &[VertexId],
    cand: &[VertexId],
    d_upper: usize,
    kind: YEstimator,
    candidate_graph: &Graph,
) -> f64 {
    if prev.is_empty() {
        return 0.0;
    }
    let uncovered = Uncovered::new(cand, prev, candidate_graph);
    r_lower(intersection_size(clique, prev), clique.len(), d_upper, &uncovered, kind)
}

fn r_lower(overlap: usize, clique_len: usize, d_upper: usize, uncovered: &Uncovered, kind: YEstimator) -> f64 {
    if d_upper == 0 {
        assert!(clique_len > 0, "nothing to grow from an empty configuration");
        return overlap as f64 / clique_len as f64;
    }
    (1..=d_upper)
        .map(|t| {
            let covered = t.saturating_sub(uncovered.y_upper(t, kind));
            (overlap + covered) as f64 / (clique_len + t) as f64
        })
        .fold(f64::INFINITY, f64::min)
}

/// A vertex order applied ahead of time, so repeated runs over the same
/// graph skip the decomposition.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    graph: Graph,
    order: VertexOrder,
}

impl PreparedGraph {
    /// `seed` only matters for [`OrderKind::Random`].
    pub fn new(g: &Graph, kind: OrderKind, seed: u64) -> Self {
        Self::with_order(g, vertex_order(g, kind, seed))
    }

    pub fn with_order(g: &Graph, order: VertexOrder) -> Self {
        let graph = if order.is_identity() {
            g.clone()
        } else {
            g.relabel(&order)
        };
        Self { graph, order }
    }

    /// The input graph renamed so that order positions are ids.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn order(&self) -> &VertexOrder {
        &self.order
    }
}

/// What a sampled frame decided, as seen by a [`Probe`].
pub(crate) struct FrameView<'a> {
    /// Ascending, in relabeled ids.
    pub clique: &'a [VertexId],
    pub prev: &'a [VertexId],
    pub candidate_graph: &'a Graph,
    pub d_upper: usize,
    pub r_lower: f64,
    pub kept: bool,
}

/// Instrumentation hooks for the sampling engine. The production path uses
/// [`NoProbe`]; verifier-side probes observe frames and completions, and a
/// probe with `SHADOW = true` makes the engine walk pruned subtrees without
/// drawing random numbers or keeping what it finds there.
pub(crate) trait Probe {
    const SHADOW: bool = false;

    fn enter_frame(&mut self, _frame: &FrameView<'_>) {}

    fn exit_frame(&mut self) {}

    /// `clique` in relabeled ids; `prev` is the summary's last clique at the
    /// time of completion.
    fn completed(&mut self, _clique: &[VertexId], _prev: &[VertexId], _included: bool) {}
}

pub(crate) struct NoProbe;

impl Probe for NoProbe {}

/// ChaCha stream used for keep/discard draws.
const SAMPLING_STREAM: u64 = 0;

struct Engine<'a, P> {
    g: &'a Graph,
    order: &'a VertexOrder,
    config: &'a SummaryConfig,
    rng: ChaCha8Rng,
    clique: Vec<VertexId>,
    prev: Vec<VertexId>,
    summary: Vec<Clique>,
    stats: RunStats,
    depth: u64,
    probe: &'a mut P,
}

impl<P: Probe> Engine<'_, P> {
    fn keep_floor(&self) -> Option<f64> {
        (self.config.force_first && self.summary.is_empty()).then_some(1.0)
    }

    fn expand(&mut self, mut cand: Vec<VertexId>, mut excl: Vec<VertexId>, shadow: bool) {
        self.depth += 1;
        self.stats.peak_frames = self.stats.peak_frames.max(self.depth);
        self.expand_frame(&mut cand, &mut excl, shadow);
        self.depth -= 1;
    }

    fn expand_frame(&mut self, cand: &mut Vec<VertexId>, excl: &mut Vec<VertexId>, shadow: bool) {
        if cand.is_empty() && excl.is_empty() {
            if !self.clique.is_empty() {
                self.complete(shadow);
            }
            return;
        }

        let sample_here = self.config.mode == SamplingMode::PerBranch && !shadow;
        let mut child_shadow = shadow;
        let mut candidate_graph = None;
        if sample_here {
            let gt = self.g.induced_unlabeled(cand);
            let d_upper = estimate_d_upper(&gt, self.config.bound);
            let r_low = if self.prev.is_empty() {
                0.0
            } else {
                let uncovered = Uncovered::new(cand, &self.prev, &gt);
                let overlap = intersection_size(&self.clique, &self.prev);
                r_lower(overlap, self.clique.len(), d_upper, &uncovered, self.config.y_estimator)
            };
            let l_upper = if d_upper == 0 {
                self.clique.len().max(1)
            } else {
                self.clique.len() + d_upper
            };
            let s = self.config.sampling.evaluate(r_low, self.config.tau);
            let p = self.keep_floor().unwrap_or_else(|| branch_keep_probability(s, l_upper));
            let kept = self.rng.gen::<f64>() < p;
            self.probe.enter_frame(&FrameView {
                clique: &self.clique,
                prev: &self.prev,
                candidate_graph: &gt,
                d_upper,
                r_lower: r_low,
                kept,
            });
            if kept {
                self.stats.branches_kept += 1;
            } else {
                self.stats.branches_pruned += 1;
                if !P::SHADOW {
                    self.probe.exit_frame();
                    return;
                }
                child_shadow = true;
            }
            candidate_graph = Some(gt);
        }

        if !cand.is_empty() {
            let pivot = match &candidate_graph {
                // Candidates' scores are their degrees inside G_T.
                Some(gt) => best_pivot(cand, excl, |v| match cand.binary_search(&v) {
                    Ok(pos) => gt.degree(pos as VertexId),
                    Err(_) => intersection_size(cand, self.g.neighbors(v)),
                }),
                None => best_pivot(cand, excl, |v| intersection_size(cand, self.g.neighbors(v))),
            };
            drop(candidate_graph);
            let branches = difference_sorted(cand, self.g.neighbors(pivot));
            for v in branches {
                let nv = self.g.neighbors(v);
                let next_cand = intersect_sorted(cand, nv);
                let next_excl = intersect_sorted(excl, nv);
                insert_sorted(&mut self.clique, v);
                self.expand(next_cand, next_excl, child_shadow);
                remove_sorted(&mut self.clique, v);
                remove_sorted(cand, v);
                insert_sorted(excl, v);
            }
        }

        if sample_here {
            self.probe.exit_frame();
        }
    }

    fn complete(&mut self, shadow: bool) {
        self.stats.cliques_completed += 1;
        let r = (!self.prev.is_empty())
            .then(|| intersection_size(&self.clique, &self.prev) as f64 / self.clique.len() as f64);
        if let Some(r) = r {
            self.stats.r_samples.push(r);
        }
        let included = match self.config.mode {
            SamplingMode::PerBranch => !shadow,
            SamplingMode::OneShot => {
                let s = self.config.sampling.evaluate(r.unwrap_or(0.0), self.config.tau);
                let p = self.keep_floor().unwrap_or(s);
                self.rng.gen::<f64>() < p
            }
        };
        self.probe.completed(&self.clique, &self.prev, included);
        if included {
            let members = if self.order.is_identity() {
                self.clique.clone()
            } else {
                self.clique.iter().map(|&v| self.order.vertex_at(v as usize)).collect()
            };
            self.summary.push(Clique::new(members));
            self.prev.clone_from(&self.clique);
        }
    }
}

pub(crate) fn run_with_probe<P: Probe>(
    prepared: &PreparedGraph,
    config: &SummaryConfig,
    probe: &mut P,
) -> Result<Summary> {
    config.validate()?;
    if prepared.order.kind() != config.order && prepared.order.kind() != OrderKind::Identity {
        return Err(Error::InvalidArgument(format!(
            "graph was prepared with {} order but the configuration asks for {}",
            prepared.order.kind(),
            config.order
        )));
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(SAMPLING_STREAM);
    let mut engine = Engine {
        g: &prepared.graph,
        order: &prepared.order,
        config,
        rng,
        clique: Vec::new(),
        prev: Vec::new(),
        summary: Vec::new(),
        stats: RunStats::default(),
        depth: 0,
        probe,
    };
    engine.expand(prepared.graph.vertices().collect(), Vec::new(), false);
    let mut stats = engine.stats;
    stats.summary_size = engine.summary.len() as u64;
    stats.wall_time = started.elapsed().as_secs_f64();
    Ok(Summary {
        cliques: engine.summary,
        config: *config,
        stats,
    })
}

/// Runs the sampler over a graph whose order was computed beforehand. The
/// prepared order kind must match `config.order` (identity is accepted for
/// any configuration).
pub fn summarize_prepared(prepared: &PreparedGraph, config: &SummaryConfig) -> Result<Summary> {
    run_with_probe(prepared, config, &mut NoProbe)
}

/// Computes the configured vertex order and runs the sampler. For a random
/// order the shuffle is seeded with `config.seed`, on a stream separate from
/// the sampling draws. Wall time includes the ordering step.
pub fn summarize(g: &Graph, config: &SummaryConfig) -> Result<Summary> {
    config.validate()?;
    let started = Instant::now();
    let prepared = PreparedGraph::new(g, config.order, config.seed);
    let mut summary = summarize_prepared(&prepared, config)?;
    summary.stats.wall_time = started.elapsed().as_secs_f64();
    Ok(summary)
}
