//! Bron–Kerbosch maximal clique enumeration with pivoting.

use std::fmt;
use std::ops::Deref;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::graph::{
    difference_sorted, insert_sorted, intersect_sorted, intersection_size, is_strictly_ascending, remove_sorted, Graph,
    VertexId, VertexOrder,
};
use crate::stats::RunStats;

/// Vertex set of a clique, ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clique(Vec<VertexId>);

impl Clique {
    /// Sorts and deduplicates `members`.
    pub fn new(mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self(members)
    }

    pub fn from_sorted(members: Vec<VertexId>) -> Option<Self> {
        is_strictly_ascending(&members).then_some(Self(members))
    }

    pub fn members(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_members(self) -> Vec<VertexId> {
        self.0
    }

    /// `|self ∩ other|` by merge join.
    pub fn overlap(&self, other: &Clique) -> usize {
        intersection_size(&self.0, &other.0)
    }

    pub fn is_clique_in(&self, g: &Graph) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, &u)| (u as usize) < g.vertex_count() && self.0[i + 1..].iter().all(|&v| g.has_edge(u, v)))
    }

    /// A clique of `g` that no vertex of `g` extends.
    pub fn is_maximal_in(&self, g: &Graph) -> bool {
        if !self.is_clique_in(g) {
            return false;
        }
        match self.0.split_first() {
            None => g.is_empty(),
            Some((&first, rest)) => {
                let mut common = g.neighbors(first).to_vec();
                for &v in rest {
                    common = intersect_sorted(&common, g.neighbors(v));
                }
                common.is_empty()
            }
        }
    }
}

impl Deref for Clique {
    type Target = [VertexId];

    fn deref(&self) -> &[VertexId] {
        &self.0
    }
}

impl fmt::Display for Clique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Vertex of `cand ∪ excl` with the most neighbors in `cand`; smallest id
/// wins ties.
///
/// Panics if both sets are empty.
pub fn choose_pivot(g: &Graph, cand: &[VertexId], excl: &[VertexId]) -> VertexId {
    best_pivot(cand, excl, |v| intersection_size(cand, g.neighbors(v)))
}

/// Pivot selection over `cand ∪ excl` with a caller-supplied score.
pub(crate) fn best_pivot(cand: &[VertexId], excl: &[VertexId], mut score: impl FnMut(VertexId) -> usize) -> VertexId {
    assert!(
        !(cand.is_empty() && excl.is_empty()),
        "pivot requested for an empty candidate and excluded set"
    );
    let mut best: Option<(usize, VertexId)> = None;
    for &v in cand.iter().chain(excl) {
        let s = score(v);
        best = match best {
            Some((bs, bv)) if bs > s || (bs == s && bv < v) => Some((bs, bv)),
            _ => Some((s, v)),
        };
    }
    best.expect("nonempty").1
}

struct Enumerator<'g, F> {
    g: &'g Graph,
    order: Option<&'g VertexOrder>,
    sink: F,
    clique: Vec<VertexId>,
    emitted: u64,
    depth: u64,
    peak: u64,
}

impl<F, E> Enumerator<'_, F>
where
    F: FnMut(Clique, u64) -> Result<(), E>,
{
    fn expand(&mut self, mut cand: Vec<VertexId>, mut excl: Vec<VertexId>) -> Result<(), E> {
        self.depth += 1;
        self.peak = self.peak.max(self.depth);
        let result = self.expand_frame(&mut cand, &mut excl);
        self.depth -= 1;
        result
    }

    fn expand_frame(&mut self, cand: &mut Vec<VertexId>, excl: &mut Vec<VertexId>) -> Result<(), E> {
        if cand.is_empty() {
            if excl.is_empty() && !self.clique.is_empty() {
                let members = match self.order {
                    None => self.clique.clone(),
                    Some(order) => self.clique.iter().map(|&v| order.vertex_at(v as usize)).collect(),
                };
                let seq = self.emitted;
                self.emitted += 1;
                (self.sink)(Clique::new(members), seq)?;
            }
            return Ok(());
        }
        let pivot = choose_pivot(self.g, cand, excl);
        let branches = difference_sorted(cand, self.g.neighbors(pivot));
        for v in branches {
            let nv = self.g.neighbors(v);
            let next_cand = intersect_sorted(cand, nv);
            let next_excl = intersect_sorted(excl, nv);
            insert_sorted(&mut self.clique, v);
            self.expand(next_cand, next_excl)?;
            remove_sorted(&mut self.clique, v);
            remove_sorted(cand, v);
            insert_sorted(excl, v);
        }
        Ok(())
    }
}

/// Streams every maximal clique of `g` to `sink` exactly once, together with
/// a zero-based sequence number. Candidates are expanded in `order`; emitted
/// cliques use `g`'s ids, ascending. A sink error aborts the enumeration.
///
/// The empty graph has no maximal cliques.
pub fn enumerate_maximal_cliques<F, E>(g: &Graph, order: &VertexOrder, sink: F) -> Result<RunStats, E>
where
    F: FnMut(Clique, u64) -> Result<(), E>,
{
    let started = Instant::now();
    let relabeled;
    let (graph, order) = if order.is_identity() {
        (g, None)
    } else {
        relabeled = g.relabel(order);
        (&relabeled, Some(order))
    };
    let mut run = Enumerator {
        g: graph,
        order,
        sink,
        clique: Vec::new(),
        emitted: 0,
        depth: 0,
        peak: 0,
    };
    run.expand(graph.vertices().collect(), Vec::new())?;
    Ok(RunStats {
        cliques_completed: run.emitted,
        peak_frames: run.peak,
        wall_time: started.elapsed().as_secs_f64(),
        ..RunStats::default()
    })
}

/// Collects all maximal cliques in identity order.
pub fn maximal_cliques(g: &Graph) -> Vec<Clique> {
    let mut out = Vec::new();
    enumerate_maximal_cliques(g, &VertexOrder::identity(g.vertex_count()), |c, _| {
        out.push(c);
        Ok::<_, std::convert::Infallible>(())
    })
    .unwrap_or_else(|never| match never {});
    out
}
