//! Immutable undirected graphs in compressed adjacency form.
//!
//! Vertices are dense `0..n` ids stored as `u32`. Every neighbor slice is
//! strictly ascending, which lets the rest of the crate run merge joins
//! (`intersect_sorted`) instead of hash lookups.

use std::fmt;
use std::io::BufRead;
use std::ops::Deref;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense internal vertex id.
pub type VertexId = u32;

/// Largest number of distinct vertices a graph may hold.
pub const MAX_VERTICES: u64 = u32::MAX as u64;

/// Once one operand is this many times larger than the other, intersections
/// switch from a linear merge to binary probing of the larger side.
const GALLOP_RATIO: usize = 32;

/// A strictly ascending set of vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<VertexId>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Wraps `ids` if it is strictly ascending.
    pub fn from_sorted(ids: Vec<VertexId>) -> Option<Self> {
        is_strictly_ascending(&ids).then_some(Self(ids))
    }

    /// Sorts and deduplicates `ids`.
    pub fn from_unsorted(mut ids: Vec<VertexId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self(ids)
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }

    pub fn intersect(&self, other: &VertexSet) -> VertexSet {
        VertexSet(intersect_sorted(&self.0, &other.0))
    }
}

impl Deref for VertexSet {
    type Target = [VertexId];

    fn deref(&self) -> &[VertexId] {
        &self.0
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        Self::from_unsorted(iter.into_iter().collect())
    }
}

pub fn is_strictly_ascending(ids: &[VertexId]) -> bool {
    ids.windows(2).all(|w| w[0] < w[1])
}

/// Sorted intersection of two strictly ascending slices.
pub fn intersect_sorted(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    intersect_sorted_into(a, b, &mut out);
    out
}

/// Like [`intersect_sorted`] but appends into a caller-owned buffer.
pub fn intersect_sorted_into(a: &[VertexId], b: &[VertexId], out: &mut Vec<VertexId>) {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.is_empty() {
        return;
    }
    if large.len() / small.len() >= GALLOP_RATIO {
        let mut rest = large;
        for &x in small {
            match rest.binary_search(&x) {
                Ok(i) => {
                    out.push(x);
                    rest = &rest[i + 1..];
                }
                Err(i) => rest = &rest[i..],
            }
            if rest.is_empty() {
                break;
            }
        }
        return;
    }
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// `|a ∩ b|` without materializing the intersection.
pub fn intersection_size(a: &[VertexId], b: &[VertexId]) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.is_empty() {
        return 0;
    }
    if large.len() / small.len() >= GALLOP_RATIO {
        let mut rest = large;
        let mut count = 0;
        for &x in small {
            match rest.binary_search(&x) {
                Ok(i) => {
                    count += 1;
                    rest = &rest[i + 1..];
                }
                Err(i) => rest = &rest[i..],
            }
            if rest.is_empty() {
                break;
            }
        }
        return count;
    }
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// `a \ b` for strictly ascending slices.
pub fn difference_sorted(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            out.push(x);
        }
    }
    out
}

/// Inserts `v` into an ascending vector, keeping it ascending.
pub(crate) fn insert_sorted(set: &mut Vec<VertexId>, v: VertexId) {
    if let Err(pos) = set.binary_search(&v) {
        set.insert(pos, v);
    }
}

/// Removes `v` from an ascending vector if present.
pub(crate) fn remove_sorted(set: &mut Vec<VertexId>, v: VertexId) {
    if let Ok(pos) = set.binary_search(&v) {
        set.remove(pos);
    }
}

/// Counters gathered while ingesting an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadStats {
    pub data_lines: u64,
    pub self_loops: u64,
    /// Data lines that repeated an already seen undirected edge, in either direction.
    pub duplicate_edges: u64,
}

/// Immutable undirected simple graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    original_id: Option<Vec<u64>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.vertex_count())
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl Default for Graph {
    fn default() -> Self {
        Self::empty(0)
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
            original_id: None,
        }
    }

    /// Builds a simple graph from undirected edges over vertices `0..n`.
    /// Self-loops are dropped and repeated edges collapse into one.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut pairs: Vec<(VertexId, VertexId)> = edges
            .into_iter()
            .inspect(|&(u, v)| {
                assert!(
                    (u as usize) < n && (v as usize) < n,
                    "edge ({u}, {v}) out of range for {n} vertices"
                )
            })
            .filter(|&(u, v)| u != v)
            .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        Self::from_canonical_pairs(n, &pairs)
    }

    /// `pairs` must be sorted, deduplicated and satisfy `u < v`.
    fn from_canonical_pairs(n: usize, pairs: &[(VertexId, VertexId)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0; acc];
        // With pairs sorted by (u, v), every vertex first receives its smaller
        // partners (as the upper endpoint) and then its larger ones, both in
        // ascending order.
        for &(u, v) in pairs {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        debug_assert!(offsets
            .windows(2)
            .all(|w| is_strictly_ascending(&neighbors[w[0]..w[1]])));
        Self {
            offsets,
            neighbors,
            original_id: None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count() == 0
    }

    /// Sorted neighbor slice of `v`. Panics when `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        assert!(v < self.vertex_count(), "vertex {v} out of range");
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.vertex_count() as VertexId
    }

    /// Undirected edges as `(u, v)` with `u < v`, in lexicographic order.
    /// The position of an edge in this sequence is its edge id.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Range of positions of `v`'s slice in the flat neighbor array.
    #[inline]
    pub(crate) fn slice_range(&self, v: VertexId) -> std::ops::Range<usize> {
        self.offsets[v as usize]..self.offsets[v as usize + 1]
    }

    /// Source-file id of internal vertex `v`; `v` itself when the graph was
    /// not loaded from a file.
    pub fn original_id(&self, v: VertexId) -> u64 {
        match &self.original_id {
            Some(ids) => ids[v as usize],
            None => v as u64,
        }
    }

    pub fn original_ids(&self) -> Option<&[u64]> {
        self.original_id.as_deref()
    }

    /// Replaces the id map. Panics if the length does not match.
    pub fn with_original_ids(mut self, ids: Vec<u64>) -> Self {
        assert_eq!(ids.len(), self.vertex_count(), "original id map length mismatch");
        self.original_id = Some(ids);
        self
    }

    /// Subgraph induced by `set`, relabeled so that `set[i]` becomes vertex
    /// `i`. The relabel map is kept as the result's original ids (composed
    /// with this graph's own map).
    pub fn induced_subgraph(&self, set: &[VertexId]) -> Graph {
        let mut sub = self.induced_unlabeled(set);
        sub.original_id = Some(set.iter().map(|&v| self.original_id(v)).collect());
        sub
    }

    /// Induced subgraph without the id map; `set` must be strictly ascending.
    pub(crate) fn induced_unlabeled(&self, set: &[VertexId]) -> Graph {
        debug_assert!(is_strictly_ascending(set));
        let mut offsets = Vec::with_capacity(set.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        let mut scratch = Vec::new();
        for &v in set {
            scratch.clear();
            intersect_sorted_into(self.neighbors(v), set, &mut scratch);
            // `set` is ascending, so positions come out ascending too.
            let mut from = 0;
            for &w in &scratch {
                let pos = from + set[from..].binary_search(&w).expect("intersection member");
                neighbors.push(pos as VertexId);
                from = pos + 1;
            }
            offsets.push(neighbors.len());
        }
        Graph {
            offsets,
            neighbors,
            original_id: None,
        }
    }

    /// Renames vertices so that the vertex at position `i` of `order` gets id
    /// `i`. Panics if `order` does not cover exactly this graph's vertices.
    pub fn relabel(&self, order: &VertexOrder) -> Graph {
        let n = self.vertex_count();
        assert_eq!(order.len(), n, "order length does not match vertex count");
        let rank = order.ranks();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(self.neighbors.len());
        for &old in order.as_slice() {
            let start = neighbors.len();
            neighbors.extend(self.neighbors(old).iter().map(|&w| rank[w as usize]));
            neighbors[start..].sort_unstable();
            offsets.push(neighbors.len());
        }
        let original_id = order.as_slice().iter().map(|&old| self.original_id(old)).collect();
        Graph {
            offsets,
            neighbors,
            original_id: Some(original_id),
        }
    }

    /// Checks the structural invariants: symmetric, loop-free, strictly
    /// ascending slices.
    pub fn validate(&self) -> bool {
        self.vertices().all(|u| {
            let ns = self.neighbors(u);
            is_strictly_ascending(ns)
                && ns.iter().all(|&v| {
                    (v as usize) < self.vertex_count() && v != u && self.neighbors(v).binary_search(&u).is_ok()
                })
        })
    }
}

/// How a [`VertexOrder`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Identity,
    Random,
    Degeneracy,
    Truss,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OrderKind::Identity => "identity",
            OrderKind::Random => "random",
            OrderKind::Degeneracy => "degeneracy",
            OrderKind::Truss => "truss",
        };
        f.write_str(s)
    }
}

impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "id" => Ok(OrderKind::Identity),
            "random" | "r" => Ok(OrderKind::Random),
            "degeneracy" | "i" => Ok(OrderKind::Degeneracy),
            "truss" | "u" => Ok(OrderKind::Truss),
            other => Err(Error::InvalidArgument(format!("unknown order {other:?}"))),
        }
    }
}

/// A permutation of vertex ids: `as_slice()[i]` is the vertex placed at
/// position `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrder {
    kind: OrderKind,
    sequence: Vec<VertexId>,
}

impl VertexOrder {
    pub fn identity(n: usize) -> Self {
        Self {
            kind: OrderKind::Identity,
            sequence: (0..n as VertexId).collect(),
        }
    }

    /// Uniform random permutation drawn from a ChaCha8 stream reserved for
    /// vertex shuffling, so it never shares draws with branch sampling.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ORDER_STREAM);
        let mut sequence: Vec<VertexId> = (0..n as VertexId).collect();
        sequence.shuffle(&mut rng);
        Self {
            kind: OrderKind::Random,
            sequence,
        }
    }

    /// Validates that `sequence` is a permutation of `0..sequence.len()`.
    pub fn from_sequence(kind: OrderKind, sequence: Vec<VertexId>) -> Result<Self> {
        let mut seen = vec![false; sequence.len()];
        for &v in &sequence {
            let slot = seen
                .get_mut(v as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("order entry {v} out of range")))?;
            if std::mem::replace(slot, true) {
                return Err(Error::InvalidArgument(format!("order repeats vertex {v}")));
            }
        }
        Ok(Self { kind, sequence })
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.sequence
    }

    pub fn vertex_at(&self, position: usize) -> VertexId {
        self.sequence[position]
    }

    pub fn is_identity(&self) -> bool {
        self.sequence.iter().enumerate().all(|(i, &v)| i as VertexId == v)
    }

    /// Inverse permutation: `ranks()[v]` is the position of `v`.
    pub fn ranks(&self) -> Vec<VertexId> {
        let mut rank = vec![0; self.sequence.len()];
        for (pos, &v) in self.sequence.iter().enumerate() {
            rank[v as usize] = pos as VertexId;
        }
        rank
    }
}

/// ChaCha stream used for random vertex orders.
pub(crate) const ORDER_STREAM: u64 = 1;

/// Parses a SNAP-style edge list: `#` comment lines, blank lines ignored,
/// and data lines holding two whitespace separated non-negative ids.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    parse_edge_list_with_stats(reader).map(|(g, _)| g)
}

pub fn parse_edge_list_with_stats<R: BufRead>(mut reader: R) -> Result<(Graph, LoadStats)> {
    let mut stats = LoadStats::default();
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut ids: Vec<u64> = Vec::new();
    let mut line = String::new();
    let mut line_no = 0usize;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_ascii_whitespace();
        let mut next_id = || -> Result<u64> {
            let token = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two vertex ids".into(),
            })?;
            token.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex id {token:?}"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected trailing token {extra:?}"),
            });
        }
        stats.data_lines += 1;
        ids.push(u);
        ids.push(v);
        if u == v {
            stats.self_loops += 1;
        } else {
            raw.push((u, v));
        }
    }

    ids.sort_unstable();
    ids.dedup();
    if ids.len() as u64 > MAX_VERTICES {
        return Err(Error::TooManyVertices(ids.len() as u64));
    }
    let index = |x: u64| ids.binary_search(&x).expect("id collected above") as VertexId;
    let mut pairs: Vec<(VertexId, VertexId)> = raw
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (index(u), index(v));
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    drop(raw);
    pairs.sort_unstable();
    let before = pairs.len();
    pairs.dedup();
    stats.duplicate_edges = (before - pairs.len()) as u64;

    let graph = Graph::from_canonical_pairs(ids.len(), &pairs).with_original_ids(ids);
    Ok((graph, stats))
}

/// Opens and parses an edge-list file.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(Graph, LoadStats)> {
    let file = std::fs::File::open(path.as_ref())?;
    parse_edge_list_with_stats(std::io::BufReader::new(file))
}
