//! Core and truss decompositions, the vertex orders they induce, and the
//! three clique-size upper bounds (H, core, truss).
//!
//! Both peelings break ties by ascending id (vertex id for cores, edge id for
//! trusses), so orders are a pure function of the graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::{Graph, OrderKind, VertexId, VertexOrder};

/// Which clique-size upper bound to evaluate on a candidate subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    H,
    Core,
    Truss,
}

impl BoundKind {
    pub const ALL: [BoundKind; 3] = [BoundKind::H, BoundKind::Core, BoundKind::Truss];

    pub fn evaluate(self, g: &Graph) -> usize {
        match self {
            BoundKind::H => h_bound(g),
            BoundKind::Core => core_bound(g),
            BoundKind::Truss => truss_bound(g),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::H => "h",
            BoundKind::Core => "core",
            BoundKind::Truss => "truss",
        })
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "h" => Ok(BoundKind::H),
            "core" | "c" => Ok(BoundKind::Core),
            "truss" | "t" => Ok(BoundKind::Truss),
            other => Err(Error::InvalidArgument(format!("unknown bound {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreResult {
    pub core_number: Vec<u32>,
    /// Peeling order: each vertex has at most `degeneracy` neighbors after it.
    pub degeneracy_order: VertexOrder,
    pub degeneracy: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrussResult {
    /// Indexed by edge id, i.e. the position of the edge in [`Graph::edges`].
    pub truss_number: Vec<u32>,
    /// Largest truss number over incident edges; 1 for isolated vertices.
    pub vertex_truss: Vec<u32>,
    /// Vertices in the order their last incident edge was peeled, isolated
    /// vertices first.
    pub truss_order: VertexOrder,
    pub max_truss: u32,
}

/// Min-degree peeling with a lazy heap keyed by `(degree, id)`.
pub fn core_decompose(g: &Graph) -> CoreResult {
    let n = g.vertex_count();
    let mut degree: Vec<u32> = g.vertices().map(|v| g.degree(v) as u32).collect();
    let mut removed = vec![false; n];
    let mut core_number = vec![0u32; n];
    let mut sequence = Vec::with_capacity(n);
    let mut heap: BinaryHeap<Reverse<(u32, VertexId)>> =
        g.vertices().map(|v| Reverse((degree[v as usize], v))).collect();
    let mut level = 0u32;

    while let Some(Reverse((d, v))) = heap.pop() {
        let vi = v as usize;
        if removed[vi] || d != degree[vi] {
            continue;
        }
        removed[vi] = true;
        level = level.max(d);
        core_number[vi] = level;
        sequence.push(v);
        for &w in g.neighbors(v) {
            let wi = w as usize;
            if !removed[wi] {
                degree[wi] -= 1;
                heap.push(Reverse((degree[wi], w)));
            }
        }
    }

    CoreResult {
        core_number,
        degeneracy_order: VertexOrder::from_sequence(OrderKind::Degeneracy, sequence)
            .expect("peeling visits every vertex once"),
        degeneracy: level,
    }
}

/// Maximum core number in linear time (bin-sort peeling). Used where only
/// the number matters, e.g. per-frame bound evaluation.
pub fn max_core_number(g: &Graph) -> u32 {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let max_deg = g.max_degree();
    let mut degree: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for slot in bin.iter_mut() {
        let count = *slot;
        *slot = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0 as VertexId; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        vert[pos[v]] = v as VertexId;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    let mut best = 0;
    for i in 0..n {
        let v = vert[i];
        let dv = degree[v as usize];
        best = best.max(dv);
        for &u in g.neighbors(v) {
            let ui = u as usize;
            let du = degree[ui];
            if du > dv {
                let pu = pos[ui];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[ui] = pw;
                    vert[pu] = w;
                    pos[w as usize] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                degree[ui] = du - 1;
            }
        }
    }
    best as u32
}

/// Edge ids for every half-edge of the flat neighbor array, plus the
/// endpoint pair of each edge id.
struct EdgeIndex {
    half_edge: Vec<u32>,
    endpoints: Vec<(VertexId, VertexId)>,
}

impl EdgeIndex {
    fn build(g: &Graph) -> Self {
        let total: usize = g.vertices().map(|v| g.degree(v)).sum();
        let mut half_edge = vec![u32::MAX; total];
        let mut endpoints = Vec::with_capacity(total / 2);
        for u in g.vertices() {
            let range = g.slice_range(u);
            for (p, &v) in range.clone().zip(g.neighbors(u)) {
                if v > u {
                    half_edge[p] = endpoints.len() as u32;
                    endpoints.push((u, v));
                } else {
                    let q = g.slice_range(v).start + g.neighbors(v).binary_search(&u).expect("symmetric adjacency");
                    half_edge[p] = half_edge[q];
                }
            }
        }
        Self { half_edge, endpoints }
    }

    /// Calls `f(edge(u, w), edge(v, w))` for every common neighbor `w`.
    fn for_each_triangle(&self, g: &Graph, u: VertexId, v: VertexId, mut f: impl FnMut(u32, u32)) {
        let (ru, rv) = (g.slice_range(u), g.slice_range(v));
        let (nu, nv) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (0, 0);
        while i < nu.len() && j < nv.len() {
            match nu[i].cmp(&nv[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    f(self.half_edge[ru.start + i], self.half_edge[rv.start + j]);
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

/// Number of triangles through each edge, indexed by edge id.
pub fn edge_support(g: &Graph) -> Vec<u32> {
    g.edges()
        .map(|(u, v)| crate::graph::intersection_size(g.neighbors(u), g.neighbors(v)) as u32)
        .collect()
}

/// Support peeling: repeatedly removes the edge in the fewest remaining
/// triangles (lowest edge id on ties) and decrements the two other edges of
/// each triangle it closed.
pub fn truss_decompose(g: &Graph) -> TrussResult {
    let n = g.vertex_count();
    let index = EdgeIndex::build(g);
    let m = index.endpoints.len();
    let mut support = edge_support(g);
    let mut removed = vec![false; m];
    let mut truss_number = vec![0u32; m];
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = (0..m as u32).map(|e| Reverse((support[e as usize], e))).collect();

    let mut remaining_degree: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
    let mut vertex_truss = vec![1u32; n];
    let mut sequence: Vec<VertexId> = g.vertices().filter(|&v| g.degree(v) == 0).collect();
    sequence.reserve(n - sequence.len());

    let mut level = 0u32;
    let mut touched = Vec::new();
    while let Some(Reverse((s, e))) = heap.pop() {
        let ei = e as usize;
        if removed[ei] || s != support[ei] {
            continue;
        }
        level = level.max(s);
        truss_number[ei] = level + 2;
        removed[ei] = true;

        let (u, v) = index.endpoints[ei];
        touched.clear();
        index.for_each_triangle(g, u, v, |a, b| {
            if !removed[a as usize] && !removed[b as usize] {
                touched.push(a);
                touched.push(b);
            }
        });
        for &x in &touched {
            let xi = x as usize;
            if support[xi] > level {
                support[xi] -= 1;
                heap.push(Reverse((support[xi], x)));
            }
        }

        for w in [u, v] {
            let wi = w as usize;
            vertex_truss[wi] = vertex_truss[wi].max(level + 2);
            remaining_degree[wi] -= 1;
            if remaining_degree[wi] == 0 {
                sequence.push(w);
            }
        }
    }

    let max_truss = match (n, m) {
        (0, _) => 0,
        (_, 0) => 1,
        _ => level + 2,
    };
    TrussResult {
        truss_number,
        vertex_truss,
        truss_order: VertexOrder::from_sequence(OrderKind::Truss, sequence).expect("peeling emits every vertex once"),
        max_truss,
    }
}

/// Largest `h` such that at least `h` vertices have degree `>= h - 1`.
pub fn h_bound(g: &Graph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    // Degrees never exceed n - 1.
    let mut histogram = vec![0usize; n];
    for v in g.vertices() {
        histogram[g.degree(v)] += 1;
    }
    let mut at_least = 0;
    for h in (1..=n).rev() {
        at_least += histogram[h - 1];
        if at_least >= h {
            return h;
        }
    }
    unreachable!("h = 1 always holds for a nonempty graph")
}

/// Maximum core number plus one; 0 for the empty graph.
pub fn core_bound(g: &Graph) -> usize {
    if g.is_empty() {
        0
    } else {
        max_core_number(g) as usize + 1
    }
}

/// Maximum edge truss number; 1 for a nonempty edgeless graph, 0 for the
/// empty graph.
pub fn truss_bound(g: &Graph) -> usize {
    truss_decompose(g).max_truss as usize
}

/// Builds the enumeration order of the requested kind. `seed` is only used
/// for [`OrderKind::Random`].
pub fn vertex_order(g: &Graph, kind: OrderKind, seed: u64) -> VertexOrder {
    match kind {
        OrderKind::Identity => VertexOrder::identity(g.vertex_count()),
        OrderKind::Random => VertexOrder::random(g.vertex_count(), seed),
        OrderKind::Degeneracy => core_decompose(g).degeneracy_order,
        OrderKind::Truss => truss_decompose(g).truss_order,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    /// Largest k with a nonempty k-core, by repeated deletion of low-degree
    /// vertices. Returns per-vertex core numbers.
    fn brute_core_numbers(g: &Graph) -> Vec<u32> {
        let n = g.vertex_count();
        let mut core = vec![0u32; n];
        for k in 1..=n as u32 {
            let mut alive = vec![true; n];
            loop {
                let mut changed = false;
                for v in g.vertices() {
                    if alive[v as usize] {
                        let d = g.neighbors(v).iter().filter(|&&w| alive[w as usize]).count();
                        if (d as u32) < k {
                            alive[v as usize] = false;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            for v in 0..n {
                if alive[v] {
                    core[v] = k;
                }
            }
        }
        core
    }

    /// Per-edge truss numbers by recomputing the k-truss from scratch for
    /// every k.
    fn brute_truss_numbers(g: &Graph) -> Vec<u32> {
        let edges: Vec<_> = g.edges().collect();
        let mut truss = vec![2u32; edges.len()];
        for k in 3..=g.vertex_count() as u32 + 1 {
            let mut alive = vec![true; edges.len()];
            loop {
                let present = |a: VertexId, b: VertexId, alive: &[bool]| {
                    let key = if a < b { (a, b) } else { (b, a) };
                    edges.iter().position(|&e| e == key).map(|i| alive[i]).unwrap_or(false)
                };
                let mut changed = false;
                for (i, &(u, v)) in edges.iter().enumerate() {
                    if !alive[i] {
                        continue;
                    }
                    let tri = g
                        .vertices()
                        .filter(|&w| present(u, w, &alive) && present(v, w, &alive))
                        .count();
                    if (tri as u32) < k - 2 {
                        alive[i] = false;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            for (i, a) in alive.iter().enumerate() {
                if *a {
                    truss[i] = k;
                }
            }
        }
        truss
    }

    #[test]
    fn core_examples() {
        let k5 = generators::complete(5);
        let r = core_decompose(&k5);
        assert!(r.core_number.iter().all(|&c| c == 4));
        assert_eq!(r.degeneracy, 4);

        let r = core_decompose(&Graph::empty(4));
        assert!(r.core_number.iter().all(|&c| c == 0));
        assert_eq!(r.degeneracy_order.as_slice(), &[0, 1, 2, 3]);

        let path = generators::path(4);
        let r = core_decompose(&path);
        assert_eq!(r.core_number, brute_core_numbers(&path));
        assert_eq!(r.core_number, vec![1, 1, 1, 1]);
        // endpoints have degree 1, vertex 0 wins the tie
        assert_eq!(r.degeneracy_order.vertex_at(0), 0);
    }

    #[test]
    fn core_matches_brute_force_on_random_graphs() {
        for seed in 0..40 {
            let g = generators::gnp(14, 0.3 + 0.01 * seed as f64, seed);
            let r = core_decompose(&g);
            assert_eq!(r.core_number, brute_core_numbers(&g), "seed {seed}");
            assert_eq!(max_core_number(&g), r.degeneracy);
        }
    }

    #[test]
    fn truss_examples() {
        let k5 = generators::complete(5);
        let r = truss_decompose(&k5);
        assert!(r.truss_number.iter().all(|&t| t == 5));
        assert_eq!(r.max_truss, 5);

        let tri = generators::complete(3);
        assert!(truss_decompose(&tri).truss_number.iter().all(|&t| t == 3));

        // K4 minus the edge {0, 3}: the 4-cycle edges and the diagonal {1, 2}
        let diamond = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let oracle = brute_truss_numbers(&diamond);
        assert_eq!(oracle, vec![3; 5]);
        assert_eq!(truss_decompose(&diamond).truss_number, oracle);
    }

    #[test]
    fn truss_matches_brute_force_on_random_graphs() {
        for seed in 0..30 {
            let g = generators::gnp(11, 0.5, 100 + seed);
            assert_eq!(truss_decompose(&g).truss_number, brute_truss_numbers(&g), "seed {seed}");
        }
    }

    #[test]
    fn truss_conventions_for_degenerate_graphs() {
        assert_eq!(truss_decompose(&Graph::empty(0)).max_truss, 0);
        let r = truss_decompose(&Graph::empty(3));
        assert_eq!(r.max_truss, 1);
        assert_eq!(r.vertex_truss, vec![1, 1, 1]);
        assert_eq!(r.truss_order.as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn truss_order_emits_isolated_first() {
        let g = Graph::from_edges(5, [(1, 3), (3, 4), (1, 4)]);
        let r = truss_decompose(&g);
        assert_eq!(&r.truss_order.as_slice()[..2], &[0, 2]);
        assert_eq!(r.vertex_truss, vec![1, 3, 1, 3, 3]);
    }

    #[test]
    fn support_examples() {
        assert_eq!(edge_support(&generators::complete(3)), vec![1, 1, 1]);
        assert!(edge_support(&generators::complete(5)).iter().all(|&s| s == 3));
        assert!(edge_support(&generators::star(5)).iter().all(|&s| s == 0));
    }

    #[test]
    fn h_bound_examples() {
        assert_eq!(h_bound(&generators::complete(5)), 5);
        assert_eq!(h_bound(&Graph::empty(3)), 1);
        assert_eq!(h_bound(&Graph::empty(0)), 0);

        // exhaustive check of h = 1..=6 against the star's degree sequence
        let star = generators::star(5);
        let degrees: Vec<usize> = star.vertices().map(|v| star.degree(v)).collect();
        let oracle = (1..=6)
            .filter(|&h| degrees.iter().filter(|&&d| d + 1 >= h).count() >= h)
            .max()
            .unwrap();
        assert_eq!(oracle, 2);
        assert_eq!(h_bound(&star), oracle);
    }

    #[test]
    fn core_bound_examples() {
        assert_eq!(core_bound(&generators::complete(5)), 5);
        assert_eq!(core_bound(&generators::complete(3)), 3);
        let path = generators::path(4);
        assert_eq!(
            core_bound(&path),
            *brute_core_numbers(&path).iter().max().unwrap() as usize + 1
        );
        assert_eq!(core_bound(&path), 2);
        assert_eq!(core_bound(&Graph::empty(2)), 1);
        assert_eq!(core_bound(&Graph::empty(0)), 0);
    }

    #[test]
    fn truss_bound_examples() {
        assert_eq!(truss_bound(&generators::complete(5)), 5);
        assert_eq!(truss_bound(&Graph::from_edges(2, [(0, 1)])), 2);
        let two_triangles = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(truss_bound(&two_triangles), 3);
    }

    #[test]
    fn complete_bipartite_bounds() {
        let k33 = generators::complete_multipartite(&[3, 3]);
        assert_eq!(h_bound(&k33), 4);
        assert_eq!(core_bound(&k33), 4);
        assert_eq!(truss_bound(&k33), 2);
    }

    #[test]
    fn bound_kind_parses() {
        assert_eq!("truss".parse::<BoundKind>().unwrap(), BoundKind::Truss);
        assert_eq!("H".parse::<BoundKind>().unwrap(), BoundKind::H);
        assert!("x".parse::<BoundKind>().is_err());
    }
}
