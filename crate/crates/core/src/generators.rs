//! Small graph families used by tests, examples and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexId};

pub fn complete(n: usize) -> Graph {
    let n32 = n as VertexId;
    Graph::from_edges(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))))
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n as VertexId).map(|v| (v - 1, v)))
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves as VertexId).map(|v| (0, v)))
}

/// Complete multipartite graph; parts take consecutive id ranges.
pub fn complete_multipartite(parts: &[usize]) -> Graph {
    let n: usize = parts.iter().sum();
    let mut part_of = Vec::with_capacity(n);
    for (i, &size) in parts.iter().enumerate() {
        part_of.extend(std::iter::repeat_n(i, size));
    }
    let n32 = n as VertexId;
    let part_of = &part_of;
    Graph::from_edges(
        n,
        (0..n32).flat_map(move |u| {
            (u + 1..n32)
                .filter(move |&v| part_of[u as usize] != part_of[v as usize])
                .map(move |v| (u, v))
        }),
    )
}

/// Moon–Moser graph on `3k` vertices: `k` independent triples, all edges
/// between different triples. It has `3^k` maximal cliques.
pub fn moon_moser(triples: usize) -> Graph {
    complete_multipartite(&vec![3; triples])
}

/// Erdős–Rényi `G(n, p)` drawn from a seeded ChaCha8 stream.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// `G(n, p)` noise plus `count` planted cliques on random vertex subsets
/// with sizes drawn from `sizes`. Planted cliques may overlap.
pub fn planted_cliques(n: usize, p: f64, count: usize, sizes: std::ops::RangeInclusive<usize>, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = gnp(n, p, rng.gen());
    let mut edges: Vec<(VertexId, VertexId)> = base.edges().collect();
    for _ in 0..count {
        let size = rng.gen_range(sizes.clone()).min(n);
        let members = rand::seq::index::sample(&mut rng, n, size);
        let members: Vec<VertexId> = members.iter().map(|v| v as VertexId).collect();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        assert_eq!(complete(5).edge_count(), 10);
        assert_eq!(path(4).edge_count(), 3);
        assert_eq!(star(5).edge_count(), 5);
        assert_eq!(complete_multipartite(&[3, 3]).edge_count(), 9);
        assert_eq!(moon_moser(3).edge_count(), 27);
        assert_eq!(gnp(10, 0.0, 1).edge_count(), 0);
        assert_eq!(gnp(10, 1.0, 1).edge_count(), 45);
        assert_eq!(gnp(30, 0.3, 9), gnp(30, 0.3, 9));
        assert!(planted_cliques(40, 0.05, 5, 4..=8, 3).validate());
    }
}
