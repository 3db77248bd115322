use std::collections::BTreeSet;

use proptest::prelude::*;

use clique_summary::decomposition::{core_bound, core_decompose, h_bound, truss_bound, truss_decompose};
use clique_summary::graph::difference_sorted;
use clique_summary::mce::maximal_cliques;
use clique_summary::summarizer::{summarize, SamplingKind, SamplingMode, SummaryConfig, YEstimator};
use clique_summary::verifier::{brute_force_mce, local_visibility, shadow_summarize, visibility};
use clique_summary::{intersect_sorted, BoundKind, Clique, Graph, OrderKind, VertexId, VertexOrder};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n).prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |mask| {
            let mut bits = mask.into_iter();
            let mut edges = Vec::new();
            for u in 0..n as VertexId {
                for v in u + 1..n as VertexId {
                    if bits.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, edges)
        })
    })
}

fn sorted_set() -> impl Strategy<Value = Vec<VertexId>> {
    proptest::collection::btree_set(0u32..200, 0..40).prop_map(|s| s.into_iter().collect())
}

fn triangles(g: &Graph) -> usize {
    g.edges()
        .map(|(u, v)| g.neighbors(u).iter().filter(|&&w| w > v && g.has_edge(v, w)).count())
        .sum()
}

fn edge_set(g: &Graph) -> BTreeSet<(VertexId, VertexId)> {
    g.edges().collect()
}

/// Vertices of the k-truss by repeatedly deleting edges in fewer than
/// `k - 2` surviving triangles.
fn truss_vertices(g: &Graph, k: u32) -> BTreeSet<VertexId> {
    let mut alive = edge_set(g);
    loop {
        let weak: Vec<_> = alive
            .iter()
            .copied()
            .filter(|&(u, v)| {
                let support = g
                    .vertices()
                    .filter(|&w| {
                        let e = |a: VertexId, b: VertexId| alive.contains(&(a.min(b), a.max(b)));
                        w != u && w != v && e(u, w) && e(v, w)
                    })
                    .count();
                (support as u32) + 2 < k
            })
            .collect();
        if weak.is_empty() {
            break;
        }
        for e in weak {
            alive.remove(&e);
        }
    }
    alive.into_iter().flat_map(|(u, v)| [u, v]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn intersection_matches_naive(a in sorted_set(), b in sorted_set()) {
        let naive: Vec<VertexId> = a.iter().copied().filter(|x| b.contains(x)).collect();
        prop_assert_eq!(intersect_sorted(&a, &b), naive);
        let diff: Vec<VertexId> = a.iter().copied().filter(|x| !b.contains(x)).collect();
        prop_assert_eq!(difference_sorted(&a, &b), diff);
    }

    #[test]
    fn relabel_preserves_structure(g in graph_strategy(16), seed in any::<u64>()) {
        let order = VertexOrder::random(g.vertex_count(), seed);
        let h = g.relabel(&order);
        prop_assert!(h.validate());
        prop_assert_eq!(h.edge_count(), g.edge_count());
        prop_assert_eq!(triangles(&h), triangles(&g));
        for (pos, &v) in order.as_slice().iter().enumerate() {
            prop_assert_eq!(h.degree(pos as VertexId), g.degree(v));
        }
    }

    #[test]
    fn full_induced_subgraph_is_identity(g in graph_strategy(16)) {
        let all: Vec<VertexId> = g.vertices().collect();
        let sub = g.induced_subgraph(&all);
        prop_assert_eq!(edge_set(&sub), edge_set(&g));
    }

    #[test]
    fn bound_chain(g in graph_strategy(16)) {
        let (h, core, truss) = (h_bound(&g), core_bound(&g), truss_bound(&g));
        prop_assert!(h >= core && core >= truss, "h {} core {} truss {}", h, core, truss);
        let omega = brute_force_mce(&g).unwrap().iter().map(|c| c.len()).max().unwrap_or(0);
        prop_assert!(truss >= omega);
        for kind in BoundKind::ALL {
            prop_assert_eq!(kind.evaluate(&g), match kind {
                BoundKind::H => h,
                BoundKind::Core => core,
                BoundKind::Truss => truss,
            });
        }
    }

    #[test]
    fn degeneracy_order_property(g in graph_strategy(18)) {
        let core = core_decompose(&g);
        let ranks = core.degeneracy_order.ranks();
        for v in g.vertices() {
            let later = g.neighbors(v).iter().filter(|&&w| ranks[w as usize] > ranks[v as usize]).count();
            prop_assert!(later as u32 <= core.degeneracy);
        }
        // the k-core for k = degeneracy is nonempty: min degree inside it is k
        let max = core.core_number.iter().copied().max().unwrap_or(0);
        prop_assert_eq!(max, core.degeneracy);
    }

    #[test]
    fn truss_order_containment(g in graph_strategy(14)) {
        let truss = truss_decompose(&g);
        let seq = truss.truss_order.as_slice();
        let classes: Vec<u32> = seq.iter().map(|&v| truss.vertex_truss[v as usize]).collect();
        prop_assert!(classes.windows(2).all(|w| w[0] <= w[1]));
        for (i, &v) in seq.iter().enumerate() {
            let k = truss.vertex_truss[v as usize];
            if k >= 2 {
                let members = truss_vertices(&g, k);
                prop_assert!(seq[i..].iter().all(|w| members.contains(w)), "vertex {} class {}", v, k);
            }
        }
    }

    #[test]
    fn mce_matches_oracle(g in graph_strategy(14)) {
        let got: BTreeSet<Clique> = maximal_cliques(&g).into_iter().collect();
        prop_assert_eq!(got, brute_force_mce(&g).unwrap());
    }

    #[test]
    fn summary_cliques_are_maximal_and_distinct(g in graph_strategy(16), seed in any::<u64>(), tau in 0.0f64..=1.0) {
        let s = summarize(&g, &SummaryConfig::new(tau).with_seed(seed)).unwrap();
        let all = brute_force_mce(&g).unwrap();
        let distinct: BTreeSet<&Clique> = s.cliques.iter().collect();
        prop_assert_eq!(distinct.len(), s.len());
        prop_assert!(s.cliques.iter().all(|c| all.contains(c)));
        prop_assert_eq!(s.stats.summary_size, s.len() as u64);
    }

    #[test]
    fn visibility_dominates_local_visibility(g in graph_strategy(14), seed in any::<u64>()) {
        let s = summarize(&g, &SummaryConfig::new(0.7).with_seed(seed)).unwrap();
        for c in brute_force_mce(&g).unwrap() {
            let v = visibility(&c, &s.cliques);
            prop_assert!((0.0..=1.0).contains(&v));
            for prev in &s.cliques {
                prop_assert!(v >= local_visibility(&c, prev));
            }
        }
    }

    #[test]
    fn shadow_run_matches_plain_run(
        g in graph_strategy(14),
        seed in any::<u64>(),
        tau in 0.0f64..=1.0,
        baseline in any::<bool>(),
        one_shot in any::<bool>(),
        order in prop_oneof![Just(OrderKind::Truss), Just(OrderKind::Degeneracy), Just(OrderKind::Random)],
        y in prop_oneof![Just(YEstimator::SetDiff), Just(YEstimator::TValue), Just(YEstimator::DegreeFiltered)],
    ) {
        let cfg = SummaryConfig::new(tau)
            .with_seed(seed)
            .with_order(order)
            .with_y_estimator(y)
            .with_sampling(if baseline { SamplingKind::Baseline } else { SamplingKind::Opt })
            .with_mode(if one_shot { SamplingMode::OneShot } else { SamplingMode::PerBranch });
        let plain = summarize(&g, &cfg).unwrap();
        let shadow = shadow_summarize(&g, &cfg).unwrap();
        prop_assert_eq!(&plain.cliques, &shadow.cliques);
        prop_assert_eq!(shadow.stats.cliques_completed as usize, brute_force_mce(&g).unwrap().len());
    }

    #[test]
    fn exact_at_tau_one(g in graph_strategy(14), seed in any::<u64>()) {
        let s = summarize(&g, &SummaryConfig::new(1.0).with_seed(seed)).unwrap();
        let kept: BTreeSet<Clique> = s.cliques.into_iter().collect();
        prop_assert_eq!(kept, brute_force_mce(&g).unwrap());
    }

    #[test]
    fn missing_cliques_are_reported(g in graph_strategy(12)) {
        let all: Vec<Clique> = brute_force_mce(&g).unwrap().into_iter().collect();
        let reduced: Vec<VertexId> = all.first().map(|c| c.members().to_vec()).unwrap_or_default();
        let summary: Vec<Clique> = all.iter().skip(1).cloned().collect();
        if !reduced.is_empty() && !summary.is_empty() {
            let v = visibility(&Clique::new(reduced), &summary);
            prop_assert!(v < 1.0);
        }
    }
}
