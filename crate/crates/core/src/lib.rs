//! Maximal clique enumeration and concise clique summaries.
//!
//! The crate enumerates all maximal cliques of an undirected graph with
//! pivoting Bron–Kerbosch ([`mce`]) and, more importantly, produces *expected
//! τ-visible* summaries ([`summarizer`]): a random subset of the maximal
//! cliques such that each maximal clique is, in expectation, covered to a
//! fraction of at least τ by some member of the summary. Search branches are
//! pruned with a probability derived from a lower bound on the overlap with
//! the last kept clique and an upper bound on the final clique size; the
//! bounds and the vertex orders that make them tight live in
//! [`decomposition`]. [`verifier`] holds brute-force oracles and Monte-Carlo
//! checks used by the test suites and the `verify` CLI command.

pub mod decomposition;
pub mod error;
pub mod generators;
pub mod graph;
pub mod mce;
pub mod stats;
pub mod summarizer;
pub mod verifier;

pub use decomposition::{
    core_bound, core_decompose, edge_support, h_bound, truss_bound, truss_decompose, vertex_order, BoundKind,
    CoreResult, TrussResult,
};
pub use error::{Error, Result};
pub use graph::{
    intersect_sorted, load_edge_list, parse_edge_list, parse_edge_list_with_stats, Graph, LoadStats, OrderKind,
    VertexId, VertexOrder, VertexSet,
};
pub use mce::{choose_pivot, enumerate_maximal_cliques, Clique};
pub use stats::RunStats;
pub use summarizer::{
    branch_keep_probability, sampling_baseline, sampling_opt, summarize, SamplingKind, SamplingMode, Summary,
    SummaryConfig, YEstimator,
};
pub use verifier::{
    audit_tau_visible, average_r, brute_force_mce, estimate_expected_visibility, local_visibility, visibility,
    ExpectationEstimate, VisibilityReport,
};
