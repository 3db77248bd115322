//! Ground truth and statistical checks for summaries.
//!
//! Nothing here shares code with [`crate::mce`]: the clique oracle works on
//! bitmask subsets of small graphs. The instrumented runs (shadow search,
//! bound audits, bound diagnostics) drive the sampling engine through probes
//! so the production path carries no measurement code.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{core_bound, h_bound, truss_bound};
use crate::error::{Error, Result};
use crate::graph::{intersection_size, Graph, OrderKind, VertexId};
use crate::mce::Clique;
use crate::stats::RunStats;
use crate::summarizer::{run_with_probe, FrameView, PreparedGraph, Probe, Summary, SummaryConfig};

/// Largest graph the brute-force oracle accepts.
pub const ORACLE_MAX_VERTICES: usize = 24;

/// All maximal cliques by scanning every vertex subset.
///
/// `common[mask]` is the set of vertices adjacent to every member of `mask`;
/// a mask is a clique when its lowest member lies in `common` of the rest,
/// and maximal when nothing outside it lies in its own `common`.
pub fn brute_force_mce(g: &Graph) -> Result<BTreeSet<Clique>> {
    let n = g.vertex_count();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::OracleCapExceeded {
            vertices: n,
            cap: ORACLE_MAX_VERTICES,
        });
    }
    let adjacency: Vec<u32> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let subsets = 1usize << n;
    let mut common = vec![0u32; subsets];
    let mut is_clique = vec![false; subsets];
    common[0] = full;
    is_clique[0] = true;
    let mut out = BTreeSet::new();
    for mask in 1..subsets {
        let low = mask.trailing_zeros();
        let rest = mask & (mask - 1);
        common[mask] = common[rest] & adjacency[low as usize];
        is_clique[mask] = is_clique[rest] && (common[rest] >> low) & 1 == 1;
        if is_clique[mask] && common[mask] & !(mask as u32) & full == 0 {
            let members = (0..n as VertexId).filter(|&v| (mask >> v) & 1 == 1).collect();
            out.insert(Clique::from_sorted(members).expect("ascending by construction"));
        }
    }
    Ok(out)
}

/// Pairwise adjacency plus a scan of every outside vertex.
pub fn is_maximal_clique(g: &Graph, members: &[VertexId]) -> bool {
    let pairwise = members
        .iter()
        .enumerate()
        .all(|(i, &u)| members[i + 1..].iter().all(|&v| u != v && g.has_edge(u, v)));
    pairwise
        && !members.is_empty()
        && g.vertices()
            .filter(|w| !members.contains(w))
            .all(|w| !members.iter().all(|&m| g.has_edge(m, w)))
}

/// Largest `|C ∩ C'| / |C|` over the summary; 0 for an empty summary.
pub fn visibility(clique: &Clique, summary: &[Clique]) -> f64 {
    if clique.is_empty() {
        return 1.0;
    }
    summary
        .iter()
        .map(|s| clique.overlap(s))
        .max()
        .map_or(0.0, |best| best as f64 / clique.len() as f64)
}

/// `|C ∩ C'| / |C|` against a single clique; 0 when `prev` is empty.
///
/// Panics if `clique` is empty.
pub fn local_visibility(clique: &[VertexId], prev: &[VertexId]) -> f64 {
    assert!(!clique.is_empty(), "local visibility of an empty clique");
    intersection_size(clique, prev) as f64 / clique.len() as f64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub tau: f64,
    pub per_clique_visibility: Vec<(Clique, f64)>,
    pub min_visibility: f64,
    pub mean_visibility: f64,
    /// Cliques seen to a fraction below τ.
    pub violating_cliques: Vec<Clique>,
}

impl VisibilityReport {
    pub fn is_tau_visible(&self) -> bool {
        self.violating_cliques.is_empty()
    }
}

/// Visibility of every clique in `all` against `summary`.
pub fn audit_against(all: &[Clique], summary: &[Clique], tau: f64) -> VisibilityReport {
    let per_clique_visibility: Vec<(Clique, f64)> = all.iter().map(|c| (c.clone(), visibility(c, summary))).collect();
    let (min_visibility, mean_visibility) = if per_clique_visibility.is_empty() {
        (1.0, 1.0)
    } else {
        let min = per_clique_visibility
            .iter()
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
        let mean = per_clique_visibility.iter().map(|(_, v)| *v).sum::<f64>() / per_clique_visibility.len() as f64;
        (min, mean)
    };
    let violating_cliques = per_clique_visibility
        .iter()
        .filter(|(_, v)| *v < tau)
        .map(|(c, _)| c.clone())
        .collect();
    VisibilityReport {
        tau,
        per_clique_visibility,
        min_visibility,
        mean_visibility,
        violating_cliques,
    }
}

/// Audits `summary` against the oracle's clique set of `g`.
pub fn audit_tau_visible(g: &Graph, summary: &[Clique], tau: f64) -> Result<VisibilityReport> {
    let all: Vec<Clique> = brute_force_mce(g)?.into_iter().collect();
    Ok(audit_against(&all, summary, tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationEstimate {
    /// Mean over runs of 1 when the clique was kept, else its visibility.
    pub mean: f64,
    pub stderr: f64,
    pub runs: usize,
}

impl ExpectationEstimate {
    /// `mean >= tau - sigmas * stderr`
    pub fn meets(&self, tau: f64, sigmas: f64) -> bool {
        self.mean >= tau - sigmas * self.stderr
    }
}

/// Monte-Carlo estimate of each maximal clique's expected visibility over
/// `runs` seeds `config.seed, config.seed + 1, ...`.
pub fn estimate_expected_visibility(
    g: &Graph,
    config: &SummaryConfig,
    runs: usize,
) -> Result<Vec<(Clique, ExpectationEstimate)>> {
    let seeds: Vec<u64> = (0..runs as u64).map(|i| config.seed.wrapping_add(i)).collect();
    estimate_expected_visibility_with_seeds(g, config, &seeds)
}

/// Same as [`estimate_expected_visibility`] with explicit seeds, which must
/// be pairwise distinct and at least two.
pub fn estimate_expected_visibility_with_seeds(
    g: &Graph,
    config: &SummaryConfig,
    seeds: &[u64],
) -> Result<Vec<(Clique, ExpectationEstimate)>> {
    if seeds.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two runs to estimate a standard error".into(),
        ));
    }
    let distinct: BTreeSet<u64> = seeds.iter().copied().collect();
    if distinct.len() != seeds.len() {
        return Err(Error::InvalidArgument("seeds must be pairwise distinct".into()));
    }
    config.validate()?;
    let all: Vec<Clique> = brute_force_mce(g)?.into_iter().collect();
    let shared = (config.order != OrderKind::Random).then(|| PreparedGraph::new(g, config.order, config.seed));

    let per_run: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<f64>> {
            let cfg = config.with_seed(seed);
            let summary = match &shared {
                Some(prepared) => crate::summarizer::summarize_prepared(prepared, &cfg)?,
                None => crate::summarizer::summarize(g, &cfg)?,
            };
            Ok(all
                .iter()
                .map(|c| {
                    if summary.contains(c) {
                        1.0
                    } else {
                        visibility(c, &summary.cliques)
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let runs = per_run.len();
    Ok(all
        .into_iter()
        .enumerate()
        .map(|(i, clique)| {
            let values = per_run.iter().map(|run| run[i]);
            let mean = values.clone().sum::<f64>() / runs as f64;
            let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (runs - 1) as f64;
            let estimate = ExpectationEstimate {
                mean,
                stderr: (var / runs as f64).sqrt(),
                runs,
            };
            (clique, estimate)
        })
        .collect())
}

/// Mean local visibility recorded in `stats`.
pub fn average_r(stats: &RunStats) -> Result<f64> {
    stats
        .mean_r()
        .ok_or_else(|| Error::InvalidArgument("no local visibility samples recorded".into()))
}

struct Shadow;

impl Probe for Shadow {
    const SHADOW: bool = true;
}

/// Runs the sampler but keeps walking pruned subtrees without drawing or
/// keeping anything there, so `stats.r_samples` covers every maximal clique
/// of the graph. The kept cliques equal those of a plain run with the same
/// configuration.
pub fn shadow_summarize(g: &Graph, config: &SummaryConfig) -> Result<Summary> {
    let prepared = PreparedGraph::new(g, config.order, config.seed);
    run_with_probe(&prepared, config, &mut Shadow)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    /// Size of the partial clique at the offending frame.
    pub frame_clique_len: usize,
    pub d_upper: usize,
    pub r_lower: f64,
    pub completed_len: usize,
    /// Local visibility of the completed clique against the previous clique
    /// the frame was sampled with.
    pub completed_r: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundAudit {
    pub frames: u64,
    pub kept_frames: u64,
    /// (ancestor frame, completed clique) pairs checked.
    pub checks: u64,
    pub violations: Vec<BoundViolation>,
}

struct FrameRecord {
    clique_len: usize,
    d_upper: usize,
    r_lower: f64,
    prev: Vec<VertexId>,
}

#[derive(Default)]
struct BoundAuditProbe {
    stack: Vec<FrameRecord>,
    audit: BoundAudit,
}

impl Probe for BoundAuditProbe {
    const SHADOW: bool = true;

    fn enter_frame(&mut self, frame: &FrameView<'_>) {
        self.audit.frames += 1;
        self.audit.kept_frames += frame.kept as u64;
        self.stack.push(FrameRecord {
            clique_len: frame.clique.len(),
            d_upper: frame.d_upper,
            r_lower: frame.r_lower,
            prev: frame.prev.to_vec(),
        });
    }

    fn exit_frame(&mut self) {
        self.stack.pop();
    }

    fn completed(&mut self, clique: &[VertexId], _prev: &[VertexId], _included: bool) {
        for frame in &self.stack {
            self.audit.checks += 1;
            let completed_r = if frame.prev.is_empty() {
                0.0
            } else {
                local_visibility(clique, &frame.prev)
            };
            let size_ok = frame.clique_len + frame.d_upper >= clique.len();
            let r_ok = frame.r_lower <= completed_r + 1e-12;
            if !(size_ok && r_ok) {
                self.audit.violations.push(BoundViolation {
                    frame_clique_len: frame.clique_len,
                    d_upper: frame.d_upper,
                    r_lower: frame.r_lower,
                    completed_len: clique.len(),
                    completed_r,
                });
            }
        }
    }
}

/// Runs the sampler and checks, for every kept clique of size `l` and every
/// sampled ancestor frame, that `|C| + d̄ >= l` and that `r̲` does not exceed
/// the clique's local visibility against the previous clique that frame saw.
pub fn audit_bounds(g: &Graph, config: &SummaryConfig) -> Result<(Summary, BoundAudit)> {
    let prepared = PreparedGraph::new(g, config.order, config.seed);
    let mut probe = BoundAuditProbe::default();
    let summary = run_with_probe(&prepared, config, &mut probe)?;
    Ok((summary, probe.audit))
}

/// All three clique-size bounds evaluated on the same candidate subgraphs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundDiagnostics {
    /// Sampled frames with a nonempty candidate set.
    pub frames: u64,
    pub mean_d_h: f64,
    pub mean_d_core: f64,
    pub mean_d_truss: f64,
    /// Frames where `truss <= core <= h` failed; always 0 for a correct build.
    pub ordering_violations: u64,
}

#[derive(Default)]
struct DiagnosticsProbe {
    frames: u64,
    sums: [u64; 3],
    ordering_violations: u64,
}

impl Probe for DiagnosticsProbe {
    fn enter_frame(&mut self, frame: &FrameView<'_>) {
        let gt = frame.candidate_graph;
        if gt.is_empty() {
            return;
        }
        let (h, core, truss) = (h_bound(gt), core_bound(gt), truss_bound(gt));
        self.frames += 1;
        self.sums[0] += h as u64;
        self.sums[1] += core as u64;
        self.sums[2] += truss as u64;
        if !(truss <= core && core <= h) {
            self.ordering_violations += 1;
        }
    }
}

/// A summarizer run that also evaluates every bound kind on each sampled
/// candidate subgraph. Sampling decisions still use `config.bound`.
pub fn bound_diagnostics(prepared: &PreparedGraph, config: &SummaryConfig) -> Result<(Summary, BoundDiagnostics)> {
    let mut probe = DiagnosticsProbe::default();
    let summary = run_with_probe(prepared, config, &mut probe)?;
    let mean = |sum: u64| {
        if probe.frames == 0 {
            0.0
        } else {
            sum as f64 / probe.frames as f64
        }
    };
    let diagnostics = BoundDiagnostics {
        frames: probe.frames,
        mean_d_h: mean(probe.sums[0]),
        mean_d_core: mean(probe.sums[1]),
        mean_d_truss: mean(probe.sums[2]),
        ordering_violations: probe.ordering_violations,
    };
    Ok((summary, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::mce::maximal_cliques;
    use crate::summarizer::{summarize, SamplingKind, SamplingMode};

    fn clique(ids: &[VertexId]) -> Clique {
        Clique::new(ids.to_vec())
    }

    #[test]
    fn oracle_examples() {
        let tri = generators::complete(3);
        assert_eq!(
            brute_force_mce(&tri).unwrap().into_iter().collect::<Vec<_>>(),
            vec![clique(&[0, 1, 2])]
        );
        assert_eq!(
            brute_force_mce(&generators::complete_multipartite(&[3, 3]))
                .unwrap()
                .len(),
            9
        );
        assert!(brute_force_mce(&Graph::empty(0)).unwrap().is_empty());
        assert_eq!(brute_force_mce(&Graph::empty(3)).unwrap().len(), 3);
    }

    #[test]
    fn oracle_matches_enumeration() {
        let g = generators::gnp(12, 0.5, 2024);
        let oracle = brute_force_mce(&g).unwrap();
        let mce: BTreeSet<Clique> = maximal_cliques(&g).into_iter().collect();
        assert_eq!(oracle, mce);
    }

    #[test]
    fn oracle_refuses_large_graphs() {
        let err = brute_force_mce(&Graph::empty(25)).unwrap_err();
        assert!(matches!(err, Error::OracleCapExceeded { vertices: 25, cap: 24 }));
    }

    #[test]
    fn maximality_check() {
        let g = generators::complete(4);
        assert!(is_maximal_clique(&g, &[0, 1, 2, 3]));
        assert!(!is_maximal_clique(&g, &[0, 1, 2]));
        let path = generators::path(3);
        assert!(!is_maximal_clique(&path, &[0, 2]));
        assert!(is_maximal_clique(&path, &[1, 2]));
    }

    #[test]
    fn visibility_examples() {
        let c = clique(&[1, 2, 3]);
        assert_eq!(visibility(&c, std::slice::from_ref(&c)), 1.0);
        assert!((visibility(&c, &[clique(&[2, 3, 4])]) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(visibility(&c, &[]), 0.0);
    }

    #[test]
    fn local_visibility_examples() {
        assert_eq!(local_visibility(&[1, 2], &[1, 2]), 1.0);
        assert_eq!(local_visibility(&[1, 2], &[3, 4]), 0.0);
        assert_eq!(local_visibility(&[1, 2, 3, 4], &[3, 4, 5]), 0.5);
        assert_eq!(local_visibility(&[1], &[]), 0.0);
    }

    #[test]
    fn visibility_dominates_local_terms() {
        let g = generators::gnp(14, 0.5, 5);
        let all = maximal_cliques(&g);
        let summary: Vec<Clique> = all.iter().step_by(3).cloned().collect();
        for c in &all {
            let v = visibility(c, &summary);
            for s in &summary {
                assert!(v >= local_visibility(c, s));
            }
        }
    }

    #[test]
    fn audit_examples() {
        let g = generators::gnp(10, 0.5, 1);
        let all: Vec<Clique> = brute_force_mce(&g).unwrap().into_iter().collect();
        let full = audit_tau_visible(&g, &all, 1.0).unwrap();
        assert!(full.is_tau_visible());
        assert_eq!(full.min_visibility, 1.0);

        let none = audit_tau_visible(&g, &[], 0.5).unwrap();
        assert_eq!(none.violating_cliques.len(), all.len());
        assert!(none.min_visibility <= none.mean_visibility);

        let exact = summarize(&generators::gnp(12, 0.5, 77), &SummaryConfig::new(1.0)).unwrap();
        let report = audit_tau_visible(&generators::gnp(12, 0.5, 77), &exact.cliques, 1.0).unwrap();
        assert!(report.is_tau_visible());
    }

    #[test]
    fn expectation_at_tau_one_is_exact() {
        let g = generators::gnp(12, 0.5, 9);
        let est = estimate_expected_visibility(&g, &SummaryConfig::new(1.0), 20).unwrap();
        for (c, e) in est {
            assert_eq!(e.mean, 1.0, "{c}");
            assert_eq!(e.stderr, 0.0);
            assert_eq!(e.runs, 20);
        }
    }

    #[test]
    fn expectation_rejects_bad_seeds() {
        let g = generators::complete(3);
        let cfg = SummaryConfig::new(0.5);
        assert!(estimate_expected_visibility_with_seeds(&g, &cfg, &[4, 4]).is_err());
        assert!(estimate_expected_visibility(&g, &cfg, 1).is_err());
    }

    #[test]
    fn average_r_examples() {
        let stats = RunStats {
            r_samples: vec![0.4],
            ..RunStats::default()
        };
        assert!((average_r(&stats).unwrap() - 0.4).abs() < 1e-12);
        let stats = RunStats {
            r_samples: vec![0.0, 1.0],
            ..RunStats::default()
        };
        assert_eq!(average_r(&stats).unwrap(), 0.5);
        assert!(average_r(&RunStats::default()).is_err());
    }

    #[test]
    fn shadow_run_keeps_same_summary_and_sees_every_clique() {
        let g = generators::gnp(18, 0.5, 31);
        let total = maximal_cliques(&g).len() as u64;
        for sampling in [SamplingKind::Baseline, SamplingKind::Opt] {
            let cfg = SummaryConfig::new(0.6).with_sampling(sampling).with_seed(3);
            let plain = summarize(&g, &cfg).unwrap();
            let shadow = shadow_summarize(&g, &cfg).unwrap();
            assert_eq!(plain.cliques, shadow.cliques);
            assert_eq!(shadow.stats.cliques_completed, total);
            assert_eq!(shadow.stats.r_samples.len() as u64, total - 1);
        }
    }

    #[test]
    fn bounds_hold_during_runs() {
        for seed in 0..30 {
            let g = generators::gnp(16, 0.55, seed);
            for tau in [0.5, 0.9, 1.0] {
                let cfg = SummaryConfig::new(tau).with_seed(seed);
                let (_, audit) = audit_bounds(&g, &cfg).unwrap();
                assert!(
                    audit.violations.is_empty(),
                    "seed {seed} tau {tau}: {:?}",
                    audit.violations[0]
                );
                assert!(audit.frames > 0);
            }
        }
    }

    #[test]
    fn diagnostics_respect_bound_chain() {
        let g = generators::gnp(30, 0.4, 12);
        let cfg = SummaryConfig::new(0.9).with_mode(SamplingMode::PerBranch);
        let prepared = PreparedGraph::new(&g, cfg.order, cfg.seed);
        let (summary, diag) = bound_diagnostics(&prepared, &cfg).unwrap();
        let plain = crate::summarizer::summarize_prepared(&prepared, &cfg).unwrap();
        assert_eq!(summary.cliques, plain.cliques);
        assert!(diag.frames > 0);
        assert_eq!(diag.ordering_violations, 0);
        assert!(diag.mean_d_truss <= diag.mean_d_core && diag.mean_d_core <= diag.mean_d_h);
    }
}
