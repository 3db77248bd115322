//! Grid runs over (tau, sampling, bound, order), averaged over seeds.

use std::process::ExitCode;

use anyhow::Result;
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use clique_summary::summarizer::{summarize, PreparedGraph, SamplingKind, SamplingMode, SummaryConfig, YEstimator};
use clique_summary::verifier::{bound_diagnostics, BoundDiagnostics};
use clique_summary::{BoundKind, Graph, OrderKind, RunStats};

use crate::output::{ConfigEcho, Format, Sink};
use crate::InputArgs;

#[derive(Args)]
pub struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Comma-separated thresholds.
    #[arg(long, value_delimiter = ',', required = true)]
    tau: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_value = "h,core,truss")]
    bounds: Vec<BoundKind>,

    #[arg(long, value_delimiter = ',', default_value = "random,degeneracy,truss")]
    orders: Vec<OrderKind>,

    #[arg(long, value_delimiter = ',', default_value = "opt")]
    sampling: Vec<SamplingKind>,

    #[arg(long = "y-est", default_value = "degree")]
    y_est: YEstimator,

    #[arg(long, default_value = "branch")]
    mode: SamplingMode,

    /// First seed; runs use `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Runs averaged into each record.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,

    /// Also evaluate every bound kind on each sampled frame.
    #[arg(long)]
    diagnostics: bool,

    #[arg(long, value_enum, default_value_t = Format::JsonLines)]
    output: Format,
}

#[derive(Serialize)]
struct BenchRecord {
    #[serde(flatten)]
    config: ConfigEcho,
    first_seed: u64,
    runs: u64,
    mean_summary_size: f64,
    mean_cliques_completed: f64,
    mean_branches_pruned: f64,
    /// Averaged over runs that recorded any local visibility.
    mean_average_r: Option<f64>,
    mean_wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<BoundDiagnostics>,
}

fn grid(args: &BenchArgs) -> Vec<SummaryConfig> {
    let mut configs = Vec::new();
    for &tau in &args.tau {
        for &sampling in &args.sampling {
            for &bound in &args.bounds {
                for &order in &args.orders {
                    configs.push(
                        SummaryConfig::new(tau)
                            .with_sampling(sampling)
                            .with_bound(bound)
                            .with_order(order)
                            .with_y_estimator(args.y_est)
                            .with_mode(args.mode),
                    );
                }
            }
        }
    }
    configs
}

fn run_once(g: &Graph, config: &SummaryConfig, diagnostics: bool) -> Result<(RunStats, Option<BoundDiagnostics>)> {
    if diagnostics {
        let prepared = PreparedGraph::new(g, config.order, config.seed);
        let (summary, diag) = bound_diagnostics(&prepared, config)?;
        Ok((summary.stats, Some(diag)))
    } else {
        Ok((summarize(g, config)?.stats, None))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn aggregate(config: &SummaryConfig, args: &BenchArgs, runs: &[(RunStats, Option<BoundDiagnostics>)]) -> BenchRecord {
    let avg = |f: fn(&RunStats) -> f64| mean(runs.iter().map(|(s, _)| f(s))).unwrap_or(0.0);
    let diagnostics = args.diagnostics.then(|| {
        let diags: Vec<&BoundDiagnostics> = runs.iter().filter_map(|(_, d)| d.as_ref()).collect();
        let m = |f: fn(&BoundDiagnostics) -> f64| mean(diags.iter().map(|d| f(d))).unwrap_or(0.0);
        BoundDiagnostics {
            frames: diags.iter().map(|d| d.frames).sum(),
            mean_d_h: m(|d| d.mean_d_h),
            mean_d_core: m(|d| d.mean_d_core),
            mean_d_truss: m(|d| d.mean_d_truss),
            ordering_violations: diags.iter().map(|d| d.ordering_violations).sum(),
        }
    });
    BenchRecord {
        config: ConfigEcho::from(config),
        first_seed: args.seed,
        runs: runs.len() as u64,
        mean_summary_size: avg(|s| s.summary_size as f64),
        mean_cliques_completed: avg(|s| s.cliques_completed as f64),
        mean_branches_pruned: avg(|s| s.branches_pruned as f64),
        mean_average_r: mean(runs.iter().filter_map(|(s, _)| s.mean_r())),
        mean_wall_time: avg(|s| s.wall_time),
        diagnostics,
    }
}

pub fn run(args: &BenchArgs, pool: &rayon::ThreadPool) -> Result<ExitCode> {
    let g = args.input.load()?;
    let configs = grid(args);
    for config in &configs {
        config.validate()?;
    }
    let tasks: Vec<(usize, SummaryConfig)> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..args.runs).map(move |k| (i, c.with_seed(args.seed.wrapping_add(k)))))
        .collect();
    let results: Vec<(RunStats, Option<BoundDiagnostics>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(_, cfg)| run_once(&g, cfg, args.diagnostics))
            .collect::<Result<_>>()
    })?;

    let mut sink = Sink::stdout(args.output);
    for (i, config) in configs.iter().enumerate() {
        let runs: Vec<_> = tasks
            .iter()
            .zip(&results)
            .filter(|((owner, _), _)| *owner == i)
            .map(|(_, r)| r.clone())
            .collect();
        sink.record(&aggregate(config, args, &runs))?;
    }
    sink.flush()?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct Wrapper {
        #[command(flatten)]
        bench: BenchArgs,
    }

    #[test]
    fn default_grid_size() {
        let w = Wrapper::parse_from(["bench", "--input", "g.txt", "--tau", "0.5,0.6,0.7,0.8,0.9"]);
        assert_eq!(grid(&w.bench).len(), 45);
        let w = Wrapper::parse_from(["bench", "-i", "g.txt", "--tau", "0.5", "--sampling", "baseline,opt"]);
        assert_eq!(grid(&w.bench).len(), 18);
    }

    #[test]
    fn mean_of_nothing_is_none() {
        assert_eq!(mean(std::iter::empty()), None);
        assert_eq!(mean([1.0, 2.0].into_iter()), Some(1.5));
    }
}
