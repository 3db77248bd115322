//! Text and json-lines rendering. Every line goes through one buffered
//! writer; cliques are printed with their original ids, ascending.

use std::io::{self, BufWriter, Stdout, Write};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use clique_summary::summarizer::{Summary, SummaryConfig};
use clique_summary::verifier::ExpectationEstimate;
use clique_summary::{Clique, Graph, OrderKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

pub struct Sink<W: Write> {
    format: Format,
    out: W,
}

impl Sink<BufWriter<Stdout>> {
    pub fn stdout(format: Format) -> Self {
        Self::new(format, BufWriter::new(io::stdout()))
    }
}

pub fn original_ids(g: &Graph, clique: &Clique) -> Vec<u64> {
    let mut ids: Vec<u64> = clique.iter().map(|&v| g.original_id(v)).collect();
    ids.sort_unstable();
    ids
}

fn join(ids: &[u64]) -> String {
    ids.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

impl<W: Write> Sink<W> {
    pub fn new(format: Format, out: W) -> Self {
        Self { format, out }
    }

    fn json(&mut self, value: &Value) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, value)?;
        self.out.write_all(b"\n")
    }

    pub fn clique(&mut self, g: &Graph, clique: &Clique) -> io::Result<()> {
        let ids = original_ids(g, clique);
        match self.format {
            Format::Text => writeln!(self.out, "{}", join(&ids)),
            Format::JsonLines => self.json(&json!({ "clique": ids })),
        }
    }

    pub fn estimate(&mut self, g: &Graph, clique: &Clique, e: &ExpectationEstimate, ok: bool) -> io::Result<()> {
        let ids = original_ids(g, clique);
        match self.format {
            Format::Text => writeln!(
                self.out,
                "{:.4} +- {:.4} {} {}",
                e.mean,
                e.stderr,
                if ok { "ok " } else { "LOW" },
                join(&ids)
            ),
            Format::JsonLines => self.json(&json!({
                "clique": ids,
                "mean": e.mean,
                "stderr": e.stderr,
                "runs": e.runs,
                "ok": ok,
            })),
        }
    }

    pub fn violation(&mut self, g: &Graph, clique: &Clique, visibility: f64) -> io::Result<()> {
        let ids = original_ids(g, clique);
        match self.format {
            Format::Text => writeln!(self.out, "violation {visibility:.4} {}", join(&ids)),
            Format::JsonLines => self.json(&json!({ "violation": ids, "visibility": visibility })),
        }
    }

    /// A summary record. Text mode renders it as `# key=value ...`.
    pub fn record<T: Serialize>(&mut self, record: &T) -> io::Result<()> {
        let value = serde_json::to_value(record).map_err(io::Error::other)?;
        match self.format {
            Format::JsonLines => self.json(&value),
            Format::Text => {
                let Value::Object(fields) = value else {
                    return writeln!(self.out, "# {value}");
                };
                let parts: Vec<String> = fields
                    .iter()
                    .map(|(k, v)| match v {
                        Value::String(s) => format!("{k}={s}"),
                        other => format!("{k}={other}"),
                    })
                    .collect();
                writeln!(self.out, "# {}", parts.join(" "))
            }
        }
    }

    pub fn text_line(&mut self, line: &str) -> io::Result<()> {
        match self.format {
            Format::Text => writeln!(self.out, "{line}"),
            Format::JsonLines => Ok(()),
        }
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// Configuration fields echoed into every record.
#[derive(Serialize)]
pub struct ConfigEcho {
    pub tau: f64,
    pub sampling: String,
    pub bound: String,
    pub order: String,
    pub y_estimator: String,
    pub mode: String,
    pub force_first: bool,
}

impl From<&SummaryConfig> for ConfigEcho {
    fn from(c: &SummaryConfig) -> Self {
        Self {
            tau: c.tau,
            sampling: c.sampling.to_string(),
            bound: c.bound.to_string(),
            order: c.order.to_string(),
            y_estimator: c.y_estimator.to_string(),
            mode: c.mode.to_string(),
            force_first: c.force_first,
        }
    }
}

#[derive(Serialize)]
pub struct EnumerateRecord {
    pub record: &'static str,
    pub order: OrderKind,
    pub cliques: u64,
    pub peak_frames: u64,
}

#[derive(Serialize)]
pub struct SummaryRecord {
    pub record: &'static str,
    #[serde(flatten)]
    pub config: ConfigEcho,
    pub seed: u64,
    pub summary_size: u64,
    pub cliques_completed: u64,
    pub branches_kept: u64,
    pub branches_pruned: u64,
    pub average_r: Option<f64>,
    pub peak_frames: u64,
}

impl SummaryRecord {
    pub fn new(summary: &Summary) -> Self {
        let s = &summary.stats;
        Self {
            record: "stats",
            config: ConfigEcho::from(&summary.config),
            seed: summary.config.seed,
            summary_size: s.summary_size,
            cliques_completed: s.cliques_completed,
            branches_kept: s.branches_kept,
            branches_pruned: s.branches_pruned,
            average_r: s.mean_r(),
            peak_frames: s.peak_frames,
        }
    }
}

#[derive(Serialize)]
pub struct VerdictRecord {
    pub record: &'static str,
    pub pass: bool,
    pub tau: f64,
    pub runs: u64,
    pub cliques: usize,
    /// Cliques whose mean fell below `tau - 3 stderr`, or that violate the
    /// audited summary when no sampling was run.
    pub below_margin: usize,
    pub audit_violations: Option<usize>,
}
