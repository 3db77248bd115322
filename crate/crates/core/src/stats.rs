use serde::{Deserialize, Serialize};

/// Counters collected by one enumeration or summarization run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub summary_size: u64,
    /// Maximal cliques reached by the search, whether or not they were kept.
    pub cliques_completed: u64,
    pub branches_kept: u64,
    pub branches_pruned: u64,
    /// Local visibility of every completed clique that had a previous summary
    /// clique to compare against.
    pub r_samples: Vec<f64>,
    /// Seconds.
    pub wall_time: f64,
    /// Deepest stack of search frames, root included.
    pub peak_frames: u64,
}

impl RunStats {
    pub fn mean_r(&self) -> Option<f64> {
        if self.r_samples.is_empty() {
            None
        } else {
            Some(self.r_samples.iter().sum::<f64>() / self.r_samples.len() as f64)
        }
    }

    /// Equality ignoring `wall_time`.
    pub fn same_outcome(&self, other: &RunStats) -> bool {
        self.summary_size == other.summary_size
            && self.cliques_completed == other.cliques_completed
            && self.branches_kept == other.branches_kept
            && self.branches_pruned == other.branches_pruned
            && self.peak_frames == other.peak_frames
            && self.r_samples.len() == other.r_samples.len()
            && self
                .r_samples
                .iter()
                .zip(&other.r_samples)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
