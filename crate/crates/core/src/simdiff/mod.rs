//! Similarity and discrepancy measures between two mining runs.

pub mod graph;
pub mod plot;
pub mod report;
pub mod series;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use graph::{
    align_identities, density, graph_edit_distance, to_labeled, weight_stats, LabeledGraph,
    WeightStats,
};
pub use report::{compare_runs, ComparisonReport};
pub use series::{dtw, ncd, spearman, CountSeries, Metric};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("series is empty")]
    EmptySeries,
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least two values, got {0}")]
    TooShort(usize),
    #[error("correlation undefined for a constant series")]
    ConstantSeries,
    #[error("developer {0} has no identity to align")]
    UnalignedIdentities(u32),
    #[error("window plans differ: {0}")]
    WindowPlanMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub metric: String,
    pub joint: usize,
    pub only_a: usize,
    pub only_b: usize,
    /// 1 when both sets are empty.
    pub jaccard: f64,
    /// Share of A found in B; 1 when A is empty.
    pub frac_of_a: f64,
    /// Share of B found in A; 1 when B is empty.
    pub frac_of_b: f64,
}

pub fn overlap(metric: &str, a: &BTreeSet<String>, b: &BTreeSet<String>) -> OverlapReport {
    let joint = a.intersection(b).count();
    let only_a = a.len() - joint;
    let only_b = b.len() - joint;
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    OverlapReport {
        metric: metric.to_string(),
        joint,
        only_a,
        only_b,
        jaccard: ratio(joint, joint + only_a + only_b),
        frac_of_a: ratio(joint, a.len()),
        frac_of_b: ratio(joint, b.len()),
    }
}
