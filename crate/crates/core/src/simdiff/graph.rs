//! Network statistics and labeled graph edit distance.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::identities::IdentityTable;
use crate::network::{undirected_pairs, DeveloperNetwork};

/// `2m / (n (n - 1))` over the undirected collapse without self loops; 0 below two nodes.
pub fn density(net: &DeveloperNetwork) -> f64 {
    let n = net.nodes.len();
    if n < 2 {
        return 0.0;
    }
    let m = undirected_pairs(net).len();
    2.0 * m as f64 / (n as f64 * (n as f64 - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightStats {
    pub mean_nonzero: Option<f64>,
    pub max: Option<u64>,
}

/// Mean and maximum of the undirected edge weights.
pub fn weight_stats(net: &DeveloperNetwork, include_self_loops: bool) -> WeightStats {
    let mut weights: Vec<u64> = undirected_pairs(net).into_values().collect();
    if include_self_loops {
        weights.extend(
            net.edges
                .iter()
                .filter(|((u, v), _)| u == v)
                .map(|(_, w)| *w),
        );
    }
    weights.retain(|w| *w > 0);
    if weights.is_empty() {
        return WeightStats {
            mean_nonzero: None,
            max: None,
        };
    }
    WeightStats {
        mean_nonzero: Some(weights.iter().sum::<u64>() as f64 / weights.len() as f64),
        max: weights.iter().max().copied(),
    }
}

/// Undirected graph over shared node labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    pub nodes: BTreeSet<String>,
    /// Unordered pairs stored with the smaller label first.
    pub edges: BTreeSet<(String, String)>,
}

impl LabeledGraph {
    pub fn add_edge(&mut self, a: &str, b: &str) {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        self.nodes.insert(a.to_string());
        self.nodes.insert(b.to_string());
        self.edges.insert((x.to_string(), y.to_string()));
    }
}

/// Node and edge insertions plus deletions; exact since labels fix the node correspondence.
pub fn graph_edit_distance(a: &LabeledGraph, b: &LabeledGraph) -> u64 {
    let nodes = a.nodes.symmetric_difference(&b.nodes).count();
    let edges = a.edges.symmetric_difference(&b.edges).count();
    (nodes + edges) as u64
}

/// Relabels a network's nodes; self loops are dropped.
pub fn to_labeled(net: &DeveloperNetwork, labels: &[String]) -> Result<LabeledGraph, SimError> {
    let label = |id: u32| {
        labels
            .get(id as usize)
            .cloned()
            .ok_or(SimError::UnalignedIdentities(id))
    };
    let mut g = LabeledGraph::default();
    for &n in &net.nodes {
        g.nodes.insert(label(n)?);
    }
    for (u, v) in undirected_pairs(net).into_keys() {
        g.add_edge(&label(u)?, &label(v)?);
    }
    Ok(g)
}

/// Shared labels for the identities of two runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub labels_a: Vec<String>,
    pub labels_b: Vec<String>,
}

/// Pairs each identity of run B with at most one identity of run A, preferring a
/// shared normalized email over a shared normalized name. Unpaired identities
/// keep run-specific labels.
pub fn align_identities(a: &IdentityTable, b: &IdentityTable) -> Alignment {
    let labels_a: Vec<String> = a
        .identities
        .iter()
        .map(|i| format!("dev{}", i.id))
        .collect();
    let mut by_email: HashMap<&str, Vec<u32>> = HashMap::new();
    let mut by_name: HashMap<&str, Vec<u32>> = HashMap::new();
    for ident in &a.identities {
        for e in &ident.emails {
            by_email.entry(e).or_default().push(ident.id);
        }
        for n in &ident.names {
            by_name.entry(n).or_default().push(ident.id);
        }
    }
    let mut claimed = vec![false; a.identities.len()];
    let mut labels_b = Vec::with_capacity(b.identities.len());
    for ident in &b.identities {
        let pick = |index: &HashMap<&str, Vec<u32>>, keys: &BTreeSet<String>, claimed: &[bool]| {
            keys.iter()
                .filter_map(|k| index.get(k.as_str()))
                .flatten()
                .copied()
                .filter(|id| !claimed[*id as usize])
                .min()
        };
        let found = pick(&by_email, &ident.emails, &claimed)
            .or_else(|| pick(&by_name, &ident.names, &claimed));
        match found {
            Some(id) => {
                claimed[id as usize] = true;
                labels_b.push(labels_a[id as usize].clone());
            }
            None => labels_b.push(format!("b-only{}", ident.id)),
        }
    }
    Alignment { labels_a, labels_b }
}
