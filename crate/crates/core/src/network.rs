//! Developer collaboration networks from per-entity contribution sequences.
//!
//! For a commit `c_i` by developer `b` and earlier commits `c_j` by developer `a`
//! to the same entity, the edge `b -> a` accumulates
//!
//! * nested: `sloc(c_i) + sloc(c_j)` for every such earlier `c_j`;
//! * flat: `sloc(c_i)` once per collaborator, plus the sum of that collaborator's
//!   earlier `sloc(c_j)`.
//!
//! Entity weights are summed over all entities of the window.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entities::EntityChange;

pub type DevId = u32;
pub type EdgeMap = BTreeMap<(DevId, DevId), u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    NestedPairwise,
    FlatSum,
}

impl WeightScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::NestedPairwise => "nested_pairwise",
            WeightScheme::FlatSum => "flat_sum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nested_pairwise" => Some(WeightScheme::NestedPairwise),
            "flat_sum" => Some(WeightScheme::FlatSum),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contribution {
    pub dev: DevId,
    pub commit: String,
    pub sloc: u64,
    pub ts: i64,
}

/// Time-ordered contributions keyed by `(file, entity)`.
pub type ContributionSeq = BTreeMap<(String, String), Vec<Contribution>>;

/// Groups identity-resolved changes by entity, ordered by timestamp then hash.
///
/// # Panics
///
/// If a change has no canonical developer id.
pub fn build_contributions(changes: &[EntityChange]) -> ContributionSeq {
    let mut seq = ContributionSeq::new();
    for ch in changes {
        seq.entry((ch.file.clone(), ch.entity_name.clone()))
            .or_default()
            .push(Contribution {
                dev: ch.dev_id.expect("entity change without resolved identity"),
                commit: ch.commit.clone(),
                sloc: ch.sloc as u64,
                ts: ch.ts,
            });
    }
    for list in seq.values_mut() {
        list.sort_by(|a, b| a.ts.cmp(&b.ts).then_with(|| a.commit.cmp(&b.commit)));
    }
    seq
}

pub fn edge_weight_nested(seq: &[Contribution], include_self_loops: bool) -> EdgeMap {
    let mut w = EdgeMap::new();
    for (i, ci) in seq.iter().enumerate() {
        for cj in &seq[..i] {
            if ci.dev == cj.dev && !include_self_loops {
                continue;
            }
            *w.entry((ci.dev, cj.dev)).or_default() += ci.sloc + cj.sloc;
        }
    }
    w
}

pub fn edge_weight_flat(seq: &[Contribution], include_self_loops: bool) -> EdgeMap {
    let mut w = EdgeMap::new();
    let mut prior: BTreeMap<DevId, u64> = BTreeMap::new();
    for ci in seq {
        for (&a, &prior_sloc) in &prior {
            if a == ci.dev && !include_self_loops {
                continue;
            }
            *w.entry((ci.dev, a)).or_default() += ci.sloc + prior_sloc;
        }
        *prior.entry(ci.dev).or_default() += ci.sloc;
    }
    w
}

pub fn edge_weights(
    seq: &[Contribution],
    scheme: WeightScheme,
    include_self_loops: bool,
) -> EdgeMap {
    match scheme {
        WeightScheme::NestedPairwise => edge_weight_nested(seq, include_self_loops),
        WeightScheme::FlatSum => edge_weight_flat(seq, include_self_loops),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeveloperNetwork {
    pub window_index: usize,
    pub scheme: WeightScheme,
    pub include_self_loops: bool,
    pub nodes: BTreeSet<DevId>,
    /// Directed `(from, to)` weights; present edges are positive.
    pub edges: EdgeMap,
}

impl DeveloperNetwork {
    pub fn empty(window_index: usize, scheme: WeightScheme, include_self_loops: bool) -> Self {
        DeveloperNetwork {
            window_index,
            scheme,
            include_self_loops,
            nodes: BTreeSet::new(),
            edges: EdgeMap::new(),
        }
    }

    pub fn weight(&self, from: DevId, to: DevId) -> u64 {
        self.edges.get(&(from, to)).copied().unwrap_or(0)
    }
}

fn merge(mut a: EdgeMap, b: EdgeMap) -> EdgeMap {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

pub fn build_network(
    changes: &[EntityChange],
    window_index: usize,
    scheme: WeightScheme,
    include_self_loops: bool,
) -> DeveloperNetwork {
    let seq = build_contributions(changes);
    let lists: Vec<&Vec<Contribution>> = seq.values().collect();
    let edges = lists
        .par_iter()
        .map(|list| edge_weights(list, scheme, include_self_loops))
        .reduce(EdgeMap::new, merge);
    let nodes = changes.iter().filter_map(|c| c.dev_id).collect();
    DeveloperNetwork {
        window_index,
        scheme,
        include_self_loops,
        nodes,
        edges: edges.into_iter().filter(|(_, w)| *w > 0).collect(),
    }
}

/// Symmetric network with `w'(u, v) = w(u, v) + w(v, u)`; self loops unchanged.
pub fn collapse_undirected(net: &DeveloperNetwork) -> DeveloperNetwork {
    let mut edges = EdgeMap::new();
    for (&(u, v), &w) in &net.edges {
        if u == v {
            *edges.entry((u, u)).or_default() += w;
        } else {
            *edges.entry((u, v)).or_default() += w;
            *edges.entry((v, u)).or_default() += w;
        }
    }
    DeveloperNetwork {
        edges,
        ..net.clone()
    }
}

/// Undirected pairs `u < v` with their combined weight.
pub fn undirected_pairs(net: &DeveloperNetwork) -> BTreeMap<(DevId, DevId), u64> {
    let mut pairs = BTreeMap::new();
    for (&(u, v), &w) in &net.edges {
        if u != v {
            *pairs.entry((u.min(v), u.max(v))).or_default() += w;
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(dev: DevId, sloc: u64, ts: i64) -> Contribution {
        Contribution {
            dev,
            commit: format!("{ts:040}"),
            sloc,
            ts,
        }
    }

    #[test]
    fn nested_examples() {
        let w = edge_weight_nested(&[c(0, 10, 1), c(1, 5, 2)], true);
        assert_eq!(w.get(&(1, 0)), Some(&15));
        let w = edge_weight_nested(&[c(0, 10, 1), c(0, 20, 2), c(1, 5, 3)], true);
        assert_eq!(w.get(&(1, 0)), Some(&40));
        assert_eq!(w.get(&(0, 0)), Some(&30));
        assert!(edge_weight_nested(&[c(0, 7, 1)], true).is_empty());
    }

    #[test]
    fn flat_examples() {
        let w = edge_weight_flat(&[c(0, 10, 1), c(1, 5, 2)], true);
        assert_eq!(w.get(&(1, 0)), Some(&15));
        let w = edge_weight_flat(&[c(0, 10, 1), c(0, 20, 2), c(1, 5, 3)], true);
        assert_eq!(w.get(&(1, 0)), Some(&35));
        assert!(edge_weight_flat(&[c(3, 1, 1)], true).is_empty());
    }

    #[test]
    fn self_loops_optional() {
        let seq = [c(0, 10, 1), c(0, 20, 2)];
        assert!(edge_weight_nested(&seq, false).is_empty());
        assert!(edge_weight_flat(&seq, false).is_empty());
        assert_eq!(edge_weight_flat(&seq, true).get(&(0, 0)), Some(&30));
    }

    fn change(
        file: &str,
        entity: &str,
        dev: u32,
        commit: &str,
        sloc: u32,
        ts: i64,
    ) -> EntityChange {
        EntityChange {
            window_index: 0,
            file: file.into(),
            entity_name: entity.into(),
            entity_kind: "function".into(),
            dev_name: format!("d{dev}"),
            dev_email: format!("d{dev}@x"),
            commit: commit.into(),
            sloc,
            ts,
            dev_id: Some(dev),
        }
    }

    #[test]
    fn contributions_tie_break_on_hash() {
        let seq = build_contributions(&[
            change("a.c", "f", 0, "bbb", 1, 5),
            change("a.c", "f", 1, "aaa", 1, 5),
            change("a.c", "f", 2, "ccc", 1, 4),
        ]);
        let list = &seq[&("a.c".to_string(), "f".to_string())];
        let order: Vec<_> = list.iter().map(|c| c.commit.as_str()).collect();
        assert_eq!(order, vec!["ccc", "aaa", "bbb"]);
        assert!(build_contributions(&[]).is_empty());
    }

    #[test]
    fn empty_window_network() {
        let n = build_network(&[], 0, WeightScheme::NestedPairwise, true);
        assert!(n.nodes.is_empty() && n.edges.is_empty());
    }

    #[test]
    fn isolated_nodes_kept() {
        let n = build_network(
            &[
                change("a.c", "f", 0, "a", 3, 1),
                change("b.c", "g", 1, "b", 2, 2),
            ],
            0,
            WeightScheme::FlatSum,
            true,
        );
        assert_eq!(n.nodes.len(), 2);
        assert!(n.edges.is_empty());
    }

    #[test]
    fn collapse_examples() {
        let mut n = DeveloperNetwork::empty(0, WeightScheme::FlatSum, true);
        n.nodes.extend([0, 1, 2]);
        n.edges.insert((0, 1), 3);
        n.edges.insert((2, 2), 4);
        let u = collapse_undirected(&n);
        assert_eq!(u.weight(0, 1), 3);
        assert_eq!(u.weight(1, 0), 3);
        assert_eq!(u.weight(2, 2), 4);

        let mut s = DeveloperNetwork::empty(0, WeightScheme::FlatSum, true);
        s.edges.insert((0, 1), 2);
        s.edges.insert((1, 0), 2);
        let su = collapse_undirected(&s);
        assert_eq!(su.weight(0, 1), 4);
    }
}
