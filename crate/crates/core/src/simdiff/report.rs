use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::{align_identities, density, graph_edit_distance, to_labeled, weight_stats};
use super::series::{dtw, ncd, spearman, to_f64, CountSeries, Metric};
use super::{overlap, OverlapReport, SimError};
use crate::artifact::RunData;
use crate::network::DeveloperNetwork;
use crate::windowing::TimeWindow;

pub const NCD_COMPRESSOR: &str = "xz (LZMA2) preset 9; values as big-endian u64";
pub const DTW_NORMALIZATION: &str =
    "min-max normalized series, |a-b| cost, unit step weights, total cost divided by len(a)+len(b)";
pub const NETWORK_BASIS: &str = "undirected collapse; self loops excluded";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesComparison {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub ncd: Option<f64>,
    pub dtw: Option<f64>,
    /// `None` when either series is constant or shorter than two windows.
    pub spearman: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowGraphStats {
    pub index: usize,
    pub density_a: f64,
    pub density_b: f64,
    pub mean_w_a: Option<f64>,
    pub mean_w_b: Option<f64>,
    pub max_w_a: Option<u64>,
    pub max_w_b: Option<u64>,
    pub ged: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub profile: String,
    pub commits: usize,
    pub entity_changes: usize,
    pub identities: usize,
    pub notices: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub run_a: RunSummary,
    pub run_b: RunSummary,
    pub ncd_compressor: String,
    pub dtw_normalization: String,
    pub network_basis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub meta: ReportMeta,
    pub windows: Vec<TimeWindow>,
    pub series: BTreeMap<Metric, SeriesComparison>,
    pub overlaps: BTreeMap<String, OverlapReport>,
    pub networks: Vec<WindowGraphStats>,
}

/// Per-window counts of commits, changed files, changed entities and active developers.
pub fn count_series(run: &RunData) -> BTreeMap<Metric, CountSeries> {
    let n = run.windows.len();
    let mut commits = vec![0u64; n];
    let mut files: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); n];
    let mut entities: Vec<BTreeSet<(&str, &str)>> = vec![BTreeSet::new(); n];
    let mut devs: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for row in &run.commits {
        let Some(w) = row.window_index.filter(|w| *w < n) else {
            continue;
        };
        commits[w] += 1;
        devs[w].insert(row.author_id);
        files[w].extend(row.commit.file_changes.iter().map(|f| f.path.as_str()));
    }
    for ch in &run.entity_changes {
        if ch.window_index < n {
            entities[ch.window_index].insert((&ch.file, &ch.entity_name));
        }
    }
    let mk = |metric, values| (metric, CountSeries { metric, values });
    BTreeMap::from([
        mk(Metric::Commits, commits),
        mk(
            Metric::Files,
            files.iter().map(|s| s.len() as u64).collect(),
        ),
        mk(
            Metric::Entities,
            entities.iter().map(|s| s.len() as u64).collect(),
        ),
        mk(
            Metric::Developers,
            devs.iter().map(|s| s.len() as u64).collect(),
        ),
    ])
}

fn same_plan(a: &[TimeWindow], b: &[TimeWindow]) -> Result<(), SimError> {
    if a.len() != b.len() {
        return Err(SimError::WindowPlanMismatch(format!(
            "{} vs {} windows",
            a.len(),
            b.len()
        )));
    }
    for (x, y) in a.iter().zip(b) {
        if (x.start_ts, x.end_ts) != (y.start_ts, y.end_ts) {
            return Err(SimError::WindowPlanMismatch(format!(
                "window {}: [{}, {}] vs [{}, {}]",
                x.index, x.start_ts, x.end_ts, y.start_ts, y.end_ts
            )));
        }
    }
    Ok(())
}

fn compare_series(a: &CountSeries, b: &CountSeries) -> SeriesComparison {
    SeriesComparison {
        a: a.values.clone(),
        b: b.values.clone(),
        ncd: ncd(&a.values, &b.values).ok(),
        dtw: dtw(&to_f64(&a.values), &to_f64(&b.values)).ok(),
        spearman: spearman(&to_f64(&a.values), &to_f64(&b.values)).ok(),
    }
}

fn summary(run: &RunData) -> RunSummary {
    RunSummary {
        profile: run.config.profile.clone(),
        commits: run.commits.len(),
        entity_changes: run.entity_changes.len(),
        identities: run.identities.len(),
        notices: run.notices.len(),
    }
}

fn network_for(run: &RunData, index: usize) -> DeveloperNetwork {
    run.networks
        .iter()
        .find(|n| n.window_index == index)
        .cloned()
        .unwrap_or_else(|| {
            DeveloperNetwork::empty(
                index,
                run.config.weight_scheme,
                run.config.include_self_loops,
            )
        })
}

pub fn compare_runs(a: &RunData, b: &RunData) -> Result<ComparisonReport, SimError> {
    same_plan(&a.windows, &b.windows)?;
    let sa = count_series(a);
    let sb = count_series(b);
    let series = Metric::ALL
        .iter()
        .map(|m| (*m, compare_series(&sa[m], &sb[m])))
        .collect();

    let align = align_identities(&a.identities, &b.identities);
    let assigned = |run: &RunData| -> Vec<usize> {
        run.commits
            .iter()
            .enumerate()
            .filter(|(_, r)| r.window_index.is_some())
            .map(|(i, _)| i)
            .collect()
    };
    let (ia, ib) = (assigned(a), assigned(b));
    let commits_of = |run: &RunData, idx: &[usize]| -> BTreeSet<String> {
        idx.iter()
            .map(|&i| run.commits[i].commit.hash.clone())
            .collect()
    };
    let files_of = |run: &RunData, idx: &[usize]| -> BTreeSet<String> {
        idx.iter()
            .flat_map(|&i| {
                run.commits[i]
                    .commit
                    .file_changes
                    .iter()
                    .map(|f| f.path.clone())
            })
            .collect()
    };
    let entities_of = |run: &RunData| -> BTreeSet<String> {
        run.entity_changes
            .iter()
            .map(|c| format!("{}::{}", c.file, c.entity_name))
            .collect()
    };
    let devs_of =
        |run: &RunData, idx: &[usize], labels: &[String]| -> Result<BTreeSet<String>, SimError> {
            idx.iter()
                .map(|&i| {
                    let id = run.commits[i].author_id;
                    labels
                        .get(id as usize)
                        .cloned()
                        .ok_or(SimError::UnalignedIdentities(id))
                })
                .collect()
        };
    let mut overlaps = BTreeMap::new();
    for (name, sa, sb) in [
        ("commits", commits_of(a, &ia), commits_of(b, &ib)),
        ("files", files_of(a, &ia), files_of(b, &ib)),
        ("entities", entities_of(a), entities_of(b)),
        (
            "developers",
            devs_of(a, &ia, &align.labels_a)?,
            devs_of(b, &ib, &align.labels_b)?,
        ),
    ] {
        overlaps.insert(name.to_string(), overlap(name, &sa, &sb));
    }

    let mut networks = Vec::with_capacity(a.windows.len());
    for w in &a.windows {
        let na = network_for(a, w.index);
        let nb = network_for(b, w.index);
        let ga = to_labeled(&na, &align.labels_a)?;
        let gb = to_labeled(&nb, &align.labels_b)?;
        let wa = weight_stats(&na, false);
        let wb = weight_stats(&nb, false);
        networks.push(WindowGraphStats {
            index: w.index,
            density_a: density(&na),
            density_b: density(&nb),
            mean_w_a: wa.mean_nonzero,
            mean_w_b: wb.mean_nonzero,
            max_w_a: wa.max,
            max_w_b: wb.max,
            ged: graph_edit_distance(&ga, &gb),
        });
    }

    Ok(ComparisonReport {
        meta: ReportMeta {
            run_a: summary(a),
            run_b: summary(b),
            ncd_compressor: NCD_COMPRESSOR.into(),
            dtw_normalization: DTW_NORMALIZATION.into(),
            network_basis: NETWORK_BASIS.into(),
        },
        windows: a.windows.clone(),
        series,
        overlaps,
        networks,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl ComparisonReport {
    /// One row per window for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "window_index,start_ts,end_ts,commits_a,commits_b,files_a,files_b,entities_a,entities_b,\
             developers_a,developers_b,density_a,density_b,mean_w_a,mean_w_b,max_w_a,max_w_b,ged\n",
        );
        for (i, w) in self.windows.iter().enumerate() {
            let mut cols = vec![
                w.index.to_string(),
                w.start_ts.to_string(),
                w.end_ts.to_string(),
            ];
            for m in Metric::ALL {
                let s = &self.series[&m];
                cols.push(s.a[i].to_string());
                cols.push(s.b[i].to_string());
            }
            let g = &self.networks[i];
            cols.extend([
                g.density_a.to_string(),
                g.density_b.to_string(),
                opt(g.mean_w_a),
                opt(g.mean_w_b),
                opt(g.max_w_a),
                opt(g.max_w_b),
                g.ged.to_string(),
            ]);
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }
}
