//! End-to-end mining of one repository under one configuration.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::artifact::{CommitRow, RunData, RunMeta};
use crate::config::RunConfig;
use crate::entities::{
    entity_changes_for_window, language_for_suffix, CtagsCli, EntityContext, TagTool,
};
use crate::filters::filter_commits;
use crate::identities::{apply_identities, match_identities, raw_identity_stream};
use crate::network::build_network;
use crate::notice::Notice;
use crate::repo_io::{git_bin_from_env, open_repo_with, CommitRecord};
use crate::windowing::{assign_commits, derive_windows, explicit_windows, TimeWindow};

#[derive(Debug, Error)]
#[error("{stage} stage failed: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

fn at(stage: &'static str) -> impl Fn(&dyn std::fmt::Display) -> PipelineError {
    move |e| PipelineError {
        stage,
        message: e.to_string(),
    }
}

/// External programs used by a run.
pub struct Tools {
    pub git_bin: PathBuf,
    pub tag_tool: Box<dyn TagTool>,
}

impl Tools {
    pub fn from_env() -> Self {
        Tools {
            git_bin: git_bin_from_env(),
            tag_tool: Box::new(CtagsCli::from_env()),
        }
    }
}

/// Orders commits by basis timestamp, keeping extraction order among ties.
fn by_basis_time<'a>(commits: &'a [CommitRecord], config: &RunConfig) -> Vec<&'a CommitRecord> {
    let mut v: Vec<&CommitRecord> = commits.iter().collect();
    v.sort_by_key(|c| c.ts(config.timestamp_basis));
    v
}

fn plan_windows(
    commits: &[CommitRecord],
    config: &RunConfig,
    notices: &mut Vec<Notice>,
) -> Result<Vec<TimeWindow>, PipelineError> {
    if let Some(b) = &config.explicit_boundaries {
        return explicit_windows(b, config.include_window_end).map_err(|e| at("windows")(&e));
    }
    if commits.is_empty() {
        notices.push(Notice::EmptyHistory);
        return Ok(Vec::new());
    }
    derive_windows(
        commits,
        config.window_months,
        config.timestamp_basis,
        config.include_window_end,
    )
    .map_err(|e| at("windows")(&e))
}

pub fn mine(config: &RunConfig, repo_path: &Path, tools: &Tools) -> Result<RunData, PipelineError> {
    config.validate().map_err(|e| at("config")(&e))?;
    let mut config = config.clone();
    config.repo_path = Some(repo_path.to_path_buf());

    let repo = open_repo_with(repo_path, tools.git_bin.clone()).map_err(|e| at("open")(&e))?;
    let head = repo.head().map_err(|e| at("open")(&e))?;
    let extracted = repo
        .extract_log(config.include_merges)
        .map_err(|e| at("extract")(&e))?;

    let mut notices = Vec::new();
    let filtered =
        filter_commits(&extracted, &config.filter_profile).map_err(|e| at("filter")(&e))?;
    let compiled = config
        .filter_profile
        .compile()
        .map_err(|e| at("filter")(&e))?;
    for (_, path) in &filtered.dropped {
        if !compiled.rejected_by_suffix(path) {
            continue;
        }
        if let Some(language) = language_for_suffix(path) {
            notices.push(Notice::UnsupportedLanguage {
                path: path.clone(),
                language: language.to_string(),
                stage: "suffix_filter".into(),
            });
        }
    }
    let commits = filtered.records;

    let windows = plan_windows(&commits, &config, &mut notices)?;
    let assignment = assign_commits(&commits, &windows, config.timestamp_basis);
    if !assignment.unassigned.is_empty() {
        notices.push(Notice::UnassignedCommits {
            count: assignment.unassigned.len(),
        });
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| at("entities")(&e))?;
    let known: HashSet<String> = commits.iter().map(|c| c.hash.clone()).collect();
    let ctx = EntityContext {
        repo: &repo,
        tool: tools.tag_tool.as_ref(),
        tag_set: &config.tag_set,
        basis: config.timestamp_basis,
        follow_renames: config.follow_renames,
        known_commits: &known,
    };
    let mut changes = Vec::new();
    let mut blame_discovered = Vec::new();
    for (index, bucket) in &assignment.buckets {
        // stable: ties keep extraction order, so rows come out in (time, commit, path, line) order
        let mut bucket = bucket.clone();
        bucket.sort_by_key(|c| c.ts(config.timestamp_basis));
        let part =
            entity_changes_for_window(&ctx, *index, &bucket, &config.filter_profile, Some(&pool))
                .map_err(|e| at("entities")(&e))?;
        changes.extend(part.changes);
        blame_discovered.extend(part.blame_discovered);
        notices.extend(part.notices);
    }
    blame_discovered.sort();

    let ordered = by_basis_time(&commits, &config);
    let raws = raw_identity_stream(&ordered, &changes);
    let identities = match_identities(&raws, config.identity_scope);
    let (changes, identified) =
        apply_identities(&changes, &commits, &identities).map_err(|e| at("identities")(&e))?;

    let networks = windows
        .iter()
        .map(|w| {
            let in_window: Vec<_> = changes
                .iter()
                .filter(|c| c.window_index == w.index)
                .cloned()
                .collect();
            build_network(
                &in_window,
                w.index,
                config.weight_scheme,
                config.include_self_loops,
            )
        })
        .collect();

    let window_of: HashMap<&str, usize> = assignment
        .buckets
        .iter()
        .flat_map(|(i, cs)| cs.iter().map(move |c| (c.hash.as_str(), *i)))
        .collect();
    let commit_rows: Vec<CommitRow> = identified
        .into_iter()
        .map(|ic| CommitRow {
            window_index: window_of.get(ic.commit.hash.as_str()).copied(),
            author_id: ic.author_id,
            committer_id: ic.committer_id,
            commit: ic.commit,
        })
        .collect();

    notices.sort();
    notices.dedup();

    Ok(RunData {
        meta: RunMeta {
            repo_path: repo.root().display().to_string(),
            head,
            commits_extracted: extracted.len(),
            commits_after_filter: commits.len(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        config,
        windows,
        commits: commit_rows,
        entity_changes: changes,
        identities,
        networks,
        blame_discovered,
        notices,
    })
}
