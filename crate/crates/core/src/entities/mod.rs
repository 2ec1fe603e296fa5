//! Attribution of added lines to code entities.
//!
//! For every surviving file of a commit, the added lines of the zero-context diff
//! against the first parent are intersected with the entity spans of the
//! post-change revision. Deletions never create entity changes.

pub mod ctags;

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ctags::{
    count_lines, language_for_suffix, parse_json_tags, resolve_spans, run_ctags, CtagsCli,
    EntityDef, RawTag, TagSet, TagTool,
};

use crate::filters::{CompiledFilter, FilterError, FilterProfile};
use crate::notice::Notice;
use crate::repo_io::{ChangeKind, CommitRecord, RepoError, RepoHandle};
use crate::windowing::TimestampBasis;

#[derive(Debug, Error)]
pub enum EntityError {
    #[error("tag tool invocation failed: {0}")]
    CliInvocationFailure(String),
    #[error("tag tool output could not be parsed: {0}")]
    OutputParseFailure(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error(transparent)]
    Repo(#[from] RepoError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityChange {
    pub window_index: usize,
    pub file: String,
    pub entity_name: String,
    pub entity_kind: String,
    pub dev_name: String,
    pub dev_email: String,
    pub commit: String,
    pub sloc: u32,
    pub ts: i64,
    /// Canonical developer, filled in by identity resolution.
    #[serde(skip)]
    pub dev_id: Option<u32>,
}

/// Prior lines of a touched entity whose origin commit is not in the run's commit table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlameDiscovered {
    pub window_index: usize,
    pub commit: String,
    pub file: String,
    pub entity_name: String,
    pub origin_hash: String,
    pub origin_author_name: String,
    pub origin_author_email: String,
    pub lines: u32,
}

pub struct EntityContext<'a> {
    pub repo: &'a RepoHandle,
    pub tool: &'a dyn TagTool,
    pub tag_set: &'a TagSet,
    pub basis: TimestampBasis,
    pub follow_renames: bool,
    /// Hashes of the run's commit table; blame origins outside it are reported.
    pub known_commits: &'a HashSet<String>,
}

#[derive(Debug, Clone, Default)]
pub struct WindowEntities {
    pub changes: Vec<EntityChange>,
    pub blame_discovered: Vec<BlameDiscovered>,
    pub notices: Vec<Notice>,
}

impl WindowEntities {
    fn extend(&mut self, other: WindowEntities) {
        self.changes.extend(other.changes);
        self.blame_discovered.extend(other.blame_discovered);
        self.notices.extend(other.notices);
    }
}

/// Entity changes of one window's commits.
///
/// A failure on one file is recorded as a notice and the file skipped. With a
/// thread pool, commits are processed in parallel and merged in input order.
pub fn entity_changes_for_window(
    ctx: &EntityContext<'_>,
    window_index: usize,
    commits: &[&CommitRecord],
    profile: &FilterProfile,
    pool: Option<&rayon::ThreadPool>,
) -> Result<WindowEntities, EntityError> {
    let filter = profile.compile()?;
    let per_commit: Vec<WindowEntities> = match pool {
        Some(pool) => pool.install(|| {
            commits
                .par_iter()
                .map(|c| commit_entities(ctx, window_index, c, &filter))
                .collect()
        }),
        None => commits
            .iter()
            .map(|c| commit_entities(ctx, window_index, c, &filter))
            .collect(),
    };
    let mut out = WindowEntities::default();
    for part in per_commit {
        out.extend(part);
    }
    Ok(out)
}

fn commit_entities(
    ctx: &EntityContext<'_>,
    window_index: usize,
    commit: &CommitRecord,
    filter: &CompiledFilter,
) -> WindowEntities {
    let mut out = WindowEntities::default();
    let files: Vec<_> = commit
        .file_changes
        .iter()
        .filter(|fc| fc.change_kind != ChangeKind::Deleted && filter.keeps(&fc.path))
        .collect();
    if files.is_empty() {
        return out;
    }
    let diffs = match ctx.repo.commit_diff(commit) {
        Ok(d) => d,
        Err(e) => {
            out.notices.push(Notice::FileFailure {
                commit: commit.hash.clone(),
                path: String::new(),
                stage: "diff".into(),
                message: e.to_string(),
            });
            return out;
        }
    };
    for fc in files {
        let Some(diff) = diffs.iter().find(|d| d.path == fc.path) else {
            continue;
        };
        if diff.added_lines.is_empty() {
            continue;
        }
        if let Err(e) = file_entities(
            ctx,
            window_index,
            commit,
            &fc.path,
            fc.old_path.as_deref(),
            &diff.added_lines,
            &mut out,
        ) {
            out.notices.push(Notice::FileFailure {
                commit: commit.hash.clone(),
                path: fc.path.clone(),
                stage: "entities".into(),
                message: e.to_string(),
            });
        }
    }
    out
}

fn file_entities(
    ctx: &EntityContext<'_>,
    window_index: usize,
    commit: &CommitRecord,
    path: &str,
    old_path: Option<&str>,
    added_lines: &[u32],
    out: &mut WindowEntities,
) -> Result<(), EntityError> {
    let content = ctx.repo.file_at_revision(&commit.hash, path)?;
    let mut notices = Vec::new();
    let defs = run_ctags(ctx.tool, &content, path, ctx.tag_set, &mut notices)?;
    let mut changes = Vec::new();
    for def in &defs {
        let sloc = added_lines.iter().filter(|l| def.contains(**l)).count() as u32;
        if sloc == 0 {
            continue;
        }
        changes.push(EntityChange {
            window_index,
            file: path.to_string(),
            entity_name: def.name.clone(),
            entity_kind: def.kind.clone(),
            dev_name: commit.author_name.clone(),
            dev_email: commit.author_email.clone(),
            commit: commit.hash.clone(),
            sloc,
            ts: commit.ts(ctx.basis),
            dev_id: None,
        });
    }
    let discovered = if changes.is_empty() {
        Vec::new()
    } else {
        blame_prior_lines(
            ctx,
            window_index,
            commit,
            old_path.unwrap_or(path),
            path,
            &changes,
            &mut notices,
        )?
    };
    out.changes.extend(changes);
    out.blame_discovered.extend(discovered);
    out.notices.extend(notices);
    Ok(())
}

/// Blames the pre-change revision and reports origin commits of the touched
/// entities' surviving lines that the commit table does not contain.
fn blame_prior_lines(
    ctx: &EntityContext<'_>,
    window_index: usize,
    commit: &CommitRecord,
    old_path: &str,
    path: &str,
    changes: &[EntityChange],
    notices: &mut Vec<Notice>,
) -> Result<Vec<BlameDiscovered>, EntityError> {
    let Some(parent) = commit.first_parent() else {
        return Ok(Vec::new());
    };
    if !ctx.repo.path_exists(parent, old_path)? {
        return Ok(Vec::new());
    }
    let old_content = ctx.repo.file_at_revision(parent, old_path)?;
    let old_defs = run_ctags(ctx.tool, &old_content, old_path, ctx.tag_set, notices)?;
    let touched: Vec<&EntityDef> = old_defs
        .iter()
        .filter(|d| changes.iter().any(|c| c.entity_name == d.name))
        .collect();
    if touched.is_empty() {
        return Ok(Vec::new());
    }
    let blame = ctx.repo.blame_file(parent, old_path, ctx.follow_renames)?;
    let mut found: BTreeMap<(String, String), (String, String, u32)> = BTreeMap::new();
    for line in &blame {
        if ctx.known_commits.contains(&line.origin_hash) {
            continue;
        }
        if let Some(def) = touched.iter().find(|d| d.contains(line.line_no)) {
            let entry = found
                .entry((def.name.clone(), line.origin_hash.clone()))
                .or_insert_with(|| {
                    (
                        line.origin_author_name.clone(),
                        line.origin_author_email.clone(),
                        0,
                    )
                });
            entry.2 += 1;
        }
    }
    Ok(found
        .into_iter()
        .map(
            |((entity_name, origin_hash), (name, email, lines))| BlameDiscovered {
                window_index,
                commit: commit.hash.clone(),
                file: path.to_string(),
                entity_name,
                origin_hash,
                origin_author_name: name,
                origin_author_email: email,
                lines,
            },
        )
        .collect())
}
