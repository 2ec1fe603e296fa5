//! File-suffix and path filters over commit file changes.

use globset::{GlobBuilder, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repo_io::CommitRecord;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("malformed glob `{glob}`: {message}")]
    MalformedGlob { glob: String, message: String },
    #[error("suffix `{0}` must start with '.' and be lowercase")]
    InvalidSuffix(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterProfile {
    pub name: String,
    /// Empty means every path is allowed.
    #[serde(default)]
    pub suffix_allowlist: Vec<String>,
    #[serde(default)]
    pub path_exclude_globs: Vec<String>,
}

impl FilterProfile {
    pub fn allow_all(name: &str) -> Self {
        FilterProfile {
            name: name.to_string(),
            suffix_allowlist: Vec::new(),
            path_exclude_globs: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        for s in &self.suffix_allowlist {
            if !s.starts_with('.') || s.len() < 2 || s.to_lowercase() != *s {
                return Err(FilterError::InvalidSuffix(s.clone()));
            }
        }
        self.compile().map(|_| ())
    }

    pub fn compile(&self) -> Result<CompiledFilter, FilterError> {
        let mut builder = GlobSetBuilder::new();
        for g in &self.path_exclude_globs {
            let glob = GlobBuilder::new(g)
                .literal_separator(true)
                .build()
                .map_err(|e| FilterError::MalformedGlob {
                    glob: g.clone(),
                    message: e.kind().to_string(),
                })?;
            builder.add(glob);
        }
        let excludes = builder.build().map_err(|e| FilterError::MalformedGlob {
            glob: self.path_exclude_globs.join(","),
            message: e.to_string(),
        })?;
        Ok(CompiledFilter {
            suffixes: self.suffix_allowlist.clone(),
            excludes,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CompiledFilter {
    suffixes: Vec<String>,
    excludes: GlobSet,
}

impl CompiledFilter {
    pub fn keeps(&self, path: &str) -> bool {
        match_suffix(path, &self.suffixes) && !self.excludes.is_match(path)
    }

    pub fn rejected_by_suffix(&self, path: &str) -> bool {
        !match_suffix(path, &self.suffixes)
    }
}

/// Final extension of a path's file name, lowercased and with its leading dot.
pub fn path_suffix(path: &str) -> Option<String> {
    let name = path.rsplit('/').next().unwrap_or(path);
    std::path::Path::new(name)
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy().to_lowercase()))
}

pub fn match_suffix(path: &str, allowlist: &[String]) -> bool {
    if allowlist.is_empty() {
        return true;
    }
    match path_suffix(path) {
        Some(s) => allowlist.contains(&s),
        None => false,
    }
}

/// Result of filtering, with every removed `(commit, path)` pair.
#[derive(Debug, Clone, Default)]
pub struct FilterOutcome {
    pub records: Vec<CommitRecord>,
    pub dropped: Vec<(String, String)>,
}

/// Keeps surviving file changes per commit; a commit that loses all of its file
/// changes is dropped. Commits that never listed any change (plain merges) pass.
pub fn filter_commits(
    records: &[CommitRecord],
    profile: &FilterProfile,
) -> Result<FilterOutcome, FilterError> {
    let filter = profile.compile()?;
    let mut out = FilterOutcome::default();
    for rec in records {
        if rec.file_changes.is_empty() {
            out.records.push(rec.clone());
            continue;
        }
        let mut kept = rec.clone();
        kept.file_changes.clear();
        for fc in &rec.file_changes {
            if filter.keeps(&fc.path) {
                kept.file_changes.push(fc.clone());
            } else {
                out.dropped.push((rec.hash.clone(), fc.path.clone()));
            }
        }
        if !kept.file_changes.is_empty() {
            out.records.push(kept);
        }
    }
    Ok(out)
}

pub fn apply_filters(
    records: &[CommitRecord],
    profile: &FilterProfile,
) -> Result<Vec<CommitRecord>, FilterError> {
    filter_commits(records, profile).map(|o| o.records)
}
