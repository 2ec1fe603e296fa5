//! Read-only access to a git repository through the `git` executable.
//!
//! Every operation spawns its own process with a fixed locale and no pager, so a
//! [`RepoHandle`] can be shared freely between worker threads.

use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::windowing::TimestampBasis;

/// Environment variable overriding the git executable.
pub const GIT_BIN_ENV: &str = "MSR_GIT_BIN";

const FIELD_SEP: char = '\x1f';
const RECORD_SEP: char = '\x1e';

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("not a git repository: {}", .0.display())]
    NotARepository(PathBuf),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("`git {command}` failed: {stderr}")]
    CliInvocationFailure { command: String, stderr: String },
    #[error("unexpected git output: {0}")]
    ParseFailure(String),
    #[error("path `{path}` absent at revision {revision}")]
    PathAbsentAtRevision { revision: String, path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeKind {
    Added,
    Modified,
    Deleted,
    Renamed,
}

impl ChangeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChangeKind::Added => "added",
            ChangeKind::Modified => "modified",
            ChangeKind::Deleted => "deleted",
            ChangeKind::Renamed => "renamed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChange {
    /// Path after the change (the removed path for deletions).
    pub path: String,
    /// Source path of a rename.
    pub old_path: Option<String>,
    pub lines_added: u64,
    pub lines_deleted: u64,
    pub change_kind: ChangeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub hash: String,
    pub parents: Vec<String>,
    pub author_name: String,
    pub author_email: String,
    pub author_ts: i64,
    pub committer_name: String,
    pub committer_email: String,
    pub committer_ts: i64,
    pub is_merge: bool,
    pub message_summary: String,
    pub file_changes: Vec<FileChange>,
}

impl CommitRecord {
    pub fn ts(&self, basis: TimestampBasis) -> i64 {
        match basis {
            TimestampBasis::Author => self.author_ts,
            TimestampBasis::Committer => self.committer_ts,
        }
    }

    pub fn first_parent(&self) -> Option<&str> {
        self.parents.first().map(String::as_str)
    }

    pub fn lines_added(&self) -> u64 {
        self.file_changes.iter().map(|f| f.lines_added).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlameLine {
    pub line_no: u32,
    pub origin_hash: String,
    pub origin_author_name: String,
    pub origin_author_email: String,
    pub origin_author_ts: i64,
}

/// Added line numbers (new side) of one file in a commit's diff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiff {
    pub path: String,
    pub added_lines: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct RepoHandle {
    root: PathBuf,
    git_bin: PathBuf,
    bare: bool,
}

/// Opens the repository rooted exactly at `path` (working tree or bare).
pub fn open_repo(path: &Path) -> Result<RepoHandle, RepoError> {
    open_repo_with(path, git_bin_from_env())
}

pub fn git_bin_from_env() -> PathBuf {
    std::env::var_os(GIT_BIN_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("git"))
}

pub fn open_repo_with(path: &Path, git_bin: PathBuf) -> Result<RepoHandle, RepoError> {
    let root = match path.canonicalize() {
        Ok(r) => r,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(RepoError::NotARepository(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };
    if !root.is_dir() {
        return Err(RepoError::NotARepository(root));
    }
    let mut cmd = Command::new(&git_bin);
    cmd.arg("-C")
        .arg(&root)
        .args(["rev-parse", "--is-bare-repository", "--absolute-git-dir"]);
    // Stop discovery from escaping into an enclosing repository.
    if let Some(parent) = root.parent() {
        cmd.env("GIT_CEILING_DIRECTORIES", parent);
    }
    let out = run_raw(cmd, "rev-parse")?;
    if !out.status.success() {
        return Err(RepoError::NotARepository(root));
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    let bare = lines.next() == Some("true");
    let git_dir = PathBuf::from(lines.next().unwrap_or_default());
    let expected = if bare {
        root.clone()
    } else {
        root.join(".git")
    };
    if git_dir.canonicalize().ok() != expected.canonicalize().ok() {
        return Err(RepoError::NotARepository(root));
    }
    Ok(RepoHandle {
        root,
        git_bin,
        bare,
    })
}

fn run_raw(mut cmd: Command, label: &str) -> Result<std::process::Output, RepoError> {
    cmd.stdin(Stdio::null());
    cmd.output().map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            RepoError::CliInvocationFailure {
                command: label.to_string(),
                stderr: format!("executable not found: {e}"),
            }
        } else {
            RepoError::Io(e)
        }
    })
}

impl RepoHandle {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn is_bare(&self) -> bool {
        self.bare
    }

    fn git(&self) -> Command {
        let mut cmd = Command::new(&self.git_bin);
        cmd.arg("--no-pager")
            .arg("-C")
            .arg(&self.root)
            .args(["-c", "core.quotepath=false"])
            .args(["-c", "log.showSignature=false"])
            .args(["-c", "diff.noprefix=false"])
            .args(["-c", "color.ui=never"])
            .env("LC_ALL", "C")
            .env("LANG", "C")
            .env("TZ", "UTC")
            .env("GIT_PAGER", "cat");
        cmd
    }

    fn run<I, S>(&self, args: I) -> Result<Vec<u8>, RepoError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<OsStr>,
    {
        let args: Vec<S> = args.into_iter().collect();
        let label = args
            .iter()
            .map(|a| a.as_ref().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join(" ");
        let mut cmd = self.git();
        cmd.args(&args);
        let out = run_raw(cmd, &label)?;
        if !out.status.success() {
            return Err(RepoError::CliInvocationFailure {
                command: label,
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        Ok(out.stdout)
    }

    fn succeeds<I, S>(&self, args: I) -> Result<bool, RepoError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<OsStr>,
    {
        let mut cmd = self.git();
        cmd.args(args).stdout(Stdio::null()).stderr(Stdio::null());
        let out = run_raw(cmd, "probe")?;
        Ok(out.status.success())
    }

    /// Resolved HEAD commit, `None` for a repository without commits.
    pub fn head(&self) -> Result<Option<String>, RepoError> {
        let mut cmd = self.git();
        cmd.args(["rev-parse", "--verify", "-q", "HEAD^{commit}"]);
        let out = run_raw(cmd, "rev-parse HEAD")?;
        if !out.status.success() {
            return Ok(None);
        }
        Ok(Some(
            String::from_utf8_lossy(&out.stdout).trim().to_string(),
        ))
    }

    /// Full ancestry of HEAD, parents before children.
    pub fn extract_log(&self, include_merges: bool) -> Result<Vec<CommitRecord>, RepoError> {
        if self.head()?.is_none() {
            return Ok(Vec::new());
        }
        let mut args = vec![
            "log".to_string(),
            "-z".into(),
            "--topo-order".into(),
            "--reverse".into(),
            "-M".into(),
            "--raw".into(),
            "--numstat".into(),
            "--no-abbrev".into(),
            "--no-color".into(),
            "--no-ext-diff".into(),
            "--no-textconv".into(),
            "--format=%x1e%H%x1f%P%x1f%an%x1f%ae%x1f%at%x1f%cn%x1f%ce%x1f%ct%x1f%s".into(),
        ];
        if !include_merges {
            args.push("--no-merges".into());
        }
        args.push("HEAD".into());
        let out = self.run(&args)?;
        parse_log(&String::from_utf8_lossy(&out))
    }

    pub fn path_exists(&self, revision: &str, path: &str) -> Result<bool, RepoError> {
        self.succeeds(["cat-file", "-e", &format!("{revision}:{path}")])
    }

    pub fn file_at_revision(&self, revision: &str, path: &str) -> Result<Vec<u8>, RepoError> {
        if !self.path_exists(revision, path)? {
            return Err(RepoError::PathAbsentAtRevision {
                revision: revision.to_string(),
                path: path.to_string(),
            });
        }
        self.run(["cat-file", "blob", &format!("{revision}:{path}")])
    }

    /// Line-level origins of `path` at `revision`.
    ///
    /// git follows whole-file renames on its own; with `follow_renames` off, lines
    /// whose origin lives under another path are credited to the commit that
    /// introduced `path`.
    pub fn blame_file(
        &self,
        revision: &str,
        path: &str,
        follow_renames: bool,
    ) -> Result<Vec<BlameLine>, RepoError> {
        if !self.path_exists(revision, path)? {
            return Err(RepoError::PathAbsentAtRevision {
                revision: revision.to_string(),
                path: path.to_string(),
            });
        }
        let out = self.run(["blame", "--line-porcelain", revision, "--", path])?;
        let entries = parse_line_porcelain(&String::from_utf8_lossy(&out))?;
        if follow_renames || entries.iter().all(|(_, file)| file == path) {
            return Ok(entries.into_iter().map(|(line, _)| line).collect());
        }
        let creator = self.path_creator(revision, path)?;
        Ok(entries
            .into_iter()
            .map(|(line, file)| {
                if file == path {
                    return line;
                }
                match &creator {
                    Some(c) => BlameLine {
                        line_no: line.line_no,
                        origin_hash: c.origin_hash.clone(),
                        origin_author_name: c.origin_author_name.clone(),
                        origin_author_email: c.origin_author_email.clone(),
                        origin_author_ts: c.origin_author_ts,
                    },
                    None => line,
                }
            })
            .collect())
    }

    /// The most recent commit that added `path` when renames are not detected.
    fn path_creator(&self, revision: &str, path: &str) -> Result<Option<BlameLine>, RepoError> {
        let out = self.run([
            "log",
            "-1",
            "--no-renames",
            "--diff-filter=A",
            "--format=%H%x1f%an%x1f%ae%x1f%at",
            revision,
            "--",
            path,
        ])?;
        let text = String::from_utf8_lossy(&out);
        let line = text.trim();
        if line.is_empty() {
            return Ok(None);
        }
        let f: Vec<&str> = line.split(FIELD_SEP).collect();
        if f.len() != 4 {
            return Err(RepoError::ParseFailure(line.to_string()));
        }
        Ok(Some(BlameLine {
            line_no: 0,
            origin_hash: f[0].to_string(),
            origin_author_name: f[1].to_string(),
            origin_author_email: f[2].to_string(),
            origin_author_ts: parse_ts(f[3])?,
        }))
    }

    /// Added lines per file of `commit` against its first parent (zero-context diff).
    pub fn commit_diff(&self, commit: &CommitRecord) -> Result<Vec<FileDiff>, RepoError> {
        let mut args: Vec<String> = [
            "diff-tree",
            "-r",
            "-p",
            "-U0",
            "-M",
            "--no-color",
            "--no-ext-diff",
            "--no-textconv",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        match commit.first_parent() {
            Some(parent) => args.push(parent.to_string()),
            None => args.push("--root".to_string()),
        }
        args.push(commit.hash.clone());
        let out = self.run(&args)?;
        parse_unified_diff(&String::from_utf8_lossy(&out))
    }

    /// Total additions reported by `git show --numstat` for one commit.
    pub fn reported_additions(&self, hash: &str) -> Result<u64, RepoError> {
        let out = self.run(["show", "-M", "--numstat", "--format=", hash])?;
        let mut total = 0;
        for line in String::from_utf8_lossy(&out).lines() {
            if let Some(added) = line.split('\t').next() {
                total += added.parse::<u64>().unwrap_or(0);
            }
        }
        Ok(total)
    }
}

fn parse_ts(s: &str) -> Result<i64, RepoError> {
    s.trim()
        .parse::<i64>()
        .map_err(|_| RepoError::ParseFailure(format!("bad timestamp `{s}`")))
}

fn parse_count(s: &str) -> Result<u64, RepoError> {
    if s == "-" {
        return Ok(0);
    }
    s.parse::<u64>()
        .map_err(|_| RepoError::ParseFailure(format!("bad line count `{s}`")))
}

/// Parses the output of `git log -z --raw --numstat` with the unit-separated header format.
pub fn parse_log(text: &str) -> Result<Vec<CommitRecord>, RepoError> {
    let mut commits = Vec::new();
    for chunk in text.split(RECORD_SEP).filter(|c| !c.is_empty()) {
        let mut tokens = chunk.split('\0');
        let header = tokens.next().unwrap_or_default();
        let f: Vec<&str> = header.split(FIELD_SEP).collect();
        if f.len() != 9 {
            return Err(RepoError::ParseFailure(format!(
                "expected 9 header fields, got {}: {header:?}",
                f.len()
            )));
        }
        let parents: Vec<String> = f[1].split_whitespace().map(str::to_string).collect();
        let mut raw: Vec<(ChangeKind, Option<String>, String)> = Vec::new();
        let mut stats: Vec<(u64, u64, String)> = Vec::new();
        let rest: Vec<&str> = tokens.collect();
        let mut i = 0;
        while i < rest.len() {
            let tok = rest[i].trim_start_matches('\n');
            i += 1;
            if tok.is_empty() {
                continue;
            }
            if let Some(meta) = tok.strip_prefix(':') {
                let status = meta.split_whitespace().last().unwrap_or_default();
                let letter = status.chars().next().unwrap_or('M');
                let take = |i: &mut usize| -> Result<String, RepoError> {
                    let p = rest.get(*i).ok_or_else(|| {
                        RepoError::ParseFailure(format!("truncated raw entry {meta}"))
                    })?;
                    *i += 1;
                    Ok(p.to_string())
                };
                match letter {
                    'R' | 'C' => {
                        let old = take(&mut i)?;
                        let new = take(&mut i)?;
                        let kind = if letter == 'R' {
                            ChangeKind::Renamed
                        } else {
                            ChangeKind::Added
                        };
                        raw.push((kind, Some(old), new));
                    }
                    _ => {
                        let path = take(&mut i)?;
                        let kind = match letter {
                            'A' => ChangeKind::Added,
                            'D' => ChangeKind::Deleted,
                            _ => ChangeKind::Modified,
                        };
                        raw.push((kind, None, path));
                    }
                }
            } else {
                let parts: Vec<&str> = tok.splitn(3, '\t').collect();
                if parts.len() != 3 {
                    return Err(RepoError::ParseFailure(format!(
                        "unexpected log token {tok:?}"
                    )));
                }
                let added = parse_count(parts[0])?;
                let deleted = parse_count(parts[1])?;
                let path = if parts[2].is_empty() {
                    // rename: old and new path follow as separate tokens
                    let new = rest.get(i + 1).ok_or_else(|| {
                        RepoError::ParseFailure("truncated rename numstat".into())
                    })?;
                    i += 2;
                    new.to_string()
                } else {
                    parts[2].to_string()
                };
                stats.push((added, deleted, path));
            }
        }
        let file_changes = raw
            .into_iter()
            .map(|(kind, old, path)| {
                let (a, d) = stats
                    .iter()
                    .find(|(_, _, p)| *p == path)
                    .map(|(a, d, _)| (*a, *d))
                    .unwrap_or((0, 0));
                FileChange {
                    path,
                    old_path: old,
                    lines_added: a,
                    lines_deleted: d,
                    change_kind: kind,
                }
            })
            .collect();
        commits.push(CommitRecord {
            hash: f[0].to_string(),
            is_merge: parents.len() >= 2,
            parents,
            author_name: f[2].to_string(),
            author_email: f[3].to_string(),
            author_ts: parse_ts(f[4])?,
            committer_name: f[5].to_string(),
            committer_email: f[6].to_string(),
            committer_ts: parse_ts(f[7])?,
            message_summary: f[8].to_string(),
            file_changes,
        });
    }
    Ok(commits)
}

/// Parses `git blame --line-porcelain`; each line comes with the origin filename.
pub fn parse_line_porcelain(text: &str) -> Result<Vec<(BlameLine, String)>, RepoError> {
    let mut out = Vec::new();
    let mut current: Option<(BlameLine, String)> = None;
    for line in text.split('\n') {
        if let Some(_content) = line.strip_prefix('\t') {
            let entry = current
                .take()
                .ok_or_else(|| RepoError::ParseFailure("content line before header".into()))?;
            out.push(entry);
            continue;
        }
        match &mut current {
            None => {
                if line.is_empty() {
                    continue;
                }
                let mut parts = line.split(' ');
                let hash = parts.next().unwrap_or_default();
                let _orig = parts.next();
                let final_line = parts.next();
                if hash.len() != 40 || !hash.bytes().all(|b| b.is_ascii_hexdigit()) {
                    return Err(RepoError::ParseFailure(format!(
                        "bad blame header {line:?}"
                    )));
                }
                let line_no = final_line
                    .and_then(|s| s.parse::<u32>().ok())
                    .ok_or_else(|| RepoError::ParseFailure(format!("bad blame header {line:?}")))?;
                current = Some((
                    BlameLine {
                        line_no,
                        origin_hash: hash.to_string(),
                        origin_author_name: String::new(),
                        origin_author_email: String::new(),
                        origin_author_ts: 0,
                    },
                    String::new(),
                ));
            }
            Some((entry, file)) => {
                if let Some(v) = line.strip_prefix("author-mail ") {
                    entry.origin_author_email = v
                        .strip_prefix('<')
                        .and_then(|v| v.strip_suffix('>'))
                        .unwrap_or(v)
                        .to_string();
                } else if let Some(v) = line.strip_prefix("author-time ") {
                    entry.origin_author_ts = parse_ts(v)?;
                } else if let Some(v) = line.strip_prefix("author ") {
                    entry.origin_author_name = v.to_string();
                } else if let Some(v) = line.strip_prefix("filename ") {
                    *file = unquote_path(v);
                }
            }
        }
    }
    Ok(out)
}

/// Collects added new-side line numbers per file from a `-U0` unified diff.
pub fn parse_unified_diff(text: &str) -> Result<Vec<FileDiff>, RepoError> {
    let mut files: Vec<FileDiff> = Vec::new();
    let mut current: Option<FileDiff> = None;
    let mut new_line: u32 = 0;
    for line in text.split('\n') {
        if line.starts_with("diff --git ") {
            if let Some(fd) = current.take() {
                files.push(fd);
            }
            continue;
        }
        if let Some(target) = line.strip_prefix("+++ ") {
            let target = unquote_path(target);
            current = target.strip_prefix("b/").map(|p| FileDiff {
                path: p.to_string(),
                added_lines: Vec::new(),
            });
            continue;
        }
        if line.starts_with("--- ") {
            continue;
        }
        if let Some(hunk) = line.strip_prefix("@@ ") {
            let plus = hunk
                .split_whitespace()
                .find(|t| t.starts_with('+'))
                .ok_or_else(|| RepoError::ParseFailure(format!("bad hunk header {line:?}")))?;
            let start = plus[1..].split(',').next().unwrap_or_default();
            new_line = start
                .parse()
                .map_err(|_| RepoError::ParseFailure(format!("bad hunk header {line:?}")))?;
            continue;
        }
        if let Some(fd) = current.as_mut() {
            if line.starts_with('+') {
                fd.added_lines.push(new_line);
                new_line += 1;
            } else if line.starts_with(' ') {
                new_line += 1;
            }
        }
    }
    if let Some(fd) = current.take() {
        files.push(fd);
    }
    Ok(files)
}

/// Undoes git's C-style quoting of unusual path names.
fn unquote_path(s: &str) -> String {
    let Some(inner) = s.strip_prefix('"').and_then(|s| s.strip_suffix('"')) else {
        return s.to_string();
    };
    let mut bytes = Vec::with_capacity(inner.len());
    let mut it = inner.bytes().peekable();
    while let Some(b) = it.next() {
        if b != b'\\' {
            bytes.push(b);
            continue;
        }
        match it.next() {
            Some(b'n') => bytes.push(b'\n'),
            Some(b't') => bytes.push(b'\t'),
            Some(b'r') => bytes.push(b'\r'),
            Some(b'a') => bytes.push(7),
            Some(b'b') => bytes.push(8),
            Some(b'f') => bytes.push(12),
            Some(b'v') => bytes.push(11),
            Some(d @ b'0'..=b'7') => {
                let mut v = (d - b'0') as u32;
                for _ in 0..2 {
                    if let Some(&n @ b'0'..=b'7') = it.peek() {
                        v = v * 8 + (n - b'0') as u32;
                        it.next();
                    }
                }
                bytes.push(v as u8);
            }
            Some(other) => bytes.push(other),
            None => bytes.push(b'\\'),
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}
