//! The run artifact: every table of one mining run as files in a directory.
//!
//! ```text
//! config.yaml            effective configuration
//! windows.json           window plan
//! commits.csv            one row per commit surviving the filters
//! file_changes.csv       one row per surviving file change
//! entity_changes.csv     one row per (commit, entity)
//! identities.json        canonical identities and the raw mapping
//! networks/window_<i>_nodes.csv
//! networks/window_<i>_edges.csv
//! blame_discovered.csv   prior lines from commits outside the commit table
//! notices.jsonl          non-fatal events
//! run_meta.json          repository and tool information
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::entities::{BlameDiscovered, EntityChange};
use crate::identities::{Column, IdentityTable, ENTITIES_TABLE};
use crate::network::{DeveloperNetwork, WeightScheme};
use crate::notice::Notice;
use crate::repo_io::{ChangeKind, CommitRecord, FileChange};
use crate::windowing::TimeWindow;

pub const CONFIG_FILE: &str = "config.yaml";
pub const WINDOWS_FILE: &str = "windows.json";
pub const COMMITS_FILE: &str = "commits.csv";
pub const FILE_CHANGES_FILE: &str = "file_changes.csv";
pub const ENTITY_CHANGES_FILE: &str = "entity_changes.csv";
pub const IDENTITIES_FILE: &str = "identities.json";
pub const NETWORKS_DIR: &str = "networks";
pub const BLAME_FILE: &str = "blame_discovered.csv";
pub const NOTICES_FILE: &str = "notices.jsonl";
pub const META_FILE: &str = "run_meta.json";

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn fmt_err(path: &Path, e: impl ToString) -> ArtifactError {
    ArtifactError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRow {
    pub commit: CommitRecord,
    pub window_index: Option<usize>,
    pub author_id: u32,
    pub committer_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMeta {
    pub repo_path: String,
    pub head: Option<String>,
    pub commits_extracted: usize,
    pub commits_after_filter: usize,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunData {
    pub config: RunConfig,
    pub meta: RunMeta,
    pub windows: Vec<TimeWindow>,
    pub commits: Vec<CommitRow>,
    pub entity_changes: Vec<EntityChange>,
    pub identities: IdentityTable,
    pub networks: Vec<DeveloperNetwork>,
    pub blame_discovered: Vec<BlameDiscovered>,
    pub notices: Vec<Notice>,
}

#[derive(Serialize, Deserialize)]
struct CommitCsv {
    hash: String,
    parents: String,
    author_name: String,
    author_email: String,
    author_ts: i64,
    committer_name: String,
    committer_email: String,
    committer_ts: i64,
    is_merge: bool,
    message_summary: String,
    window_index: Option<usize>,
    author_id: u32,
    committer_id: u32,
}

#[derive(Serialize, Deserialize)]
struct FileChangeCsv {
    commit: String,
    path: String,
    old_path: Option<String>,
    lines_added: u64,
    lines_deleted: u64,
    change_kind: ChangeKind,
}

#[derive(Serialize, Deserialize)]
struct EdgeCsv {
    window_index: usize,
    from_id: u32,
    to_id: u32,
    weight: u64,
    scheme: WeightScheme,
}

#[derive(Serialize, Deserialize)]
struct NodeCsv {
    window_index: usize,
    id: u32,
}

fn write_csv<T: Serialize>(
    path: &Path,
    rows: impl IntoIterator<Item = T>,
    header: &[&str],
) -> Result<(), ArtifactError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| fmt_err(path, e))?;
    // headers are written by hand so that empty tables still carry them
    w.write_record(header).map_err(|e| fmt_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| fmt_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, ArtifactError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| fmt_err(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| fmt_err(path, e)))
        .collect()
}

const COMMIT_HEADER: &[&str] = &[
    "hash",
    "parents",
    "author_name",
    "author_email",
    "author_ts",
    "committer_name",
    "committer_email",
    "committer_ts",
    "is_merge",
    "message_summary",
    "window_index",
    "author_id",
    "committer_id",
];
const FILE_CHANGE_HEADER: &[&str] = &[
    "commit",
    "path",
    "old_path",
    "lines_added",
    "lines_deleted",
    "change_kind",
];
pub const ENTITY_CHANGE_HEADER: &[&str] = &[
    "window_index",
    "file",
    "entity_name",
    "entity_kind",
    "dev_name",
    "dev_email",
    "commit",
    "sloc",
    "ts",
];
const EDGE_HEADER: &[&str] = &["window_index", "from_id", "to_id", "weight", "scheme"];
const NODE_HEADER: &[&str] = &["window_index", "id"];
const BLAME_HEADER: &[&str] = &[
    "window_index",
    "commit",
    "file",
    "entity_name",
    "origin_hash",
    "origin_author_name",
    "origin_author_email",
    "lines",
];

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ArtifactError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| fmt_err(path, e))?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ArtifactError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| fmt_err(path, e))
}

impl RunData {
    pub fn write(&self, dir: &Path) -> Result<(), ArtifactError> {
        let net_dir = dir.join(NETWORKS_DIR);
        fs::create_dir_all(&net_dir).map_err(io_err(&net_dir))?;

        let p = dir.join(CONFIG_FILE);
        fs::write(&p, self.config.snapshot()).map_err(io_err(&p))?;
        write_json(&dir.join(WINDOWS_FILE), &self.windows)?;
        write_json(&dir.join(META_FILE), &self.meta)?;
        write_json(&dir.join(IDENTITIES_FILE), &self.identities)?;

        write_csv(
            &dir.join(COMMITS_FILE),
            self.commits.iter().map(|r| CommitCsv {
                hash: r.commit.hash.clone(),
                parents: r.commit.parents.join(" "),
                author_name: r.commit.author_name.clone(),
                author_email: r.commit.author_email.clone(),
                author_ts: r.commit.author_ts,
                committer_name: r.commit.committer_name.clone(),
                committer_email: r.commit.committer_email.clone(),
                committer_ts: r.commit.committer_ts,
                is_merge: r.commit.is_merge,
                message_summary: r.commit.message_summary.clone(),
                window_index: r.window_index,
                author_id: r.author_id,
                committer_id: r.committer_id,
            }),
            COMMIT_HEADER,
        )?;
        write_csv(
            &dir.join(FILE_CHANGES_FILE),
            self.commits.iter().flat_map(|r| {
                r.commit.file_changes.iter().map(|f| FileChangeCsv {
                    commit: r.commit.hash.clone(),
                    path: f.path.clone(),
                    old_path: f.old_path.clone(),
                    lines_added: f.lines_added,
                    lines_deleted: f.lines_deleted,
                    change_kind: f.change_kind,
                })
            }),
            FILE_CHANGE_HEADER,
        )?;
        write_csv(
            &dir.join(ENTITY_CHANGES_FILE),
            &self.entity_changes,
            ENTITY_CHANGE_HEADER,
        )?;
        write_csv(&dir.join(BLAME_FILE), &self.blame_discovered, BLAME_HEADER)?;

        for net in &self.networks {
            let i = net.window_index;
            write_csv(
                &net_dir.join(format!("window_{i}_nodes.csv")),
                net.nodes.iter().map(|&id| NodeCsv {
                    window_index: i,
                    id,
                }),
                NODE_HEADER,
            )?;
            write_csv(
                &net_dir.join(format!("window_{i}_edges.csv")),
                net.edges
                    .iter()
                    .map(|(&(from_id, to_id), &weight)| EdgeCsv {
                        window_index: i,
                        from_id,
                        to_id,
                        weight,
                        scheme: net.scheme,
                    }),
                EDGE_HEADER,
            )?;
        }

        let p = dir.join(NOTICES_FILE);
        let mut f = fs::File::create(&p).map_err(io_err(&p))?;
        for n in &self.notices {
            let line = serde_json::to_string(n).map_err(|e| fmt_err(&p, e))?;
            writeln!(f, "{line}").map_err(io_err(&p))?;
        }
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<RunData, ArtifactError> {
        let config = RunConfig::load(&dir.join(CONFIG_FILE))?;
        let mut windows: Vec<TimeWindow> = read_json(&dir.join(WINDOWS_FILE))?;
        for w in &mut windows {
            w.include_end = config.include_window_end;
        }
        let meta: RunMeta = read_json(&dir.join(META_FILE))?;
        let identities: IdentityTable = read_json(&dir.join(IDENTITIES_FILE))?;

        let mut changes_by_commit: BTreeMap<String, Vec<FileChange>> = BTreeMap::new();
        for fc in read_csv::<FileChangeCsv>(&dir.join(FILE_CHANGES_FILE))? {
            changes_by_commit
                .entry(fc.commit)
                .or_default()
                .push(FileChange {
                    path: fc.path,
                    old_path: fc.old_path,
                    lines_added: fc.lines_added,
                    lines_deleted: fc.lines_deleted,
                    change_kind: fc.change_kind,
                });
        }
        let commits = read_csv::<CommitCsv>(&dir.join(COMMITS_FILE))?
            .into_iter()
            .map(|c| CommitRow {
                commit: CommitRecord {
                    file_changes: changes_by_commit.remove(&c.hash).unwrap_or_default(),
                    hash: c.hash,
                    parents: c.parents.split_whitespace().map(str::to_string).collect(),
                    author_name: c.author_name,
                    author_email: c.author_email,
                    author_ts: c.author_ts,
                    committer_name: c.committer_name,
                    committer_email: c.committer_email,
                    committer_ts: c.committer_ts,
                    is_merge: c.is_merge,
                    message_summary: c.message_summary,
                },
                window_index: c.window_index,
                author_id: c.author_id,
                committer_id: c.committer_id,
            })
            .collect();

        let p = dir.join(ENTITY_CHANGES_FILE);
        let mut entity_changes: Vec<EntityChange> = read_csv(&p)?;
        for ch in &mut entity_changes {
            let id = identities
                .lookup(&ch.dev_name, &ch.dev_email, Column::Author, ENTITIES_TABLE)
                .map_err(|e| fmt_err(&p, e))?;
            ch.dev_id = Some(id);
        }
        let blame_discovered = read_csv(&dir.join(BLAME_FILE))?;

        let mut networks = Vec::with_capacity(windows.len());
        for w in &windows {
            let i = w.index;
            let mut net =
                DeveloperNetwork::empty(i, config.weight_scheme, config.include_self_loops);
            let nodes = dir.join(NETWORKS_DIR).join(format!("window_{i}_nodes.csv"));
            if nodes.exists() {
                net.nodes = read_csv::<NodeCsv>(&nodes)?
                    .into_iter()
                    .map(|n| n.id)
                    .collect();
            }
            let edges = dir.join(NETWORKS_DIR).join(format!("window_{i}_edges.csv"));
            if edges.exists() {
                for e in read_csv::<EdgeCsv>(&edges)? {
                    net.edges.insert((e.from_id, e.to_id), e.weight);
                }
            }
            networks.push(net);
        }

        let p = dir.join(NOTICES_FILE);
        let mut notices = Vec::new();
        let f = fs::File::open(&p).map_err(io_err(&p))?;
        for line in BufReader::new(f).lines() {
            let line = line.map_err(io_err(&p))?;
            if !line.trim().is_empty() {
                notices.push(serde_json::from_str(&line).map_err(|e| fmt_err(&p, e))?);
            }
        }

        Ok(RunData {
            config,
            meta,
            windows,
            commits,
            entity_changes,
            identities,
            networks,
            blame_discovered,
            notices,
        })
    }
}
