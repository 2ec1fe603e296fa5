//! Expected mining results of a scenario, by brute force.
//!
//! Everything here is recomputed from the scenario text: file trees are
//! replayed in memory, diffs come from a longest-common-subsequence table,
//! months are added on the proleptic Gregorian calendar, and edge weights are
//! the literal double loops over each entity's contribution sequence. Nothing
//! calls into the pipeline modules; only their configuration types are read.
//!
//! Commit order ties are broken by scenario position where the pipeline uses
//! extraction order or commit hashes, so scenarios should give every commit a
//! distinct timestamp on each basis.

use std::collections::{BTreeMap, BTreeSet};

use glob::{MatchOptions, Pattern};
use serde::{Deserialize, Serialize};

use super::scenario::{CommitSpec, ScenarioSpec, DEFAULT_BRANCH};
use super::MockError;
use crate::config::RunConfig;
use crate::entities::TagSet;
use crate::identities::MatchScope;
use crate::windowing::TimestampBasis;

pub const MAX_ORACLE_COMMITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleWindow {
    pub index: usize,
    pub start_ts: i64,
    pub end_ts: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCommit {
    /// Position in the scenario.
    pub index: usize,
    pub window_index: Option<usize>,
    pub author_id: u32,
    pub committer_id: u32,
    pub is_merge: bool,
    /// Surviving changed paths, sorted.
    pub files: Vec<String>,
    pub lines_added: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleChange {
    pub window_index: usize,
    pub commit_index: usize,
    pub file: String,
    pub entity_name: String,
    pub entity_kind: String,
    pub dev_name: String,
    pub dev_email: String,
    pub dev_id: u32,
    pub sloc: u32,
    pub ts: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleIdentity {
    pub id: u32,
    pub names: BTreeSet<String>,
    pub emails: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleEdge {
    pub from: u32,
    pub to: u32,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleNetwork {
    pub window_index: usize,
    pub nodes: Vec<u32>,
    pub nested_pairwise: Vec<OracleEdge>,
    pub flat_sum: Vec<OracleEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowCounts {
    pub commits: u64,
    pub files: u64,
    pub entities: u64,
    pub developers: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBundle {
    pub scenario: String,
    pub profile: String,
    pub windows: Vec<OracleWindow>,
    /// Commits surviving the filters, in scenario order.
    pub commits: Vec<OracleCommit>,
    pub counts: Vec<WindowCounts>,
    pub identities: Vec<OracleIdentity>,
    pub entity_changes: Vec<OracleChange>,
    pub networks: Vec<OracleNetwork>,
    /// `(path, stage)` of every unsupported-language notice.
    pub unsupported: BTreeSet<(String, String)>,
}

type Tree = BTreeMap<String, String>;

/// Trees after every commit and the first parent of each commit.
struct Replay {
    trees: Vec<Tree>,
    first_parent: Vec<Option<usize>>,
    /// Commits reachable from the final `main` tip.
    on_main: BTreeSet<usize>,
}

fn replay(spec: &ScenarioSpec) -> Result<Replay, MockError> {
    let n = spec.commits.len();
    let mut trees: Vec<Tree> = Vec::with_capacity(n);
    let mut first_parent = Vec::with_capacity(n);
    let mut ancestors: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    let mut tips: BTreeMap<String, usize> = BTreeMap::new();
    let mut checked_out = DEFAULT_BRANCH.to_string();
    for (i, c) in spec.commits.iter().enumerate() {
        let branch = c.branch().to_string();
        // a new branch starts at whatever was checked out before
        let parent = tips
            .get(&branch)
            .copied()
            .or_else(|| tips.get(&checked_out).copied());
        let mut tree = parent.map(|p| trees[p].clone()).unwrap_or_default();
        let mut anc: BTreeSet<usize> = parent.map(|p| ancestors[p].clone()).unwrap_or_default();
        if let Some(from) = &c.merge_from {
            let other = tips[from.as_str()];
            let ours_anc = anc.clone();
            let theirs_anc = &ancestors[other];
            let base = ours_anc.intersection(theirs_anc).max().copied();
            let base_tree = base.map(|b| trees[b].clone()).unwrap_or_default();
            let theirs = &trees[other];
            let paths: BTreeSet<&String> = tree
                .keys()
                .chain(theirs.keys())
                .chain(base_tree.keys())
                .collect();
            let mut merged = Tree::new();
            for p in paths {
                let (o, t, b) = (tree.get(p), theirs.get(p), base_tree.get(p));
                let pick = if o == t || t == b {
                    o
                } else if o == b {
                    t
                } else {
                    return Err(MockError::UnsupportedConfig(format!(
                        "merge in commit {} changes `{p}` on both sides",
                        i + 1
                    )));
                };
                if let Some(v) = pick {
                    merged.insert(p.clone(), v.clone());
                }
            }
            tree = merged;
            anc.extend(theirs_anc.iter().copied());
        }
        for f in &c.files {
            match &f.content {
                Some(text) => {
                    tree.insert(f.path.clone(), text.clone());
                }
                None => {
                    tree.remove(&f.path);
                }
            }
        }
        anc.insert(i);
        trees.push(tree);
        first_parent.push(parent);
        ancestors.push(anc);
        tips.insert(branch.clone(), i);
        checked_out = branch;
    }
    let on_main = tips
        .get(DEFAULT_BRANCH)
        .map(|t| ancestors[*t].clone())
        .unwrap_or_default();
    Ok(Replay {
        trees,
        first_parent,
        on_main,
    })
}

/// Lines with their terminators, so a missing final newline counts as a change.
fn split_lines(text: &str) -> Vec<&str> {
    text.split_inclusive('\n').collect()
}

/// 1-based numbers of the lines of `new` outside a longest common subsequence with `old`.
fn added_lines(old: &str, new: &str) -> Vec<u32> {
    let a = split_lines(old);
    let b = split_lines(new);
    let (n, m) = (a.len(), b.len());
    let mut lcs = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if a[i] == b[j] {
                lcs[i + 1][j + 1] + 1
            } else {
                lcs[i + 1][j].max(lcs[i][j + 1])
            };
        }
    }
    let mut common = vec![false; m];
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            common[j] = true;
            i += 1;
            j += 1;
        } else if lcs[i + 1][j] >= lcs[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    (0..m)
        .filter(|&k| !common[k])
        .map(|k| k as u32 + 1)
        .collect()
}

struct Change {
    path: String,
    deleted: bool,
    added: Vec<u32>,
}

fn tree_changes(old: &Tree, new: &Tree) -> Vec<Change> {
    let paths: BTreeSet<&String> = old.keys().chain(new.keys()).collect();
    let mut out = Vec::new();
    for p in paths {
        match (old.get(p), new.get(p)) {
            (Some(a), Some(b)) if a == b => {}
            (a, Some(b)) => out.push(Change {
                path: p.clone(),
                deleted: false,
                added: added_lines(a.map_or("", |s| s.as_str()), b),
            }),
            (Some(_), None) => out.push(Change {
                path: p.clone(),
                deleted: true,
                added: Vec::new(),
            }),
            (None, None) => {}
        }
    }
    out
}

/// Lowercased extension of the file name, with its dot; hidden files without
/// a second dot have none.
fn extension(path: &str) -> Option<String> {
    let name = match path.rfind('/') {
        Some(i) => &path[i + 1..],
        None => path,
    };
    let dot = name.rfind('.')?;
    if dot == 0 {
        return None;
    }
    Some(name[dot..].to_lowercase())
}

fn suffix_allowed(path: &str, allow: &[String]) -> bool {
    if allow.is_empty() {
        return true;
    }
    match extension(path) {
        Some(e) => allow.contains(&e),
        None => false,
    }
}

fn glob_excluded(path: &str, globs: &[Pattern]) -> bool {
    let opts = MatchOptions {
        case_sensitive: true,
        require_literal_separator: true,
        require_literal_leading_dot: false,
    };
    globs.iter().any(|g| g.matches_with(path, opts))
}

/// Languages implied by common suffixes, for notices about filtered files.
fn conventional_language(path: &str) -> Option<&'static str> {
    let table: &[(&[&str], &str)] = &[
        (&[".c", ".h"], "C"),
        (&[".cc", ".cpp", ".cxx", ".hpp", ".hh", ".hxx"], "C++"),
        (&[".java"], "Java"),
        (&[".js", ".mjs", ".cjs"], "JavaScript"),
        (&[".ts"], "TypeScript"),
        (&[".py"], "Python"),
        (&[".r"], "R"),
        (&[".scala"], "Scala"),
        (&[".go"], "Go"),
        (&[".rs"], "Rust"),
        (&[".rb"], "Ruby"),
        (&[".kt"], "Kotlin"),
        (&[".cs"], "C#"),
        (&[".php"], "PHP"),
        (&[".sh"], "Sh"),
        (&[".sql"], "SQL"),
    ];
    let e = extension(path)?;
    table
        .iter()
        .find(|(exts, _)| exts.contains(&e.as_str()))
        .map(|(_, l)| *l)
}

/// Language the bundled tag tool parses a file as.
fn tool_language(path: &str) -> Option<&'static str> {
    let name = path.rsplit('/').next().unwrap_or(path);
    let ext = &name[name.rfind('.')? + 1..];
    let table: &[(&[&str], &str)] = &[
        (&["c", "h"], "C"),
        (
            &[
                "cc", "cpp", "cxx", "c++", "hh", "hpp", "hxx", "h++", "C", "H",
            ],
            "C++",
        ),
        (&["java"], "Java"),
        (&["js", "jsx", "mjs", "cjs"], "JavaScript"),
        (&["py", "pyw", "pyi"], "Python"),
        (&["r", "R", "s", "q"], "R"),
        (&["scala", "sc"], "Scala"),
    ];
    table
        .iter()
        .find(|(exts, _)| exts.contains(&ext))
        .map(|(_, l)| *l)
}

fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(z: i64) -> (i64, i64, i64) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + if m <= 2 { 1 } else { 0 };
    (y, m, d)
}

fn month_len(y: i64, m: i64) -> i64 {
    let leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    [
        31,
        if leap { 29 } else { 28 },
        31,
        30,
        31,
        30,
        31,
        31,
        30,
        31,
        30,
        31,
    ][(m - 1) as usize]
}

/// Same wall-clock time `months` later, the day clamped to the month's length.
fn plus_months(ts: i64, months: u32) -> i64 {
    let days = ts.div_euclid(86_400);
    let secs = ts.rem_euclid(86_400);
    let (y, m, d) = civil_from_days(days);
    let total = y * 12 + (m - 1) + months as i64;
    let (ny, nm) = (total.div_euclid(12), total.rem_euclid(12) + 1);
    let nd = d.min(month_len(ny, nm));
    days_from_civil(ny, nm, nd) * 86_400 + secs
}

fn in_window(ts: i64, start: i64, end: i64, include_end: bool) -> bool {
    start <= ts && (ts < end || (include_end && ts == end))
}

fn plan(times: &[i64], config: &RunConfig) -> Vec<(i64, i64)> {
    if let Some(b) = &config.explicit_boundaries {
        return (0..b.len() - 1).map(|i| (b[i], b[i + 1])).collect();
    }
    if times.is_empty() {
        return Vec::new();
    }
    let incl = config.include_window_end;
    let months = config.window_months;
    let mut start = *times.iter().min().unwrap();
    let mut out = Vec::new();
    loop {
        let end = plus_months(start, months);
        out.push((start, end));
        let remaining: Vec<i64> = times
            .iter()
            .copied()
            .filter(|&t| !out.iter().any(|&(s, e)| in_window(t, s, e, incl)))
            .collect();
        if remaining.is_empty() {
            return out;
        }
        let candidate_end = plus_months(end, months);
        let candidate_used = remaining
            .iter()
            .any(|&t| in_window(t, end, candidate_end, incl));
        start = if candidate_used {
            end
        } else {
            *remaining.iter().min().unwrap()
        };
    }
}

fn normalized(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn normalized_email(s: &str) -> String {
    let t = s.trim();
    let t = if t.starts_with('<') && t.ends_with('>') && t.len() >= 2 {
        &t[1..t.len() - 1]
    } else {
        t
    };
    normalized(t)
}

struct Raw {
    name: String,
    email: String,
    /// `(table, column)`.
    partition: (&'static str, &'static str),
}

/// The matching cascade over an ordered raw stream, by linear search.
fn cascade(raws: &[Raw], scope: MatchScope) -> (Vec<OracleIdentity>, Vec<u32>) {
    let mut partitions: Vec<(&str, &str)> = Vec::new();
    for r in raws {
        let key = match scope {
            MatchScope::WithinColumn => r.partition,
            MatchScope::CrossColumnAndTable => ("all", "all"),
        };
        if !partitions.contains(&key) {
            partitions.push(key);
        }
    }
    let mut idents: Vec<OracleIdentity> = Vec::new();
    let mut assigned = vec![0u32; raws.len()];
    for part in partitions {
        let mut seen_pairs: Vec<(String, String, u32)> = Vec::new();
        let mut email_owner: Vec<(String, u32)> = Vec::new();
        let mut name_owner: Vec<(String, u32)> = Vec::new();
        for (k, r) in raws.iter().enumerate() {
            let key = match scope {
                MatchScope::WithinColumn => r.partition,
                MatchScope::CrossColumnAndTable => ("all", "all"),
            };
            if key != part {
                continue;
            }
            let name = normalized(&r.name);
            let email = normalized_email(&r.email);
            let mut id = None;
            for (n, e, i) in &seen_pairs {
                if *n == name && *e == email {
                    id = Some(*i);
                }
            }
            if id.is_none() && !email.is_empty() {
                for (e, i) in &email_owner {
                    if *e == email {
                        id = Some(*i);
                    }
                }
            }
            if id.is_none() && !name.is_empty() {
                for (n, i) in &name_owner {
                    if *n == name {
                        id = Some(*i);
                    }
                }
            }
            let id = match id {
                Some(i) => i,
                None => {
                    idents.push(OracleIdentity {
                        id: idents.len() as u32,
                        names: BTreeSet::new(),
                        emails: BTreeSet::new(),
                    });
                    idents.len() as u32 - 1
                }
            };
            if !seen_pairs.iter().any(|(n, e, _)| *n == name && *e == email) {
                seen_pairs.push((name.clone(), email.clone(), id));
            }
            if !email.is_empty() && !email_owner.iter().any(|(e, _)| *e == email) {
                email_owner.push((email.clone(), id));
                idents[id as usize].emails.insert(email);
            }
            if !name.is_empty() && !name_owner.iter().any(|(n, _)| *n == name) {
                name_owner.push((name.clone(), id));
                idents[id as usize].names.insert(name);
            }
            assigned[k] = id;
        }
    }
    (idents, assigned)
}

fn basis_ts(c: &CommitSpec, basis: TimestampBasis) -> i64 {
    match basis {
        TimestampBasis::Author => c.author_ts,
        TimestampBasis::Committer => c.committer_ts(),
    }
}

fn admitted(tag_set: &TagSet, language: &str, kind: &str) -> bool {
    match tag_set {
        TagSet::DefaultAllLanguages => true,
        TagSet::Explicit(map) => map
            .get(language)
            .is_some_and(|kinds| kinds.iter().any(|k| k == kind)),
    }
}

fn knows_language(tag_set: &TagSet, language: &str) -> bool {
    match tag_set {
        TagSet::DefaultAllLanguages => true,
        TagSet::Explicit(map) => map.contains_key(language),
    }
}

pub fn expected_results(
    spec: &ScenarioSpec,
    config: &RunConfig,
) -> Result<OracleBundle, MockError> {
    if spec.commits.len() > MAX_ORACLE_COMMITS {
        return Err(MockError::SpecTooLarge(spec.commits.len()));
    }
    spec.validate()?;
    let globs: Vec<Pattern> = config
        .filter_profile
        .path_exclude_globs
        .iter()
        .map(|g| {
            Pattern::new(g).map_err(|e| MockError::UnsupportedConfig(format!("glob `{g}`: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let allow = &config.filter_profile.suffix_allowlist;
    let basis = config.timestamp_basis;
    let r = replay(spec)?;
    let empty = Tree::new();

    // extraction and filtering
    struct Kept {
        index: usize,
        is_merge: bool,
        changes: Vec<Change>,
    }
    let mut kept: Vec<Kept> = Vec::new();
    let mut unsupported: BTreeSet<(String, String)> = BTreeSet::new();
    for (i, c) in spec.commits.iter().enumerate() {
        if !r.on_main.contains(&i) {
            continue;
        }
        let is_merge = c.merge_from.is_some();
        if is_merge && !config.include_merges {
            continue;
        }
        // git reports no file changes for merge commits in this log format
        let all = if is_merge {
            Vec::new()
        } else {
            let parent = r.first_parent[i].map_or(&empty, |p| &r.trees[p]);
            tree_changes(parent, &r.trees[i])
        };
        let had_changes = !all.is_empty();
        let mut survivors = Vec::new();
        for ch in all {
            let by_suffix = suffix_allowed(&ch.path, allow);
            if by_suffix && !glob_excluded(&ch.path, &globs) {
                survivors.push(ch);
            } else if !by_suffix && conventional_language(&ch.path).is_some() {
                unsupported.insert((ch.path.clone(), "suffix_filter".into()));
            }
        }
        if had_changes && survivors.is_empty() {
            continue;
        }
        kept.push(Kept {
            index: i,
            is_merge,
            changes: survivors,
        });
    }

    let times: Vec<i64> = kept
        .iter()
        .map(|k| basis_ts(&spec.commits[k.index], basis))
        .collect();
    let bounds = plan(&times, config);
    let window_of = |ts: i64| -> Option<usize> {
        (0..bounds.len())
            .find(|&w| in_window(ts, bounds[w].0, bounds[w].1, config.include_window_end))
    };

    // entity changes, ordered by window, time, scenario position, path, line
    let mut order: Vec<usize> = (0..kept.len()).collect();
    order.sort_by_key(|&k| {
        let ts = basis_ts(&spec.commits[kept[k].index], basis);
        (window_of(ts), ts, kept[k].index)
    });
    let mut changes: Vec<OracleChange> = Vec::new();
    for &k in &order {
        let kc = &kept[k];
        let c = &spec.commits[kc.index];
        let ts = basis_ts(c, basis);
        let Some(w) = window_of(ts) else { continue };
        for ch in &kc.changes {
            if ch.deleted || ch.added.is_empty() {
                continue;
            }
            let content = &r.trees[kc.index][&ch.path];
            let declared: &[_] = c
                .files
                .iter()
                .find(|f| f.path == ch.path)
                .map_or(&[], |f| f.entities.as_slice());
            let language = tool_language(&ch.path);
            match language {
                None if !content.is_empty() => {
                    unsupported.insert((ch.path.clone(), "tag_tool".into()));
                }
                Some(lang) if !declared.is_empty() && !knows_language(&config.tag_set, lang) => {
                    unsupported.insert((ch.path.clone(), "tag_set".into()));
                }
                _ => {}
            }
            let mut defs: Vec<_> = declared.iter().collect();
            defs.sort_by_key(|d| d.start_line);
            for d in defs {
                if !language.is_some_and(|l| admitted(&config.tag_set, l, &d.kind)) {
                    continue;
                }
                let sloc = ch
                    .added
                    .iter()
                    .filter(|&&l| d.start_line <= l && l <= d.end_line)
                    .count() as u32;
                if sloc == 0 {
                    continue;
                }
                changes.push(OracleChange {
                    window_index: w,
                    commit_index: kc.index,
                    file: ch.path.clone(),
                    entity_name: d.name.clone(),
                    entity_kind: d.kind.clone(),
                    dev_name: c.author.name.clone(),
                    dev_email: c.author.email.clone(),
                    dev_id: 0,
                    sloc,
                    ts,
                });
            }
        }
    }

    // identities: commits by basis time (author, committer), then entity rows
    let mut by_time: Vec<usize> = (0..kept.len()).collect();
    by_time.sort_by_key(|&k| (times[k], kept[k].index));
    let mut raws = Vec::new();
    for &k in &by_time {
        let c = &spec.commits[kept[k].index];
        raws.push(Raw {
            name: c.author.name.clone(),
            email: c.author.email.clone(),
            partition: ("commits", "author"),
        });
        raws.push(Raw {
            name: c.committer().name.clone(),
            email: c.committer().email.clone(),
            partition: ("commits", "committer"),
        });
    }
    for ch in &changes {
        raws.push(Raw {
            name: ch.dev_name.clone(),
            email: ch.dev_email.clone(),
            partition: ("entities", "author"),
        });
    }
    let (identities, ids) = cascade(&raws, config.identity_scope);
    let mut author_id = BTreeMap::new();
    let mut committer_id = BTreeMap::new();
    for (pos, &k) in by_time.iter().enumerate() {
        author_id.insert(kept[k].index, ids[2 * pos]);
        committer_id.insert(kept[k].index, ids[2 * pos + 1]);
    }
    let offset = 2 * by_time.len();
    for (j, ch) in changes.iter_mut().enumerate() {
        ch.dev_id = ids[offset + j];
    }

    let commits: Vec<OracleCommit> = kept
        .iter()
        .enumerate()
        .map(|(k, kc)| OracleCommit {
            index: kc.index,
            window_index: window_of(times[k]),
            author_id: author_id[&kc.index],
            committer_id: committer_id[&kc.index],
            is_merge: kc.is_merge,
            files: kc.changes.iter().map(|c| c.path.clone()).collect(),
            lines_added: kc.changes.iter().map(|c| c.added.len() as u64).sum(),
        })
        .collect();

    let mut counts = Vec::new();
    let mut networks = Vec::new();
    for w in 0..bounds.len() {
        let in_w: Vec<&OracleCommit> = commits
            .iter()
            .filter(|c| c.window_index == Some(w))
            .collect();
        let files: BTreeSet<&String> = in_w.iter().flat_map(|c| c.files.iter()).collect();
        let devs: BTreeSet<u32> = in_w.iter().map(|c| c.author_id).collect();
        let wch: Vec<&OracleChange> = changes.iter().filter(|c| c.window_index == w).collect();
        let ents: BTreeSet<(&String, &String)> =
            wch.iter().map(|c| (&c.file, &c.entity_name)).collect();
        counts.push(WindowCounts {
            commits: in_w.len() as u64,
            files: files.len() as u64,
            entities: ents.len() as u64,
            developers: devs.len() as u64,
        });

        let mut nested: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        let mut flat: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for (file, entity) in &ents {
            let mut seq: Vec<&&OracleChange> = wch
                .iter()
                .filter(|c| &c.file == *file && &c.entity_name == *entity)
                .collect();
            seq.sort_by_key(|c| (c.ts, c.commit_index));
            for i in 0..seq.len() {
                let ci = seq[i];
                for cj in seq.iter().take(i) {
                    if ci.dev_id == cj.dev_id && !config.include_self_loops {
                        continue;
                    }
                    *nested.entry((ci.dev_id, cj.dev_id)).or_default() +=
                        ci.sloc as u64 + cj.sloc as u64;
                }
                let mut collaborators: Vec<u32> = Vec::new();
                for cj in seq.iter().take(i) {
                    if !collaborators.contains(&cj.dev_id) {
                        collaborators.push(cj.dev_id);
                    }
                }
                for a in collaborators {
                    if a == ci.dev_id && !config.include_self_loops {
                        continue;
                    }
                    let mut prior = 0u64;
                    for cj in seq.iter().take(i) {
                        if cj.dev_id == a {
                            prior += cj.sloc as u64;
                        }
                    }
                    *flat.entry((ci.dev_id, a)).or_default() += ci.sloc as u64 + prior;
                }
            }
        }
        let edges = |m: BTreeMap<(u32, u32), u64>| -> Vec<OracleEdge> {
            m.into_iter()
                .filter(|(_, w)| *w > 0)
                .map(|((from, to), weight)| OracleEdge { from, to, weight })
                .collect()
        };
        networks.push(OracleNetwork {
            window_index: w,
            nodes: wch
                .iter()
                .map(|c| c.dev_id)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            nested_pairwise: edges(nested),
            flat_sum: edges(flat),
        });
    }

    Ok(OracleBundle {
        scenario: spec.name.clone(),
        profile: config.profile.clone(),
        windows: bounds
            .iter()
            .enumerate()
            .map(|(index, &(start_ts, end_ts))| OracleWindow {
                index,
                start_ts,
                end_ts,
            })
            .collect(),
        commits,
        counts,
        identities,
        entity_changes: changes,
        networks,
        unsupported,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcs_added_lines() {
        assert_eq!(added_lines("", "a\nb\n"), vec![1, 2]);
        assert_eq!(added_lines("a\nc\n", "a\nb\nc\n"), vec![2]);
        assert_eq!(added_lines("a\nb\n", "a\n"), Vec::<u32>::new());
        // the old last line lacked a newline, so it changes too
        assert_eq!(added_lines("a\nb", "a\nb\nc\n"), vec![2, 3]);
    }

    #[test]
    fn calendar_months() {
        // 2020-01-31 -> 2020-02-29 (leap), 2021-01-31 -> 2021-02-28
        assert_eq!(plus_months(1_580_428_800, 1), 1_582_934_400);
        assert_eq!(plus_months(1_612_051_200, 1), 1_614_470_400);
        assert_eq!(plus_months(0, 12), 31_536_000);
        for z in [-800_000i64, -1, 0, 1, 18_000, 2_932_896] {
            let (y, m, d) = civil_from_days(z);
            assert_eq!(days_from_civil(y, m, d), z);
        }
    }

    #[test]
    fn extensions() {
        assert_eq!(extension("src/a.C"), Some(".c".into()));
        assert_eq!(extension(".bashrc"), None);
        assert_eq!(extension("dir.d/file"), None);
        assert_eq!(extension("a.tar.gz"), Some(".gz".into()));
    }

    #[test]
    fn too_large() {
        let c = CommitSpec {
            author: super::super::Person {
                name: "a".into(),
                email: "a@x".into(),
            },
            committer: None,
            author_ts: 1,
            committer_ts: None,
            message: None,
            branch: None,
            merge_from: None,
            files: vec![],
        };
        let spec = ScenarioSpec {
            name: "big".into(),
            description: None,
            commits: vec![c; 21],
        };
        let cfg = crate::config::builtin_profile("codeface-like").unwrap();
        assert!(matches!(
            expected_results(&spec, &cfg),
            Err(MockError::SpecTooLarge(21))
        ));
    }

    #[test]
    fn empty_spec_gives_empty_bundle() {
        let spec = ScenarioSpec {
            name: "empty".into(),
            description: None,
            commits: vec![],
        };
        let cfg = crate::config::builtin_profile("kaiaulu-prior").unwrap();
        let b = expected_results(&spec, &cfg).unwrap();
        assert!(b.windows.is_empty() && b.commits.is_empty() && b.identities.is_empty());
        assert!(b.entity_changes.is_empty() && b.networks.is_empty() && b.unsupported.is_empty());
    }
}
