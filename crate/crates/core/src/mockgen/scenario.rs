//! Scenario files: scripted commit histories with known contents.
//!
//! ```yaml
//! name: two-devs-one-function
//! commits:
//!   - author: {name: Ana, email: ana@example.org}
//!     committer: {name: Ana, email: ana@example.org}   # defaults to author
//!     author_ts: 1577872800
//!     committer_ts: 1577872800                         # defaults to author_ts
//!     message: add f                                   # defaults to "commit <n>"
//!     branch: main                                     # defaults to main
//!     merge_from: feature                              # makes this a merge commit
//!     files:
//!       - path: src/f.c
//!         content: |                                   # null deletes the file
//!           int f(void)
//!           {
//!           }
//!         entities:                                    # definitions after this commit
//!           - {name: f, kind: function, start_line: 1, end_line: 3}
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MockError;

pub const DEFAULT_BRANCH: &str = "main";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Person {
    pub name: String,
    pub email: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredEntity {
    pub name: String,
    pub kind: String,
    pub start_line: u32,
    pub end_line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub path: String,
    /// Full new content; `None` deletes the file.
    pub content: Option<String>,
    #[serde(default)]
    pub entities: Vec<DeclaredEntity>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommitSpec {
    pub author: Person,
    #[serde(default)]
    pub committer: Option<Person>,
    pub author_ts: i64,
    #[serde(default)]
    pub committer_ts: Option<i64>,
    #[serde(default)]
    pub message: Option<String>,
    #[serde(default)]
    pub branch: Option<String>,
    #[serde(default)]
    pub merge_from: Option<String>,
    #[serde(default)]
    pub files: Vec<FileSpec>,
}

impl CommitSpec {
    pub fn committer(&self) -> &Person {
        self.committer.as_ref().unwrap_or(&self.author)
    }

    pub fn committer_ts(&self) -> i64 {
        self.committer_ts.unwrap_or(self.author_ts)
    }

    pub fn branch(&self) -> &str {
        self.branch.as_deref().unwrap_or(DEFAULT_BRANCH)
    }

    pub fn message(&self, index: usize) -> String {
        self.message
            .clone()
            .unwrap_or_else(|| format!("commit {}", index + 1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub commits: Vec<CommitSpec>,
}

fn invalid(msg: impl Into<String>) -> MockError {
    MockError::InvalidSpec(msg.into())
}

impl ScenarioSpec {
    /// Parses YAML (a superset of JSON).
    pub fn parse(text: &str) -> Result<ScenarioSpec, MockError> {
        let spec: ScenarioSpec = serde_yaml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<ScenarioSpec, MockError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MockError::Io(format!("{}: {e}", path.display())))?;
        ScenarioSpec::parse(&text)
    }

    pub fn validate(&self) -> Result<(), MockError> {
        if self.name.trim().is_empty() {
            return Err(invalid("scenario name is empty"));
        }
        let mut branches: BTreeSet<&str> = BTreeSet::new();
        let (mut last_a, mut last_c) = (i64::MIN, i64::MIN);
        for (i, c) in self.commits.iter().enumerate() {
            let n = i + 1;
            if c.author_ts < last_a || c.committer_ts() < last_c {
                return Err(invalid(format!("commit {n}: timestamps decrease")));
            }
            if c.committer_ts() < 0 {
                return Err(invalid(format!(
                    "commit {n}: committer timestamp before 1970"
                )));
            }
            (last_a, last_c) = (c.author_ts, c.committer_ts());
            for p in [&c.author, c.committer()] {
                if p.name.trim().is_empty() || p.email.trim().is_empty() {
                    // git refuses empty identities
                    return Err(invalid(format!("commit {n}: empty name or email")));
                }
                if p.name.contains(['<', '>', '\n']) || p.email.contains(['<', '>', '\n']) {
                    return Err(invalid(format!(
                        "commit {n}: identity contains <, > or a newline"
                    )));
                }
            }
            let branch = c.branch();
            if i == 0 && branch != DEFAULT_BRANCH {
                return Err(invalid(format!(
                    "the first commit must be on {DEFAULT_BRANCH}"
                )));
            }
            if let Some(from) = &c.merge_from {
                if !branches.contains(from.as_str()) || from == branch {
                    return Err(invalid(format!(
                        "commit {n}: cannot merge unknown branch `{from}`"
                    )));
                }
                if !c.files.is_empty() {
                    return Err(invalid(format!(
                        "commit {n}: merge commits cannot change files"
                    )));
                }
            }
            let mut seen = BTreeSet::new();
            for f in &c.files {
                if f.path.is_empty()
                    || f.path.starts_with('/')
                    || f.path.ends_with('/')
                    || f.path.contains("//")
                {
                    return Err(invalid(format!("commit {n}: bad path `{}`", f.path)));
                }
                if f.path
                    .split('/')
                    .any(|seg| seg == "." || seg == ".." || seg == ".git")
                {
                    return Err(invalid(format!("commit {n}: bad path `{}`", f.path)));
                }
                if !seen.insert(&f.path) {
                    return Err(invalid(format!("commit {n}: `{}` listed twice", f.path)));
                }
                let lines = f.content.as_deref().map_or(0, |t| t.lines().count() as u32);
                if f.content.is_none() && !f.entities.is_empty() {
                    return Err(invalid(format!(
                        "commit {n}: deleted `{}` declares entities",
                        f.path
                    )));
                }
                for e in &f.entities {
                    if e.start_line == 0 || e.start_line > e.end_line || e.end_line > lines {
                        return Err(invalid(format!(
                            "commit {n}: entity `{}` span {}-{} outside `{}`",
                            e.name, e.start_line, e.end_line, f.path
                        )));
                    }
                }
            }
            branches.insert(branch);
        }
        Ok(())
    }
}
