//! Canonical developer identities from raw `(name, email)` pairs.
//!
//! Raw identities are inserted in temporal order. Each one is matched against the
//! identities seen so far: first on the exact `(name, email)` pair, then on the
//! email address, then on the full name. Only when all three fail is a new
//! identity created. Empty names and emails never take part in the fallbacks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entities::EntityChange;
use crate::repo_io::CommitRecord;

pub const COMMITS_TABLE: &str = "commits";
pub const ENTITIES_TABLE: &str = "entities";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error("no identity mapped for ({name}, {email}) in {table}.{column}")]
    UnmappedIdentity {
        name: String,
        email: String,
        column: String,
        table: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Column {
    Author,
    Committer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchScope {
    /// Match separately inside each `(table, column)` partition.
    WithinColumn,
    /// One identity space across all columns and tables.
    CrossColumnAndTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawIdentity {
    pub name: String,
    pub email: String,
    pub source_column: Column,
    pub source_table: String,
}

impl RawIdentity {
    pub fn new(name: &str, email: &str, column: Column, table: &str) -> Self {
        RawIdentity {
            name: name.to_string(),
            email: email.to_string(),
            source_column: column,
            source_table: table.to_string(),
        }
    }

    pub fn key(&self) -> RawKey {
        let (name, email) = normalize(&self.name, &self.email);
        RawKey {
            name,
            email,
            column: self.source_column,
            table: self.source_table.clone(),
        }
    }
}

/// Lowercases, collapses whitespace and strips angle brackets around the email.
pub fn normalize(name: &str, email: &str) -> (String, String) {
    let name_key = name
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase();
    let trimmed = email.trim();
    let unbracketed = trimmed
        .strip_prefix('<')
        .and_then(|e| e.strip_suffix('>'))
        .unwrap_or(trimmed);
    let email_key = unbracketed
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase();
    (name_key, email_key)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RawKey {
    pub name: String,
    pub email: String,
    pub column: Column,
    pub table: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity {
    pub id: u32,
    /// Normalized names.
    pub names: BTreeSet<String>,
    /// Normalized emails.
    pub emails: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdentityTable {
    pub identities: Vec<Identity>,
    pub mapping: BTreeMap<RawKey, u32>,
}

#[derive(Serialize, Deserialize)]
struct MappingRow {
    name: String,
    email: String,
    column: Column,
    table: String,
    id: u32,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    identities: Vec<Identity>,
    mapping: Vec<MappingRow>,
}

impl Serialize for IdentityTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TableJson {
            identities: self.identities.clone(),
            mapping: self
                .mapping
                .iter()
                .map(|(k, id)| MappingRow {
                    name: k.name.clone(),
                    email: k.email.clone(),
                    column: k.column,
                    table: k.table.clone(),
                    id: *id,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IdentityTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = TableJson::deserialize(d)?;
        Ok(IdentityTable {
            identities: t.identities,
            mapping: t
                .mapping
                .into_iter()
                .map(|r| {
                    (
                        RawKey {
                            name: r.name,
                            email: r.email,
                            column: r.column,
                            table: r.table,
                        },
                        r.id,
                    )
                })
                .collect(),
        })
    }
}

impl IdentityTable {
    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    pub fn lookup(
        &self,
        name: &str,
        email: &str,
        column: Column,
        table: &str,
    ) -> Result<u32, IdentityError> {
        let raw = RawIdentity::new(name, email, column, table);
        self.mapping
            .get(&raw.key())
            .copied()
            .ok_or_else(|| IdentityError::UnmappedIdentity {
                name: name.to_string(),
                email: email.to_string(),
                column: format!("{column:?}").to_lowercase(),
                table: table.to_string(),
            })
    }

    pub fn get(&self, id: u32) -> Option<&Identity> {
        self.identities.get(id as usize)
    }
}

/// Matching state for one identity space.
#[derive(Default)]
struct Matcher {
    exact: HashMap<(String, String), u32>,
    by_email: HashMap<String, u32>,
    by_name: HashMap<String, u32>,
}

impl Matcher {
    fn resolve(&mut self, name: &str, email: &str, identities: &mut Vec<Identity>) -> u32 {
        let pair = (name.to_string(), email.to_string());
        let id = if let Some(&id) = self.exact.get(&pair) {
            id
        } else if let Some(&id) = (!email.is_empty())
            .then(|| self.by_email.get(email))
            .flatten()
        {
            id
        } else if let Some(&id) = (!name.is_empty()).then(|| self.by_name.get(name)).flatten() {
            id
        } else {
            let id = identities.len() as u32;
            identities.push(Identity {
                id,
                names: BTreeSet::new(),
                emails: BTreeSet::new(),
            });
            id
        };
        self.exact.insert(pair, id);
        let ident = &mut identities[id as usize];
        // A name or email stays with the identity that claimed it first.
        if !email.is_empty() && !self.by_email.contains_key(email) {
            self.by_email.insert(email.to_string(), id);
            ident.emails.insert(email.to_string());
        }
        if !name.is_empty() && !self.by_name.contains_key(name) {
            self.by_name.insert(name.to_string(), id);
            ident.names.insert(name.to_string());
        }
        id
    }
}

pub fn match_identities(raws: &[RawIdentity], scope: MatchScope) -> IdentityTable {
    let mut table = IdentityTable::default();
    match scope {
        MatchScope::CrossColumnAndTable => {
            let mut m = Matcher::default();
            for raw in raws {
                let key = raw.key();
                let id = m.resolve(&key.name, &key.email, &mut table.identities);
                table.mapping.insert(key, id);
            }
        }
        MatchScope::WithinColumn => {
            let mut order: Vec<(String, Column)> = Vec::new();
            for raw in raws {
                let p = (raw.source_table.clone(), raw.source_column);
                if !order.contains(&p) {
                    order.push(p);
                }
            }
            for (tbl, col) in order {
                let mut m = Matcher::default();
                for raw in raws
                    .iter()
                    .filter(|r| r.source_table == tbl && r.source_column == col)
                {
                    let key = raw.key();
                    let id = m.resolve(&key.name, &key.email, &mut table.identities);
                    table.mapping.insert(key, id);
                }
            }
        }
    }
    table
}

/// The raw identity stream of a run: the commit table (author, then committer,
/// per commit in the given order) followed by the entity table in row order.
pub fn raw_identity_stream(
    commits: &[&CommitRecord],
    changes: &[EntityChange],
) -> Vec<RawIdentity> {
    let mut raws = Vec::with_capacity(commits.len() * 2 + changes.len());
    for c in commits {
        raws.push(RawIdentity::new(
            &c.author_name,
            &c.author_email,
            Column::Author,
            COMMITS_TABLE,
        ));
        raws.push(RawIdentity::new(
            &c.committer_name,
            &c.committer_email,
            Column::Committer,
            COMMITS_TABLE,
        ));
    }
    for ch in changes {
        raws.push(RawIdentity::new(
            &ch.dev_name,
            &ch.dev_email,
            Column::Author,
            ENTITIES_TABLE,
        ));
    }
    raws
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifiedCommit {
    pub commit: CommitRecord,
    pub author_id: u32,
    pub committer_id: u32,
}

/// Replaces raw developers with canonical ids, keeping the raw fields.
pub fn apply_identities(
    changes: &[EntityChange],
    commits: &[CommitRecord],
    table: &IdentityTable,
) -> Result<(Vec<EntityChange>, Vec<IdentifiedCommit>), IdentityError> {
    let changes = changes
        .iter()
        .map(|ch| {
            let id = table.lookup(&ch.dev_name, &ch.dev_email, Column::Author, ENTITIES_TABLE)?;
            Ok(EntityChange {
                dev_id: Some(id),
                ..ch.clone()
            })
        })
        .collect::<Result<Vec<_>, IdentityError>>()?;
    let commits = commits
        .iter()
        .map(|c| {
            Ok(IdentifiedCommit {
                author_id: table.lookup(
                    &c.author_name,
                    &c.author_email,
                    Column::Author,
                    COMMITS_TABLE,
                )?,
                committer_id: table.lookup(
                    &c.committer_name,
                    &c.committer_email,
                    Column::Committer,
                    COMMITS_TABLE,
                )?,
                commit: c.clone(),
            })
        })
        .collect::<Result<Vec<_>, IdentityError>>()?;
    Ok((changes, commits))
}
