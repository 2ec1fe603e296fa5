//! Run configuration and the built-in semantic profiles.
//!
//! A config file names a base profile and overrides any of its keys; unset keys
//! take the profile's values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entities::TagSet;
use crate::filters::FilterProfile;
use crate::identities::MatchScope;
use crate::network::WeightScheme;
use crate::windowing::TimestampBasis;

pub const CODEFACE_LIKE: &str = "codeface-like";
pub const KAIAULU_PRIOR: &str = "kaiaulu-prior";

const PROFILES: [(&str, &str); 2] = [
    (
        CODEFACE_LIKE,
        include_str!("../profiles/codeface-like.yaml"),
    ),
    (
        KAIAULU_PRIOR,
        include_str!("../profiles/kaiaulu-prior.yaml"),
    ),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Syntax(String),
    #[error("unknown profile `{0}` (expected codeface-like or kaiaulu-prior)")]
    UnknownProfile(String),
    #[error("invalid `{field}`: {message}")]
    InvalidField {
        field: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repo_path: Option<PathBuf>,
    pub window_months: u32,
    pub timestamp_basis: TimestampBasis,
    pub include_window_end: bool,
    pub explicit_boundaries: Option<Vec<i64>>,
    pub filter_profile: FilterProfile,
    pub tag_set: TagSet,
    pub identity_scope: MatchScope,
    pub weight_scheme: WeightScheme,
    pub include_merges: bool,
    pub include_self_loops: bool,
    pub follow_renames: bool,
    pub parallelism: usize,
}

/// A filter profile given by built-in name or inline.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum FilterSpec {
    Named(String),
    Inline(FilterProfile),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    profile: Option<String>,
    repo_path: Option<PathBuf>,
    window_months: Option<u32>,
    timestamp_basis: Option<TimestampBasis>,
    include_window_end: Option<bool>,
    #[serde(default, deserialize_with = "explicit_null")]
    explicit_boundaries: Option<Option<Vec<i64>>>,
    filter_profile: Option<FilterSpec>,
    tag_set: Option<TagSet>,
    identity_scope: Option<MatchScope>,
    weight_scheme: Option<WeightScheme>,
    include_merges: Option<bool>,
    include_self_loops: Option<bool>,
    follow_renames: Option<bool>,
    parallelism: Option<usize>,
}

fn explicit_null<'de, D>(d: D) -> Result<Option<Option<Vec<i64>>>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    Option::<Vec<i64>>::deserialize(d).map(Some)
}

/// The fully specified built-in profile.
pub fn builtin_profile(name: &str) -> Result<RunConfig, ConfigError> {
    let text = PROFILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| ConfigError::UnknownProfile(name.to_string()))?;
    serde_yaml::from_str(text)
        .map_err(|e| ConfigError::Syntax(format!("built-in profile {name}: {e}")))
}

pub fn builtin_filter(name: &str) -> Result<FilterProfile, ConfigError> {
    builtin_profile(name).map(|p| p.filter_profile)
}

impl RunConfig {
    pub fn from_yaml(text: &str) -> Result<RunConfig, ConfigError> {
        let file: ConfigFile =
            serde_yaml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let base_name = file
            .profile
            .clone()
            .unwrap_or_else(|| CODEFACE_LIKE.to_string());
        let mut c = builtin_profile(&base_name)?;
        if let Some(v) = file.repo_path {
            c.repo_path = Some(v);
        }
        if let Some(v) = file.window_months {
            c.window_months = v;
        }
        if let Some(v) = file.timestamp_basis {
            c.timestamp_basis = v;
        }
        if let Some(v) = file.include_window_end {
            c.include_window_end = v;
        }
        if let Some(v) = file.explicit_boundaries {
            c.explicit_boundaries = v;
        }
        match file.filter_profile {
            Some(FilterSpec::Named(name)) => c.filter_profile = builtin_filter(&name)?,
            Some(FilterSpec::Inline(p)) => c.filter_profile = p,
            None => {}
        }
        if let Some(v) = file.tag_set {
            c.tag_set = v;
        }
        if let Some(v) = file.identity_scope {
            c.identity_scope = v;
        }
        if let Some(v) = file.weight_scheme {
            c.weight_scheme = v;
        }
        if let Some(v) = file.include_merges {
            c.include_merges = v;
        }
        if let Some(v) = file.include_self_loops {
            c.include_self_loops = v;
        }
        if let Some(v) = file.follow_renames {
            c.follow_renames = v;
        }
        if let Some(v) = file.parallelism {
            c.parallelism = v;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::from_yaml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.window_months == 0 {
            return Err(ConfigError::InvalidField {
                field: "window_months",
                message: "must be positive".into(),
            });
        }
        if let Some(b) = &self.explicit_boundaries {
            if b.len() < 2 || b.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ConfigError::InvalidField {
                    field: "explicit_boundaries",
                    message: "need at least two strictly increasing timestamps".into(),
                });
            }
        }
        self.filter_profile
            .validate()
            .map_err(|e| ConfigError::InvalidField {
                field: "filter_profile",
                message: e.to_string(),
            })?;
        self.tag_set
            .validate()
            .map_err(|message| ConfigError::InvalidField {
                field: "tag_set",
                message,
            })?;
        if self.parallelism == 0 {
            return Err(ConfigError::InvalidField {
                field: "parallelism",
                message: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// The effective configuration as written into a run artifact.
    pub fn snapshot(&self) -> String {
        serde_yaml::to_string(self).expect("config serializes")
    }
}
