//! Mining pipeline for version-control histories: commit extraction, time
//! windows, file filters, entity attribution, identity matching, developer
//! networks, and comparison of two runs.

pub mod artifact;
pub mod config;
pub mod entities;
pub mod filters;
pub mod identities;
pub mod mockgen;
pub mod network;
pub mod notice;
pub mod pipeline;
pub mod repo_io;
pub mod simdiff;
pub mod windowing;

pub use artifact::{CommitRow, RunData, RunMeta};
pub use config::{builtin_profile, RunConfig, CODEFACE_LIKE, KAIAULU_PRIOR};
pub use entities::{EntityChange, EntityDef, TagSet, TagTool};
pub use filters::FilterProfile;
pub use identities::{Identity, IdentityTable, MatchScope};
pub use network::{DeveloperNetwork, WeightScheme};
pub use notice::Notice;
pub use pipeline::{mine, PipelineError, Tools};
pub use repo_io::{open_repo, CommitRecord, FileChange, RepoHandle};
pub use simdiff::{compare_runs, ComparisonReport};
pub use windowing::{TimeWindow, TimestampBasis};
