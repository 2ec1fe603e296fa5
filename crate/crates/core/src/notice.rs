use serde::{Deserialize, Serialize};

/// Non-fatal events recorded in a run's notices log.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Notice {
    /// A source file in a language the run does not analyze.
    UnsupportedLanguage {
        path: String,
        language: String,
        /// `suffix_filter` or `tag_set`.
        stage: String,
    },
    DuplicateTag {
        path: String,
        name: String,
        line: u32,
    },
    FileFailure {
        commit: String,
        path: String,
        stage: String,
        message: String,
    },
    EmptyHistory,
    UnassignedCommits {
        count: usize,
    },
}
