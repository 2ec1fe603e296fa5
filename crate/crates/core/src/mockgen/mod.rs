//! Scripted repositories with fully known histories, and the expected results
//! of mining them computed without the pipeline's code.

mod generate;
pub mod oracle;
pub mod scenario;

use thiserror::Error;

pub use generate::{generate, Generated};
pub use oracle::{expected_results, OracleBundle, MAX_ORACLE_COMMITS};
pub use scenario::{CommitSpec, DeclaredEntity, FileSpec, Person, ScenarioSpec};

#[derive(Debug, Error)]
pub enum MockError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("git failed: {0}")]
    GitInvocationFailure(String),
    #[error("output directory {0} is not empty")]
    OutputNotEmpty(String),
    #[error("scenario has {0} commits; the oracle handles at most 20")]
    SpecTooLarge(usize),
    #[error("oracle cannot evaluate this configuration: {0}")]
    UnsupportedConfig(String),
}
