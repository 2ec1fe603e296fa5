#![allow(dead_code)]

use std::path::{Path, PathBuf};

use msr_core::entities::EntityError;
use msr_core::mockgen::{generate, Generated, ScenarioSpec};
use msr_core::repo_io::git_bin_from_env;
use msr_core::{TagTool, Tools};
use msr_tagger::{tag_source, Language};

/// The bundled tagger called in process instead of through a subprocess.
pub struct InProcessTagger;

impl TagTool for InProcessTagger {
    fn tags_json(&self, file: &Path) -> Result<String, EntityError> {
        let name = file.to_string_lossy();
        let Some(lang) = Language::detect(&name) else {
            return Ok(String::new());
        };
        let src = std::fs::read(file).map_err(|e| EntityError::Io(e.to_string()))?;
        let mut out = String::new();
        for t in tag_source(&name, lang, &String::from_utf8_lossy(&src)) {
            out.push_str(&serde_json::to_string(&t).unwrap());
            out.push('\n');
        }
        Ok(out)
    }

    fn language_of(&self, file: &Path) -> Result<Option<String>, EntityError> {
        Ok(Language::detect(&file.to_string_lossy()).map(|l| l.name().to_string()))
    }
}

pub fn tools() -> Tools {
    Tools {
        git_bin: git_bin_from_env(),
        tag_tool: Box::new(InProcessTagger),
    }
}

pub fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

pub fn scenario(name: &str) -> ScenarioSpec {
    ScenarioSpec::load(&scenario_dir().join(format!("{name}.yaml"))).unwrap()
}

pub fn all_scenarios() -> Vec<ScenarioSpec> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "yaml"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| ScenarioSpec::load(p).unwrap())
        .collect()
}

/// Generates `spec` into a fresh temporary directory.
pub fn materialize(spec: &ScenarioSpec) -> (tempfile::TempDir, PathBuf, Generated) {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("repo");
    let generated = generate(spec, &repo).unwrap();
    (dir, repo, generated)
}
