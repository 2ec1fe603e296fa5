use std::path::Path;
use std::process::Command;

use super::scenario::{ScenarioSpec, DEFAULT_BRANCH};
use super::MockError;
use crate::repo_io::git_bin_from_env;

/// Hashes of the generated commits, in scenario order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub hashes: Vec<String>,
}

struct Git<'a> {
    bin: std::path::PathBuf,
    dir: &'a Path,
}

impl Git<'_> {
    fn cmd(&self) -> Command {
        let mut c = Command::new(&self.bin);
        c.current_dir(self.dir)
            .env("GIT_CONFIG_NOSYSTEM", "1")
            .env("GIT_CONFIG_GLOBAL", "/dev/null")
            .env("LC_ALL", "C")
            .env("TZ", "UTC")
            .args([
                "-c",
                "commit.gpgsign=false",
                "-c",
                "core.autocrlf=false",
                "-c",
                "merge.ff=false",
            ]);
        c
    }

    fn run(&self, mut c: Command) -> Result<String, MockError> {
        let out = c
            .output()
            .map_err(|e| MockError::GitInvocationFailure(format!("{}: {e}", self.bin.display())))?;
        if !out.status.success() {
            return Err(MockError::GitInvocationFailure(format!(
                "{:?}: {}",
                c.get_args().collect::<Vec<_>>(),
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
    }

    fn args(&self, args: &[&str]) -> Result<String, MockError> {
        let mut c = self.cmd();
        c.args(args);
        self.run(c)
    }
}

fn io(e: std::io::Error, what: &Path) -> MockError {
    MockError::Io(format!("{}: {e}", what.display()))
}

/// Writes the scenario as a git repository in `out_dir` (created if missing,
/// otherwise it must be empty). A branch that does not exist yet starts from the
/// commit before it; the `main` branch is checked out at the end.
pub fn generate(spec: &ScenarioSpec, out_dir: &Path) -> Result<Generated, MockError> {
    spec.validate()?;
    if out_dir.exists() {
        let mut entries = std::fs::read_dir(out_dir).map_err(|e| io(e, out_dir))?;
        if entries.next().is_some() {
            return Err(MockError::OutputNotEmpty(out_dir.display().to_string()));
        }
    }
    std::fs::create_dir_all(out_dir).map_err(|e| io(e, out_dir))?;
    let git = Git {
        bin: git_bin_from_env(),
        dir: out_dir,
    };
    git.args(&["init", "-q", "--initial-branch", DEFAULT_BRANCH])?;

    let mut current = DEFAULT_BRANCH.to_string();
    let mut known = vec![DEFAULT_BRANCH.to_string()];
    let mut hashes = Vec::with_capacity(spec.commits.len());
    for (i, c) in spec.commits.iter().enumerate() {
        let branch = c.branch();
        if branch != current {
            if known.iter().any(|b| b == branch) {
                git.args(&["checkout", "-q", branch])?;
            } else {
                git.args(&["checkout", "-q", "-b", branch])?;
                known.push(branch.to_string());
            }
            current = branch.to_string();
        }
        let committer = c.committer();
        let mut cmd = git.cmd();
        cmd.env("GIT_AUTHOR_NAME", &c.author.name)
            .env("GIT_AUTHOR_EMAIL", &c.author.email)
            .env("GIT_AUTHOR_DATE", format!("@{} +0000", c.author_ts))
            .env("GIT_COMMITTER_NAME", &committer.name)
            .env("GIT_COMMITTER_EMAIL", &committer.email)
            .env("GIT_COMMITTER_DATE", format!("@{} +0000", c.committer_ts()));
        let message = c.message(i);
        match &c.merge_from {
            Some(from) => {
                cmd.args(["merge", "-q", "--no-ff", "--no-edit", "-m", &message, from]);
            }
            None => {
                for f in &c.files {
                    let path = out_dir.join(&f.path);
                    match &f.content {
                        Some(text) => {
                            if let Some(parent) = path.parent() {
                                std::fs::create_dir_all(parent).map_err(|e| io(e, parent))?;
                            }
                            std::fs::write(&path, text).map_err(|e| io(e, &path))?;
                        }
                        None => {
                            if path.exists() {
                                std::fs::remove_file(&path).map_err(|e| io(e, &path))?;
                            }
                        }
                    }
                }
                git.args(&["add", "-A"])?;
                cmd.args(["commit", "-q", "--allow-empty", "-m", &message]);
            }
        }
        git.run(cmd)?;
        hashes.push(git.args(&["rev-parse", "HEAD"])?);
    }
    if !spec.commits.is_empty() && current != DEFAULT_BRANCH {
        git.args(&["checkout", "-q", DEFAULT_BRANCH])?;
    }
    Ok(Generated { hashes })
}
