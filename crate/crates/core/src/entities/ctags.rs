//! Code entity definitions from a universal-ctags compatible tag tool.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use super::EntityError;
use crate::notice::Notice;

/// Environment variable overriding the tag tool executable.
pub const CTAGS_BIN_ENV: &str = "MSR_CTAGS_BIN";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityDef {
    pub name: String,
    pub kind: String,
    pub start_line: u32,
    pub end_line: u32,
    pub file: String,
    pub language: String,
}

impl EntityDef {
    pub fn contains(&self, line: u32) -> bool {
        line >= self.start_line && line <= self.end_line
    }
}

/// Which tag kinds count as entities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TagSetRepr", into = "TagSetRepr")]
pub enum TagSet {
    /// Every tag the tool reports, for any language it knows.
    DefaultAllLanguages,
    /// Only the listed kinds, keyed by the tool's language name.
    Explicit(BTreeMap<String, Vec<String>>),
}

/// `default_all_languages` or `{explicit: {Language: [kinds]}}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TagSetRepr {
    Named(String),
    Explicit {
        explicit: BTreeMap<String, Vec<String>>,
    },
}

impl TryFrom<TagSetRepr> for TagSet {
    type Error = String;

    fn try_from(r: TagSetRepr) -> Result<Self, String> {
        match r {
            TagSetRepr::Named(n) if n == "default_all_languages" => Ok(TagSet::DefaultAllLanguages),
            TagSetRepr::Named(n) => Err(format!("unknown tag set `{n}`")),
            TagSetRepr::Explicit { explicit } => Ok(TagSet::Explicit(explicit)),
        }
    }
}

impl From<TagSet> for TagSetRepr {
    fn from(t: TagSet) -> Self {
        match t {
            TagSet::DefaultAllLanguages => TagSetRepr::Named("default_all_languages".into()),
            TagSet::Explicit(explicit) => TagSetRepr::Explicit { explicit },
        }
    }
}

impl TagSet {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            TagSet::Explicit(map) if map.is_empty() => {
                Err("explicit tag set has no languages".into())
            }
            TagSet::Explicit(map) => match map.iter().find(|(_, kinds)| kinds.is_empty()) {
                Some((lang, _)) => Err(format!("explicit tag set lists no kinds for {lang}")),
                None => Ok(()),
            },
            TagSet::DefaultAllLanguages => Ok(()),
        }
    }

    pub fn supports_language(&self, language: &str) -> bool {
        match self {
            TagSet::DefaultAllLanguages => true,
            TagSet::Explicit(map) => map.contains_key(language),
        }
    }

    fn admits(&self, language: &str, kind: &str) -> bool {
        match self {
            TagSet::DefaultAllLanguages => true,
            TagSet::Explicit(map) => map
                .get(language)
                .is_some_and(|ks| ks.iter().any(|k| k == kind)),
        }
    }
}

/// One tag as reported by the tool, before span resolution.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct RawTag {
    pub name: String,
    #[serde(default)]
    pub kind: String,
    pub line: u32,
    #[serde(default)]
    pub end: Option<u32>,
    #[serde(default)]
    pub language: String,
}

#[derive(Deserialize)]
struct JsonLine {
    #[serde(rename = "_type")]
    ty: String,
    #[serde(flatten)]
    tag: serde_json::Value,
}

/// Parses `--output-format=json` output, skipping pseudo tags.
pub fn parse_json_tags(text: &str) -> Result<Vec<RawTag>, EntityError> {
    let mut tags = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let parsed: JsonLine = serde_json::from_str(line)
            .map_err(|e| EntityError::OutputParseFailure(format!("{e}: {line}")))?;
        if parsed.ty != "tag" {
            continue;
        }
        let tag: RawTag = serde_json::from_value(parsed.tag)
            .map_err(|e| EntityError::OutputParseFailure(format!("{e}: {line}")))?;
        tags.push(tag);
    }
    Ok(tags)
}

/// Something that produces tag output for a file on disk.
pub trait TagTool: Send + Sync {
    /// JSON-lines tags with line, kind, language and end fields.
    fn tags_json(&self, file: &Path) -> Result<String, EntityError>;
    /// Language the tool would parse `file` as, `None` when unknown.
    fn language_of(&self, file: &Path) -> Result<Option<String>, EntityError>;
}

/// Spawns a universal-ctags compatible executable.
#[derive(Debug, Clone)]
pub struct CtagsCli {
    pub bin: PathBuf,
}

impl CtagsCli {
    pub fn new(bin: impl Into<PathBuf>) -> Self {
        CtagsCli { bin: bin.into() }
    }

    /// `MSR_CTAGS_BIN`, else `ctags` on PATH, else `msr-ctags` next to the running executable.
    pub fn from_env() -> Self {
        if let Some(bin) = std::env::var_os(CTAGS_BIN_ENV) {
            return CtagsCli::new(bin);
        }
        let on_path = Command::new("ctags")
            .arg("--version")
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .status()
            .is_ok_and(|s| s.success());
        if on_path {
            return CtagsCli::new("ctags");
        }
        let sibling = std::env::current_exe()
            .ok()
            .and_then(|exe| {
                exe.parent()
                    .map(|d| d.join(format!("msr-ctags{}", std::env::consts::EXE_SUFFIX)))
            })
            .filter(|p| p.exists());
        CtagsCli::new(sibling.unwrap_or_else(|| PathBuf::from("ctags")))
    }

    fn run(&self, args: &[&str], file: &Path) -> Result<String, EntityError> {
        let out = Command::new(&self.bin)
            .args(args)
            .arg(file)
            .stdin(Stdio::null())
            .env("LC_ALL", "C")
            .output()
            .map_err(|e| {
                EntityError::CliInvocationFailure(format!("{}: {e}", self.bin.display()))
            })?;
        if !out.status.success() {
            return Err(EntityError::CliInvocationFailure(format!(
                "{} exited with {}: {}",
                self.bin.display(),
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    }
}

impl TagTool for CtagsCli {
    fn tags_json(&self, file: &Path) -> Result<String, EntityError> {
        self.run(
            &[
                "--output-format=json",
                "--fields=+nKle",
                "--sort=no",
                "-f",
                "-",
            ],
            file,
        )
    }

    fn language_of(&self, file: &Path) -> Result<Option<String>, EntityError> {
        let text = self.run(&["--print-language"], file)?;
        let lang = text
            .lines()
            .next()
            .and_then(|l| l.rsplit_once(": "))
            .map(|(_, lang)| lang.trim().to_string());
        Ok(lang.filter(|l| !l.is_empty() && l != "NONE"))
    }
}

pub fn count_lines(content: &[u8]) -> u32 {
    if content.is_empty() {
        return 0;
    }
    let newlines = content.iter().filter(|&&b| b == b'\n').count() as u32;
    if content.last() == Some(&b'\n') {
        newlines
    } else {
        newlines + 1
    }
}

/// Makes tag spans disjoint: a span ends at its own end field, the line before
/// the next tag, or the last line of the file, whichever comes first. Tags
/// sharing a start line keep only the first.
pub fn resolve_spans(
    raw: &[RawTag],
    total_lines: u32,
    file: &str,
    notices: &mut Vec<Notice>,
) -> Vec<EntityDef> {
    let mut sorted: Vec<&RawTag> = raw
        .iter()
        .filter(|t| t.line >= 1 && t.line <= total_lines)
        .collect();
    sorted.sort_by_key(|t| t.line);
    let mut unique: Vec<&RawTag> = Vec::with_capacity(sorted.len());
    for t in sorted {
        if unique.last().is_some_and(|prev| prev.line == t.line) {
            notices.push(Notice::DuplicateTag {
                path: file.to_string(),
                name: t.name.clone(),
                line: t.line,
            });
            continue;
        }
        unique.push(t);
    }
    unique
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let next_start = unique.get(i + 1).map(|n| n.line - 1).unwrap_or(total_lines);
            let end = t
                .end
                .unwrap_or(u32::MAX)
                .min(next_start)
                .min(total_lines)
                .max(t.line);
            EntityDef {
                name: t.name.clone(),
                kind: t.kind.clone(),
                start_line: t.line,
                end_line: end,
                file: file.to_string(),
                language: t.language.clone(),
            }
        })
        .collect()
}

/// Entity definitions of one file revision under a tag set.
///
/// Spans are resolved over all reported tags before the tag set is applied, so
/// a narrower tag set only removes entities and never widens the others.
pub fn run_ctags(
    tool: &dyn TagTool,
    content: &[u8],
    filename_hint: &str,
    tag_set: &TagSet,
    notices: &mut Vec<Notice>,
) -> Result<Vec<EntityDef>, EntityError> {
    if content.is_empty() {
        return Ok(Vec::new());
    }
    let dir = tempfile::tempdir().map_err(|e| EntityError::Io(e.to_string()))?;
    let name = Path::new(filename_hint)
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| "input".into());
    let path = dir.path().join(name);
    std::fs::write(&path, content).map_err(|e| EntityError::Io(e.to_string()))?;

    let raw = parse_json_tags(&tool.tags_json(&path)?)?;
    if raw.is_empty() {
        if tool.language_of(&path)?.is_none() {
            notices.push(Notice::UnsupportedLanguage {
                path: filename_hint.to_string(),
                language: language_guess(filename_hint),
                stage: "tag_tool".into(),
            });
        }
        return Ok(Vec::new());
    }
    let defs = resolve_spans(&raw, count_lines(content), filename_hint, notices);

    let mut unsupported: Vec<String> = defs
        .iter()
        .filter(|d| !tag_set.supports_language(&d.language))
        .map(|d| d.language.clone())
        .collect();
    unsupported.sort();
    unsupported.dedup();
    for language in unsupported {
        notices.push(Notice::UnsupportedLanguage {
            path: filename_hint.to_string(),
            language,
            stage: "tag_set".into(),
        });
    }
    Ok(defs
        .into_iter()
        .filter(|d| tag_set.admits(&d.language, &d.kind))
        .collect())
}

/// Programming language conventionally implied by a file suffix.
pub fn language_for_suffix(path: &str) -> Option<&'static str> {
    let ext = crate::filters::path_suffix(path)?;
    let lang = match ext.as_str() {
        ".c" | ".h" => "C",
        ".cc" | ".cpp" | ".cxx" | ".hpp" | ".hh" | ".hxx" => "C++",
        ".java" => "Java",
        ".js" | ".mjs" | ".cjs" => "JavaScript",
        ".ts" => "TypeScript",
        ".py" => "Python",
        ".r" => "R",
        ".scala" => "Scala",
        ".go" => "Go",
        ".rs" => "Rust",
        ".rb" => "Ruby",
        ".kt" => "Kotlin",
        ".cs" => "C#",
        ".php" => "PHP",
        ".sh" => "Sh",
        ".sql" => "SQL",
        _ => return None,
    };
    Some(lang)
}

fn language_guess(path: &str) -> String {
    language_for_suffix(path)
        .map(str::to_string)
        .or_else(|| crate::filters::path_suffix(path))
        .unwrap_or_else(|| "unknown".to_string())
}
