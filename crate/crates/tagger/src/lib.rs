//! A small code tagger whose output follows the universal-ctags JSON-lines
//! format (`--output-format=json --fields=+nKle`).
//!
//! Definitions are found with per-language heuristics: brace scopes for the
//! C family, Java, JavaScript, Scala and R, indentation for Python. It reports
//! top-level and class-level definitions, not locals.

mod braces;
pub mod cli;
mod python;

use serde::Serialize;

/// One definition, serialized exactly as a ctags JSON tag line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tag {
    #[serde(rename = "_type")]
    pub ty: &'static str,
    pub name: String,
    pub path: String,
    pub language: &'static str,
    pub line: u32,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    #[serde(rename = "scopeKind", skip_serializing_if = "Option::is_none")]
    pub scope_kind: Option<&'static str>,
    pub end: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Language {
    C,
    Cpp,
    Java,
    JavaScript,
    Python,
    R,
    Scala,
}

impl Language {
    pub fn name(self) -> &'static str {
        match self {
            Language::C => "C",
            Language::Cpp => "C++",
            Language::Java => "Java",
            Language::JavaScript => "JavaScript",
            Language::Python => "Python",
            Language::R => "R",
            Language::Scala => "Scala",
        }
    }

    /// Language implied by a file name, as ctags maps extensions.
    pub fn detect(path: &str) -> Option<Language> {
        let file = path.rsplit('/').next().unwrap_or(path);
        let ext = file.rsplit_once('.').map(|(_, e)| e)?;
        Some(match ext {
            "c" => Language::C,
            // ctags parses .h as C++ only with extra options; C is its default
            "h" => Language::C,
            "cc" | "cpp" | "cxx" | "c++" | "hh" | "hpp" | "hxx" | "h++" | "C" | "H" => {
                Language::Cpp
            }
            "java" => Language::Java,
            "js" | "jsx" | "mjs" | "cjs" => Language::JavaScript,
            "py" | "pyw" | "pyi" => Language::Python,
            "r" | "R" | "s" | "q" => Language::R,
            "scala" | "sc" => Language::Scala,
            _ => return None,
        })
    }
}

/// Tags of `source`, sorted by line; `path` is copied into every tag.
pub fn tag_source(path: &str, language: Language, source: &str) -> Vec<Tag> {
    let mut tags = match language {
        Language::Python => python::tags(source),
        other => braces::tags(other, source),
    };
    tags.sort_by_key(|t| t.line);
    for t in &mut tags {
        t.path = path.to_string();
    }
    tags
}

pub(crate) fn tag(
    name: &str,
    language: Language,
    kind: &'static str,
    line: u32,
    end: u32,
    scope: Option<(&str, &'static str)>,
) -> Tag {
    Tag {
        ty: "tag",
        name: name.to_string(),
        path: String::new(),
        language: language.name(),
        line,
        kind,
        scope: scope.map(|(s, _)| s.to_string()),
        scope_kind: scope.map(|(_, k)| k),
        end: end.max(line),
    }
}
