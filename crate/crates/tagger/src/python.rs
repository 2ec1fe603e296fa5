//! Python definitions by indentation.

use std::sync::OnceLock;

use regex::Regex;

use crate::{tag, Language, Tag};

fn def_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"^(?:async\s+)?(def|class)\s+([A-Za-z_]\w*)").unwrap())
}

fn var_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"^([A-Za-z_]\w*)\s*(?::[^=]*)?=[^=]").unwrap())
}

struct Line<'a> {
    no: u32,
    indent: usize,
    code: &'a str,
    /// First physical line of a logical statement.
    starts_statement: bool,
    /// Holds code or string content, as opposed to blank or comment-only.
    content: bool,
}

fn indent_of(s: &str) -> usize {
    let mut n = 0;
    for c in s.chars() {
        match c {
            ' ' => n += 1,
            '\t' => n = (n / 8 + 1) * 8,
            _ => break,
        }
    }
    n
}

/// Classifies physical lines, tracking brackets and triple-quoted strings.
fn lines(src: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut in_triple: Option<&str> = None;
    let mut continued = false;
    for (i, raw) in src.lines().enumerate() {
        let starts = depth == 0 && in_triple.is_none() && !continued;
        let trimmed = raw.trim_start();
        let content = in_triple.is_some() || !(trimmed.is_empty() || trimmed.starts_with('#'));
        let bytes = raw.as_bytes();
        let mut j = 0;
        while j < bytes.len() {
            if let Some(q) = in_triple {
                if raw[j..].starts_with(q) {
                    in_triple = None;
                    j += 3;
                } else {
                    j += 1;
                }
                continue;
            }
            match bytes[j] {
                b'#' => break,
                b'"' | b'\'' => {
                    let q = if bytes[j] == b'"' { "\"\"\"" } else { "'''" };
                    if raw[j..].starts_with(q) {
                        in_triple = Some(q);
                        j += 3;
                        continue;
                    }
                    let quote = bytes[j];
                    j += 1;
                    while j < bytes.len() && bytes[j] != quote {
                        if bytes[j] == b'\\' {
                            j += 1;
                        }
                        j += 1;
                    }
                    j += 1;
                }
                b'(' | b'[' | b'{' => {
                    depth += 1;
                    j += 1;
                }
                b')' | b']' | b'}' => {
                    depth -= 1;
                    j += 1;
                }
                _ => j += 1,
            }
        }
        continued = in_triple.is_none() && raw.trim_end().ends_with('\\');
        out.push(Line {
            no: i as u32 + 1,
            indent: indent_of(raw),
            code: trimmed,
            starts_statement: starts && content,
            content,
        });
    }
    out
}

struct Open {
    indent: usize,
    tag: usize,
    is_class: bool,
}

pub fn tags(src: &str) -> Vec<Tag> {
    let mut out: Vec<Tag> = Vec::new();
    let mut stack: Vec<Open> = Vec::new();
    let mut last_content = 0u32;
    for l in lines(src) {
        if l.starts_statement {
            while stack.last().is_some_and(|o| l.indent <= o.indent) {
                let o = stack.pop().unwrap();
                out[o.tag].end = last_content;
            }
            let in_function = stack.iter().any(|o| !o.is_class);
            let parent_class = stack
                .last()
                .filter(|o| o.is_class)
                .map(|o| out[o.tag].name.clone());
            if let Some(m) = def_re().captures(l.code) {
                if !in_function {
                    let is_class = &m[1] == "class";
                    let kind = match (is_class, parent_class.is_some()) {
                        (true, _) => "class",
                        (false, true) => "member",
                        (false, false) => "function",
                    };
                    let scope = parent_class.as_deref().map(|c| (c, "class"));
                    out.push(tag(&m[2], Language::Python, kind, l.no, l.no, scope));
                    stack.push(Open {
                        indent: l.indent,
                        tag: out.len() - 1,
                        is_class,
                    });
                }
            } else if stack.is_empty() && l.indent == 0 {
                if let Some(m) = var_re().captures(l.code) {
                    out.push(tag(&m[1], Language::Python, "variable", l.no, l.no, None));
                }
            }
        }
        if l.content {
            last_content = l.no;
        }
    }
    for o in stack {
        out[o.tag].end = last_content;
    }
    out
}
