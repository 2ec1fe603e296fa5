//! Brace-scoped languages: C, C++, Java, JavaScript, Scala and R.
//!
//! The source is first cleaned (comments and string contents blanked,
//! preprocessor lines removed) and then scanned once. Text since the last
//! statement boundary forms a header; when a `{` opens, the header decides
//! whether the scope is a tagged definition, an untagged container, or an
//! opaque body whose contents are not tagged.

use std::sync::OnceLock;

use regex::Regex;

use crate::{tag, Language, Tag};

fn re(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("valid pattern"))
}

macro_rules! regex {
    ($p:expr) => {{
        static CELL: OnceLock<Regex> = OnceLock::new();
        re(&CELL, $p)
    }};
}

struct Cleaned {
    text: Vec<char>,
    macros: Vec<(String, u32, u32)>,
}

/// Blanks comments and string bodies, keeping every newline in place.
fn clean(lang: Language, src: &str) -> Cleaned {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::with_capacity(chars.len());
    let mut macros = Vec::new();
    let c_family = matches!(lang, Language::C | Language::Cpp);
    let hash_comments = lang == Language::R;
    let mut i = 0;
    let mut line = 1u32;
    let mut at_line_start = true;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c_family && at_line_start && c == '#' {
            let start_line = line;
            let mut body = String::new();
            while i < chars.len() {
                if chars[i] == '\n' {
                    if body.ends_with('\\') {
                        body.pop();
                        out.push('\n');
                        line += 1;
                        i += 1;
                        continue;
                    }
                    break;
                }
                body.push(chars[i]);
                out.push(' ');
                i += 1;
            }
            if let Some(m) = regex!(r"^#\s*define\s+([A-Za-z_]\w*)").captures(&body) {
                macros.push((m[1].to_string(), start_line, line));
            }
            continue;
        }
        if c == '\n' {
            out.push('\n');
            line += 1;
            at_line_start = true;
            i += 1;
            continue;
        }
        if !c.is_whitespace() {
            at_line_start = false;
        }
        let line_comment = if hash_comments {
            c == '#'
        } else {
            c == '/' && next == Some('/')
        };
        if line_comment {
            while i < chars.len() && chars[i] != '\n' {
                out.push(' ');
                i += 1;
            }
            continue;
        }
        if !hash_comments && c == '/' && next == Some('*') {
            out.extend([' ', ' ']);
            i += 2;
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                if chars[i] == '\n' {
                    line += 1;
                }
                out.push(if chars[i] == '\n' { '\n' } else { ' ' });
                i += 1;
            }
            if i < chars.len() {
                out.extend([' ', ' ']);
                i += 2;
            }
            continue;
        }
        let quote = match c {
            '"' => true,
            '`' => matches!(lang, Language::JavaScript | Language::R | Language::Scala),
            '\'' => match lang {
                Language::JavaScript | Language::R => true,
                // a char literal closes within a few characters; otherwise a Scala symbol
                _ => chars[i + 1..].iter().take(4).any(|&x| x == '\''),
            },
            _ => false,
        };
        if quote {
            out.push(c);
            i += 1;
            while i < chars.len() && chars[i] != c {
                if chars[i] == '\\' && i + 1 < chars.len() {
                    out.push(' ');
                    i += 1;
                }
                if chars[i] == '\n' {
                    line += 1;
                    out.push('\n');
                } else {
                    out.push(' ');
                }
                i += 1;
            }
            if i < chars.len() {
                out.push(c);
                i += 1;
            }
            continue;
        }
        out.push(c);
        i += 1;
    }
    Cleaned { text: out, macros }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    /// Definitions inside are tagged with this container as scope.
    Container,
    /// Transparent block such as `extern "C"`.
    Block,
    /// A body whose contents are not tagged.
    Opaque,
}

struct Scope {
    role: Role,
    tag: Option<usize>,
    /// Name and kind for scoping nested tags.
    name: Option<(String, &'static str)>,
}

/// Header text with the source line of every byte.
#[derive(Default)]
struct Header {
    text: String,
    lines: Vec<u32>,
    parens: i32,
}

impl Header {
    fn push(&mut self, c: char, line: u32) {
        if self.text.is_empty() && c.is_whitespace() {
            return;
        }
        match c {
            '(' | '[' => self.parens += 1,
            ')' | ']' => self.parens -= 1,
            _ => {}
        }
        self.text.push(c);
        self.lines.extend(std::iter::repeat_n(line, c.len_utf8()));
    }

    fn clear(&mut self) {
        self.text.clear();
        self.lines.clear();
        self.parens = 0;
    }

    fn line_at(&self, byte: usize) -> u32 {
        self.lines.get(byte).copied().unwrap_or(0)
    }

    fn trimmed(&self) -> &str {
        self.text.trim_end()
    }
}

struct Found {
    name: String,
    kind: &'static str,
    /// Byte offset of the name in the header.
    at: usize,
    role: Role,
    /// Explicit scope such as the `A` of `A::f`.
    qualifier: Option<String>,
}

const CONTROL: &[&str] = &[
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "return",
    "sizeof",
    "synchronized",
    "function",
    "else",
    "do",
    "try",
    "foreach",
    "repeat",
];

/// Byte offset of the `(` matching the final `)` of `h`.
fn open_paren_of_last(h: &str) -> Option<usize> {
    let mut depth = 0;
    for (i, c) in h.char_indices().rev() {
        match c {
            ')' => depth += 1,
            '(' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Identifier (possibly `A::b`, `~A`) ending right before byte `end`.
fn ident_before(h: &str, end: usize) -> Option<(usize, &str)> {
    let head = h[..end].trim_end();
    let start = head
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_alphanumeric() || matches!(c, '_' | '$' | ':' | '~'))
        .last()
        .map(|(i, _)| i)?;
    let ident = head[start..].trim_start_matches(':');
    let offset = head.len() - ident.len();
    (!ident.is_empty() && !ident.starts_with(|c: char| c.is_ascii_digit()))
        .then_some((offset, ident))
}

fn strip_c_qualifiers(h: &str) -> &str {
    let mut h = h.trim_end();
    // constructor initializer list: `A::A(int x) : x_(x)`
    if let Some(close) = h.find(')') {
        if let Some(colon) = h[close..].find(':') {
            let at = close + colon;
            if !h[at..].starts_with("::") {
                h = h[..at].trim_end();
            }
        }
    }
    loop {
        let before = h;
        for q in ["const", "noexcept", "override", "final", "volatile"] {
            if let Some(rest) = h.strip_suffix(q) {
                if rest.ends_with(|c: char| c.is_whitespace() || c == ')') {
                    h = rest.trim_end();
                }
            }
        }
        if let Some(m) = regex!(r"\)\s*throws\s+[\w.,\s]+$").find(h) {
            h = &h[..m.start() + 1];
        }
        if h == before {
            return h;
        }
    }
}

/// Function-like header `... name(args)`; returns `None` for calls and control flow.
fn c_function(h: &str, kind: &'static str) -> Option<Result<Found, ()>> {
    let h = strip_c_qualifiers(h);
    if !h.ends_with(')') {
        return None;
    }
    let open = open_paren_of_last(h)?;
    let Some((at, ident)) = ident_before(h, open) else {
        return Some(Err(()));
    };
    let before = h[..at].trim_end();
    if CONTROL.contains(&ident)
        || before.ends_with("new")
        || before.ends_with('=')
        || before.ends_with('.')
    {
        return Some(Err(()));
    }
    let (qualifier, name) = match ident.rsplit_once("::") {
        Some((q, n)) => (Some(q.rsplit("::").next().unwrap_or(q).to_string()), n),
        None => (None, ident),
    };
    Some(Ok(Found {
        name: name.to_string(),
        kind,
        at: at + ident.len() - name.len(),
        role: Role::Opaque,
        qualifier,
    }))
}

fn container(h: &str, pattern: &Regex, kinds: &[(&str, &'static str)]) -> Option<Found> {
    let m = pattern.captures(h)?;
    let keyword = m.get(1)?.as_str();
    let name = m.get(2)?;
    let kind = kinds.iter().find(|(k, _)| *k == keyword)?.1;
    Some(Found {
        name: name.as_str().to_string(),
        kind,
        at: name.start(),
        role: Role::Container,
        qualifier: None,
    })
}

enum Classified {
    Tagged(Found),
    Untagged(Role),
}

fn classify_open(lang: Language, h: &str, parent: Option<&Scope>) -> Classified {
    let h_trim = h.trim();
    let in_container = parent.is_some_and(|p| p.role == Role::Container);
    match lang {
        Language::C | Language::Cpp => {
            if let Some(r) = c_function(h_trim, "function") {
                return r.map_or(Classified::Untagged(Role::Opaque), Classified::Tagged);
            }
            let pattern = regex!(
                r"\b(class|struct|union|enum|namespace)\s+(?:class\s+|struct\s+)?([A-Za-z_]\w*)"
            );
            let kinds: &[(&str, &'static str)] = if lang == Language::C {
                &[("struct", "struct"), ("union", "union"), ("enum", "enum")]
            } else {
                &[
                    ("class", "class"),
                    ("struct", "struct"),
                    ("union", "union"),
                    ("enum", "enum"),
                    ("namespace", "namespace"),
                ]
            };
            if let Some(f) = container(h_trim, pattern, kinds) {
                return Classified::Tagged(f);
            }
            if regex!(r"^(?:typedef\s+)?(?:struct|union|enum|class|namespace)\b[^=]*$")
                .is_match(h_trim)
            {
                return Classified::Untagged(Role::Container);
            }
            if h_trim.is_empty() || regex!(r"^extern(\s|$)").is_match(h_trim) {
                return Classified::Untagged(Role::Block);
            }
            Classified::Untagged(Role::Opaque)
        }
        Language::Java => {
            let pattern =
                regex!(r"(?:^|\s)(class|interface|enum|@interface|record)\s+([A-Za-z_$][\w$]*)");
            let kinds = &[
                ("class", "class"),
                ("interface", "interface"),
                ("enum", "enum"),
                ("@interface", "annotation"),
                ("record", "record"),
            ];
            if let Some(f) = container(h_trim, pattern, kinds) {
                return Classified::Tagged(f);
            }
            if in_container {
                if let Some(r) = c_function(h_trim, "method") {
                    return r.map_or(Classified::Untagged(Role::Opaque), Classified::Tagged);
                }
            }
            Classified::Untagged(Role::Opaque)
        }
        Language::JavaScript => {
            if let Some(m) = regex!(r"(?:^|[^\w$])class\s+([A-Za-z_$][\w$]*)").captures(h_trim) {
                let n = m.get(1).unwrap();
                return Classified::Tagged(Found {
                    name: n.as_str().into(),
                    kind: "class",
                    at: n.start(),
                    role: Role::Container,
                    qualifier: None,
                });
            }
            if in_container {
                let method =
                    regex!(r"^(?:(?:static|async|get|set)\s+|\*\s*)*([A-Za-z_$][\w$]*)\s*\(.*\)$");
                if let Some(m) = method.captures(h_trim) {
                    let n = m.get(1).unwrap();
                    if !CONTROL.contains(&n.as_str()) {
                        return Classified::Tagged(Found {
                            name: n.as_str().into(),
                            kind: "method",
                            at: n.start(),
                            role: Role::Opaque,
                            qualifier: None,
                        });
                    }
                }
            }
            let patterns = [
                regex!(r"(?:^|[^\w$.])function\s*\*?\s*([A-Za-z_$][\w$]*)\s*\("),
                regex!(
                    r"(?:^|[^\w$])(?:const|let|var)\s+([A-Za-z_$][\w$]*)\s*=\s*(?:async\s+)?(?:function\b|\([^()]*\)\s*=>$|[A-Za-z_$][\w$]*\s*=>$)"
                ),
                regex!(r"^(?:[A-Za-z_$][\w$]*\.)*([A-Za-z_$][\w$]*)\s*=\s*(?:async\s+)?function\b"),
            ];
            for p in patterns {
                if let Some(m) = p.captures(h_trim) {
                    let n = m.get(1).unwrap();
                    return Classified::Tagged(Found {
                        name: n.as_str().into(),
                        kind: "function",
                        at: n.start(),
                        role: Role::Opaque,
                        qualifier: None,
                    });
                }
            }
            Classified::Untagged(Role::Opaque)
        }
        Language::Scala => match scala_def(h_trim) {
            Some(f) => Classified::Tagged(f),
            None if regex!(r"^package\b").is_match(h_trim) => Classified::Untagged(Role::Block),
            None => Classified::Untagged(Role::Opaque),
        },
        Language::R => match r_function(h_trim) {
            Some(f) => Classified::Tagged(f),
            None => Classified::Untagged(Role::Opaque),
        },
        Language::Python => unreachable!("python is indentation based"),
    }
}

fn scala_def(h: &str) -> Option<Found> {
    let pattern = regex!(r"(?:^|\s)(class|trait|object)\s+([A-Za-z_]\w*)");
    if let Some(f) = container(
        h,
        pattern,
        &[("class", "class"), ("trait", "trait"), ("object", "object")],
    ) {
        return Some(f);
    }
    let m = regex!(r"(?:^|\s)def\s+([A-Za-z_]\w*|[^\s\w\[\](){}:=,]+)").captures(h)?;
    let n = m.get(1)?;
    Some(Found {
        name: n.as_str().into(),
        kind: "method",
        at: n.start(),
        role: Role::Opaque,
        qualifier: None,
    })
}

fn r_function(h: &str) -> Option<Found> {
    let m = regex!(r"^([A-Za-z.][\w.]*)\s*(?:<<-|<-|=)\s*function\s*\(").captures(h)?;
    let n = m.get(1)?;
    Some(Found {
        name: n.as_str().into(),
        kind: "function",
        at: n.start(),
        role: Role::Opaque,
        qualifier: None,
    })
}

fn continues(h: &str) -> bool {
    const TAILS: &[&str] = &[
        "=", ",", "(", "[", ".", "+", "-", "*", "/", "&", "|", "<-", "=>", ":", "%", "~", "!", "?",
        "extends", "with",
    ];
    TAILS.iter().any(|t| h.ends_with(t))
}

/// Whether a newline ends the statement in the header.
fn newline_ends(lang: Language, h: &Header) -> bool {
    let t = h.trimmed();
    if t.is_empty() || h.parens != 0 {
        return false;
    }
    match lang {
        Language::Scala => !continues(t),
        Language::R => !continues(t) && !regex!(r"function\s*\(.*\)$").is_match(t),
        Language::JavaScript => {
            t.ends_with(|c: char| {
                c.is_alphanumeric() || matches!(c, '_' | '$' | '"' | '\'' | '`' | ']')
            }) && !regex!(r"(?:^|[^\w$])(?:class|function)(?:[^\w$]|$)").is_match(t)
        }
        _ => false,
    }
}

/// Declarations ended by `;` in a non-opaque scope.
fn declarations(
    lang: Language,
    h: &str,
    parent: Option<&Scope>,
) -> Vec<(String, &'static str, usize)> {
    let t = h.trim();
    let parent_kind = parent.and_then(|p| p.name.as_ref().map(|(_, k)| *k));
    let mut out = Vec::new();
    match lang {
        Language::C | Language::Cpp => {
            if regex!(r"^(?:return|using|extern|friend|template|static_assert|goto|case|default|public|private|protected)\b")
                .is_match(t)
            {
                return out;
            }
            if t.starts_with("typedef") {
                let fp = regex!(r"\(\s*\*\s*([A-Za-z_]\w*)\s*\)");
                let m = fp.captures(t).and_then(|c| c.get(1)).or_else(|| {
                    regex!(r"([A-Za-z_]\w*)\s*(?:\[[^\]]*\]\s*)*$")
                        .captures(t)
                        .and_then(|c| c.get(1))
                });
                if let Some(m) = m {
                    out.push((m.as_str().to_string(), "typedef", m.start()));
                }
                return out;
            }
            if regex!(r"^(?:struct|union|enum|class)\s+\w+$").is_match(t) {
                return out;
            }
            if parent_kind == Some("enum") {
                return out;
            }
            let kind = match parent_kind {
                Some("struct" | "union" | "class") => "member",
                _ => "variable",
            };
            for (offset, seg) in top_level_segments(t) {
                let seg_code = seg.split('=').next().unwrap_or(seg);
                // a trailing `)` without an initializer is a prototype
                if seg_code.trim_end().ends_with(')') {
                    continue;
                }
                let m = regex!(r"([A-Za-z_]\w*)\s*(?:\[[^\]]*\]\s*)*(?::\s*\d+\s*)?$")
                    .captures(seg_code.trim_end());
                if let Some(n) = m.and_then(|c| c.get(1)) {
                    // a lone type name is not a declaration
                    if seg_code.trim().contains(char::is_whitespace) || !out.is_empty() {
                        out.push((n.as_str().to_string(), kind, offset + n.start()));
                    }
                }
            }
        }
        Language::Java if parent.is_some_and(|p| p.role == Role::Container) => {
            if parent_kind == Some("enum") || parent_kind == Some("interface") {
                return out;
            }
            let code = t.split('=').next().unwrap_or(t).trim_end();
            if code.ends_with(')') || regex!(r"^(?:return|import|package)\b").is_match(code) {
                return out;
            }
            if let Some(n) = regex!(r"\s([A-Za-z_$][\w$]*)\s*(?:\[\s*\])*$")
                .captures(code)
                .and_then(|c| c.get(1))
            {
                out.push((n.as_str().to_string(), "field", n.start()));
            }
        }
        Language::JavaScript if parent.is_none() => {
            if let Some(c) = regex!(r"^(const|let|var)\s+([A-Za-z_$][\w$]*)\s*(?:=|$)").captures(t)
            {
                let kind = if &c[1] == "const" {
                    "constant"
                } else {
                    "variable"
                };
                let n = c.get(2).unwrap();
                out.push((n.as_str().to_string(), kind, n.start()));
            }
        }
        _ => {}
    }
    out
}

/// Comma-separated parts outside parentheses and braces, with byte offsets.
fn top_level_segments(t: &str) -> Vec<(usize, &str)> {
    let mut parts = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in t.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push((start, &t[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &t[start..]));
    parts
}

fn scope_of<'a>(stack: &'a [Scope], qualifier: Option<&'a str>) -> Option<(&'a str, &'static str)> {
    if let Some(q) = qualifier {
        return Some((q, "class"));
    }
    stack
        .iter()
        .rev()
        .find_map(|s| s.name.as_ref().map(|(n, k)| (n.as_str(), *k)))
}

pub fn tags(lang: Language, src: &str) -> Vec<Tag> {
    let cleaned = clean(lang, src);
    let mut out: Vec<Tag> = cleaned
        .macros
        .iter()
        .map(|(name, line, end)| tag(name, lang, "macro", *line, *end, None))
        .collect();
    let mut stack: Vec<Scope> = Vec::new();
    let mut header = Header::default();
    let mut line = 1u32;

    let opaque = |stack: &[Scope]| stack.iter().any(|s| s.role == Role::Opaque);

    for &c in &cleaned.text {
        match c {
            '{' => {
                if opaque(&stack) {
                    stack.push(Scope {
                        role: Role::Opaque,
                        tag: None,
                        name: None,
                    });
                } else {
                    let scope = match classify_open(lang, &header.text, stack.last()) {
                        Classified::Tagged(f) => {
                            let at_line = header.line_at(f.at).max(1);
                            let sc = scope_of(&stack, f.qualifier.as_deref());
                            out.push(tag(&f.name, lang, f.kind, at_line, line, sc));
                            Scope {
                                role: f.role,
                                tag: Some(out.len() - 1),
                                name: (f.role == Role::Container).then(|| (f.name.clone(), f.kind)),
                            }
                        }
                        Classified::Untagged(role) => Scope {
                            role,
                            tag: None,
                            name: None,
                        },
                    };
                    stack.push(scope);
                }
                header.clear();
            }
            '}' => {
                if let Some(s) = stack.pop() {
                    if let Some(i) = s.tag {
                        out[i].end = line;
                    }
                }
                header.clear();
            }
            ';' => {
                if !opaque(&stack) && header.parens == 0 {
                    for (name, kind, at) in declarations(lang, &header.text, stack.last()) {
                        let at_line = header.line_at(at).max(1);
                        out.push(tag(
                            &name,
                            lang,
                            kind,
                            at_line,
                            line,
                            scope_of(&stack, None),
                        ));
                    }
                    header.clear();
                } else if header.parens == 0 {
                    header.clear();
                } else {
                    header.push(c, line);
                }
            }
            '\n' => {
                if newline_ends(lang, &header) {
                    if !opaque(&stack) {
                        let found = match lang {
                            Language::Scala => scala_def(header.trimmed()),
                            Language::R => r_function(header.trimmed()),
                            _ => None,
                        };
                        if let Some(f) = found {
                            let at_line = header.line_at(f.at).max(1);
                            out.push(tag(
                                &f.name,
                                lang,
                                f.kind,
                                at_line,
                                line,
                                scope_of(&stack, None),
                            ));
                        } else if lang == Language::JavaScript {
                            for (name, kind, at) in declarations(lang, &header.text, stack.last()) {
                                out.push(tag(
                                    &name,
                                    lang,
                                    kind,
                                    header.line_at(at).max(1),
                                    line,
                                    None,
                                ));
                            }
                        }
                    }
                    header.clear();
                } else {
                    header.push(' ', line);
                }
                line += 1;
            }
            _ => header.push(c, line),
        }
    }
    // unterminated scopes run to the end of the file
    for s in stack {
        if let Some(i) = s.tag {
            out[i].end = line.saturating_sub(1).max(out[i].line);
        }
    }
    out
}
