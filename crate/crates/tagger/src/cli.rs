//! The subset of the ctags command line that the miner uses.
//!
//! ```text
//! msr-ctags --output-format=json --fields=+nKle --sort=no -f - FILE...
//! msr-ctags --print-language FILE...
//! msr-ctags --version
//! ```
//!
//! Other `--fields`, `--sort` and `--kinds-*` style options are accepted and
//! ignored; output always carries the line, long kind, language and end fields.

use std::io::Write;
use std::path::Path;

use crate::{tag_source, Language};

pub const VERSION_LINE: &str = concat!(
    "msr-ctags ",
    env!("CARGO_PKG_VERSION"),
    ", universal-ctags JSON compatible"
);

#[derive(Debug, PartialEq, Eq)]
enum Mode {
    Tags,
    PrintLanguage,
    Version,
}

/// Runs the tool; returns the process exit code. Usage errors go to `err`.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let mut mode = Mode::Tags;
    let mut json = false;
    let mut files = Vec::new();
    let mut to_stdout = false;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--version" => mode = Mode::Version,
            "--print-language" => mode = Mode::PrintLanguage,
            "--output-format=json" => json = true,
            "-f" | "-o" => {
                to_stdout = it.next().is_some_and(|f| f == "-");
                if !to_stdout {
                    writeln!(err, "msr-ctags: only `-f -` (standard output) is supported")?;
                    return Ok(2);
                }
            }
            s if s.starts_with("--output-format=") => {
                writeln!(err, "msr-ctags: unsupported output format `{s}`")?;
                return Ok(2);
            }
            s if s.starts_with("--") => {}
            s => files.push(s.to_string()),
        }
    }
    match mode {
        Mode::Version => {
            writeln!(out, "{VERSION_LINE}")?;
            Ok(0)
        }
        Mode::PrintLanguage => {
            for f in &files {
                let lang = Language::detect(f).map_or("NONE", Language::name);
                writeln!(out, "{f}: {lang}")?;
            }
            Ok(0)
        }
        Mode::Tags => {
            if !json || !to_stdout {
                writeln!(err, "msr-ctags: requires --output-format=json and -f -")?;
                return Ok(2);
            }
            let mut code = 0;
            for f in &files {
                let Some(lang) = Language::detect(f) else {
                    continue;
                };
                let bytes = match std::fs::read(Path::new(f)) {
                    Ok(b) => b,
                    Err(e) => {
                        writeln!(err, "msr-ctags: cannot open {f}: {e}")?;
                        code = 1;
                        continue;
                    }
                };
                let src = String::from_utf8_lossy(&bytes);
                for t in tag_source(f, lang, &src) {
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string(&t).expect("tag serializes")
                    )?;
                }
            }
            Ok(code)
        }
    }
}
