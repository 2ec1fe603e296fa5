//! Bundled tag extractor speaking the universal-ctags JSON output format.

use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match msr_tagger::cli::run(&args, &mut out, &mut std::io::stderr()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("msr-ctags: {e}");
            1
        }
    };
    let _ = out.flush();
    std::process::exit(code);
}
