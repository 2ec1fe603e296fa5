use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use msr_core::mockgen::{expected_results, generate, MockError, ScenarioSpec};
use msr_core::simdiff::plot::line_chart;
use msr_core::simdiff::SimError;
use msr_core::{
    builtin_profile, compare_runs, mine, RunConfig, RunData, Tools, CODEFACE_LIKE, KAIAULU_PRIOR,
};

#[derive(Parser)]
#[command(
    name = "msr",
    version,
    about = "Mine developer collaboration data from git and compare runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline on one repository and write a run artifact.
    Mine {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        repo: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two run artifacts sharing a window plan.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write one SVG chart per count series next to the report.
        #[arg(long)]
        plot: bool,
    },
    /// Generate a scripted repository and the expected results for both built-in profiles.
    Mockgen {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait ExitWith<T> {
    fn exit_with(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitWith<T> for Result<T, E> {
    fn exit_with(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

fn cmd_mine(config: &Path, repo: &Path, out: &Path) -> Result<(), Failure> {
    let config = RunConfig::load(config).exit_with(2)?;
    if !repo.is_dir() {
        return Err(anyhow!("repository path {} does not exist", repo.display())).exit_with(2);
    }
    let run = mine(&config, repo, &Tools::from_env()).exit_with(1)?;
    run.write(out)
        .with_context(|| format!("writing artifact to {}", out.display()))
        .exit_with(1)?;
    println!(
        "{}: {} of {} commits kept, {} windows, {} entity changes, {} developers -> {}",
        run.config.profile,
        run.meta.commits_after_filter,
        run.meta.commits_extracted,
        run.windows.len(),
        run.entity_changes.len(),
        run.identities.len(),
        out.display()
    );
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path, out: &Path, plot: bool) -> Result<(), Failure> {
    let run_a = RunData::read(a)
        .with_context(|| format!("reading {}", a.display()))
        .exit_with(1)?;
    let run_b = RunData::read(b)
        .with_context(|| format!("reading {}", b.display()))
        .exit_with(1)?;
    let report = match compare_runs(&run_a, &run_b) {
        Ok(r) => r,
        Err(e @ SimError::WindowPlanMismatch(_)) => return Err(e).exit_with(3),
        Err(e) => return Err(e).exit_with(1),
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).exit_with(1)?;
    }
    let json = serde_json::to_string_pretty(&report).exit_with(1)?;
    std::fs::write(out, json + "\n").exit_with(1)?;
    let csv = out.with_extension("csv");
    std::fs::write(&csv, report.to_csv()).exit_with(1)?;
    if plot {
        let stem = out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "report".into());
        for (metric, s) in &report.series {
            let svg = line_chart(
                &format!("{} per window", metric.as_str()),
                &report.meta.run_a.profile,
                &s.a,
                &report.meta.run_b.profile,
                &s.b,
            );
            let path = out.with_file_name(format!("{stem}-{}.svg", metric.as_str()));
            std::fs::write(&path, svg).exit_with(1)?;
        }
    }
    for (metric, s) in &report.series {
        let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        println!(
            "{:<10} dtw {:>7}  spearman {:>7}  ncd {:>7}",
            metric.as_str(),
            show(s.dtw),
            show(s.spearman),
            show(s.ncd)
        );
    }
    println!("report -> {} (+ {})", out.display(), csv.display());
    Ok(())
}

fn cmd_mockgen(scenario: &Path, out: &Path) -> Result<(), Failure> {
    let spec = match ScenarioSpec::load(scenario) {
        Ok(s) => s,
        Err(e @ MockError::InvalidSpec(_)) => return Err(e).exit_with(2),
        Err(e) => return Err(e).exit_with(1),
    };
    let repo = out.join("repo");
    let generated = match generate(&spec, &repo) {
        Ok(g) => g,
        Err(e @ MockError::OutputNotEmpty(_)) => return Err(e).exit_with(2),
        Err(e) => return Err(e).exit_with(1),
    };
    println!(
        "{}: {} commits -> {}",
        spec.name,
        generated.hashes.len(),
        repo.display()
    );
    for profile in [CODEFACE_LIKE, KAIAULU_PRIOR] {
        let config = builtin_profile(profile).exit_with(1)?;
        match expected_results(&spec, &config) {
            Ok(bundle) => {
                let path = out.join(format!("oracle-{profile}.json"));
                let json = serde_json::to_string_pretty(&bundle).exit_with(1)?;
                std::fs::write(&path, json + "\n").exit_with(1)?;
                println!("oracle -> {}", path.display());
            }
            Err(e @ MockError::SpecTooLarge(_)) => eprintln!("msr: no oracle for {profile}: {e}"),
            Err(e) => return Err(e).exit_with(1),
        }
    }
    let hashes = out.join("hashes.txt");
    std::fs::write(&hashes, generated.hashes.join("\n") + "\n").exit_with(1)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Mine { config, repo, out } => cmd_mine(config, repo, out),
        Command::Compare { a, b, out, plot } => cmd_compare(a, b, out, *plot),
        Command::Mockgen { scenario, out } => cmd_mockgen(scenario, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("msr: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
