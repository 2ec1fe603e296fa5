//! Acceptance criteria 1 to 8, one PASS / FAIL / SKIP line each.
//!
//! Runs the `msr` binary on generated repositories. Criterion 7 needs a local
//! clone of Jailhouse named by `MSR_JAILHOUSE_REPO` and is skipped otherwise.

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use msr_core::identities::{match_identities, Column, RawIdentity};
use msr_core::mockgen::OracleBundle;
use msr_core::network::{edge_weight_flat, edge_weight_nested, Contribution, DevId};
use msr_core::simdiff::graph::{graph_edit_distance, LabeledGraph};
use msr_core::simdiff::series::{dtw, dtw_cost};
use msr_core::{ComparisonReport, MatchScope, Notice, RunData};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

enum Outcome {
    Pass(String),
    Skip(String),
}

type Verdict = Result<Outcome, String>;
type Criterion = (u32, &'static str, fn(&Path) -> Verdict);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(format!("{name}.yaml"))
}

fn msr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msr"))
        .args(args)
        .env("MSR_CTAGS_BIN", env!("CARGO_BIN_EXE_msr-ctags"))
        .output()
        .expect("msr runs")
}

fn ok(out: &Output) -> Result<(), String> {
    ensure(
        out.status.success(),
        format!(
            "msr exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        ),
    )
}

struct Mock {
    repo: PathBuf,
    hashes: Vec<String>,
    dir: PathBuf,
}

fn mockgen(name: &str, work: &Path) -> Result<Mock, String> {
    let dir = work.join(format!("mock-{name}"));
    if !dir.exists() {
        ok(&msr(&[
            "mockgen",
            "--scenario",
            scenario_path(name).to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ]))?;
    }
    let hashes = std::fs::read_to_string(dir.join("hashes.txt")).map_err(|e| e.to_string())?;
    Ok(Mock {
        repo: dir.join("repo"),
        hashes: hashes.lines().map(str::to_string).collect(),
        dir,
    })
}

fn oracle(mock: &Mock, profile: &str) -> Result<OracleBundle, String> {
    let text = std::fs::read_to_string(mock.dir.join(format!("oracle-{profile}.json")))
        .map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn mine(repo: &Path, config: &str, work: &Path, label: &str) -> Result<RunData, String> {
    let cfg = work.join(format!("{label}.yaml"));
    std::fs::write(&cfg, config).map_err(|e| e.to_string())?;
    let out = work.join(format!("run-{label}"));
    ok(&msr(&[
        "mine",
        "--config",
        cfg.to_str().unwrap(),
        "--repo",
        repo.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]))?;
    RunData::read(&out).map_err(|e| e.to_string())
}

fn window_of(run: &RunData, hash: &str) -> Option<usize> {
    run.commits
        .iter()
        .find(|r| r.commit.hash == hash)
        .and_then(|r| r.window_index)
}

fn random_sequences() -> Vec<Vec<(DevId, u64)>> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    (0..500)
        .map(|_| {
            let n = rng.gen_range(0..=8);
            (0..n)
                .map(|_| (rng.gen_range(0..3), rng.gen_range(1..=50)))
                .collect()
        })
        .collect()
}

fn as_contributions(seq: &[(DevId, u64)]) -> Vec<Contribution> {
    seq.iter()
        .enumerate()
        .map(|(i, &(dev, sloc))| Contribution {
            dev,
            commit: format!("{i:02}"),
            sloc,
            ts: i as i64,
        })
        .collect()
}

/// Nested pairwise weights as written: every ordered pair of an entity's commits.
fn literal_nested(seq: &[(DevId, u64)]) -> BTreeMap<(DevId, DevId), u64> {
    let mut w = BTreeMap::new();
    for i in 0..seq.len() {
        for j in 0..i {
            *w.entry((seq[i].0, seq[j].0)).or_insert(0) += seq[i].1 + seq[j].1;
        }
    }
    w
}

/// Flat sum weights as written: each commit against the summed earlier work of every collaborator.
fn literal_flat(seq: &[(DevId, u64)]) -> BTreeMap<(DevId, DevId), u64> {
    let mut w = BTreeMap::new();
    for i in 0..seq.len() {
        for a in 0..3 {
            let earlier: Vec<u64> = seq[..i].iter().filter(|c| c.0 == a).map(|c| c.1).collect();
            if !earlier.is_empty() {
                *w.entry((seq[i].0, a)).or_insert(0) += seq[i].1 + earlier.iter().sum::<u64>();
            }
        }
    }
    w
}

fn criterion_1(work: &Path) -> Verdict {
    let start = Instant::now();
    let mock = mockgen("two-devs-one-function", work)?;
    let nested = mine(&mock.repo, "profile: codeface-like\n", work, "c1-nested")?;
    let flat = mine(
        &mock.repo,
        "profile: codeface-like\nweight_scheme: flat_sum\n",
        work,
        "c1-flat",
    )?;
    let (ana, ben) = (0, 1);
    ensure(
        nested.networks[0].weight(ben, ana) == 40,
        format!("nested (b,a) = {}", nested.networks[0].weight(ben, ana)),
    )?;
    ensure(
        flat.networks[0].weight(ben, ana) == 35,
        format!("flat (b,a) = {}", flat.networks[0].weight(ben, ana)),
    )?;
    let o = oracle(&mock, "codeface-like")?;
    let edge = |edges: &[msr_core::mockgen::oracle::OracleEdge]| {
        edges
            .iter()
            .find(|e| (e.from, e.to) == (ben, ana))
            .map(|e| e.weight)
    };
    ensure(
        edge(&o.networks[0].nested_pairwise) == Some(40),
        "oracle nested edge",
    )?;
    ensure(
        edge(&o.networks[0].flat_sum) == Some(35),
        "oracle flat edge",
    )?;
    for seq in random_sequences() {
        let c = as_contributions(&seq);
        ensure(
            edge_weight_nested(&c, true) == literal_nested(&seq),
            format!("nested differs on {seq:?}"),
        )?;
        ensure(
            edge_weight_flat(&c, true) == literal_flat(&seq),
            format!("flat differs on {seq:?}"),
        )?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), format!("took {took:?}"))?;
    Ok(Outcome::Pass(format!(
        "(b,a) nested 40, flat 35; 500 random sequences match both literal sums in {took:.2?}"
    )))
}

fn criterion_2(_: &Path) -> Verdict {
    let mut equal_edges = 0;
    let mut strict_edges = 0;
    for seq in random_sequences() {
        let c = as_contributions(&seq);
        let nested = edge_weight_nested(&c, true);
        let flat = edge_weight_flat(&c, true);
        ensure(
            nested.keys().eq(flat.keys()),
            format!("edge sets differ on {seq:?}"),
        )?;
        for (&(x, y), &f) in &flat {
            let n = nested[&(x, y)];
            ensure(n >= f, format!("nested {n} < flat {f} on {seq:?}"))?;
            // at most one earlier commit by y before each commit by x
            let single = (0..seq.len())
                .filter(|&i| seq[i].0 == x)
                .all(|i| seq[..i].iter().filter(|c| c.0 == y).count() <= 1);
            ensure(
                (n == f) == single,
                format!("equality condition fails for ({x},{y}) on {seq:?}"),
            )?;
            if n == f {
                equal_edges += 1;
            } else {
                strict_edges += 1;
            }
        }
    }
    Ok(Outcome::Pass(format!(
        "nested >= flat on all edges; {equal_edges} equal exactly where single-prior holds, {strict_edges} strictly greater"
    )))
}

fn criterion_3(work: &Path) -> Verdict {
    let gap = mockgen("six-month-gap", work)?;
    let mut sizes = Vec::new();
    for (label, cfg) in [
        ("c3-gap-cf", "profile: codeface-like\n"),
        ("c3-gap-kp", "profile: kaiaulu-prior\n"),
    ] {
        let run = mine(&gap.repo, cfg, work, label)?;
        ensure(
            run.windows.len() == 2,
            format!("{label}: {} windows", run.windows.len()),
        )?;
        for w in &run.windows {
            let n = run
                .commits
                .iter()
                .filter(|r| r.window_index == Some(w.index))
                .count();
            ensure(n > 0, format!("{label}: window {} is empty", w.index))?;
            sizes.push(n);
        }
    }

    let b = mockgen("boundary-timestamp", work)?;
    let apr1 = 1_585_699_200;
    let runs = [
        ("committer-incl", "profile: codeface-like\n"),
        (
            "committer-excl",
            "profile: codeface-like\ninclude_window_end: false\n",
        ),
        (
            "author-incl",
            "profile: codeface-like\ntimestamp_basis: author\n",
        ),
        (
            "author-excl",
            "profile: codeface-like\ntimestamp_basis: author\ninclude_window_end: false\n",
        ),
    ];
    let mut got = BTreeMap::new();
    for (label, cfg) in runs {
        let run = mine(&b.repo, cfg, work, &format!("c3-{label}"))?;
        ensure(
            run.windows[0].end_ts == apr1,
            format!("{label}: first window ends at {}", run.windows[0].end_ts),
        )?;
        got.insert(
            label,
            (window_of(&run, &b.hashes[1]), window_of(&run, &b.hashes[2])),
        );
    }
    let want = BTreeMap::from([
        ("committer-incl", (Some(0), Some(1))),
        ("committer-excl", (Some(1), Some(1))),
        ("author-incl", (Some(0), Some(0))),
        ("author-excl", (Some(0), Some(1))),
    ]);
    ensure(got == want, format!("boundary assignments {got:?}"))?;
    Ok(Outcome::Pass(format!(
        "gap scenario: 2 non-empty windows per profile (commits {sizes:?}); boundary commits flip with include_window_end and timestamp_basis"
    )))
}

fn criterion_4(work: &Path) -> Verdict {
    let mock = mockgen("alias-identities", work)?;
    let cross = mine(&mock.repo, "profile: codeface-like\n", work, "c4-cross")?;
    let within = mine(
        &mock.repo,
        "profile: codeface-like\nidentity_scope: within_column\n",
        work,
        "c4-within",
    )?;
    let row = |run: &RunData, i: usize| {
        run.commits
            .iter()
            .find(|r| r.commit.hash == mock.hashes[i])
            .cloned()
            .unwrap()
    };
    let ana = row(&cross, 0).author_id;
    ensure(
        row(&cross, 1).author_id == ana,
        "name match did not merge `ana  LIMA`",
    )?;
    ensure(
        row(&cross, 2).author_id == ana,
        "email match did not merge `A. Lima`",
    )?;
    let ben = row(&cross, 1).committer_id;
    ensure(ben != ana, "Ben merged into Ana")?;
    ensure(
        row(&cross, 3).author_id == ben,
        "cross scope did not merge Ben's second address by name",
    )?;
    ensure(
        row(&within, 3).author_id != row(&within, 1).committer_id,
        "within-column scope crossed columns",
    )?;
    let ident = cross.identities.get(ana).unwrap();
    ensure(
        ident.names.iter().eq(["a. lima", "ana lima"].iter())
            && ident
                .emails
                .iter()
                .eq(["ana.lima@work.example", "ana@example.org"].iter()),
        format!("Ana's identity {ident:?}"),
    )?;
    ensure(
        cross.identities.len() <= within.identities.len(),
        "scenario: cross > within",
    )?;
    ensure(
        oracle(&mock, "codeface-like")?.identities.len() == cross.identities.len(),
        "oracle identity count",
    )?;

    let mut rng = StdRng::seed_from_u64(4);
    let names = ["Ana Lima", "ana lima", "A. Lima", "Ben", "", "Cy"];
    let emails = [
        "ana@x.org",
        "<ANA@x.org>",
        "ben@x.org",
        "",
        "cy@y.org",
        "b@z.org",
    ];
    let mut worst = 0usize;
    for _ in 0..200 {
        let n = rng.gen_range(0..40);
        let raws: Vec<RawIdentity> = (0..n)
            .map(|_| {
                let (col, tbl) = [
                    (Column::Author, "commits"),
                    (Column::Committer, "commits"),
                    (Column::Author, "entities"),
                ][rng.gen_range(0..3)];
                RawIdentity::new(
                    names[rng.gen_range(0..names.len())],
                    emails[rng.gen_range(0..emails.len())],
                    col,
                    tbl,
                )
            })
            .collect();
        let c = match_identities(&raws, MatchScope::CrossColumnAndTable).len();
        let w = match_identities(&raws, MatchScope::WithinColumn).len();
        ensure(c <= w, format!("cross {c} > within {w}"))?;
        worst = worst.max(w - c);
    }
    Ok(Outcome::Pass(format!(
        "alias scenario: {} identities cross, {} within; 200 random streams cross <= within (largest gap {worst})",
        cross.identities.len(),
        within.identities.len()
    )))
}

fn criterion_5(work: &Path) -> Verdict {
    let mut compare_time = Duration::ZERO;
    let mut checked = 0;
    let mut max_ncd: f64 = 0.0;
    for name in [
        "three-linear-commits",
        "merge-commit",
        "six-month-gap",
        "boundary-timestamp",
        "alias-identities",
        "dense-12-month",
    ] {
        let mock = mockgen(name, work)?;
        for profile in ["codeface-like", "kaiaulu-prior"] {
            let label = format!("c5-{name}-{profile}");
            mine(&mock.repo, &format!("profile: {profile}\n"), work, &label)?;
            let dir = work.join(format!("run-{label}"));
            let out = work.join(format!("{label}-self.json"));
            let start = Instant::now();
            ok(&msr(&[
                "compare",
                "--a",
                dir.to_str().unwrap(),
                "--b",
                dir.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ]))?;
            compare_time += start.elapsed();
            let report: ComparisonReport =
                serde_json::from_str(&std::fs::read_to_string(&out).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
            for (metric, s) in &report.series {
                let m = metric.as_str();
                ensure(s.dtw == Some(0.0), format!("{label} {m}: dtw {:?}", s.dtw))?;
                let constant = s.a.windows(2).all(|p| p[0] == p[1]);
                if s.a.len() >= 2 && !constant {
                    ensure(
                        s.spearman.is_some_and(|r| (r - 1.0).abs() < 1e-12),
                        format!("{label} {m}: spearman {:?}", s.spearman),
                    )?;
                }
                let ncd = s.ncd.ok_or(format!("{label} {m}: no ncd"))?;
                ensure(
                    ncd <= 0.15,
                    format!("{label} {m}: ncd {ncd:.3} on {:?}", s.a),
                )?;
                max_ncd = max_ncd.max(ncd);
            }
            for o in report.overlaps.values() {
                ensure(
                    o.jaccard == 1.0,
                    format!("{label} {}: jaccard {}", o.metric, o.jaccard),
                )?;
            }
            ensure(
                report.networks.iter().all(|n| n.ged == 0),
                format!("{label}: non-zero GED"),
            )?;
            checked += 1;
        }
    }
    ensure(
        compare_time < Duration::from_secs(5),
        format!("compare took {compare_time:?}"),
    )?;
    Ok(Outcome::Pass(format!(
        "{checked} self-comparisons: DTW 0, Spearman 1, Jaccard 1, GED 0, NCD <= {max_ncd:.3}; compare total {compare_time:.2?}"
    )))
}

fn every_series(max_len: usize, values: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..max_len {
        out = out
            .iter()
            .flat_map(|s| (0..values).map(move |v| [s.as_slice(), &[v]].concat()))
            .collect();
        all.extend(out.iter().cloned());
    }
    all
}

fn path_minimum(x: &[f64], y: &[f64], i: usize, j: usize) -> f64 {
    let here = (x[i] - y[j]).abs();
    if i + 1 == x.len() && j + 1 == y.len() {
        return here;
    }
    let mut best = f64::INFINITY;
    if i + 1 < x.len() {
        best = best.min(path_minimum(x, y, i + 1, j));
    }
    if j + 1 < y.len() {
        best = best.min(path_minimum(x, y, i, j + 1));
    }
    if i + 1 < x.len() && j + 1 < y.len() {
        best = best.min(path_minimum(x, y, i + 1, j + 1));
    }
    here + best
}

fn normalized(v: &[u64]) -> Vec<f64> {
    let (lo, hi) = (
        *v.iter().min().unwrap() as f64,
        *v.iter().max().unwrap() as f64,
    );
    v.iter()
        .map(|&x| {
            if hi > lo {
                (x as f64 - lo) / (hi - lo)
            } else {
                0.0
            }
        })
        .collect()
}

fn criterion_6(_: &Path) -> Verdict {
    // every pair up to length 5, then random pairs of length 6
    let series = every_series(5, 3);
    let norm: Vec<Vec<f64>> = series.iter().map(|s| normalized(s)).collect();
    let mut pairs = 0u64;
    for (x, nx) in series.iter().zip(&norm) {
        for (y, ny) in series.iter().zip(&norm) {
            let want = path_minimum(nx, ny, 0, 0);
            let got = dtw_cost(nx, ny);
            ensure(
                (got - want).abs() < 1e-9,
                format!("dtw cost {got} vs {want} on {x:?} {y:?}"),
            )?;
            pairs += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..20000 {
        let x: Vec<u64> = (0..6).map(|_| rng.gen_range(0..3)).collect();
        let y: Vec<u64> = (0..rng.gen_range(1..=6))
            .map(|_| rng.gen_range(0..3))
            .collect();
        let want =
            path_minimum(&normalized(&x), &normalized(&y), 0, 0) / (x.len() + y.len()) as f64;
        let got = dtw(
            &x.iter().map(|&v| v as f64).collect::<Vec<_>>(),
            &y.iter().map(|&v| v as f64).collect::<Vec<_>>(),
        )
        .map_err(|e| e.to_string())?;
        ensure(
            (got - want).abs() < 1e-9,
            format!("dtw {got} vs {want} on {x:?} {y:?}"),
        )?;
        pairs += 1;
    }

    for k in 0..100 {
        let graph = |rng: &mut StdRng| {
            let mut g = LabeledGraph::default();
            let n = rng.gen_range(0..=8);
            let nodes: Vec<String> = (0..12)
                .filter(|_| rng.gen_bool(0.5))
                .take(n)
                .map(|i| format!("dev{i}"))
                .collect();
            for u in &nodes {
                g.nodes.insert(u.clone());
            }
            for u in &nodes {
                for v in &nodes {
                    if u < v && rng.gen_bool(0.3) {
                        g.add_edge(u, v);
                    }
                }
            }
            g
        };
        let (a, b) = (graph(&mut rng), graph(&mut rng));
        let count = |p: &LabeledGraph, q: &LabeledGraph| {
            p.nodes.iter().filter(|n| !q.nodes.contains(*n)).count()
                + p.edges.iter().filter(|e| !q.edges.contains(*e)).count()
        };
        let want = (count(&a, &b) + count(&b, &a)) as u64;
        ensure(
            graph_edit_distance(&a, &b) == want,
            format!(
                "graph pair {k}: ged {} vs {want}",
                graph_edit_distance(&a, &b)
            ),
        )?;
    }
    Ok(Outcome::Pass(format!(
        "DTW equals path enumeration on {pairs} series pairs; GED equals symmetric-difference count on 100 graph pairs"
    )))
}

fn criterion_7(work: &Path) -> Verdict {
    let Some(repo) = std::env::var_os("MSR_JAILHOUSE_REPO").map(PathBuf::from) else {
        return Ok(Outcome::Skip(
            "set MSR_JAILHOUSE_REPO to a local Jailhouse clone at the pinned ref to run".into(),
        ));
    };
    let start = Instant::now();
    let cf = mine(&repo, "profile: codeface-like\n", work, "c7-cf-derived")?;
    let bounds: Vec<String> = cf
        .windows
        .iter()
        .map(|w| w.start_ts.to_string())
        .chain(cf.windows.last().map(|w| w.end_ts.to_string()))
        .collect();
    // both profiles on one window plan, so the comparison is defined
    let plan = format!("explicit_boundaries: [{}]\n", bounds.join(", "));
    let cf = mine(
        &repo,
        &format!("profile: codeface-like\n{plan}"),
        work,
        "c7-cf",
    )?;
    let kp = mine(
        &repo,
        &format!("profile: kaiaulu-prior\n{plan}"),
        work,
        "c7-kp",
    )?;
    let kp_cross = mine(
        &repo,
        &format!("profile: kaiaulu-prior\nidentity_scope: cross_column_and_table\n{plan}"),
        work,
        "c7-kp-cross",
    )?;
    let out = work.join("c7-report.json");
    let (a, b) = (work.join("run-c7-kp"), work.join("run-c7-cf"));
    ok(&msr(&[
        "compare",
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--plot",
    ]))?;
    let report: ComparisonReport =
        serde_json::from_str(&std::fs::read_to_string(&out).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let (nk, nc) = (kp.meta.commits_after_filter, cf.meta.commits_after_filter);
    ensure(
        nk < nc,
        format!("(a) kaiaulu-prior kept {nk} commits, codeface-like {nc}"),
    )?;
    let (dc, dw) = (kp_cross.identities.len(), kp.identities.len());
    ensure(dc <= dw, format!("(b) cross {dc} > within {dw}"))?;
    let rho = report.series[&msr_core::simdiff::Metric::Commits].spearman;
    ensure(
        rho.is_some_and(|r| r >= 0.9),
        format!("(c) commit spearman {rho:?}"),
    )?;
    ensure(
        took < Duration::from_secs(30 * 60),
        format!("took {took:?}"),
    )?;
    Ok(Outcome::Pass(format!(
        "commits {nk} < {nc}; developers cross {dc} <= within {dw}; commit spearman {:.3}; {took:.0?}",
        rho.unwrap()
    )))
}

fn criterion_8(work: &Path) -> Verdict {
    let mock = mockgen("scala-unsupported-language", work)?;
    let kp = mine(&mock.repo, "profile: kaiaulu-prior\n", work, "c8-kp")?;
    let cf = mine(&mock.repo, "profile: codeface-like\n", work, "c8-cf")?;
    let scala = |run: &RunData| {
        run.entity_changes
            .iter()
            .filter(|c| c.file.ends_with(".scala"))
            .count()
    };
    ensure(
        scala(&kp) == 0,
        format!("{} Scala entity changes under kaiaulu-prior", scala(&kp)),
    )?;
    let noticed = |run: &RunData| {
        run.notices
            .iter()
            .any(|n| matches!(n, Notice::UnsupportedLanguage { path, language, .. } if path == "src/Util.scala" && language == "Scala"))
    };
    ensure(
        noticed(&kp),
        "no UnsupportedLanguage notice for src/Util.scala",
    )?;
    let sam = |run: &RunData| {
        run.identities
            .identities
            .iter()
            .find(|i| i.emails.contains("sam@example.org"))
            .map(|i| i.id)
    };
    let in_network = |run: &RunData, id: Option<u32>| {
        id.is_some_and(|id| run.networks.iter().any(|n| n.nodes.contains(&id)))
    };
    ensure(
        !in_network(&kp, sam(&kp)),
        "Scala-only developer in the kaiaulu-prior network",
    )?;
    ensure(
        in_network(&cf, sam(&cf)),
        "Scala-only developer missing under codeface-like as well",
    )?;

    let only = mockgen("scala-only", work)?;
    let run = mine(&only.repo, "profile: kaiaulu-prior\n", work, "c8-only")?;
    ensure(
        run.entity_changes.is_empty(),
        "scala-only: entity changes present",
    )?;
    ensure(noticed(&run), "scala-only: no notice")?;
    Ok(Outcome::Pass(format!(
        "kaiaulu-prior: 0 Scala entity changes, notice raised, Scala developer absent from {} network node(s); codeface-like keeps them",
        kp.networks.iter().map(|n| n.nodes.len()).sum::<usize>()
    )))
}

fn main() {
    let work = tempfile::tempdir().expect("temporary directory");
    let criteria: [Criterion; 8] = [
        (1, "edge-weight divergence oracle", criterion_1),
        (2, "scheme dominance", criterion_2),
        (3, "windowing gap rule and boundaries", criterion_3),
        (4, "identity cascade", criterion_4),
        (5, "metric self-consistency", criterion_5),
        (6, "DTW and GED oracle equivalence", criterion_6),
        (7, "directional replication on Jailhouse", criterion_7),
        (8, "unsupported-language behavior", criterion_8),
    ];
    let mut failures = 0;
    let stdout = std::io::stdout();
    for (n, title, run) in criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(|| run(work.path()))).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        let line = match verdict {
            Ok(Outcome::Pass(detail)) => {
                format!("criterion {n} PASS ({secs:.1}s) {title}: {detail}")
            }
            Ok(Outcome::Skip(reason)) => format!("criterion {n} SKIP {title}: {reason}"),
            Err(e) => {
                failures += 1;
                format!("criterion {n} FAIL ({secs:.1}s) {title}: {e}")
            }
        };
        writeln!(stdout.lock(), "{line}").unwrap();
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
