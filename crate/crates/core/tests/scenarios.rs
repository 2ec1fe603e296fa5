//! Mining generated repositories and checking every table against the oracle.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use msr_core::entities::{parse_json_tags, resolve_spans};
use msr_core::mockgen::{expected_results, generate, OracleBundle};
use msr_core::{
    builtin_profile, mine, MatchScope, Notice, RunConfig, RunData, TimestampBasis, WeightScheme,
};
use msr_tagger::{tag_source, Language};

use common::{all_scenarios, materialize, scenario, tools};

#[test]
fn declared_entities_match_the_tagger() {
    for spec in all_scenarios() {
        for (i, c) in spec.commits.iter().enumerate() {
            for f in &c.files {
                let Some(text) = &f.content else { continue };
                let Some(lang) = Language::detect(&f.path) else {
                    assert!(f.entities.is_empty(), "{}: {}", spec.name, f.path);
                    continue;
                };
                let json: String = tag_source(&f.path, lang, text)
                    .iter()
                    .map(|t| serde_json::to_string(t).unwrap() + "\n")
                    .collect();
                let raw = parse_json_tags(&json).unwrap();
                let lines = text.lines().count() as u32;
                let got: Vec<_> = resolve_spans(&raw, lines, &f.path, &mut Vec::new())
                    .into_iter()
                    .map(|d| (d.name, d.kind, d.start_line, d.end_line))
                    .collect();
                let want: Vec<_> = f
                    .entities
                    .iter()
                    .map(|d| (d.name.clone(), d.kind.clone(), d.start_line, d.end_line))
                    .collect();
                assert_eq!(got, want, "{} commit {} {}", spec.name, i + 1, f.path);
            }
        }
    }
}

fn variants() -> Vec<(String, RunConfig)> {
    let cf = builtin_profile("codeface-like").unwrap();
    let kp = builtin_profile("kaiaulu-prior").unwrap();
    let mut out = vec![
        ("codeface-like".to_string(), cf.clone()),
        ("kaiaulu-prior".to_string(), kp.clone()),
    ];
    let mut v = cf.clone();
    v.weight_scheme = WeightScheme::FlatSum;
    v.include_self_loops = false;
    out.push(("codeface-flat-no-loops".into(), v));
    let mut v = cf.clone();
    v.identity_scope = MatchScope::WithinColumn;
    v.timestamp_basis = TimestampBasis::Author;
    v.include_merges = true;
    v.window_months = 1;
    out.push(("codeface-within-author-1m".into(), v));
    let mut v = kp.clone();
    v.weight_scheme = WeightScheme::NestedPairwise;
    v.identity_scope = MatchScope::CrossColumnAndTable;
    v.include_window_end = true;
    v.parallelism = 1;
    out.push(("kaiaulu-nested-cross".into(), v));
    let mut v = kp;
    v.explicit_boundaries = Some(vec![1_577_836_800, 1_583_020_800, 1_609_459_200]);
    out.push(("kaiaulu-explicit".into(), v));
    out
}

/// Checks a run against the oracle; `hashes[i]` is the commit of scenario entry `i`.
fn check(run: &RunData, want: &OracleBundle, hashes: &[String], label: &str) {
    let index_of: BTreeMap<&str, usize> = hashes
        .iter()
        .enumerate()
        .map(|(i, h)| (h.as_str(), i))
        .collect();

    let windows: Vec<(i64, i64)> = run.windows.iter().map(|w| (w.start_ts, w.end_ts)).collect();
    let want_windows: Vec<(i64, i64)> = want
        .windows
        .iter()
        .map(|w| (w.start_ts, w.end_ts))
        .collect();
    assert_eq!(windows, want_windows, "{label}: windows");

    let mut commits: Vec<_> = run
        .commits
        .iter()
        .map(|r| {
            let mut files: Vec<String> = r
                .commit
                .file_changes
                .iter()
                .map(|f| f.path.clone())
                .collect();
            files.sort();
            (
                index_of[r.commit.hash.as_str()],
                r.window_index,
                r.author_id,
                r.committer_id,
                r.commit.is_merge,
                files,
                r.commit.lines_added(),
            )
        })
        .collect();
    commits.sort();
    let want_commits: Vec<_> = want
        .commits
        .iter()
        .map(|c| {
            (
                c.index,
                c.window_index,
                c.author_id,
                c.committer_id,
                c.is_merge,
                c.files.clone(),
                c.lines_added,
            )
        })
        .collect();
    assert_eq!(commits, want_commits, "{label}: commits");

    let idents: Vec<_> = run
        .identities
        .identities
        .iter()
        .map(|i| (i.id, i.names.clone(), i.emails.clone()))
        .collect();
    let want_idents: Vec<_> = want
        .identities
        .iter()
        .map(|i| (i.id, i.names.clone(), i.emails.clone()))
        .collect();
    assert_eq!(idents, want_idents, "{label}: identities");

    let changes: Vec<_> = run
        .entity_changes
        .iter()
        .map(|c| {
            (
                c.window_index,
                index_of[c.commit.as_str()],
                c.file.clone(),
                c.entity_name.clone(),
                c.entity_kind.clone(),
                c.dev_name.clone(),
                c.dev_email.clone(),
                c.dev_id,
                c.sloc,
                c.ts,
            )
        })
        .collect();
    let want_changes: Vec<_> = want
        .entity_changes
        .iter()
        .map(|c| {
            (
                c.window_index,
                c.commit_index,
                c.file.clone(),
                c.entity_name.clone(),
                c.entity_kind.clone(),
                c.dev_name.clone(),
                c.dev_email.clone(),
                Some(c.dev_id),
                c.sloc,
                c.ts,
            )
        })
        .collect();
    assert_eq!(changes, want_changes, "{label}: entity changes");

    assert_eq!(
        run.networks.len(),
        want.networks.len(),
        "{label}: network count"
    );
    for (net, w) in run.networks.iter().zip(&want.networks) {
        let nodes: Vec<u32> = net.nodes.iter().copied().collect();
        assert_eq!(
            nodes, w.nodes,
            "{label}: nodes of window {}",
            w.window_index
        );
        let expected = match run.config.weight_scheme {
            WeightScheme::NestedPairwise => &w.nested_pairwise,
            WeightScheme::FlatSum => &w.flat_sum,
        };
        let edges: Vec<(u32, u32, u64)> =
            net.edges.iter().map(|(&(f, t), &wt)| (f, t, wt)).collect();
        let want_edges: Vec<(u32, u32, u64)> =
            expected.iter().map(|e| (e.from, e.to, e.weight)).collect();
        assert_eq!(
            edges, want_edges,
            "{label}: edges of window {}",
            w.window_index
        );
    }

    let unsupported: BTreeSet<(String, String)> = run
        .notices
        .iter()
        .filter_map(|n| match n {
            Notice::UnsupportedLanguage { path, stage, .. } => Some((path.clone(), stage.clone())),
            _ => None,
        })
        .collect();
    assert_eq!(
        unsupported, want.unsupported,
        "{label}: unsupported-language notices"
    );
    assert!(
        !run.notices
            .iter()
            .any(|n| matches!(n, Notice::FileFailure { .. } | Notice::DuplicateTag { .. })),
        "{label}: unexpected notices {:?}",
        run.notices
    );
}

#[test]
fn pipeline_matches_oracle_on_every_scenario() {
    let tools = tools();
    for spec in all_scenarios() {
        let (_dir, repo, generated) = materialize(&spec);
        for (name, config) in variants() {
            let label = format!("{} / {name}", spec.name);
            let want = expected_results(&spec, &config).unwrap();
            let run = mine(&config, &repo, &tools).unwrap_or_else(|e| panic!("{label}: {e}"));
            check(&run, &want, &generated.hashes, &label);
        }
    }
}

#[test]
fn two_developers_on_one_function() {
    let spec = scenario("two-devs-one-function");
    let (_dir, repo, _) = materialize(&spec);
    let mut config = builtin_profile("codeface-like").unwrap();
    let run = mine(&config, &repo, &tools()).unwrap();
    let (ana, ben) = (0, 1);
    let net = &run.networks[0];
    assert_eq!(net.weight(ben, ana), 40);
    assert_eq!(net.weight(ana, ana), 30);
    config.weight_scheme = WeightScheme::FlatSum;
    let run = mine(&config, &repo, &tools()).unwrap();
    assert_eq!(run.networks[0].weight(ben, ana), 35);
    assert_eq!(run.networks[0].weight(ana, ana), 30);
}

#[test]
fn generation_is_deterministic() {
    for name in ["merge-commit", "alias-identities"] {
        let spec = scenario(name);
        let (_a, _, first) = materialize(&spec);
        let (_b, _, second) = materialize(&spec);
        assert_eq!(first.hashes, second.hashes, "{name}");
    }
}

#[test]
fn generation_refuses_non_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("keep"), "x").unwrap();
    let err = generate(&scenario("scala-only"), dir.path()).unwrap_err();
    assert!(matches!(
        err,
        msr_core::mockgen::MockError::OutputNotEmpty(_)
    ));
}

#[test]
fn scala_developer_only_seen_by_the_all_languages_profile() {
    let spec = scenario("scala-unsupported-language");
    let (_dir, repo, _) = materialize(&spec);
    let has_sam = |run: &RunData| {
        run.identities
            .identities
            .iter()
            .any(|i| i.emails.contains("sam@example.org"))
    };
    let cf = mine(&builtin_profile("codeface-like").unwrap(), &repo, &tools()).unwrap();
    assert!(has_sam(&cf));
    assert!(cf.entity_changes.iter().any(|c| c.file == "src/Util.scala"));
    let kp = mine(&builtin_profile("kaiaulu-prior").unwrap(), &repo, &tools()).unwrap();
    assert!(!has_sam(&kp));
    assert!(kp.notices.contains(&Notice::UnsupportedLanguage {
        path: "src/Util.scala".into(),
        language: "Scala".into(),
        stage: "suffix_filter".into(),
    }));
    assert!(kp.commits.len() < cf.commits.len());
}

#[test]
fn scala_files_under_an_explicit_tag_set_are_reported() {
    let spec = scenario("scala-only");
    let (_dir, repo, _) = materialize(&spec);
    let mut config = builtin_profile("kaiaulu-prior").unwrap();
    config.filter_profile.suffix_allowlist.clear();
    let want = expected_results(&spec, &config).unwrap();
    let run = mine(&config, &repo, &tools()).unwrap();
    assert!(run.entity_changes.is_empty());
    assert_eq!(
        want.unsupported,
        BTreeSet::from([("src/Util.scala".to_string(), "tag_set".to_string())])
    );
    assert!(run
        .notices
        .iter()
        .any(|n| matches!(n, Notice::UnsupportedLanguage { stage, .. } if stage == "tag_set")));
}

#[test]
fn excluded_directories_drop_their_commits() {
    let spec = scenario("test-directory-excluded");
    let (_dir, repo, _) = materialize(&spec);
    let cf = mine(&builtin_profile("codeface-like").unwrap(), &repo, &tools()).unwrap();
    let kp = mine(&builtin_profile("kaiaulu-prior").unwrap(), &repo, &tools()).unwrap();
    assert_eq!(cf.commits.len(), 4);
    assert_eq!(kp.commits.len(), 2);
    assert!(kp.entity_changes.iter().all(|c| c.file.starts_with("src/")));
    assert!(cf
        .entity_changes
        .iter()
        .any(|c| c.file.starts_with("tests/")));
}

#[test]
fn merges_are_kept_only_when_asked() {
    let spec = scenario("merge-commit");
    let (_dir, repo, _) = materialize(&spec);
    let cf = mine(&builtin_profile("codeface-like").unwrap(), &repo, &tools()).unwrap();
    let kp = mine(&builtin_profile("kaiaulu-prior").unwrap(), &repo, &tools()).unwrap();
    assert!(!cf.commits.iter().any(|r| r.commit.is_merge));
    assert_eq!(kp.commits.iter().filter(|r| r.commit.is_merge).count(), 1);
    assert!(!cf.entity_changes.is_empty());
}
