use std::path::Path;

use parfait::campaign::{cmd_search, summarize_runs, CampaignConfig, SUMMARY_COLUMNS};
use parfait::data::load_from_schema;
use parfait::search::{continue_search, read_corpus};
use parfait::*;

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn toy() -> (HyperparameterSpace, DataSplit) {
    let data = load_from_schema(root().join("data/toy.schema.toml")).unwrap();
    let space = parse_space(root().join("spaces/decision_tree.space")).unwrap();
    (space, split_dataset(&data, 3).unwrap())
}

/// Every archived case must have been promising against the archive prefix before it.
fn replay(corpus: &TestCorpus) {
    let mut prefix = TestCorpus {
        cases: vec![corpus.cases[0].clone()],
        seen_paths: corpus.cases[0].path_sig.into_iter().collect(),
        ..corpus.clone()
    };
    let graybox = corpus.search_type == SearchType::GrayBox;
    for c in &corpus.cases[1..] {
        assert!(is_promising(c, &prefix, corpus.epsilon, graybox).accepted, "case {} was not promising", c.eval_index);
        prefix.push(c.clone());
    }
}

#[test]
fn archives_replay_and_grow_in_order() {
    let (space, split) = toy();
    for st in SearchType::ALL {
        let corpus = run_search(LearnerKind::DecisionTree, &space, &split, &SearchSettings::deterministic(st, 1, 200)).unwrap();
        replay(&corpus);
        assert!(corpus.cases.windows(2).all(|w| w[0].eval_index < w[1].eval_index));
        assert_eq!(corpus.stats.evaluations, 200);
        let s = &corpus.stats;
        assert_eq!(s.accepted + s.rejected + s.invalid_combinations + s.undefined_metrics, 200);
        assert_eq!(corpus.len(), s.accepted + 1);
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let (space, split) = toy();
    for st in SearchType::ALL {
        let settings = SearchSettings::deterministic(st, 8, 120);
        let a = run_search(LearnerKind::DecisionTree, &space, &split, &settings).unwrap();
        let b = run_search(LearnerKind::DecisionTree, &space, &split, &settings).unwrap();
        assert_eq!(a.to_jsonl().unwrap(), b.to_jsonl().unwrap());
        assert!(a.cases.iter().all(|c| c.wall_time == 0.0));
    }
}

#[test]
fn zero_budget_keeps_only_the_default() {
    let (space, split) = toy();
    let c = run_search(LearnerKind::DecisionTree, &space, &split, &SearchSettings::deterministic(SearchType::BlackBox, 0, 0)).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c.cases[0].config, space.default_config());
}

#[test]
fn graybox_only_archives_more() {
    let (space, split) = toy();
    let bb = run_search(LearnerKind::DecisionTree, &space, &split, &SearchSettings::deterministic(SearchType::BlackBox, 4, 300)).unwrap();
    let gb = run_search(LearnerKind::DecisionTree, &space, &split, &SearchSettings::deterministic(SearchType::GrayBox, 4, 300)).unwrap();
    assert_eq!(bb.stats.accepted_new_path, 0);
    assert!(gb.cases.iter().all(|c| c.path_sig.is_some()));
    assert!(bb.cases.iter().all(|c| c.path_sig.is_none()));
}

#[test]
fn resumed_search_continues_from_disk() {
    let (space, split) = toy();
    let dir = tempfile::tempdir().unwrap();
    let settings = SearchSettings::deterministic(SearchType::GrayBox, 2, 80);
    let first = run_search(LearnerKind::DecisionTree, &space, &split, &settings).unwrap();
    let path = dir.path().join("c.jsonl");
    search::write_corpus(&first, &path).unwrap();
    let mut back = read_corpus(&path).unwrap();
    assert_eq!(back, first);
    continue_search(&mut back, &split, &settings).unwrap();
    assert_eq!(back.stats.evaluations, 160);
    assert_eq!(&back.cases[..first.len()], &first.cases[..]);
    assert!(back.cases[first.len()..].iter().all(|c| c.eval_index > 80));
    replay(&back);
}

#[test]
fn learner_and_space_must_agree() {
    let (space, split) = toy();
    let err = run_search(LearnerKind::RandomForest, &space, &split, &SearchSettings::deterministic(SearchType::Random, 0, 1)).unwrap_err();
    assert!(matches!(err, Error::Setup(_)));
}

fn parse_summary(text: &str) -> Vec<(String, Option<f64>)> {
    text.lines()
        .skip(2)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[2].parse().ok())
        })
        .collect()
}

#[test]
fn summary_matches_recomputation_from_corpus_files() {
    let dir = tempfile::tempdir().unwrap();
    let campaign = CampaignConfig {
        dataset: root().join("data/toy.schema.toml"),
        space: root().join("spaces/decision_tree.space"),
        learner: LearnerKind::DecisionTree,
        protected: None,
        settings: SearchSettings::deterministic(SearchType::Random, 10, 60),
        repetitions: 3,
        out: dir.path().to_path_buf(),
    };
    let out = cmd_search(&campaign).unwrap();
    assert_eq!(out.corpus_files.len(), 3);
    let text = std::fs::read_to_string(&out.summary_file).unwrap();
    assert!(text.starts_with("# parfait-summary v1\n"));
    let emitted = parse_summary(&text);

    // recompute straight from the corpus files, without the campaign helpers
    let mut per_column: Vec<Vec<f64>> = vec![Vec::new(); SUMMARY_COLUMNS.len()];
    for f in &out.corpus_files {
        let c = read_corpus(f).unwrap();
        let valid: Vec<&TestCase> = c.cases.iter().filter(|x| x.accuracy >= c.default_accuracy - c.epsilon - 1e-12).collect();
        let best = valid.iter().map(|x| x.accuracy).fold(f64::MIN, f64::max);
        let top: Vec<&&TestCase> = valid.iter().filter(|x| x.accuracy >= best - 0.01).collect();
        let mm = |xs: Vec<f64>| (xs.iter().copied().fold(f64::MAX, f64::min), xs.iter().copied().fold(f64::MIN, f64::max));
        let acc = mm(valid.iter().map(|x| x.accuracy).collect());
        let aod = mm(valid.iter().map(|x| x.aod).collect());
        let eod = mm(valid.iter().map(|x| x.eod).collect());
        let aod_top = mm(top.iter().map(|x| x.aod).collect());
        let eod_top = mm(top.iter().map(|x| x.eod).collect());
        let row = [valid.len() as f64, acc.0, acc.1, aod.0, aod.1, aod_top.0, aod_top.1, eod.0, eod.1, eod_top.0, eod_top.1];
        for (i, v) in row.into_iter().enumerate() {
            per_column[i].push(v);
        }
    }
    for (i, (name, mean)) in emitted.iter().enumerate() {
        assert_eq!(name, SUMMARY_COLUMNS[i]);
        let want = per_column[i].iter().sum::<f64>() / per_column[i].len() as f64;
        assert!((mean.unwrap() - want).abs() < 1e-9, "{name}: {mean:?} vs {want}");
    }
    assert!(summarize_runs(&out.runs).iter().all(|r| r.ci.is_some()));
}

#[test]
fn setup_errors_carry_the_run_index() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("bad.space");
    std::fs::write(
        &space,
        "parfait-space 1\nlearner logistic_regression\nparam solver categorical values=gd,newton default=newton\nparam penalty categorical values=l2,l1 default=l1\n",
    )
    .unwrap();
    let campaign = CampaignConfig {
        dataset: root().join("data/toy.schema.toml"),
        space,
        learner: LearnerKind::LogisticRegression,
        protected: None,
        settings: SearchSettings::deterministic(SearchType::Random, 0, 5),
        repetitions: 2,
        out: dir.path().join("out"),
    };
    let err = cmd_search(&campaign).unwrap_err();
    assert!(matches!(&err, Error::Run { run: 0, .. }), "{err}");
    assert!(err.to_string().starts_with("run 0: setup error"));

    let wrong_learner = CampaignConfig {
        space: root().join("spaces/decision_tree.space"),
        ..campaign.clone()
    };
    assert!(matches!(cmd_search(&wrong_learner), Err(Error::Validation { .. })));
    assert!(CampaignConfig { repetitions: 0, ..campaign }.validate().is_err());
}
