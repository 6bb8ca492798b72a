use std::path::Path;

use parfait::space::ParamValue;
use parfait::synthetic::gaussian_blobs;
use parfait::*;

fn space(l: LearnerKind) -> HyperparameterSpace {
    parse_space(Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("spaces/{l}.space"))).unwrap()
}

#[test]
fn every_learner_separates_blobs() {
    let data = gaussian_blobs(600, 3, 4.0, 1).unwrap();
    let split = split_dataset(&data, 1).unwrap();
    for l in LearnerKind::ALL {
        let model = train(l, &space(l).default_config(), &split.train, None).unwrap();
        let r = evaluate(&model, &split.validation).unwrap();
        assert!(r.accuracy > 0.95, "{l}: {}", r.accuracy);
    }
}

#[test]
fn saved_models_predict_identically() {
    let data = gaussian_blobs(300, 2, 1.0, 2).unwrap();
    for l in LearnerKind::ALL {
        let model = train(l, &space(l).default_config(), &data, None).unwrap();
        let back = TrainedModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back.predict(&data.features).unwrap(), model.predict(&data.features).unwrap());
    }
}

#[test]
fn training_is_deterministic_and_paths_track_options() {
    let data = gaussian_blobs(300, 2, 1.0, 3).unwrap();
    let sig = |l: LearnerKind, c: &Configuration| {
        let mut t = TraceLog::new();
        let m = train(l, c, &data, Some(&mut t)).unwrap();
        (path_signature(&t), m.predict(&data.features).unwrap())
    };
    for l in LearnerKind::ALL {
        let c = space(l).default_config();
        assert_eq!(sig(l, &c), sig(l, &c));
    }
    let lr = space(LearnerKind::LogisticRegression).default_config();
    let newton = lr.clone().with("solver", ParamValue::Cat("newton".into()));
    assert_ne!(sig(LearnerKind::LogisticRegression, &lr).0, sig(LearnerKind::LogisticRegression, &newton).0);
    let dt = space(LearnerKind::DecisionTree).default_config();
    let random = dt.clone().with("splitter", ParamValue::Cat("random".into()));
    assert_ne!(sig(LearnerKind::DecisionTree, &dt).0, sig(LearnerKind::DecisionTree, &random).0);
}

#[test]
fn incompatible_options_are_invalid_combinations() {
    let data = gaussian_blobs(100, 2, 1.0, 4).unwrap();
    let lr = space(LearnerKind::LogisticRegression)
        .default_config()
        .with("solver", ParamValue::Cat("newton".into()))
        .with("penalty", ParamValue::Cat("l1".into()));
    assert!(matches!(train(LearnerKind::LogisticRegression, &lr, &data, None), Err(Error::InvalidCombination(_))));
    let dt = space(LearnerKind::DecisionTree).default_config().with("max_leaf_nodes", ParamValue::Int(1));
    assert!(matches!(train(LearnerKind::DecisionTree, &dt, &data, None), Err(Error::InvalidCombination(_))));
}

#[test]
fn adult_schema_parses() {
    let s = DatasetSchema::from_file(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/adult.schema.toml")).unwrap();
    assert_eq!(s.protected, "sex");
    assert_eq!(s.columns.len(), 14);
}
