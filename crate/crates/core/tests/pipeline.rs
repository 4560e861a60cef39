use std::fs;

use sdd_core::harness::{
    build_registry_from_dir, evaluate_dir, generate_synthetic, EvalOptions, RegistryBuildOptions, ShapeKind,
    SuiteConfig, SynthSpec,
};
use sdd_core::matcher::feature_distance;
use sdd_core::{
    build_model, extract_features, match_features, Error, FeatureSet32, MatchOptions, ModelRegistry, PipelineParams,
};

fn shape(kind: ShapeKind, rotation: f64) -> sdd_core::BinaryMask {
    generate_synthetic(&SynthSpec::new(kind).rotated(rotation)).unwrap()
}

fn counts(kind: ShapeKind, rotation: f64) -> (usize, usize) {
    let f = extract_features::<f64>(&shape(kind, rotation), &PipelineParams::default()).unwrap();
    (f.peaks.len(), f.valleys.len())
}

#[test]
fn star5_model_has_five_tips_and_five_notches() {
    let mask = shape(ShapeKind::Star { points: 5, outer: 100.0, inner: 40.0 }, 0.0);
    let model = build_model::<f64>(&mask, "star5", "star5/000.pgm", &PipelineParams::default()).unwrap();
    assert_eq!(model.features.peaks.len(), 5);
    assert_eq!(model.features.valleys.len(), 5);
}

#[test]
fn disk_has_no_peaks() {
    let mask = shape(ShapeKind::Circle { radius: 60.0 }, 0.0);
    let err = build_model::<f64>(&mask, "disk", "", &PipelineParams::default()).unwrap_err();
    assert!(matches!(err, Error::NoPeaks));
}

#[test]
fn polygon_corners_are_peaks() {
    for rotation in [0.0, 7.0, 22.5, 40.0] {
        assert_eq!(counts(ShapeKind::RegularPolygon { sides: 6, radius: 80.0 }, rotation), (6, 6));
        assert_eq!(counts(ShapeKind::RegularPolygon { sides: 4, radius: 80.0 }, rotation), (4, 4));
        assert_eq!(counts(ShapeKind::RegularPolygon { sides: 3, radius: 80.0 }, rotation), (3, 3));
    }
}

#[test]
fn feature_extraction_is_deterministic() {
    let mask = shape(ShapeKind::Star { points: 6, outer: 70.0, inner: 30.0 }, 13.0);
    let params = PipelineParams::default();
    let a = serde_json::to_string(&extract_features::<f64>(&mask, &params).unwrap()).unwrap();
    let b = serde_json::to_string(&extract_features::<f64>(&mask, &params).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn single_precision_agrees_with_double() {
    let params = PipelineParams::default();
    let mask = shape(ShapeKind::Star { points: 8, outer: 90.0, inner: 36.0 }, 11.0);
    let a = extract_features::<f64>(&mask, &params).unwrap();
    let b: FeatureSet32 = extract_features::<f32>(&mask, &params).unwrap();
    assert_eq!(a.peaks.len(), b.peaks.len());
    assert_eq!(a.valleys.len(), b.valleys.len());
    for (p, q) in a.peaks.iter().zip(&b.peaks) {
        assert!((p.x - q.x as f64).abs() < 1e-4 && (p.y - q.y as f64).abs() < 1e-4);
    }
}

#[test]
fn count_mismatch_outweighs_same_class_variation() {
    let config = SuiteConfig::default();
    let params = PipelineParams::default();
    let registry: ModelRegistry = config.registry(&params).unwrap();
    let opts = MatchOptions::default();
    let model = |label: &str| &registry.models().iter().find(|m| m.label == label).unwrap().features;
    let (dp, dv) = feature_distance(model("star5"), model("star6"), &opts).unwrap();
    let cross = dp + dv;
    assert!(cross >= 2.0 * opts.penalty);

    let mut worst_same: f64 = 0.0;
    for sample in config.instances().unwrap() {
        let q = extract_features::<f64>(&sample.mask, &params).unwrap();
        let r = match_features(&q, &registry, &opts).unwrap();
        let own = r.ranking.iter().find(|s| s.label == sample.label).unwrap();
        worst_same = worst_same.max(own.distance);
    }
    assert!(cross > worst_same, "cross {cross} vs same-class {worst_same}");
}

fn small_suite() -> SuiteConfig {
    SuiteConfig { classes: vec![3, 5, 8], per_class: 3, outer: 60.0, inner: 24.0, ..SuiteConfig::default() }
}

#[test]
fn self_test_on_directory_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    small_suite().write(dir.path()).unwrap();
    let registry: ModelRegistry = build_registry_from_dir(dir.path(), &RegistryBuildOptions::default()).unwrap();
    let report =
        evaluate_dir(dir.path(), &registry, &EvalOptions { self_test: true, ..EvalOptions::default() }).unwrap();
    assert_eq!(report.n_images, 3);
    assert_eq!(report.overall_accuracy, 1.0);
    for o in &report.outcomes {
        assert_eq!(o.distance, Some(0.0));
        assert!(o.id.ends_with("/000.pgm"));
    }
}

#[test]
fn corrupt_image_affects_only_its_own_row() {
    let dir = tempfile::tempdir().unwrap();
    small_suite().write(dir.path()).unwrap();
    let registry: ModelRegistry = build_registry_from_dir(dir.path(), &RegistryBuildOptions::default()).unwrap();
    let opts = EvalOptions { threads: Some(2), ..EvalOptions::default() };
    let before = evaluate_dir(dir.path(), &registry, &opts).unwrap();

    fs::write(dir.path().join("star5/002.pgm"), b"P5\n4 4\n255\nxx").unwrap();
    let after = evaluate_dir(dir.path(), &registry, &opts).unwrap();
    assert_eq!(before.n_images, after.n_images);
    let changed: Vec<_> = before.outcomes.iter().zip(&after.outcomes).filter(|(a, b)| a != b).collect();
    assert_eq!(changed.len(), 1);
    let broken = changed[0].1;
    assert_eq!(broken.id, "star5/002.pgm");
    assert!(broken.predicted.is_none());
    assert!(broken.error.as_deref().unwrap().contains("002.pgm"));
    let row = after.confusion.labels.iter().position(|l| l == "star5").unwrap();
    assert_eq!(after.confusion.errors[row], 1);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    small_suite().write(dir.path()).unwrap();
    let registry: ModelRegistry = build_registry_from_dir(dir.path(), &RegistryBuildOptions::default()).unwrap();
    let run = |threads| {
        let opts = EvalOptions { threads: Some(threads), ..EvalOptions::default() };
        let r = evaluate_dir(dir.path(), &registry, &opts).unwrap();
        (r.to_json().unwrap(), r.to_table())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert!(one.1.contains("star8"));
}

#[test]
fn registry_built_from_directory_survives_reload() {
    let dir = tempfile::tempdir().unwrap();
    small_suite().write(dir.path()).unwrap();
    let opts = RegistryBuildOptions { multi_exemplar: true, ..RegistryBuildOptions::default() };
    let registry: ModelRegistry = build_registry_from_dir(dir.path(), &opts).unwrap();
    assert_eq!(registry.len(), 12);
    let path = dir.path().join("registry.json");
    registry.save(&path).unwrap();
    let loaded: ModelRegistry = ModelRegistry::load(&path).unwrap();
    assert_eq!(loaded, registry);
    assert_eq!(loaded.to_json().unwrap() + "\n", fs::read_to_string(&path).unwrap());
}
