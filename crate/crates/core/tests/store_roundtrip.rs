mod common;

use certipose::estimator::{estimate, EstimatorConfig};
use certipose::geometry::builtin;
use certipose::harness::sample_scene;
use certipose::partition::{PartitionConfig, PoseSpace};
use certipose::store::{precompute_store, CandidateStore, MANIFEST_FILE};
use certipose::Error;
use common::desk_camera;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn loaded_store_gives_identical_estimates() {
    let cam = desk_camera();
    let target = builtin("letter").unwrap();
    let cfg = PartitionConfig {
        epsilon: 0.1,
        ..Default::default()
    };
    let store = precompute_store(&target, &cam, &PoseSpace::desk(), &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    store.save(dir.path()).unwrap();
    let loaded = CandidateStore::load(dir.path()).unwrap();
    assert_eq!(loaded, store);

    let est_cfg = EstimatorConfig {
        noise_budget: 20,
        volume_samples: 1000,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..3 {
        let scene = sample_scene(&target, &cam, &PoseSpace::desk(), 20, 1.0, &mut rng).unwrap();
        let a = estimate(&scene.observed, &store, &cam, &target, &est_cfg).unwrap();
        let b = estimate(&scene.observed, &loaded, &cam, &target, &est_cfg).unwrap();
        assert_eq!(a.pieces, b.pieces);
        assert_eq!(
            a.summary.norm_vol_ours.to_bits(),
            b.summary.norm_vol_ours.to_bits()
        );
    }
}

#[test]
fn manifest_edits_are_detected() {
    let cam = desk_camera();
    let target = builtin("stripes").unwrap();
    let cfg = PartitionConfig {
        epsilon: f64::INFINITY,
        ..Default::default()
    };
    let store = precompute_store(&target, &cam, &PoseSpace::desk(), &cfg).unwrap();
    assert_eq!(store.len(), 1);
    let dir = tempfile::tempdir().unwrap();
    store.save(dir.path()).unwrap();
    let path = dir.path().join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).unwrap();

    std::fs::write(&path, text.replace("\"version\": 1", "\"version\": 2")).unwrap();
    assert!(matches!(
        CandidateStore::load(dir.path()),
        Err(Error::StoreCorrupt(_))
    ));
    std::fs::write(
        &path,
        text.replace("\"candidateCount\": 1", "\"candidateCount\": 2"),
    )
    .unwrap();
    assert!(matches!(
        CandidateStore::load(dir.path()),
        Err(Error::StoreCorrupt(_))
    ));

    std::fs::write(&path, &text).unwrap();
    let loaded = CandidateStore::load(dir.path()).unwrap();
    let other_cam = certipose::geometry::CameraParams::new(125.0, 120, 100).unwrap();
    assert!(matches!(
        loaded.check_matches(&other_cam, &target),
        Err(Error::StoreMismatch(_))
    ));
    assert!(loaded.check_matches(&cam, &target).is_ok());
}
