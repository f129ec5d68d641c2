//! End to end: build candidates, observe a noisy image, estimate, check.
//!
//! `cargo run --release --example certified_estimate -- [target] [noise-fraction]`

use certipose::estimator::{estimate, EstimatorConfig};
use certipose::geometry::{builtin, CameraParams};
use certipose::harness::sample_scene;
use certipose::partition::{PartitionConfig, PoseSpace};
use certipose::store::precompute_store;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> certipose::Result<()> {
    let mut args = std::env::args().skip(1);
    let target = builtin(&args.next().unwrap_or_else(|| "digits".into()))?;
    let noise: f64 = args
        .next()
        .map_or(0.01, |s| s.parse().expect("noise fraction"));
    let cam = CameraParams::new(125.0, 100, 100)?;
    let space = PoseSpace::desk();

    let t0 = std::time::Instant::now();
    let store = precompute_store(&target, &cam, &space, &PartitionConfig::default())?;
    println!(
        "{} candidates in {:.2} s",
        store.len(),
        t0.elapsed().as_secs_f64()
    );

    let budget = (noise * cam.pixel_count() as f64).round() as usize;
    let cfg = EstimatorConfig {
        noise_budget: budget,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let scene = sample_scene(&target, &cam, &space, budget, 1.0, &mut rng)?;
        let est = estimate(&scene.observed, &store, &cam, &target, &cfg)?;
        let s = &est.summary;
        println!(
            "{:>3}/{} after filter  filter {:.2e}  refined {:.2e}  refine {:.3} s  contains truth: {}",
            s.candidates_after_filter,
            s.candidates,
            s.norm_vol_filter,
            s.norm_vol_ours,
            s.time_refine_s,
            est.contains(&scene.pose)
        );
    }
    Ok(())
}
