//! Noisy observations: raw versus denoised estimates.
//!
//! `cargo run --release --example denoise_noisy_image -- [noise-fraction]`

use certipose::estimator::{estimate, EstimatorConfig};
use certipose::geometry::{builtin, CameraParams};
use certipose::harness::sample_scene;
use certipose::partition::{PartitionConfig, PoseSpace};
use certipose::store::precompute_store;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> certipose::Result<()> {
    let noise: f64 = std::env::args()
        .nth(1)
        .map_or(0.01, |s| s.parse().expect("noise fraction"));
    let target = builtin("stripes")?;
    let cam = CameraParams::new(125.0, 100, 100)?;
    let space = PoseSpace::desk();
    let store = precompute_store(&target, &cam, &space, &PartitionConfig::default())?;
    let budget = (noise * cam.pixel_count() as f64).round() as usize;
    let cfg = EstimatorConfig {
        noise_budget: budget,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    println!("noise budget {budget} px");
    println!("removed  raw_after_filter  raw_vol    clean_after_filter  clean_vol  both_contain");
    for _ in 0..6 {
        let scene = sample_scene(&target, &cam, &space, budget, 1.0, &mut rng)?;
        let clean = scene.observed.denoise();
        let raw = estimate(&scene.observed, &store, &cam, &target, &cfg)?;
        let den = estimate(&clean, &store, &cam, &target, &cfg)?;
        println!(
            "{:>7}  {:>16}  {:.3e}  {:>18}  {:.3e}  {}",
            scene.observed.count_and_not(&clean),
            raw.summary.candidates_after_filter,
            raw.summary.norm_vol_ours,
            den.summary.candidates_after_filter,
            den.summary.norm_vol_ours,
            raw.contains(&scene.pose) && den.contains(&scene.pose)
        );
    }
    Ok(())
}
