//! Candidate count, estimate size and online time against image resolution.
//!
//! The focal length scales with the image so the field of view is fixed.
//!
//! `cargo run --release --example resolution_ablation`

use certipose::estimator::{estimate, EstimatorConfig};
use certipose::geometry::{builtin, CameraParams};
use certipose::harness::sample_scene;
use certipose::partition::{PartitionConfig, PoseSpace};
use certipose::store::precompute_store;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> certipose::Result<()> {
    let target = builtin("stripes")?;
    let space = PoseSpace::desk();
    println!(
        "res      candidates  offline_s  filter_s  refine_s  normVolFilter  normVolOurs  contained"
    );
    for side in [50usize, 100, 150] {
        let cam = CameraParams::new(1.25 * side as f64, side, side)?;
        let t0 = std::time::Instant::now();
        let store = precompute_store(&target, &cam, &space, &PartitionConfig::default())?;
        let offline = t0.elapsed().as_secs_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 10;
        let (mut tf, mut tr, mut vf, mut vo, mut ok) = (0.0, 0.0, 0.0, 0.0, 0);
        for _ in 0..n {
            let scene = sample_scene(&target, &cam, &space, 0, 1.0, &mut rng)?;
            let est = estimate(
                &scene.observed,
                &store,
                &cam,
                &target,
                &EstimatorConfig::default(),
            )?;
            tf += est.summary.time_filter_s;
            tr += est.summary.time_refine_s;
            vf += est.summary.norm_vol_filter;
            vo += est.summary.norm_vol_ours;
            ok += est.contains(&scene.pose) as usize;
        }
        let m = n as f64;
        println!(
            "{side}x{side:<4} {:>10}  {offline:>9.2}  {:>8.4}  {:>8.4}  {:>13.3e}  {:>11.3e}  {ok}/{n}",
            store.len(),
            tf / m,
            tr / m,
            vf / m,
            vo / m
        );
    }
    Ok(())
}
