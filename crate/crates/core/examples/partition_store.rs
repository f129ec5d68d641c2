//! Partition a pose space, save the store, load it back and compare.
//!
//! `cargo run --release --example partition_store -- [target] [epsilon]`

use certipose::geometry::{builtin, CameraParams};
use certipose::partition::{partition, sensitivity_scores, PartitionConfig, PoseSpace};
use certipose::store::{precompute_store, CandidateStore};

fn main() -> certipose::Result<()> {
    let mut args = std::env::args().skip(1);
    let target = builtin(&args.next().unwrap_or_else(|| "sign".into()))?;
    let epsilon: f64 = args.next().map_or(0.05, |s| s.parse().expect("epsilon"));
    let cam = CameraParams::new(125.0, 100, 100)?;
    let space = PoseSpace::desk();
    let cfg = PartitionConfig {
        epsilon,
        ..Default::default()
    };

    let root =
        certipose::forward::forward_enclose(&target, &space.as_candidate(), &cam, &cfg.hull)?;
    let scores = sensitivity_scores(&target, &cam, &root)?;
    println!("root error ratio {:.3}", root.error_ratio);
    println!("split scores x y z rx ry rz: {:.3?}", scores);

    let part = partition(&target, &cam, &space, &cfg)?;
    let mut by_depth = std::collections::BTreeMap::new();
    for l in &part.leaves {
        *by_depth.entry(l.depth).or_insert(0) += 1;
    }
    println!("{} leaves by depth {:?}", part.leaves.len(), by_depth);
    let worst = part
        .leaves
        .iter()
        .map(|l| l.artifacts.error_ratio)
        .fold(0.0, f64::max);
    println!("largest leaf error ratio {worst:.4} (threshold {epsilon})");

    let store = precompute_store(&target, &cam, &space, &cfg)?;
    let dir = std::env::temp_dir().join(format!("certipose-example-{}", std::process::id()));
    store.save(&dir)?;
    let bytes: u64 = std::fs::read_dir(dir.join("candidates"))?
        .map(|e| e.map(|e| e.metadata().map(|m| m.len()).unwrap_or(0)))
        .sum::<std::io::Result<u64>>()?;
    let loaded = CandidateStore::load(&dir)?;
    println!(
        "saved {} blobs ({:.1} MiB) to {}; reload identical: {}",
        loaded.len(),
        bytes as f64 / (1 << 20) as f64,
        dir.display(),
        loaded == store
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
