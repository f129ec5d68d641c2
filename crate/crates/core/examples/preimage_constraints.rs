//! From one observed image to linear constraints on a pose box.
//!
//! `cargo run --release --example preimage_constraints`

use certipose::forward::{forward_enclose, HullConfig, UncertainPose};
use certipose::geometry::{builtin, render, CameraParams, Pose};
use certipose::preimage::{preimage_constraints, stack, ConstrainedPoseSet, Propagation};
use certipose::set::Interval;
use certipose::witness::{collect_witnesses, witness_polytope};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> certipose::Result<()> {
    let target = builtin("stripes")?;
    let cam = CameraParams::new(125.0, 100, 100)?;
    let d = 2f64.to_radians();
    let u = UncertainPose::new(Interval::new(
        vec![-1.0, -1.0, 90.0, -d, -d, -d],
        vec![1.0, 1.0, 100.0, d, d, d],
    )?)?;
    let art = forward_enclose(&target, &u, &cam, &HullConfig::default())?;
    let truth = Pose::from_array([0.3, -0.6, 96.0, 0.01, -0.02, 0.015]);
    let obs = render(&target, &cam, &truth)?;

    let mut blocks = Vec::new();
    for (i, poly) in art.vertices.iter().enumerate() {
        for (k, v) in poly.iter().enumerate() {
            let w = collect_witnesses(&obs, &v.bitmap, i, k)?;
            let poly2 = witness_polytope(&w)?;
            let c = preimage_constraints(v, &poly2);
            println!(
                "vertex ({i},{k}): region {} px, {} witnesses, {} constraints",
                v.bitmap.count_ones(),
                w.len(),
                c.len()
            );
            blocks.push(c);
        }
    }
    let set = ConstrainedPoseSet::new(u.clone(), stack(&blocks));
    println!(
        "true pose satisfies all {} constraints: {}",
        set.constraints.len(),
        set.contains(&truth)
    );
    match set.propagate() {
        Propagation::Box { lo, hi } => {
            let shrink: Vec<String> = lo
                .iter()
                .zip(&hi)
                .map(|(l, h)| format!("{:.2}", (h - l) / 2.0))
                .collect();
            println!("propagated latent box widths / 2: [{}]", shrink.join(", "));
        }
        Propagation::Empty => println!("constraints are infeasible"),
    }
    let (vol, err) = set.volume_estimate(20_000, &mut ChaCha8Rng::seed_from_u64(0));
    println!(
        "volume {:.3e} +- {:.1e} of box volume {:.3e} ({:.2}%)",
        vol,
        err,
        u.volume(),
        100.0 * vol / u.volume()
    );
    Ok(())
}
