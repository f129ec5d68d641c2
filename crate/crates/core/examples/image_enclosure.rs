//! Outer image of a pose box, checked against concrete renders.
//!
//! `cargo run --release --example image_enclosure`

use certipose::forward::{forward_enclose, HullConfig, UncertainPose};
use certipose::geometry::{builtin, render, CameraParams};
use certipose::set::Interval;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> certipose::Result<()> {
    let target = builtin("letter")?;
    let cam = CameraParams::new(125.0, 100, 100)?;
    let d = 1.5f64.to_radians();
    let u = UncertainPose::new(Interval::new(
        vec![-0.5, -0.5, 93.0, -d, -d, -d],
        vec![0.5, 0.5, 97.0, d, d, d],
    )?)?;
    let art = forward_enclose(&target, &u, &cam, &HullConfig::default())?;
    println!(
        "outer image {} px, error ratio {:.3}, {} pixel tests",
        art.outer_image.count_ones(),
        art.error_ratio,
        art.pixel_tests
    );
    for (i, poly) in art.vertices.iter().enumerate() {
        let widths: Vec<String> = poly
            .iter()
            .map(|v| {
                format!(
                    "{:.1}x{:.1}",
                    2.0 * v.hull.radius()[0],
                    2.0 * v.hull.radius()[1]
                )
            })
            .collect();
        println!(
            "polygon {i}: {} hull faces, vertex boxes {}",
            art.hulls[i].len(),
            widths.join(" ")
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut covered = 0;
    let n = 200;
    for _ in 0..n {
        let a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let img = render(&target, &cam, &u.pose_at(&a))?;
        covered += img.is_subset_of(&art.outer_image) as usize;
    }
    println!("{covered}/{n} sampled renders inside the outer image");
    Ok(())
}
