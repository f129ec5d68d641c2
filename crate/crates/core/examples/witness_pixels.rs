//! Witness pixels of each vertex, with and without tightening.
//!
//! `cargo run --release --example witness_pixels`

use certipose::estimator::outward_direction;
use certipose::forward::{forward_enclose, HullConfig, UncertainPose};
use certipose::geometry::raster::{pixel_of, project_target};
use certipose::geometry::{builtin, render, CameraParams, Pose};
use certipose::set::Interval;
use certipose::witness::{
    collect_witnesses, is_standalone, own_surroundings, tighten_boundary, triangle_filter,
    witness_polytope,
};

fn main() -> certipose::Result<()> {
    let target = builtin("stripes")?;
    let cam = CameraParams::new(125.0, 100, 100)?;
    let d = 0.5f64.to_radians();
    let u = UncertainPose::new(Interval::new(
        vec![-0.2, -0.2, 94.0, -d, -d, -d],
        vec![0.2, 0.2, 96.0, d, d, d],
    )?)?;
    let art = forward_enclose(&target, &u, &cam, &HullConfig::default())?;
    let truth = Pose::from_array([0.05, -0.1, 95.3, 0.002, -0.004, 0.003]);
    let obs = render(&target, &cam, &truth)?;
    let projected = project_target(&target, &cam, &truth)?;

    println!("vertex  standalone  witnesses  boundary  triangle  true-pixel-kept  hull-faces");
    for (i, poly) in art.vertices.iter().enumerate() {
        for (k, v) in poly.iter().enumerate() {
            let w = collect_witnesses(&obs, &v.bitmap, i, k)?;
            let others: Vec<_> = poly
                .iter()
                .enumerate()
                .filter(|(kk, _)| *kk != k)
                .map(|(_, o)| &o.bitmap)
                .chain(
                    art.polygon_images
                        .iter()
                        .enumerate()
                        .filter(|(ii, _)| *ii != i)
                        .map(|(_, x)| x),
                )
                .collect();
            let standalone = is_standalone(&v.bitmap, others.iter().copied());
            let dir = outward_direction(&art.center_projection[i], k);
            let outside = own_surroundings(
                &obs,
                &v.bitmap,
                art.polygon_images
                    .iter()
                    .enumerate()
                    .filter(|(ii, _)| *ii != i)
                    .map(|(_, x)| x),
            );
            let b = tighten_boundary(&w, dir, 0, &outside);
            let t = triangle_filter(&b, [-dir[1], dir[0]], &obs);
            let q = pixel_of(&cam, projected[i].vertices[k]);
            let kept = q.is_some_and(|q| t.pixels.contains(&q));
            println!(
                "({i},{k})   {:<10}  {:>9}  {:>8}  {:>8}  {:<15}  {} -> {}",
                standalone,
                w.len(),
                b.len(),
                t.len(),
                kept,
                witness_polytope(&w)?.len(),
                witness_polytope(&t)?.len()
            );
        }
    }
    Ok(())
}
