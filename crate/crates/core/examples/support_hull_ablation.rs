//! Per-polygon hulls built from different support-direction sets.
//!
//! Reports the hull face count and how many pixels the hull touches for
//! each combination of direction heuristics.
//!
//! `cargo run --release --example support_hull_ablation -- [angle-degrees]`

use certipose::forward::{enclose_vertices, hull_enclose, HullConfig, UncertainPose};
use certipose::geometry::raster::pixel_square;
use certipose::geometry::{builtin, CameraParams, HPolytope2};
use certipose::set::Interval;

fn touched(h: &HPolytope2, cam: &CameraParams) -> usize {
    let mut n = 0;
    for qy in 1..=cam.height as i64 {
        for qx in 1..=cam.width as i64 {
            let (lo, hi) = pixel_square(qx, qy);
            n += h.overlaps_box_outer(lo, hi) as usize;
        }
    }
    n
}

fn main() -> certipose::Result<()> {
    let deg: f64 = std::env::args()
        .nth(1)
        .map_or(10.0, |s| s.parse().expect("degrees"));
    let target = builtin("letter")?;
    let cam = CameraParams::new(125.0, 100, 100)?;
    let d = deg.to_radians();
    let u = UncertainPose::new(Interval::new(
        vec![-0.5, -0.5, 94.0, -d, -d, -d],
        vec![0.5, 0.5, 96.0, d, d, d],
    )?)?;
    let sets = enclose_vertices(&target, &u, &cam)?;
    let configs = [
        (
            "edges",
            HullConfig {
                edge_normals: true,
                vertex_directions: false,
                refine: false,
            },
        ),
        (
            "vertices",
            HullConfig {
                edge_normals: false,
                vertex_directions: true,
                refine: false,
            },
        ),
        (
            "edges+vertices",
            HullConfig {
                edge_normals: true,
                vertex_directions: true,
                refine: false,
            },
        ),
        ("all+refine", HullConfig::default()),
    ];
    println!("angles +-{deg} deg");
    println!("{:<16} {:>6} {:>8}", "directions", "faces", "pixels");
    for (name, cfg) in configs {
        let mut faces = 0;
        let mut pixels = 0;
        for poly in &sets {
            let h = hull_enclose(poly, &cfg)?;
            faces += h.len();
            pixels += touched(&h, &cam);
        }
        println!("{name:<16} {faces:>6} {pixels:>8}");
    }
    Ok(())
}
