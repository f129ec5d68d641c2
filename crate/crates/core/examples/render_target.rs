//! Render a built-in target at a pose and write it as PBM.
//!
//! `cargo run --example render_target -- [target] [out.pbm]`

use certipose::geometry::{builtin, render_with_edges, CameraParams, Pose};

fn main() -> certipose::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "stripes".into());
    let target = builtin(&name)?;
    let cam = CameraParams::new(125.0, 100, 100)?;
    let pose = Pose::from_array([1.0, -0.5, 95.0, 0.04, -0.02, 0.06]);
    let (img, edges) = render_with_edges(&target, &cam, &pose)?;
    println!(
        "{name}: {} polygons, {} on-pixels, {} of them on an edge",
        target.polygons().len(),
        img.count_ones(),
        edges.count_ones()
    );
    for qy in (1..=cam.height).step_by(2) {
        let row: String = (1..=cam.width)
            .map(|qx| if img.get(qx, qy) { '#' } else { '.' })
            .collect();
        if row.contains('#') {
            println!("{row}");
        }
    }
    if let Some(out) = args.next() {
        img.save_pbm(std::path::Path::new(&out), true)?;
        println!("wrote {out}");
    }
    Ok(())
}
