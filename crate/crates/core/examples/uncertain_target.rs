//! Uncertain target geometry through the reference-point parametrization.
//!
//! A planar square whose corners are only known to within +-0.3 units is
//! projected through a pose box; the corner regions grow accordingly.
//!
//! `cargo run --release --example uncertain_target`

use certipose::forward::{enclose_rotation, UncertainPose, POSE_IDS};
use certipose::geometry::refpoint::uncertain_vertex;
use certipose::geometry::{project, refpoint_reconstruct, CameraParams, Pose};
use certipose::nonlin::{enclose_elementwise, ElementaryFn};
use certipose::set::{FactorIds, Interval, MatPolyZonotope, PolyZonotope};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> certipose::Result<()> {
    let cam = CameraParams::new(125.0, 100, 100)?;
    let d = 1f64.to_radians();
    let u = UncertainPose::new(Interval::new(
        vec![-0.3, -0.3, 94.0, -d, -d, -d],
        vec![0.3, 0.3, 96.0, d, d, d],
    )?)?;
    let refs = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
    let corners = [
        [-8.0, -8.0, 0.0],
        [8.0, -8.0, 0.0],
        [8.0, 8.0, 0.0],
        [-8.0, 8.0, 0.0],
    ];
    let slack = [0.3, 0.3, 0.0];

    let rot = enclose_rotation(&u)?;
    let k = MatPolyZonotope::singleton(
        3,
        3,
        cam.intrinsic_matrix().iter().flatten().copied().collect(),
    )?;
    let t = u.set().index(&[0, 1, 2])?;
    let mut fresh = FactorIds::starting_after(POSE_IDS[5]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for c in corners {
        let lambda = refpoint_reconstruct(&refs, &c)?;
        let v = uncertain_vertex(&refs, &lambda, &slack, &fresh.fresh_n(3))?;
        let ccf = k.mat_mul(&rot.mat_mul(v.as_matrix())?.mink_sum(t.as_matrix())?)?;
        let depth = PolyZonotope::try_from(ccf.index(&[2], &[0])?)?;
        let inv = enclose_elementwise(ElementaryFn::Recip, &depth)?;
        let pix = PolyZonotope::try_from(ccf.index(&[0, 1], &[0])?.mat_mul(inv.as_matrix())?)?;
        let hull = pix.interval_hull();

        let mut inside = 0;
        for _ in 0..500 {
            let a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
            let p: Pose = u.pose_at(&a);
            let moved = [
                c[0] + rng.gen_range(-slack[0]..=slack[0]),
                c[1] + rng.gen_range(-slack[1]..=slack[1]),
                0.0,
            ];
            let (_, q) = project(&cam, &p, &[moved])?;
            inside += hull.contains(&q[0], 1e-9) as usize;
        }
        println!(
            "corner {:?}: box {:.1}x{:.1} px, {inside}/500 perturbed projections inside",
            [c[0], c[1]],
            2.0 * hull.radius()[0],
            2.0 * hull.radius()[1]
        );
    }
    Ok(())
}
