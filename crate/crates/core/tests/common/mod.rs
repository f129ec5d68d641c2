#![allow(dead_code)]

use certipose::forward::UncertainPose;
use certipose::geometry::{CameraParams, ConvexPolygon3, Target};
use certipose::partition::PoseSpace;
use certipose::set::{FactorId, Interval, MatPolyZonotope};
use rand::Rng;

pub fn desk_camera() -> CameraParams {
    CameraParams::new(125.0, 100, 100).unwrap()
}

/// Random matrix polynomial zonotope over a subset of factor ids 1..=4.
pub fn random_mat_pz<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    indep: bool,
) -> MatPolyZonotope {
    let n = rows * cols;
    let mask = rng.gen_range(1u32..16);
    let ids: Vec<FactorId> = (1..=4)
        .filter(|i| mask & (1 << (i - 1)) != 0)
        .map(FactorId)
        .collect();
    let p = ids.len();
    let h = rng.gen_range(0..=6);
    let q = if indep { rng.gen_range(0..=2) } else { 0 };
    let val = |rng: &mut R| rng.gen_range(-2.0..2.0);
    let offset = (0..n).map(|_| val(rng)).collect();
    let dep = (0..h * n).map(|_| val(rng)).collect();
    let ind = (0..q * n).map(|_| val(rng)).collect();
    let exp = (0..h * p).map(|_| rng.gen_range(0..=2)).collect();
    MatPolyZonotope::new(rows, cols, offset, dep, ind, exp, ids).unwrap()
}

/// A box around a random pose of `space`, `frac` of its width per dimension.
pub fn random_box<R: Rng>(rng: &mut R, space: &PoseSpace, frac: f64) -> UncertainPose {
    let (lo, hi) = (space.bounds().lo(), space.bounds().hi());
    let mut blo = Vec::with_capacity(6);
    let mut bhi = Vec::with_capacity(6);
    for d in 0..6 {
        let w = (hi[d] - lo[d]) * frac;
        let a = rng.gen_range(lo[d]..=hi[d] - w);
        blo.push(a);
        bhi.push(a + w);
    }
    UncertainPose::new(Interval::new(blo, bhi).unwrap()).unwrap()
}

/// One square of side `s` in the target plane.
pub fn square_target(s: f64) -> Target {
    let h = s / 2.0;
    let sq = ConvexPolygon3::new(
        vec![[-h, -h, 0.0], [h, -h, 0.0], [h, h, 0.0], [-h, h, 0.0]],
        None,
    )
    .unwrap();
    Target::new("square", vec![sq]).unwrap()
}
