mod common;

use certipose::forward::{forward_enclose, HullConfig};
use certipose::geometry::{builtin, convex_hull_points, project};
use certipose::partition::PoseSpace;
use certipose::preimage::{preimage_constraints, CONTAINS_TOL};
use common::{desk_camera, random_box};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every grid pose whose vertex projection lands in the polytope satisfies
/// the derived constraints.
#[test]
fn grid_poses_landing_in_polytope_satisfy_constraints() {
    let cam = desk_camera();
    let target = builtin("letter").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = [-1.0, 0.0, 1.0];
    let (mut landed, mut checked) = (0usize, 0usize);
    for _ in 0..20 {
        let frac = rng.gen_range(0.05..0.3);
        let u = random_box(&mut rng, &PoseSpace::desk(), frac);
        let art = forward_enclose(&target, &u, &cam, &HullConfig::default()).unwrap();
        let i = rng.gen_range(0..art.vertices.len());
        let k = rng.gen_range(0..art.vertices[i].len());
        let v = &art.vertices[i][k];
        let (lo, hi) = (v.hull.lo(), v.hull.hi());
        let pts: Vec<[f64; 2]> = (0..4)
            .map(|_| [rng.gen_range(lo[0]..=hi[0]), rng.gen_range(lo[1]..=hi[1])])
            .collect();
        let Ok(poly) = convex_hull_points(&pts) else {
            continue;
        };
        let c = preimage_constraints(v, &poly);
        let vertex = target.polygons()[i].vertices()[k];
        for idx in 0..3usize.pow(6) {
            let mut a = [0.0; 6];
            let mut r = idx;
            for x in &mut a {
                *x = grid[r % 3];
                r /= 3;
            }
            let (_, p) = project(&cam, &u.pose_at(&a), &[vertex]).unwrap();
            checked += 1;
            if poly.contains(p[0], 0.0) {
                landed += 1;
                assert!(
                    c.satisfied_by(&a, CONTAINS_TOL),
                    "alpha {a:?} lands in U but violates the constraints"
                );
            }
        }
    }
    assert!(
        landed > 0,
        "no grid pose landed in any polytope out of {checked}"
    );
}

#[test]
fn whole_enclosure_gives_no_cut() {
    let cam = desk_camera();
    let target = builtin("stripes").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random_box(&mut rng, &PoseSpace::desk(), 0.1);
    let art = forward_enclose(&target, &u, &cam, &HullConfig::default()).unwrap();
    let v = &art.vertices[0][0];
    let (lo, hi) = (v.hull.lo(), v.hull.hi());
    let big = convex_hull_points(&[
        [lo[0] - 1.0, lo[1] - 1.0],
        [hi[0] + 1.0, lo[1] - 1.0],
        [hi[0] + 1.0, hi[1] + 1.0],
        [lo[0] - 1.0, hi[1] + 1.0],
    ])
    .unwrap();
    let c = preimage_constraints(v, &big);
    for _ in 0..1000 {
        let a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        assert!(c.satisfied_by(&a, 0.0));
    }
}
