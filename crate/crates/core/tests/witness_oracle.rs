mod common;

use certipose::estimator::outward_direction;
use certipose::forward::{forward_enclose, HullConfig, PoseCandidateArtifacts};
use certipose::geometry::raster::{pixel_of, project_target};
use certipose::geometry::{builtin, BinaryImage, Pose, Target};
use certipose::harness::sample_scene;
use certipose::partition::PoseSpace;
use certipose::witness::{
    collect_witnesses, is_standalone, own_surroundings, tighten_boundary, triangle_filter,
    witness_polytope,
};
use common::{desk_camera, random_box, square_target};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Box centered on `pose` with the given half-widths in target units and
/// degrees.
fn box_around(pose: &Pose, t: f64, z: f64, deg: f64) -> certipose::forward::UncertainPose {
    let p = pose.to_array();
    let r = [
        t,
        t,
        z,
        deg.to_radians(),
        deg.to_radians(),
        deg.to_radians(),
    ];
    let iv = certipose::set::Interval::from_center_radius(&p, &r).unwrap();
    certipose::forward::UncertainPose::new(iv).unwrap()
}

struct Outcome {
    standalone: usize,
    boundary_kept: usize,
    triangle_kept: usize,
}

fn run(
    target: &Target,
    art: &PoseCandidateArtifacts,
    obs: &BinaryImage,
    truth: &Pose,
    mu: usize,
) -> Outcome {
    let cam = desk_camera();
    let polys = project_target(target, &cam, truth).unwrap();
    let mut out = Outcome {
        standalone: 0,
        boundary_kept: 0,
        triangle_kept: 0,
    };
    for (i, verts) in art.vertices.iter().enumerate() {
        let foreign = || {
            art.polygon_images
                .iter()
                .enumerate()
                .filter(move |(j, _)| *j != i)
                .map(|(_, x)| x)
        };
        for (k, v) in verts.iter().enumerate() {
            let siblings = verts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, o)| &o.bitmap);
            if !is_standalone(&v.bitmap, siblings.chain(foreign())) {
                continue;
            }
            let Some(q) = pixel_of(&cam, polys[i].vertices[k]) else {
                continue;
            };
            out.standalone += 1;
            let w = collect_witnesses(obs, &v.bitmap, i, k).unwrap();
            assert!(w.pixels.contains(&q), "true pixel is not a witness");
            let dir = outward_direction(&art.center_projection[i], k);
            let outside = own_surroundings(obs, &v.bitmap, foreign());
            let b = tighten_boundary(&w, dir, mu, &outside);
            out.boundary_kept += b.pixels.contains(&q) as usize;
            if mu == 0 {
                let t = triangle_filter(&b, [-dir[1], dir[0]], obs);
                out.triangle_kept += t.pixels.contains(&q) as usize;
                assert!(witness_polytope(&t).is_ok());
            }
        }
    }
    out
}

#[test]
fn boundary_rule_keeps_the_true_vertex_pixel() {
    let cam = desk_camera();
    let space = PoseSpace::desk();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut total = 0;
    for name in ["stripes", "digits", "letter"] {
        let target = builtin(name).unwrap();
        for mu in [0, 40] {
            for _ in 0..8 {
                let scene = sample_scene(&target, &cam, &space, mu, 2.0, &mut rng).unwrap();
                let u = box_around(&scene.pose, 0.3, 1.0, 0.5);
                let art = forward_enclose(&target, &u, &cam, &HullConfig::default()).unwrap();
                let o = run(&target, &art, &scene.observed, &scene.pose, mu);
                assert_eq!(o.boundary_kept, o.standalone, "{name} mu={mu}");
                total += o.standalone;
            }
        }
    }
    assert!(total > 100, "only {total} standalone vertices exercised");
}

#[test]
fn triangle_rule_keeps_the_true_pixel_on_a_single_polygon() {
    let cam = desk_camera();
    let target = square_target(20.0);
    let space = PoseSpace::desk();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut total = 0;
    for _ in 0..30 {
        let scene = sample_scene(&target, &cam, &space, 0, 2.0, &mut rng).unwrap();
        let u = box_around(&scene.pose, 0.3, 1.0, 0.5);
        let art = forward_enclose(&target, &u, &cam, &HullConfig::default()).unwrap();
        let o = run(&target, &art, &scene.observed, &scene.pose, 0);
        assert_eq!(o.triangle_kept, o.standalone);
        total += o.standalone;
    }
    assert!(total >= 100);
}

#[test]
fn overlapping_regions_are_not_standalone() {
    let cam = desk_camera();
    let target = builtin("digits").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    // A wide box blurs every vertex region into its neighbours.
    let u = random_box(&mut rng, &PoseSpace::desk(), 0.5);
    let art = forward_enclose(&target, &u, &cam, &HullConfig::default()).unwrap();
    let any_standalone = art.vertices.iter().enumerate().any(|(i, verts)| {
        verts.iter().enumerate().any(|(k, v)| {
            let others = verts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, o)| &o.bitmap)
                .chain(
                    art.polygon_images
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, x)| x),
                );
            is_standalone(&v.bitmap, others)
        })
    });
    assert!(!any_standalone);
}
