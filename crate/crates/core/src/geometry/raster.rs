//! Concrete rendering: a pixel is on iff some polygon overlaps the interior
//! of its square `[qx - 1/2, qx + 1/2] x [qy - 1/2, qy + 1/2]`.

use super::camera::{project, CameraParams, Pose};
use super::image::BinaryImage;
use super::polytope::{ConvexPolygon2, Point2};
use super::target::Target;
use crate::error::Result;

pub fn pixel_square(qx: i64, qy: i64) -> (Point2, Point2) {
    let (x, y) = (qx as f64, qy as f64);
    ([x - 0.5, y - 0.5], [x + 0.5, y + 0.5])
}

/// Pixel whose square contains `p` (ties go to the larger index), or
/// `None` outside the image.
pub fn pixel_of(cam: &CameraParams, p: Point2) -> Option<(usize, usize)> {
    let qx = (p[0] + 0.5).floor() as i64;
    let qy = (p[1] + 0.5).floor() as i64;
    let inside = qx >= 1 && qy >= 1 && qx <= cam.width as i64 && qy <= cam.height as i64;
    inside.then_some((qx as usize, qy as usize))
}

/// Inclusive 1-based pixel range whose squares meet `[lo, hi]`, clipped to
/// the image; `None` if empty.
pub fn pixel_range(
    cam: &CameraParams,
    lo: Point2,
    hi: Point2,
) -> Option<((usize, usize), (usize, usize))> {
    let x0 = ((lo[0] - 0.5).ceil() as i64).max(1);
    let y0 = ((lo[1] - 0.5).ceil() as i64).max(1);
    let x1 = ((hi[0] + 0.5).floor() as i64).min(cam.width as i64);
    let y1 = ((hi[1] + 0.5).floor() as i64).min(cam.height as i64);
    (x0 <= x1 && y0 <= y1).then_some(((x0 as usize, y0 as usize), (x1 as usize, y1 as usize)))
}

fn for_each_candidate_pixel(
    cam: &CameraParams,
    shape: &ConvexPolygon2,
    mut f: impl FnMut(usize, usize),
) {
    let (lo, hi) = shape.bbox();
    if !(lo[0].is_finite() && lo[1].is_finite() && hi[0].is_finite() && hi[1].is_finite()) {
        return;
    }
    if let Some(((x0, y0), (x1, y1))) = pixel_range(cam, lo, hi) {
        for qy in y0..=y1 {
            for qx in x0..=x1 {
                f(qx, qy);
            }
        }
    }
}

/// Renders projected convex polygons, OR-combined.
pub fn rasterize(polys: &[ConvexPolygon2], cam: &CameraParams) -> BinaryImage {
    let mut img = BinaryImage::new(cam.width, cam.height);
    for poly in polys {
        for_each_candidate_pixel(cam, poly, |qx, qy| {
            let (lo, hi) = pixel_square(qx as i64, qy as i64);
            if poly.overlaps_box_interior(lo, hi) {
                img.set(qx, qy, true);
            }
        });
    }
    img
}

/// Exact overlap of a convex polygon with the interior of one pixel.
pub fn polygon_pixel_intersect(poly: &ConvexPolygon2, qx: i64, qy: i64) -> bool {
    let (lo, hi) = pixel_square(qx, qy);
    poly.overlaps_box_interior(lo, hi)
}

/// Pixels crossed by a polygon edge (the reliably detected target edges).
pub fn edge_pixels(polys: &[ConvexPolygon2], cam: &CameraParams) -> BinaryImage {
    let mut img = BinaryImage::new(cam.width, cam.height);
    for poly in polys {
        let k = poly.vertices.len();
        for i in 0..k {
            let seg = ConvexPolygon2::new(vec![poly.vertices[i], poly.vertices[(i + 1) % k]]);
            for_each_candidate_pixel(cam, &seg, |qx, qy| {
                if polygon_pixel_intersect(&seg, qx as i64, qy as i64) {
                    img.set(qx, qy, true);
                }
            });
        }
    }
    img
}

/// Projects every polygon of `target` into the pixel frame.
pub fn project_target(
    target: &Target,
    cam: &CameraParams,
    pose: &Pose,
) -> Result<Vec<ConvexPolygon2>> {
    target
        .polygons()
        .iter()
        .map(|p| Ok(ConvexPolygon2::new(project(cam, pose, p.vertices())?.1)))
        .collect()
}

/// Concrete image of `target` seen from `pose`.
pub fn render(target: &Target, cam: &CameraParams, pose: &Pose) -> Result<BinaryImage> {
    Ok(rasterize(&project_target(target, cam, pose)?, cam))
}

/// Concrete image plus its edge pixels.
pub fn render_with_edges(
    target: &Target,
    cam: &CameraParams,
    pose: &Pose,
) -> Result<(BinaryImage, BinaryImage)> {
    let polys = project_target(target, cam, pose)?;
    Ok((rasterize(&polys, cam), edge_pixels(&polys, cam)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cam() -> CameraParams {
        CameraParams::new(100.0, 20, 20).unwrap()
    }

    #[test]
    fn polygon_outside_is_blank() {
        let p = ConvexPolygon2::new(vec![[-10.0, -10.0], [-5.0, -10.0], [-5.0, -5.0]]);
        assert!(rasterize(&[p], &cam()).is_blank());
    }

    #[test]
    fn aligned_square_covers_nine_pixels() {
        let p = ConvexPolygon2::from_box([2.5, 2.5], [5.5, 5.5]);
        let img = rasterize(&[p], &cam());
        assert_eq!(img.count_ones(), 9);
        for (qx, qy) in img.on_pixels() {
            assert!((3..=5).contains(&qx) && (3..=5).contains(&qy));
        }
    }

    #[test]
    fn point_pixel_tests() {
        let p = ConvexPolygon2::new(vec![[4.2, 6.9]]);
        assert!(polygon_pixel_intersect(&p, 4, 7));
        assert!(!polygon_pixel_intersect(&p, 5, 7));
    }

    #[test]
    fn pixel_lookup() {
        assert_eq!(pixel_of(&cam(), [1.0, 1.0]), Some((1, 1)));
        assert_eq!(pixel_of(&cam(), [0.6, 20.4]), Some((1, 20)));
        assert_eq!(pixel_of(&cam(), [0.4, 3.0]), None);
        assert_eq!(
            pixel_range(&cam(), [2.5, 2.5], [5.5, 5.5]),
            Some(((2, 2), (6, 6)))
        );
    }

    /// Supersampled point-in-polygon coverage of one pixel.
    fn supersampled(tri: &[Point2; 3], qx: usize, qy: usize) -> bool {
        let inside = |p: Point2| {
            let s = |a: Point2, b: Point2| {
                (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            };
            let d = [s(tri[0], tri[1]), s(tri[1], tri[2]), s(tri[2], tri[0])];
            d.iter().all(|&x| x >= 0.0) || d.iter().all(|&x| x <= 0.0)
        };
        (0..33).any(|i| {
            (0..33).any(|j| {
                inside([
                    qx as f64 - 0.5 + (i as f64 + 0.5) / 33.0,
                    qy as f64 - 0.5 + (j as f64 + 0.5) / 33.0,
                ])
            })
        })
    }

    #[test]
    fn random_triangles_match_supersampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let tri: [Point2; 3] =
                std::array::from_fn(|_| [rng.gen_range(-2.0..22.0), rng.gen_range(-2.0..22.0)]);
            let img = rasterize(&[ConvexPolygon2::new(tri.to_vec())], &cam());
            for qy in 1..=20 {
                for qx in 1..=20 {
                    // Supersampling can only miss thin slivers, never invent coverage.
                    if supersampled(&tri, qx, qy) {
                        assert!(img.get(qx, qy), "{tri:?} at ({qx},{qy})");
                    }
                }
            }
        }
    }

    #[test]
    fn enlarging_never_turns_pixels_off() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let c = [rng.gen_range(2.0..18.0), rng.gen_range(2.0..18.0)];
            let tri: Vec<Point2> = (0..3)
                .map(|k| {
                    let a = k as f64 * 2.1 + rng.gen_range(0.0..0.5);
                    [c[0] + 3.0 * a.cos(), c[1] + 3.0 * a.sin()]
                })
                .collect();
            let big: Vec<Point2> = tri
                .iter()
                .map(|p| [c[0] + 1.3 * (p[0] - c[0]), c[1] + 1.3 * (p[1] - c[1])])
                .collect();
            let small = rasterize(&[ConvexPolygon2::new(tri)], &cam());
            let large = rasterize(&[ConvexPolygon2::new(big)], &cam());
            assert!(small.is_subset_of(&large));
        }
    }

    #[test]
    fn edges_are_on_pixels() {
        let p = ConvexPolygon2::new(vec![[3.3, 2.2], [15.1, 4.0], [9.0, 17.7]]);
        let img = rasterize(std::slice::from_ref(&p), &cam());
        let edges = edge_pixels(&[p], &cam());
        assert!(edges.is_subset_of(&img));
        assert!(edges.count_ones() < img.count_ones());
    }
}
