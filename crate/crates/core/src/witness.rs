//! Witness pixels: observed on-pixels that must contain a projected target
//! vertex, and their tightening for standalone vertices.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::polytope::{convex_hull_points, ConvexPolygon2, HPolytope2, Point2};
use crate::geometry::raster::pixel_square;
use crate::geometry::BinaryImage;

pub type Pixel = (usize, usize);

/// How far witness sets of standalone vertices are tightened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Tightening {
    /// Every observed on-pixel in the vertex region.
    None,
    /// The noise-aware boundary rule.
    #[default]
    Boundary,
    /// Boundary rule followed by the triangle test (noise-free images only).
    BoundaryTriangle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSet {
    pub pixels: Vec<Pixel>,
    pub tightened: Tightening,
}

impl WitnessSet {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// Observed on-pixels inside the vertex region.
pub fn collect_witnesses(
    obs: &BinaryImage,
    region: &BinaryImage,
    polygon: usize,
    vertex: usize,
) -> Result<WitnessSet> {
    let pixels = obs.and(region).on_pixels();
    if pixels.is_empty() {
        return Err(Error::EmptyWitness { polygon, vertex });
    }
    Ok(WitnessSet {
        pixels,
        tightened: Tightening::None,
    })
}

/// A region is standalone if it meets none of the other regions.
pub fn is_standalone<'a>(
    region: &BinaryImage,
    others: impl IntoIterator<Item = &'a BinaryImage>,
) -> bool {
    others.into_iter().all(|o| !region.intersects(o))
}

fn center(p: Pixel) -> Point2 {
    [p.0 as f64, p.1 as f64]
}

fn project(p: Pixel, dir: Point2) -> f64 {
    p.0 as f64 * dir[0] + p.1 as f64 * dir[1]
}

fn square(p: Pixel) -> ConvexPolygon2 {
    let (lo, hi) = pixel_square(p.0 as i64, p.1 as i64);
    ConvexPolygon2::from_box(lo, hi)
}

/// Keeps the `mu` pixels farthest along `outward` and, of the rest, those
/// with an 8-neighbor absent from the rest. Pixels in `outside` (which must
/// not meet the region) count as present too; pass a blank image to judge
/// the rest on its own.
pub fn tighten_boundary(
    w: &WitnessSet,
    outward: Point2,
    mu: usize,
    outside: &BinaryImage,
) -> WitnessSet {
    if mu >= w.len() {
        return WitnessSet {
            pixels: w.pixels.clone(),
            tightened: Tightening::Boundary,
        };
    }
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| {
        project(w.pixels[b], outward)
            .total_cmp(&project(w.pixels[a], outward))
            .then(w.pixels[a].cmp(&w.pixels[b]))
    });
    let mut keep = vec![false; w.len()];
    for &i in &order[..mu] {
        keep[i] = true;
    }
    let rest: HashSet<Pixel> = order[mu..].iter().map(|&i| w.pixels[i]).collect();
    let present = |x: i64, y: i64| {
        x >= 1 && y >= 1 && (rest.contains(&(x as usize, y as usize)) || outside.get_signed(x, y))
    };
    for &i in &order[mu..] {
        let (x, y) = (w.pixels[i].0 as i64, w.pixels[i].1 as i64);
        let on_boundary = (-1..=1i64)
            .any(|dy| (-1..=1i64).any(|dx| (dx, dy) != (0, 0) && !present(x + dx, y + dy)));
        if on_boundary {
            keep[i] = true;
        }
    }
    WitnessSet {
        pixels: w
            .pixels
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(p, _)| *p)
            .collect(),
        tightened: Tightening::Boundary,
    }
}

/// On-pixels of `obs` next to a region that only the region's own polygon
/// can explain: outside the region and outside every image in `foreign`.
pub fn own_surroundings<'a>(
    obs: &BinaryImage,
    region: &BinaryImage,
    foreign: impl IntoIterator<Item = &'a BinaryImage>,
) -> BinaryImage {
    let mut out = obs.and_not(region);
    for f in foreign {
        out = out.and_not(f);
    }
    out
}

/// Geometric filter for noise-free images: `q` survives only if the hull of
/// the squares of `q` and the left- and right-most witnesses (along
/// `tangent`) meets every other witness square. A witness with exactly one
/// on 8-neighbor in `obs` is a tip and replaces the whole set.
pub fn triangle_filter(w: &WitnessSet, tangent: Point2, obs: &BinaryImage) -> WitnessSet {
    let tips: Vec<Pixel> = w
        .pixels
        .iter()
        .copied()
        .filter(|&(x, y)| obs.on_neighbors(x, y) == 1)
        .collect();
    if !tips.is_empty() {
        return WitnessSet {
            pixels: tips,
            tightened: Tightening::BoundaryTriangle,
        };
    }
    if w.len() <= 2 {
        return WitnessSet {
            pixels: w.pixels.clone(),
            tightened: Tightening::BoundaryTriangle,
        };
    }
    let extreme = |sign: f64| {
        *w.pixels
            .iter()
            .min_by(|a, b| {
                (sign * project(**a, tangent))
                    .total_cmp(&(sign * project(**b, tangent)))
                    .then(a.cmp(b))
            })
            .expect("nonempty")
    };
    let (left, right) = (extreme(1.0), extreme(-1.0));
    let squares: Vec<ConvexPolygon2> = w.pixels.iter().map(|&p| square(p)).collect();
    let (sl, sr) = (square(left), square(right));
    let pixels = w
        .pixels
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let tri = ConvexPolygon2::hull_of(&[&squares[i], &sl, &sr]);
            squares
                .iter()
                .enumerate()
                .all(|(j, s)| j == i || tri.intersects(s))
        })
        .map(|(_, p)| *p)
        .collect::<Vec<_>>();
    WitnessSet {
        pixels,
        tightened: Tightening::BoundaryTriangle,
    }
}

/// Convex hull of the witness pixel squares.
pub fn witness_polytope(w: &WitnessSet) -> Result<HPolytope2> {
    if w.is_empty() {
        return Err(Error::InvalidPolygon("empty witness set".into()));
    }
    let corners: Vec<Point2> = w
        .pixels
        .iter()
        .flat_map(|&p| {
            let c = center(p);
            [
                [c[0] - 0.5, c[1] - 0.5],
                [c[0] + 0.5, c[1] - 0.5],
                [c[0] + 0.5, c[1] + 0.5],
                [c[0] - 0.5, c[1] + 0.5],
            ]
        })
        .collect();
    convex_hull_points(&corners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(pixels: Vec<Pixel>) -> WitnessSet {
        WitnessSet {
            pixels,
            tightened: Tightening::None,
        }
    }

    #[test]
    fn collect_is_intersection() {
        let mut obs = BinaryImage::new(10, 10);
        obs.fill_rect(2, 2, 4, 4);
        let mut region = BinaryImage::new(10, 10);
        region.fill_rect(4, 4, 6, 6);
        assert_eq!(
            collect_witnesses(&obs, &region, 0, 0).unwrap().pixels,
            vec![(4, 4)]
        );
        let far = {
            let mut r = BinaryImage::new(10, 10);
            r.fill_rect(8, 8, 9, 9);
            r
        };
        assert!(matches!(
            collect_witnesses(&obs, &far, 1, 2),
            Err(Error::EmptyWitness {
                polygon: 1,
                vertex: 2
            })
        ));
        let full = BinaryImage::filled(10, 10);
        assert_eq!(collect_witnesses(&full, &region, 0, 0).unwrap().len(), 9);
    }

    #[test]
    fn standalone_matches_pairwise_intersection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let imgs: Vec<BinaryImage> = (0..4)
                .map(|_| BinaryImage::from_fn(12, 12, |_, _| rng.gen_bool(0.03)))
                .collect();
            let direct = imgs[1..].iter().all(|o| imgs[0].and(o).is_blank());
            assert_eq!(is_standalone(&imgs[0], &imgs[1..]), direct);
        }
        let a = BinaryImage::filled(3, 3);
        assert!(!is_standalone(&a, [&a]));
    }

    #[test]
    fn boundary_of_filled_block() {
        let mut px = Vec::new();
        for y in 3..=7 {
            for x in 3..=7 {
                px.push((x, y));
            }
        }
        let w = set(px);
        let blank = BinaryImage::new(10, 10);
        let t = tighten_boundary(&w, [1.0, 0.0], 0, &blank);
        assert_eq!(t.len(), 16);
        assert!(!t.pixels.contains(&(5, 5)));
        assert_eq!(
            tighten_boundary(&w, [1.0, 0.0], 25, &blank).pixels,
            w.pixels
        );
        // The farthest pixels along +x survive regardless of neighbors.
        let t = tighten_boundary(&w, [1.0, 0.0], 5, &blank);
        for y in 3..=7 {
            assert!(t.pixels.contains(&(7, y)));
        }
    }

    #[test]
    fn single_file_run_keeps_endpoints() {
        let w = set((2..=8).map(|x| (x, 5)).collect());
        let obs = BinaryImage::from_fn(10, 10, |x, y| y == 5 && (2..=8).contains(&x));
        let t = triangle_filter(&w, [1.0, 0.0], &obs);
        assert!(t.pixels.contains(&(2, 5)) && t.pixels.contains(&(8, 5)));
        let hull = witness_polytope(&t).unwrap();
        for x in 2..=8 {
            assert!(hull.contains([x as f64, 5.0], 1e-9));
        }
    }

    #[test]
    fn tip_pixel_is_the_only_witness() {
        let obs = BinaryImage::from_fn(10, 10, |x, y| {
            (x, y) == (5, 2) || (x, y) == (5, 3) || (y == 4 && (4..=6).contains(&x))
        });
        let w = set(vec![(5, 2), (5, 3), (4, 4), (5, 4), (6, 4)]);
        assert_eq!(triangle_filter(&w, [1.0, 0.0], &obs).pixels, vec![(5, 2)]);
    }

    #[test]
    fn witness_polytope_shapes() {
        let h = witness_polytope(&set(vec![(5, 7)])).unwrap();
        assert!(h.contains([4.5, 6.5], 1e-12) && h.contains([5.5, 7.5], 1e-12));
        assert!(!h.contains([5.6, 7.0], 1e-9));
        let h = witness_polytope(&set(vec![(5, 7), (6, 7)])).unwrap();
        assert!(h.contains([6.5, 7.5], 1e-12));
        assert!(!h.contains([6.5, 7.6], 1e-9));
        assert!(witness_polytope(&set(vec![])).is_err());
    }

    #[test]
    fn smaller_witness_sets_give_smaller_polytopes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let px: Vec<Pixel> = (0..rng.gen_range(2..15))
                .map(|_| (rng.gen_range(1..20), rng.gen_range(1..20)))
                .collect();
            let big = witness_polytope(&set(px.clone())).unwrap();
            let small = set(px[..px.len() / 2 + 1].to_vec());
            let small_h = witness_polytope(&small).unwrap();
            for &(x, y) in &small.pixels {
                for c in [[-0.5, -0.5], [0.5, 0.5], [-0.5, 0.5], [0.5, -0.5]] {
                    let p = [x as f64 + c[0], y as f64 + c[1]];
                    assert!(small_h.contains(p, 1e-9) && big.contains(p, 1e-9));
                }
            }
        }
    }
}
