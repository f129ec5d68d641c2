//! 2-D convex primitives: H-polytopes, convex hulls and exact
//! convex-vs-convex intersection tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

/// Slab half-width used to keep degenerate hulls bounded and nonempty.
pub const DEGENERATE_INFLATION: f64 = 1e-9;

/// `{ x | A x <= b }` with `A` stored row-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPolytope2 {
    a: Vec<Point2>,
    b: Vec<f64>,
}

impl HPolytope2 {
    pub fn new(a: Vec<Point2>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        if a.iter().any(|r| r[0] == 0.0 && r[1] == 0.0) {
            return Err(Error::InvalidPolygon("zero halfspace normal".into()));
        }
        if a.iter().flatten().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite halfspace".into()));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &[Point2] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.a
            .iter()
            .zip(&self.b)
            .all(|(a, b)| a[0] * p[0] + a[1] * p[1] <= b + tol)
    }

    /// Conservative overlap test against `[lo, hi]`: false only when one
    /// halfspace excludes the whole box. May report true for boxes that
    /// miss the polytope near a corner.
    pub fn overlaps_box_outer(&self, lo: Point2, hi: Point2) -> bool {
        self.a.iter().zip(&self.b).all(|(a, &b)| {
            let mx = if a[0] >= 0.0 {
                a[0] * lo[0]
            } else {
                a[0] * hi[0]
            };
            let my = if a[1] >= 0.0 {
                a[1] * lo[1]
            } else {
                a[1] * hi[1]
            };
            mx + my <= b
        })
    }
}

/// Free-function form of [`HPolytope2::overlaps_box_outer`].
pub fn polytope_box_overlap_outer(p: &HPolytope2, lo: Point2, hi: Point2) -> bool {
    p.overlaps_box_outer(lo, hi)
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull vertices without collinear points (monotone
/// chain). Returns 1 or 2 points for degenerate input.
pub fn convex_hull_vertices(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        // All points collinear: keep the two extremes.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// H-representation of a convex polygon given by its CCW vertices; one or
/// two vertices give a thin bounded slab.
pub fn hpolytope_from_ccw(vertices: &[Point2]) -> Result<HPolytope2> {
    match vertices.len() {
        0 => Err(Error::InvalidPolygon("no points".into())),
        1 => {
            let p = vertices[0];
            let e = DEGENERATE_INFLATION;
            HPolytope2::new(
                vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
                vec![p[0] + e, -p[0] + e, p[1] + e, -p[1] + e],
            )
        }
        2 => {
            let (p, q) = (vertices[0], vertices[1]);
            let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
            let t = [(q[0] - p[0]) / len, (q[1] - p[1]) / len];
            let n = [t[1], -t[0]];
            let e = DEGENERATE_INFLATION;
            let dot = |a: Point2, x: Point2| a[0] * x[0] + a[1] * x[1];
            HPolytope2::new(
                vec![n, [-n[0], -n[1]], t, [-t[0], -t[1]]],
                vec![dot(n, p) + e, -dot(n, p) + e, dot(t, q) + e, -dot(t, p) + e],
            )
        }
        k => {
            let mut a = Vec::with_capacity(k);
            let mut b = Vec::with_capacity(k);
            for i in 0..k {
                let p = vertices[i];
                let q = vertices[(i + 1) % k];
                let n = [q[1] - p[1], p[0] - q[0]];
                let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
                let n = [n[0] / len, n[1] / len];
                a.push(n);
                b.push(n[0] * p[0] + n[1] * p[1]);
            }
            HPolytope2::new(a, b)
        }
    }
}

/// Convex hull of a point cloud as an H-polytope.
pub fn convex_hull_points(points: &[Point2]) -> Result<HPolytope2> {
    hpolytope_from_ccw(&convex_hull_vertices(points))
}

/// Convex polygon (possibly a point or segment) given by its vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon2 {
    pub vertices: Vec<Point2>,
}

impl ConvexPolygon2 {
    pub fn new(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn from_box(lo: Point2, hi: Point2) -> Self {
        Self::new(vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }

    /// Convex hull of the union of several polygons.
    pub fn hull_of(parts: &[&ConvexPolygon2]) -> Self {
        let pts: Vec<Point2> = parts
            .iter()
            .flat_map(|p| p.vertices.iter().copied())
            .collect();
        Self::new(convex_hull_vertices(&pts))
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        (lo, hi)
    }

    fn project(&self, axis: Point2) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let d = axis[0] * v[0] + axis[1] * v[1];
                (lo.min(d), hi.max(d))
            })
    }

    fn edge_normals(&self) -> impl Iterator<Item = Point2> + '_ {
        let k = self.vertices.len();
        (0..if k >= 2 { k } else { 0 }).filter_map(move |i| {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % k];
            let n = [q[1] - p[1], p[0] - q[0]];
            (n[0] != 0.0 || n[1] != 0.0).then_some(n)
        })
    }

    /// Exact separating-axis test between two convex polygons; touching
    /// boundaries count as intersecting.
    pub fn intersects(&self, other: &ConvexPolygon2) -> bool {
        self.separating_axis_test(other, false)
    }

    /// True iff the polygons share a point strictly inside both closures'
    /// overlap, i.e. touching boundaries do not count. Degenerate polygons
    /// (points, segments) count when they pass through the other's interior.
    pub fn overlaps_interior(&self, other: &ConvexPolygon2) -> bool {
        self.separating_axis_test(other, true)
    }

    fn separating_axis_test(&self, other: &ConvexPolygon2, strict: bool) -> bool {
        if self.vertices.is_empty() || other.vertices.is_empty() {
            return false;
        }
        let axes = [[1.0, 0.0], [0.0, 1.0]];
        for axis in axes
            .into_iter()
            .chain(self.edge_normals())
            .chain(other.edge_normals())
        {
            let (a_lo, a_hi) = self.project(axis);
            let (b_lo, b_hi) = other.project(axis);
            let separated = if strict {
                a_hi <= b_lo || b_hi <= a_lo
            } else {
                a_hi < b_lo || b_hi < a_lo
            };
            if separated {
                return false;
            }
        }
        true
    }

    /// Exact closed test against the axis-aligned box `[lo, hi]`.
    pub fn intersects_box(&self, lo: Point2, hi: Point2) -> bool {
        self.box_test(lo, hi, false)
    }

    /// Exact test against the open box `(lo, hi)`.
    pub fn overlaps_box_interior(&self, lo: Point2, hi: Point2) -> bool {
        self.box_test(lo, hi, true)
    }

    fn box_test(&self, lo: Point2, hi: Point2, strict: bool) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let separated = |a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64| {
            if strict {
                a_hi <= b_lo || b_hi <= a_lo
            } else {
                a_hi < b_lo || b_hi < a_lo
            }
        };
        let (plo, phi) = self.bbox();
        if separated(plo[0], phi[0], lo[0], hi[0]) || separated(plo[1], phi[1], lo[1], hi[1]) {
            return false;
        }
        for n in self.edge_normals() {
            let (a_lo, a_hi) = self.project(n);
            let xs = [n[0] * lo[0], n[0] * hi[0]];
            let ys = [n[1] * lo[1], n[1] * hi[1]];
            let b_lo = xs[0].min(xs[1]) + ys[0].min(ys[1]);
            let b_hi = xs[0].max(xs[1]) + ys[0].max(ys[1]);
            if separated(a_lo, a_hi, b_lo, b_hi) {
                return false;
            }
        }
        true
    }
}
