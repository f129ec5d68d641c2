//! Image enclosure from an uncertain pose.
//!
//! Sines and cosines of the uncertain angles are enclosed, assembled into an
//! uncertain rotation matrix, and every target vertex is pushed through the
//! camera model with polynomial-zonotope arithmetic. The uncertain projected
//! vertices of each polygon are wrapped in a support-function hull, and every
//! pixel that hull may touch is turned on in the outer image.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Invisibility, Result};
use crate::geometry::camera::{CameraParams, Mat3, Pose};
use crate::geometry::polytope::{HPolytope2, Point2};
use crate::geometry::raster::{pixel_range, pixel_square};
use crate::geometry::{project, BinaryImage, Target};
use crate::nonlin::{enclose_elementwise, ElementaryFn};
use crate::set::{FactorAssignment, FactorId, Interval, MatPolyZonotope, PolyZonotope};

pub const POSE_DIM: usize = 6;

/// Factor ids of the six pose coordinates `x, y, z, θx, θy, θz`.
pub const POSE_IDS: [FactorId; POSE_DIM] = [
    FactorId(1),
    FactorId(2),
    FactorId(3),
    FactorId(4),
    FactorId(5),
    FactorId(6),
];

/// Axis-aligned pose box `o + G α`, `α ∈ [-1, 1]^6`, `G` diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertainPose {
    bounds: Interval,
}

impl UncertainPose {
    pub fn new(bounds: Interval) -> Result<Self> {
        if bounds.dim() != POSE_DIM {
            return Err(Error::DimensionMismatch {
                expected: POSE_DIM,
                found: bounds.dim(),
            });
        }
        Ok(Self { bounds })
    }

    pub fn point(pose: &Pose) -> Self {
        Self {
            bounds: Interval::point(&pose.to_array()),
        }
    }

    pub fn bounds(&self) -> &Interval {
        &self.bounds
    }

    pub fn center(&self) -> [f64; POSE_DIM] {
        let c = self.bounds.center();
        std::array::from_fn(|i| c[i])
    }

    /// Diagonal of `G`.
    pub fn radius(&self) -> [f64; POSE_DIM] {
        let r = self.bounds.radius();
        std::array::from_fn(|i| r[i])
    }

    pub fn center_pose(&self) -> Pose {
        Pose::from_array(self.center())
    }

    pub fn set(&self) -> PolyZonotope {
        PolyZonotope::make_box(&self.bounds, &POSE_IDS).expect("six ids for a six-dimensional box")
    }

    pub fn volume(&self) -> f64 {
        self.bounds.volume()
    }

    pub fn contains(&self, pose: &Pose, tol: f64) -> bool {
        self.bounds.contains(&pose.to_array(), tol)
    }

    /// Latent coordinates of a pose; dimensions with zero radius map to 0.
    pub fn alpha_of(&self, pose: &Pose) -> [f64; POSE_DIM] {
        let (c, r, p) = (self.center(), self.radius(), pose.to_array());
        std::array::from_fn(|i| {
            if r[i] > 0.0 {
                (p[i] - c[i]) / r[i]
            } else {
                0.0
            }
        })
    }

    pub fn pose_at(&self, alpha: &[f64; POSE_DIM]) -> Pose {
        let (c, r) = (self.center(), self.radius());
        Pose::from_array(std::array::from_fn(|i| c[i] + r[i] * alpha[i]))
    }

    pub fn factor_assignment(&self, alpha: &[f64; POSE_DIM]) -> Result<FactorAssignment> {
        FactorAssignment::new(
            POSE_IDS
                .iter()
                .copied()
                .zip(alpha.iter().copied())
                .collect(),
            Vec::new(),
        )
    }
}

/// Support-function direction selection for the per-polygon hull.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullConfig {
    /// Directions orthogonal to the edges between consecutive vertex offsets.
    pub edge_normals: bool,
    /// Directions from the polygon center to every vertex offset.
    pub vertex_directions: bool,
    /// One refinement round orthogonal to the segments between the support
    /// points of consecutive vertices.
    pub refine: bool,
}

impl Default for HullConfig {
    fn default() -> Self {
        Self {
            edge_normals: true,
            vertex_directions: true,
            refine: true,
        }
    }
}

/// Uncertain projection of one target vertex with its split into the part
/// linear in the pose factors and the remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexEnclosure {
    pub set: PolyZonotope,
    pub lin_offset: Point2,
    /// Column `j` is the generator of pose factor `j` (zero if absent).
    pub lin_gen: [Point2; POSE_DIM],
    /// Nonlinear dependent and all independent generators.
    pub err_gens: Vec<Point2>,
    pub hull: Interval,
    /// Pixels whose square meets `hull`.
    pub bitmap: BinaryImage,
}

impl VertexEnclosure {
    pub fn from_set(set: PolyZonotope, cam: &CameraParams) -> Result<Self> {
        if set.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: set.dim(),
            });
        }
        let (lin, err) = set.split_linear_error(&POSE_IDS)?;
        let mut lin_gen = [[0.0; 2]; POSE_DIM];
        for i in 0..lin.num_dep() {
            let e = lin.exponent(i);
            let row = e.iter().position(|&x| x == 1).expect("unit exponent");
            let j = POSE_IDS
                .iter()
                .position(|&id| id == lin.ids()[row])
                .expect("linear columns belong to pose ids");
            let g = lin.dep_gen(i);
            lin_gen[j] = [lin_gen[j][0] + g[0], lin_gen[j][1] + g[1]];
        }
        let err_gens = (0..err.num_dep())
            .map(|i| err.dep_gen(i))
            .chain((0..err.num_indep()).map(|j| err.indep_gen(j)))
            .map(|g| [g[0], g[1]])
            .collect();
        let hull = set.interval_hull();
        let bitmap = interval_bitmap(&hull, cam);
        Ok(Self {
            lin_offset: [lin.offset()[0], lin.offset()[1]],
            lin_gen,
            err_gens,
            set,
            hull,
            bitmap,
        })
    }

    /// Radius of the interval hull of the linear part.
    pub fn lin_radius(&self) -> Point2 {
        self.lin_gen.iter().fold([0.0, 0.0], |acc, g| {
            [acc[0] + g[0].abs(), acc[1] + g[1].abs()]
        })
    }

    /// Radius of the interval hull of the remainder.
    pub fn err_radius(&self) -> Point2 {
        self.err_gens.iter().fold([0.0, 0.0], |acc, g| {
            [acc[0] + g[0].abs(), acc[1] + g[1].abs()]
        })
    }

    pub fn error_ratio(&self) -> f64 {
        let l = self.lin_radius();
        let e = self.err_radius();
        let ln = l[0].hypot(l[1]);
        let en = e[0].hypot(e[1]);
        if ln > 0.0 {
            en / ln
        } else if en > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Pixels whose (closed) square meets the box `iv`.
pub fn interval_bitmap(iv: &Interval, cam: &CameraParams) -> BinaryImage {
    let mut img = BinaryImage::new(cam.width, cam.height);
    let (lo, hi) = ([iv.lo()[0], iv.lo()[1]], [iv.hi()[0], iv.hi()[1]]);
    if let Some(((x0, y0), (x1, y1))) = pixel_range(cam, lo, hi) {
        img.fill_rect(x0, y0, x1, y1);
    }
    img
}

/// Offline products for one pose candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseCandidateArtifacts {
    pub pose: UncertainPose,
    pub outer_image: BinaryImage,
    /// Outer image of each polygon on its own.
    pub polygon_images: Vec<BinaryImage>,
    pub hulls: Vec<HPolytope2>,
    /// `[polygon][vertex]`.
    pub vertices: Vec<Vec<VertexEnclosure>>,
    /// Concrete projection of the target at the candidate's center pose.
    pub center_projection: Vec<Vec<Point2>>,
    pub error_ratio: f64,
    /// Number of polytope-versus-pixel tests spent on the outer image.
    pub pixel_tests: usize,
}

/// Uncertain rotation matrix `Rx ⊠ (Ry ⊠ Rz)` over the pose angles.
pub fn enclose_rotation(u: &UncertainPose) -> Result<MatPolyZonotope> {
    let angles = u.set().index(&[3, 4, 5])?;
    let s = enclose_elementwise(ElementaryFn::Sin, &angles)?;
    let c = enclose_elementwise(ElementaryFn::Cos, &angles)?;
    // rows: sx sy sz cx cy cz
    let sc = s.stack(&c)?.into_matrix();
    // Each elementary matrix is an affine image of [s; c]: entries are
    // (coefficient, source row) pairs, or constants.
    let build = |entries: [Option<(f64, usize)>; 9], consts: [f64; 9]| {
        let mut m = vec![0.0; 9 * 6];
        for (k, e) in entries.iter().enumerate() {
            if let Some((coef, src)) = e {
                m[k * 6 + src] = *coef;
            }
        }
        sc.affine_map(&m, &consts, 3, 3)
    };
    let (sx, sy, sz, cx, cy, cz) = (0, 1, 2, 3, 4, 5);
    let rx = build(
        [
            None,
            None,
            None,
            None,
            Some((1.0, cx)),
            Some((-1.0, sx)),
            None,
            Some((1.0, sx)),
            Some((1.0, cx)),
        ],
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    )?;
    let ry = build(
        [
            Some((1.0, cy)),
            None,
            Some((1.0, sy)),
            None,
            None,
            None,
            Some((-1.0, sy)),
            None,
            Some((1.0, cy)),
        ],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    )?;
    let rz = build(
        [
            Some((1.0, cz)),
            Some((-1.0, sz)),
            None,
            Some((1.0, sz)),
            Some((1.0, cz)),
            None,
            None,
            None,
            None,
        ],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    )?;
    rx.mat_mul(&ry.mat_mul(&rz)?)
}

fn constant(m: &Mat3) -> MatPolyZonotope {
    MatPolyZonotope::singleton(3, 3, m.iter().flatten().copied().collect()).expect("finite matrix")
}

/// Uncertain pixel-frame vertices `[polygon][vertex]`.
///
/// Fails with [`Error::DomainCrossesPole`] when some vertex depth interval
/// reaches zero, i.e. the polygon may be behind the camera.
pub fn enclose_vertices(
    target: &Target,
    u: &UncertainPose,
    cam: &CameraParams,
) -> Result<Vec<Vec<PolyZonotope>>> {
    let rot = enclose_rotation(u)?;
    let k = constant(&cam.intrinsic_matrix());
    let translation = u.set().index(&[0, 1, 2])?.into_matrix();
    let mut out = Vec::with_capacity(target.polygons().len());
    for poly in target.polygons() {
        let v = poly.len();
        let vt = MatPolyZonotope::singleton(
            3,
            v,
            (0..3)
                .flat_map(|r| poly.vertices().iter().map(move |p| p[r]))
                .collect(),
        )?;
        // Broadcast the translation to every column.
        let mut spread = vec![0.0; 3 * v * 3];
        for r in 0..3 {
            for c in 0..v {
                spread[(r * v + c) * 3 + r] = 1.0;
            }
        }
        let t = translation.affine_map(&spread, &vec![0.0; 3 * v], 3, v)?;
        let ccf = k.mat_mul(&rot.mat_mul(&vt)?.mink_sum(&t)?)?;
        let mut verts = Vec::with_capacity(v);
        for col in 0..v {
            let xy = ccf.index(&[0, 1], &[col])?;
            let depth = PolyZonotope::try_from(ccf.index(&[2], &[col])?)?;
            let inv = enclose_elementwise(ElementaryFn::Recip, &depth)?;
            verts.push(PolyZonotope::try_from(xy.mat_mul(inv.as_matrix())?)?);
        }
        out.push(verts);
    }
    Ok(out)
}

fn normalized(v: Point2) -> Option<Point2> {
    let n = v[0].hypot(v[1]);
    (n > 1e-12).then(|| [v[0] / n, v[1] / n])
}

fn support(sets: &[PolyZonotope], dir: Point2) -> (f64, Vec<Point2>) {
    let mut best = f64::NEG_INFINITY;
    let mut points = Vec::with_capacity(sets.len());
    for s in sets {
        let (val, p) = s.support_point(&dir).expect("two-dimensional set");
        best = best.max(val);
        points.push([p[0], p[1]]);
    }
    (best, points)
}

/// Support-function hull containing the convex hull of all vertex sets.
pub fn hull_enclose(vertex_sets: &[PolyZonotope], cfg: &HullConfig) -> Result<HPolytope2> {
    let v = vertex_sets.len();
    if v == 0 {
        return Err(Error::InvalidPolygon("no vertex sets".into()));
    }
    let centers: Vec<Point2> = vertex_sets
        .iter()
        .map(|s| [s.offset()[0], s.offset()[1]])
        .collect();
    let m = centers.iter().fold([0.0, 0.0], |a, c| {
        [a[0] + c[0] / v as f64, a[1] + c[1] / v as f64]
    });
    let outward = |n: Point2, at: Point2| {
        if n[0] * (at[0] - m[0]) + n[1] * (at[1] - m[1]) < 0.0 {
            [-n[0], -n[1]]
        } else {
            n
        }
    };

    let mut dirs: Vec<Point2> = Vec::with_capacity(3 * v + 4);
    let mut edge_dirs: Vec<Option<Point2>> = vec![None; v];
    if cfg.edge_normals {
        for k in 0..v {
            let (a, b) = (centers[k], centers[(k + 1) % v]);
            if let Some(n) = normalized([b[1] - a[1], a[0] - b[0]]) {
                let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                let n = outward(n, mid);
                edge_dirs[k] = Some(n);
                dirs.push(n);
            }
        }
    }
    if cfg.vertex_directions {
        for c in &centers {
            if let Some(d) = normalized([c[0] - m[0], c[1] - m[1]]) {
                dirs.push(d);
            }
        }
    }
    if dirs.is_empty() {
        // Degenerate offsets: fall back to the axis directions.
        dirs.extend([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]);
    }

    let mut a = Vec::with_capacity(dirs.len() + v);
    let mut b = Vec::with_capacity(dirs.len() + v);
    for &d in &dirs {
        a.push(d);
        b.push(support(vertex_sets, d).0);
    }

    if cfg.refine {
        let cap = 3 * v;
        for k in 0..v {
            if a.len() >= cap {
                break;
            }
            let Some(n) = edge_dirs[k] else { continue };
            let pair = [vertex_sets[k].clone(), vertex_sets[(k + 1) % v].clone()];
            let (_, pts) = support(&pair, n);
            let (p, q) = (pts[0], pts[1]);
            if let Some(r) = normalized([q[1] - p[1], p[0] - q[0]]) {
                let r = if r[0] * n[0] + r[1] * n[1] < 0.0 {
                    [-r[0], -r[1]]
                } else {
                    r
                };
                a.push(r);
                b.push(support(vertex_sets, r).0);
            }
        }
    }
    HPolytope2::new(a, b)
}

/// Image enclosure for one pose candidate.
pub fn forward_enclose(
    target: &Target,
    u: &UncertainPose,
    cam: &CameraParams,
    cfg: &HullConfig,
) -> Result<PoseCandidateArtifacts> {
    let sets = enclose_vertices(target, u, cam).map_err(|e| match e {
        Error::DomainCrossesPole { lo, hi } => {
            Error::InvisibleCandidate(Invisibility::DepthCrossesCamera { lo, hi })
        }
        other => other,
    })?;
    let center = u.center_pose();
    let center_projection = target
        .polygons()
        .iter()
        .map(|p| project(cam, &center, p.vertices()).map(|(_, pcf)| pcf))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::BehindCamera(z) => {
                Error::InvisibleCandidate(Invisibility::DepthCrossesCamera { lo: z, hi: z })
            }
            other => other,
        })?;

    let mut outer_image = BinaryImage::new(cam.width, cam.height);
    let mut polygon_images = Vec::with_capacity(sets.len());
    let mut hulls = Vec::with_capacity(sets.len());
    let mut vertices = Vec::with_capacity(sets.len());
    let mut pixel_tests = 0;
    let mut ratio_sum = 0.0;
    let mut ratio_count = 0usize;

    for poly_sets in sets {
        let hull = hull_enclose(&poly_sets, cfg)?;
        let encl = poly_sets
            .into_iter()
            .map(|s| VertexEnclosure::from_set(s, cam))
            .collect::<Result<Vec<_>>>()?;
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for e in &encl {
            for d in 0..2 {
                lo[d] = lo[d].min(e.hull.lo()[d]);
                hi[d] = hi[d].max(e.hull.hi()[d]);
            }
            ratio_sum += e.error_ratio();
            ratio_count += 1;
        }
        let mut img = BinaryImage::new(cam.width, cam.height);
        if let Some(((x0, y0), (x1, y1))) = pixel_range(cam, lo, hi) {
            for qy in y0..=y1 {
                for qx in x0..=x1 {
                    pixel_tests += 1;
                    let (plo, phi) = pixel_square(qx as i64, qy as i64);
                    if hull.overlaps_box_outer(plo, phi) {
                        img.set(qx, qy, true);
                    }
                }
            }
        }
        outer_image.or_assign(&img);
        polygon_images.push(img);
        hulls.push(hull);
        vertices.push(encl);
    }
    if outer_image.is_blank() {
        return Err(Error::InvisibleCandidate(Invisibility::EmptyImage));
    }
    Ok(PoseCandidateArtifacts {
        pose: u.clone(),
        outer_image,
        polygon_images,
        hulls,
        vertices,
        center_projection,
        error_ratio: if ratio_count > 0 {
            ratio_sum / ratio_count as f64
        } else {
            0.0
        },
        pixel_tests,
    })
}
