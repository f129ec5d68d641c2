use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];

/// Coplanarity tolerance, relative to the polygon's coordinate scale.
const PLANE_TOL: f64 = 1e-9;

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Planar convex polygon with counter-clockwise vertices (seen from the
/// side its normal points to).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon3 {
    vertices: Vec<Point3>,
    normal: Point3,
    plane_offset: f64,
}

impl ConvexPolygon3 {
    /// Validates planarity and convexity. Without `normal`, the winding
    /// defines the normal; with it, the vertices must wind
    /// counter-clockwise around it.
    pub fn new(vertices: Vec<Point3>, normal: Option<Point3>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "{} vertices, need at least 3",
                vertices.len()
            )));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let k = vertices.len();
        // Newell's method
        let mut n = [0.0; 3];
        for i in 0..k {
            let (a, b) = (vertices[i], vertices[(i + 1) % k]);
            n[0] += (a[1] - b[1]) * (a[2] + b[2]);
            n[1] += (a[2] - b[2]) * (a[0] + b[0]);
            n[2] += (a[0] - b[0]) * (a[1] + b[1]);
        }
        let len = dot(n, n).sqrt();
        if len == 0.0 {
            return Err(Error::InvalidPolygon("zero area".into()));
        }
        let mut n = [n[0] / len, n[1] / len, n[2] / len];
        if let Some(given) = normal {
            let gl = dot(given, given).sqrt();
            if gl == 0.0 {
                return Err(Error::InvalidPolygon("zero normal".into()));
            }
            let given = [given[0] / gl, given[1] / gl, given[2] / gl];
            if dot(given, n) < 1.0 - 1e-9 {
                return Err(Error::InvalidPolygon(
                    "vertices are not counter-clockwise around the given normal".into(),
                ));
            }
            n = given;
        }
        let scale = vertices
            .iter()
            .flatten()
            .fold(1.0f64, |m, x| m.max(x.abs()));
        let d = vertices.iter().map(|v| dot(n, *v)).sum::<f64>() / k as f64;
        if let Some(v) = vertices
            .iter()
            .find(|v| (dot(n, **v) - d).abs() > PLANE_TOL * scale)
        {
            return Err(Error::InvalidPolygon(format!(
                "vertex {v:?} is off the plane"
            )));
        }
        for i in 0..k {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % k], vertices[(i + 2) % k]);
            if dot(cross(sub(b, a), sub(c, b)), n) <= 0.0 {
                return Err(Error::InvalidPolygon(format!(
                    "not strictly convex and counter-clockwise at vertex {}",
                    (i + 1) % k
                )));
            }
        }
        Ok(Self {
            vertices,
            normal: n,
            plane_offset: d,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn normal(&self) -> Point3 {
        self.normal
    }

    pub fn plane_offset(&self) -> f64 {
        self.plane_offset
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Union of convex polygons.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    name: String,
    polygons: Vec<ConvexPolygon3>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TargetFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    polygons: Vec<PolygonFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PolygonFile {
    vertices: Vec<Point3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normal: Option<Point3>,
}

impl Target {
    pub fn new(name: impl Into<String>, polygons: Vec<ConvexPolygon3>) -> Result<Self> {
        if polygons.is_empty() {
            return Err(Error::InvalidPolygon("target has no polygons".into()));
        }
        Ok(Self {
            name: name.into(),
            polygons,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn polygons(&self) -> &[ConvexPolygon3] {
        &self.polygons
    }

    pub fn vertex_count(&self) -> usize {
        self.polygons.iter().map(ConvexPolygon3::len).sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TargetFile = serde_json::from_str(text)?;
        let polygons = file
            .polygons
            .into_iter()
            .map(|p| ConvexPolygon3::new(p.vertices, p.normal))
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.name.unwrap_or_else(|| "custom".into()), polygons)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut t = Self::from_json(&std::fs::read_to_string(path)?)?;
        if t.name == "custom" {
            if let Some(stem) = path.file_stem() {
                t.name = stem.to_string_lossy().into_owned();
            }
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        let file = TargetFile {
            name: Some(self.name.clone()),
            polygons: self
                .polygons
                .iter()
                .map(|p| PolygonFile {
                    vertices: p.vertices.clone(),
                    normal: None,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }

    /// SHA-256 over the canonical JSON of the vertex lists; the name is not
    /// part of the fingerprint.
    pub fn fingerprint(&self) -> String {
        let verts: Vec<&[Point3]> = self.polygons.iter().map(|p| p.vertices()).collect();
        let canonical = serde_json::to_string(&verts).expect("plain data serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
