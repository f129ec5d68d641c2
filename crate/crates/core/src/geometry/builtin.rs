//! Built-in planar targets in the `z = 0` plane of the target frame.
//! Coordinates span roughly `[-12, 12]` in both axes.

use super::target::{ConvexPolygon3, Point3, Target};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: [&str; 4] = ["digits", "letter", "stripes", "sign"];

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point3> {
    vec![[x0, y0, 0.0], [x1, y0, 0.0], [x1, y1, 0.0], [x0, y1, 0.0]]
}

fn planar(points: &[[f64; 2]]) -> Vec<Point3> {
    points.iter().map(|p| [p[0], p[1], 0.0]).collect()
}

fn build(name: &str, parts: Vec<Vec<Point3>>) -> Target {
    let polygons = parts
        .into_iter()
        .map(|v| ConvexPolygon3::new(v, Some([0.0, 0.0, 1.0])).expect("built-in polygon is valid"))
        .collect();
    Target::new(name, polygons).expect("built-in target is nonempty")
}

/// Two seven-segment style digits ("3" and "0") made of bars.
pub fn digits() -> Target {
    build(
        "digits",
        vec![
            // 3
            rect(-12.0, 9.0, -2.0, 12.0),
            rect(-10.0, -1.5, -2.0, 1.5),
            rect(-12.0, -12.0, -2.0, -9.0),
            rect(-5.0, -8.0, -2.0, 8.0),
            // 0
            rect(2.0, 9.0, 12.0, 12.0),
            rect(2.0, -12.0, 12.0, -9.0),
            rect(2.0, -8.0, 5.0, 8.0),
            rect(9.0, -8.0, 12.0, 8.0),
        ],
    )
}

/// Letter "R": stem, bowl bars and a slanted leg.
pub fn letter() -> Target {
    build(
        "letter",
        vec![
            rect(-10.0, -12.0, -6.0, 12.0),
            rect(-5.0, 9.0, 6.0, 12.0),
            rect(-5.0, 0.0, 6.0, 3.0),
            rect(7.0, 1.0, 10.0, 11.0),
            planar(&[[7.0, -12.0], [11.0, -12.0], [3.5, -1.0], [0.0, -1.0]]),
        ],
    )
}

/// Three parallel horizontal stripes.
pub fn stripes() -> Target {
    build(
        "stripes",
        vec![
            rect(-12.0, -12.0, 12.0, -6.0),
            rect(-12.0, -3.0, 12.0, 3.0),
            rect(-12.0, 6.0, 12.0, 12.0),
        ],
    )
}

/// Triangular warning sign: a border of three trapezoids around an inner
/// triangle, separated by a gap.
pub fn sign() -> Target {
    let outer = [[-12.0, -10.0], [12.0, -10.0], [0.0, 12.0]];
    let c = [0.0, (-10.0 - 10.0 + 12.0) / 3.0];
    let scaled = |p: [f64; 2], s: f64| [c[0] + s * (p[0] - c[0]), c[1] + s * (p[1] - c[1])];
    let mut parts = Vec::new();
    for i in 0..3 {
        let (a, b) = (outer[i], outer[(i + 1) % 3]);
        parts.push(planar(&[a, b, scaled(b, 0.72), scaled(a, 0.72)]));
    }
    parts.push(planar(&[
        scaled(outer[0], 0.42),
        scaled(outer[1], 0.42),
        scaled(outer[2], 0.42),
    ]));
    build("sign", parts)
}

pub fn builtin(name: &str) -> Result<Target> {
    match name {
        "digits" => Ok(digits()),
        "letter" => Ok(letter()),
        "stripes" => Ok(stripes()),
        "sign" => Ok(sign()),
        other => Err(Error::Config(format!(
            "unknown built-in target {other:?} (known: {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_are_valid() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            assert_eq!(t.name(), name);
            for p in t.polygons() {
                assert_eq!(p.normal(), [0.0, 0.0, 1.0]);
                for v in p.vertices() {
                    assert!(v[0].abs() <= 12.0 && v[1].abs() <= 12.0);
                }
            }
        }
        assert!(builtin("nope").is_err());
    }
}
