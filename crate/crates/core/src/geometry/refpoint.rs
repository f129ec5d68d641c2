//! Reference-point parametrization of target vertices: `p = R lambda`.
//! Perturbing `lambda` inside a box models uncertain target geometry.

use super::camera::Mat3;
use crate::error::{Error, Result};
use crate::set::{FactorId, Interval, PolyZonotope};

const SINGULAR_TOL: f64 = 1e-12;

/// Solves `R lambda = p`. A reference matrix whose third column is zero
/// and whose first two columns are `e1`, `e2` (planar targets) gives
/// `lambda = (p1, p2, 0)` provided `p` lies in the plane.
pub fn refpoint_reconstruct(r: &Mat3, p: &[f64; 3]) -> Result<[f64; 3]> {
    let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    let scale = r.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if det.abs() > SINGULAR_TOL * scale.powi(3).max(f64::MIN_POSITIVE) {
        // Cramer's rule
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut m = *r;
            for i in 0..3 {
                m[i][k] = p[i];
            }
            let dk = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            *o = dk / det;
        }
        return Ok(out);
    }
    let planar = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
    if *r == planar && p[2] == 0.0 {
        return Ok([p[0], p[1], 0.0]);
    }
    Err(Error::SingularReference)
}

/// Vertex set `R lambda` with `lambda` uncertain in `lambda ± radius`,
/// one fresh factor per coordinate.
pub fn uncertain_vertex(
    r: &Mat3,
    lambda: &[f64; 3],
    radius: &[f64; 3],
    ids: &[FactorId],
) -> Result<PolyZonotope> {
    let iv = Interval::from_center_radius(lambda, radius)?;
    let b = PolyZonotope::make_box(&iv, ids)?;
    let m: Vec<f64> = r.iter().flatten().copied().collect();
    b.affine_map(&m, &[0.0; 3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_reference() {
        let eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(
            refpoint_reconstruct(&eye, &[1.0, -2.0, 3.0]).unwrap(),
            [1.0, -2.0, 3.0]
        );
    }

    #[test]
    fn planar_reference_eliminates_third_coordinate() {
        let r = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
        assert_eq!(
            refpoint_reconstruct(&r, &[4.0, 5.0, 0.0]).unwrap(),
            [4.0, 5.0, 0.0]
        );
        assert!(matches!(
            refpoint_reconstruct(&r, &[4.0, 5.0, 1.0]),
            Err(Error::SingularReference)
        ));
        let rank1 = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [1.0, 2.0, 3.0]];
        assert!(refpoint_reconstruct(&rank1, &[1.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let r: Mat3 =
                std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
            let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
            if let Ok(l) = refpoint_reconstruct(&r, &p) {
                for i in 0..3 {
                    let back: f64 = (0..3).map(|k| r[i][k] * l[k]).sum();
                    assert!(
                        (back - p[i]).abs() < 1e-9 * (1.0 + l.iter().map(|x| x.abs()).sum::<f64>())
                    );
                }
            }
        }
    }

    #[test]
    fn uncertain_vertex_hull() {
        let eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let ids = [FactorId(10), FactorId(11), FactorId(12)];
        let v = uncertain_vertex(&eye, &[1.0, 2.0, 0.0], &[0.1, 0.1, 0.0], &ids).unwrap();
        let ih = v.interval_hull();
        assert!((ih.lo()[0] - 0.9).abs() < 1e-12 && (ih.hi()[1] - 2.1).abs() < 1e-12);
        assert_eq!(ih.lo()[2], 0.0);
    }
}
