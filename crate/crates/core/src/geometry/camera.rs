use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];

/// Minimum camera-frame depth accepted as "in front of the camera".
pub const MIN_DEPTH: f64 = 1e-9;

/// Pinhole camera with its principal point at the image center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraParams {
    pub focal: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraParams {
    pub fn new(focal: f64, width: usize, height: usize) -> Result<Self> {
        let cam = Self {
            focal,
            width,
            height,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal.is_finite() && self.focal > 0.0) {
            return Err(Error::InvalidCamera(format!(
                "focal length must be positive, got {}",
                self.focal
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidCamera(format!(
                "resolution {}x{} is empty",
                self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn intrinsic_matrix(&self) -> Mat3 {
        [
            [self.focal, 0.0, self.width as f64 / 2.0],
            [0.0, self.focal, self.height as f64 / 2.0],
            [0.0, 0.0, 1.0],
        ]
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
}

/// Camera pose relative to the target: translation (meters) then
/// `Rx Ry Rz` rotation angles (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_z: f64,
}

impl Pose {
    pub fn from_array(p: [f64; 6]) -> Self {
        Self {
            x: p[0],
            y: p[1],
            z: p[2],
            theta_x: p[3],
            theta_y: p[4],
            theta_z: p[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.x,
            self.y,
            self.z,
            self.theta_x,
            self.theta_y,
            self.theta_z,
        ]
    }

    pub fn rotation(&self) -> Mat3 {
        rotation_matrix(self.theta_x, self.theta_y, self.theta_z)
    }
}

pub fn rot_x(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
}

pub fn rot_y(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn rot_z(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_vec(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (0..3).map(|k| a[i][k] * v[k]).sum();
    }
    out
}

/// `Rx(tx) Ry(ty) Rz(tz)`.
pub fn rotation_matrix(tx: f64, ty: f64, tz: f64) -> Mat3 {
    mat3_mul(&rot_x(tx), &mat3_mul(&rot_y(ty), &rot_z(tz)))
}

/// Camera-frame coordinates `K (R v + T)` of one target vertex.
pub fn to_camera_frame(cam: &CameraParams, pose: &Pose, v: &[f64; 3]) -> [f64; 3] {
    let rv = mat3_vec(&pose.rotation(), v);
    let t = [rv[0] + pose.x, rv[1] + pose.y, rv[2] + pose.z];
    mat3_vec(&cam.intrinsic_matrix(), &t)
}

/// Projects vertices; returns camera-frame and pixel-frame coordinates.
pub fn project(
    cam: &CameraParams,
    pose: &Pose,
    vertices: &[[f64; 3]],
) -> Result<(Vec<[f64; 3]>, Vec<[f64; 2]>)> {
    let mut ccf = Vec::with_capacity(vertices.len());
    let mut pcf = Vec::with_capacity(vertices.len());
    for v in vertices {
        let c = to_camera_frame(cam, pose, v);
        if c[2] <= MIN_DEPTH {
            return Err(Error::BehindCamera(c[2]));
        }
        pcf.push([c[0] / c[2], c[1] / c[2]]);
        ccf.push(c);
    }
    Ok((ccf, pcf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn intrinsics() {
        let k = CameraParams::new(250.0, 200, 200)
            .unwrap()
            .intrinsic_matrix();
        assert_eq!(
            k,
            [[250.0, 0.0, 100.0], [0.0, 250.0, 100.0], [0.0, 0.0, 1.0]]
        );
        let k = CameraParams::new(1.0, 2, 2).unwrap().intrinsic_matrix();
        assert_eq!(k, [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]);
        let k = CameraParams::new(533.33, 640, 480)
            .unwrap()
            .intrinsic_matrix();
        assert_eq!((k[0][2], k[1][2]), (320.0, 240.0));
        assert!(CameraParams::new(0.0, 10, 10).is_err());
        assert!(CameraParams::new(1.0, 0, 10).is_err());
    }

    #[test]
    fn rotation_is_orthonormal() {
        assert_eq!(rotation_matrix(0.0, 0.0, 0.0), rot_x(0.0));
        let r = rotation_matrix(0.0, 0.0, FRAC_PI_2);
        assert!((r[1][0] - 1.0).abs() < 1e-15 && (r[0][1] + 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let t: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
            let r = rotation_matrix(t[0], t[1], t[2]);
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-12);
                }
            }
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            assert!((det - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn origin_projects_to_principal_point() {
        let cam = CameraParams::new(100.0, 64, 48).unwrap();
        let pose = Pose::from_array([0.0, 0.0, 5.0, 0.0, 0.0, 0.0]);
        let (_, pcf) = project(&cam, &pose, &[[0.0; 3]]).unwrap();
        assert_eq!(pcf[0], [32.0, 24.0]);
    }

    #[test]
    fn doubling_depth_halves_offset() {
        let cam = CameraParams::new(100.0, 64, 48).unwrap();
        let v = [[1.0, -0.5, 0.0]];
        let near = project(&cam, &Pose::from_array([0.0, 0.0, 5.0, 0.0, 0.0, 0.0]), &v)
            .unwrap()
            .1[0];
        let far = project(&cam, &Pose::from_array([0.0, 0.0, 10.0, 0.0, 0.0, 0.0]), &v)
            .unwrap()
            .1[0];
        assert!(((near[0] - 32.0) - 2.0 * (far[0] - 32.0)).abs() < 1e-12);
        assert!(((near[1] - 24.0) - 2.0 * (far[1] - 24.0)).abs() < 1e-12);
    }

    #[test]
    fn behind_camera_is_rejected() {
        let cam = CameraParams::new(100.0, 64, 48).unwrap();
        let pose = Pose::from_array([0.0, 0.0, -1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            project(&cam, &pose, &[[0.0; 3]]),
            Err(Error::BehindCamera(_))
        ));
    }

    #[test]
    fn reprojected_ray_hits_point() {
        let cam = CameraParams::new(125.0, 100, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let pose = Pose::from_array([
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(50.0..100.0),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
            ]);
            let v = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), 0.0];
            let (ccf, pcf) = project(&cam, &pose, &[v]).unwrap();
            // Back-project the pixel at the known depth into the camera frame.
            let depth = ccf[0][2];
            let xc = (pcf[0][0] - 50.0) * depth / 125.0;
            let yc = (pcf[0][1] - 50.0) * depth / 125.0;
            let r = pose.rotation();
            let p = [
                (0..3).map(|k| r[0][k] * v[k]).sum::<f64>() + pose.x,
                (0..3).map(|k| r[1][k] * v[k]).sum::<f64>() + pose.y,
            ];
            assert!((xc - p[0]).abs() < 1e-9 && (yc - p[1]).abs() < 1e-9);
        }
    }
}
