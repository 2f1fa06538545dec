//! Pinhole and orthographic cameras mapping world points to continuous pixel coordinates.
//!
//! World-to-camera is a rigid transform `p_cam = R p + t`. The camera frame
//! follows the image convention: `+x` right, `+y` down, `+z` forward.

use nalgebra::{Matrix3, Rotation3};

use crate::error::{Error, Result};
use crate::geom::{Point2, Point3, Vec3};

/// Perspective depths at or below this magnitude cannot be projected.
pub const MIN_DEPTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    /// `u = fx * x / z + cx`, `v = fy * y / z + cy`.
    Perspective { fx: f64, fy: f64, cx: f64, cy: f64 },
    /// `u = sx * x + cx`, `v = sy * y + cy`.
    Orthographic { sx: f64, sy: f64, cx: f64, cy: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    rotation: Matrix3<f64>,
    translation: Vec3,
    projection: Projection,
    width: u32,
    height: u32,
}

impl Camera {
    pub fn new(rotation: Matrix3<f64>, translation: Vec3, projection: Projection, width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ConfigInvalid(format!("image size {width}x{height} must be positive")));
        }
        let (a, b, c, d) = match projection {
            Projection::Perspective { fx, fy, cx, cy } => (fx, fy, cx, cy),
            Projection::Orthographic { sx, sy, cx, cy } => (sx, sy, cx, cy),
        };
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::ConfigInvalid(format!("focal lengths / scales must be positive, got {a}, {b}")));
        }
        if !(c.is_finite() && d.is_finite()) {
            return Err(Error::ConfigInvalid("principal point must be finite".into()));
        }
        if !rotation.iter().chain(translation.iter()).all(|v| v.is_finite()) {
            return Err(Error::ConfigInvalid("extrinsics must be finite".into()));
        }
        let ortho_err = (rotation * rotation.transpose() - Matrix3::identity()).amax();
        if ortho_err > 1e-6 || (rotation.determinant() - 1.0).abs() > 1e-6 {
            return Err(Error::ConfigInvalid("extrinsic rotation is not a proper rotation".into()));
        }
        Ok(Self { rotation, translation, projection, width, height })
    }

    /// Identity extrinsics, principal point at the image center.
    pub fn orthographic_identity(scale: f64, width: u32, height: u32) -> Result<Self> {
        let proj = Projection::Orthographic { sx: scale, sy: scale, cx: width as f64 / 2.0, cy: height as f64 / 2.0 };
        Self::new(Matrix3::identity(), Vec3::zeros(), proj, width, height)
    }

    pub fn perspective_identity(focal: f64, width: u32, height: u32) -> Result<Self> {
        let proj = Projection::Perspective { fx: focal, fy: focal, cx: width as f64 / 2.0, cy: height as f64 / 2.0 };
        Self::new(Matrix3::identity(), Vec3::zeros(), proj, width, height)
    }

    /// Camera at `eye` looking at `target`; `up` is the world direction that
    /// appears upward in the image.
    pub fn look_at(eye: Point3, target: Point3, up: Vec3, projection: Projection, width: u32, height: u32) -> Result<Self> {
        let forward = target - eye;
        if forward.norm() < 1e-12 {
            return Err(Error::ConfigInvalid("eye and target coincide".into()));
        }
        let z = forward.normalize();
        let x = z.cross(&up);
        if x.norm() < 1e-12 {
            return Err(Error::ConfigInvalid("up vector is parallel to the viewing direction".into()));
        }
        let x = x.normalize();
        let y = z.cross(&x);
        let rotation = Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
        let translation = -(rotation * eye.coords);
        Self::new(rotation, translation, projection, width, height)
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn projection(&self) -> Projection {
        self.projection
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Camera center in world coordinates.
    pub fn eye(&self) -> Point3 {
        Point3::from(-(self.rotation.transpose() * self.translation))
    }

    /// Viewing direction (camera `+z`) in world coordinates.
    pub fn forward(&self) -> Vec3 {
        self.rotation.row(2).transpose()
    }

    pub fn is_perspective(&self) -> bool {
        matches!(self.projection, Projection::Perspective { .. })
    }

    pub fn to_camera(&self, p: &Point3) -> Vec3 {
        self.rotation * p.coords + self.translation
    }

    /// Whether `p` can be projected and lies in front of the camera.
    /// Orthographic cameras see everything.
    pub fn sees(&self, p: &Point3) -> bool {
        match self.projection {
            Projection::Perspective { .. } => self.to_camera(p).z > MIN_DEPTH,
            Projection::Orthographic { .. } => true,
        }
    }

    pub fn project(&self, p: &Point3) -> Result<Point2> {
        let c = self.to_camera(p);
        match self.projection {
            Projection::Perspective { fx, fy, cx, cy } => {
                if c.z.abs() <= MIN_DEPTH {
                    return Err(Error::DegenerateProjection { depth: c.z });
                }
                Ok(Point2::new(fx * c.x / c.z + cx, fy * c.y / c.z + cy))
            }
            Projection::Orthographic { sx, sy, cx, cy } => Ok(Point2::new(sx * c.x + cx, sy * c.y + cy)),
        }
    }

    pub fn in_image(&self, uv: &Point2) -> bool {
        uv.x >= 0.0 && uv.y >= 0.0 && uv.x < self.width as f64 && uv.y < self.height as f64
    }

    /// Same intrinsics, new pose.
    pub fn with_pose(&self, rotation: Matrix3<f64>, translation: Vec3) -> Result<Self> {
        Self::new(rotation, translation, self.projection, self.width, self.height)
    }

    /// Re-aims the camera from `eye` at `target`, keeping the current image-up direction
    /// as close as possible.
    pub fn reaimed(&self, eye: Point3, target: Point3) -> Result<Self> {
        let up = -self.rotation.row(1).transpose();
        Self::look_at(eye, target, up, self.projection, self.width, self.height)
    }
}

/// Rotation of `angle` radians about `axis`.
pub fn axis_rotation(axis: &Vec3, angle: f64) -> Matrix3<f64> {
    Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(*axis), angle).into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthographic_identity_origin_hits_principal_point() {
        let cam = Camera::orthographic_identity(1.0, 640, 480).unwrap();
        let uv = cam.project(&Point3::origin()).unwrap();
        assert_eq!(uv, Point2::new(320.0, 240.0));
    }

    #[test]
    fn orthographic_is_affine() {
        let cam = Camera::orthographic_identity(100.0, 640, 480).unwrap();
        let uv = cam.project(&Point3::new(0.1, 0.0, 0.0)).unwrap();
        assert!((uv.x - 330.0).abs() < 1e-12);
        assert_eq!(uv.y, 240.0);
    }

    #[test]
    fn perspective_pinhole() {
        // u = 500 * 0.2 / 2 + cx = cx + 50, v = 500 * 0.1 / 2 + cy = cy + 25
        let cam = Camera::perspective_identity(500.0, 1500, 600).unwrap();
        let uv = cam.project(&Point3::new(0.2, 0.1, 2.0)).unwrap();
        assert!((uv.x - 800.0).abs() < 1e-12);
        assert!((uv.y - 325.0).abs() < 1e-12);
    }

    #[test]
    fn perspective_rejects_camera_plane() {
        let cam = Camera::perspective_identity(500.0, 100, 100).unwrap();
        assert!(matches!(cam.project(&Point3::new(1.0, 1.0, 0.0)), Err(Error::DegenerateProjection { .. })));
        assert!(matches!(cam.project(&Point3::new(1.0, 1.0, 5e-10)), Err(Error::DegenerateProjection { .. })));
    }

    #[test]
    fn invalid_intrinsics_rejected() {
        let bad = Projection::Perspective { fx: 0.0, fy: 1.0, cx: 0.0, cy: 0.0 };
        assert!(Camera::new(Matrix3::identity(), Vec3::zeros(), bad, 10, 10).is_err());
        assert!(Camera::orthographic_identity(1.0, 0, 10).is_err());
        let skew = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        let proj = Projection::Orthographic { sx: 1.0, sy: 1.0, cx: 0.0, cy: 0.0 };
        assert!(Camera::new(skew, Vec3::zeros(), proj, 10, 10).is_err());
    }

    #[test]
    fn look_at_centers_target() {
        let proj = Projection::Perspective { fx: 1000.0, fy: 1000.0, cx: 750.0, cy: 300.0 };
        let target = Point3::new(0.1, 0.4, 0.8);
        let eye = Point3::new(0.5, 1.0, 3.5);
        let cam = Camera::look_at(eye, target, Vec3::y(), proj, 1500, 600).unwrap();
        let uv = cam.project(&target).unwrap();
        assert!((uv.x - 750.0).abs() < 1e-9 && (uv.y - 300.0).abs() < 1e-9);
        assert!((cam.eye() - eye).norm() < 1e-12);
        // world up projects upward (smaller v)
        let above = cam.project(&(target + Vec3::y() * 0.1)).unwrap();
        assert!(above.y < 300.0);
    }
}
