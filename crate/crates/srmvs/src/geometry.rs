//! Pinhole camera model, rigid poses, and projective operations.
//!
//! Convention: integer pixel coordinate (u, v) addresses the CENTER of
//! pixel (u, v). Poses are stored world-to-camera.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::image::Image;

#[derive(Debug, Clone, PartialEq)]
pub struct PinholeCamera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub k1: f64,
    pub k2: f64,
    pub width: usize,
    pub height: usize,
}

impl PinholeCamera {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        k1: f64,
        k2: f64,
        width: usize,
        height: usize,
    ) -> Result<Self> {
        if fx <= 0.0 || fy <= 0.0 {
            return Err(Error::invalid("focal lengths must be positive"));
        }
        if cx < 0.0 || cx >= width as f64 || cy < 0.0 || cy >= height as f64 {
            return Err(Error::invalid("principal point must lie inside the image"));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            k1,
            k2,
            width,
            height,
        })
    }

    pub fn ideal(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        Self::new(fx, fy, cx, cy, 0.0, 0.0, width, height)
    }

    pub fn has_distortion(&self) -> bool {
        self.k1 != 0.0 || self.k2 != 0.0
    }

    /// Applies the two-coefficient radial polynomial to normalized coords.
    #[inline]
    pub fn distort(&self, xn: f64, yn: f64) -> (f64, f64) {
        let r2 = xn * xn + yn * yn;
        let f = 1.0 + r2 * (self.k1 + r2 * self.k2);
        (xn * f, yn * f)
    }

    /// Inverts `distort` by fixed-point iteration (10 rounds, 1e-10 stop).
    pub fn undistort(&self, xd: f64, yd: f64) -> (f64, f64) {
        if !self.has_distortion() {
            return (xd, yd);
        }
        let mut xn = xd;
        let mut yn = yd;
        for _ in 0..10 {
            let r2 = xn * xn + yn * yn;
            let f = 1.0 + r2 * (self.k1 + r2 * self.k2);
            let nx = xd / f;
            let ny = yd / f;
            let delta = (nx - xn).abs().max((ny - yn).abs());
            xn = nx;
            yn = ny;
            if delta < 1e-10 {
                break;
            }
        }
        (xn, yn)
    }

    /// Normalized camera-frame coords -> pixel coords, distortion applied.
    #[inline]
    pub fn normalized_to_pixel(&self, xn: f64, yn: f64) -> (f64, f64) {
        let (xd, yd) = self.distort(xn, yn);
        (self.fx * xd + self.cx, self.fy * yd + self.cy)
    }

    /// Pixel coords -> undistorted normalized camera-frame coords.
    #[inline]
    pub fn pixel_to_normalized(&self, u: f64, v: f64) -> (f64, f64) {
        let xd = (u - self.cx) / self.fx;
        let yd = (v - self.cy) / self.fy;
        self.undistort(xd, yd)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let gram = rotation.transpose() * rotation;
        let err = (gram - Matrix3::identity()).abs().max();
        if err > 1e-9 {
            return Err(Error::invalid(format!("rotation not orthonormal (residual {err:.2e})")));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("rotation determinant {det} != +1")));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    #[inline]
    pub fn world_to_camera(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    #[inline]
    pub fn camera_to_world(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.transpose() * (p - self.translation)
    }

    /// Camera center in world coordinates.
    pub fn center(&self) -> Vector3<f64> {
        -(self.rotation.transpose() * self.translation)
    }
}

#[derive(Debug, Clone)]
pub struct View {
    pub image: Image,
    pub camera: PinholeCamera,
    pub pose: Pose,
    pub name: String,
}

impl View {
    pub fn new(image: Image, camera: PinholeCamera, pose: Pose, name: impl Into<String>) -> Result<Self> {
        if image.width() != camera.width || image.height() != camera.height {
            return Err(Error::invalid(format!(
                "image {}x{} does not match camera {}x{}",
                image.width(),
                image.height(),
                camera.width,
                camera.height
            )));
        }
        Ok(Self {
            image,
            camera,
            pose,
            name: name.into(),
        })
    }
}

/// Result of projecting a world point into a view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub u: f64,
    pub v: f64,
    pub depth: f64,
}

/// Projects a world point; `None` when the point is behind the camera.
#[inline]
pub fn project(camera: &PinholeCamera, pose: &Pose, point: &Vector3<f64>) -> Option<Projection> {
    let pc = pose.world_to_camera(point);
    if pc.z <= 0.0 {
        return None;
    }
    let (u, v) = camera.normalized_to_pixel(pc.x / pc.z, pc.y / pc.z);
    Some(Projection { u, v, depth: pc.z })
}

/// Back-projects pixel (u, v) at the given depth into world coordinates.
pub fn unproject(camera: &PinholeCamera, pose: &Pose, u: f64, v: f64, depth: f64) -> Result<Vector3<f64>> {
    if !(depth > 0.0) {
        return Err(Error::invalid(format!("depth must be positive, got {depth}")));
    }
    let (xn, yn) = camera.pixel_to_normalized(u, v);
    let pc = Vector3::new(xn * depth, yn * depth, depth);
    Ok(pose.camera_to_world(&pc))
}

/// Resamples the view onto a zero-distortion camera with identical
/// intrinsics and dimensions.
pub fn undistort_view(view: &View) -> View {
    let cam = &view.camera;
    let mut out_cam = cam.clone();
    out_cam.k1 = 0.0;
    out_cam.k2 = 0.0;
    if !cam.has_distortion() {
        return View {
            image: view.image.clone(),
            camera: out_cam,
            pose: view.pose.clone(),
            name: view.name.clone(),
        };
    }
    let w = view.image.width();
    let h = view.image.height();
    let ch = view.image.channels();
    let mut data = Vec::with_capacity(w * h * ch);
    for y in 0..h {
        for x in 0..w {
            let xn = (x as f64 - cam.cx) / cam.fx;
            let yn = (y as f64 - cam.cy) / cam.fy;
            let (us, vs) = cam.normalized_to_pixel(xn, yn);
            for c in 0..ch {
                let v = crate::sisr::sample_bicubic_channel(&view.image, us, vs, c);
                data.push(v.clamp(0.0, 1.0));
            }
        }
    }
    View {
        image: Image::from_data(w, h, ch, data).expect("resampled image valid"),
        camera: out_cam,
        pose: view.pose.clone(),
        name: view.name.clone(),
    }
}
