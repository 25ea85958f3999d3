//! Synthetic scenes: ray-cast renders of textured primitives with exact
//! per-view depth/normal maps and a ground-truth point cloud.
//!
//! Scene units are meters; world axes follow the camera convention
//! (x right, y down, z forward). Rendering is a pure function of the
//! scene spec, so identical specs give bit-identical outputs.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fusion::PointCloud;
use crate::geometry::{project, unproject, PinholeCamera, Pose, View};
use crate::image::Image;
use crate::patchmatch::DepthMap;
use crate::sisr::{resample_bicubic, scale_intrinsics, ScaleSpec, SequenceSet, SetLabel};

const LIGHT_DIR: Vector3<f64> = Vector3::new(0.3, 0.5, 0.8);
const AMBIENT: f64 = 0.25;

/// Procedural texture: seeded checker + band-limited value noise, both
/// scaled by `amplitude`. Amplitude 0 gives a constant-albedo surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Texture {
    pub checker_scale: f64,
    pub amplitude: f64,
    pub noise_seed: u64,
}

impl Texture {
    pub fn flat() -> Self {
        Self {
            checker_scale: 0.25,
            amplitude: 0.0,
            noise_seed: 0,
        }
    }

    fn albedo(&self, p: &Vector3<f64>) -> f64 {
        if self.amplitude == 0.0 {
            return 0.5;
        }
        let s = self.checker_scale;
        let parity = ((p.x / s).floor() + (p.y / s).floor() + (p.z / s).floor()) as i64;
        let checker = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let n = 0.6 * value_noise3(p / (s / 2.0), self.noise_seed)
            + 0.4 * value_noise3(p / (s / 5.0), self.noise_seed ^ 0x9e37);
        (0.5 + self.amplitude * (0.35 * checker + 0.65 * n)).clamp(0.02, 0.98)
    }
}

fn lattice_hash(ix: i64, iy: i64, iz: i64, seed: u64) -> f64 {
    let mut h = seed
        .wrapping_add(ix as u64)
        .wrapping_mul(0x9e3779b97f4a7c15);
    h ^= h >> 30;
    h = h.wrapping_add(iy as u64).wrapping_mul(0xbf58476d1ce4e5b9);
    h ^= h >> 27;
    h = h.wrapping_add(iz as u64).wrapping_mul(0x94d049bb133111eb);
    h ^= h >> 31;
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// Trilinear value noise in [-1, 1], pure in (position, seed).
fn value_noise3(p: Vector3<f64>, seed: u64) -> f64 {
    let fx = p.x.floor();
    let fy = p.y.floor();
    let fz = p.z.floor();
    let (ix, iy, iz) = (fx as i64, fy as i64, fz as i64);
    let (tx, ty, tz) = (p.x - fx, p.y - fy, p.z - fz);
    let mut acc = 0.0;
    for dz in 0..2 {
        for dy in 0..2 {
            for dx in 0..2 {
                let w = (if dx == 0 { 1.0 - tx } else { tx })
                    * (if dy == 0 { 1.0 - ty } else { ty })
                    * (if dz == 0 { 1.0 - tz } else { tz });
                acc += w * lattice_hash(ix + dx, iy + dy, iz + dz, seed);
            }
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Finite rectangle: center, two orthogonal half-extent axes.
    Plane {
        center: Vector3<f64>,
        axis_u: Vector3<f64>,
        axis_v: Vector3<f64>,
    },
    Sphere {
        center: Vector3<f64>,
        radius: f64,
    },
    /// Axis-aligned box.
    Box {
        min: Vector3<f64>,
        max: Vector3<f64>,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub t: f64,
    pub point: Vector3<f64>,
    pub normal: Vector3<f64>,
}

impl Shape {
    /// Nearest intersection with ray o + t*d for t > eps. `d` need not be
    /// normalized; t is in units of `d`.
    pub fn intersect(&self, o: &Vector3<f64>, d: &Vector3<f64>) -> Option<Hit> {
        const EPS: f64 = 1e-9;
        match self {
            Shape::Plane {
                center,
                axis_u,
                axis_v,
            } => {
                let n = axis_u.cross(axis_v).normalize();
                let denom = d.dot(&n);
                if denom.abs() < 1e-15 {
                    return None;
                }
                let t = (center - o).dot(&n) / denom;
                if t <= EPS {
                    return None;
                }
                let p = o + d * t;
                let rel = p - center;
                let eu = axis_u.norm();
                let ev = axis_v.norm();
                if rel.dot(&(axis_u / eu)).abs() > eu || rel.dot(&(axis_v / ev)).abs() > ev {
                    return None;
                }
                Some(Hit {
                    t,
                    point: p,
                    normal: n,
                })
            }
            Shape::Sphere { center, radius } => {
                let oc = o - center;
                let a = d.dot(d);
                let b = 2.0 * d.dot(&oc);
                let c = oc.dot(&oc) - radius * radius;
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let t0 = (-b - sq) / (2.0 * a);
                let t1 = (-b + sq) / (2.0 * a);
                let t = if t0 > EPS {
                    t0
                } else if t1 > EPS {
                    t1
                } else {
                    return None;
                };
                let p = o + d * t;
                Some(Hit {
                    t,
                    point: p,
                    normal: (p - center).normalize(),
                })
            }
            Shape::Box { min, max } => {
                let mut tmin = f64::NEG_INFINITY;
                let mut tmax = f64::INFINITY;
                let mut axis_min = 0usize;
                for a in 0..3 {
                    let inv = 1.0 / d[a];
                    let (mut t0, mut t1) = ((min[a] - o[a]) * inv, (max[a] - o[a]) * inv);
                    if t0 > t1 {
                        std::mem::swap(&mut t0, &mut t1);
                    }
                    if t0 > tmin {
                        tmin = t0;
                        axis_min = a;
                    }
                    tmax = tmax.min(t1);
                    if tmin > tmax {
                        return None;
                    }
                }
                let t = if tmin > EPS {
                    tmin
                } else {
                    return None; // rays starting inside the box are unused here
                };
                let p = o + d * t;
                let mut normal = Vector3::zeros();
                normal[axis_min] = if d[axis_min] > 0.0 { -1.0 } else { 1.0 };
                Some(Hit {
                    t,
                    point: p,
                    normal,
                })
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Shape::Plane { axis_u, axis_v, .. } => 4.0 * axis_u.norm() * axis_v.norm(),
            Shape::Sphere { radius, .. } => 4.0 * std::f64::consts::PI * radius * radius,
            Shape::Box { min, max } => {
                let e = max - min;
                2.0 * (e.x * e.y + e.y * e.z + e.x * e.z)
            }
        }
    }

    /// Uniform surface sample.
    pub fn sample_surface(&self, rng: &mut ChaCha8Rng) -> (Vector3<f64>, Vector3<f64>) {
        match self {
            Shape::Plane {
                center,
                axis_u,
                axis_v,
            } => {
                let su = rng.gen::<f64>() * 2.0 - 1.0;
                let sv = rng.gen::<f64>() * 2.0 - 1.0;
                let n = axis_u.cross(axis_v).normalize();
                (center + axis_u * su + axis_v * sv, n)
            }
            Shape::Sphere { center, radius } => {
                // Uniform direction via normalized Gaussian-free rejection.
                loop {
                    let v = Vector3::new(
                        rng.gen::<f64>() * 2.0 - 1.0,
                        rng.gen::<f64>() * 2.0 - 1.0,
                        rng.gen::<f64>() * 2.0 - 1.0,
                    );
                    let n = v.norm();
                    if n > 1e-6 && n <= 1.0 {
                        let dir = v / n;
                        return (center + dir * *radius, dir);
                    }
                }
            }
            Shape::Box { min, max } => {
                let e = max - min;
                let areas = [e.y * e.z, e.x * e.z, e.x * e.y]; // per axis pair (both faces)
                let total: f64 = areas.iter().map(|a| 2.0 * a).sum();
                let mut pick = rng.gen::<f64>() * total;
                for axis in 0..3 {
                    for side in 0..2 {
                        let a = areas[axis];
                        if pick <= a || (axis == 2 && side == 1) {
                            let mut p = Vector3::new(
                                min.x + rng.gen::<f64>() * e.x,
                                min.y + rng.gen::<f64>() * e.y,
                                min.z + rng.gen::<f64>() * e.z,
                            );
                            p[axis] = if side == 0 { min[axis] } else { max[axis] };
                            let mut n = Vector3::zeros();
                            n[axis] = if side == 0 { -1.0 } else { 1.0 };
                            return (p, n);
                        }
                        pick -= a;
                    }
                }
                unreachable!()
            }
        }
    }

    /// Distance from a point to this surface (analytic, used by tests).
    pub fn surface_distance(&self, p: &Vector3<f64>) -> f64 {
        match self {
            Shape::Plane {
                center,
                axis_u,
                axis_v,
            } => {
                let n = axis_u.cross(axis_v).normalize();
                let rel = p - center;
                let eu = axis_u.norm();
                let ev = axis_v.norm();
                let cu = rel.dot(&(axis_u / eu)).clamp(-eu, eu);
                let cv = rel.dot(&(axis_v / ev)).clamp(-ev, ev);
                let nearest = center + (axis_u / eu) * cu + (axis_v / ev) * cv;
                let off_plane = rel.dot(&n);
                let in_plane = (p - n * off_plane - nearest).norm();
                (off_plane * off_plane + in_plane * in_plane).sqrt()
            }
            Shape::Sphere { center, radius } => ((p - center).norm() - radius).abs(),
            Shape::Box { min, max } => {
                // Distance to the box boundary.
                let mut inside = true;
                let mut dist_out2 = 0.0;
                let mut min_face = f64::INFINITY;
                for a in 0..3 {
                    if p[a] < min[a] {
                        dist_out2 += (min[a] - p[a]).powi(2);
                        inside = false;
                    } else if p[a] > max[a] {
                        dist_out2 += (p[a] - max[a]).powi(2);
                        inside = false;
                    } else {
                        min_face = min_face.min((p[a] - min[a]).min(max[a] - p[a]));
                    }
                }
                if inside {
                    min_face
                } else {
                    dist_out2.sqrt()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub shape: Shape,
    pub texture: Texture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    Ring,
    Arc,
}

/// Cameras evenly spaced on a circle (or an arc of it) around `look_at`,
/// in the world x-z plane at `radius`, all aimed at `look_at`.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraLayout {
    pub kind: LayoutKind,
    pub count: usize,
    pub radius: f64,
    pub look_at: Vector3<f64>,
    /// Total angular span in degrees (Arc only; Ring uses 360).
    pub span_deg: f64,
    /// Vertical offset of the camera positions (world y, positive down).
    pub elevation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub name: String,
    pub primitives: Vec<Primitive>,
    pub cameras: CameraLayout,
    pub width: usize,
    pub height: usize,
    /// Focal length in pixels at the spec resolution (fx = fy).
    pub focal: f64,
    pub rng_seed: u64,
    /// Uniform ground-truth surface samples per square meter.
    pub cloud_density: f64,
}

#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub cloud: PointCloud,
    pub depth_maps: Vec<DepthMap>,
}

impl SceneSpec {
    fn intersect(&self, o: &Vector3<f64>, d: &Vector3<f64>) -> Option<(Hit, usize)> {
        let mut best: Option<(Hit, usize)> = None;
        for (i, prim) in self.primitives.iter().enumerate() {
            if let Some(hit) = prim.shape.intersect(o, d) {
                if best.as_ref().map_or(true, |(b, _)| hit.t < b.t) {
                    best = Some((hit, i));
                }
            }
        }
        best
    }

    pub fn surface_distance(&self, p: &Vector3<f64>) -> f64 {
        self.primitives
            .iter()
            .map(|pr| pr.shape.surface_distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    fn camera_poses(&self) -> Vec<(PinholeCamera, Pose)> {
        let lay = &self.cameras;
        let span = match lay.kind {
            LayoutKind::Ring => 360.0,
            LayoutKind::Arc => lay.span_deg,
        };
        let cam = PinholeCamera::ideal(
            self.focal,
            self.focal,
            (self.width as f64 - 1.0) / 2.0,
            (self.height as f64 - 1.0) / 2.0,
            self.width,
            self.height,
        )
        .expect("scene camera");
        (0..lay.count)
            .map(|i| {
                let frac = if lay.count == 1 {
                    0.5
                } else if lay.kind == LayoutKind::Ring {
                    i as f64 / lay.count as f64
                } else {
                    i as f64 / (lay.count - 1) as f64
                };
                let theta = (frac - 0.5) * span.to_radians();
                let pos = lay.look_at
                    + Vector3::new(-lay.radius * theta.sin(), lay.elevation, -lay.radius * theta.cos());
                (cam.clone(), look_at_pose(&pos, &lay.look_at))
            })
            .collect()
    }

    /// Checks structural constraints and that every camera sees at least
    /// half of the primary (first) primitive.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.primitives.is_empty() {
            problems.push("scene needs at least one primitive".to_string());
        }
        if self.cameras.count < 2 {
            problems.push("scene needs at least two cameras".to_string());
        }
        if self.width == 0 || self.height == 0 || self.focal <= 0.0 {
            problems.push("invalid resolution or focal length".to_string());
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let primary = &self.primitives[0];
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed ^ 0x5ce0e9);
        let samples: Vec<Vector3<f64>> = (0..256)
            .map(|_| primary.shape.sample_surface(&mut rng).0)
            .collect();
        for (ci, (cam, pose)) in self.camera_poses().iter().enumerate() {
            let o = pose.center();
            let visible = samples
                .iter()
                .filter(|p| {
                    let Some(pr) = project(cam, pose, p) else {
                        return false;
                    };
                    if pr.u < 0.0 || pr.v < 0.0 || pr.u > (cam.width - 1) as f64 || pr.v > (cam.height - 1) as f64 {
                        return false;
                    }
                    let d = *p - o;
                    match self.intersect(&o, &d) {
                        Some((hit, _)) => (hit.t - 1.0).abs() < 1e-6,
                        None => false,
                    }
                })
                .count();
            if (visible as f64) < 0.5 * samples.len() as f64 {
                problems.push(format!(
                    "camera {ci} sees only {visible}/256 samples of the primary primitive"
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// World-to-camera pose for a camera at `pos` aimed at `target`
/// (world y is the down axis).
pub fn look_at_pose(pos: &Vector3<f64>, target: &Vector3<f64>) -> Pose {
    let z = (target - pos).normalize();
    let up = Vector3::new(0.0, 1.0, 0.0);
    let mut x = up.cross(&z);
    if x.norm() < 1e-9 {
        x = Vector3::new(1.0, 0.0, 0.0);
    } else {
        x = x.normalize();
    }
    let y = z.cross(&x);
    let rot = Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
    let t = -(rot * pos);
    Pose::new(rot, t).expect("look-at pose is a rotation")
}

fn shade(normal_facing: &Vector3<f64>) -> f64 {
    let l = LIGHT_DIR.normalize();
    AMBIENT + (1.0 - AMBIENT) * normal_facing.dot(&-l).max(0.0)
}

/// Renders the scene: HR images plus exact depth/normal maps and the
/// ground-truth cloud (uniform surface samples and the per-pixel surface
/// points, all filtered for visibility).
pub fn render(spec: &SceneSpec) -> Result<(SequenceSet, GroundTruth)> {
    spec.validate()?;
    let cams = spec.camera_poses();
    let mut views = Vec::with_capacity(cams.len());
    let mut depth_maps = Vec::with_capacity(cams.len());
    let mut cloud_points: Vec<Vector3<f64>> = Vec::new();

    for (ci, (cam, pose)) in cams.iter().enumerate() {
        let o = pose.center();
        let rt = pose.rotation().transpose();
        let w = spec.width;
        let h = spec.height;
        let mut pix = vec![0.0f64; w * h];
        let mut map = DepthMap {
            width: w,
            height: h,
            depth: vec![f64::NAN; w * h],
            normal: Some(vec![[f64::NAN; 3]; w * h]),
            cost: vec![0.0; w * h],
        };
        for y in 0..h {
            for x in 0..w {
                let dir_cam = Vector3::new(
                    (x as f64 - cam.cx) / cam.fx,
                    (y as f64 - cam.cy) / cam.fy,
                    1.0,
                );
                let dir = rt * dir_cam;
                let Some((hit, _)) = spec.intersect(&o, &dir) else {
                    continue; // background stays at intensity 0, depth invalid
                };
                // dir has camera z = 1, so t is the camera-frame depth.
                let i = y * w + x;
                map.depth[i] = hit.t;
                let mut n_cam = pose.rotation() * hit.normal;
                if n_cam.dot(&dir_cam) > 0.0 {
                    n_cam = -n_cam;
                }
                map.normal.as_mut().unwrap()[i] = [n_cam.x, n_cam.y, n_cam.z];
                // 3x3 supersampled shading: band-limits the texture so the
                // rendered images interpolate cleanly during matching.
                let mut acc = 0.0;
                let mut hits = 0usize;
                for sy in -1i32..=1 {
                    for sx in -1i32..=1 {
                        let sub = rt * Vector3::new(
                            (x as f64 + sx as f64 / 3.0 - cam.cx) / cam.fx,
                            (y as f64 + sy as f64 / 3.0 - cam.cy) / cam.fy,
                            1.0,
                        );
                        let Some((sh, spi)) = spec.intersect(&o, &sub) else {
                            continue;
                        };
                        let mut sn = pose.rotation() * sh.normal;
                        if sn.z > 0.0 {
                            sn = -sn;
                        }
                        let facing = rt * sn;
                        acc += spec.primitives[spi].texture.albedo(&sh.point) * shade(&facing);
                        hits += 1;
                    }
                }
                pix[i] = (acc / hits.max(1) as f64).clamp(0.0, 1.0);
            }
        }
        let image = Image::from_data(w, h, 1, pix)?;
        views.push(View::new(image, cam.clone(), pose.clone(), format!("view{ci:02}"))?);
        depth_maps.push(map);
    }

    // Per-pixel surface points (exact unprojections of the depth maps).
    for (view, map) in views.iter().zip(&depth_maps) {
        for y in 0..map.height {
            for x in 0..map.width {
                if map.is_valid(x, y) {
                    cloud_points.push(unproject(
                        &view.camera,
                        &view.pose,
                        x as f64,
                        y as f64,
                        map.depth_at(x, y),
                    )?);
                }
            }
        }
    }

    // Uniform surface samples, kept when visible from at least one camera.
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed ^ 0xc10d);
    for prim in &spec.primitives {
        let n = (prim.shape.area() * spec.cloud_density).ceil() as usize;
        for _ in 0..n {
            let (p, _) = prim.shape.sample_surface(&mut rng);
            let visible = cams.iter().any(|(cam, pose)| {
                let Some(pr) = project(cam, pose, &p) else {
                    return false;
                };
                if pr.u < 0.0 || pr.v < 0.0 || pr.u > (cam.width - 1) as f64 || pr.v > (cam.height - 1) as f64 {
                    return false;
                }
                let o = pose.center();
                let d = p - o;
                matches!(spec.intersect(&o, &d), Some((hit, _)) if (hit.t - 1.0).abs() < 1e-6)
            });
            if visible {
                cloud_points.push(p);
            }
        }
    }

    let set = SequenceSet::new(SetLabel::Hr, views)?;
    Ok((
        set,
        GroundTruth {
            cloud: PointCloud {
                points: cloud_points,
                colors: None,
                normals: None,
            },
            depth_maps,
        },
    ))
}

/// Renders HR at the spec resolution and derives LR by bicubic
/// down-sampling with 1/k (shared ground truth, never a second render).
pub fn make_lr_hr_pair(spec: &SceneSpec, k: ScaleSpec) -> Result<(SequenceSet, SequenceSet, GroundTruth)> {
    let f = k.factor();
    let kw = spec.width as f64 / f;
    let kh = spec.height as f64 / f;
    if kw.fract() != 0.0 || kh.fract() != 0.0 {
        return Err(Error::invalid(format!(
            "resolution {}x{} is not divisible by scale {k}",
            spec.width, spec.height
        )));
    }
    let (hr, gt) = render(spec)?;
    let inv = k.inverse();
    let mut lr_views = Vec::with_capacity(hr.views.len());
    for v in &hr.views {
        let image = resample_bicubic(&v.image, inv)?;
        let camera = scale_intrinsics(&v.camera, inv);
        lr_views.push(View::new(image, camera, v.pose.clone(), v.name.clone())?);
    }
    let lr = SequenceSet::new(SetLabel::Lr, lr_views)?;
    Ok((lr, hr, gt))
}

fn fronto_plane(z: f64, half_w: f64, half_h: f64, texture: Texture) -> Primitive {
    Primitive {
        shape: Shape::Plane {
            center: Vector3::new(0.0, 0.0, z),
            axis_u: Vector3::new(half_w, 0.0, 0.0),
            axis_v: Vector3::new(0.0, half_h, 0.0),
        },
        texture,
    }
}

/// Plane pitched about the x-axis by `tilt_deg` (top edge farther away).
fn tilted_plane(z: f64, half_w: f64, half_h: f64, tilt_deg: f64, texture: Texture) -> Primitive {
    let a = tilt_deg.to_radians();
    Primitive {
        shape: Shape::Plane {
            center: Vector3::new(0.0, 0.0, z),
            axis_u: Vector3::new(half_w, 0.0, 0.0),
            axis_v: Vector3::new(0.0, half_h * a.cos(), half_h * a.sin()),
        },
        texture,
    }
}

fn textured(seed: u64) -> Texture {
    Texture {
        checker_scale: 0.22,
        amplitude: 0.42,
        noise_seed: seed,
    }
}

fn arc_cams(count: usize, radius: f64, span_deg: f64, look_at_z: f64) -> CameraLayout {
    CameraLayout {
        kind: LayoutKind::Arc,
        count,
        radius,
        look_at: Vector3::new(0.0, 0.0, look_at_z),
        span_deg,
        elevation: 0.0,
    }
}

fn base_spec(name: &str, prims: Vec<Primitive>, cams: CameraLayout, seed: u64) -> SceneSpec {
    SceneSpec {
        name: name.to_string(),
        primitives: prims,
        cameras: cams,
        width: 256,
        height: 192,
        focal: 230.0,
        rng_seed: seed,
        cloud_density: 30_000.0,
    }
}

/// Small low-contrast marker giving textureless scenes a localized
/// matchable feature, as real "textureless" sequences have.
fn marker_box(x: f64, y: f64, z: f64) -> Primitive {
    Primitive {
        shape: Shape::Box {
            min: Vector3::new(x - 0.09, y - 0.09, z - 0.05),
            max: Vector3::new(x + 0.09, y + 0.09, z + 0.05),
        },
        texture: Texture {
            checker_scale: 0.05,
            amplitude: 0.05,
            noise_seed: 77,
        },
    }
}

/// The fixed verification scenes: four textured and two textureless,
/// 256x192, 4-6 cameras each.
pub fn standard_scenes() -> Vec<SceneSpec> {
    vec![
        base_spec(
            "tex_plane",
            vec![fronto_plane(2.0, 1.5, 0.95, textured(11))],
            arc_cams(4, 2.0, 22.0, 2.0),
            101,
        ),
        base_spec(
            "tex_slant",
            vec![tilted_plane(2.2, 1.9, 1.2, 15.0, textured(23))],
            arc_cams(4, 2.2, 18.0, 2.2),
            102,
        ),
        base_spec(
            "tex_box",
            vec![
                fronto_plane(2.6, 2.15, 1.18, textured(31)),
                Primitive {
                    shape: Shape::Box {
                        min: Vector3::new(-0.28, -0.22, 2.1),
                        max: Vector3::new(0.28, 0.22, 2.45),
                    },
                    texture: textured(37),
                },
            ],
            arc_cams(5, 2.1, 16.0, 2.2),
            103,
        ),
        base_spec(
            "tex_sphere",
            vec![
                fronto_plane(2.7, 2.15, 1.2, textured(41)),
                Primitive {
                    shape: Shape::Sphere {
                        center: Vector3::new(0.0, 0.0, 2.4),
                        radius: 0.28,
                    },
                    texture: textured(43),
                },
            ],
            arc_cams(5, 2.1, 20.0, 2.3),
            104,
        ),
        base_spec(
            "plain_wall",
            vec![fronto_plane(2.0, 1.5, 0.95, Texture::flat()), marker_box(0.0, 0.0, 1.95)],
            arc_cams(4, 2.0, 22.0, 2.0),
            105,
        ),
        base_spec(
            "plain_slant",
            vec![
                tilted_plane(2.2, 1.9, 1.2, 15.0, Texture::flat()),
                marker_box(0.3, -0.2, 2.1),
            ],
            arc_cams(4, 2.2, 18.0, 2.2),
            106,
        ),
    ]
}

/// Looks up a scene by name: the standard scenes plus two small rigs used
/// for focused tests (`plane3`, `tiny`).
pub fn scene_by_name(name: &str) -> Option<SceneSpec> {
    if name == "plane3" {
        let mut s = base_spec(
            "plane3",
            vec![fronto_plane(2.0, 1.5, 0.95, textured(55))],
            arc_cams(3, 2.0, 36.0, 2.0),
            107,
        );
        s.cloud_density = 20_000.0;
        return Some(s);
    }
    if name == "tiny" {
        let mut s = base_spec(
            "tiny",
            vec![fronto_plane(2.0, 1.5, 0.95, textured(61))],
            arc_cams(3, 2.0, 16.0, 2.0),
            108,
        );
        s.width = 64;
        s.height = 48;
        s.focal = 56.0;
        s.cloud_density = 5_000.0;
        return Some(s);
    }
    standard_scenes().into_iter().find(|s| s.name == name)
}
