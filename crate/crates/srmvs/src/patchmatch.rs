//! Randomized PatchMatch depth/normal estimation with a bilateral-weighted
//! NCC photoconsistency cost.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::View;
use crate::image::Image;

/// Depth/normal guess for one pixel. Normals live in the camera frame of
/// the reference view and face the camera (normal . ray < 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    pub depth: f64,
    pub normal: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchMatchConfig {
    pub window_radius: usize,
    pub min_ncc: f64,
    pub iterations: usize,
    pub depth_min: f64,
    pub depth_max: f64,
    pub perturbation_halving: usize,
    /// Number of best per-source costs averaged per pixel; 0 means all.
    pub source_views_per_pixel: usize,
    pub textureless_mode: bool,
    pub rng_seed: u64,
    pub sigma_color: f64,
}

impl Default for PatchMatchConfig {
    fn default() -> Self {
        Self {
            window_radius: 5,
            min_ncc: 0.1,
            iterations: 5,
            depth_min: 0.5,
            depth_max: 10.0,
            perturbation_halving: 3,
            source_views_per_pixel: 0,
            textureless_mode: false,
            rng_seed: 0,
            sigma_color: 0.2,
        }
    }
}

impl PatchMatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_radius < 1 {
            return Err(Error::invalid("window_radius must be >= 1"));
        }
        if !(self.depth_min > 0.0 && self.depth_min < self.depth_max) {
            return Err(Error::invalid("need 0 < depth_min < depth_max"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("iterations must be >= 1"));
        }
        if !(self.min_ncc >= -1.0 && self.min_ncc <= 1.0) {
            return Err(Error::invalid("min_ncc must lie in [-1, 1]"));
        }
        if !(self.sigma_color > 0.0) {
            return Err(Error::invalid("sigma_color must be positive"));
        }
        Ok(())
    }
}

/// Textureless adaptation: widen the window and lower the NCC threshold
/// by the super-resolution scale factor.
pub fn adapt_textureless(cfg: &PatchMatchConfig, k: f64) -> PatchMatchConfig {
    let mut out = cfg.clone();
    out.window_radius = (k * cfg.window_radius as f64).round() as usize;
    out.min_ncc = cfg.min_ncc / k;
    out.textureless_mode = true;
    out
}

/// Per-pixel depth, normal, and best photoconsistency cost. Invalid
/// pixels carry NaN depth.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub width: usize,
    pub height: usize,
    pub depth: Vec<f64>,
    pub normal: Option<Vec<[f64; 3]>>,
    pub cost: Vec<f64>,
}

impl DepthMap {
    pub fn new_invalid(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            depth: vec![f64::NAN; width * height],
            normal: None,
            cost: vec![f64::NAN; width * height],
        }
    }

    #[inline]
    pub fn idx(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn depth_at(&self, x: usize, y: usize) -> f64 {
        self.depth[self.idx(x, y)]
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.depth[self.idx(x, y)].is_finite()
    }

    pub fn normal_at(&self, x: usize, y: usize) -> Option<Vector3<f64>> {
        let n = self.normal.as_ref()?[self.idx(x, y)];
        if n[0].is_finite() {
            Some(Vector3::new(n[0], n[1], n[2]))
        } else {
            None
        }
    }

    pub fn valid_count(&self) -> usize {
        self.depth.iter().filter(|d| d.is_finite()).count()
    }

    pub fn invalidate(&mut self, x: usize, y: usize) {
        let i = self.idx(x, y);
        self.depth[i] = f64::NAN;
        if let Some(n) = self.normal.as_mut() {
            n[i] = [f64::NAN; 3];
        }
    }
}

/// Weighted normalized cross-correlation of two equally sized patches.
/// Returns 0 when either weighted variance is below 1e-12.
pub fn ncc(ref_patch: &[f64], src_patch: &[f64], weights: &[f64]) -> Result<f64> {
    if ref_patch.len() != src_patch.len() || ref_patch.len() != weights.len() {
        return Err(Error::invalid("ncc patch/weight size mismatch"));
    }
    let mut sw = 0.0;
    let mut sa = 0.0;
    let mut sb = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for i in 0..ref_patch.len() {
        let w = weights[i];
        let a = ref_patch[i];
        let b = src_patch[i];
        sw += w;
        sa += w * a;
        sb += w * b;
        saa += w * a * a;
        sbb += w * b * b;
        sab += w * a * b;
    }
    if sw <= 0.0 {
        return Err(Error::invalid("ncc weights must not be all zero"));
    }
    let ma = sa / sw;
    let mb = sb / sw;
    let va = saa / sw - ma * ma;
    let vb = sbb / sw - mb * mb;
    if va < 1e-12 || vb < 1e-12 {
        return Ok(0.0);
    }
    let cov = sab / sw - ma * mb;
    Ok((cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}

/// Bilateral support weights around `center` in the reference view:
/// w = exp(-(dI^2/(2 sc^2) + dist^2/(2 sd^2))). Cells outside the image
/// get weight 0.
pub fn bilateral_weights(
    image: &Image,
    center: (usize, usize),
    r: usize,
    sigma_color: f64,
    sigma_dist: f64,
) -> Vec<f64> {
    let side = 2 * r + 1;
    let mut out = vec![0.0; side * side];
    let (cx, cy) = center;
    let ic = image.luma(cx, cy);
    let inv2sc = 1.0 / (2.0 * sigma_color * sigma_color);
    let inv2sd = 1.0 / (2.0 * sigma_dist * sigma_dist);
    for dy in -(r as i64)..=(r as i64) {
        let y = cy as i64 + dy;
        if y < 0 || y >= image.height() as i64 {
            continue;
        }
        for dx in -(r as i64)..=(r as i64) {
            let x = cx as i64 + dx;
            if x < 0 || x >= image.width() as i64 {
                continue;
            }
            let di = image.luma(x as usize, y as usize) - ic;
            let d2 = (dx * dx + dy * dy) as f64;
            let cell = (dy + r as i64) as usize * side + (dx + r as i64) as usize;
            out[cell] = (-(di * di * inv2sc + d2 * inv2sd)).exp();
        }
    }
    out
}

struct SourceData {
    gray: Image,
    // src <- ref relative transform.
    r_rel: Matrix3<f64>,
    t_rel: Vector3<f64>,
    k_src: Matrix3<f64>,
}

/// Shared per-call matching context.
struct Matcher {
    gray: Image,
    sources: Vec<SourceData>,
    k_ref_inv: Matrix3<f64>,
    cfg: PatchMatchConfig,
    r: i64,
    width: usize,
    height: usize,
}

impl Matcher {
    fn new(reference: &View, sources: &[View], cfg: &PatchMatchConfig) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::invalid("estimate_depth_map needs at least one source view"));
        }
        for v in std::iter::once(reference).chain(sources.iter()) {
            if v.camera.has_distortion() {
                return Err(Error::invalid(format!("view {:?} must be undistorted", v.name)));
            }
        }
        cfg.validate()?;
        let cam = &reference.camera;
        let k_ref_inv = Matrix3::new(
            1.0 / cam.fx,
            0.0,
            -cam.cx / cam.fx,
            0.0,
            1.0 / cam.fy,
            -cam.cy / cam.fy,
            0.0,
            0.0,
            1.0,
        );
        let src_data = sources
            .iter()
            .map(|s| {
                let r_rel = s.pose.rotation() * reference.pose.rotation().transpose();
                let t_rel = s.pose.translation() - r_rel * reference.pose.translation();
                let k_src = Matrix3::new(
                    s.camera.fx,
                    0.0,
                    s.camera.cx,
                    0.0,
                    s.camera.fy,
                    s.camera.cy,
                    0.0,
                    0.0,
                    1.0,
                );
                SourceData {
                    gray: s.image.to_gray(),
                    r_rel,
                    t_rel,
                    k_src,
                }
            })
            .collect();
        Ok(Self {
            gray: reference.image.to_gray(),
            sources: src_data,
            k_ref_inv,
            cfg: cfg.clone(),
            r: cfg.window_radius as i64,
            width: reference.image.width(),
            height: reference.image.height(),
        })
    }

    /// Unit-less ray direction through pixel center, z = 1.
    #[inline]
    fn ray(&self, x: usize, y: usize) -> Vector3<f64> {
        self.k_ref_inv * Vector3::new(x as f64, y as f64, 1.0)
    }

    /// Cost of one hypothesis against one source view.
    fn cost_one(&self, x: usize, y: usize, hyp: &Hypothesis, src: &SourceData, weights: &[f64]) -> f64 {
        let m = self.ray(x, y);
        let plane_d = hyp.normal.dot(&(m * hyp.depth));
        if plane_d.abs() < 1e-12 {
            return 2.0;
        }
        let h = src.k_src * (src.r_rel + src.t_rel * hyp.normal.transpose() / plane_d) * self.k_ref_inv;

        let side = 2 * self.r + 1;
        debug_assert_eq!(weights.len(), (side * side) as usize);
        let mut sw = 0.0;
        let mut sa = 0.0;
        let mut sb = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        let mut sab = 0.0;
        let mut in_ref = 0usize;
        let mut oob = 0usize;
        for dy in -self.r..=self.r {
            let ry = y as i64 + dy;
            if ry < 0 || ry >= self.height as i64 {
                continue;
            }
            for dx in -self.r..=self.r {
                let rx = x as i64 + dx;
                if rx < 0 || rx >= self.width as i64 {
                    continue;
                }
                in_ref += 1;
                let hx = h[(0, 0)] * rx as f64 + h[(0, 1)] * ry as f64 + h[(0, 2)];
                let hy = h[(1, 0)] * rx as f64 + h[(1, 1)] * ry as f64 + h[(1, 2)];
                let hz = h[(2, 0)] * rx as f64 + h[(2, 1)] * ry as f64 + h[(2, 2)];
                if hz <= 1e-12 {
                    oob += 1;
                    continue;
                }
                let us = hx / hz;
                let vs = hy / hz;
                let b = match src.gray.bilinear_sample_channel(us, vs, 0) {
                    Some(v) => v,
                    None => {
                        oob += 1;
                        continue;
                    }
                };
                let cell = ((dy + self.r) * side + (dx + self.r)) as usize;
                let w = weights[cell];
                let a = self.gray.at(rx as usize, ry as usize, 0);
                sw += w;
                sa += w * a;
                sb += w * b;
                saa += w * a * a;
                sbb += w * b * b;
                sab += w * a * b;
            }
        }
        if in_ref == 0 || 2 * oob > in_ref || sw <= 0.0 {
            return 2.0;
        }
        let ma = sa / sw;
        let mb = sb / sw;
        let va = saa / sw - ma * ma;
        let vb = sbb / sw - mb * mb;
        let val = if va < 1e-12 || vb < 1e-12 {
            0.0
        } else {
            let cov = sab / sw - ma * mb;
            (cov / (va * vb).sqrt()).clamp(-1.0, 1.0)
        };
        1.0 - val
    }

    /// Mean of the best `source_views_per_pixel` per-source costs.
    fn aggregated_cost(&self, x: usize, y: usize, hyp: &Hypothesis, weights: &[f64]) -> f64 {
        let mut costs: Vec<f64> = self
            .sources
            .iter()
            .map(|s| self.cost_one(x, y, hyp, s, weights))
            .collect();
        let n = if self.cfg.source_views_per_pixel == 0 {
            costs.len()
        } else {
            self.cfg.source_views_per_pixel.min(costs.len())
        };
        costs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        costs[..n].iter().sum::<f64>() / n as f64
    }

    fn weights_at(&self, x: usize, y: usize) -> Vec<f64> {
        bilateral_weights(
            &self.gray,
            (x, y),
            self.cfg.window_radius,
            self.cfg.sigma_color,
            self.cfg.window_radius as f64 / 2.0,
        )
    }
}

fn random_front_facing_normal(rng: &mut ChaCha8Rng, ray: &Vector3<f64>) -> Vector3<f64> {
    let dir = ray.normalize();
    for _ in 0..32 {
        let v = Vector3::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        );
        let n = v.norm();
        if n < 1e-6 || n > 1.0 {
            continue;
        }
        let mut v = v / n;
        if v.dot(&dir) > 0.0 {
            v = -v;
        }
        if v.dot(&dir) < -0.05 {
            return v;
        }
    }
    -dir
}

fn perturb_normal(rng: &mut ChaCha8Rng, normal: &Vector3<f64>, ray: &Vector3<f64>, scale: f64) -> Vector3<f64> {
    let dir = ray.normalize();
    let jitter = Vector3::new(
        (rng.gen::<f64>() * 2.0 - 1.0) * scale,
        (rng.gen::<f64>() * 2.0 - 1.0) * scale,
        (rng.gen::<f64>() * 2.0 - 1.0) * scale,
    );
    let mut n = (normal + jitter).normalize();
    if !n.x.is_finite() {
        return *normal;
    }
    if n.dot(&dir) > 0.0 {
        n = -n;
    }
    if n.dot(&dir) > -0.05 {
        return *normal;
    }
    n
}

/// Per-iteration state snapshot used by convergence diagnostics.
#[derive(Debug, Clone)]
pub struct IterationSnapshot {
    pub costs: Vec<f64>,
    pub depths: Vec<f64>,
}

/// Photoconsistency cost of a single hypothesis at one pixel; exposed for
/// diagnostics and tests.
#[doc(hidden)]
pub fn hypothesis_cost(
    reference: &View,
    sources: &[View],
    cfg: &PatchMatchConfig,
    x: usize,
    y: usize,
    hyp: &Hypothesis,
) -> Result<f64> {
    let matcher = Matcher::new(reference, sources, cfg)?;
    let weights = matcher.weights_at(x, y);
    Ok(matcher.aggregated_cost(x, y, hyp, &weights))
}

pub fn estimate_depth_map(reference: &View, sources: &[View], cfg: &PatchMatchConfig) -> Result<DepthMap> {
    estimate_depth_map_traced(reference, sources, cfg, None)
}

/// Like `estimate_depth_map`, but optionally records the per-pixel best
/// cost and depth after every iteration.
pub fn estimate_depth_map_traced(
    reference: &View,
    sources: &[View],
    cfg: &PatchMatchConfig,
    mut trace: Option<&mut Vec<IterationSnapshot>>,
) -> Result<DepthMap> {
    let matcher = Matcher::new(reference, sources, cfg)?;
    let w = matcher.width;
    let h = matcher.height;
    let n = w * h;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let inv_min = 1.0 / cfg.depth_max;
    let inv_max = 1.0 / cfg.depth_min;

    let mut depth = vec![0.0f64; n];
    let mut normal = vec![Vector3::zeros(); n];
    let mut cost = vec![2.0f64; n];

    // Random initialization: uniform in inverse depth, random front-facing
    // normal.
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let inv = inv_min + rng.gen::<f64>() * (inv_max - inv_min);
            depth[i] = 1.0 / inv;
            normal[i] = random_front_facing_normal(&mut rng, &matcher.ray(x, y));
        }
    }
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let weights = matcher.weights_at(x, y);
            cost[i] = matcher.aggregated_cost(
                x,
                y,
                &Hypothesis {
                    depth: depth[i],
                    normal: normal[i],
                },
                &weights,
            );
        }
    }

    // Intersect the neighbor's plane with this pixel's ray.
    let propagate_depth = |nx: usize, ny: usize, px: usize, py: usize, depth: &[f64], normal: &[Vector3<f64>]| {
        let i = ny * w + nx;
        let plane_pt = matcher.ray(nx, ny) * depth[i];
        let nn = normal[i];
        let m = matcher.ray(px, py);
        let denom = nn.dot(&m);
        if denom.abs() < 1e-12 {
            return depth[i].clamp(cfg.depth_min, cfg.depth_max);
        }
        (nn.dot(&plane_pt) / denom).clamp(cfg.depth_min, cfg.depth_max)
    };

    for it in 0..cfg.iterations {
        let forward = it % 2 == 0;
        // Sequential propagation sweep.
        let ys: Vec<usize> = if forward { (0..h).collect() } else { (0..h).rev().collect() };
        let xs: Vec<usize> = if forward { (0..w).collect() } else { (0..w).rev().collect() };
        for &y in &ys {
            for &x in &xs {
                let i = y * w + x;
                let weights = matcher.weights_at(x, y);
                let neighbors: [Option<(usize, usize)>; 2] = if forward {
                    [
                        if x > 0 { Some((x - 1, y)) } else { None },
                        if y > 0 { Some((x, y - 1)) } else { None },
                    ]
                } else {
                    [
                        if x + 1 < w { Some((x + 1, y)) } else { None },
                        if y + 1 < h { Some((x, y + 1)) } else { None },
                    ]
                };
                for (nx, ny) in neighbors.into_iter().flatten() {
                    let cand = Hypothesis {
                        depth: propagate_depth(nx, ny, x, y, &depth, &normal),
                        normal: normal[ny * w + nx],
                    };
                    let c = matcher.aggregated_cost(x, y, &cand, &weights);
                    if c < cost[i] {
                        cost[i] = c;
                        depth[i] = cand.depth;
                        normal[i] = cand.normal;
                    }
                }
            }
        }
        // Random refinement with geometrically shrinking ranges.
        let full = cfg.depth_max - cfg.depth_min;
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let weights = matcher.weights_at(x, y);
                let ray = matcher.ray(x, y);
                for j in 0..cfg.perturbation_halving {
                    // Halve the search range both within and across
                    // iterations so late sweeps refine at fine scales.
                    let scale = 0.5f64.powi((it * cfg.perturbation_halving + j) as i32 + 1);
                    let d_cand = (depth[i] + (rng.gen::<f64>() * 2.0 - 1.0) * full * 0.5 * scale)
                        .clamp(cfg.depth_min, cfg.depth_max);
                    let n_cand = perturb_normal(&mut rng, &normal[i], &ray, scale);
                    for cand in [
                        Hypothesis {
                            depth: d_cand,
                            normal: normal[i],
                        },
                        Hypothesis {
                            depth: depth[i],
                            normal: n_cand,
                        },
                        Hypothesis {
                            depth: d_cand,
                            normal: n_cand,
                        },
                    ] {
                        let c = matcher.aggregated_cost(x, y, &cand, &weights);
                        if c < cost[i] {
                            cost[i] = c;
                            depth[i] = cand.depth;
                            normal[i] = cand.normal;
                        }
                    }
                }
            }
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(IterationSnapshot {
                costs: cost.clone(),
                depths: depth.clone(),
            });
        }
    }

    let mask_cost = 1.0 - cfg.min_ncc;
    let mut out = DepthMap {
        width: w,
        height: h,
        depth: vec![f64::NAN; n],
        normal: Some(vec![[f64::NAN; 3]; n]),
        cost: cost.clone(),
        };
    for i in 0..n {
        if cost[i] <= mask_cost {
            out.depth[i] = depth[i];
            out.normal.as_mut().unwrap()[i] = [normal[i].x, normal[i].y, normal[i].z];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ncc_self_correlation_is_one() {
        let p: Vec<f64> = (0..25).map(|i| (i as f64 * 0.17).sin() * 0.4 + 0.5).collect();
        let w = vec![1.0; 25];
        assert!((ncc(&p, &p, &w).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ncc_anticorrelation_is_minus_one() {
        let p: Vec<f64> = (0..25).map(|i| (i as f64 * 0.13).cos() * 0.3 + 0.5).collect();
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        let neg: Vec<f64> = p.iter().map(|v| 2.0 * mean - v).collect();
        let w = vec![1.0; 25];
        assert!((ncc(&p, &neg, &w).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn ncc_constant_patch_is_zero() {
        let a = vec![0.5; 9];
        let b: Vec<f64> = (0..9).map(|i| i as f64 / 10.0).collect();
        let w = vec![1.0; 9];
        assert_eq!(ncc(&a, &b, &w).unwrap(), 0.0);
    }

    #[test]
    fn ncc_rejects_size_mismatch() {
        assert!(ncc(&[0.0; 4], &[0.0; 5], &[1.0; 4]).is_err());
    }

    #[test]
    fn ncc_is_symmetric_and_affine_invariant() {
        let a: Vec<f64> = (0..49).map(|i| ((i * 7 + 3) % 13) as f64 / 13.0).collect();
        let b: Vec<f64> = (0..49).map(|i| ((i * 5 + 1) % 11) as f64 / 11.0).collect();
        let w: Vec<f64> = (0..49).map(|i| 0.1 + (i % 5) as f64 / 5.0).collect();
        let ab = ncc(&a, &b, &w).unwrap();
        let ba = ncc(&b, &a, &w).unwrap();
        assert!((ab - ba).abs() < 1e-9);
        // Positive gain + offset on either patch leaves NCC unchanged.
        let a2: Vec<f64> = a.iter().map(|v| 0.6 * v + 0.2).collect();
        assert!((ncc(&a2, &b, &w).unwrap() - ab).abs() < 1e-9);
    }

    #[test]
    fn bilateral_weights_center_is_one() {
        let img = Image::from_fn_gray(11, 11, |x, y| ((x + y) % 2) as f64);
        let w = bilateral_weights(&img, (5, 5), 3, 0.2, 1.5);
        assert_eq!(w[3 * 7 + 3], 1.0);
    }

    #[test]
    fn bilateral_weights_constant_image_is_spatial_gaussian() {
        let img = Image::new_filled(11, 11, 1, 0.5).unwrap();
        let sd = 2.0;
        let w = bilateral_weights(&img, (5, 5), 2, 0.2, sd);
        for dy in -2i64..=2 {
            for dx in -2i64..=2 {
                let got = w[((dy + 2) * 5 + (dx + 2)) as usize];
                let want = (-((dx * dx + dy * dy) as f64) / (2.0 * sd * sd)).exp();
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bilateral_weights_respect_step_edge() {
        // 11x11 step edge: left half dark, right half bright.
        let img = Image::from_fn_gray(11, 11, |x, _| if x < 6 { 0.1 } else { 0.9 });
        let w = bilateral_weights(&img, (3, 5), 3, 0.2, 1.5);
        // Same spatial distance, one across the edge, one inside the flat
        // side: the across-edge weight must be smaller.
        let inside = w[3 * 7]; // (dx=-3, dy=0)
        let across = w[3 * 7 + 6]; // (dx=+3, dy=0) crosses into the bright half
        assert!(across < inside);
    }

    #[test]
    fn bilateral_weights_clip_at_border() {
        let img = Image::new_filled(5, 5, 1, 0.5).unwrap();
        let w = bilateral_weights(&img, (0, 0), 2, 0.2, 1.0);
        assert_eq!(w[0], 0.0); // (-2,-2) outside
        assert!(w[2 * 5 + 2] == 1.0); // center
    }

    #[test]
    fn adapt_textureless_rule() {
        let cfg = PatchMatchConfig::default();
        let adapted = adapt_textureless(&cfg, 2.0);
        assert_eq!(adapted.window_radius, 10);
        assert!((adapted.min_ncc - 0.05).abs() < 1e-12);
        assert!(adapted.textureless_mode);
        let same = adapt_textureless(&cfg, 1.0);
        assert_eq!(same.window_radius, cfg.window_radius);
        assert_eq!(same.min_ncc, cfg.min_ncc);
        assert!(same.textureless_mode);
    }

    #[test]
    fn estimate_rejects_empty_sources() {
        let cam = crate::geometry::PinholeCamera::ideal(50.0, 50.0, 15.5, 11.5, 32, 24).unwrap();
        let v = View::new(
            Image::new_filled(32, 24, 1, 0.5).unwrap(),
            cam,
            crate::geometry::Pose::identity(),
            "r",
        )
        .unwrap();
        assert!(estimate_depth_map(&v, &[], &PatchMatchConfig::default()).is_err());
    }
}
