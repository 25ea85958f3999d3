//! Geometric-consistency fusion of per-view depth maps into a point cloud.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{project, unproject, View};
use crate::patchmatch::DepthMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    pub min_consistent_views: usize,
    pub max_reprojection_error: f64,
    pub max_relative_depth_diff: f64,
    pub max_normal_angle_deg: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            min_consistent_views: 2,
            max_reprojection_error: 2.0,
            max_relative_depth_diff: 0.01,
            max_normal_angle_deg: 30.0,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_consistent_views < 1 {
            return Err(Error::invalid("min_consistent_views must be >= 1"));
        }
        if self.max_reprojection_error <= 0.0
            || self.max_relative_depth_diff <= 0.0
            || self.max_normal_angle_deg <= 0.0
        {
            return Err(Error::invalid("fusion thresholds must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vector3<f64>>,
    pub colors: Option<Vec<[f64; 3]>>,
    pub normals: Option<Vec<Vector3<f64>>>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Point count and axis-aligned bounding box (`None` for an empty cloud).
pub fn cloud_size_stats(cloud: &PointCloud) -> (usize, Option<(Vector3<f64>, Vector3<f64>)>) {
    if cloud.points.is_empty() {
        return (0, None);
    }
    let mut lo = cloud.points[0];
    let mut hi = cloud.points[0];
    for p in &cloud.points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (cloud.points.len(), Some((lo, hi)))
}

/// World-frame normal of a depth-map pixel, if present.
fn world_normal(map: &DepthMap, view: &View, x: usize, y: usize) -> Option<Vector3<f64>> {
    let n = map.normal_at(x, y)?;
    Some(view.pose.rotation().transpose() * n)
}

/// Geometric consistency filter over a set of per-view depth maps: a pixel
/// survives when at least `min_agreeing_views` other views estimate the
/// same surface point to within `max_relative_depth_diff` relative depth.
/// Removes photoconsistent-but-wrong matches (e.g. in regions only one
/// camera can see) before fusion.
pub fn filter_depth_maps(
    maps: &[DepthMap],
    views: &[View],
    max_relative_depth_diff: f64,
    min_agreeing_views: usize,
) -> Result<Vec<DepthMap>> {
    if maps.len() != views.len() {
        return Err(Error::invalid(format!(
            "{} depth maps for {} views",
            maps.len(),
            views.len()
        )));
    }
    if !(max_relative_depth_diff > 0.0) {
        return Err(Error::invalid("max_relative_depth_diff must be positive"));
    }
    let mut out = maps.to_vec();
    for (i, (view, map)) in views.iter().zip(maps.iter()).enumerate() {
        for y in 0..map.height {
            for x in 0..map.width {
                if !map.is_valid(x, y) {
                    continue;
                }
                let d = map.depth_at(x, y);
                let world = unproject(&view.camera, &view.pose, x as f64, y as f64, d)?;
                let agreeing = views
                    .iter()
                    .zip(maps.iter())
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .filter(|(_, (other, omap))| {
                        let Some(p) = project(&other.camera, &other.pose, &world) else {
                            return false;
                        };
                        let px = p.u.round();
                        let py = p.v.round();
                        if px < 0.0 || py < 0.0 || px >= omap.width as f64 || py >= omap.height as f64 {
                            return false;
                        }
                        let stored = omap.depth_at(px as usize, py as usize);
                        stored.is_finite()
                            && (p.depth - stored).abs() / stored <= max_relative_depth_diff
                    })
                    .count();
                if agreeing < min_agreeing_views {
                    out[i].invalidate(x, y);
                }
            }
        }
    }
    Ok(out)
}

/// Fuses per-view depth maps: a pixel becomes part of a point when enough
/// views agree on its 3D position; agreeing pixels are consumed so each
/// contributes to at most one output point. The emitted point is the
/// reference pixel's own unprojection (exact ground-truth depth maps fuse
/// to exact surface points); agreeing views vote and contribute color.
pub fn fuse(maps: &[DepthMap], views: &[View], cfg: &FusionConfig) -> Result<PointCloud> {
    cfg.validate()?;
    if maps.len() != views.len() {
        return Err(Error::invalid(format!(
            "{} depth maps for {} views",
            maps.len(),
            views.len()
        )));
    }
    for (m, v) in maps.iter().zip(views) {
        if m.width != v.image.width() || m.height != v.image.height() {
            return Err(Error::invalid(format!(
                "depth map {}x{} does not match view {:?} ({}x{})",
                m.width,
                m.height,
                v.name,
                v.image.width(),
                v.image.height()
            )));
        }
    }
    let cos_max_angle = cfg.max_normal_angle_deg.to_radians().cos();
    let mut consumed: Vec<Vec<bool>> = maps.iter().map(|m| vec![false; m.width * m.height]).collect();
    let mut cloud = PointCloud {
        points: Vec::new(),
        colors: Some(Vec::new()),
        normals: None,
    };
    let mut out_normals: Vec<Vector3<f64>> = Vec::new();
    let mut all_have_normals = true;

    for ref_idx in 0..views.len() {
        let ref_view = &views[ref_idx];
        let ref_map = &maps[ref_idx];
        for y in 0..ref_map.height {
            for x in 0..ref_map.width {
                let i = ref_map.idx(x, y);
                if consumed[ref_idx][i] || !ref_map.is_valid(x, y) {
                    continue;
                }
                let d = ref_map.depth_at(x, y);
                let world = unproject(&ref_view.camera, &ref_view.pose, x as f64, y as f64, d)?;
                let ref_normal = world_normal(ref_map, ref_view, x, y);

                // (view, pixel index, gray, world normal)
                let mut members: Vec<(usize, usize, f64, Option<Vector3<f64>>)> =
                    vec![(ref_idx, i, ref_view.image.luma(x, y), ref_normal)];
                for (j, (view, map)) in views.iter().zip(maps.iter()).enumerate() {
                    if j == ref_idx {
                        continue;
                    }
                    let Some(p) = project(&view.camera, &view.pose, &world) else {
                        continue;
                    };
                    let px = p.u.round();
                    let py = p.v.round();
                    if px < 0.0 || py < 0.0 || px >= map.width as f64 || py >= map.height as f64 {
                        continue;
                    }
                    let (px, py) = (px as usize, py as usize);
                    let jidx = map.idx(px, py);
                    if consumed[j][jidx] || !map.is_valid(px, py) {
                        continue;
                    }
                    let reproj = ((p.u - px as f64).powi(2) + (p.v - py as f64).powi(2)).sqrt();
                    if reproj > cfg.max_reprojection_error {
                        continue;
                    }
                    let stored = map.depth_at(px, py);
                    if (p.depth - stored).abs() / stored > cfg.max_relative_depth_diff {
                        continue;
                    }
                    let other_normal = world_normal(map, view, px, py);
                    if let (Some(a), Some(b)) = (&ref_normal, &other_normal) {
                        if a.dot(b) < cos_max_angle {
                            continue;
                        }
                    }
                    members.push((j, jidx, view.image.luma(px, py), other_normal));
                }

                if members.len() < cfg.min_consistent_views {
                    continue;
                }
                let mut gray = 0.0;
                let mut normal_sum = Vector3::zeros();
                let mut normal_count = 0usize;
                for (j, jidx, g, n) in &members {
                    consumed[*j][*jidx] = true;
                    gray += g;
                    if let Some(n) = n {
                        normal_sum += n;
                        normal_count += 1;
                    }
                }
                let m = members.len() as f64;
                cloud.points.push(world);
                cloud.colors.as_mut().unwrap().push([gray / m; 3]);
                if normal_count == members.len() && normal_sum.norm() > 1e-12 {
                    out_normals.push(normal_sum.normalize());
                } else {
                    all_have_normals = false;
                }
            }
        }
    }
    if all_have_normals && !out_normals.is_empty() {
        cloud.normals = Some(out_normals);
    }
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PinholeCamera, Pose};
    use crate::image::Image;
    use nalgebra::Matrix3;

    /// Three cameras looking down +z at a z = 2 plane.
    fn plane_rig() -> (Vec<View>, Vec<DepthMap>) {
        let w = 32;
        let h = 24;
        let cam = PinholeCamera::ideal(40.0, 40.0, 15.5, 11.5, w, h).unwrap();
        let mut views = Vec::new();
        let mut maps = Vec::new();
        for (i, tx) in [-0.3f64, 0.0, 0.3].iter().enumerate() {
            let pose = Pose::new(Matrix3::identity(), Vector3::new(-tx, 0.0, 0.0)).unwrap();
            let img = Image::new_filled(w, h, 1, 0.5).unwrap();
            let view = View::new(img, cam.clone(), pose, format!("v{i}")).unwrap();
            // Exact depth of the z=2 plane: constant 2.0 along camera z.
            let map = DepthMap {
                width: w,
                height: h,
                depth: vec![2.0; w * h],
                normal: None,
                cost: vec![0.0; w * h],
            };
            views.push(view);
            maps.push(map);
        }
        (views, maps)
    }

    #[test]
    fn ground_truth_plane_fuses_onto_plane() {
        let (views, maps) = plane_rig();
        let cloud = fuse(&maps, &views, &FusionConfig::default()).unwrap();
        assert!(!cloud.is_empty());
        for p in &cloud.points {
            assert!((p.z - 2.0).abs() < 1e-6);
        }
        // Dense coverage of the reference map.
        assert!(cloud.len() > (32 * 24) / 2);
    }

    #[test]
    fn single_view_below_threshold_gives_empty_cloud() {
        let (views, maps) = plane_rig();
        let cloud = fuse(&maps[..1], &views[..1], &FusionConfig::default()).unwrap();
        assert!(cloud.is_empty());
    }

    #[test]
    fn corrupted_view_contributes_nothing() {
        let (views, mut maps) = plane_rig();
        for d in &mut maps[2].depth {
            *d *= 1.5;
        }
        let cloud = fuse(&maps, &views, &FusionConfig::default()).unwrap();
        assert!(!cloud.is_empty());
        // Points from the two healthy views only: all on the z=2 plane.
        for p in &cloud.points {
            assert!((p.z - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn consistent_maps_pass_filter_unchanged() {
        let (views, maps) = plane_rig();
        let filtered = filter_depth_maps(&maps, &views, 0.01, 1).unwrap();
        // The center view is fully covered by its neighbors; the end
        // views keep everything except pixels no other camera sees.
        assert_eq!(filtered[1].valid_count(), maps[1].valid_count());
        for (a, b) in maps.iter().zip(&filtered) {
            assert!(b.valid_count() <= a.valid_count());
            assert!(b.valid_count() > a.valid_count() / 2);
        }
    }

    #[test]
    fn filter_removes_inconsistent_pixels() {
        let (views, mut maps) = plane_rig();
        // Corrupt a block of one view: those pixels agree with nobody.
        for y in 5..10 {
            for x in 5..10 {
                let i = maps[1].idx(x, y);
                maps[1].depth[i] = 1.3;
            }
        }
        let filtered = filter_depth_maps(&maps, &views, 0.01, 1).unwrap();
        assert_eq!(filtered[1].valid_count(), maps[1].valid_count() - 25);
        assert!(!filtered[1].is_valid(7, 7));
        // Demanding agreement from both other views still keeps the
        // uncorrupted pixels of view 0.
        let strict = filter_depth_maps(&maps, &views, 0.01, 2).unwrap();
        assert!(strict[0].valid_count() > 0);
        assert!(strict[0].valid_count() <= filtered[0].valid_count());
    }

    #[test]
    fn filter_rejects_bad_arguments() {
        let (views, maps) = plane_rig();
        assert!(filter_depth_maps(&maps[..2], &views, 0.01, 1).is_err());
        assert!(filter_depth_maps(&maps, &views, 0.0, 1).is_err());
    }

    #[test]
    fn count_mismatch_is_error() {
        let (views, maps) = plane_rig();
        assert!(fuse(&maps[..2], &views, &FusionConfig::default()).is_err());
    }

    #[test]
    fn raising_min_views_never_adds_points() {
        let (views, maps) = plane_rig();
        let mut prev = usize::MAX;
        for mv in [1, 2, 3] {
            let cfg = FusionConfig {
                min_consistent_views: mv,
                ..Default::default()
            };
            let n = fuse(&maps, &views, &cfg).unwrap().len();
            assert!(n <= prev);
            prev = n;
        }
    }

    #[test]
    fn reprojection_lands_near_contributors() {
        let (views, maps) = plane_rig();
        let cfg = FusionConfig::default();
        let cloud = fuse(&maps, &views, &cfg).unwrap();
        for p in &cloud.points {
            // Each point must reproject within the threshold of some valid
            // pixel in every view that can see it.
            for v in &views {
                if let Some(pr) = project(&v.camera, &v.pose, p) {
                    if pr.u >= 0.0 && pr.v >= 0.0 && pr.u < 32.0 && pr.v < 24.0 {
                        let err = ((pr.u - pr.u.round()).powi(2) + (pr.v - pr.v.round()).powi(2)).sqrt();
                        assert!(err <= cfg.max_reprojection_error + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn stats() {
        let empty = PointCloud::default();
        assert_eq!(cloud_size_stats(&empty), (0, None));
        let one = PointCloud {
            points: vec![Vector3::new(1.0, 2.0, 3.0)],
            colors: None,
            normals: None,
        };
        let (n, bb) = cloud_size_stats(&one);
        assert_eq!(n, 1);
        let (lo, hi) = bb.unwrap();
        assert_eq!(lo, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(hi, Vector3::new(1.0, 2.0, 3.0));
    }
}
