//! Speckle filter: removes small connected components of similar depth.

use crate::error::{Error, Result};
use crate::patchmatch::DepthMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeckleConfig {
    /// Max absolute depth difference for two 4-neighbors to connect.
    pub max_depth_range: f64,
    /// Component size threshold as a fraction of the map area.
    pub max_speckle_fraction: f64,
}

impl Default for SpeckleConfig {
    fn default() -> Self {
        Self {
            max_depth_range: 0.5,
            max_speckle_fraction: 1.0 / 100.0,
        }
    }
}

impl SpeckleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_depth_range > 0.0) {
            return Err(Error::invalid("max_depth_range must be positive"));
        }
        if !(self.max_speckle_fraction > 0.0 && self.max_speckle_fraction <= 1.0) {
            return Err(Error::invalid("max_speckle_fraction must be in (0, 1]"));
        }
        Ok(())
    }
}

/// Invalidates every 4-connected component (|z1 - z2| <= d connectivity)
/// whose size is strictly below `max_speckle_fraction * width * height`.
pub fn speckle_filter(map: &DepthMap, cfg: &SpeckleConfig) -> DepthMap {
    let w = map.width;
    let h = map.height;
    let n = w * h;
    let s = cfg.max_speckle_fraction * (n as f64);
    let mut out = map.clone();
    let mut label = vec![u32::MAX; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut component: Vec<usize> = Vec::new();
    let mut next = 0u32;
    for start in 0..n {
        if !map.depth[start].is_finite() || label[start] != u32::MAX {
            continue;
        }
        component.clear();
        stack.push(start);
        label[start] = next;
        while let Some(i) = stack.pop() {
            component.push(i);
            let x = i % w;
            let y = i / w;
            let z = map.depth[i];
            let mut visit = |j: usize| {
                if label[j] == u32::MAX
                    && map.depth[j].is_finite()
                    && (map.depth[j] - z).abs() <= cfg.max_depth_range
                {
                    label[j] = next;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        if (component.len() as f64) < s {
            for &i in &component {
                out.depth[i] = f64::NAN;
                if let Some(nm) = out.normal.as_mut() {
                    nm[i] = [f64::NAN; 3];
                }
            }
        }
        next += 1;
    }
    out
}

/// Fraction of valid pixels retained between two maps of equal size.
pub fn keep_fraction(before: &DepthMap, after: &DepthMap) -> Result<f64> {
    if before.width != after.width || before.height != after.height {
        return Err(Error::invalid("keep_fraction dimension mismatch"));
    }
    let nb = before.valid_count();
    if nb == 0 {
        return Ok(1.0);
    }
    Ok(after.valid_count() as f64 / nb as f64)
}
