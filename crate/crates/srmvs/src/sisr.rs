//! Bicubic super-resolution / down-sampling, intrinsics scaling, and
//! ingestion of externally super-resolved image sets.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{PinholeCamera, View};
use crate::image::Image;

/// Rational resampling factor (e.g. 2/1, 1/2, 1/4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleSpec {
    num: u32,
    den: u32,
}

impl ScaleSpec {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::invalid("scale factor must be positive"));
        }
        Ok(Self { num, den })
    }

    pub fn factor(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn inverse(&self) -> ScaleSpec {
        ScaleSpec {
            num: self.den,
            den: self.num,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.num == self.den
    }

    /// Parses "2", "1/4", "3/2".
    pub fn parse(s: &str) -> Result<Self> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num = n
            .parse::<u32>()
            .map_err(|_| Error::invalid(format!("bad scale factor {s:?}")))?;
        let den = d
            .parse::<u32>()
            .map_err(|_| Error::invalid(format!("bad scale factor {s:?}")))?;
        ScaleSpec::new(num, den)
    }
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec { num: 2, den: 1 }
    }
}

impl fmt::Display for ScaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Experimental arm of a sequence set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetLabel {
    Lr,
    Bc,
    Ext,
    Hr,
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SetLabel::Lr => "LR",
            SetLabel::Bc => "BC",
            SetLabel::Ext => "EXT",
            SetLabel::Hr => "HR",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct SequenceSet {
    pub label: SetLabel,
    pub views: Vec<View>,
}

impl SequenceSet {
    pub fn new(label: SetLabel, views: Vec<View>) -> Result<Self> {
        let mut names: Vec<&str> = views.iter().map(|v| v.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate view names in sequence set"));
        }
        Ok(Self { label, views })
    }
}

/// Catmull-Rom cubic-convolution kernel (a = -0.5).
#[inline]
pub fn cubic_kernel(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        (1.5 * t - 2.5) * t * t + 1.0
    } else if t < 2.0 {
        ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0
    } else {
        0.0
    }
}

#[inline]
fn clamp_index(i: i64, n: usize) -> usize {
    i.clamp(0, n as i64 - 1) as usize
}

/// Point-samples one channel at continuous coordinates with the cubic
/// kernel, clamp-to-edge boundary. Result is NOT range-clamped.
pub fn sample_bicubic_channel(image: &Image, u: f64, v: f64, c: usize) -> f64 {
    let x0 = u.floor() as i64;
    let y0 = v.floor() as i64;
    let fx = u - x0 as f64;
    let fy = v - y0 as f64;
    let wx = [
        cubic_kernel(fx + 1.0),
        cubic_kernel(fx),
        cubic_kernel(fx - 1.0),
        cubic_kernel(fx - 2.0),
    ];
    let wy = [
        cubic_kernel(fy + 1.0),
        cubic_kernel(fy),
        cubic_kernel(fy - 1.0),
        cubic_kernel(fy - 2.0),
    ];
    let mut acc = 0.0;
    for (j, wyj) in wy.iter().enumerate() {
        let yy = clamp_index(y0 - 1 + j as i64, image.height());
        let mut row = 0.0;
        for (i, wxi) in wx.iter().enumerate() {
            let xx = clamp_index(x0 - 1 + i as i64, image.width());
            row += wxi * image.at(xx, yy, c);
        }
        acc += wyj * row;
    }
    acc
}

/// Bicubic resampling to round(k*w) x round(k*h), pixel-center aligned:
/// u_src = (u_dst + 0.5)/k - 0.5. Output is clamped into [0, 1].
pub fn resample_bicubic(image: &Image, spec: ScaleSpec) -> Result<Image> {
    let k = spec.factor();
    let ow = (k * image.width() as f64).round() as usize;
    let oh = (k * image.height() as f64).round() as usize;
    if ow == 0 || oh == 0 {
        return Err(Error::invalid(format!(
            "scale {spec} of {}x{} collapses to an empty image",
            image.width(),
            image.height()
        )));
    }
    if spec.is_identity() {
        return Ok(image.clone());
    }
    let ch = image.channels();
    // Separable: taps depend only on the output column (resp. row).
    let make_taps = |out_n: usize, in_n: usize| -> Vec<([usize; 4], [f64; 4])> {
        (0..out_n)
            .map(|o| {
                let src = (o as f64 + 0.5) / k - 0.5;
                let s0 = src.floor() as i64;
                let f = src - s0 as f64;
                let idx = [
                    clamp_index(s0 - 1, in_n),
                    clamp_index(s0, in_n),
                    clamp_index(s0 + 1, in_n),
                    clamp_index(s0 + 2, in_n),
                ];
                let w = [
                    cubic_kernel(f + 1.0),
                    cubic_kernel(f),
                    cubic_kernel(f - 1.0),
                    cubic_kernel(f - 2.0),
                ];
                (idx, w)
            })
            .collect()
    };
    let col_taps = make_taps(ow, image.width());
    let row_taps = make_taps(oh, image.height());

    // Horizontal pass.
    let mut mid = vec![0.0f64; ow * image.height() * ch];
    for y in 0..image.height() {
        for (x, (idx, w)) in col_taps.iter().enumerate() {
            for c in 0..ch {
                let v = w[0] * image.at(idx[0], y, c)
                    + w[1] * image.at(idx[1], y, c)
                    + w[2] * image.at(idx[2], y, c)
                    + w[3] * image.at(idx[3], y, c);
                mid[(y * ow + x) * ch + c] = v;
            }
        }
    }
    // Vertical pass.
    let mut out = vec![0.0f64; ow * oh * ch];
    for (y, (idx, w)) in row_taps.iter().enumerate() {
        for x in 0..ow {
            for c in 0..ch {
                let v = w[0] * mid[(idx[0] * ow + x) * ch + c]
                    + w[1] * mid[(idx[1] * ow + x) * ch + c]
                    + w[2] * mid[(idx[2] * ow + x) * ch + c]
                    + w[3] * mid[(idx[3] * ow + x) * ch + c];
                out[(y * ow + x) * ch + c] = v.clamp(0.0, 1.0);
            }
        }
    }
    Image::from_data(ow, oh, ch, out)
}

/// Scales intrinsics by k under the pixel-center convention:
/// c' = k*(c + 0.5) - 0.5. Distortion coefficients act on normalized
/// coordinates and stay unchanged.
pub fn scale_intrinsics(camera: &PinholeCamera, spec: ScaleSpec) -> PinholeCamera {
    let k = spec.factor();
    PinholeCamera {
        fx: k * camera.fx,
        fy: k * camera.fy,
        cx: k * (camera.cx + 0.5) - 0.5,
        cy: k * (camera.cy + 0.5) - 0.5,
        k1: camera.k1,
        k2: camera.k2,
        width: (k * camera.width as f64).round() as usize,
        height: (k * camera.height as f64).round() as usize,
    }
}

/// Resamples every image and scales every camera by k; poses and names
/// are preserved.
pub fn super_resolve_set(set: &SequenceSet, spec: ScaleSpec) -> Result<SequenceSet> {
    let mut views = Vec::with_capacity(set.views.len());
    for v in &set.views {
        let image = resample_bicubic(&v.image, spec)?;
        let camera = scale_intrinsics(&v.camera, spec);
        views.push(View::new(image, camera, v.pose.clone(), v.name.clone())?);
    }
    SequenceSet::new(SetLabel::Bc, views)
}

/// Outcome of ingesting externally super-resolved images.
#[derive(Debug)]
pub struct IngestOutcome {
    pub set: SequenceSet,
    /// Files present on disk that match no view in the input set.
    pub warnings: Vec<String>,
}

/// Loads externally super-resolved images (one `<view name>.<ext>` file
/// per view) and pairs them with k-scaled cameras. Any missing file or
/// dimension mismatch aborts the whole ingestion.
pub fn ingest_external_sr(set: &SequenceSet, directory: &Path, spec: ScaleSpec) -> Result<IngestOutcome> {
    let k = spec.factor();
    let mut views = Vec::with_capacity(set.views.len());
    for v in &set.views {
        let mut found = None;
        for ext in ["pgm", "ppm"] {
            let path = directory.join(format!("{}.{}", v.name, ext));
            if path.is_file() {
                found = Some(path);
                break;
            }
        }
        let path = found.ok_or_else(|| {
            Error::NotFound(format!(
                "no super-resolved image for view {:?} in {}",
                v.name,
                directory.display()
            ))
        })?;
        let image = crate::io::read_image(&path)?;
        let expect_w = (k * v.image.width() as f64).round() as usize;
        let expect_h = (k * v.image.height() as f64).round() as usize;
        if image.width() != expect_w || image.height() != expect_h {
            return Err(Error::format(
                path.display().to_string(),
                format!(
                    "expected {}x{} for scale {spec}, got {}x{}",
                    expect_w,
                    expect_h,
                    image.width(),
                    image.height()
                ),
            ));
        }
        let camera = scale_intrinsics(&v.camera, spec);
        views.push(View::new(image, camera, v.pose.clone(), v.name.clone())?);
    }
    let known: std::collections::HashSet<&str> = set.views.iter().map(|v| v.name.as_str()).collect();
    let mut warnings = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(directory)
        .map_err(|e| Error::io(directory, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for path in entries {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            if !known.contains(stem) {
                warnings.push(format!("ignoring {} (no matching view)", path.display()));
            }
        }
    }
    Ok(IngestOutcome {
        set: SequenceSet::new(SetLabel::Ext, views)?,
        warnings,
    })
}
