//! Row-major floating point raster with 1 or 3 interleaved channels.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    /// Builds an image from raw interleaved samples. Intensities must be
    /// finite and in `[0, 1]`.
    pub fn from_data(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!("channels must be 1 or 3, got {channels}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::invalid(format!(
                "data length {} does not match {}x{}x{}",
                data.len(),
                width,
                height,
                channels
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::invalid("intensities must be finite and in [0,1]"));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn new_filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::from_data(width, height, channels, vec![value; width * height * channels])
    }

    /// Builds a single-channel image from a per-pixel closure; values are
    /// clamped into `[0, 1]`.
    pub fn from_fn_gray(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self {
            width,
            height,
            channels: 1,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, c: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height && c < self.channels);
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Luminance view: channel 0 for gray images, Rec.601 mix for RGB.
    pub fn luma(&self, x: usize, y: usize) -> f64 {
        if self.channels == 1 {
            self.at(x, y, 0)
        } else {
            0.299 * self.at(x, y, 0) + 0.587 * self.at(x, y, 1) + 0.114 * self.at(x, y, 2)
        }
    }

    pub fn to_gray(&self) -> Image {
        if self.channels == 1 {
            return self.clone();
        }
        Image::from_fn_gray(self.width, self.height, |x, y| self.luma(x, y))
    }

    /// Bilinear interpolation at continuous pixel-center coordinates.
    /// Returns `None` when the 2x2 support leaves the image.
    pub fn bilinear_sample(&self, u: f64, v: f64) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.channels];
        for (c, slot) in out.iter_mut().enumerate() {
            *slot = self.bilinear_sample_channel(u, v, c)?;
        }
        Some(out)
    }

    #[inline]
    pub fn bilinear_sample_channel(&self, u: f64, v: f64, c: usize) -> Option<f64> {
        if !u.is_finite() || !v.is_finite() || u < 0.0 || v < 0.0 {
            return None;
        }
        let x0 = u.floor();
        let y0 = v.floor();
        let x1 = x0 as usize + 1;
        let y1 = y0 as usize + 1;
        // Exact hits on the last row/column are still inside the support.
        if u == x0 && v == y0 {
            let (xi, yi) = (x0 as usize, y0 as usize);
            if xi < self.width && yi < self.height {
                return Some(self.at(xi, yi, c));
            }
            return None;
        }
        if x1 >= self.width && u > (self.width - 1) as f64 {
            return None;
        }
        if y1 >= self.height && v > (self.height - 1) as f64 {
            return None;
        }
        let xi = x0 as usize;
        let yi = y0 as usize;
        let x1 = (xi + 1).min(self.width - 1);
        let y1 = (yi + 1).min(self.height - 1);
        let fx = u - x0;
        let fy = v - y0;
        let p00 = self.at(xi, yi, c);
        let p10 = self.at(x1, yi, c);
        let p01 = self.at(xi, y1, c);
        let p11 = self.at(x1, y1, c);
        Some(p00 * (1.0 - fx) * (1.0 - fy) + p10 * fx * (1.0 - fy) + p01 * (1.0 - fx) * fy + p11 * fx * fy)
    }
}
