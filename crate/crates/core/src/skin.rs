//! Chroma-threshold skin classification.
//!
//! Only chromaticity takes part in the decision: hue and saturation in HSV,
//! Cb and Cr in YCbCr. The hue interval is closed and never wraps past 360.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imaging::{box_smooth, rgb_to_hsv, rgb_to_ycbcr, BinarySilhouette, HsvPixel, RgbImage, YCbCrPixel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorSpace {
    #[default]
    Hsv,
    YCbCr,
}

impl FromStr for ColorSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hsv" => Ok(ColorSpace::Hsv),
            "ycbcr" => Ok(ColorSpace::YCbCr),
            other => Err(Error::config(format!("unknown colour space `{other}`"))),
        }
    }
}

impl fmt::Display for ColorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColorSpace::Hsv => "hsv",
            ColorSpace::YCbCr => "ycbcr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkinThresholds {
    pub color_space: ColorSpace,
    pub hue_min: f64,
    pub hue_max: f64,
    pub sat_min: f64,
    pub sat_max: f64,
    pub cb_min: u8,
    pub cb_max: u8,
    pub cr_min: u8,
    pub cr_max: u8,
}

impl Default for SkinThresholds {
    fn default() -> Self {
        Self {
            color_space: ColorSpace::Hsv,
            hue_min: 0.0,
            hue_max: 50.0,
            sat_min: 0.23,
            sat_max: 0.68,
            cb_min: 77,
            cb_max: 127,
            cr_min: 133,
            cr_max: 173,
        }
    }
}

impl SkinThresholds {
    pub fn validate(&self) -> Result<()> {
        let ordered = self.hue_min <= self.hue_max
            && self.sat_min <= self.sat_max
            && self.cb_min <= self.cb_max
            && self.cr_min <= self.cr_max;
        if !ordered {
            return Err(Error::config("every threshold interval needs min <= max"));
        }
        if !(0.0..=360.0).contains(&self.hue_min) || !(0.0..=360.0).contains(&self.hue_max) {
            return Err(Error::config("hue bounds must lie in [0, 360]"));
        }
        if !(0.0..=1.0).contains(&self.sat_min) || !(0.0..=1.0).contains(&self.sat_max) {
            return Err(Error::config("saturation bounds must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Classifies one RGB pixel in the configured colour space.
    #[inline]
    pub fn is_skin(&self, [r, g, b]: [u8; 3]) -> bool {
        match self.color_space {
            ColorSpace::Hsv => classify_skin_hsv(rgb_to_hsv(r, g, b), self),
            ColorSpace::YCbCr => classify_skin_ycbcr(rgb_to_ycbcr(r, g, b), self),
        }
    }
}

#[inline]
pub fn classify_skin_hsv(p: HsvPixel, t: &SkinThresholds) -> bool {
    (t.hue_min..=t.hue_max).contains(&p.h) && (t.sat_min..=t.sat_max).contains(&p.s)
}

#[inline]
pub fn classify_skin_ycbcr(p: YCbCrPixel, t: &SkinThresholds) -> bool {
    (t.cb_min..=t.cb_max).contains(&p.cb) && (t.cr_min..=t.cr_max).contains(&p.cr)
}

/// Per-pixel classification without smoothing.
pub fn skin_mask(img: &RgbImage, t: &SkinThresholds) -> BinarySilhouette {
    let bits = img.pixels().map(|p| u8::from(t.is_skin(p))).collect();
    BinarySilhouette::new(img.width(), img.height(), bits).expect("mask matches frame dimensions")
}

/// Classifies every pixel and majority-smooths the result with a `k x k` box.
pub fn filter_frame(img: &RgbImage, t: &SkinThresholds, k: usize) -> Result<BinarySilhouette> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenKernel(k));
    }
    box_smooth(&skin_mask(img, t), k)
}
