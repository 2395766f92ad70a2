//! Raster containers, colour-space conversion and the majority-vote box filter.
//!
//! Silhouette coordinates follow the `(x, y)` = `(row, column)` convention:
//! `x` indexes rows top to bottom and `y` indexes columns left to right, both
//! zero-based.

use crate::error::{Error, Result};

/// An 8-bit RGB frame, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height * 3 {
            return Err(Error::InvalidDimensions { width, height, len: data.len() });
        }
        Ok(Self { width, height, data })
    }

    /// A frame filled with one colour.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        let data = rgb.iter().copied().cycle().take(width * height * 3).collect();
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * self.width + col) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, row: usize, col: usize, rgb: [u8; 3]) {
        let i = (row * self.width + col) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }
}

/// An 8-bit single-channel image; holds intensity-ramp values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidDimensions { width, height, len: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.data[row * self.width + col] = value;
    }
}

/// A `{0,1}` raster where 1 marks hand pixels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarySilhouette {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BinarySilhouette {
    /// Builds a silhouette from row-major bits; every element must be 0 or 1.
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::InvalidDimensions { width, height, len: bits.len() });
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::config("silhouette bits must be 0 or 1"));
        }
        Ok(Self { width, height, bits })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![0; width * height] }
    }

    pub fn ones(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![1; width * height] }
    }

    /// Builds a silhouette from a predicate over `(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                bits.push(u8::from(f(row, col)));
            }
        }
        Self { width, height, bits }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col] != 0
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.bits[row * self.width + col] = u8::from(on);
    }

    pub fn count_on(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Iterates the `(row, col)` of every on-pixel in raster order.
    pub fn on_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits.iter().enumerate().filter(|(_, &b)| b != 0).map(move |(i, _)| (i / w, i % w))
    }
}

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Full-range BT.601 luma and chroma.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YCbCrPixel {
    pub y: u8,
    pub cb: u8,
    pub cr: u8,
}

/// Hexcone RGB to HSV. Achromatic pixels get hue 0.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> HsvPixel {
    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let v = max / 255.0;
    if delta == 0.0 {
        return HsvPixel { h: 0.0, s: 0.0, v };
    }
    let s = delta / max;
    let sector = if max == rf {
        (gf - bf) / delta
    } else if max == gf {
        (bf - rf) / delta + 2.0
    } else {
        (rf - gf) / delta + 4.0
    };
    let mut h = 60.0 * sector;
    if h < 0.0 {
        h += 360.0;
    }
    HsvPixel { h, s, v }
}

/// Inverse hexcone, rounding each channel to the nearest 8-bit value.
pub fn hsv_to_rgb(p: HsvPixel) -> [u8; 3] {
    let channel = |n: f64| {
        let k = (n + p.h / 60.0) % 6.0;
        let f = p.v - p.v * p.s * k.min(4.0 - k).clamp(0.0, 1.0);
        (f * 255.0).round().clamp(0.0, 255.0) as u8
    };
    [channel(5.0), channel(3.0), channel(1.0)]
}

pub fn rgb_to_ycbcr(r: u8, g: u8, b: u8) -> YCbCrPixel {
    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
    let y = 0.299 * rf + 0.587 * gf + 0.114 * bf;
    let cb = 128.0 - 0.168_736 * rf - 0.331_264 * gf + 0.5 * bf;
    let cr = 128.0 + 0.5 * rf - 0.418_688 * gf - 0.081_312 * bf;
    let q = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    YCbCrPixel { y: q(y), cb: q(cb), cr: q(cr) }
}

/// Majority-vote `k x k` box filter with zero padding: a pixel stays on iff at
/// least half of its padded neighbourhood is on.
pub fn box_smooth(sil: &BinarySilhouette, k: usize) -> Result<BinarySilhouette> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenKernel(k));
    }
    if k == 1 {
        return Ok(sil.clone());
    }
    let (w, h) = (sil.width, sil.height);
    let r = k / 2;
    // Summed-area table with a leading zero row and column.
    let stride = w + 1;
    let mut sat = vec![0u32; (w + 1) * (h + 1)];
    for row in 0..h {
        let mut run = 0u32;
        for col in 0..w {
            run += sil.bits[row * w + col] as u32;
            sat[(row + 1) * stride + col + 1] = sat[row * stride + col + 1] + run;
        }
    }
    let area = (k * k) as u32;
    let mut bits = vec![0u8; w * h];
    for row in 0..h {
        let top = row.saturating_sub(r);
        let bottom = (row + r + 1).min(h);
        for col in 0..w {
            let left = col.saturating_sub(r);
            let right = (col + r + 1).min(w);
            let sum = sat[bottom * stride + right] + sat[top * stride + left]
                - sat[top * stride + right]
                - sat[bottom * stride + left];
            bits[row * w + col] = u8::from(2 * sum >= area);
        }
    }
    Ok(BinarySilhouette { width: w, height: h, bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-4
    }

    #[test]
    fn hsv_reference_points() {
        assert_eq!(rgb_to_hsv(255, 0, 0), HsvPixel { h: 0.0, s: 1.0, v: 1.0 });
        assert_eq!(rgb_to_hsv(0, 0, 0), HsvPixel { h: 0.0, s: 0.0, v: 0.0 });
        // max = B = 192, min = 64: h = 60 * ((64 - 128) / 128 + 4) = 210.
        let p = rgb_to_hsv(64, 128, 192);
        assert!(approx(p.h, 210.0));
        assert!(approx(p.s, 128.0 / 192.0));
        assert!(approx(p.v, 192.0 / 255.0));
    }

    #[test]
    fn gray_is_achromatic() {
        let p = rgb_to_hsv(90, 90, 90);
        assert_eq!(p.h, 0.0);
        assert_eq!(p.s, 0.0);
    }

    #[test]
    fn ycbcr_reference_points() {
        assert_eq!(rgb_to_ycbcr(0, 0, 0), YCbCrPixel { y: 0, cb: 128, cr: 128 });
        assert_eq!(rgb_to_ycbcr(255, 255, 255), YCbCrPixel { y: 255, cb: 128, cr: 128 });
        // y = 0.299 * 255 = 76.2, cb = 128 - 0.168736 * 255 = 84.97, cr = 255.5 clamps.
        assert_eq!(rgb_to_ycbcr(255, 0, 0), YCbCrPixel { y: 76, cb: 85, cr: 255 });
    }

    fn brute_smooth(sil: &BinarySilhouette, k: usize) -> BinarySilhouette {
        let r = (k / 2) as isize;
        BinarySilhouette::from_fn(sil.width(), sil.height(), |row, col| {
            let mut on = 0;
            for dr in -r..=r {
                for dc in -r..=r {
                    let (rr, cc) = (row as isize + dr, col as isize + dc);
                    if rr >= 0
                        && cc >= 0
                        && (rr as usize) < sil.height()
                        && (cc as usize) < sil.width()
                        && sil.get(rr as usize, cc as usize)
                    {
                        on += 1;
                    }
                }
            }
            2 * on >= k * k
        })
    }

    #[test]
    fn smoothing_all_ones_drops_only_corners_at_k3() {
        // Corners see 4 of 9, edges 6 of 9, interior 9 of 9.
        let out = box_smooth(&BinarySilhouette::ones(8, 8), 3).unwrap();
        for row in 0..8 {
            for col in 0..8 {
                let corner = (row == 0 || row == 7) && (col == 0 || col == 7);
                assert_eq!(out.get(row, col), !corner, "({row},{col})");
            }
        }
    }

    #[test]
    fn smoothing_removes_isolated_pixel() {
        let mut sil = BinarySilhouette::zeros(8, 8);
        sil.set(3, 4, true);
        assert!(box_smooth(&sil, 3).unwrap().is_empty());
    }

    #[test]
    fn even_kernel_rejected() {
        let sil = BinarySilhouette::zeros(4, 4);
        assert!(matches!(box_smooth(&sil, 4), Err(Error::EvenKernel(4))));
        assert!(matches!(box_smooth(&sil, 0), Err(Error::EvenKernel(0))));
    }

    #[test]
    fn smoothing_idempotent_on_constant_images() {
        for k in [1, 3, 5, 7] {
            let zeros = BinarySilhouette::zeros(9, 6);
            assert_eq!(box_smooth(&zeros, k).unwrap(), zeros);
        }
        for k in [1, 3] {
            let once = box_smooth(&BinarySilhouette::ones(9, 6), k).unwrap();
            assert_eq!(box_smooth(&once, k).unwrap(), once);
        }
    }

    #[test]
    fn zero_padding_erodes_all_ones_corners_at_k5() {
        // (a + 3)(b + 3) < 13 for corner offsets (0,0), (0,1), (1,0).
        let once = box_smooth(&BinarySilhouette::ones(9, 9), 5).unwrap();
        assert_eq!(once.count_on(), 81 - 4 * 3);
        // A second pass keeps eroding: (0,2) then sees only 12 of 25.
        let twice = box_smooth(&once, 5).unwrap();
        assert!(!twice.get(0, 2));
    }

    #[test]
    fn silhouette_rejects_non_binary() {
        assert!(BinarySilhouette::new(2, 1, vec![0, 2]).is_err());
        assert!(BinarySilhouette::new(2, 2, vec![0, 1]).is_err());
    }

    proptest! {
        #[test]
        fn smoothing_matches_brute_force(
            w in 1usize..14, h in 1usize..14, k in prop::sample::select(vec![1usize, 3, 5, 7]),
            seed in prop::collection::vec(any::<bool>(), 196)
        ) {
            let sil = BinarySilhouette::from_fn(w, h, |r, c| seed[r * 14 + c]);
            let out = box_smooth(&sil, k).unwrap();
            prop_assert!(out.bits().iter().all(|&b| b <= 1));
            prop_assert_eq!(out, brute_smooth(&sil, k));
        }

        #[test]
        fn k1_is_identity(bits in prop::collection::vec(0u8..2, 30)) {
            let sil = BinarySilhouette::new(6, 5, bits).unwrap();
            prop_assert_eq!(box_smooth(&sil, 1).unwrap(), sil);
        }

        #[test]
        fn hsv_round_trip(r: u8, g: u8, b: u8) {
            let back = hsv_to_rgb(rgb_to_hsv(r, g, b));
            for (got, want) in back.iter().zip([r, g, b]) {
                prop_assert!((*got as i32 - want as i32).abs() <= 1);
            }
        }

        #[test]
        fn hsv_ranges(r: u8, g: u8, b: u8) {
            let p = rgb_to_hsv(r, g, b);
            prop_assert!((0.0..360.0).contains(&p.h));
            prop_assert!((0.0..=1.0).contains(&p.s));
            prop_assert!((0.0..=1.0).contains(&p.v));
        }
    }
}
