//! Wrist-cut detection on the hand-axis histogram and the hand crop.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaging::BinarySilhouette;
use crate::orientation::{Axis, Orientation, ProjectionHistogram, Side};

/// Inclusive frame-coordinate bounds; `x` is the row, `y` the column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CropBox {
    pub x_min: usize,
    pub x_max: usize,
    pub y_min: usize,
    pub y_max: usize,
}

impl CropBox {
    pub fn full(width: usize, height: usize) -> Self {
        Self { x_min: 0, x_max: height - 1, y_min: 0, y_max: width - 1 }
    }

    pub fn width(&self) -> usize {
        self.y_max - self.y_min + 1
    }

    pub fn height(&self) -> usize {
        self.x_max - self.x_min + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.x_min..=self.x_max).contains(&row) && (self.y_min..=self.y_max).contains(&col)
    }

    /// Extent along the hand axis.
    pub fn extent_along(&self, orient: Orientation) -> usize {
        if orient.wrist_side().is_vertical() {
            self.height()
        } else {
            self.width()
        }
    }
}

/// Tight bounding box of all on-pixels with `row` in `rows` and `col` in `cols`.
fn bounding_box(
    sil: &BinarySilhouette,
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> Option<CropBox> {
    let mut bbox: Option<CropBox> = None;
    for row in rows {
        for col in cols.clone() {
            if !sil.get(row, col) {
                continue;
            }
            let b = bbox.get_or_insert(CropBox { x_min: row, x_max: row, y_min: col, y_max: col });
            b.x_min = b.x_min.min(row);
            b.x_max = b.x_max.max(row);
            b.y_min = b.y_min.min(col);
            b.y_max = b.y_max.max(col);
        }
    }
    bbox
}

/// Change in count per scanline between two bins: `(c[i2] - c[i1]) / (i2 - i1)`.
pub fn slope(h: &ProjectionHistogram, i1: usize, i2: usize) -> Result<f64> {
    if i1 == i2 {
        return Err(Error::DegenerateInterval(i1));
    }
    let rise = h.counts[i2] as f64 - h.counts[i1] as f64;
    let run = i2 as f64 - i1 as f64;
    Ok(rise / run)
}

/// Walks the hand-axis histogram inward from the wrist end and returns the
/// far end of the first `window`-long step whose slope, measured in the scan
/// direction, reaches `threshold`. That bin is the first palm scanline.
///
/// The walk starts at the first occupied bin from the wrist side, so a hand
/// that does not touch the frame edge does not register its own boundary as
/// an inclination.
pub fn find_wrist_cut(h: &ProjectionHistogram, wrist_side: Side, threshold: f64, window: usize) -> Result<usize> {
    if window == 0 {
        return Err(Error::config("slope window must be at least 1"));
    }
    let expected = if wrist_side.is_vertical() { Axis::Row } else { Axis::Column };
    if h.axis != expected {
        return Err(Error::config("wrist-cut histogram must run along the hand axis"));
    }
    let n = h.len();
    let from_high = matches!(wrist_side, Side::Down | Side::Right);
    let start = if from_high { h.counts.iter().rposition(|&c| c > 0) } else { h.counts.iter().position(|&c| c > 0) }
        .ok_or(Error::NoForeground)?;

    let mut i = start;
    loop {
        let j = if from_high {
            match i.checked_sub(window) {
                Some(j) => j,
                None => break,
            }
        } else if i + window < n {
            i + window
        } else {
            break;
        };
        let along_scan = if from_high { -slope(h, i, j)? } else { slope(h, i, j)? };
        if along_scan >= threshold {
            return Ok(j);
        }
        if from_high {
            i -= 1;
        } else {
            i += 1;
        }
    }
    Err(Error::NoInclination)
}

/// Crops the silhouette to the hand. The wrist-side bound is `cut` (or the
/// tight bound when `cut` is `None`); the other three bounds are the first
/// occupied scanlines of the finger-side region. Returns the box in frame
/// coordinates and the box-local silhouette.
pub fn crop_hand(
    sil: &BinarySilhouette,
    orient: Orientation,
    cut: Option<usize>,
) -> Result<(CropBox, BinarySilhouette)> {
    let (w, h) = (sil.width(), sil.height());
    let whole = bounding_box(sil, 0..=h.saturating_sub(1), 0..=w.saturating_sub(1)).ok_or(Error::NoForeground)?;

    let cropped_box = cut
        .and_then(|c| {
            let (rows, cols) = match orient.wrist_side() {
                Side::Down => (0..=c.min(h - 1), 0..=w - 1),
                Side::Up => (c.min(h - 1)..=h - 1, 0..=w - 1),
                Side::Right => (0..=h - 1, 0..=c.min(w - 1)),
                Side::Left => (0..=h - 1, c.min(w - 1)..=w - 1),
            };
            let mut b = bounding_box(sil, rows, cols)?;
            match orient.wrist_side() {
                Side::Down => b.x_max = c.min(h - 1),
                Side::Up => b.x_min = c.min(h - 1),
                Side::Right => b.y_max = c.min(w - 1),
                Side::Left => b.y_min = c.min(w - 1),
            }
            Some(b)
        })
        .unwrap_or(whole);

    Ok((cropped_box, extract(sil, &cropped_box)))
}

/// Copies the pixels inside `b` into a box-local silhouette.
pub fn extract(sil: &BinarySilhouette, b: &CropBox) -> BinarySilhouette {
    BinarySilhouette::from_fn(b.width(), b.height(), |r, c| sil.get(b.x_min + r, b.y_min + c))
}
