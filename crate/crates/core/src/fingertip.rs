//! Fingertip localisation on the cropped silhouette.
//!
//! Every scanline parallel to the hand axis (a column when the hand is
//! vertical, a row when it is horizontal) gets an intensity ramp over its
//! on-pixels, rising from the wrist side to 255 at the finger-side extreme.
//! The 255-pixels trace the finger edge. Walking that edge across the
//! scanlines, positions that change by at most `diff_threshold` are grouped
//! into runs; a run that stands out toward the finger side from both of its
//! neighbours is a finger, and its most finger-ward pixel is the tip.
//!
//! Scanlines are walked in hand-local order (left to right as seen with the
//! fingers pointing up), which keeps tie-breaking consistent when the frame is
//! rotated.

use serde::Serialize;

use crate::crop::CropBox;
use crate::error::{Error, Result};
use crate::imaging::{BinarySilhouette, GrayImage};
use crate::orientation::{projection_histogram, Axis, HandAxis, Orientation, ProjectionHistogram, Side};

/// Scale at which the default tip parameters were chosen: the along-axis
/// extent of a full 640x480 frame.
pub const REFERENCE_EXTENT: f64 = 480.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TipParams {
    /// Largest edge-position jump between neighbouring scanlines of one finger.
    pub diff_threshold: usize,
    /// Fewest scanlines a finger may span.
    pub min_run: usize,
    pub max_tips: Option<usize>,
}

impl Default for TipParams {
    fn default() -> Self {
        Self { diff_threshold: 2, min_run: 3, max_tips: None }
    }
}

impl TipParams {
    pub fn validate(&self) -> Result<()> {
        if self.diff_threshold == 0 || self.min_run == 0 {
            return Err(Error::config("tip diff threshold and minimum run must be at least 1"));
        }
        Ok(())
    }

    /// Rescales the thresholds linearly from `REFERENCE_EXTENT` to a crop
    /// whose extent along the hand axis is `extent`. Never drops below 1.
    pub fn scaled(&self, extent: usize) -> Self {
        let f = extent as f64 / REFERENCE_EXTENT;
        let scale = |v: usize| ((v as f64 * f).round() as usize).max(1);
        Self { diff_threshold: scale(self.diff_threshold), min_run: scale(self.min_run), max_tips: self.max_tips }
    }
}

/// A detected fingertip in frame coordinates (`x` row, `y` column).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fingertip {
    pub x: usize,
    pub y: usize,
}

/// Marks the finger-side extreme on-pixel of each occupied scanline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerEdgeMap {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl FingerEdgeMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col] != 0
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }
}

fn scanline_axis(orient: Orientation) -> Axis {
    match orient.hand_axis() {
        HandAxis::Vertical => Axis::Column,
        HandAxis::Horizontal => Axis::Row,
    }
}

/// On-pixel count of every scanline parallel to the hand axis.
pub fn scanline_counts(sil: &BinarySilhouette, orient: Orientation) -> Result<ProjectionHistogram> {
    if sil.is_empty() {
        return Err(Error::NoForeground);
    }
    Ok(projection_histogram(sil, scanline_axis(orient)))
}

/// Index geometry of one orientation over a `width x height` raster.
#[derive(Clone, Copy)]
struct Frame {
    width: usize,
    height: usize,
    finger: Side,
}

impl Frame {
    fn new(width: usize, height: usize, orient: Orientation) -> Self {
        Self { width, height, finger: orient.finger_side() }
    }

    fn scanlines(&self) -> usize {
        if self.finger.is_vertical() {
            self.width
        } else {
            self.height
        }
    }

    fn depth(&self) -> usize {
        if self.finger.is_vertical() {
            self.height
        } else {
            self.width
        }
    }

    /// Pixel at hand-local scanline `s` and reach `d`, where reach 0 is the
    /// wrist-side end and reach `depth - 1` the finger-side end.
    fn pixel(&self, s: usize, d: usize) -> (usize, usize) {
        let (w, h) = (self.width, self.height);
        match self.finger {
            Side::Up => (h - 1 - d, s),
            Side::Right => (s, d),
            Side::Down => (d, w - 1 - s),
            Side::Left => (h - 1 - s, w - 1 - d),
        }
    }
}

fn round_ratio(num: usize, den: usize) -> usize {
    (2 * num + den) / (2 * den)
}

/// Per scanline, ranks on-pixels `1..=c` from the wrist side and assigns
/// `round(rank * 255 / c)`. The last on-pixel is always exactly 255 and no
/// other pixel reaches it; every on-pixel is at least 1.
pub fn intensity_ramp(sil: &BinarySilhouette, orient: Orientation) -> Result<GrayImage> {
    let counts = scanline_counts(sil, orient)?;
    let frame = Frame::new(sil.width(), sil.height(), orient);
    let mut ramp = GrayImage::zeros(sil.width(), sil.height());
    let scan_to_frame = |s: usize| match frame.finger {
        Side::Up | Side::Right => s,
        Side::Down | Side::Left => frame.scanlines() - 1 - s,
    };
    for s in 0..frame.scanlines() {
        let c = counts.counts[scan_to_frame(s)];
        if c == 0 {
            continue;
        }
        let mut rank = 0;
        for d in 0..frame.depth() {
            let (row, col) = frame.pixel(s, d);
            if !sil.get(row, col) {
                continue;
            }
            rank += 1;
            let value = if rank == c { 255 } else { round_ratio(rank * 255, c).clamp(1, 254) };
            ramp.set(row, col, value as u8);
        }
    }
    Ok(ramp)
}

pub fn finger_edges(ramp: &GrayImage) -> FingerEdgeMap {
    FingerEdgeMap {
        width: ramp.width(),
        height: ramp.height(),
        bits: ramp.data().iter().map(|&v| u8::from(v == 255)).collect(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Run {
    start: usize,
    end: usize,
}

/// Groups scanlines into fingers and returns one tip per finger, in frame
/// coordinates offset by `origin`, ordered by frame scanline index.
pub fn detect_fingertips(
    edges: &FingerEdgeMap,
    orient: Orientation,
    params: &TipParams,
    origin: &CropBox,
) -> Vec<Fingertip> {
    let frame = Frame::new(edges.width, edges.height, orient);
    let reach: Vec<Option<usize>> = (0..frame.scanlines())
        .map(|s| {
            (0..frame.depth()).rev().find(|&d| {
                let (r, c) = frame.pixel(s, d);
                edges.get(r, c)
            })
        })
        .collect();

    let mut runs = Vec::new();
    let mut s = 0;
    while s < reach.len() {
        let Some(mut prev) = reach[s] else {
            s += 1;
            continue;
        };
        let start = s;
        while let Some(next) = reach.get(s + 1).copied().flatten() {
            if next.abs_diff(prev) > params.diff_threshold {
                break;
            }
            prev = next;
            s += 1;
        }
        runs.push(Run { start, end: s });
        s += 1;
    }

    let higher = |neighbour: Option<usize>, endpoint: usize| neighbour.is_some_and(|v| v > endpoint);
    let mut tips: Vec<(usize, usize)> = Vec::new();
    for run in runs {
        let len = run.end - run.start + 1;
        if len < params.min_run {
            continue;
        }
        let left = run.start.checked_sub(1).and_then(|i| reach[i]);
        let right = reach.get(run.end + 1).copied().flatten();
        if higher(left, reach[run.start].unwrap()) || higher(right, reach[run.end].unwrap()) {
            continue;
        }
        let top = (run.start..=run.end).filter_map(|i| reach[i]).max().unwrap();
        let median = run.start + (len - 1) / 2;
        let best =
            (run.start..=run.end).filter(|&i| reach[i] == Some(top)).min_by_key(|&i| (i.abs_diff(median), i)).unwrap();
        tips.push((best, top));
    }

    if let Some(cap) = params.max_tips {
        tips.sort_by_key(|&(s, d)| (std::cmp::Reverse(d), s));
        tips.truncate(cap);
    }

    let mut out: Vec<Fingertip> = tips
        .into_iter()
        .map(|(s, d)| {
            let (r, c) = frame.pixel(s, d);
            Fingertip { x: origin.x_min + r, y: origin.y_min + c }
        })
        .collect();
    match orient.hand_axis() {
        HandAxis::Vertical => out.sort_by_key(|t| (t.y, t.x)),
        HandAxis::Horizontal => out.sort_by_key(|t| (t.x, t.y)),
    }
    out
}

/// Ramp, edge extraction and tip grouping on a cropped silhouette.
pub fn locate_fingertips(
    cropped: &BinarySilhouette,
    orient: Orientation,
    params: &TipParams,
    origin: &CropBox,
) -> Result<Vec<Fingertip>> {
    let ramp = intensity_ramp(cropped, orient)?;
    Ok(detect_fingertips(&finger_edges(&ramp), orient, params, origin))
}
