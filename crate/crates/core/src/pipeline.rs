//! Per-frame orchestration: skin filter, largest blob, four-way scan, wrist
//! crop and fingertip detection, each timed with a monotonic clock.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::blob::{largest_blob, Connectivity};
use crate::crop::{crop_hand, find_wrist_cut, CropBox};
use crate::error::{Error, Result};
use crate::fingertip::{locate_fingertips, Fingertip, TipParams};
use crate::imaging::{BinarySilhouette, RgbImage};
use crate::orientation::{four_way_scan, projection_histogram, Axis, Side};
use crate::skin::{filter_frame, SkinThresholds};

/// Short frame side at which `slope_threshold` applies unscaled.
pub const REFERENCE_SHORT_SIDE: f64 = 480.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub thresholds: SkinThresholds,
    pub smooth_kernel: usize,
    pub connectivity: Connectivity,
    /// On-pixels per scanline at a 480-pixel short side; scaled with the frame.
    pub slope_threshold: f64,
    pub slope_window: usize,
    pub tip_params: TipParams,
    pub crop_enabled: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            thresholds: SkinThresholds::default(),
            smooth_kernel: 5,
            connectivity: Connectivity::Eight,
            slope_threshold: 4.0,
            slope_window: 2,
            tip_params: TipParams::default(),
            crop_enabled: true,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        if self.smooth_kernel.is_multiple_of(2) {
            return Err(Error::EvenKernel(self.smooth_kernel));
        }
        if self.slope_window == 0 {
            return Err(Error::config("slope window must be at least 1"));
        }
        if !self.slope_threshold.is_finite() || self.slope_threshold <= 0.0 {
            return Err(Error::config("slope threshold must be a positive number"));
        }
        self.tip_params.validate()
    }

    /// Slope threshold scaled by the frame's shorter side, so a 640x480
    /// frame and its 90-degree rotation use the same value.
    pub fn slope_threshold_for(&self, width: usize, height: usize) -> f64 {
        self.slope_threshold * width.min(height) as f64 / REFERENCE_SHORT_SIDE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NoHand,
}

/// Microseconds per stage; `None` for stages that did not run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageTimings {
    pub skin: Option<u64>,
    pub blob: Option<u64>,
    pub orient: Option<u64>,
    pub crop: Option<u64>,
    pub tips: Option<u64>,
    pub total: u64,
}

impl StageTimings {
    pub const STAGES: [&'static str; 5] = ["skin", "blob", "orient", "crop", "tips"];

    pub fn stage(&self, name: &str) -> Option<u64> {
        match name {
            "skin" => self.skin,
            "blob" => self.blob,
            "orient" => self.orient,
            "crop" => self.crop,
            "tips" => self.tips,
            "total" => Some(self.total),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub frame_id: String,
    pub width: usize,
    pub height: usize,
    pub status: Status,
    pub wrist_side: Option<Side>,
    pub finger_side: Option<Side>,
    pub crop: Option<CropBox>,
    pub fingertips: Vec<Fingertip>,
    pub timings: StageTimings,
    /// Pixels the fingertip stage scanned (area of the raster it received).
    pub tip_pixels: usize,
}

#[derive(Serialize)]
struct RecordLine<'a> {
    frame: &'a str,
    width: usize,
    height: usize,
    status: Status,
    wrist_side: Option<Side>,
    finger_side: Option<Side>,
    crop: Option<CropBox>,
    fingertips: &'a [Fingertip],
    timings_us: Option<&'a StageTimings>,
}

impl DetectionRecord {
    /// One JSON Lines object (no trailing newline). Without timings the
    /// `timings_us` key is `null`, which makes records byte-comparable.
    pub fn to_json_line(&self, include_timings: bool) -> String {
        let line = RecordLine {
            frame: &self.frame_id,
            width: self.width,
            height: self.height,
            status: self.status,
            wrist_side: self.wrist_side,
            finger_side: self.finger_side,
            crop: self.crop,
            fingertips: &self.fingertips,
            timings_us: include_timings.then_some(&self.timings),
        };
        serde_json::to_string(&line).expect("record serialises")
    }
}

fn micros(since: Instant) -> u64 {
    since.elapsed().as_micros() as u64
}

/// A validated configuration ready to process frames.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn process_frame(&self, frame_id: &str, img: &RgbImage) -> DetectionRecord {
        let cfg = &self.config;
        let start = Instant::now();
        let mut rec = DetectionRecord {
            frame_id: frame_id.to_string(),
            width: img.width(),
            height: img.height(),
            status: Status::NoHand,
            wrist_side: None,
            finger_side: None,
            crop: None,
            fingertips: Vec::new(),
            timings: StageTimings::default(),
            tip_pixels: 0,
        };

        let t = Instant::now();
        let skin = filter_frame(img, &cfg.thresholds, cfg.smooth_kernel).expect("kernel validated");
        rec.timings.skin = Some(micros(t));

        let t = Instant::now();
        let hand = largest_blob(&skin, cfg.connectivity);
        rec.timings.blob = Some(micros(t));
        let Ok(hand) = hand else {
            rec.timings.total = micros(start);
            return rec;
        };

        self.process_hand(&hand, &mut rec);
        rec.timings.total = micros(start);
        rec
    }

    /// Runs orientation, crop and fingertip stages on a largest-blob silhouette.
    fn process_hand(&self, hand: &BinarySilhouette, rec: &mut DetectionRecord) {
        let cfg = &self.config;

        let t = Instant::now();
        let scan = four_way_scan(hand);
        rec.timings.orient = Some(micros(t));
        let Ok((_, orient)) = scan else { return };

        let (origin, cropped) = if cfg.crop_enabled {
            let t = Instant::now();
            let axis = if orient.wrist_side().is_vertical() { Axis::Row } else { Axis::Column };
            let hist = projection_histogram(hand, axis);
            let threshold = cfg.slope_threshold_for(hand.width(), hand.height());
            let cut = find_wrist_cut(&hist, orient.wrist_side(), threshold, cfg.slope_window).ok();
            let result = crop_hand(hand, orient, cut);
            rec.timings.crop = Some(micros(t));
            let Ok(c) = result else { return };
            rec.crop = Some(c.0);
            c
        } else {
            (CropBox::full(hand.width(), hand.height()), hand.clone())
        };

        let t = Instant::now();
        let params = cfg.tip_params.scaled(origin.extent_along(orient));
        let tips = locate_fingertips(&cropped, orient, &params, &origin);
        rec.timings.tips = Some(micros(t));
        let Ok(tips) = tips else { return };

        rec.status = Status::Ok;
        rec.wrist_side = Some(orient.wrist_side());
        rec.finger_side = Some(orient.finger_side());
        rec.fingertips = tips;
        rec.tip_pixels = cropped.width() * cropped.height();
    }
}

pub const BOX_COLOR: [u8; 3] = [0, 255, 0];
pub const TIP_COLOR: [u8; 3] = [255, 0, 0];
/// Arm length of the fingertip cross, in pixels.
pub const CROSS_ARM: usize = 2;

/// Draws the crop outline and a cross at each fingertip.
pub fn render_overlay(img: &RgbImage, rec: &DetectionRecord) -> RgbImage {
    let mut out = img.clone();
    if rec.status == Status::NoHand {
        return out;
    }
    let (w, h) = (img.width(), img.height());
    if let Some(b) = rec.crop.filter(|b| b.x_max < h && b.y_max < w) {
        for col in b.y_min..=b.y_max {
            out.set_pixel(b.x_min, col, BOX_COLOR);
            out.set_pixel(b.x_max, col, BOX_COLOR);
        }
        for row in b.x_min..=b.x_max {
            out.set_pixel(row, b.y_min, BOX_COLOR);
            out.set_pixel(row, b.y_max, BOX_COLOR);
        }
    }
    for tip in &rec.fingertips {
        let (r, c) = (tip.x as isize, tip.y as isize);
        let arm = CROSS_ARM as isize;
        let points = (-arm..=arm).map(|d| (r + d, c)).chain((-arm..=arm).filter(|&d| d != 0).map(|d| (r, c + d)));
        for (pr, pc) in points {
            if pr >= 0 && pc >= 0 && (pr as usize) < h && (pc as usize) < w {
                out.set_pixel(pr as usize, pc as usize, TIP_COLOR);
            }
        }
    }
    out
}

/// Order statistics over a set of samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub min: u64,
    pub median: u64,
    pub p95: u64,
    pub max: u64,
}

impl Summary {
    /// Nearest-rank statistics; `None` for an empty sample.
    pub fn from_samples(samples: &mut [u64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        samples.sort_unstable();
        let n = samples.len();
        let rank = |p: f64| samples[((p * n as f64).ceil() as usize).clamp(1, n) - 1];
        Some(Self { count: n, min: samples[0], median: rank(0.5), p95: rank(0.95), max: samples[n - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub frames: usize,
    /// Latency in microseconds for each stage that ran, plus `total`.
    pub latency_us: BTreeMap<String, Summary>,
    /// Same, from a pass with cropping switched the other way.
    pub alternate_latency_us: BTreeMap<String, Summary>,
    pub alternate_crop_enabled: bool,
    pub tip_pixels_cropped: Option<Summary>,
    pub tip_pixels_uncropped: Option<Summary>,
    /// Median over frames of `1 - cropped / uncropped` tip-stage pixels.
    pub median_pixel_reduction: Option<f64>,
}

fn latency_table(records: &[DetectionRecord]) -> BTreeMap<String, Summary> {
    StageTimings::STAGES
        .iter()
        .copied()
        .chain(["total"])
        .filter_map(|stage| {
            let mut v: Vec<u64> = records.iter().filter_map(|r| r.timings.stage(stage)).collect();
            Summary::from_samples(&mut v).map(|s| (stage.to_string(), s))
        })
        .collect()
}

impl BenchReport {
    /// `primary` and `alternate` are the same frames processed with cropping
    /// on and off (in either order).
    pub fn new(primary: &[DetectionRecord], alternate: &[DetectionRecord], primary_cropped: bool) -> Self {
        let (cropped, uncropped) = if primary_cropped { (primary, alternate) } else { (alternate, primary) };
        let pixels = |recs: &[DetectionRecord]| {
            let mut v: Vec<u64> = recs.iter().filter(|r| r.status == Status::Ok).map(|r| r.tip_pixels as u64).collect();
            Summary::from_samples(&mut v)
        };
        let mut reductions: Vec<f64> = cropped
            .iter()
            .zip(uncropped)
            .filter(|(a, b)| a.status == Status::Ok && b.status == Status::Ok && b.tip_pixels > 0)
            .map(|(a, b)| 1.0 - a.tip_pixels as f64 / b.tip_pixels as f64)
            .collect();
        reductions.sort_by(f64::total_cmp);
        let median_pixel_reduction = (!reductions.is_empty()).then(|| reductions[(reductions.len() - 1) / 2]);
        Self {
            frames: primary.len(),
            latency_us: latency_table(primary),
            alternate_latency_us: latency_table(alternate),
            alternate_crop_enabled: !primary_cropped,
            tip_pixels_cropped: pixels(cropped),
            tip_pixels_uncropped: pixels(uncropped),
            median_pixel_reduction,
        }
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "frames: {}", self.frames)?;
        let table = |f: &mut fmt::Formatter<'_>, title: &str, t: &BTreeMap<String, Summary>| -> fmt::Result {
            writeln!(f, "{title}")?;
            writeln!(
                f,
                "  {:<8} {:>6} {:>9} {:>9} {:>9} {:>9}",
                "stage", "count", "min_us", "median_us", "p95_us", "max_us"
            )?;
            for stage in StageTimings::STAGES.iter().copied().chain(["total"]) {
                if let Some(s) = t.get(stage) {
                    writeln!(
                        f,
                        "  {:<8} {:>6} {:>9} {:>9} {:>9} {:>9}",
                        stage, s.count, s.min, s.median, s.p95, s.max
                    )?;
                }
            }
            Ok(())
        };
        let (first, second) = if self.alternate_crop_enabled {
            ("latency (crop disabled)", "latency (crop enabled)")
        } else {
            ("latency (crop enabled)", "latency (crop disabled)")
        };
        table(f, first, &self.latency_us)?;
        table(f, second, &self.alternate_latency_us)?;
        if let (Some(c), Some(u)) = (self.tip_pixels_cropped, self.tip_pixels_uncropped) {
            writeln!(f, "tip-stage pixels: cropped median {} / uncropped median {}", c.median, u.median)?;
        }
        if let Some(r) = self.median_pixel_reduction {
            writeln!(f, "median tip-stage pixel reduction: {:.1}%", 100.0 * r)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, HandSpec};

    fn record(status: Status) -> DetectionRecord {
        DetectionRecord {
            frame_id: "f".into(),
            width: 40,
            height: 30,
            status,
            wrist_side: None,
            finger_side: None,
            crop: None,
            fingertips: Vec::new(),
            timings: StageTimings::default(),
            tip_pixels: 0,
        }
    }

    #[test]
    fn blue_frame_has_no_hand() {
        let p = Pipeline::new(PipelineConfig::default()).unwrap();
        let rec = p.process_frame("blue", &RgbImage::filled(64, 48, [0, 0, 255]).unwrap());
        assert_eq!(rec.status, Status::NoHand);
        assert!(rec.fingertips.is_empty());
        assert!(rec.crop.is_none());
        assert!(rec.timings.skin.is_some() && rec.timings.blob.is_some());
        assert!(rec.timings.orient.is_none() && rec.timings.tips.is_none());
    }

    #[test]
    fn three_finger_hand() {
        let frame = generate(&HandSpec::default(), "hand");
        let p = Pipeline::new(PipelineConfig::default()).unwrap();
        let rec = p.process_frame("hand", &frame.image);
        assert_eq!(rec.status, Status::Ok);
        assert_eq!(rec.wrist_side, Some(Side::Down));
        assert_eq!(rec.fingertips.len(), 3);
        let mut got_tips = rec.fingertips.clone();
        let mut want_tips = frame.truth.fingertips.clone();
        got_tips.sort_by_key(|t| (t.y, t.x));
        want_tips.sort_by_key(|t| (t.y, t.x));
        for (got, want) in got_tips.iter().zip(&want_tips) {
            assert!(got.x.abs_diff(want.x) <= 3 && got.y.abs_diff(want.y) <= 3, "{got:?} vs {want:?}");
        }

        let off = Pipeline::new(PipelineConfig { crop_enabled: false, ..Default::default() }).unwrap();
        let uncropped = off.process_frame("hand", &frame.image);
        assert_eq!(uncropped.fingertips, rec.fingertips);
        assert!(uncropped.tip_pixels > rec.tip_pixels);
        assert!(uncropped.crop.is_none());
        assert!(uncropped.timings.crop.is_none());
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(Pipeline::new(PipelineConfig { smooth_kernel: 4, ..Default::default() }).is_err());
        assert!(Pipeline::new(PipelineConfig { slope_window: 0, ..Default::default() }).is_err());
        assert!(Pipeline::new(PipelineConfig { slope_threshold: -1.0, ..Default::default() }).is_err());
        let tips = TipParams { min_run: 0, ..Default::default() };
        assert!(Pipeline::new(PipelineConfig { tip_params: tips, ..Default::default() }).is_err());
    }

    #[test]
    fn json_schema() {
        let mut rec = record(Status::Ok);
        rec.wrist_side = Some(Side::Down);
        rec.finger_side = Some(Side::Up);
        rec.crop = Some(CropBox { x_min: 1, x_max: 2, y_min: 3, y_max: 4 });
        rec.fingertips = vec![Fingertip { x: 1, y: 3 }];
        rec.timings =
            StageTimings { skin: Some(5), blob: Some(6), orient: Some(7), crop: Some(8), tips: Some(9), total: 40 };
        assert_eq!(
            rec.to_json_line(true),
            r#"{"frame":"f","width":40,"height":30,"status":"ok","wrist_side":"down","finger_side":"up","crop":{"x_min":1,"x_max":2,"y_min":3,"y_max":4},"fingertips":[{"x":1,"y":3}],"timings_us":{"skin":5,"blob":6,"orient":7,"crop":8,"tips":9,"total":40}}"#
        );
        assert_eq!(
            record(Status::NoHand).to_json_line(false),
            r#"{"frame":"f","width":40,"height":30,"status":"no_hand","wrist_side":null,"finger_side":null,"crop":null,"fingertips":[],"timings_us":null}"#
        );
    }

    #[test]
    fn overlay_skips_no_hand() {
        let img = RgbImage::filled(30, 30, [0, 0, 0]).unwrap();
        let mut rec = record(Status::NoHand);
        rec.crop = Some(CropBox { x_min: 1, x_max: 5, y_min: 1, y_max: 5 });
        assert_eq!(render_overlay(&img, &rec), img);
    }

    fn changed(a: &RgbImage, b: &RgbImage) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..a.height() {
            for c in 0..a.width() {
                if a.pixel(r, c) != b.pixel(r, c) {
                    out.push((r, c));
                }
            }
        }
        out
    }

    #[test]
    fn overlay_cross_geometry() {
        let img = RgbImage::filled(30, 30, [0, 0, 0]).unwrap();
        let mut rec = record(Status::Ok);
        rec.fingertips = vec![Fingertip { x: 10, y: 10 }];
        let diff = changed(&img, &render_overlay(&img, &rec));
        assert_eq!(diff.len(), 9);
        assert!(diff.iter().all(|&(r, c)| (r == 10 && c.abs_diff(10) <= 2) || (c == 10 && r.abs_diff(10) <= 2)));
    }

    #[test]
    fn overlay_box_perimeter() {
        let img = RgbImage::filled(30, 30, [0, 0, 0]).unwrap();
        let mut rec = record(Status::Ok);
        let b = CropBox { x_min: 3, x_max: 12, y_min: 5, y_max: 20 };
        rec.crop = Some(b);
        let out = render_overlay(&img, &rec);
        let diff = changed(&img, &out);
        assert_eq!(diff.len(), 2 * b.width() + 2 * b.height() - 4);
        for (r, c) in diff {
            assert!(r == b.x_min || r == b.x_max || c == b.y_min || c == b.y_max);
            assert_eq!(out.pixel(r, c), BOX_COLOR);
        }
    }

    #[test]
    fn summary_order_statistics() {
        let mut v: Vec<u64> = (1..=100).rev().collect();
        let s = Summary::from_samples(&mut v).unwrap();
        assert_eq!((s.count, s.min, s.median, s.p95, s.max), (100, 1, 50, 95, 100));
        assert!(Summary::from_samples(&mut []).is_none());
        let mut one = vec![7];
        let s = Summary::from_samples(&mut one).unwrap();
        assert!(s.median <= s.p95 && s.p95 <= s.max);
    }

    #[test]
    fn bench_report_pairs_passes() {
        let frame = generate(&HandSpec::default(), "hand");
        let on = Pipeline::new(PipelineConfig::default()).unwrap();
        let off = Pipeline::new(PipelineConfig { crop_enabled: false, ..Default::default() }).unwrap();
        let a = vec![on.process_frame("a", &frame.image), record(Status::NoHand)];
        let b = vec![off.process_frame("a", &frame.image), record(Status::NoHand)];
        let report = BenchReport::new(&a, &b, true);
        assert_eq!(report.frames, 2);
        assert_eq!(report.latency_us["total"].count, 2);
        assert_eq!(report.latency_us["tips"].count, 1);
        assert!(!report.alternate_latency_us.contains_key("crop"));
        assert!(report.median_pixel_reduction.unwrap() > 0.25);
        assert!(report.to_string().contains("median tip-stage pixel reduction"));
    }
}
