//! Synthetic hand frames with known fingertip positions.
//!
//! A hand is drawn pointing up on a canvas, then rotated into the requested
//! orientation: a forearm entering from the bottom edge, a palm with rounded
//! corners, and `N` rectangular fingers rising from the flat top of the palm.
//! Lengths are in pixels at a 480-pixel short side and scale with the frame.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fingertip::Fingertip;
use crate::imaging::{BinarySilhouette, RgbImage};
use crate::orientation::Side;

pub const MAX_FINGERS: usize = 5;

const SKIN_TONES: [[u8; 3]; 4] = [[224, 160, 128], [210, 150, 115], [235, 175, 140], [200, 140, 110]];
const SKIN_JITTER: i32 = 6;
const BACKGROUND_JITTER: i32 = 10;

/// Rotates a raster 90 degrees clockwise: `(row, col)` moves to
/// `(col, height - 1 - row)` and width and height swap.
pub fn rotate_silhouette_cw(sil: &BinarySilhouette) -> BinarySilhouette {
    let (w, h) = (sil.width(), sil.height());
    BinarySilhouette::from_fn(h, w, |r, c| sil.get(h - 1 - c, r))
}

pub fn rotate_rgb_cw(img: &RgbImage) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    let mut data = Vec::with_capacity(w * h * 3);
    for r in 0..w {
        for c in 0..h {
            data.extend_from_slice(&img.pixel(h - 1 - c, r));
        }
    }
    RgbImage::new(h, w, data).expect("rotation preserves pixel count")
}

/// Where a point of a `width x height` frame lands after [`rotate_rgb_cw`].
pub fn rotate_point_cw(p: Fingertip, _width: usize, height: usize) -> Fingertip {
    Fingertip { x: p.y, y: height - 1 - p.x }
}

/// Number of clockwise quarter turns that take an up-pointing hand to `finger_side`.
fn quarter_turns(finger_side: Side) -> usize {
    match finger_side {
        Side::Up => 0,
        Side::Right => 1,
        Side::Down => 2,
        Side::Left => 3,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandSpec {
    pub fingers: usize,
    pub finger_side: Side,
    /// Probability that a pixel is replaced by a uniformly random colour.
    pub noise: f64,
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub forearm: bool,
}

impl Default for HandSpec {
    fn default() -> Self {
        Self { fingers: 3, finger_side: Side::Up, noise: 0.0, seed: 0, width: 640, height: 480, forearm: true }
    }
}

/// Ground truth for one generated frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub frame: String,
    pub width: usize,
    pub height: usize,
    pub fingers: usize,
    pub wrist_side: Side,
    pub finger_side: Side,
    pub forearm: bool,
    pub noise: f64,
    pub fingertips: Vec<Fingertip>,
}

#[derive(Debug, Clone)]
pub struct SyntheticFrame {
    pub image: RgbImage,
    /// Noise-free hand mask, in frame coordinates.
    pub mask: BinarySilhouette,
    pub truth: GroundTruth,
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    top: i64,
    bottom: i64,
    left: i64,
    right: i64,
}

impl Rect {
    fn contains(&self, r: i64, c: i64) -> bool {
        r >= self.top && r <= self.bottom && c >= self.left && c <= self.right
    }
}

/// Rectangle with circular corners of radius `radius`.
#[derive(Debug, Clone, Copy)]
struct RoundedRect {
    rect: Rect,
    radius: i64,
}

impl RoundedRect {
    fn contains(&self, r: i64, c: i64) -> bool {
        if !self.rect.contains(r, c) {
            return false;
        }
        let rad = self.radius;
        let cr = r.clamp(self.rect.top + rad, self.rect.bottom - rad);
        let cc = c.clamp(self.rect.left + rad, self.rect.right - rad);
        let (dr, dc) = (r - cr, c - cc);
        dr * dr + dc * dc <= rad * rad
    }
}

struct Hand {
    palm: RoundedRect,
    forearm: Option<Rect>,
    fingers: Vec<Rect>,
    tips: Vec<Fingertip>,
}

impl Hand {
    fn contains(&self, r: i64, c: i64) -> bool {
        self.palm.contains(r, c)
            || self.forearm.is_some_and(|f| f.contains(r, c))
            || self.fingers.iter().any(|f| f.contains(r, c))
    }
}

fn layout(rng: &mut ChaCha8Rng, fingers: usize, canvas_w: i64, canvas_h: i64, forearm: bool) -> Hand {
    let scale = canvas_w.min(canvas_h) as f64 / 480.0;
    let px = |v: f64| (v * scale).round() as i64;
    let span = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| px(rng.gen_range(lo..=hi));

    let forearm_w = span(rng, 70.0, 90.0);
    let radius = px(38.0);
    let palm_h = span(rng, 90.0, 110.0);

    let widths: Vec<i64> = (0..fingers).map(|_| span(rng, 12.0, 18.0)).collect();
    let gaps: Vec<i64> = (1..fingers).map(|_| span(rng, 12.0, 18.0)).collect();
    let mut lengths: Vec<i64> = Vec::with_capacity(fingers);
    while lengths.len() < fingers {
        let l = span(rng, 45.0, 95.0);
        if lengths.iter().all(|&x| (x - l).abs() >= px(3.0)) {
            lengths.push(l);
        }
    }
    let finger_span: i64 = widths.iter().sum::<i64>() + gaps.iter().sum::<i64>();
    let margin = px(6.0);
    let flat = (finger_span + 2 * margin).max(forearm_w + px(24.0)) + span(rng, 0.0, 10.0);
    let palm_w = flat + 2 * radius;

    let side_margin = px(20.0);
    let left = rng.gen_range(side_margin..=(canvas_w - side_margin - palm_w).max(side_margin));
    let top_margin = span(rng, 25.0, 50.0);
    let palm_top = top_margin + lengths.iter().max().copied().unwrap_or(0);
    let palm = RoundedRect {
        rect: Rect { top: palm_top, bottom: palm_top + palm_h - 1, left, right: left + palm_w - 1 },
        radius,
    };

    let forearm = forearm.then(|| {
        let slack = ((flat - forearm_w) / 2 - px(12.0)).max(0);
        let offset = rng.gen_range(-slack..=slack);
        let f_left = left + radius + (flat - forearm_w) / 2 + offset;
        Rect { top: palm.rect.bottom - px(10.0), bottom: canvas_h - 1, left: f_left, right: f_left + forearm_w - 1 }
    });

    let mut x = left + radius + margin + rng.gen_range(0..=(flat - finger_span - 2 * margin).max(0));
    let mut rects = Vec::with_capacity(fingers);
    let mut tips = Vec::with_capacity(fingers);
    for i in 0..fingers {
        let top = palm_top - lengths[i];
        rects.push(Rect { top, bottom: palm_top + px(10.0), left: x, right: x + widths[i] - 1 });
        tips.push(Fingertip { x: top as usize, y: (x + (widths[i] - 1) / 2) as usize });
        x += widths[i] + gaps.get(i).copied().unwrap_or(0);
    }
    Hand { palm, forearm, fingers: rects, tips }
}

fn jitter(rng: &mut ChaCha8Rng, base: [u8; 3], amount: i32) -> [u8; 3] {
    base.map(|v| (v as i32 + rng.gen_range(-amount..=amount)).clamp(0, 255) as u8)
}

#[derive(Clone, Copy)]
enum Background {
    Tinted([u8; 3]),
    Gray(u8),
}

impl Background {
    fn pick(rng: &mut ChaCha8Rng) -> Self {
        match rng.gen_range(0..3) {
            0 => Background::Tinted([rng.gen_range(20..=60), rng.gen_range(60..=110), rng.gen_range(150..=220)]),
            1 => Background::Tinted([rng.gen_range(30..=70), rng.gen_range(120..=170), rng.gen_range(40..=80)]),
            _ => Background::Gray(rng.gen_range(90..=170)),
        }
    }

    /// Gray stays achromatic: one offset is shared by all three channels.
    fn sample(self, rng: &mut ChaCha8Rng) -> [u8; 3] {
        match self {
            Background::Tinted(base) => jitter(rng, base, BACKGROUND_JITTER),
            Background::Gray(g) => {
                let v = (g as i32 + rng.gen_range(-BACKGROUND_JITTER..=BACKGROUND_JITTER)).clamp(0, 255) as u8;
                [v, v, v]
            }
        }
    }
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Renders one frame. Identical specs give identical frames.
pub fn generate(spec: &HandSpec, frame: &str) -> SyntheticFrame {
    let fingers = spec.fingers.clamp(1, MAX_FINGERS);
    let turns = quarter_turns(spec.finger_side);
    let (cw, ch) = if turns.is_multiple_of(2) { (spec.width, spec.height) } else { (spec.height, spec.width) };
    let salt = (fingers as u64) << 8 | turns as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(mix(spec.seed, salt));

    let hand = layout(&mut rng, fingers, cw as i64, ch as i64, spec.forearm);
    let skin = SKIN_TONES[rng.gen_range(0..SKIN_TONES.len())];
    let background = Background::pick(&mut rng);

    let mut mask = BinarySilhouette::from_fn(cw, ch, |r, c| hand.contains(r as i64, c as i64));
    let mut data = Vec::with_capacity(cw * ch * 3);
    for on in mask.bits() {
        let px = if rng.gen_bool(spec.noise.clamp(0.0, 1.0)) {
            rng.gen::<[u8; 3]>()
        } else if *on == 1 {
            jitter(&mut rng, skin, SKIN_JITTER)
        } else {
            background.sample(&mut rng)
        };
        data.extend_from_slice(&px);
    }
    let mut image = RgbImage::new(cw, ch, data).expect("canvas dimensions");
    let mut tips = hand.tips;
    let (mut w, mut h) = (cw, ch);
    for _ in 0..turns {
        image = rotate_rgb_cw(&image);
        mask = rotate_silhouette_cw(&mask);
        tips = tips.iter().map(|&t| rotate_point_cw(t, w, h)).collect();
        std::mem::swap(&mut w, &mut h);
    }
    tips.sort();

    SyntheticFrame {
        image,
        mask,
        truth: GroundTruth {
            frame: frame.to_string(),
            width: w,
            height: h,
            fingers,
            wrist_side: spec.finger_side.opposite(),
            finger_side: spec.finger_side,
            forearm: spec.forearm,
            noise: spec.noise,
            fingertips: tips,
        },
    }
}
