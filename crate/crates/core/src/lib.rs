//! Real-time fingertip detection on skin-segmented hand silhouettes.
//!
//! A frame goes through five stages: chroma skin filtering with majority
//! smoothing, largest-BLOB selection, a four-way boundary scan that finds the
//! wrist edge, a histogram-slope crop that trims the forearm, and an
//! intensity ramp whose 255-pixels trace the finger edge, from which tips are
//! grouped. [`pipeline::Pipeline`] runs them in order and times each one.

pub mod blob;
pub mod cli;
pub mod config;
pub mod crop;
pub mod error;
pub mod fingertip;
pub mod imaging;
pub mod io;
pub mod orientation;
pub mod pipeline;
pub mod skin;
pub mod synth;

pub use blob::{connected_components, largest_blob, ComponentLabels, Connectivity};
pub use crop::{crop_hand, find_wrist_cut, slope, CropBox};
pub use error::{Error, Result};
pub use fingertip::{
    detect_fingertips, finger_edges, intensity_ramp, locate_fingertips, scanline_counts, FingerEdgeMap, Fingertip,
    TipParams,
};
pub use imaging::{box_smooth, rgb_to_hsv, rgb_to_ycbcr, BinarySilhouette, GrayImage, HsvPixel, RgbImage, YCbCrPixel};
pub use orientation::{
    four_way_scan, projection_histogram, Axis, HandAxis, Orientation, ProjectionHistogram, ScanProfile, Side,
};
pub use pipeline::{render_overlay, BenchReport, DetectionRecord, Pipeline, PipelineConfig, StageTimings, Status};
pub use skin::{classify_skin_hsv, classify_skin_ycbcr, filter_frame, ColorSpace, SkinThresholds};
