//! `tipdetect` command line: frame-directory detection and the synthetic
//! corpus generator.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use rayon::prelude::*;

use crate::blob::Connectivity;
use crate::config::{apply_config_text, CONFIG_ENV};
use crate::error::{Error, Result};
use crate::io::{list_frames, read_frame, write_ppm};
use crate::orientation::Side;
use crate::pipeline::{render_overlay, BenchReport, DetectionRecord, Pipeline, PipelineConfig};
use crate::skin::ColorSpace;
use crate::synth::{generate, HandSpec, MAX_FINGERS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tipdetect",
    version,
    about = "Detect fingertips in hand frames",
    args_conflicts_with_subcommands = true,
    subcommand_negates_reqs = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    detect: DetectArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic corpus of hand frames plus ground_truth.jsonl.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Frame file or directory of frames (processed in file-name order).
    #[arg(long, required = true)]
    input: Option<PathBuf>,
    /// JSON Lines output path.
    #[arg(long, required = true)]
    output: Option<PathBuf>,

    #[arg(long, value_name = "hsv|ycbcr")]
    color_space: Option<ColorSpace>,
    #[arg(long, value_name = "N")]
    hue_min: Option<f64>,
    #[arg(long, value_name = "N")]
    hue_max: Option<f64>,
    #[arg(long, value_name = "F")]
    sat_min: Option<f64>,
    #[arg(long, value_name = "F")]
    sat_max: Option<f64>,
    #[arg(long, value_name = "N")]
    cb_min: Option<u8>,
    #[arg(long, value_name = "N")]
    cb_max: Option<u8>,
    #[arg(long, value_name = "N")]
    cr_min: Option<u8>,
    #[arg(long, value_name = "N")]
    cr_max: Option<u8>,
    /// Odd width of the majority smoothing box.
    #[arg(long, value_name = "K")]
    smooth_kernel: Option<usize>,
    #[arg(long, value_name = "4|8")]
    connectivity: Option<Connectivity>,
    /// Wrist-cut slope at a 480-pixel short side, in on-pixels per scanline.
    #[arg(long, value_name = "F")]
    slope_threshold: Option<f64>,
    /// Scanlines spanned by each slope measurement.
    #[arg(long, value_name = "N")]
    slope_window: Option<usize>,
    /// Largest edge jump within one finger, at a 480-pixel crop.
    #[arg(long, value_name = "N")]
    tip_diff: Option<usize>,
    /// Narrowest finger in scanlines, at a 480-pixel crop.
    #[arg(long, value_name = "N")]
    tip_min_run: Option<usize>,
    /// Run the fingertip stage on the whole silhouette.
    #[arg(long)]
    no_crop: bool,
    /// Directory for annotated copies of every frame.
    #[arg(long, value_name = "DIR")]
    overlay: Option<PathBuf>,
    /// Print per-stage latency statistics, with and without cropping.
    #[arg(long)]
    bench: bool,
    /// Frames processed concurrently.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Write `timings_us` as null so runs are byte-comparable.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    fingers: usize,
    /// Direction the fingers point.
    #[arg(long, default_value = "up", value_name = "up|down|left|right")]
    orientation: Side,
    #[arg(long, default_value_t = 10)]
    frames: usize,
    /// Per-pixel probability of a random colour.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 640)]
    width: usize,
    #[arg(long, default_value_t = 480)]
    height: usize,
    /// Draw a floating hand with no forearm.
    #[arg(long)]
    no_forearm: bool,
}

fn usage_error(kind: ErrorKind, msg: impl std::fmt::Display) -> i32 {
    let _ = Cli::command().error(kind, msg).print();
    EXIT_USAGE
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Some(Command::Gen(args)) => run_gen(&args),
        None => run_detect(&cli.detect),
    }
}

fn build_config(args: &DetectArgs) -> std::result::Result<PipelineConfig, (i32, String)> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = std::env::var_os(CONFIG_ENV) {
        let text = fs::read_to_string(&path)
            .map_err(|e| (EXIT_IO, format!("cannot read config {}: {e}", Path::new(&path).display())))?;
        apply_config_text(&mut cfg, &text).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    }
    let t = &mut cfg.thresholds;
    macro_rules! set {
        ($field:expr, $flag:expr) => {
            if let Some(v) = $flag {
                $field = v;
            }
        };
    }
    set!(t.color_space, args.color_space);
    set!(t.hue_min, args.hue_min);
    set!(t.hue_max, args.hue_max);
    set!(t.sat_min, args.sat_min);
    set!(t.sat_max, args.sat_max);
    set!(t.cb_min, args.cb_min);
    set!(t.cb_max, args.cb_max);
    set!(t.cr_min, args.cr_min);
    set!(t.cr_max, args.cr_max);
    set!(cfg.smooth_kernel, args.smooth_kernel);
    set!(cfg.connectivity, args.connectivity);
    set!(cfg.slope_threshold, args.slope_threshold);
    set!(cfg.slope_window, args.slope_window);
    set!(cfg.tip_params.diff_threshold, args.tip_diff);
    set!(cfg.tip_params.min_run, args.tip_min_run);
    if args.no_crop {
        cfg.crop_enabled = false;
    }
    Ok(cfg)
}

fn frame_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn process_one(pipeline: &Pipeline, path: &Path, overlay: Option<&Path>) -> Result<DetectionRecord> {
    let img = read_frame(path)?;
    let rec = pipeline.process_frame(&frame_name(path), &img);
    if let Some(dir) = overlay {
        let name = Path::new(&rec.frame_id).with_extension("ppm");
        write_ppm(&dir.join(name), &render_overlay(&img, &rec))?;
    }
    Ok(rec)
}

fn process_all(
    pool: &rayon::ThreadPool,
    pipeline: &Pipeline,
    frames: &[PathBuf],
    overlay: Option<&Path>,
) -> Vec<Result<DetectionRecord>> {
    pool.install(|| frames.par_iter().map(|p| process_one(pipeline, p, overlay)).collect())
}

fn run_detect(args: &DetectArgs) -> i32 {
    let (Some(input), Some(output)) = (args.input.as_deref(), args.output.as_deref()) else {
        return usage_error(ErrorKind::MissingRequiredArgument, "--input and --output are required");
    };
    if !input.exists() {
        return usage_error(ErrorKind::ValueValidation, format!("input path does not exist: {}", input.display()));
    }
    if args.jobs == 0 {
        return usage_error(ErrorKind::ValueValidation, "--jobs must be at least 1");
    }
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err((code, msg)) => {
            eprintln!("tipdetect: {msg}");
            return code;
        }
    };
    let pipeline = match Pipeline::new(cfg) {
        Ok(p) => p,
        Err(e) => return usage_error(ErrorKind::ValueValidation, e),
    };

    match detect(args, &pipeline, input, output) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_IO,
        Err(e) => {
            eprintln!("tipdetect: {e}");
            EXIT_IO
        }
    }
}

/// Returns `Ok(false)` when some frames failed but the rest were written.
fn detect(args: &DetectArgs, pipeline: &Pipeline, input: &Path, output: &Path) -> Result<bool> {
    let frames = list_frames(input)?;
    if let Some(dir) = &args.overlay {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(output).map_err(|e| Error::io(output, e))?;
    let mut out = BufWriter::new(file);
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build().map_err(|e| Error::config(e.to_string()))?;

    let results = process_all(&pool, pipeline, &frames, args.overlay.as_deref());
    let mut all_ok = true;
    let mut records = Vec::with_capacity(results.len());
    let mut good_frames = Vec::with_capacity(results.len());
    for (path, result) in frames.iter().zip(results) {
        match result {
            Ok(rec) => {
                writeln!(out, "{}", rec.to_json_line(!args.no_timings)).map_err(|e| Error::io(output, e))?;
                records.push(rec);
                good_frames.push(path.clone());
            }
            Err(e) => {
                eprintln!("tipdetect: skipping frame: {e}");
                all_ok = false;
            }
        }
    }
    out.flush().map_err(|e| Error::io(output, e))?;

    if args.bench {
        let primary_cropped = pipeline.config().crop_enabled;
        let alt = Pipeline::new(PipelineConfig { crop_enabled: !primary_cropped, ..pipeline.config().clone() })?;
        let mut alternate = Vec::with_capacity(records.len());
        for result in process_all(&pool, &alt, &good_frames, None) {
            alternate.push(result?);
        }
        print!("{}", BenchReport::new(&records, &alternate, primary_cropped));
    }
    Ok(all_ok)
}

fn run_gen(args: &GenArgs) -> i32 {
    if !(1..=MAX_FINGERS).contains(&args.fingers) {
        return usage_error(ErrorKind::ValueValidation, format!("--fingers must be between 1 and {MAX_FINGERS}"));
    }
    if !(0.0..=1.0).contains(&args.noise) {
        return usage_error(ErrorKind::ValueValidation, "--noise must be a probability in [0, 1]");
    }
    if args.width < 200 || args.height < 200 {
        return usage_error(ErrorKind::ValueValidation, "frames must be at least 200x200");
    }
    match write_corpus(args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("tipdetect: {e}");
            EXIT_IO
        }
    }
}

fn write_corpus(args: &GenArgs) -> Result<()> {
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let truth_path = args.out.join("ground_truth.jsonl");
    let mut truth = BufWriter::new(File::create(&truth_path).map_err(|e| Error::io(&truth_path, e))?);
    for i in 0..args.frames {
        let name = format!("frame_{i:05}.ppm");
        let spec = HandSpec {
            fingers: args.fingers,
            finger_side: args.orientation,
            noise: args.noise,
            seed: args.seed.wrapping_mul(1_000_003).wrapping_add(i as u64),
            width: args.width,
            height: args.height,
            forearm: !args.no_forearm,
        };
        let frame = generate(&spec, &name);
        write_ppm(&args.out.join(&name), &frame.image)?;
        let line = serde_json::to_string(&frame.truth).expect("ground truth serialises");
        writeln!(truth, "{line}").map_err(|e| Error::io(&truth_path, e))?;
    }
    truth.flush().map_err(|e| Error::io(&truth_path, e))
}
