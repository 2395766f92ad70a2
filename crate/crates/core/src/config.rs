//! Flat `key = value` configuration files.
//!
//! Keys match the CLI flag names with dashes or underscores, e.g.
//! `hue-min = 5` or `slope_threshold = 3.5`. Blank lines and lines starting
//! with `#` are ignored.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pipeline::PipelineConfig;

pub const CONFIG_ENV: &str = "TIPDETECT_CONFIG";

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

/// Applies one setting to `cfg`.
pub fn apply_setting(cfg: &mut PipelineConfig, key: &str, value: &str) -> Result<()> {
    let key = key.trim().replace('-', "_");
    let value = value.trim();
    let t = &mut cfg.thresholds;
    match key.as_str() {
        "color_space" => t.color_space = value.parse()?,
        "hue_min" => t.hue_min = parse(&key, value)?,
        "hue_max" => t.hue_max = parse(&key, value)?,
        "sat_min" => t.sat_min = parse(&key, value)?,
        "sat_max" => t.sat_max = parse(&key, value)?,
        "cb_min" => t.cb_min = parse(&key, value)?,
        "cb_max" => t.cb_max = parse(&key, value)?,
        "cr_min" => t.cr_min = parse(&key, value)?,
        "cr_max" => t.cr_max = parse(&key, value)?,
        "smooth_kernel" => cfg.smooth_kernel = parse(&key, value)?,
        "connectivity" => cfg.connectivity = value.parse()?,
        "slope_threshold" => cfg.slope_threshold = parse(&key, value)?,
        "slope_window" => cfg.slope_window = parse(&key, value)?,
        "tip_diff" => cfg.tip_params.diff_threshold = parse(&key, value)?,
        "tip_min_run" => cfg.tip_params.min_run = parse(&key, value)?,
        "tip_max" => {
            cfg.tip_params.max_tips = match value {
                "" | "none" | "unbounded" => None,
                v => Some(parse(&key, v)?),
            }
        }
        "crop" => cfg.crop_enabled = parse_bool(&key, value)?,
        "no_crop" => cfg.crop_enabled = !parse_bool(&key, value)?,
        other => return Err(Error::config(format!("unknown configuration key `{other}`"))),
    }
    Ok(())
}

/// Applies every setting in `text` to `cfg`, in file order.
pub fn apply_config_text(cfg: &mut PipelineConfig, text: &str) -> Result<()> {
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Error::config(format!("line {}: expected `key = value`", n + 1)))?;
        apply_setting(cfg, key, value).map_err(|e| Error::config(format!("line {}: {e}", n + 1)))?;
    }
    Ok(())
}
