//! C ABI over the `tipdetect` pipeline.
//!
//! Objects are opaque heap handles created by `td_*_new` / returned through
//! out-parameters and released with the matching `td_*_free`. Every fallible
//! call returns a [`TdStatus`]; on failure a thread-local message is available
//! from [`td_last_error`].
//!
//! Handles are not internally synchronised. A `TdPipeline` may be shared
//! between threads for concurrent `td_pipeline_process_rgb` calls; a
//! `TdConfig` must not be mutated while another thread reads it.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::{c_char, c_int, size_t};
use tipdetect::config::apply_setting;
use tipdetect::{DetectionRecord, Error, Pipeline, PipelineConfig, RgbImage, Side, Status};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InvalidDimensions = 4,
    OutOfRange = 5,
    NotAvailable = 6,
    Panic = 7,
}

/// Edge of the frame a hand enters from or points to.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdSide {
    None = 0,
    Up = 1,
    Down = 2,
    Left = 3,
    Right = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdFrameStatus {
    Ok = 0,
    NoHand = 1,
}

/// A pixel position: `x` is the row, `y` the column, both 0-based.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TdPoint {
    pub x: size_t,
    pub y: size_t,
}

/// Inclusive crop bounds in frame coordinates.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TdCropBox {
    pub x_min: size_t,
    pub x_max: size_t,
    pub y_min: size_t,
    pub y_max: size_t,
}

pub struct TdConfig {
    inner: PipelineConfig,
}

pub struct TdPipeline {
    inner: Pipeline,
}

pub struct TdRecord {
    inner: DetectionRecord,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: TdStatus, msg: impl Into<String>) -> TdStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> TdStatus {
    match e {
        Error::InvalidDimensions { .. } => TdStatus::InvalidDimensions,
        _ => TdStatus::InvalidConfig,
    }
}

fn guard(f: impl FnOnce() -> TdStatus) -> TdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == TdStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(TdStatus::Panic, "internal panic"),
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, TdStatus> {
    if p.is_null() {
        return Err(fail(TdStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(TdStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn side(s: Option<Side>) -> TdSide {
    match s {
        None => TdSide::None,
        Some(Side::Up) => TdSide::Up,
        Some(Side::Down) => TdSide::Down,
        Some(Side::Left) => TdSide::Left,
        Some(Side::Right) => TdSide::Right,
    }
}

macro_rules! deref {
    ($p:expr, $what:literal) => {
        match $p.as_ref() {
            Some(v) => v,
            None => return fail(TdStatus::NullPointer, concat!($what, " is null")),
        }
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn td_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn td_status_message(status: TdStatus) -> *const c_char {
    let s: &'static str = match status {
        TdStatus::Ok => "ok\0",
        TdStatus::NullPointer => "null pointer argument\0",
        TdStatus::InvalidUtf8 => "string argument is not UTF-8\0",
        TdStatus::InvalidConfig => "invalid configuration\0",
        TdStatus::InvalidDimensions => "frame dimensions do not match the buffer\0",
        TdStatus::OutOfRange => "index out of range\0",
        TdStatus::NotAvailable => "value not available for this record\0",
        TdStatus::Panic => "internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message for the most recent failure on this thread, or an empty string.
/// Valid until the next `td_*` call on the same thread.
#[no_mangle]
pub extern "C" fn td_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// New configuration holding the default settings. Never null.
#[no_mangle]
pub extern "C" fn td_config_new() -> *mut TdConfig {
    Box::into_raw(Box::new(TdConfig { inner: PipelineConfig::default() }))
}

/// # Safety
/// `cfg` must be null or a handle from `td_config_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_config_free(cfg: *mut TdConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets one option by its configuration-file key, e.g. `"hue_max"`, `"30"`.
///
/// # Safety
/// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn td_config_set(cfg: *mut TdConfig, key: *const c_char, value: *const c_char) -> TdStatus {
    guard(|| {
        let cfg = match cfg.as_mut() {
            Some(c) => c,
            None => return fail(TdStatus::NullPointer, "config is null"),
        };
        let (key, value) = match (c_str(key, "key"), c_str(value, "value")) {
            (Ok(k), Ok(v)) => (k, v),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match apply_setting(&mut cfg.inner, key, value) {
            Ok(()) => TdStatus::Ok,
            Err(e) => fail(TdStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// Validates `cfg` and builds a pipeline from a copy of it.
///
/// # Safety
/// `cfg` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn td_pipeline_new(cfg: *const TdConfig, out: *mut *mut TdPipeline) -> TdStatus {
    guard(|| {
        let cfg = deref!(cfg, "config");
        if out.is_null() {
            return fail(TdStatus::NullPointer, "out is null");
        }
        match Pipeline::new(cfg.inner.clone()) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(TdPipeline { inner: p }));
                TdStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `p` must be null or a handle from `td_pipeline_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_pipeline_free(p: *mut TdPipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the pipeline on a packed RGB8 frame of `len` bytes, row-major,
/// `width * height * 3` long. `frame_id` may be null.
///
/// # Safety
/// `p` must be a live handle, `data` readable for `len` bytes, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_pipeline_process_rgb(
    p: *const TdPipeline,
    frame_id: *const c_char,
    data: *const u8,
    len: size_t,
    width: size_t,
    height: size_t,
    out: *mut *mut TdRecord,
) -> TdStatus {
    guard(|| {
        let p = deref!(p, "pipeline");
        if data.is_null() || out.is_null() {
            return fail(TdStatus::NullPointer, "data or out is null");
        }
        let id = if frame_id.is_null() {
            ""
        } else {
            match c_str(frame_id, "frame_id") {
                Ok(s) => s,
                Err(s) => return s,
            }
        };
        let bytes = std::slice::from_raw_parts(data, len).to_vec();
        let img = match RgbImage::new(width, height, bytes) {
            Ok(img) => img,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        let rec = p.inner.process_frame(id, &img);
        *out = Box::into_raw(Box::new(TdRecord { inner: rec }));
        TdStatus::Ok
    })
}

/// # Safety
/// `rec` must be null or a record handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_record_free(rec: *mut TdRecord) {
    if !rec.is_null() {
        drop(Box::from_raw(rec));
    }
}

/// # Safety
/// `rec` must be a live record handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_record_status(rec: *const TdRecord, out: *mut TdFrameStatus) -> TdStatus {
    guard(|| {
        let rec = deref!(rec, "record");
        let out = match out.as_mut() {
            Some(o) => o,
            None => return fail(TdStatus::NullPointer, "out is null"),
        };
        *out = match rec.inner.status {
            Status::Ok => TdFrameStatus::Ok,
            Status::NoHand => TdFrameStatus::NoHand,
        };
        TdStatus::Ok
    })
}

/// `TD_SIDE_NONE` for a null record or a frame without a hand.
///
/// # Safety
/// `rec` must be null or a live record handle.
#[no_mangle]
pub unsafe extern "C" fn td_record_wrist_side(rec: *const TdRecord) -> TdSide {
    side(rec.as_ref().and_then(|r| r.inner.wrist_side))
}

/// # Safety
/// `rec` must be null or a live record handle.
#[no_mangle]
pub unsafe extern "C" fn td_record_finger_side(rec: *const TdRecord) -> TdSide {
    side(rec.as_ref().and_then(|r| r.inner.finger_side))
}

/// Number of fingertips; 0 for a null record.
///
/// # Safety
/// `rec` must be null or a live record handle.
#[no_mangle]
pub unsafe extern "C" fn td_record_fingertip_count(rec: *const TdRecord) -> size_t {
    rec.as_ref().map_or(0, |r| r.inner.fingertips.len())
}

/// # Safety
/// `rec` must be a live record handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_record_fingertip(rec: *const TdRecord, index: size_t, out: *mut TdPoint) -> TdStatus {
    guard(|| {
        let rec = deref!(rec, "record");
        let out = match out.as_mut() {
            Some(o) => o,
            None => return fail(TdStatus::NullPointer, "out is null"),
        };
        match rec.inner.fingertips.get(index) {
            Some(t) => {
                *out = TdPoint { x: t.x, y: t.y };
                TdStatus::Ok
            }
            None => fail(TdStatus::OutOfRange, format!("fingertip {index} of {}", rec.inner.fingertips.len())),
        }
    })
}

/// `TD_STATUS_NOT_AVAILABLE` when the frame has no hand or cropping is off.
///
/// # Safety
/// `rec` must be a live record handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_record_crop(rec: *const TdRecord, out: *mut TdCropBox) -> TdStatus {
    guard(|| {
        let rec = deref!(rec, "record");
        let out = match out.as_mut() {
            Some(o) => o,
            None => return fail(TdStatus::NullPointer, "out is null"),
        };
        match rec.inner.crop {
            Some(c) => {
                *out = TdCropBox { x_min: c.x_min, x_max: c.x_max, y_min: c.y_min, y_max: c.y_max };
                TdStatus::Ok
            }
            None => fail(TdStatus::NotAvailable, "record has no crop box"),
        }
    })
}

/// Serialises the record as one JSON object without a trailing newline.
/// Release the string with `td_string_free`.
///
/// # Safety
/// `rec` must be a live record handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_record_to_json(
    rec: *const TdRecord,
    include_timings: c_int,
    out: *mut *mut c_char,
) -> TdStatus {
    guard(|| {
        let rec = deref!(rec, "record");
        if out.is_null() {
            return fail(TdStatus::NullPointer, "out is null");
        }
        let line = rec.inner.to_json_line(include_timings != 0);
        match CString::new(line.trim_end()) {
            Ok(s) => {
                *out = s.into_raw();
                TdStatus::Ok
            }
            Err(_) => fail(TdStatus::InvalidUtf8, "record contains a NUL byte"),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
