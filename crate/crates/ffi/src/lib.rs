//! C ABI over the `tempora` analyzer.
//!
//! Handles are opaque. Every fallible call returns a [`TemporaStatus`]; on
//! failure the message is available from [`tempora_last_error`] on the same
//! thread. Strings returned to the caller are owned by it and must be
//! released with [`tempora_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use tempora::builder::{analyze, AnalysisResult, Config, Mode};
use tempora::render;
use tempora::{parse_discourse, DataPaths, DataSet, Error, PreferenceWeights};

pub const TEMPORA_MODE_BEST: u32 = 0;
pub const TEMPORA_MODE_ENUMERATE: u32 = 1;
pub const TEMPORA_MODE_UNDERSPEC: u32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemporaStatus {
    Ok = 0,
    /// Malformed input, data files or arguments.
    InputError = 1,
    /// No consistent reading: explicit markers clash.
    ParseFailure = 2,
    NullArgument = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// Data files, weights and flags.
pub struct TemporaEngine {
    config: Config,
}

/// The readings of one discourse.
pub struct TemporaAnalysis {
    result: AnalysisResult,
    config: Config,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: TemporaStatus, message: impl Into<String>) -> TemporaStatus {
    set_error(message);
    status
}

fn status_of(error: &Error) -> TemporaStatus {
    match error {
        Error::ParseFailure { .. } => TemporaStatus::ParseFailure,
        _ => TemporaStatus::InputError,
    }
}

fn guarded(body: impl FnOnce() -> TemporaStatus) -> TemporaStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(TemporaStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, TemporaStatus> {
    if ptr.is_null() {
        return Err(fail(TemporaStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| fail(TemporaStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// New engine with the shipped data files and default weights.
#[no_mangle]
pub extern "C" fn tempora_engine_new() -> *mut TemporaEngine {
    catch_unwind(|| Box::into_raw(Box::new(TemporaEngine { config: Config::default() }))).unwrap_or(ptr::null_mut())
}

/// # Safety
/// `engine` must come from [`tempora_engine_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tempora_engine_free(engine: *mut TemporaEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Replaces the data files with those found in `dir` (same file names as
/// the shipped set; missing files keep the defaults).
///
/// # Safety
/// `engine` must be a live engine and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tempora_engine_load_data_dir(engine: *mut TemporaEngine, dir: *const c_char) -> TemporaStatus {
    guarded(|| {
        let Some(engine) = engine.as_mut() else {
            return fail(TemporaStatus::NullArgument, "null engine");
        };
        let dir = match read_str(dir) {
            Ok(d) => d,
            Err(status) => return status,
        };
        let paths = DataPaths { dir: Some(PathBuf::from(dir)), ..DataPaths::default() };
        match DataSet::load(&paths) {
            Ok(data) => {
                engine.config.data = data;
                TemporaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `engine` must be a live engine.
#[no_mangle]
pub unsafe extern "C" fn tempora_engine_set_weights(
    engine: *mut TemporaEngine,
    w_tense: f64,
    w_sem: f64,
    w_cur: f64,
    w_new: f64,
) -> TemporaStatus {
    guarded(|| {
        let Some(engine) = engine.as_mut() else {
            return fail(TemporaStatus::NullArgument, "null engine");
        };
        let weights = PreferenceWeights { w_tense, w_sem, w_cur, w_new, ..engine.config.weights.clone() };
        match weights.validate() {
            Ok(()) => {
                engine.config.weights = weights;
                TemporaStatus::Ok
            }
            Err(e) => fail(TemporaStatus::InputError, e.to_string()),
        }
    })
}

/// # Safety
/// `engine` must be a live engine.
#[no_mangle]
pub unsafe extern "C" fn tempora_engine_set_flags(engine: *mut TemporaEngine, allow_marginal: bool, tier_prune: bool) -> TemporaStatus {
    guarded(|| {
        let Some(engine) = engine.as_mut() else {
            return fail(TemporaStatus::NullArgument, "null engine");
        };
        engine.config.allow_marginal = allow_marginal;
        engine.config.tier_prune = tier_prune;
        TemporaStatus::Ok
    })
}

/// Analyzes a discourse in the clause-line text format. On success `*out`
/// receives an analysis to release with [`tempora_analysis_free`].
///
/// # Safety
/// `engine` must be a live engine, `text` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tempora_analyze(
    engine: *const TemporaEngine,
    text: *const c_char,
    mode: u32,
    out: *mut *mut TemporaAnalysis,
) -> TemporaStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TemporaStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(engine) = engine.as_ref() else {
            return fail(TemporaStatus::NullArgument, "null engine");
        };
        let text = match read_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let mode = match mode {
            TEMPORA_MODE_BEST => Mode::Best,
            TEMPORA_MODE_ENUMERATE => Mode::Enumerate,
            TEMPORA_MODE_UNDERSPEC => Mode::Underspec,
            other => return fail(TemporaStatus::InputError, format!("unknown mode {other}")),
        };
        let result = parse_discourse(text).and_then(|d| analyze(&d, &engine.config, mode));
        match result {
            Ok(result) => {
                *out = Box::into_raw(Box::new(TemporaAnalysis { result, config: engine.config.clone() }));
                TemporaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Number of readings; 0 for a null analysis.
///
/// # Safety
/// `analysis` must be null or a live analysis.
#[no_mangle]
pub unsafe extern "C" fn tempora_analysis_reading_count(analysis: *const TemporaAnalysis) -> usize {
    analysis.as_ref().map_or(0, |a| a.result.readings.len())
}

/// JSON rendering, or null on a null analysis.
///
/// # Safety
/// `analysis` must be null or a live analysis.
#[no_mangle]
pub unsafe extern "C" fn tempora_analysis_to_json(analysis: *const TemporaAnalysis) -> *mut c_char {
    match analysis.as_ref() {
        Some(a) => into_c_string(render::json(&a.result, a.config.lattice())),
        None => ptr::null_mut(),
    }
}

/// Plain-text rendering, or null on a null analysis.
///
/// # Safety
/// `analysis` must be null or a live analysis.
#[no_mangle]
pub unsafe extern "C" fn tempora_analysis_to_text(analysis: *const TemporaAnalysis) -> *mut c_char {
    match analysis.as_ref() {
        Some(a) => into_c_string(render::text(&a.result, a.config.lattice())),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `analysis` must come from [`tempora_analyze`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tempora_analysis_free(analysis: *mut TemporaAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tempora_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tempora_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
