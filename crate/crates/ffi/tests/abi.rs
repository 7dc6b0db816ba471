use std::ffi::{CStr, CString};
use std::fs;
use std::ptr;

use tempora_ffi::*;

const J1: &str = "clause id=e1 tense=past aspect=simple sem=event\nclause id=e2 tense=past aspect=simple sem=event cue=because\n";
const RULED: &str = "clause id=e1 tense=past aspect=simple sem=event\n\
                     clause id=e2 tense=past aspect=simple sem=event cue=as_a_result temprel=precede\n";

fn last_error() -> String {
    let p = tempora_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn owned(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { tempora_string_free(p) };
    s
}

#[test]
fn analyze_and_render() {
    let engine = tempora_engine_new();
    let text = CString::new(J1).unwrap();
    let mut analysis = ptr::null_mut();
    let status = unsafe { tempora_analyze(engine, text.as_ptr(), TEMPORA_MODE_ENUMERATE, &mut analysis) };
    assert_eq!(status, TemporaStatus::Ok);
    assert!(tempora_last_error().is_null());
    assert_eq!(unsafe { tempora_analysis_reading_count(analysis) }, 1);
    let json = owned(unsafe { tempora_analysis_to_json(analysis) });
    assert!(json.contains("\"relation\": \"precede\""), "{json}");
    let text = owned(unsafe { tempora_analysis_to_text(analysis) });
    assert!(text.lines().any(|l| l == "e2 precede e1"), "{text}");
    unsafe {
        tempora_analysis_free(analysis);
        tempora_engine_free(engine);
    }
}

#[test]
fn error_codes() {
    let engine = tempora_engine_new();
    let mut analysis = ptr::null_mut();

    let ruled = CString::new(RULED).unwrap();
    let status = unsafe { tempora_analyze(engine, ruled.as_ptr(), TEMPORA_MODE_BEST, &mut analysis) };
    assert_eq!(status, TemporaStatus::ParseFailure);
    assert!(analysis.is_null());
    assert!(last_error().contains("as_a_result"));

    let junk = CString::new("clause id=e1 when=now").unwrap();
    let status = unsafe { tempora_analyze(engine, junk.as_ptr(), TEMPORA_MODE_BEST, &mut analysis) };
    assert_eq!(status, TemporaStatus::InputError);
    assert!(last_error().contains("line 1"));

    let j1 = CString::new(J1).unwrap();
    let status = unsafe { tempora_analyze(engine, j1.as_ptr(), 9, &mut analysis) };
    assert_eq!(status, TemporaStatus::InputError);

    let status = unsafe { tempora_analyze(ptr::null(), j1.as_ptr(), TEMPORA_MODE_BEST, &mut analysis) };
    assert_eq!(status, TemporaStatus::NullArgument);
    let status = unsafe { tempora_analyze(engine, ptr::null(), TEMPORA_MODE_BEST, &mut analysis) };
    assert_eq!(status, TemporaStatus::NullArgument);

    let bad_utf8 = [0xffu8, 0xfe, 0];
    let status = unsafe { tempora_analyze(engine, bad_utf8.as_ptr().cast(), TEMPORA_MODE_BEST, &mut analysis) };
    assert_eq!(status, TemporaStatus::InvalidUtf8);

    assert_eq!(unsafe { tempora_engine_set_weights(engine, 1.0, -1.0, 0.5, 0.25) }, TemporaStatus::InputError);
    assert_eq!(unsafe { tempora_analysis_reading_count(ptr::null()) }, 0);
    assert!(unsafe { tempora_analysis_to_json(ptr::null()) }.is_null());
    unsafe { tempora_engine_free(engine) };
}

#[test]
fn flags_and_data_dir() {
    let vvg = "clause id=e1 tense=past aspect=simple sem=event\n\
               clause id=e2 tense=past aspect=perf sem=event\n\
               clause id=e3 tense=past aspect=simple sem=event\n";
    let text = CString::new(vvg).unwrap();
    let engine = tempora_engine_new();
    let count = |engine| {
        let mut analysis = ptr::null_mut();
        let status = unsafe { tempora_analyze(engine, text.as_ptr(), TEMPORA_MODE_ENUMERATE, &mut analysis) };
        assert_eq!(status, TemporaStatus::Ok);
        let n = unsafe { tempora_analysis_reading_count(analysis) };
        unsafe { tempora_analysis_free(analysis) };
        n
    };
    assert_eq!(count(engine), 4);
    assert_eq!(unsafe { tempora_engine_set_flags(engine, false, false) }, TemporaStatus::Ok);
    assert_eq!(count(engine), 6);

    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("lattice.txt"), "a any_rel\n").unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { tempora_engine_load_data_dir(engine, path.as_ptr()) }, TemporaStatus::InputError);
    fs::remove_file(dir.path().join("lattice.txt")).unwrap();
    assert_eq!(unsafe { tempora_engine_load_data_dir(engine, path.as_ptr()) }, TemporaStatus::Ok);
    unsafe { tempora_engine_free(engine) };
}

#[test]
fn header_declares_the_api() {
    let header = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tempora.h")).unwrap();
    for symbol in [
        "typedef struct TemporaEngine TemporaEngine",
        "typedef struct TemporaAnalysis TemporaAnalysis",
        "TEMPORA_STATUS_PARSE_FAILURE = 2",
        "TEMPORA_MODE_UNDERSPEC",
        "tempora_engine_new(void)",
        "tempora_analyze(",
        "tempora_last_error(void)",
        "tempora_string_free(",
    ] {
        assert!(header.contains(symbol), "header lacks `{symbol}`");
    }
}
