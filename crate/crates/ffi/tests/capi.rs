use std::ffi::{CStr, CString};
use std::ptr;

use promptcheck_ffi::*;

const CLIQUE: &str = r#"{"states": [{"id": "a", "labels": ["A"]}, {"id": "b", "labels": ["B"]}],
    "init": "a", "transitions": [["a", "a"], ["a", "b"], ["b", "a"], ["b", "b"]]}"#;
const DIAMOND: &str = r#"{"states": [{"id": "s", "labels": []}, {"id": "t1", "labels": ["p"]}, {"id": "t2", "labels": []}],
    "init": "s", "transitions": [["s", "t1"], ["s", "t2"], ["t1", "t1"], ["t2", "t2"]]}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pc_last_error_message()) }.to_str().unwrap().to_owned()
}

unsafe fn lts(json: &str) -> *mut PcLts {
    let mut out = ptr::null_mut();
    assert_eq!(pc_lts_from_json(c(json).as_ptr(), &mut out), PcStatus::Ok);
    out
}

unsafe fn formula(text: &str) -> *mut PcFormula {
    let mut out = ptr::null_mut();
    assert_eq!(pc_formula_parse(c(text).as_ptr(), &mut out), PcStatus::Ok);
    out
}

#[test]
fn universal_check_round_trip() {
    unsafe {
        let l = lts(CLIQUE);
        assert_eq!(pc_lts_state_count(l), 2);
        let f = formula("FPinf A | FPinf B");
        assert_eq!(pc_formula_fragment(f), PcFragment::PositivePromptMuller);
        let mut v = ptr::null_mut();
        assert_eq!(pc_check(l, f, PcMode::Universal, &mut v), PcStatus::Ok);
        assert!(!pc_verdict_holds(v));
        let json = pc_verdict_to_json(v);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(doc["holds"], false);
        assert_eq!(doc["witness"]["scope"], "whole");
        pc_string_free(json);
        pc_verdict_free(v);
        pc_formula_free(f);
        pc_lts_free(l);
    }
}

#[test]
fn eval_and_probability() {
    unsafe {
        let l = lts(CLIQUE);
        let f = formula("FPinf A | FPinf B");
        let run = c(r#"{"prefix": [], "cycle": ["a", "a", "a", "a", "b", "b", "b", "b"]}"#);
        let mut out = true;
        assert_eq!(pc_eval_bounded(l, run.as_ptr(), f, 3, &mut out), PcStatus::Ok);
        assert!(!out);
        assert_eq!(pc_eval_bounded(l, run.as_ptr(), f, 4, &mut out), PcStatus::Ok);
        assert!(out);
        pc_formula_free(f);
        pc_lts_free(l);

        let d = lts(DIAMOND);
        let g = formula("F FPinf p");
        let mut p = ptr::null_mut();
        assert_eq!(pc_satisfaction_probability(d, g, &mut p), PcStatus::Ok);
        assert_eq!(CStr::from_ptr(p).to_str().unwrap(), "1/2");
        pc_string_free(p);
        let mut v = ptr::null_mut();
        assert_eq!(pc_check(d, g, PcMode::Fair, &mut v), PcStatus::Ok);
        assert!(!pc_verdict_holds(v));
        pc_verdict_free(v);
        pc_formula_free(g);
        pc_lts_free(d);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(pc_formula_parse(c("FPinf (A").as_ptr(), &mut f), PcStatus::Syntax);
        assert!(f.is_null());
        assert!(last_error().contains("syntax"));
        assert_eq!(pc_formula_parse(c("!(A | B)").as_ptr(), &mut f), PcStatus::NegationBelowNonAtom);

        let mut l = ptr::null_mut();
        assert_eq!(pc_lts_from_json(c("{\"states\": []}").as_ptr(), &mut l), PcStatus::MalformedDocument);
        assert_eq!(pc_lts_from_json(ptr::null(), &mut l), PcStatus::NullArgument);

        let l = lts(CLIQUE);
        let g = formula("FPinf A");
        let mut p = ptr::null_mut();
        assert_eq!(pc_satisfaction_probability(l, g, &mut p), PcStatus::WrongFragment);
        let mut v = ptr::null_mut();
        assert_eq!(pc_check(ptr::null(), g, PcMode::Universal, &mut v), PcStatus::NullArgument);
        let until = formula("A U B");
        assert_eq!(pc_check(l, until, PcMode::Universal, &mut v), PcStatus::WrongFragment);
        assert_eq!(pc_formula_fragment(until), PcFragment::EvalOnly);
        let ok = formula("FPinf A");
        assert_eq!(pc_check(l, ok, PcMode::Universal, &mut v), PcStatus::Ok);
        assert_eq!(last_error(), "");
        pc_verdict_free(v);
        for h in [g, until, ok] {
            pc_formula_free(h);
        }
        pc_lts_free(l);
        pc_lts_free(ptr::null_mut());
        pc_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/promptcheck.h")).unwrap();
    for name in [
        "pc_lts_from_json",
        "pc_lts_free",
        "pc_lts_state_count",
        "pc_formula_parse",
        "pc_formula_free",
        "pc_formula_fragment",
        "pc_check",
        "pc_verdict_holds",
        "pc_verdict_to_json",
        "pc_verdict_free",
        "pc_eval_bounded",
        "pc_satisfaction_probability",
        "pc_string_free",
        "pc_last_error_message",
        "typedef struct PcLts PcLts",
        "PC_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

// Compiles the C example against the generated header and static library
// when a C compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    use std::path::PathBuf;
    use std::process::Command;

    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let archive = profile_dir.join("libpromptcheck_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", archive.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("promptcheck_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["holds"], false);
}
