//! C ABI for promptcheck.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Fallible calls return a [`PcStatus`]; the
//! message of the most recent failure on the calling thread is available from
//! [`pc_last_error_message`]. Strings returned by the library are released
//! with [`pc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use promptcheck::fair::fair_check;
use promptcheck::formula::{classify_fragment, parse_formula};
use promptcheck::prob::{format_fraction, satisfaction_probability};
use promptcheck::runs::{eval_bounded, LassoRun};
use promptcheck::universal::{universal_check, weak_check};
use promptcheck::{Error, Formula, FragmentClass, Lts, Verdict};

/// Validated transition system.
pub struct PcLts(Lts);

/// Parsed formula.
pub struct PcFormula(Formula);

/// Check result with its rendered JSON document.
pub struct PcVerdict {
    verdict: Verdict,
    json: String,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullArgument,
    InvalidUtf8,
    Syntax,
    NegationBelowNonAtom,
    WrongFragment,
    InvalidLts,
    UnknownState,
    InvalidLasso,
    InvalidPath,
    BrokenConnector,
    Unsupported,
    SizeGuard,
    NotBscc,
    InternalWitnessInvalid,
    MalformedDocument,
    Usage,
    Io,
    Panic,
}

impl From<&Error> for PcStatus {
    fn from(e: &Error) -> PcStatus {
        match e {
            Error::Syntax { .. } => PcStatus::Syntax,
            Error::NegationBelowNonAtom { .. } => PcStatus::NegationBelowNonAtom,
            Error::WrongFragment { .. } => PcStatus::WrongFragment,
            Error::InvalidLts(_) => PcStatus::InvalidLts,
            Error::UnknownState(_) => PcStatus::UnknownState,
            Error::InvalidLasso(_) => PcStatus::InvalidLasso,
            Error::InvalidPath(_) => PcStatus::InvalidPath,
            Error::BrokenConnector(_) => PcStatus::BrokenConnector,
            Error::Unsupported(_) => PcStatus::Unsupported,
            Error::SizeGuard { .. } => PcStatus::SizeGuard,
            Error::NotBscc => PcStatus::NotBscc,
            Error::InternalWitnessInvalid(_) => PcStatus::InternalWitnessInvalid,
            Error::Json(_) => PcStatus::MalformedDocument,
            Error::Usage(_) => PcStatus::Usage,
            Error::Io(_) => PcStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcMode {
    Universal = 0,
    Fair,
    Weak,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcFragment {
    PromptMuller = 0,
    PositivePromptMuller,
    InitializedMuller,
    EvalOnly,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(PcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure(PcStatus::from(&e), e.to_string())
    }
}

// Runs `body`, converting errors and panics into a status plus a stored
// message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            PcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PcStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(PcStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(PcStatus::InvalidUtf8, "argument is not valid UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(PcStatus::NullArgument, "null handle".into()))
}

fn out_ptr<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(PcStatus::NullArgument, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Parses and validates an LTS document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_lts_from_json(json: *const c_char, out: *mut *mut PcLts) -> PcStatus {
    guard(|| {
        out_ptr(out)?;
        let l = promptcheck::lts::parse_lts(text(json)?.as_bytes())?;
        *out = Box::into_raw(Box::new(PcLts(l)));
        Ok(())
    })
}

/// # Safety
/// `lts` must come from [`pc_lts_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pc_lts_free(lts: *mut PcLts) {
    if !lts.is_null() {
        drop(Box::from_raw(lts));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `lts` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_lts_state_count(lts: *const PcLts) -> usize {
    lts.as_ref().map_or(0, |l| l.0.len())
}

/// # Safety
/// `formula` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_formula_parse(formula: *const c_char, out: *mut *mut PcFormula) -> PcStatus {
    guard(|| {
        out_ptr(out)?;
        let f = parse_formula(text(formula)?)?;
        *out = Box::into_raw(Box::new(PcFormula(f)));
        Ok(())
    })
}

/// # Safety
/// `formula` must come from [`pc_formula_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pc_formula_free(formula: *mut PcFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Fragment of a parsed formula; `EvalOnly` for a null handle.
///
/// # Safety
/// `formula` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_formula_fragment(formula: *const PcFormula) -> PcFragment {
    match formula.as_ref().map(|f| classify_fragment(&f.0)) {
        Some(FragmentClass::PromptMuller) => PcFragment::PromptMuller,
        Some(FragmentClass::PositivePromptMuller) => PcFragment::PositivePromptMuller,
        Some(FragmentClass::InitializedMuller) => PcFragment::InitializedMuller,
        _ => PcFragment::EvalOnly,
    }
}

/// Runs a universal, fair, or weak check.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pc_check(
    lts: *const PcLts,
    formula: *const PcFormula,
    mode: PcMode,
    out: *mut *mut PcVerdict,
) -> PcStatus {
    guard(|| {
        out_ptr(out)?;
        let (l, f) = (&handle(lts)?.0, &handle(formula)?.0);
        let verdict = match mode {
            PcMode::Universal => universal_check(l, f)?,
            PcMode::Fair => fair_check(l, f)?,
            PcMode::Weak => weak_check(l, f)?,
        };
        let json = verdict.to_json(l).to_string();
        *out = Box::into_raw(Box::new(PcVerdict { verdict, json }));
        Ok(())
    })
}

/// # Safety
/// `verdict` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_verdict_holds(verdict: *const PcVerdict) -> bool {
    verdict.as_ref().is_some_and(|v| v.verdict.holds)
}

/// Verdict document as a newly allocated string, or null for a null handle.
///
/// # Safety
/// `verdict` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_verdict_to_json(verdict: *const PcVerdict) -> *mut c_char {
    verdict.as_ref().map_or(ptr::null_mut(), |v| owned_string(v.json.clone()))
}

/// # Safety
/// `verdict` must come from [`pc_check`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pc_verdict_free(verdict: *mut PcVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// Evaluates `formula` on the lasso document `run_json` at bound `k`.
///
/// # Safety
/// Handles must be live, `run_json` NUL-terminated, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pc_eval_bounded(
    lts: *const PcLts,
    run_json: *const c_char,
    formula: *const PcFormula,
    k: u64,
    out: *mut bool,
) -> PcStatus {
    guard(|| {
        out_ptr(out)?;
        let (l, f) = (&handle(lts)?.0, &handle(formula)?.0);
        let run = LassoRun::parse(l, text(run_json)?.as_bytes())?;
        *out = eval_bounded(l, &run, k, f)?;
        Ok(())
    })
}

/// Exact satisfaction probability of an initialized formula as a fraction
/// string such as `"1/2"`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pc_satisfaction_probability(
    lts: *const PcLts,
    formula: *const PcFormula,
    out: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        out_ptr(out)?;
        let p = satisfaction_probability(&handle(lts)?.0, &handle(formula)?.0)?;
        *out = owned_string(format_fraction(&p));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
