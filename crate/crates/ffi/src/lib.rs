//! C ABI over the solver: opaque handles, integer status codes, strings
//! owned by the library and released with `fx_string_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use flexsolve::parse::{parse_point, parse_system};
use flexsolve::render::{format_solution_full, solution_json, Mode};
use flexsolve::solver::{
    run_pipeline, solution_equiv, solution_membership, Equivalence, FlexibleSystem, Side,
    SolutionSet,
};

pub const FX_OK: i32 = 0;
/// Negative but well-defined result (inconsistent, not equivalent, not a
/// member).
pub const FX_NEGATIVE: i32 = 1;
/// Parse or validation failure; details via `fx_last_error`.
pub const FX_INVALID: i32 = 2;
/// Null pointer or invalid argument.
pub const FX_BADARG: i32 = 3;

pub struct FxSystem(FlexibleSystem);

pub struct FxSolution {
    solution: SolutionSet,
    permutation: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn to_owned_cstr(s: String) -> *mut c_char {
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => ptr::null_mut(),
    }
}

/// Message for the most recent failure on this thread, or NULL. The caller
/// owns the string and must release it with `fx_string_free`.
#[no_mangle]
pub extern "C" fn fx_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(c) => to_owned_cstr(c.to_string_lossy().into_owned()),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_utf8<'a>(text: *const c_char) -> Result<&'a str, i32> {
    if text.is_null() {
        set_error("null text pointer".to_string());
        return Err(FX_BADARG);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("text is not valid UTF-8".to_string());
        FX_INVALID
    })
}

/// Parses a system from source text. On success stores a new handle in
/// `out`; release it with `fx_system_free`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fx_system_parse(text: *const c_char, out: *mut *mut FxSystem) -> i32 {
    if out.is_null() {
        set_error("null output pointer".to_string());
        return FX_BADARG;
    }
    *out = ptr::null_mut();
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match parse_system(text) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(FxSystem(s)));
            FX_OK
        }
        Err(e) => {
            set_error(e.to_string());
            FX_INVALID
        }
    }
}

/// # Safety
/// `s` must come from `fx_system_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fx_system_free(s: *mut FxSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of inclusion rows.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fx_system_rows(s: *const FxSystem) -> i64 {
    if s.is_null() {
        return -1;
    }
    (*s).0.rows() as i64
}

/// Number of unknowns.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fx_system_unknowns(s: *const FxSystem) -> i64 {
    if s.is_null() {
        return -1;
    }
    (*s).0.unknowns() as i64
}

/// Solves the system. Always produces a solution handle on valid input;
/// returns FX_NEGATIVE when the system is inconsistent, FX_OK otherwise.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fx_solve(s: *const FxSystem, out: *mut *mut FxSolution) -> i32 {
    if s.is_null() || out.is_null() {
        set_error("null pointer".to_string());
        return FX_BADARG;
    }
    let p = run_pipeline(&(*s).0);
    let consistent = p.solution.is_consistent();
    *out = Box::into_raw(Box::new(FxSolution {
        solution: p.solution,
        permutation: p.echelon.permutation().to_vec(),
    }));
    if consistent {
        FX_OK
    } else {
        FX_NEGATIVE
    }
}

/// # Safety
/// `z` must come from `fx_solve` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fx_solution_free(z: *mut FxSolution) {
    if !z.is_null() {
        drop(Box::from_raw(z));
    }
}

/// 1 when consistent, 0 when inconsistent, -1 on a null handle.
///
/// # Safety
/// `z` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fx_solution_is_consistent(z: *const FxSolution) -> i32 {
    if z.is_null() {
        return -1;
    }
    (*z).solution.is_consistent() as i32
}

/// Rank of the echelon form, or -1 on a null handle.
///
/// # Safety
/// `z` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fx_solution_rank(z: *const FxSolution) -> i64 {
    if z.is_null() {
        return -1;
    }
    (*z).solution.rank as i64
}

/// Solution set in the line-oriented text form. Release with
/// `fx_string_free`.
///
/// # Safety
/// `z` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fx_solution_to_text(z: *const FxSolution) -> *mut c_char {
    if z.is_null() {
        return ptr::null_mut();
    }
    let z = &*z;
    to_owned_cstr(format_solution_full(
        &z.solution,
        &z.permutation,
        Mode::Text,
        false,
    ))
}

/// Solution set as a JSON document; `exact` switches scalars to explicit
/// coefficient lists. Release with `fx_string_free`.
///
/// # Safety
/// `z` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fx_solution_to_json(z: *const FxSolution, exact: bool) -> *mut c_char {
    if z.is_null() {
        return ptr::null_mut();
    }
    let z = &*z;
    to_owned_cstr(solution_json(&z.solution, &z.permutation, exact).to_string())
}

/// Tests a point (text form, e.g. "(1, eps, -0.5)") for membership.
/// FX_OK member, FX_NEGATIVE not a member.
///
/// # Safety
/// `s` must be a live handle and `point` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fx_check_point(s: *const FxSystem, point: *const c_char) -> i32 {
    if s.is_null() {
        set_error("null system handle".to_string());
        return FX_BADARG;
    }
    let text = match read_utf8(point) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let x = match parse_point(text) {
        Ok(x) => x,
        Err(e) => {
            set_error(e.to_string());
            return FX_INVALID;
        }
    };
    let sys = &(*s).0;
    if x.len() != sys.unknowns() {
        set_error(format!(
            "point has {} coordinates, system has {} unknowns",
            x.len(),
            sys.unknowns()
        ));
        return FX_INVALID;
    }
    let z = flexsolve::solver::solve(sys);
    if solution_membership(&z, &x) {
        FX_OK
    } else {
        FX_NEGATIVE
    }
}

/// Compares two solution sets. FX_OK when equal; FX_NEGATIVE otherwise,
/// with the relation written to `verdict` when non-null (1 first strictly
/// inside second, 2 second strictly inside first, 3 incomparable, 0 equal).
///
/// # Safety
/// Both handles must be live; `verdict` may be null.
#[no_mangle]
pub unsafe extern "C" fn fx_equiv(
    a: *const FxSystem,
    b: *const FxSystem,
    verdict: *mut i32,
) -> i32 {
    if a.is_null() || b.is_null() {
        set_error("null system handle".to_string());
        return FX_BADARG;
    }
    let z1 = flexsolve::solver::solve(&(*a).0);
    let z2 = flexsolve::solver::solve(&(*b).0);
    let eq = match solution_equiv(&z1, &z2) {
        Ok(eq) => eq,
        Err(e) => {
            set_error(e.to_string());
            return FX_INVALID;
        }
    };
    let code = match eq {
        Equivalence::Equal => 0,
        Equivalence::ProperSubset(Side::First) => 1,
        Equivalence::ProperSubset(Side::Second) => 2,
        Equivalence::Incomparable => 3,
    };
    if !verdict.is_null() {
        *verdict = code;
    }
    if code == 0 {
        FX_OK
    } else {
        FX_NEGATIVE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    const SAMPLE: &str = "\
(-1+eps*o) x1 + x2 + (-0.2+eps^2*L) x3 in 2+eps*L
(1+eps^2*L) x1 - x2 + (0.1+eps^2*o) x3 in 1+eps*o
(1+o) x1 - x2 + (0.15+eps*o) x3 in -0.5+o
";

    unsafe fn parse_handle(text: &str) -> *mut FxSystem {
        let c = CString::new(text).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(fx_system_parse(c.as_ptr(), &mut out), FX_OK);
        assert!(!out.is_null());
        out
    }

    unsafe fn take_string(p: *mut c_char) -> String {
        assert!(!p.is_null());
        let s = CStr::from_ptr(p).to_str().unwrap().to_string();
        fx_string_free(p);
        s
    }

    #[test]
    fn round_trip_solve() {
        unsafe {
            let sys = parse_handle(SAMPLE);
            assert_eq!(fx_system_rows(sys), 3);
            assert_eq!(fx_system_unknowns(sys), 3);
            let mut z = ptr::null_mut();
            assert_eq!(fx_solve(sys, &mut z), FX_OK);
            assert_eq!(fx_solution_is_consistent(z), 1);
            assert_eq!(fx_solution_rank(z), 3);
            let text = take_string(fx_solution_to_text(z));
            assert_eq!(
                text,
                "(4,0,-30) + eps*o*(1,0,0) + eps*L*(-0.1,0,1) + L*(1,1,0)"
            );
            let json = take_string(fx_solution_to_json(z, false));
            let v: serde_json::Value = serde_json::from_str(&json).unwrap();
            assert_eq!(v["status"], "consistent");
            assert_eq!(v["permutation"], serde_json::json!([1, 3, 2]));
            fx_solution_free(z);
            fx_system_free(sys);
        }
    }

    #[test]
    fn parse_error_reported() {
        unsafe {
            let c = CString::new("x1 + in o").unwrap();
            let mut out = ptr::null_mut();
            assert_eq!(fx_system_parse(c.as_ptr(), &mut out), FX_INVALID);
            assert!(out.is_null());
            let msg = take_string(fx_last_error());
            assert!(msg.contains("line 1"));
        }
    }

    #[test]
    fn membership_and_equiv() {
        unsafe {
            let sys = parse_handle(SAMPLE);
            let good = CString::new("(4, 0, -30)").unwrap();
            let bad = CString::new("(1, 2, 3)").unwrap();
            assert_eq!(fx_check_point(sys, good.as_ptr()), FX_OK);
            assert_eq!(fx_check_point(sys, bad.as_ptr()), FX_NEGATIVE);

            let same = parse_handle(SAMPLE);
            let mut verdict = -1;
            assert_eq!(fx_equiv(sys, same, &mut verdict), FX_OK);
            assert_eq!(verdict, 0);
            fx_system_free(same);
            fx_system_free(sys);
        }
    }

    #[test]
    fn inconsistent_status() {
        unsafe {
            let sys = parse_handle("x1 in o\nx1 in 1+o\n");
            let mut z = ptr::null_mut();
            assert_eq!(fx_solve(sys, &mut z), FX_NEGATIVE);
            assert_eq!(fx_solution_is_consistent(z), 0);
            let text = take_string(fx_solution_to_text(z));
            assert!(text.starts_with("INCONSISTENT"));
            fx_solution_free(z);
            fx_system_free(sys);
        }
    }
}
