//! C ABI over the caloop kernel.
//!
//! Conventions: every fallible function returns a `Status` and writes
//! its result through an out pointer, which is touched only on
//! `Status::Ok`. Handles are opaque; free them with the matching
//! `*_free`. Strings returned through out pointers are NUL-terminated,
//! owned by the caller, and released with `caloop_string_free`.
//! `caloop_last_error_message` describes the most recent failure on
//! the calling thread and returns NULL if the last call succeeded.

use caloop::construct::{example2_loop, lie_to_loop, ConstructError};
use caloop::formats::{
    lie_from_json, lie_to_json, loop_from_cayley, loop_to_cayley, LoopReport,
};
use caloop::lie::LieAlgebraF2;
use caloop::loops::{AutomorphicMethod, FiniteLoop, LoopError, DEFAULT_CLOSURE_BUDGET};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of a caloop call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input text did not parse or failed validation.
    Parse = 3,
    /// The inputs parsed but violate a mathematical precondition.
    Domain = 4,
    /// The result would exceed a size budget.
    Budget = 5,
    /// An internal invariant failed; the handle state is unchanged.
    Panic = 6,
}

/// A finite loop given by its Cayley table.
pub struct Loop(FiniteLoop);

/// A Lie algebra over F2 with a validated bracket table.
pub struct Lie(LieAlgebraF2);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: Status, msg: String) -> Status {
    set_error(msg);
    status
}

fn construct_status(e: &ConstructError) -> Status {
    match e {
        ConstructError::OrderCap { .. } => Status::Budget,
        _ => Status::Domain,
    }
}

fn loop_status(e: &LoopError) -> Status {
    match e {
        LoopError::SizeLimit(_) => Status::Budget,
        _ => Status::Domain,
    }
}

/// Runs the body with panic isolation and clears the error slot first.
fn guard(f: impl FnOnce() -> Status) -> Status {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(Status::Panic, format!("internal panic: {msg}"))
        }
    }
}

/// Reads a required UTF-8 argument, or returns the error status.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Status> {
    if p.is_null() {
        return Err(fail(Status::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(Status::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Status> {
    if p.is_null() {
        Err(fail(Status::NullArgument, format!("{what} is NULL")))
    } else {
        Ok(&*p)
    }
}

fn give_string(out: *mut *mut c_char, s: String) -> Status {
    // Interior NULs cannot occur in our JSON or Cayley text.
    let c = CString::new(s).expect("no interior NUL");
    unsafe { *out = c.into_raw() };
    Status::Ok
}

/// Message for the most recent failing call on this thread, or NULL.
/// The pointer is invalidated by the next caloop call on this thread.
#[no_mangle]
pub extern "C" fn caloop_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Frees a string returned by this library. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn caloop_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses cayley-v1 text into a loop handle.
#[no_mangle]
pub unsafe extern "C" fn caloop_loop_parse(text: *const c_char, out: *mut *mut Loop) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match loop_from_cayley(text) {
            Ok(q) => {
                *out = Box::into_raw(Box::new(Loop(q)));
                Status::Ok
            }
            Err(e) => fail(Status::Parse, e.to_string()),
        }
    })
}

/// Frees a loop handle. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn caloop_loop_free(q: *mut Loop) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Writes the loop order.
#[no_mangle]
pub unsafe extern "C" fn caloop_loop_order(q: *const Loop, out: *mut usize) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        match deref(q, "loop") {
            Ok(q) => {
                *out = q.0.order();
                Status::Ok
            }
            Err(s) => s,
        }
    })
}

/// Writes the product x * y. Arguments must be below the order.
#[no_mangle]
pub unsafe extern "C" fn caloop_loop_mul(
    q: *const Loop,
    x: usize,
    y: usize,
    out: *mut usize,
) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        let q = match deref(q, "loop") {
            Ok(q) => &q.0,
            Err(s) => return s,
        };
        if x >= q.order() || y >= q.order() {
            return fail(
                Status::Domain,
                format!("arguments ({x}, {y}) outside 0..{}", q.order()),
            );
        }
        *out = q.mul(x, y);
        Status::Ok
    })
}

/// Writes whether every inner generator is an automorphism.
#[no_mangle]
pub unsafe extern "C" fn caloop_loop_is_automorphic(q: *const Loop, out: *mut bool) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        match deref(q, "loop") {
            Ok(q) => {
                *out = q.0.is_automorphic(AutomorphicMethod::Direct);
                Status::Ok
            }
            Err(s) => s,
        }
    })
}

/// Renders the loop as cayley-v1 text.
#[no_mangle]
pub unsafe extern "C" fn caloop_loop_to_cayley(
    q: *const Loop,
    out: *mut *mut c_char,
) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        match deref(q, "loop") {
            Ok(q) => give_string(out, loop_to_cayley(&q.0)),
            Err(s) => s,
        }
    })
}

/// Writes the full analysis report (predicates, nuclei, center,
/// automorphic check, split attempt) as JSON.
#[no_mangle]
pub unsafe extern "C" fn caloop_loop_analyze_json(
    q: *const Loop,
    split_budget: usize,
    out: *mut *mut c_char,
) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        let q = match deref(q, "loop") {
            Ok(q) => &q.0,
            Err(s) => return s,
        };
        match LoopReport::analyze(q, split_budget) {
            Ok(r) => give_string(out, r.to_json()),
            Err(e) => fail(loop_status(&e), e.to_string()),
        }
    })
}

/// Parses lief2-v1 JSON and checks the Jacobi identity.
#[no_mangle]
pub unsafe extern "C" fn caloop_lie_parse(json: *const c_char, out: *mut *mut Lie) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        let json = match read_str(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let l = match lie_from_json(json) {
            Ok(l) => l,
            Err(e) => return fail(Status::Parse, e.to_string()),
        };
        if let Err(e) = l.validate() {
            return fail(Status::Parse, e.to_string());
        }
        *out = Box::into_raw(Box::new(Lie(l)));
        Status::Ok
    })
}

/// Frees a Lie algebra handle. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn caloop_lie_free(l: *mut Lie) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Writes the dimension.
#[no_mangle]
pub unsafe extern "C" fn caloop_lie_dim(l: *const Lie, out: *mut usize) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        match deref(l, "lie") {
            Ok(l) => {
                *out = l.0.dim();
                Status::Ok
            }
            Err(s) => s,
        }
    })
}

/// Writes whether [[x,y],[z,y]] = 0 holds identically.
#[no_mangle]
pub unsafe extern "C" fn caloop_lie_check_w2(l: *const Lie, out: *mut bool) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        match deref(l, "lie") {
            Ok(l) => {
                *out = l.0.check_w2();
                Status::Ok
            }
            Err(s) => s,
        }
    })
}

/// Renders the algebra as lief2-v1 JSON.
#[no_mangle]
pub unsafe extern "C" fn caloop_lie_to_json(l: *const Lie, out: *mut *mut c_char) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        match deref(l, "lie") {
            Ok(l) => give_string(out, lie_to_json(&l.0)),
            Err(s) => s,
        }
    })
}

/// Builds the loop x * y = x + y + [x, y], refusing orders above
/// max_order.
#[no_mangle]
pub unsafe extern "C" fn caloop_lie_to_loop(
    l: *const Lie,
    max_order: usize,
    out: *mut *mut Loop,
) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        let l = match deref(l, "lie") {
            Ok(l) => &l.0,
            Err(s) => return s,
        };
        match lie_to_loop(l, max_order) {
            Ok(q) => {
                *out = Box::into_raw(Box::new(Loop(q)));
                Status::Ok
            }
            Err(e) => fail(construct_status(&e), e.to_string()),
        }
    })
}

/// Builds the subfield loop on GF(2^m) over GF(2^d), order 2^(m+1).
#[no_mangle]
pub unsafe extern "C" fn caloop_example2(m: u32, d: u32, out: *mut *mut Loop) -> Status {
    guard(|| {
        if out.is_null() {
            return fail(Status::NullArgument, "out is NULL".into());
        }
        match example2_loop(m, d) {
            Ok((q, _)) => {
                *out = Box::into_raw(Box::new(Loop(q)));
                Status::Ok
            }
            Err(e) => fail(construct_status(&e), e.to_string()),
        }
    })
}

/// Default budget for the split search inside analyze.
#[no_mangle]
pub extern "C" fn caloop_default_split_budget() -> usize {
    DEFAULT_CLOSURE_BUDGET
}
