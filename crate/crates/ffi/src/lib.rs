//! C ABI for the spongedim pipeline: opaque system handles, error codes
//! matching the CLI exit codes, and JSON report strings.
//!
//! Strings returned through out-parameters are owned by the caller and must
//! be released with `spongedim_string_free`. Error details for the most
//! recent failing call on the current thread are available through
//! `spongedim_last_error`.

use spongedim::model::SpongeSystem;
use spongedim::pipeline::{
    run_dims, run_gap, run_orderings, run_render, run_validate, DimsOptions, MeasureChoice,
    OracleMode, RenderOutcome,
};
use spongedim::rational::parse_rational;
use spongedim::spec_io::parse_spec;
use spongedim::words::{stopping_time, WordSpec};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;

/// Status codes shared with the command-line tool.
pub const SPONGEDIM_OK: i32 = 0;
pub const SPONGEDIM_INTERNAL: i32 = 1;
pub const SPONGEDIM_INVALID: i32 = 2;
pub const SPONGEDIM_PARSE: i32 = 3;
pub const SPONGEDIM_SEPARATION: i32 = 4;
pub const SPONGEDIM_NOT_APPLICABLE: i32 = 5;
pub const SPONGEDIM_NULL_ARGUMENT: i32 = 6;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

/// Message for the most recent failing call on this thread. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn spongedim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// An opaque validated sponge system.
pub struct SpongedimSystem {
    sys: SpongeSystem,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(SPONGEDIM_NULL_ARGUMENT);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        SPONGEDIM_PARSE
    })
}

fn give_string(out: *mut *mut c_char, body: String) -> i32 {
    if out.is_null() {
        set_error("null output pointer");
        return SPONGEDIM_NULL_ARGUMENT;
    }
    let c = CString::new(body.replace('\0', " ")).unwrap();
    unsafe { *out = c.into_raw() };
    SPONGEDIM_OK
}

/// Release a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn spongedim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and validate a sponge spec (JSON text). On success stores a handle
/// in `out` and returns 0; otherwise returns an error code and leaves a
/// message in `spongedim_last_error`.
#[no_mangle]
pub unsafe extern "C" fn spongedim_system_parse(
    spec_json: *const c_char,
    out: *mut *mut SpongedimSystem,
) -> i32 {
    let text = match read_str(spec_json) {
        Ok(t) => t,
        Err(c) => return c,
    };
    if out.is_null() {
        set_error("null output pointer");
        return SPONGEDIM_NULL_ARGUMENT;
    }
    let raw = match parse_spec(text) {
        Ok(r) => r,
        Err(e) => {
            set_error(&e.to_string());
            return SPONGEDIM_PARSE;
        }
    };
    match SpongeSystem::validate(&raw) {
        Ok(sys) => {
            *out = Box::into_raw(Box::new(SpongedimSystem { sys }));
            SPONGEDIM_OK
        }
        Err(errors) => {
            let msgs: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
            set_error(&msgs.join("; "));
            SPONGEDIM_INVALID
        }
    }
}

/// Release a system handle.
#[no_mangle]
pub unsafe extern "C" fn spongedim_system_free(handle: *mut SpongedimSystem) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Ambient dimension of the system.
#[no_mangle]
pub unsafe extern "C" fn spongedim_system_dimension(handle: *const SpongedimSystem) -> u32 {
    if handle.is_null() {
        return 0;
    }
    (*handle).sys.dimension() as u32
}

/// Number of maps in the system.
#[no_mangle]
pub unsafe extern "C" fn spongedim_system_map_count(handle: *const SpongedimSystem) -> u32 {
    if handle.is_null() {
        return 0;
    }
    (*handle).sys.map_count() as u32
}

/// Whether coordinate `x` dominates coordinate `y` (1-based coordinates).
/// Returns 1/0, or -1 on bad arguments.
#[no_mangle]
pub unsafe extern "C" fn spongedim_system_dominates(
    handle: *const SpongedimSystem,
    x: u32,
    y: u32,
) -> i32 {
    if handle.is_null() {
        return -1;
    }
    let d = (*handle).sys.dimension() as u32;
    if x == 0 || y == 0 || x > d || y > d || x == y {
        set_error("coordinates are 1-based, distinct and at most the dimension");
        return -1;
    }
    (*handle).sys.dominates((x - 1) as usize, (y - 1) as usize) as i32
}

/// Stopping time of the eventually periodic word `prefix . cycle^inf` at the
/// exact scale `r` (a string such as "1/20000" or "0.05") in the 1-based
/// coordinate. Returns the stopping length, or 0 on error.
#[no_mangle]
pub unsafe extern "C" fn spongedim_stopping_time(
    handle: *const SpongedimSystem,
    prefix: *const u32,
    prefix_len: usize,
    cycle: *const u32,
    cycle_len: usize,
    scale: *const c_char,
    coord: u32,
) -> u64 {
    if handle.is_null() || cycle.is_null() || cycle_len == 0 {
        set_error("need a system handle and a nonempty cycle");
        return 0;
    }
    let sys = &(*handle).sys;
    let scale_text = match read_str(scale) {
        Ok(t) => t,
        Err(_) => return 0,
    };
    let r = match parse_rational(scale_text) {
        Ok(r) => r,
        Err(e) => {
            set_error(&e.to_string());
            return 0;
        }
    };
    let zero = spongedim::rational::rat(0, 1);
    let one = spongedim::rational::rat(1, 1);
    if !(r > zero && r < one) {
        set_error("scale must lie strictly between 0 and 1");
        return 0;
    }
    if coord == 0 || coord as usize > sys.dimension() {
        set_error("coordinate is 1-based and at most the dimension");
        return 0;
    }
    let take = |ptr: *const u32, len: usize| -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let letter = *ptr.add(k);
            if letter == 0 || letter as usize > sys.map_count() {
                return None;
            }
            out.push((letter - 1) as usize);
        }
        Some(out)
    };
    let prefix_vec = if prefix_len == 0 {
        Vec::new()
    } else if prefix.is_null() {
        set_error("null prefix with nonzero length");
        return 0;
    } else {
        match take(prefix, prefix_len) {
            Some(v) => v,
            None => {
                set_error("letters are 1-based map indices");
                return 0;
            }
        }
    };
    let cycle_vec = match take(cycle, cycle_len) {
        Some(v) => v,
        None => {
            set_error("letters are 1-based map indices");
            return 0;
        }
    };
    let w = WordSpec::new(prefix_vec, cycle_vec);
    stopping_time(sys, &w, &r, (coord - 1) as usize) as u64
}

/// Validate command: report JSON in `out_json`, CLI-compatible status code.
#[no_mangle]
pub unsafe extern "C" fn spongedim_run_validate(
    spec_json: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    let text = match read_str(spec_json) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let outcome = run_validate(text);
    let code = outcome.exit;
    let rc = give_string(out_json, outcome.report.to_json());
    if rc != SPONGEDIM_OK {
        return rc;
    }
    code
}

/// Orderings command.
#[no_mangle]
pub unsafe extern "C" fn spongedim_run_orderings(
    spec_json: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    let text = match read_str(spec_json) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let outcome = run_orderings(text);
    let code = outcome.exit;
    let rc = give_string(out_json, outcome.report.to_json());
    if rc != SPONGEDIM_OK {
        return rc;
    }
    code
}

/// Dims command. `measure` is "given", "uniform" or "natural:1,2"; `oracle`
/// is "off", "quick" or "full".
#[no_mangle]
pub unsafe extern "C" fn spongedim_run_dims(
    spec_json: *const c_char,
    measure: *const c_char,
    seed: u64,
    oracle: *const c_char,
    formula_only: u8,
    out_json: *mut *mut c_char,
) -> i32 {
    let text = match read_str(spec_json) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let measure_text = match read_str(measure) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let oracle_text = match read_str(oracle) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let Some(measure) = MeasureChoice::parse(measure_text) else {
        set_error("unknown measure (use given | uniform | natural:1,2)");
        return SPONGEDIM_PARSE;
    };
    let Some(oracle) = OracleMode::parse(oracle_text) else {
        set_error("unknown oracle mode (use off | quick | full)");
        return SPONGEDIM_PARSE;
    };
    let opts = DimsOptions { measure, seed, oracle, formula_only: formula_only != 0 };
    let outcome = run_dims(text, &opts);
    let code = outcome.exit;
    let rc = give_string(out_json, outcome.report.to_json());
    if rc != SPONGEDIM_OK {
        return rc;
    }
    code
}

/// Gap command.
#[no_mangle]
pub unsafe extern "C" fn spongedim_run_gap(
    spec_json: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    let text = match read_str(spec_json) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let outcome = run_gap(text, seed);
    let code = outcome.exit;
    let rc = give_string(out_json, outcome.report.to_json());
    if rc != SPONGEDIM_OK {
        return rc;
    }
    code
}

/// Render command: SVG text in `out_svg`.
#[no_mangle]
pub unsafe extern "C" fn spongedim_render_svg(
    spec_json: *const c_char,
    depth: u32,
    out_svg: *mut *mut c_char,
) -> i32 {
    let text = match read_str(spec_json) {
        Ok(t) => t,
        Err(c) => return c,
    };
    match run_render(text, depth as usize) {
        RenderOutcome::Svg(svg) => give_string(out_svg, svg),
        RenderOutcome::Failed(outcome) => {
            set_error(&outcome.report.notes.join("; "));
            outcome.exit
        }
    }
}
