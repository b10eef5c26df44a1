//! C ABI over `cantor-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json`
//! and released by the matching `*_free`. Structured results come back as
//! JSON strings owned by the caller and released with
//! [`cantor_string_free`]. Every entry point returns a [`CantorStatus`];
//! on failure [`cantor_last_error`] describes the problem.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cantor_core::cert::{certify_homeo, certify_measure_homeo, verify, HomeoCertificate};
use cantor_core::maps::{injectivity_certificate, surjectivity_decide, DEFAULT_BUFFER_BOUND};
use cantor_core::measure::check_preserves;
use cantor_core::rational;
use cantor_core::{BoolOp, ClopenSet, CylinderMeasure, Error, TransducerMap};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CantorStatus {
    Ok = 0,
    /// The computation finished with a negative answer (for example a
    /// certificate with discrepancies).
    Negative = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    Parse = 4,
    InvalidInput = 5,
    Budget = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CantorBoolOp {
    Union = 0,
    Intersection = 1,
    Complement = 2,
    BooleanSum = 3,
    Difference = 4,
}

impl From<CantorBoolOp> for BoolOp {
    fn from(op: CantorBoolOp) -> Self {
        match op {
            CantorBoolOp::Union => BoolOp::Union,
            CantorBoolOp::Intersection => BoolOp::Intersection,
            CantorBoolOp::Complement => BoolOp::Complement,
            CantorBoolOp::BooleanSum => BoolOp::BooleanSum,
            CantorBoolOp::Difference => BoolOp::Difference,
        }
    }
}

/// A clopen subset of the Cantor space.
pub struct CantorClopen {
    inner: ClopenSet,
}

/// A continuous self-map given by a transducer.
pub struct CantorMap {
    inner: TransducerMap,
}

/// A cylinder-weight measure.
pub struct CantorMeasure {
    inner: CylinderMeasure,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CantorStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => CantorStatus::Parse,
            Error::Budget(_) | Error::ResourceLimit(_) => CantorStatus::Budget,
            Error::NotSurjective { .. } | Error::PreservationViolated { .. } => CantorStatus::Negative,
            _ => CantorStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(CantorStatus::Parse, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<CantorStatus, Failure>) -> CantorStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CantorStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(CantorStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(CantorStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(CantorStatus::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<CantorStatus, Failure> {
    if out.is_null() {
        return Err(Failure(CantorStatus::NullArgument, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(CantorStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<CantorStatus, Failure> {
    if out.is_null() {
        return Err(Failure(CantorStatus::NullArgument, "null output pointer".into()));
    }
    *out = CString::new(s).map_err(|_| Failure(CantorStatus::InvalidInput, "interior NUL".into()))?.into_raw();
    Ok(CantorStatus::Ok)
}

unsafe fn put_json<T: serde::Serialize>(out: *mut *mut c_char, v: &T) -> Result<CantorStatus, Failure> {
    put_string(out, serde_json::to_string(v)?)
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cantor_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cantor_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `{"antichain":[...]}` (or a bare word list) into a handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_clopen_from_json(json: *const c_char, out: *mut *mut CantorClopen) -> CantorStatus {
    guard(|| {
        let s = text(json)?;
        let inner = match serde_json::from_str::<ClopenSet>(s) {
            Ok(set) => set,
            Err(e) => match serde_json::from_str::<Vec<cantor_core::Word>>(s) {
                Ok(words) => ClopenSet::canonicalize(words),
                Err(_) => return Err(e.into()),
            },
        };
        put(out, CantorClopen { inner })
    })
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_clopen_to_json(set: *const CantorClopen, out: *mut *mut c_char) -> CantorStatus {
    guard(|| put_json(out, &handle(set)?.inner))
}

/// `b` is ignored (and may be NULL) for the complement.
///
/// # Safety
/// `a` (and `b` unless complementing) must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_clopen_boolop(
    op: CantorBoolOp,
    a: *const CantorClopen,
    b: *const CantorClopen,
    out: *mut *mut CantorClopen,
) -> CantorStatus {
    guard(|| {
        let a = &handle(a)?.inner;
        let inner = match op {
            CantorBoolOp::Complement => a.complement(),
            _ => a.boolean_op(op.into(), Some(&handle(b)?.inner)),
        };
        put(out, CantorClopen { inner })
    })
}

/// # Safety
/// `set` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cantor_clopen_free(set: *mut CantorClopen) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Parses a transducer, or one of the names `fold`, `identity`,
/// `flip-first`, `shift`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_map_from_json(json: *const c_char, out: *mut *mut CantorMap) -> CantorStatus {
    guard(|| {
        let s = text(json)?;
        let inner = match s.trim() {
            "fold" => TransducerMap::fold(),
            "identity" => TransducerMap::identity(),
            "flip-first" => TransducerMap::flip_first(),
            "shift" => TransducerMap::shift(),
            _ => serde_json::from_str(s)?,
        };
        put(out, CantorMap { inner })
    })
}

/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_map_to_json(map: *const CantorMap, out: *mut *mut c_char) -> CantorStatus {
    guard(|| put_json(out, &handle(map)?.inner))
}

/// # Safety
/// `map` and `set` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_map_preimage(
    map: *const CantorMap,
    set: *const CantorClopen,
    out: *mut *mut CantorClopen,
) -> CantorStatus {
    guard(|| {
        let inner = handle(map)?.inner.preimage(&handle(set)?.inner);
        put(out, CantorClopen { inner })
    })
}

/// Writes `{"surjectivity":...,"injectivity":...}` as JSON.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_map_certificates(map: *const CantorMap, out: *mut *mut c_char) -> CantorStatus {
    guard(|| {
        let f = &handle(map)?.inner;
        let v = serde_json::json!({
            "surjectivity": surjectivity_decide(f),
            "injectivity": injectivity_certificate(f, DEFAULT_BUFFER_BOUND),
        });
        put_json(out, &v)
    })
}

/// # Safety
/// `map` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cantor_map_free(map: *mut CantorMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_measure_from_json(json: *const c_char, out: *mut *mut CantorMeasure) -> CantorStatus {
    guard(|| put(out, CantorMeasure { inner: serde_json::from_str(text(json)?)? }))
}

/// Writes the measure of `set` as a string `"p/q"`.
///
/// # Safety
/// `measure` and `set` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_measure_of(
    measure: *const CantorMeasure,
    set: *const CantorClopen,
    out: *mut *mut c_char,
) -> CantorStatus {
    guard(|| put_string(out, rational::to_string(&handle(measure)?.inner.clopen_measure(&handle(set)?.inner))))
}

/// # Safety
/// `measure` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cantor_measure_free(measure: *mut CantorMeasure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

/// Checks `mu(f^-1[w]) = nu([w])` for all words up to `depth`. Returns
/// `CANTOR_STATUS_NEGATIVE` with the violation in `out` when it fails.
///
/// # Safety
/// All handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_check_preserves(
    map: *const CantorMap,
    mu: *const CantorMeasure,
    nu: *const CantorMeasure,
    depth: usize,
    out: *mut *mut c_char,
) -> CantorStatus {
    guard(|| {
        let r = check_preserves(&handle(map)?.inner, &handle(mu)?.inner, &handle(nu)?.inner, depth);
        put_json(out, &r)?;
        Ok(match r {
            cantor_core::measure::Preservation::Preserved { .. } => CantorStatus::Ok,
            cantor_core::measure::Preservation::Violated { .. } => CantorStatus::Negative,
        })
    })
}

/// Certificate for a homeomorphism within `2^-n` of `map`, as JSON.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_approx_homeo(map: *const CantorMap, n: usize, out: *mut *mut c_char) -> CantorStatus {
    guard(|| put_json(out, &certify_homeo(&handle(map)?.inner, n)?))
}

/// Measure-preserving version of [`cantor_approx_homeo`]. A `budget` of 0
/// picks the default.
///
/// # Safety
/// All handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_approx_measure_homeo(
    map: *const CantorMap,
    mu: *const CantorMeasure,
    nu: *const CantorMeasure,
    n: usize,
    budget: usize,
    out: *mut *mut c_char,
) -> CantorStatus {
    guard(|| {
        let budget = (budget > 0).then_some(budget);
        let c = certify_measure_homeo(&handle(map)?.inner, &handle(mu)?.inner, &handle(nu)?.inner, n, budget)?;
        put_json(out, &c)
    })
}

/// Re-verifies a certificate. Writes the list of discrepancies as a JSON
/// array and returns `CANTOR_STATUS_NEGATIVE` when it is nonempty.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_verify_certificate(json: *const c_char, out: *mut *mut c_char) -> CantorStatus {
    guard(|| {
        let c: HomeoCertificate = serde_json::from_str(text(json)?)?;
        let bad = verify(&c);
        put_json(out, &bad)?;
        Ok(if bad.is_empty() { CantorStatus::Ok } else { CantorStatus::Negative })
    })
}

/// Runs one `cantor` command line. `argv[0]` is the program name. The exit
/// code goes to `exit_code`; stdout and stderr to the two strings.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_run(
    argc: c_int,
    argv: *const *const c_char,
    exit_code: *mut c_int,
    stdout_out: *mut *mut c_char,
    stderr_out: *mut *mut c_char,
) -> CantorStatus {
    guard(|| {
        if argv.is_null() || exit_code.is_null() || argc < 0 {
            return Err(Failure(CantorStatus::NullArgument, "null argv or exit code".into()));
        }
        let args = (0..argc as usize).map(|i| text(*argv.add(i)).map(str::to_owned)).collect::<Result<Vec<_>, _>>()?;
        let o = cantor_core::cli::run_command(args);
        *exit_code = o.code;
        put_string(stdout_out, o.stdout)?;
        put_string(stderr_out, o.stderr)
    })
}
