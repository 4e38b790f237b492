//! C ABI over the torsionlab library.
//!
//! Conventions: every fallible function returns a [`TlStatus`]; on failure a
//! message is stored per thread and can be fetched with
//! [`tl_last_error_message`].  Handles are opaque and must be released with
//! their matching `*_free` function.  Strings returned to the caller are
//! released with [`tl_string_free`].  Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use torsionlab::rootfind::Precision;
use torsionlab::torsion::{self, Method, TorsionRecord};
use torsionlab::{variety, verify, Family, Manifold, TorsionError};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    /// Root finding, reconstruction or a linear-algebra gate failed.
    NumericFailure = 4,
    /// An exact-arithmetic precondition failed (divisibility, coprimality).
    ExactFailure = 5,
    IndexOutOfRange = 6,
    /// A check ran and reported failure.
    CheckFailed = 7,
    Panic = 8,
}

/// Surgery families.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlFamily {
    /// p/1 surgery on 4_1.
    FigureEightP = 0,
    /// 1/q surgery on 4_1.
    FigureEightQ = 1,
    /// 1/q surgery on 5_2.
    FiveTwoQ = 2,
}

/// Torsion methods.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlMethod {
    ClosedForm = 0,
    ChainComplex = 1,
    Both = 2,
}

/// Verification checks runnable through [`tl_verify`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlCheck {
    Vanishing = 0,
    LemmaKappa = 1,
    /// Uses `n` as the exponent.
    PowerSums = 2,
    /// Uses `parameter` as p.
    SmallPTable = 3,
    /// Uses `parameter` as m.
    PartialFractions = 4,
}

/// Opaque list of variety points.
pub struct TlVariety {
    points: Vec<Complex64>,
}

/// Opaque torsion table.
pub struct TlTorsionTable {
    rows: Vec<TorsionRecord>,
}

/// One row of a torsion table.  Missing values are NaN with the flag cleared.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TlTorsionRow {
    pub a_re: f64,
    pub a_im: f64,
    pub has_closed_form: bool,
    pub closed_form_re: f64,
    pub closed_form_im: f64,
    pub has_chain_complex: bool,
    pub chain_complex_re: f64,
    pub chain_complex_im: f64,
    /// Largest relator residual of the representation (NaN if not built).
    pub residual: f64,
    pub irreducible: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &TorsionError) -> TlStatus {
    match e {
        TorsionError::UnsupportedFamily(_) => TlStatus::Unsupported,
        TorsionError::InvalidArgument(_) | TorsionError::Parse(_) => TlStatus::InvalidArgument,
        TorsionError::NotDivisible { .. } | TorsionError::NotCoprime(_) => TlStatus::ExactFailure,
        _ => TlStatus::NumericFailure,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), (TlStatus, String)>>(f: F) -> TlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TlStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            TlStatus::Panic
        }
    }
}

fn lib_err(e: TorsionError) -> (TlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (TlStatus, String) {
    (TlStatus::NullPointer, "null pointer argument".into())
}

fn manifold(family: TlFamily, parameter: i64) -> Result<Manifold, (TlStatus, String)> {
    let fam = match family {
        TlFamily::FigureEightP => Family::FigureEightP,
        TlFamily::FigureEightQ => Family::FigureEightQ,
        TlFamily::FiveTwoQ => Family::FiveTwoQ,
    };
    Manifold::new(fam, parameter).map_err(lib_err)
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The last error message on this thread, or NULL if the last call succeeded.
/// Free the result with [`tl_string_free`].
#[no_mangle]
pub extern "C" fn tl_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Closed-form torsion at the eigenvalue `a`.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tl_torsion_closed_form(
    family: TlFamily,
    parameter: i64,
    a_re: f64,
    a_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TlStatus {
    guard(|| {
        if out_re.is_null() || out_im.is_null() {
            return Err(null());
        }
        let m = manifold(family, parameter)?;
        let t = torsion::torsion_closed_form(Complex64::new(a_re, a_im), &m).map_err(lib_err)?;
        *out_re = t.re;
        *out_im = t.im;
        Ok(())
    })
}

/// Compute the variety points of a manifold.
///
/// # Safety
/// `out` must be valid for writes.  On success `*out` owns a handle that must
/// be released with [`tl_variety_free`]; on failure `*out` is set to NULL.
#[no_mangle]
pub unsafe extern "C" fn tl_variety_new(family: TlFamily, parameter: i64, out: *mut *mut TlVariety) -> TlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let m = manifold(family, parameter)?;
        let pts = variety::variety_points(&m).map_err(lib_err)?;
        let h = Box::new(TlVariety { points: pts.iter().map(|p| p.a).collect() });
        *out = Box::into_raw(h);
        Ok(())
    })
}

/// Number of points in a variety handle (0 for NULL).
///
/// # Safety
/// `h` must be NULL or a live handle from [`tl_variety_new`].
#[no_mangle]
pub unsafe extern "C" fn tl_variety_len(h: *const TlVariety) -> usize {
    h.as_ref().map_or(0, |v| v.points.len())
}

/// The `index`-th point.
///
/// # Safety
/// `h` must be a live handle; `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tl_variety_point(
    h: *const TlVariety,
    index: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TlStatus {
    guard(|| {
        let v = h.as_ref().ok_or_else(null)?;
        if out_re.is_null() || out_im.is_null() {
            return Err(null());
        }
        let p = v
            .points
            .get(index)
            .ok_or((TlStatus::IndexOutOfRange, format!("index {index} of {}", v.points.len())))?;
        *out_re = p.re;
        *out_im = p.im;
        Ok(())
    })
}

/// Release a variety handle.
///
/// # Safety
/// `h` must be NULL or a live handle from [`tl_variety_new`], not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tl_variety_free(h: *mut TlVariety) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Torsion at every variety point.
///
/// # Safety
/// `out` must be valid for writes; release the result with [`tl_torsion_table_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_torsion_table_new(
    family: TlFamily,
    parameter: i64,
    method: TlMethod,
    out: *mut *mut TlTorsionTable,
) -> TlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let m = manifold(family, parameter)?;
        let method = match method {
            TlMethod::ClosedForm => Method::ClosedForm,
            TlMethod::ChainComplex => Method::ChainComplex,
            TlMethod::Both => Method::Both,
        };
        let rows = torsion::torsion_table(&m, method, Precision::Auto).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TlTorsionTable { rows }));
        Ok(())
    })
}

/// Number of rows (0 for NULL).
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_torsion_table_len(h: *const TlTorsionTable) -> usize {
    h.as_ref().map_or(0, |t| t.rows.len())
}

/// Copy the `index`-th row into `out`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tl_torsion_table_row(
    h: *const TlTorsionTable,
    index: usize,
    out: *mut TlTorsionRow,
) -> TlStatus {
    guard(|| {
        let t = h.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let r = t
            .rows
            .get(index)
            .ok_or((TlStatus::IndexOutOfRange, format!("index {index} of {}", t.rows.len())))?;
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let cf = r.closed_form.unwrap_or(nan);
        let cc = r.chain_complex.unwrap_or(nan);
        *out = TlTorsionRow {
            a_re: r.a.re,
            a_im: r.a.im,
            has_closed_form: r.closed_form.is_some(),
            closed_form_re: cf.re,
            closed_form_im: cf.im,
            has_chain_complex: r.chain_complex.is_some(),
            chain_complex_re: cc.re,
            chain_complex_im: cc.im,
            residual: r.residual,
            irreducible: r.irreducible,
        };
        Ok(())
    })
}

/// Release a torsion table.
///
/// # Safety
/// `h` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tl_torsion_table_free(h: *mut TlTorsionTable) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Run a check and return its report as a JSON string in `*out_json`
/// (free with [`tl_string_free`]).  Returns `CheckFailed` when the report
/// fails; the JSON is still produced.
///
/// # Safety
/// `out_json` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tl_verify(
    check: TlCheck,
    family: TlFamily,
    parameter: i64,
    n: i64,
    out_json: *mut *mut c_char,
) -> TlStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null());
        }
        *out_json = ptr::null_mut();
        let report = match check {
            TlCheck::Vanishing => verify::check_vanishing(&manifold(family, parameter)?),
            TlCheck::LemmaKappa => verify::check_lemma_kappa(&manifold(family, parameter)?),
            TlCheck::PowerSums => verify::check_power_sums(&manifold(family, parameter)?, n),
            TlCheck::SmallPTable => verify::check_small_p_table(parameter),
            TlCheck::PartialFractions => verify::check_partial_fractions(parameter),
        };
        let json = serde_json::to_string(&report).map_err(|e| (TlStatus::InvalidArgument, e.to_string()))?;
        *out_json = into_c_string(json);
        if report.passed() {
            Ok(())
        } else {
            Err((TlStatus::CheckFailed, report.to_string()))
        }
    })
}

/// Parse a knot name ("41", "52") and surgery coefficient ("p/q").
///
/// # Safety
/// `knot` and `surgery` must be NUL-terminated strings; the out pointers
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tl_parse_surgery(
    knot: *const c_char,
    surgery: *const c_char,
    out_family: *mut TlFamily,
    out_parameter: *mut i64,
) -> TlStatus {
    guard(|| {
        if knot.is_null() || surgery.is_null() || out_family.is_null() || out_parameter.is_null() {
            return Err(null());
        }
        let utf8 = |p: *const c_char| {
            CStr::from_ptr(p).to_str().map_err(|_| (TlStatus::InvalidArgument, "string is not UTF-8".to_string()))
        };
        let m = Manifold::from_surgery(utf8(knot)?, utf8(surgery)?).map_err(lib_err)?;
        *out_family = match m.family {
            Family::FigureEightP => TlFamily::FigureEightP,
            Family::FigureEightQ => TlFamily::FigureEightQ,
            Family::FiveTwoQ => TlFamily::FiveTwoQ,
        };
        *out_parameter = m.parameter;
        Ok(())
    })
}
