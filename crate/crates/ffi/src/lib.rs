//! C ABI for `circnorm`.
//!
//! Rows, reports and tables cross the boundary as opaque handles that the
//! caller frees with the matching `*_free` function. Every fallible call
//! returns a [`CnStatus`]; on failure [`cn_last_error_message`] describes
//! what went wrong on the calling thread. Strings returned by the library
//! are released with [`cn_string_free`].
//!
//! Output buffers are caller-allocated and must hold exactly `n` elements,
//! `n` being the row length.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use circnorm::circulant::{self, FirstRow};
use circnorm::classify::{self, Adjacency, ClassificationReport, Tolerances, Verdict};
use circnorm::experiments::{build_table, TableRow, TableSpec};
use circnorm::table::{render, Format};
use circnorm::Error;
use num_complex::Complex64;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    DimensionTooLarge = 4,
    NotConverged = 5,
    Boundary = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnVerdict {
    Yes = 0,
    No = 1,
    Boundary = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnFormat {
    Csv = 0,
    Json = 1,
    Markdown = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnTolerances {
    pub tie: f64,
    pub gap: f64,
    pub positivity: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnComplex {
    pub re: f64,
    pub im: f64,
}

/// Opaque first row.
pub struct CnRow(FirstRow);

/// Opaque classification report.
pub struct CnReport(ClassificationReport);

/// Opaque Monte Carlo table.
pub struct CnTable {
    spec: TableSpec,
    rows: Vec<TableRow>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: CnStatus,
    message: String,
}

impl Failure {
    fn null(name: &str) -> Self {
        Self {
            status: CnStatus::NullPointer,
            message: format!("{name} is null"),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self {
            status: CnStatus::InvalidArgument,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NonFinite { .. } => CnStatus::NonFinite,
            Error::DimensionTooLarge { .. } => CnStatus::DimensionTooLarge,
            Error::NotConverged { .. } => CnStatus::NotConverged,
            Error::Boundary { .. } => CnStatus::Boundary,
            _ => CnStatus::InvalidArgument,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            CnStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_last_error("panic inside circnorm");
            CnStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| Failure::null(name))
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(name));
    }
    Ok(unsafe { slice::from_raw_parts(p, len) })
}

unsafe fn output<'a>(
    p: *mut CnComplex,
    len: usize,
    n: usize,
) -> Result<&'a mut [CnComplex], Failure> {
    if p.is_null() {
        return Err(Failure::null("out"));
    }
    if len != n {
        return Err(Failure::invalid(format!(
            "output buffer holds {len} values, row has {n}"
        )));
    }
    Ok(unsafe { slice::from_raw_parts_mut(p, len) })
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("out"));
    }
    unsafe { out.write(value) };
    Ok(())
}

fn copy_complex(dst: &mut [CnComplex], src: &[Complex64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = CnComplex { re: s.re, im: s.im };
    }
}

unsafe fn tolerances(tol: *const CnTolerances) -> Tolerances {
    match unsafe { tol.as_ref() } {
        Some(t) => Tolerances {
            tie: t.tie,
            gap: t.gap,
            positivity: t.positivity,
        },
        None => Tolerances::default(),
    }
}

fn verdict(v: Verdict) -> CnVerdict {
    match v {
        Verdict::Yes => CnVerdict::Yes,
        Verdict::No => CnVerdict::No,
        Verdict::Boundary => CnVerdict::Boundary,
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::invalid("string contains NUL"))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn cn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn cn_tolerances_default() -> CnTolerances {
    let t = Tolerances::default();
    CnTolerances {
        tie: t.tie,
        gap: t.gap,
        positivity: t.positivity,
    }
}

/// # Safety
/// `values` points to `n` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_row_new_real(
    values: *const f64,
    n: usize,
    out: *mut *mut CnRow,
) -> CnStatus {
    guard(|| {
        let values = unsafe { input(values, n, "values") }?;
        let row = FirstRow::from_real(values)?;
        unsafe { write(out, Box::into_raw(Box::new(CnRow(row)))) }
    })
}

/// # Safety
/// `values` points to `n` complex numbers; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_row_new_complex(
    values: *const CnComplex,
    n: usize,
    out: *mut *mut CnRow,
) -> CnStatus {
    guard(|| {
        let values = unsafe { input(values, n, "values") }?;
        let row = FirstRow::new(values.iter().map(|z| Complex64::new(z.re, z.im)).collect())?;
        unsafe { write(out, Box::into_raw(Box::new(CnRow(row)))) }
    })
}

/// # Safety
/// `row` is null or came from `cn_row_new_*` and was not freed before.
#[no_mangle]
pub unsafe extern "C" fn cn_row_free(row: *mut CnRow) {
    if !row.is_null() {
        drop(unsafe { Box::from_raw(row) });
    }
}

/// Row length, 0 for a null handle.
///
/// # Safety
/// `row` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_row_len(row: *const CnRow) -> usize {
    unsafe { row.as_ref() }.map_or(0, |r| r.0.len())
}

/// # Safety
/// `row` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_spectral_norm(row: *const CnRow, out: *mut f64) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        unsafe { write(out, circulant::spectral_norm(&row.0)) }
    })
}

/// Symbol values `c(omega^k)`, `k = 0..n`.
///
/// # Safety
/// `row` is a live handle, `out` holds `len` elements.
#[no_mangle]
pub unsafe extern "C" fn cn_symbol_values(
    row: *const CnRow,
    out: *mut CnComplex,
    len: usize,
) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        let out = unsafe { output(out, len, row.0.len()) }?;
        copy_complex(out, circulant::symbol_values(&row.0).values());
        Ok(())
    })
}

/// First row of the Gram circulant `C_x^* C_x`.
///
/// # Safety
/// `row` is a live handle, `out` holds `len` elements.
#[no_mangle]
pub unsafe extern "C" fn cn_gram_row(
    row: *const CnRow,
    out: *mut CnComplex,
    len: usize,
) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        let out = unsafe { output(out, len, row.0.len()) }?;
        copy_complex(out, circulant::gram_row(&row.0).entries());
        Ok(())
    })
}

/// First row of `B^m`. When the entries would overflow or underflow, the
/// row is divided by `||c||_inf^{2m}` and `*normalized` is set.
///
/// # Safety
/// `row` is a live handle, `out` holds `len` elements, `normalized` is null
/// or writable.
#[no_mangle]
pub unsafe extern "C" fn cn_gram_power(
    row: *const CnRow,
    m: u32,
    out: *mut CnComplex,
    len: usize,
    normalized: *mut bool,
) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        let out = unsafe { output(out, len, row.0.len()) }?;
        let power = circulant::gram_power(&row.0, m)?;
        copy_complex(out, power.row.entries());
        if !normalized.is_null() {
            unsafe { normalized.write(power.normalized) };
        }
        Ok(())
    })
}

/// First row of `B^m / ||c||_inf^{2m}`.
///
/// # Safety
/// `row` is a live handle, `out` holds `len` elements.
#[no_mangle]
pub unsafe extern "C" fn cn_normalized_power(
    row: *const CnRow,
    m: u32,
    out: *mut CnComplex,
    len: usize,
) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        let out = unsafe { output(out, len, row.0.len()) }?;
        copy_complex(out, circulant::normalized_power(&row.0, m)?.entries());
        Ok(())
    })
}

/// Spectral norm by power iteration on the dense Gram matrix.
///
/// # Safety
/// `row` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_dense_norm_oracle(row: *const CnRow, out: *mut f64) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        unsafe { write(out, circnorm::dense::dense_norm_oracle(&row.0)?) }
    })
}

/// Classifies a row. `tol` may be null for the defaults; `m_max = 0` skips
/// the power search.
///
/// # Safety
/// `row` is a live handle, `tol` is null or readable, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_classify(
    row: *const CnRow,
    tol: *const CnTolerances,
    m_max: u32,
    out: *mut *mut CnReport,
) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        let tol = unsafe { tolerances(tol) };
        let report = classify::classify(&row.0, &tol, (m_max > 0).then_some(m_max))?;
        unsafe { write(out, Box::into_raw(Box::new(CnReport(report)))) }
    })
}

/// # Safety
/// `report` is null or a handle from `cn_classify` not freed before.
#[no_mangle]
pub unsafe extern "C" fn cn_report_free(report: *mut CnReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// # Safety
/// `report` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_report_in_cn(report: *const CnReport) -> CnVerdict {
    unsafe { report.as_ref() }.map_or(CnVerdict::Boundary, |r| verdict(r.0.in_cn))
}

/// # Safety
/// `report` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_report_in_cn_prime(report: *const CnReport) -> CnVerdict {
    unsafe { report.as_ref() }.map_or(CnVerdict::Boundary, |r| verdict(r.0.in_cn_prime))
}

/// # Safety
/// `report` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_report_spectral_norm(report: *const CnReport) -> f64 {
    unsafe { report.as_ref() }.map_or(f64::NAN, |r| r.0.spectral_norm)
}

/// # Safety
/// `report` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_report_row_sum_abs(report: *const CnReport) -> f64 {
    unsafe { report.as_ref() }.map_or(f64::NAN, |r| r.0.row_sum_abs)
}

/// # Safety
/// `report` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_report_gap_margin(report: *const CnReport) -> f64 {
    unsafe { report.as_ref() }.map_or(f64::NAN, |r| r.0.gap_margin)
}

/// Minimal `m` with `B^m > O`, or 0 when none was found or no search ran.
///
/// # Safety
/// `report` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_report_minimal_positive_power(report: *const CnReport) -> u32 {
    unsafe { report.as_ref() }
        .and_then(|r| r.0.minimal_positive_power)
        .and_then(|s| s.found)
        .unwrap_or(0)
}

/// Report as a JSON document; free with `cn_string_free`.
///
/// # Safety
/// `report` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_report_to_json(
    report: *const CnReport,
    out: *mut *mut c_char,
) -> CnStatus {
    guard(|| {
        let report = unsafe { deref(report, "report") }?;
        let text = serde_json::to_string(&report.0).map_err(|e| Failure::invalid(e.to_string()))?;
        let s = into_c_string(text)?;
        unsafe { write(out, s) }
    })
}

/// Minimal `m <= m_max` with `B^m > O`; writes 0 when there is none.
///
/// # Safety
/// `row` is a live handle, `tol` is null or readable, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_minimal_positive_power(
    row: *const CnRow,
    m_max: u32,
    tol: *const CnTolerances,
    out: *mut u32,
) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        let tol = unsafe { tolerances(tol) };
        tol.validate()?;
        let found = classify::minimal_positive_power(&row.0, m_max, &tol)?;
        unsafe { write(out, found.unwrap_or(0)) }
    })
}

/// Whether the row lies in the phase cone. With `linear_adjacency` the pair
/// `(n-1, 0)` does not count as adjacent.
///
/// # Safety
/// `row` is a live handle, `tol` is null or readable, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_phase_cone(
    row: *const CnRow,
    tol: *const CnTolerances,
    linear_adjacency: bool,
    out: *mut bool,
) -> CnStatus {
    guard(|| {
        let row = unsafe { deref(row, "row") }?;
        let tol = unsafe { tolerances(tol) };
        tol.validate()?;
        let adjacency = if linear_adjacency {
            Adjacency::Linear
        } else {
            Adjacency::Cyclic
        };
        let cone = classify::phase_cone_with(row.0.entries(), &tol, adjacency);
        unsafe { write(out, cone.holds) }
    })
}

/// Monte Carlo table over `dims` with `samples` points per dimension.
///
/// # Safety
/// `dims` and `powers` point to `n_dims` and `n_powers` elements, `tol` is
/// null or readable, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_table_build(
    dims: *const usize,
    n_dims: usize,
    samples: u64,
    powers: *const u32,
    n_powers: usize,
    seed: u64,
    tol: *const CnTolerances,
    out: *mut *mut CnTable,
) -> CnStatus {
    guard(|| {
        let spec = TableSpec {
            dims: unsafe { input(dims, n_dims, "dims") }?.to_vec(),
            samples,
            powers: unsafe { input(powers, n_powers, "powers") }?.to_vec(),
            seed,
            tolerances: unsafe { tolerances(tol) },
        };
        let rows = build_table(&spec)?;
        unsafe { write(out, Box::into_raw(Box::new(CnTable { spec, rows }))) }
    })
}

/// Renders a table; free the string with `cn_string_free`.
///
/// # Safety
/// `table` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cn_table_render(
    table: *const CnTable,
    format: CnFormat,
    out: *mut *mut c_char,
) -> CnStatus {
    guard(|| {
        let table = unsafe { deref(table, "table") }?;
        let format = match format {
            CnFormat::Csv => Format::Csv,
            CnFormat::Json => Format::Json,
            CnFormat::Markdown => Format::Md,
        };
        let s = into_c_string(render(format, &table.spec, &table.rows))?;
        unsafe { write(out, s) }
    })
}

/// # Safety
/// `table` is null or a handle from `cn_table_build` not freed before.
#[no_mangle]
pub unsafe extern "C" fn cn_table_free(table: *mut CnTable) {
    if !table.is_null() {
        drop(unsafe { Box::from_raw(table) });
    }
}

/// # Safety
/// `s` is null or a string returned by this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn cn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
