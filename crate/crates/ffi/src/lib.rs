//! C ABI over the skew-motzkin crate.
//!
//! Every fallible function returns an [`SkmStatus`] and writes its result
//! through an out-pointer. Objects are opaque handles released with the
//! matching `*_free` function. Strings handed out by the library are owned
//! by the caller and released with [`skm_string_free`]. After a non-OK
//! status, [`skm_last_error`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use skew_motzkin::asymptotics::{count_constants, height_constants, AsymptoticError};
use skew_motzkin::closedforms::{integer_sequence, Generator};
use skew_motzkin::dpcount::{CountError, CountOptions, CountTable};
use skew_motzkin::path::{parse_word, validate, EnumFilter, Enumerator, PathError};
use skew_motzkin::sampler::{SampleError, SampleStream, Sampler};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OracleLimit = 3,
    OutOfRange = 4,
    InvalidPath = 5,
    Internal = 6,
}

/// Dense DP count table.
pub struct SkmCountTable {
    table: CountTable,
}

/// Integer coefficients of a closed-form series.
pub struct SkmSeries {
    coeffs: Vec<String>,
}

/// Seeded uniform sampler.
pub struct SkmSampler {
    stream: SampleStream,
}

/// Asymptotic constants rounded to double precision.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SkmConstants {
    pub rho: f64,
    pub a0: f64,
    pub c: f64,
    pub amp: f64,
    pub k_diff: f64,
    pub k_exp: f64,
    pub k_log: f64,
    pub k_height: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Error {
    status: SkmStatus,
    message: String,
}

impl Error {
    fn new(status: SkmStatus, message: impl Into<String>) -> Self {
        Error {
            status,
            message: message.into(),
        }
    }

    fn null(what: &str) -> Self {
        Error::new(SkmStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<PathError> for Error {
    fn from(e: PathError) -> Self {
        let status = match e {
            PathError::OracleLimit { .. } => SkmStatus::OracleLimit,
            _ => SkmStatus::InvalidPath,
        };
        Error::new(status, e.to_string())
    }
}

impl From<CountError> for Error {
    fn from(e: CountError) -> Self {
        Error::new(SkmStatus::OutOfRange, e.to_string())
    }
}

impl From<SampleError> for Error {
    fn from(e: SampleError) -> Self {
        Error::new(SkmStatus::InvalidArgument, e.to_string())
    }
}

impl From<AsymptoticError> for Error {
    fn from(e: AsymptoticError) -> Self {
        let status = match e {
            AsymptoticError::Unstable { .. } => SkmStatus::Internal,
            _ => SkmStatus::InvalidArgument,
        };
        Error::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<&str>) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() =
            message.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    });
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> SkmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            SkmStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(Some(&e.message));
            e.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("panic");
            set_last_error(Some(&format!("internal error: {msg}")));
            SkmStatus::Internal
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Error> {
    p.as_mut().ok_or_else(|| Error::null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| Error::null(what))
}

unsafe fn input_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(Error::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::new(SkmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

fn level_arg(level: i64) -> Option<usize> {
    (level >= 0).then_some(level as usize)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn skm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn skm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn skm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks a word over `U D F L`. A word with other characters fails with
/// `INVALID_PATH`; otherwise `*out_valid` is set and `*out_violation` holds
/// the index of the first offending step (or `SIZE_MAX` when valid).
///
/// # Safety
/// `word` must be a NUL-terminated string; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn skm_path_validate(
    word: *const c_char,
    out_valid: *mut bool,
    out_violation: *mut usize,
) -> SkmStatus {
    guard(|| {
        let steps = parse_word(input_str(word, "word")?)?;
        let valid = out_ref(out_valid, "out_valid")?;
        let index = out_ref(out_violation, "out_violation")?;
        let report = validate(&steps);
        *valid = report.valid;
        *index = report.violation.map_or(usize::MAX, |v| v.index);
        Ok(())
    })
}

/// Number of valid paths of length `n` ending at `level`, by brute force.
/// Lengths above `limit` fail with `ORACLE_LIMIT`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skm_enumerate_count(
    n: usize,
    level: usize,
    limit: usize,
    out: *mut u64,
) -> SkmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = Enumerator::with_limit(limit).count(n, EnumFilter::at_level(level))?;
        Ok(())
    })
}

/// Builds a count table for lengths `0..=max_len`. A negative `height_cap`
/// means no cap.
///
/// # Safety
/// `out` must be a valid pointer; the handle is freed with
/// [`skm_count_table_free`].
#[no_mangle]
pub unsafe extern "C" fn skm_count_table_new(
    max_len: usize,
    height_cap: i64,
    out: *mut *mut SkmCountTable,
) -> SkmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let options = CountOptions {
            height_cap: level_arg(height_cap),
        };
        let table = CountTable::build(max_len, options);
        *out = Box::into_raw(Box::new(SkmCountTable { table }));
        Ok(())
    })
}

/// # Safety
/// `table` must come from [`skm_count_table_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn skm_count_table_free(table: *mut SkmCountTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Count of paths of length `n` ending at `level`, as a decimal string.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skm_count_table_count(
    table: *const SkmCountTable,
    n: usize,
    level: usize,
    out: *mut *mut c_char,
) -> SkmStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let out = out_ref(out, "out")?;
        *out = give_string(t.table.count(n, level)?.to_string());
        Ok(())
    })
}

/// Like [`skm_count_table_count`] but as an integer; counts that do not fit
/// fail with `OUT_OF_RANGE`.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skm_count_table_count_u64(
    table: *const SkmCountTable,
    n: usize,
    level: usize,
    out: *mut u64,
) -> SkmStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let out = out_ref(out, "out")?;
        let c = t.table.count(n, level)?;
        *out = u64::try_from(&c)
            .map_err(|_| Error::new(SkmStatus::OutOfRange, format!("count {c} exceeds 64 bits")))?;
        Ok(())
    })
}

/// Evaluates a named series (`sm`, `total`, `level:J`, `bounded:H`,
/// `layer:X:J`) to `order`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer; the
/// handle is freed with [`skm_series_free`].
#[no_mangle]
pub unsafe extern "C" fn skm_series_new(
    name: *const c_char,
    order: usize,
    out: *mut *mut SkmSeries,
) -> SkmStatus {
    guard(|| {
        let generator: Generator = input_str(name, "name")?
            .parse()
            .map_err(|e: String| Error::new(SkmStatus::InvalidArgument, e))?;
        let out = out_ref(out, "out")?;
        let coeffs = integer_sequence(&generator.evaluate(order), order)
            .iter()
            .map(ToString::to_string)
            .collect();
        *out = Box::into_raw(Box::new(SkmSeries { coeffs }));
        Ok(())
    })
}

/// # Safety
/// `series` must come from [`skm_series_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn skm_series_free(series: *mut SkmSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of stored coefficients (`order + 1`).
///
/// # Safety
/// `series` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skm_series_len(series: *const SkmSeries, out: *mut usize) -> SkmStatus {
    guard(|| {
        let s = handle(series, "series")?;
        *out_ref(out, "out")? = s.coeffs.len();
        Ok(())
    })
}

/// Coefficient of `z^n` as a decimal string.
///
/// # Safety
/// `series` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skm_series_coefficient(
    series: *const SkmSeries,
    n: usize,
    out: *mut *mut c_char,
) -> SkmStatus {
    guard(|| {
        let s = handle(series, "series")?;
        let out = out_ref(out, "out")?;
        let c = s.coeffs.get(n).ok_or_else(|| {
            Error::new(
                SkmStatus::OutOfRange,
                format!("z^{n} is beyond the computed order {}", s.coeffs.len() - 1),
            )
        })?;
        *out = give_string(c.clone());
        Ok(())
    })
}

/// Sampler over paths of length `n` ending at `level` (negative: any level).
///
/// # Safety
/// `out` must be a valid pointer; the handle is freed with
/// [`skm_sampler_free`].
#[no_mangle]
pub unsafe extern "C" fn skm_sampler_new(
    n: usize,
    level: i64,
    seed: u64,
    out: *mut *mut SkmSampler,
) -> SkmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let sampler = Sampler::new(n, level_arg(level))?;
        *out = Box::into_raw(Box::new(SkmSampler {
            stream: SampleStream::new(sampler, seed),
        }));
        Ok(())
    })
}

/// Next sample as a word over `U D F L`.
///
/// # Safety
/// `sampler` must be a live handle not used concurrently, and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn skm_sampler_next(
    sampler: *mut SkmSampler,
    out: *mut *mut c_char,
) -> SkmStatus {
    guard(|| {
        let s = out_ref(sampler, "sampler")?;
        let out = out_ref(out, "out")?;
        let path = s.stream.next().expect("stream is endless");
        *out = give_string(path.word());
        Ok(())
    })
}

/// # Safety
/// `sampler` must come from [`skm_sampler_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn skm_sampler_free(sampler: *mut SkmSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Computes the singularity and height constants at `digits` decimal
/// digits (at least 15) and rounds them to doubles.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skm_asymptotic_constants(
    digits: u32,
    out: *mut SkmConstants,
) -> SkmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = count_constants(digits)?;
        let h = height_constants(digits, &c)?;
        *out = SkmConstants {
            rho: c.rho.to_f64(),
            a0: c.a0.to_f64(),
            c: c.c.to_f64(),
            amp: c.amp.to_f64(),
            k_diff: h.k_diff.to_f64(),
            k_exp: h.k_exp.to_f64(),
            k_log: h.k_log.to_f64(),
            k_height: h.k_height.to_f64(),
        };
        Ok(())
    })
}
