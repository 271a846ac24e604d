//! C ABI over the `invbinom` engines, verifiers and scanners.
//!
//! Every fallible call returns an [`InvbinomStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and
//! read back with [`invbinom_last_error`]. Strings handed out by this
//! library are owned by the caller and released with [`invbinom_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use invbinom::definability::{analyze_definability, find_discontinuity_witness, Verdict};
use invbinom::fsum::EngineConfig;
use invbinom::padic::DiffValuation;
use invbinom::scan::{scan_good_primes, scan_wieferich, ScanException, ScanOptions};
use invbinom::verify::{
    tally, verify_prop_1_1, verify_section2, verify_section3, verify_section4, verify_section5, verify_thm_1_2, FContext, Section2Params,
    Section3Params, Section4Params, Section5Params, VerificationReport,
};
use invbinom::{Error, PadicIntegerSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvbinomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    CapExceeded = 4,
    PrecisionExhausted = 5,
    EngineDisagreement = 6,
    Io = 7,
    Internal = 8,
}

impl From<&Error> for InvbinomStatus {
    fn from(e: &Error) -> Self {
        match e {
            _ if e.is_cap_exceeded() => InvbinomStatus::CapExceeded,
            Error::NotPrime(_) => InvbinomStatus::NotPrime,
            Error::PrecisionExhausted => InvbinomStatus::PrecisionExhausted,
            Error::EngineDisagreement(_) => InvbinomStatus::EngineDisagreement,
            Error::Io(_) | Error::Checkpoint(_) => InvbinomStatus::Io,
            Error::InvalidSpec(_)
            | Error::InvalidArgument(_)
            | Error::SparseRequiresTwo
            | Error::BinomialDomain { .. }
            | Error::NotPadicInteger
            | Error::LargeWieferich(_) => InvbinomStatus::InvalidArgument,
            _ => InvbinomStatus::Internal,
        }
    }
}

/// Engine caps and working precision; zero fields take the library defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct InvbinomConfig {
    pub exact_cap: u64,
    pub modular_cap: u64,
    pub precision: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvbinomVerdict {
    CauchyEvidence = 0,
    DivergenceEvidence = 1,
    Inconclusive = 2,
}

/// Opaque evaluation context with its caches.
pub struct InvbinomContext {
    inner: FContext,
}

/// Opaque list of scan exceptions.
pub struct InvbinomScan {
    exceptions: Vec<ScanException>,
    checked: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct InvbinomScanRow {
    pub p: u64,
    /// `n` for good-prime exceptions; 0 for Wieferich rows.
    pub n: u64,
    /// Valuation, or the working depth when `censored` is set.
    pub nu: u32,
    pub censored: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Status(InvbinomStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Status(InvbinomStatus::from(&e), e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail::Status(InvbinomStatus::InvalidArgument, msg.into())
}

fn null() -> Fail {
    Fail::Status(InvbinomStatus::NullPointer, "null pointer argument".into())
}

/// Runs `body`, mapping errors and panics to a status and the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> InvbinomStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            InvbinomStatus::Ok
        }
        Ok(Err(Fail::Status(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside invbinom");
            InvbinomStatus::Internal
        }
    }
}

unsafe fn context<'a>(ctx: *const InvbinomContext) -> Result<&'a FContext, Fail> {
    ctx.as_ref().map(|c| &c.inner).ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| invalid("string is not UTF-8"))
}

fn owned(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| invalid("interior NUL in output"))
}

/// Message for the most recent failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn invbinom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn invbinom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `config` may be null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invbinom_context_new(config: *const InvbinomConfig, out: *mut *mut InvbinomContext) -> InvbinomStatus {
    guard(|| {
        let mut cfg = EngineConfig::default();
        if let Some(c) = config.as_ref() {
            if c.exact_cap != 0 {
                cfg.exact_cap = c.exact_cap;
                cfg.cross_exact_cap = cfg.cross_exact_cap.min(c.exact_cap);
            }
            if c.modular_cap != 0 {
                cfg.modular_cap = c.modular_cap;
            }
            if c.precision != 0 {
                cfg.precision = c.precision;
            }
        }
        write(out, Box::into_raw(Box::new(InvbinomContext { inner: FContext::new(cfg) })))
    })
}

/// # Safety
/// `ctx` must be null or a live handle from [`invbinom_context_new`].
#[no_mangle]
pub unsafe extern "C" fn invbinom_context_free(ctx: *mut InvbinomContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// `f(n)` as a reduced fraction `"a/b"`.
///
/// # Safety
/// `ctx` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn invbinom_f_exact(ctx: *const InvbinomContext, n: u64, out: *mut *mut c_char) -> InvbinomStatus {
    guard(|| {
        let q = context(ctx)?.exact(n)?;
        write(out, owned(q.to_string())?)
    })
}

/// `ν_p(f(n))`.
///
/// # Safety
/// `ctx` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn invbinom_f_valuation(ctx: *const InvbinomContext, n: u64, p: u64, out: *mut i64) -> InvbinomStatus {
    guard(|| {
        let v = context(ctx)?.valuation(n, p)?;
        write(out, v)
    })
}

/// `f(n) mod p^digits` in decimal; `InvalidArgument` when `ν_p(f(n)) < 0`.
///
/// # Safety
/// `ctx` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn invbinom_f_residue(
    ctx: *const InvbinomContext,
    n: u64,
    p: u64,
    digits: u32,
    out: *mut *mut c_char,
) -> InvbinomStatus {
    guard(|| {
        let r = context(ctx)?.residue(n, p, digits)?.ok_or(Error::NotPadicInteger)?;
        write(out, owned(r.to_string())?)
    })
}

/// `ν_p(f(m) − f(n))`. `is_lower_bound` is set when precision ran out before
/// the valuation was pinned down; `is_infinite` when the values coincide.
///
/// # Safety
/// `ctx` must be a live handle; all out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn invbinom_f_diff_valuation(
    ctx: *const InvbinomContext,
    m: u64,
    n: u64,
    p: u64,
    out: *mut i64,
    is_lower_bound: *mut bool,
    is_infinite: *mut bool,
) -> InvbinomStatus {
    guard(|| {
        let (v, lower, inf) = match context(ctx)?.diff(m, n, p)? {
            None => (0, false, true),
            Some(DiffValuation::Exact(v)) => (v, false, false),
            Some(DiffValuation::AtLeast(v)) => (v, true, false),
        };
        write(out, v)?;
        write(is_lower_bound, lower)?;
        write(is_infinite, inf)
    })
}

fn run_suite(ctx: &FContext, suite: &str) -> Result<Vec<VerificationReport>, Fail> {
    let mut rows = Vec::new();
    let all = suite == "all";
    if !all && !["prop1.1", "thm1.2", "sec2", "sec3", "sec4", "sec5"].contains(&suite) {
        return Err(invalid(format!("unknown suite {suite:?}")));
    }
    if all || suite == "prop1.1" {
        rows.extend(verify_prop_1_1(ctx, 2000)?);
    }
    if all || suite == "thm1.2" {
        rows.extend(verify_thm_1_2(ctx, 2, 6, &(1..=12).collect::<Vec<_>>())?);
        for p in [3, 5, 7, 11, 13] {
            rows.extend(verify_thm_1_2(ctx, p, 4, &(1..=4).collect::<Vec<_>>())?);
        }
    }
    if all || suite == "sec2" {
        rows.extend(verify_section2(ctx, &Section2Params::default())?);
    }
    if all || suite == "sec3" {
        rows.extend(verify_section3(ctx, &Section3Params::default())?);
    }
    if all || suite == "sec4" {
        rows.extend(verify_section4(ctx, &Section4Params::default())?);
    }
    if all || suite == "sec5" {
        rows.extend(verify_section5(ctx, &Section5Params::default())?);
    }
    Ok(rows)
}

/// Runs a verifier suite (`prop1.1`, `thm1.2`, `sec2` … `sec5`, `all`) with
/// default parameters. Rows are written as a JSON array; `failures` counts
/// asserted rows that did not hold.
///
/// # Safety
/// `ctx` must be a live handle, `suite` a NUL-terminated string, and the
/// out-pointers writable. `json_out` may be null to skip the rows.
#[no_mangle]
pub unsafe extern "C" fn invbinom_verify(
    ctx: *const InvbinomContext,
    suite: *const c_char,
    json_out: *mut *mut c_char,
    failures: *mut u64,
) -> InvbinomStatus {
    guard(|| {
        let rows = run_suite(context(ctx)?, text(suite)?)?;
        if !json_out.is_null() {
            let json = serde_json::to_string(&rows).map_err(|e| Fail::Status(InvbinomStatus::Internal, e.to_string()))?;
            json_out.write(owned(json)?);
        }
        write(failures, tally(&rows).fail as u64)
    })
}

unsafe fn scan_into(out: *mut *mut InvbinomScan, run: impl FnOnce() -> invbinom::Result<invbinom::scan::ScanReport>) -> InvbinomStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let r = run()?;
        write(out, Box::into_raw(Box::new(InvbinomScan { exceptions: r.exceptions, checked: r.checked_count })))
    })
}

/// Odd primes `p` in `[lo, hi)` with some `n ≤ p − 2` and `ν_p(f(n)) > 0`,
/// resolved to `depth` digits.
///
/// # Safety
/// `out` must be writable; release the result with [`invbinom_scan_free`].
#[no_mangle]
pub unsafe extern "C" fn invbinom_scan_good_primes(lo: u64, hi: u64, depth: u32, out: *mut *mut InvbinomScan) -> InvbinomStatus {
    scan_into(out, || scan_good_primes(lo, hi, &ScanOptions { depth, ..ScanOptions::default() }))
}

/// Primes `p` in `[lo, hi)` with `2^{p−1} ≡ 1 (mod p²)`.
///
/// # Safety
/// `out` must be writable; release the result with [`invbinom_scan_free`].
#[no_mangle]
pub unsafe extern "C" fn invbinom_scan_wieferich(lo: u64, hi: u64, out: *mut *mut InvbinomScan) -> InvbinomStatus {
    scan_into(out, || scan_wieferich(lo, hi, &ScanOptions::default()))
}

/// # Safety
/// `scan` must be null or a live scan handle.
#[no_mangle]
pub unsafe extern "C" fn invbinom_scan_len(scan: *const InvbinomScan) -> usize {
    scan.as_ref().map_or(0, |s| s.exceptions.len())
}

/// Number of primes examined.
///
/// # Safety
/// `scan` must be null or a live scan handle.
#[no_mangle]
pub unsafe extern "C" fn invbinom_scan_checked(scan: *const InvbinomScan) -> u64 {
    scan.as_ref().map_or(0, |s| s.checked)
}

/// # Safety
/// `scan` must be a live scan handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn invbinom_scan_get(scan: *const InvbinomScan, index: usize, out: *mut InvbinomScanRow) -> InvbinomStatus {
    guard(|| {
        let s = scan.as_ref().ok_or_else(null)?;
        let e = s.exceptions.get(index).ok_or_else(|| invalid(format!("index {index} out of range")))?;
        write(out, InvbinomScanRow { p: e.p, n: e.n.unwrap_or(0), nu: e.nu.unwrap_or(0), censored: e.censored })
    })
}

/// # Safety
/// `scan` must be null or a live scan handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn invbinom_scan_free(scan: *mut InvbinomScan) {
    if !scan.is_null() {
        drop(Box::from_raw(scan));
    }
}

/// Definability report for a p-adic integer description (`rational:-1`,
/// `digits:1,2/0,1`, `sparse2:1,4,21`) up to `depth`. The report is written as JSON.
///
/// # Safety
/// `ctx` must be a live handle, `spec` a NUL-terminated string, and the
/// out-pointers writable. `json_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn invbinom_definable(
    ctx: *const InvbinomContext,
    spec: *const c_char,
    p: u64,
    depth: u64,
    verdict: *mut InvbinomVerdict,
    json_out: *mut *mut c_char,
) -> InvbinomStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let spec = PadicIntegerSpec::parse(text(spec)?, p)?;
        let report = analyze_definability(ctx, &spec, depth)?;
        if !json_out.is_null() {
            let json = serde_json::to_string(&report).map_err(|e| Fail::Status(InvbinomStatus::Internal, e.to_string()))?;
            json_out.write(owned(json)?);
        }
        let v = match report.verdict {
            Verdict::CauchyEvidence => InvbinomVerdict::CauchyEvidence,
            Verdict::DivergenceEvidence => InvbinomVerdict::DivergenceEvidence,
            Verdict::Inconclusive => InvbinomVerdict::Inconclusive,
        };
        write(verdict, v)
    })
}

/// Smallest `m` in the witness family with `ν_2(m − n) = eps_exp` and
/// `ν_2(f(m) − f(n)) ≤ −1`; `image_exp` receives that valuation.
///
/// # Safety
/// `ctx` must be a live handle and the out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn invbinom_witness(
    ctx: *const InvbinomContext,
    n: u64,
    eps_exp: u32,
    m: *mut u64,
    image_exp: *mut i64,
) -> InvbinomStatus {
    guard(|| {
        let w = find_discontinuity_witness(context(ctx)?, n, eps_exp, None)?;
        write(m, w.m)?;
        write(image_exp, w.image_exp)
    })
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn invbinom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
