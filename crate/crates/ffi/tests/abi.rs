use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use invbinom_ffi::*;

fn context() -> *mut InvbinomContext {
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { invbinom_context_new(ptr::null(), &mut ctx) }, InvbinomStatus::Ok);
    ctx
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    invbinom_string_free(s);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(invbinom_last_error()) }.to_str().unwrap().to_owned()
}

#[test]
fn values_and_valuations() {
    let ctx = context();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(invbinom_f_exact(ctx, 12, &mut s), InvbinomStatus::Ok);
        assert_eq!(take(s), "15341/6930");
        let mut v = 0i64;
        assert_eq!(invbinom_f_valuation(ctx, 12, 23, &mut v), InvbinomStatus::Ok);
        assert_eq!(v, 2);
        assert_eq!(invbinom_f_valuation(ctx, 7, 2, &mut v), InvbinomStatus::Ok);
        assert_eq!(v, 8);
        assert_eq!(invbinom_f_residue(ctx, 12, 13, 3, &mut s), InvbinomStatus::Ok);
        assert_eq!(take(s), "1821");
        // 256/105 is not 5-integral.
        assert_eq!(invbinom_f_residue(ctx, 7, 5, 3, &mut s), InvbinomStatus::InvalidArgument);
        let (mut lower, mut inf) = (true, true);
        assert_eq!(invbinom_f_diff_valuation(ctx, 8, 0, 2, &mut v, &mut lower, &mut inf), InvbinomStatus::Ok);
        assert_eq!((lower, inf), (false, false));
        assert_eq!(invbinom_f_diff_valuation(ctx, 5, 5, 2, &mut v, &mut lower, &mut inf), InvbinomStatus::Ok);
        assert!(inf);
        invbinom_context_free(ctx);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let ctx = context();
    unsafe {
        let mut v = 0i64;
        assert_eq!(invbinom_f_valuation(ctx, 5, 9, &mut v), InvbinomStatus::NotPrime);
        assert!(last_error().contains("9 is not prime"));
        assert_eq!(invbinom_f_valuation(ctx, 5, 3, ptr::null_mut()), InvbinomStatus::NullPointer);
        assert_eq!(invbinom_f_valuation(ptr::null(), 5, 3, &mut v), InvbinomStatus::NullPointer);
        let mut s = ptr::null_mut();
        assert_eq!(invbinom_f_exact(ctx, 1 << 20, &mut s), InvbinomStatus::CapExceeded);
        assert_eq!(invbinom_f_valuation(ctx, 5, 3, &mut v), InvbinomStatus::Ok);
        assert_eq!(last_error(), "");
        let suite = CString::new("sec9").unwrap();
        let mut fails = 0u64;
        assert_eq!(invbinom_verify(ctx, suite.as_ptr(), ptr::null_mut(), &mut fails), InvbinomStatus::InvalidArgument);
        invbinom_context_free(ctx);
    }
}

#[test]
fn caps_from_config() {
    let cfg = InvbinomConfig { exact_cap: 100, modular_cap: 0, precision: 0 };
    let mut ctx = ptr::null_mut();
    unsafe {
        assert_eq!(invbinom_context_new(&cfg, &mut ctx), InvbinomStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(invbinom_f_exact(ctx, 101, &mut s), InvbinomStatus::CapExceeded);
        invbinom_context_free(ctx);
    }
}

#[test]
fn scans() {
    unsafe {
        let mut scan = ptr::null_mut();
        assert_eq!(invbinom_scan_good_primes(3, 1000, 3, &mut scan), InvbinomStatus::Ok);
        assert_eq!(invbinom_scan_len(scan), 1);
        let mut row = InvbinomScanRow::default();
        assert_eq!(invbinom_scan_get(scan, 0, &mut row), InvbinomStatus::Ok);
        assert_eq!((row.p, row.n, row.nu, row.censored), (23, 12, 2, false));
        assert_eq!(invbinom_scan_get(scan, 1, &mut row), InvbinomStatus::InvalidArgument);
        assert_eq!(invbinom_scan_checked(scan), 167);
        invbinom_scan_free(scan);

        assert_eq!(invbinom_scan_wieferich(2, 10_000, &mut scan), InvbinomStatus::Ok);
        let ps: Vec<u64> = (0..invbinom_scan_len(scan))
            .map(|i| {
                invbinom_scan_get(scan, i, &mut row);
                row.p
            })
            .collect();
        assert_eq!(ps, [1093, 3511]);
        invbinom_scan_free(scan);

        assert_eq!(invbinom_scan_good_primes(3, u64::MAX, 3, &mut scan), InvbinomStatus::CapExceeded);
    }
}

#[test]
fn verify_and_definability() {
    let ctx = context();
    unsafe {
        let suite = CString::new("sec5").unwrap();
        let (mut json, mut fails) = (ptr::null_mut(), u64::MAX);
        assert_eq!(invbinom_verify(ctx, suite.as_ptr(), &mut json, &mut fails), InvbinomStatus::Ok);
        assert_eq!(fails, 0);
        let rows: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert!(rows.as_array().unwrap().iter().any(|r| r["check_id"] == "sec5.lemma5.2"));

        let spec = CString::new("rational:-3").unwrap();
        let mut verdict = InvbinomVerdict::Inconclusive;
        assert_eq!(invbinom_definable(ctx, spec.as_ptr(), 3, 6, &mut verdict, ptr::null_mut()), InvbinomStatus::Ok);
        assert_eq!(verdict, InvbinomVerdict::DivergenceEvidence);
        let spec = CString::new("rational:-1").unwrap();
        assert_eq!(invbinom_definable(ctx, spec.as_ptr(), 2, 8, &mut verdict, &mut json), InvbinomStatus::Ok);
        assert_eq!(verdict, InvbinomVerdict::CauchyEvidence);
        let report: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(report["verdict"], "cauchy-evidence");

        let (mut m, mut image) = (0u64, 0i64);
        assert_eq!(invbinom_witness(ctx, 6, 3, &mut m, &mut image), InvbinomStatus::Ok);
        assert_eq!(m, 14);
        assert!(image <= -1);
        invbinom_context_free(ctx);
    }
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_client_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libinvbinom_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library at {} or no C compiler", lib.display());
        return;
    }
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let bin = tmp.join("invbinom_c_client");
    let status = Command::new("cc")
        .arg(manifest.join("tests/client.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "f(12) = 15341/6930\nnu_23 = 2\nwieferich 1093 3511\nnot prime: 9 is not prime\n");
}
