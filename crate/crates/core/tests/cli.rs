//! Round trips through the installed binary.

use std::process::{Command, Output};

use invbinom::definability::{DefinabilityReport, Verdict};
use invbinom::scan::{scan_good_primes, scan_wieferich, ScanOptions, ScanReport};
use invbinom::verify::{Status, VerificationReport};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invbinom")).arg("--quiet").args(args).output().expect("spawn invbinom")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn fval_reports_nu_23_of_f_12() {
    let (code, v) = json(&["fval", "12", "-p", "23"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "fval");
    assert_eq!(v["rows"][0]["valuation"], 2);
    assert_eq!(v["rows"][0]["exact"], "15341/6930");
    assert_eq!(v["config"]["seed"], 0);
}

#[test]
fn scan_reports_round_trip() {
    let (code, v) = json(&["scan-wieferich", "--lo", "2", "--hi", "1000000"]);
    assert_eq!(code, 0);
    let report: ScanReport = serde_json::from_value(v["rows"][0].clone()).unwrap();
    assert_eq!(report, scan_wieferich(2, 1_000_000, &ScanOptions::default()).unwrap());
    assert_eq!(report.exceptions.iter().map(|e| e.p).collect::<Vec<_>>(), [1093, 3511]);

    let (code, v) = json(&["scan-good", "--hi", "100"]);
    assert_eq!(code, 0);
    let report: ScanReport = serde_json::from_value(v["rows"][0].clone()).unwrap();
    assert_eq!(report, scan_good_primes(3, 100, &ScanOptions::default()).unwrap());
}

#[test]
fn verify_rows_round_trip() {
    let (code, v) = json(&["verify", "thm1.2", "--prime", "2", "--kmax", "6", "--emax", "12"]);
    assert_eq!(code, 0);
    let rows: Vec<VerificationReport> = serde_json::from_value(v["rows"].clone()).unwrap();
    let pass = rows.iter().filter(|r| r.status == Status::Pass).count();
    assert_eq!(v["pass_count"].as_u64().unwrap() as usize, pass);
    assert_eq!(v["fail_count"], 0);
    assert!(pass > 0);
}

#[test]
fn failing_checks_exit_1() {
    // ν_2(f(2^e+i) − f(i)) ≥ e − i − 1 fails at e = 1, 2.
    let (code, v) = json(&["verify", "sec4", "--emax", "3"]);
    assert_eq!(code, 1);
    assert_eq!(v["fail_count"], 3);
}

#[test]
fn definable_round_trip() {
    let (code, v) = json(&["definable", "--spec", "rational:-3", "-p", "3", "--depth", "6"]);
    assert_eq!(code, 0);
    let report: DefinabilityReport = serde_json::from_value(v["rows"][0].clone()).unwrap();
    assert_eq!(report.verdict, Verdict::DivergenceEvidence);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let a = run(&["--threads", "1", "verify", "sec5"]);
    let b = run(&["--threads", "4", "verify", "sec5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["--threads", "1", "--format", "csv", "scan-good", "--hi", "2000"]);
    let b = run(&["--threads", "3", "--format", "csv", "scan-good", "--hi", "2000"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_has_header_and_rows() {
    let out = run(&["--format", "csv", "witness", "--n", "6", "--eps-exp", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), row.len());
    let m = header.iter().position(|h| *h == "m").unwrap();
    assert_eq!(row[m], "14");
}

#[test]
fn usage_and_cap_exit_codes() {
    assert_eq!(run(&["fval"]).status.code(), Some(2));
    assert_eq!(run(&["fval", "10", "-p", "9"]).status.code(), Some(2));
    assert_eq!(run(&["definable", "--spec", "nonsense", "-p", "3"]).status.code(), Some(2));
    let out = run(&["scan-good", "--hi", "2000000"]);
    assert_eq!(out.status.code(), Some(3));
    let capped = Command::new(env!("CARGO_BIN_EXE_invbinom"))
        .args(["--quiet", "scan-wieferich", "--hi", "5000"])
        .env("INVBINOM_SCAN_CEILING", "1000")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn checkpointed_scan_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("good.ckpt");
    let path = path.to_str().unwrap();
    let (code, first) = json(&["scan-good", "--hi", "3000", "--chunk", "500", "--checkpoint", path]);
    assert_eq!(code, 0);
    let (code, second) = json(&["scan-good", "--hi", "3000", "--chunk", "500", "--checkpoint", path]);
    assert_eq!(code, 0);
    assert_eq!(first["rows"][0]["exceptions"], second["rows"][0]["exceptions"]);
    assert!(second["rows"][0]["resumed_ranges"].as_u64().unwrap() > 0);
}
