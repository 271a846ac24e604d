//! Prime scans for the good-prime condition (`ν_p(f(n)) ≤ 1` for all
//! `1 ≤ n ≤ p−2`) and the Wieferich condition (`2^{p−1} ≡ 1 mod p²`).
//!
//! Ranges are processed in sub-ranges; each finished sub-range can be
//! appended to a [`Checkpoint`] and a later scan over the same file resumes
//! after the longest committed prefix.

mod checkpoint;
pub mod good;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checkpoint::{Checkpoint, Committed};

use crate::error::{Error, Result};
use crate::fsum::FTable;
use crate::modarith::pow_mod;
use crate::primes::primes_in;

pub const GOOD_PRIME_CEILING: u64 = 1_000_000;
pub const WIEFERICH_CEILING: u64 = 100_000_000;
/// Largest prime the good-prime oracle check recomputes exactly.
pub const ORACLE_LIMIT: u64 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    GoodPrime,
    Wieferich,
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanKind::GoodPrime => "good_prime",
            ScanKind::Wieferich => "wieferich",
        })
    }
}

impl FromStr for ScanKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "good_prime" => Ok(ScanKind::GoodPrime),
            "wieferich" => Ok(ScanKind::Wieferich),
            _ => Err(Error::InvalidArgument(format!("unknown scan kind {s:?}"))),
        }
    }
}

/// A prime failing the scanned condition. Good-prime rows carry `n` and
/// `ν_p(f(n))`; `censored` means the valuation is only known to be `≥ nu`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanException {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub censored: bool,
}

impl ScanException {
    pub fn prime(p: u64) -> Self {
        ScanException { p, n: None, nu: None, censored: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub kind: ScanKind,
    /// `[lo, hi)`.
    pub range: [u64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    pub exceptions: Vec<ScanException>,
    pub checked_count: u64,
    /// Largest prime scanned.
    pub checkpoint: Option<u64>,
    /// Sub-ranges taken from the checkpoint file instead of recomputed.
    #[serde(default)]
    pub resumed_ranges: u64,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub depth: u32,
    pub oracle_check: bool,
    /// Upper limit on `hi`; `None` uses the kind's default ceiling.
    pub ceiling: Option<u64>,
    /// Sub-range width.
    pub chunk: u64,
    pub checkpoint: Option<PathBuf>,
    /// Per-sub-range progress on standard error.
    pub progress: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { depth: 3, oracle_check: true, ceiling: None, chunk: 1 << 16, checkpoint: None, progress: false }
    }
}

pub fn scan_good_primes(lo: u64, hi: u64, opts: &ScanOptions) -> Result<ScanReport> {
    if opts.depth < 2 {
        return Err(Error::InvalidArgument("depth must be at least 2 to detect nu > 1".into()));
    }
    run(ScanKind::GoodPrime, lo, hi, opts, opts.ceiling.unwrap_or(GOOD_PRIME_CEILING), |primes| {
        let rows = primes.par_iter().filter(|&&p| p > 2).map(|&p| good_prime_exceptions(p, opts)).collect::<Result<Vec<_>>>()?;
        Ok((rows.into_iter().flatten().collect(), primes.iter().filter(|&&p| p > 2).count() as u64))
    })
}

pub fn scan_wieferich(lo: u64, hi: u64, opts: &ScanOptions) -> Result<ScanReport> {
    run(ScanKind::Wieferich, lo, hi, opts, opts.ceiling.unwrap_or(WIEFERICH_CEILING), |primes| {
        let rows: Vec<ScanException> = primes.par_iter().filter(|&&p| is_wieferich(p)).map(|&p| ScanException::prime(p)).collect();
        Ok((rows, primes.len() as u64))
    })
}

/// `2^{p−1} ≡ 1 (mod p²)`.
pub fn is_wieferich(p: u64) -> bool {
    p > 2 && pow_mod(2, p - 1, p * p) == 1
}

fn good_prime_exceptions(p: u64, opts: &ScanOptions) -> Result<Vec<ScanException>> {
    let digits = good::working_digits(p, opts.depth);
    let vals = good::prefix_valuations(p, digits)?;
    if opts.oracle_check && p <= ORACLE_LIMIT {
        good::oracle_check(p, digits, &vals, &mut FTable::new())?;
    }
    Ok(vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 1)
        .map(|(i, &v)| ScanException { p, n: Some(i as u64 + 1), nu: Some(v), censored: v >= digits })
        .collect())
}

fn run(
    kind: ScanKind,
    lo: u64,
    hi: u64,
    opts: &ScanOptions,
    ceiling: u64,
    scan: impl Fn(&[u64]) -> Result<(Vec<ScanException>, u64)>,
) -> Result<ScanReport> {
    if hi > ceiling {
        return Err(Error::ScanCeilingExceeded { hi, ceiling });
    }
    if opts.chunk == 0 {
        return Err(Error::InvalidArgument("chunk width must be positive".into()));
    }
    let depth = (kind == ScanKind::GoodPrime).then_some(opts.depth);
    let checkpoint = opts.checkpoint.as_ref().map(Checkpoint::new);
    let mut report =
        ScanReport { kind, range: [lo, hi], depth, exceptions: Vec::new(), checked_count: 0, checkpoint: None, resumed_ranges: 0 };
    let mut pos = lo;
    if let Some(cp) = &checkpoint {
        let committed: Vec<Committed> = cp.load()?.into_iter().filter(|c| c.kind == kind && c.depth == depth).collect();
        while let Some(c) = committed.iter().find(|c| c.lo == pos && c.hi > pos && c.hi <= hi) {
            let primes = counted(kind, &primes_in(c.lo, c.hi));
            report.checked_count += primes.len() as u64;
            report.checkpoint = primes.last().copied().or(report.checkpoint);
            report.exceptions.extend(c.exceptions.iter().cloned());
            report.resumed_ranges += 1;
            pos = c.hi;
        }
    }
    while pos < hi {
        let end = pos.saturating_add(opts.chunk).min(hi);
        let primes = primes_in(pos, end);
        let (exceptions, count) = scan(&primes)?;
        if let Some(cp) = &checkpoint {
            cp.commit(&Committed { kind, depth, lo: pos, hi: end, exceptions: exceptions.clone() })?;
        }
        report.checked_count += count;
        report.checkpoint = counted(kind, &primes).last().copied().or(report.checkpoint);
        report.exceptions.extend(exceptions);
        if opts.progress {
            eprintln!("{kind} [{pos}, {end}): {count} primes, {} exceptions so far", report.exceptions.len());
        }
        pos = end;
    }
    Ok(report)
}

fn counted(kind: ScanKind, primes: &[u64]) -> Vec<u64> {
    match kind {
        ScanKind::GoodPrime => primes.iter().copied().filter(|&p| p > 2).collect(),
        ScanKind::Wieferich => primes.to_vec(),
    }
}
