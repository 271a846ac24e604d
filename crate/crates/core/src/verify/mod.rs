//! Parameter sweeps that recompute both sides of each valuation formula
//! and congruence, emitting one [`VerificationReport`] per check.
//!
//! Values of `f` come from an [`FContext`], which evaluates every request
//! along at least two independent engines when both are within their caps
//! and fails hard (not as a report row) when they disagree.

mod context;
pub mod prop11;
pub mod sec2;
pub mod sec3;
pub mod sec4;
pub mod sec5;
pub mod thm12;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub(crate) use context::same_digits;
pub use context::FContext;
pub use prop11::verify_prop_1_1;
pub use sec2::{verify_section2, wieferich_constant, wieferich_constant_grouped, Section2Params};
pub use sec3::{verify_section3, Section3Params};
pub use sec4::{verify_section4, Section4Params};
pub use sec5::{verify_section5, Section5Params};
pub use thm12::verify_thm_1_2;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::binomial::UnitFactorials;
use crate::error::{Error, Result};
use crate::modarith::inv_mod;
use crate::padic::{valuation_rational, DiffValuation, PadicValue, Rational};

/// What a check asserts or what it measured.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Claim {
    /// An exact p-adic valuation.
    Valuation(i64),
    /// A valuation lower bound (a congruence `≡ 0 mod p^m` is `AtLeast(m)`).
    AtLeast(i64),
    AtMost(i64),
    Residue {
        value: String,
        modulus: String,
    },
    Count(u64),
    Flag(bool),
    /// The quantity is exactly zero, so its valuation is `+∞`.
    Infinite,
}

impl Claim {
    /// Whether `measured` meets this expectation. Equality claims compare
    /// exactly; bounds accept any measured value (or bound) inside them.
    pub fn accepts(&self, measured: &Claim) -> bool {
        use Claim::*;
        match (self, measured) {
            (AtLeast(b), Valuation(v)) | (AtLeast(b), AtLeast(v)) => v >= b,
            (AtLeast(_), Infinite) => true,
            (AtMost(b), Valuation(v)) => v <= b,
            (expected, measured) => expected == measured,
        }
    }

    pub fn from_diff(d: DiffValuation) -> Claim {
        match d {
            DiffValuation::Exact(v) => Claim::Valuation(v),
            DiffValuation::AtLeast(v) => Claim::AtLeast(v),
        }
    }

    pub fn residue(value: impl ToString, modulus: impl ToString) -> Claim {
        Claim::Residue { value: value.to_string(), modulus: modulus.to_string() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Parameters outside the hypothesis, or beyond a cap.
    Skipped,
    /// Exploratory row; never counted as a failure.
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub params: BTreeMap<String, i64>,
    pub expected: Claim,
    pub measured: Claim,
    pub pass: bool,
    pub status: Status,
    pub notes: String,
}

pub type Params = BTreeMap<String, i64>;

/// `params!{"p" => 2, "e" => 5}`
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = $crate::verify::Params::new();
        $( m.insert($k.to_string(), ($v) as i64); )*
        m
    }};
}

impl VerificationReport {
    pub fn check(check_id: &str, params: Params, expected: Claim, measured: Claim) -> Self {
        let pass = expected.accepts(&measured);
        VerificationReport {
            check_id: check_id.to_string(),
            params,
            expected,
            measured,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            notes: String::new(),
        }
    }

    /// Recorded outcome that is never a failure.
    pub fn info(check_id: &str, params: Params, expected: Claim, measured: Claim) -> Self {
        let mut r = Self::check(check_id, params, expected, measured);
        r.status = Status::Info;
        r
    }

    pub fn skipped(check_id: &str, params: Params, notes: impl Into<String>) -> Self {
        VerificationReport {
            check_id: check_id.to_string(),
            params,
            expected: Claim::Flag(true),
            measured: Claim::Flag(false),
            pass: false,
            status: Status::Skipped,
            notes: notes.into(),
        }
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn is_failure(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub info: usize,
}

pub fn tally(rows: &[VerificationReport]) -> Tally {
    rows.iter().fold(Tally::default(), |mut t, r| {
        match r.status {
            Status::Pass => t.pass += 1,
            Status::Fail => t.fail += 1,
            Status::Skipped => t.skip += 1,
            Status::Info => t.info += 1,
        }
        t
    })
}

/// Collapses a sweep into one count row; failing members are kept as their own rows.
pub fn summarize(check_id: &str, params: Params, rows: Vec<VerificationReport>) -> Vec<VerificationReport> {
    let total = rows.len() as u64;
    let failures: Vec<VerificationReport> = rows.into_iter().filter(|r| r.is_failure()).collect();
    let mut out = vec![VerificationReport::check(check_id, params, Claim::Count(total), Claim::Count(total - failures.len() as u64))
        .with_notes(format!("{total} cases; count of cases meeting the claim"))];
    out.extend(failures);
    out
}

/// `ν_p(a − b)` as a claim: exact, a lower bound on exhausted precision, or `Infinite`.
pub(crate) fn diff_claim(a: &PadicValue, b: &PadicValue) -> Result<Claim> {
    match a.sub_bound(b) {
        Ok(d) => Ok(Claim::from_diff(d)),
        Err(Error::ExactZero) => Ok(Claim::Infinite),
        Err(e) => Err(e),
    }
}

/// `ν_p(q)` as a claim, `Infinite` for zero.
pub(crate) fn rational_claim(q: &Rational, p: u64) -> Result<Claim> {
    if q.is_zero() {
        return Ok(Claim::Infinite);
    }
    Ok(Claim::Valuation(valuation_rational(q, p)?))
}

/// The smaller of two valuation claims; ties prefer the exact one.
pub(crate) fn min_claim(a: Claim, b: Claim) -> Claim {
    fn key(c: &Claim) -> (i64, u8) {
        match c {
            Claim::Valuation(v) => (*v, 0),
            Claim::AtLeast(v) => (*v, 1),
            _ => (i64::MAX, 2),
        }
    }
    if key(&b) < key(&a) {
        b
    } else {
        a
    }
}

/// `C(n,k)^{-1}` with the table's relative precision.
pub(crate) fn inv_binomial_padic(table: &UnitFactorials, n: u64, k: u64) -> Result<PadicValue> {
    let (nu, unit) = table.binomial(n, k)?;
    let inv = inv_mod(unit, table.modulus()).expect("binomial units are invertible");
    PadicValue::new(table.prime(), -(nu as i64), BigUint::from(inv), table.digits())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claims_accept_by_kind() {
        assert!(Claim::Valuation(-2).accepts(&Claim::Valuation(-2)));
        assert!(!Claim::Valuation(-2).accepts(&Claim::Valuation(-1)));
        assert!(Claim::AtLeast(3).accepts(&Claim::Valuation(8)));
        assert!(Claim::AtLeast(3).accepts(&Claim::AtLeast(5)));
        assert!(!Claim::AtLeast(3).accepts(&Claim::AtLeast(2)));
        assert!(Claim::AtLeast(3).accepts(&Claim::Infinite));
        assert!(Claim::AtMost(0).accepts(&Claim::Valuation(-4)));
        assert!(!Claim::Valuation(0).accepts(&Claim::Infinite));
        assert!(Claim::residue(2, 3).accepts(&Claim::residue(2, 3)));
    }

    #[test]
    fn report_serde_and_tally() {
        let rows = vec![
            VerificationReport::check("a", params! {"n" => 14}, Claim::Valuation(-3), Claim::Valuation(-3)),
            VerificationReport::check("a", params! {"n" => 30}, Claim::Valuation(-4), Claim::Valuation(-3)),
            VerificationReport::skipped("b", params! {}, "outside hypothesis"),
            VerificationReport::info("c", params! {"e" => 3}, Claim::Valuation(7), Claim::Valuation(8)),
        ];
        let t = tally(&rows);
        assert_eq!((t.pass, t.fail, t.skip, t.info), (1, 1, 1, 1));
        let json = serde_json::to_string(&rows).unwrap();
        let back: Vec<VerificationReport> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rows);
        let s = summarize("sum", params! {}, rows);
        assert_eq!(s[0].measured, Claim::Count(3));
        assert_eq!(s.len(), 2);
    }
}
