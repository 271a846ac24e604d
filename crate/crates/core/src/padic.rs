//! Exact rationals, p-adic valuations and precision-tracked p-adic values.
//!
//! A [`PadicValue`] is either an exact zero or `u * p^v + O(p^(v+N))` with
//! `p ∤ u`. Arithmetic never widens the claimed precision: sums and
//! differences keep the smaller absolute precision, products and quotients
//! keep the smaller relative precision. A cancellation that eats every known
//! digit is an error, never a zero.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub const DEFAULT_PRECISION: u32 = 32;

/// Splits off the largest power of `p` dividing a nonzero `x`.
pub fn split_biguint(x: &BigUint, p: u64) -> (u64, BigUint) {
    debug_assert!(!x.is_zero());
    if p == 2 {
        let tz = x.trailing_zeros().unwrap_or(0);
        return (tz, x >> tz);
    }
    let mut v = 0u64;
    let mut rest = x.clone();
    let pb = BigUint::from(p);
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            return (v, rest);
        }
        rest = q;
        v += 1;
    }
}

pub fn nu_biguint(x: &BigUint, p: u64) -> Option<u64> {
    (!x.is_zero()).then(|| split_biguint(x, p).0)
}

pub fn nu_bigint(x: &BigInt, p: u64) -> Option<u64> {
    nu_biguint(x.magnitude(), p)
}

/// `ν_p(q)` for a nonzero rational.
pub fn valuation_rational(q: &Rational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ExactZero);
    }
    let vn = split_biguint(q.numer().magnitude(), p).0 as i64;
    let vd = split_biguint(q.denom().magnitude(), p).0 as i64;
    Ok(vn - vd)
}

/// `q mod p^m` for a p-integral rational, as a natural number below `p^m`.
pub fn rational_residue(q: &Rational, p: u64, m: u32) -> Result<BigUint> {
    let modulus = BigUint::from(p).pow(m);
    let den = q.denom().magnitude() % &modulus;
    let inv = den.modinv(&modulus).ok_or(Error::NotPadicInteger)?;
    let num = q.numer().mod_floor(&BigInt::from_biguint(Sign::Plus, modulus.clone()));
    Ok((num.magnitude() * inv) % modulus)
}

/// `a ≡ b (mod p^m)` for rationals: `ν_p(a − b) ≥ m`, true when equal.
pub fn congruent(a: &Rational, b: &Rational, p: u64, m: i64) -> bool {
    let d = a - b;
    d.is_zero() || valuation_rational(&d, p).map(|v| v >= m).unwrap_or(true)
}

pub fn rational_from_ints(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Zero,
    Approx { valuation: i64, unit: BigUint, precision: u32 },
}

/// A p-adic number with tracked relative precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicValue {
    prime: u64,
    repr: Repr,
}

/// Result of a certified difference: exact valuation, or only a lower bound
/// when the known digits cancel completely.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DiffValuation {
    Exact(i64),
    AtLeast(i64),
}

impl DiffValuation {
    pub fn exact(self) -> Option<i64> {
        match self {
            DiffValuation::Exact(v) => Some(v),
            DiffValuation::AtLeast(_) => None,
        }
    }

    /// Whether the valuation is certainly at least `m`.
    pub fn is_at_least(self, m: i64) -> bool {
        match self {
            DiffValuation::Exact(v) | DiffValuation::AtLeast(v) => v >= m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn padic_arith(a: &PadicValue, b: &PadicValue, op: ArithOp) -> Result<PadicValue> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b),
    }
}

fn pow_big(p: u64, n: u32) -> BigUint {
    BigUint::from(p).pow(n)
}

impl PadicValue {
    pub fn zero(prime: u64) -> Self {
        PadicValue { prime, repr: Repr::Zero }
    }

    /// `unit * p^valuation + O(p^(valuation + precision))`.
    pub fn new(prime: u64, valuation: i64, unit: BigUint, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::InvalidArgument("relative precision must be at least 1".into()));
        }
        let unit = unit % pow_big(prime, precision);
        if (&unit % prime).is_zero() {
            return Err(Error::InvalidArgument(format!("unit {unit} is divisible by {prime}")));
        }
        Ok(PadicValue { prime, repr: Repr::Approx { valuation, unit, precision } })
    }

    pub fn from_rational(q: &Rational, prime: u64, precision: u32) -> Result<Self> {
        if q.is_zero() {
            return Ok(Self::zero(prime));
        }
        let (vn, un) = split_biguint(q.numer().magnitude(), prime);
        let (vd, ud) = split_biguint(q.denom().magnitude(), prime);
        let modulus = pow_big(prime, precision);
        let inv = (ud % &modulus).modinv(&modulus).ok_or(Error::DivisionByZero)?;
        let mut unit = (un * inv) % &modulus;
        if q.is_negative() {
            unit = &modulus - unit;
        }
        Self::new(prime, vn as i64 - vd as i64, unit, precision)
    }

    pub fn from_u64(x: u64, prime: u64, precision: u32) -> Result<Self> {
        Self::from_rational(&Rational::from_integer(BigInt::from(x)), prime, precision)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn valuation(&self) -> Result<i64> {
        match &self.repr {
            Repr::Zero => Err(Error::ExactZero),
            Repr::Approx { valuation, .. } => Ok(*valuation),
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Approx { unit, .. } => Some(unit),
        }
    }

    /// Relative precision `N`; `None` for exact zero.
    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Approx { precision, .. } => Some(*precision),
        }
    }

    /// `v + N`: the value is known modulo `p^(v+N)`.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Approx { valuation, precision, .. } => Some(valuation + *precision as i64),
        }
    }

    /// Unit digits, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        let Repr::Approx { unit, precision, .. } = &self.repr else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(*precision as usize);
        let mut rest = unit.clone();
        for _ in 0..*precision {
            let (q, r) = rest.div_rem(&BigUint::from(self.prime));
            out.push(r.to_u64().unwrap_or(0));
            rest = q;
        }
        out
    }

    /// Drops relative precision to `n` digits (never raises it).
    pub fn truncate(&self, n: u32) -> PadicValue {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Approx { valuation, unit, precision } => {
                let n = n.clamp(1, *precision);
                PadicValue {
                    prime: self.prime,
                    repr: Repr::Approx { valuation: *valuation, unit: unit % pow_big(self.prime, n), precision: n },
                }
            }
        }
    }

    /// The value modulo `p^m` for a p-integral value known to that depth.
    pub fn residue(&self, m: u32) -> Option<BigUint> {
        match &self.repr {
            Repr::Zero => Some(BigUint::zero()),
            Repr::Approx { valuation, unit, precision } => {
                if *valuation < 0 || valuation + (*precision as i64) < (m as i64) {
                    return None;
                }
                let modulus = pow_big(self.prime, m);
                if *valuation >= m as i64 {
                    return Some(BigUint::zero());
                }
                Some((unit * pow_big(self.prime, *valuation as u32)) % modulus)
            }
        }
    }

    fn check_prime(&self, other: &PadicValue) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    pub fn neg(&self) -> PadicValue {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Approx { valuation, unit, precision } => PadicValue {
                prime: self.prime,
                repr: Repr::Approx { valuation: *valuation, unit: pow_big(self.prime, *precision) - unit, precision: *precision },
            },
        }
    }

    pub fn add(&self, other: &PadicValue) -> Result<PadicValue> {
        self.check_prime(other)?;
        let (Repr::Approx { valuation: va, unit: ua, precision: na }, Repr::Approx { valuation: vb, unit: ub, precision: nb }) =
            (&self.repr, &other.repr)
        else {
            return Ok(if self.is_zero() { other.clone() } else { self.clone() });
        };
        // Order so that the first operand has the smaller valuation.
        let ((va, ua, na), (vb, ub, nb)) = if va <= vb { ((*va, ua, *na), (*vb, ub, *nb)) } else { ((*vb, ub, *nb), (*va, ua, *na)) };
        let d = (vb - va) as u64;
        let n = (na as u64).min(nb as u64 + d) as u32;
        let modulus = pow_big(self.prime, n);
        let shifted = if d >= n as u64 { BigUint::zero() } else { ub * pow_big(self.prime, d as u32) };
        let s = (ua + shifted) % &modulus;
        if s.is_zero() {
            return Err(Error::PrecisionExhausted);
        }
        let (t, unit) = split_biguint(&s, self.prime);
        Ok(PadicValue { prime: self.prime, repr: Repr::Approx { valuation: va + t as i64, unit, precision: n - t as u32 } })
    }

    pub fn sub(&self, other: &PadicValue) -> Result<PadicValue> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicValue) -> Result<PadicValue> {
        self.check_prime(other)?;
        match (&self.repr, &other.repr) {
            (Repr::Approx { valuation: va, unit: ua, precision: na }, Repr::Approx { valuation: vb, unit: ub, precision: nb }) => {
                let n = (*na).min(*nb);
                let unit = (ua * ub) % pow_big(self.prime, n);
                Ok(PadicValue { prime: self.prime, repr: Repr::Approx { valuation: va + vb, unit, precision: n } })
            }
            _ => Ok(Self::zero(self.prime)),
        }
    }

    pub fn div(&self, other: &PadicValue) -> Result<PadicValue> {
        self.check_prime(other)?;
        match (&self.repr, &other.repr) {
            (_, Repr::Zero) => Err(Error::DivisionByZero),
            (Repr::Zero, _) => Ok(self.clone()),
            (Repr::Approx { valuation: va, unit: ua, precision: na }, Repr::Approx { valuation: vb, unit: ub, precision: nb }) => {
                let n = (*na).min(*nb);
                let modulus = pow_big(self.prime, n);
                let inv = (ub % &modulus).modinv(&modulus).ok_or(Error::DivisionByZero)?;
                let unit = (ua * inv) % modulus;
                Ok(PadicValue { prime: self.prime, repr: Repr::Approx { valuation: va - vb, unit, precision: n } })
            }
        }
    }

    /// `ν_p(self − other)`, degrading to a lower bound on full cancellation.
    pub fn sub_bound(&self, other: &PadicValue) -> Result<DiffValuation> {
        match self.sub(other) {
            Ok(d) if d.is_zero() => Err(Error::ExactZero),
            Ok(d) => Ok(DiffValuation::Exact(d.valuation()?)),
            Err(Error::PrecisionExhausted) => {
                let floor = [self.abs_precision(), other.abs_precision()].into_iter().flatten().min();
                Ok(DiffValuation::AtLeast(floor.ok_or(Error::PrecisionExhausted)?))
            }
            Err(e) => Err(e),
        }
    }

    /// Whether this value agrees with the rational `q` on every claimed digit.
    pub fn agrees_with(&self, q: &Rational) -> bool {
        match &self.repr {
            Repr::Zero => q.is_zero(),
            Repr::Approx { precision, .. } => match Self::from_rational(q, self.prime, *precision) {
                Ok(e) => e == *self,
                Err(_) => false,
            },
        }
    }
}

impl fmt::Display for PadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Approx { valuation, unit, precision } => {
                write!(f, "{unit}*{}^{valuation} + O({}^{})", self.prime, self.prime, valuation + *precision as i64)
            }
        }
    }
}

/// Serialized form: `{prime, kind, valuation, unit, precision}` with the unit as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicRecord {
    pub prime: u64,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub valuation: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub precision: Option<u32>,
}

impl From<&PadicValue> for PadicRecord {
    fn from(v: &PadicValue) -> Self {
        match &v.repr {
            Repr::Zero => PadicRecord { prime: v.prime, kind: "exact_zero".into(), valuation: None, unit: None, precision: None },
            Repr::Approx { valuation, unit, precision } => PadicRecord {
                prime: v.prime,
                kind: "approx".into(),
                valuation: Some(*valuation),
                unit: Some(unit.to_string()),
                precision: Some(*precision),
            },
        }
    }
}

impl TryFrom<PadicRecord> for PadicValue {
    type Error = Error;

    fn try_from(r: PadicRecord) -> Result<Self> {
        match r.kind.as_str() {
            "exact_zero" => Ok(PadicValue::zero(r.prime)),
            "approx" => {
                let missing = || Error::InvalidArgument("approx record needs valuation, unit and precision".into());
                let unit: BigUint = r.unit.ok_or_else(missing)?.parse().map_err(|_| missing())?;
                PadicValue::new(r.prime, r.valuation.ok_or_else(missing)?, unit, r.precision.ok_or_else(missing)?)
            }
            other => Err(Error::InvalidArgument(format!("unknown p-adic kind {other:?}"))),
        }
    }
}

impl Serialize for PadicValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PadicRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PadicRecord::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

/// First `count` base-p digits of a p-integral rational.
pub fn digits_of_rational(q: &Rational, p: u64, count: usize) -> Result<Vec<u64>> {
    let pb = BigInt::from(p);
    if (q.denom() % &pb).is_zero() {
        return Err(Error::NotPadicInteger);
    }
    let mut out = Vec::with_capacity(count);
    let mut cur = q.clone();
    for _ in 0..count {
        // ε = num · den^{-1} mod p, normalised into 0..p.
        let num = cur.numer().mod_floor(&pb).to_u64().unwrap_or(0);
        let den = cur.denom().mod_floor(&pb).to_u64().unwrap_or(1);
        let eps = crate::modarith::mul_mod(num, crate::modarith::inv_mod(den, p).ok_or(Error::NotPadicInteger)?, p);
        out.push(eps);
        cur = (cur - Rational::from_integer(BigInt::from(eps))) / Rational::from_integer(pb.clone());
    }
    Ok(out)
}

/// How a p-adic integer's digits are described.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegerForm {
    Rational(Rational),
    /// Finite prefix followed by a repeating block; an empty period means zeros.
    Digits {
        prefix: Vec<u64>,
        period: Vec<u64>,
    },
    /// `Σ 2^{e_i}` over the listed exponents; digits past the last one are 0.
    Sparse2(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicIntegerSpec {
    prime: u64,
    form: IntegerForm,
}

impl PadicIntegerSpec {
    pub fn new(prime: u64, form: IntegerForm) -> Result<Self> {
        if !crate::modarith::is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        match &form {
            IntegerForm::Rational(q) => {
                if (q.denom() % BigInt::from(prime)).is_zero() {
                    return Err(Error::NotPadicInteger);
                }
            }
            IntegerForm::Digits { prefix, period } => {
                if let Some(d) = prefix.iter().chain(period).find(|&&d| d >= prime) {
                    return Err(Error::InvalidSpec(format!("digit {d} out of range for p={prime}")));
                }
            }
            IntegerForm::Sparse2(exps) => {
                if prime != 2 {
                    return Err(Error::SparseRequiresTwo);
                }
                if exps.is_empty() || exps.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidSpec("sparse2 exponents must be nonempty and strictly increasing".into()));
                }
            }
        }
        Ok(PadicIntegerSpec { prime, form })
    }

    pub fn rational(prime: u64, q: Rational) -> Result<Self> {
        Self::new(prime, IntegerForm::Rational(q))
    }

    pub fn integer(prime: u64, x: i64) -> Result<Self> {
        Self::rational(prime, Rational::from_integer(BigInt::from(x)))
    }

    pub fn sparse2(exponents: Vec<u64>) -> Result<Self> {
        Self::new(2, IntegerForm::Sparse2(exponents))
    }

    /// Parses `rational:-1`, `rational:-1/3`, `digits:1,2/0,1` (prefix/period) or `sparse2:1,4,21`.
    pub fn parse(text: &str, prime: u64) -> Result<Self> {
        let bad = |m: &str| Error::InvalidSpec(format!("{text:?}: {m}"));
        let (kind, body) = text.split_once(':').ok_or_else(|| bad("expected <kind>:<value>"))?;
        let list = |s: &str| -> Result<Vec<u64>> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u64>().map_err(|_| bad("expected comma-separated naturals")))
                .collect()
        };
        let form = match kind {
            "rational" => {
                let (n, d) = body.split_once('/').unwrap_or((body, "1"));
                let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
                let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                IntegerForm::Rational(Rational::new(n, d))
            }
            "digits" => {
                let (pre, per) = body.split_once('/').unwrap_or((body, ""));
                IntegerForm::Digits { prefix: list(pre)?, period: list(per)? }
            }
            "sparse2" => IntegerForm::Sparse2(list(body)?),
            _ => return Err(bad("kind must be rational, digits or sparse2")),
        };
        Self::new(prime, form)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn form(&self) -> &IntegerForm {
        &self.form
    }

    /// `x_n = Σ_{i≤n} ε_i p^i`.
    pub fn partial_sum(&self, n: u64) -> Result<BigUint> {
        let p = self.prime;
        match &self.form {
            IntegerForm::Rational(q) => rational_residue(q, p, (n + 1) as u32),
            IntegerForm::Digits { prefix, period } => {
                let mut acc = BigUint::zero();
                let mut pw = BigUint::one();
                for i in 0..=n as usize {
                    let d = if i < prefix.len() {
                        prefix[i]
                    } else if period.is_empty() {
                        0
                    } else {
                        period[(i - prefix.len()) % period.len()]
                    };
                    acc += &pw * d;
                    pw *= p;
                }
                Ok(acc)
            }
            IntegerForm::Sparse2(exps) => {
                if p != 2 {
                    return Err(Error::SparseRequiresTwo);
                }
                Ok(exps.iter().filter(|&&e| e <= n).fold(BigUint::zero(), |acc, &e| acc + (BigUint::one() << e)))
            }
        }
    }

    /// Short text form that [`PadicIntegerSpec::parse`] accepts.
    pub fn describe(&self) -> String {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match &self.form {
            IntegerForm::Rational(q) => format!("rational:{q}"),
            IntegerForm::Digits { prefix, period } => format!("digits:{}/{}", join(prefix), join(period)),
            IntegerForm::Sparse2(exps) => format!("sparse2:{}", join(exps)),
        }
    }

    /// The integer `-k-1` this spec denotes when it is a negative integer below `-1`.
    pub fn negative_offset(&self) -> Option<u64> {
        match &self.form {
            IntegerForm::Rational(q) if q.is_integer() && q.numer() < &BigInt::from(-1) => (-q.numer() - 1u32).to_u64(),
            _ => None,
        }
    }

    pub fn is_minus_one(&self) -> bool {
        matches!(&self.form, IntegerForm::Rational(q) if *q == -Rational::one())
    }
}

pub fn partial_sum(spec: &PadicIntegerSpec, n: u64) -> Result<BigUint> {
    spec.partial_sum(n)
}
