//! Evidence for p-definability: `f` along the partial sums `x_n` of a
//! p-adic integer, and discontinuity witnesses at the prime 2.
//!
//! A finite window never decides a limit, so verdicts are evidence only.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::binomial::nu;
use crate::error::{Error, Result};
use crate::padic::{DiffValuation, IntegerForm, PadicIntegerSpec};
use crate::scan::{good, GOOD_PRIME_CEILING};
use crate::verify::thm12::{regime, PrimeRegime};
use crate::verify::{Claim, FContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CauchyEvidence,
    DivergenceEvidence,
    Inconclusive,
}

/// Theorem whose hypothesis the analysed integer meets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremTag {
    /// `x = −1`: definable, limit 0 at p = 2 and `≡ 1 mod p` otherwise.
    MinusOne,
    /// `x = −k−1`, `k ≥ 1`: not definable.
    NegativeInteger,
    /// Good odd prime (or 23) and `x` outside `{−1, 0, 1, …}`: not definable.
    GoodOddPrime,
    /// Sparse binary digits with `e_k > k + Σ_{i<k} 2^{e_i}`: definable.
    SparseTwo,
}

impl TheoremTag {
    pub fn expects(self) -> Verdict {
        match self {
            TheoremTag::MinusOne | TheoremTag::SparseTwo => Verdict::CauchyEvidence,
            TheoremTag::NegativeInteger | TheoremTag::GoodOddPrime => Verdict::DivergenceEvidence,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinabilityRow {
    pub n: u64,
    pub x_n: String,
    pub nu_f: i64,
    /// `f(x_n) mod p` when `f(x_n)` is p-integral.
    pub residue: Option<u64>,
    /// `ν_p(f(x_next) − f(x_n))` for the following row; absent on the last row.
    pub diff: Option<Claim>,
    pub expected_nu: Option<Claim>,
    pub expected_residue: Option<u64>,
    pub expected_diff: Option<Claim>,
    /// Whether every expectation on this row holds; absent when there are none.
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// First index that was not computed.
    pub at_n: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinabilityReport {
    pub spec: String,
    pub prime: u64,
    pub depth: u64,
    pub rows: Vec<DefinabilityRow>,
    pub verdict: Verdict,
    pub theorem_tag: Option<TheoremTag>,
    pub truncated: Option<Truncation>,
}

impl DefinabilityReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.pass == Some(false)).count()
    }
}

/// Row indices: `0..=depth`, or the listed exponents (at most `depth + 1`) for sparse binary specs.
fn indices(spec: &PadicIntegerSpec, depth: u64) -> Vec<u64> {
    match spec.form() {
        IntegerForm::Sparse2(exps) => exps.iter().copied().take(depth as usize + 1).collect(),
        _ => (0..=depth).collect(),
    }
}

pub fn analyze_definability(ctx: &FContext, spec: &PadicIntegerSpec, depth: u64) -> Result<DefinabilityReport> {
    let p = spec.prime();
    let tag = theorem_tag(spec)?;
    let mut truncated = None;
    let mut xs: Vec<(u64, u64)> = Vec::new();
    for n in indices(spec, depth) {
        let x = spec.partial_sum(n)?;
        match x.to_u64().filter(|&x| ctx.padic_feasible(x)) {
            Some(x) => xs.push((n, x)),
            None => {
                truncated =
                    Some(Truncation { at_n: n, reason: format!("x_{n} = {x} exceeds the modular cap {}", ctx.config().modular_cap) });
                break;
            }
        }
    }
    let sparse_bounds = match spec.form() {
        IntegerForm::Sparse2(exps) => Some(sparse_hypothesis(exps)),
        _ => None,
    };

    let mut rows = Vec::with_capacity(xs.len());
    for (idx, &(n, x)) in xs.iter().enumerate() {
        let nu_f = ctx.valuation(x, p)?;
        let residue = if nu_f >= 0 { ctx.residue(x, p, 1)?.and_then(|r| r.to_u64()) } else { None };
        let diff = match xs.get(idx + 1) {
            Some(&(_, next)) => Some(match ctx.diff(next, x, p)? {
                Some(DiffValuation::Exact(v)) => Claim::Valuation(v),
                Some(DiffValuation::AtLeast(v)) => Claim::AtLeast(v),
                None => Claim::Infinite,
            }),
            None => None,
        };
        let (mut expected_nu, mut expected_residue, mut expected_diff) = (None, None, None);
        match tag {
            Some(TheoremTag::MinusOne) => {
                // x_n = p^{n+1} − 1.
                let e = n as i64 + 1;
                if p == 2 {
                    if e >= 3 {
                        expected_nu = Some(Claim::AtLeast(2 * e));
                    }
                } else {
                    expected_residue = Some(1);
                    if diff.is_some() {
                        expected_diff = Some(Claim::AtLeast(e + 1));
                    }
                }
            }
            Some(TheoremTag::NegativeInteger) => {
                let k = spec.negative_offset().expect("tagged negative integer");
                let reg = regime(p)?;
                let e = n + 1;
                // x_{e−1} = p^e − k − 1 once p^e > k + 1.
                if e > reg.hypothesis_bound(p, k) && x.checked_add(k + 1) == crate::modarith::checked_pow(p, e as u32) {
                    expected_nu = Some(Claim::Valuation(reg.expected(p, k, e as u32)));
                }
            }
            Some(TheoremTag::GoodOddPrime) => {
                // (pdiff) with c = ε_{n+1} ≠ 0 and i = x_n < p^{n+1} − 1.
                let pe = crate::modarith::checked_pow(p, n as u32 + 1);
                if let (Some(&(_, next)), Some(pe)) = (xs.get(idx + 1), pe) {
                    if next != x && x + 1 < pe {
                        expected_diff = Some(Claim::AtMost(0));
                    }
                }
            }
            Some(TheoremTag::SparseTwo) => {
                let k = idx + 1;
                if diff.is_some() && sparse_bounds.as_ref().is_some_and(|b| b.get(k).copied().unwrap_or(false)) {
                    expected_diff = Some(Claim::AtLeast(k as i64));
                }
            }
            None => {}
        }
        let mut checks = Vec::new();
        if let Some(c) = &expected_nu {
            checks.push(c.accepts(&Claim::Valuation(nu_f)));
        }
        if let Some(r) = expected_residue {
            checks.push(residue == Some(r));
        }
        if let (Some(c), Some(d)) = (&expected_diff, &diff) {
            checks.push(c.accepts(d));
        }
        let pass = (!checks.is_empty()).then(|| checks.iter().all(|&b| b));
        rows.push(DefinabilityRow { n, x_n: x.to_string(), nu_f, residue, diff, expected_nu, expected_residue, expected_diff, pass });
    }
    let verdict = verdict(&rows);
    Ok(DefinabilityReport { spec: spec.describe(), prime: p, depth, rows, verdict, theorem_tag: tag, truncated })
}

/// `holds[k]` for `k ≥ 1`: `e_k > k + Σ_{i<k} 2^{e_i}`, and every later index holds too.
fn sparse_hypothesis(exps: &[u64]) -> Vec<bool> {
    let mut raw = vec![false; exps.len()];
    let mut partial: u128 = 0;
    for (k, &e) in exps.iter().enumerate() {
        if k >= 1 {
            raw[k] = (e as u128) > k as u128 + partial;
        }
        partial = partial.saturating_add(1u128.checked_shl(e as u32).unwrap_or(u128::MAX));
    }
    let mut out = vec![false; exps.len()];
    let mut tail = true;
    for k in (1..exps.len()).rev() {
        tail &= raw[k];
        out[k] = tail;
    }
    out
}

fn theorem_tag(spec: &PadicIntegerSpec) -> Result<Option<TheoremTag>> {
    let p = spec.prime();
    if spec.is_minus_one() {
        return Ok(Some(TheoremTag::MinusOne));
    }
    if spec.negative_offset().is_some() {
        return Ok(match regime(p) {
            Ok(_) => Some(TheoremTag::NegativeInteger),
            Err(Error::LargeWieferich(_)) => None,
            Err(e) => return Err(e),
        });
    }
    if let IntegerForm::Sparse2(exps) = spec.form() {
        return Ok(sparse_hypothesis(exps).iter().any(|&b| b).then_some(TheoremTag::SparseTwo));
    }
    if p > 2 && !is_natural(spec) && (p == 23 || is_good(p)?) {
        return Ok(Some(TheoremTag::GoodOddPrime));
    }
    Ok(None)
}

fn is_natural(spec: &PadicIntegerSpec) -> bool {
    match spec.form() {
        IntegerForm::Rational(q) => q.is_integer() && q.numer().sign() != num_bigint::Sign::Minus,
        IntegerForm::Digits { period, .. } => period.iter().all(|&d| d == 0),
        IntegerForm::Sparse2(_) => true,
    }
}

/// Good-prime status from the scanner's fast path; unknown above its ceiling.
fn is_good(p: u64) -> Result<bool> {
    if p >= GOOD_PRIME_CEILING {
        return Ok(false);
    }
    let digits = good::working_digits(p, 2);
    Ok(good::prefix_valuations(p, digits)?.iter().all(|&v| v <= 1))
}

/// Divergence when some difference has `ν_p ≤ 0`; Cauchy when the finite
/// difference valuations strictly increase over the second half of the
/// window with at least two comparisons.
fn verdict(rows: &[DefinabilityRow]) -> Verdict {
    let diffs: Vec<i64> = rows
        .iter()
        .filter_map(|r| match r.diff {
            Some(Claim::Valuation(v)) | Some(Claim::AtLeast(v)) => Some(v),
            _ => None,
        })
        .collect();
    let exact_nonpositive = rows.iter().any(|r| matches!(r.diff, Some(Claim::Valuation(v)) if v <= 0));
    if exact_nonpositive {
        return Verdict::DivergenceEvidence;
    }
    let tail = &diffs[diffs.len() / 2..];
    if tail.len() >= 3 && tail.windows(2).all(|w| w[0] < w[1]) {
        return Verdict::CauchyEvidence;
    }
    Verdict::Inconclusive
}

/// A point `m` close to `n` whose image is far from `f(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub n: u64,
    pub eps_exp: u32,
    /// Odd multiplier with `2^e·t > n + 1`.
    pub t: u64,
    pub l: u32,
    pub m: u64,
    /// `ν_2(m − n)`, so `d_2(m, n) = 2^{−metric_exp}`.
    pub metric_exp: i64,
    /// `ν_2(f(m) − f(n))`, so `d_2(f(m), f(n)) = 2^{−image_exp}`.
    pub image_exp: i64,
    /// Both distances were recomputed from exact rationals.
    pub exact: bool,
}

/// `m = 2^L − (2^e·t − n)` with `t` the least odd integer making
/// `2^e·t > n + 1` (t = 1 whenever `2^e > n + 1`), and `L` the least value
/// (at least `l_min`, if given) for which `m ≡ n mod 2^e` exactly and
/// `ν_2(f(m) − f(n)) ≤ −1`.
pub fn find_discontinuity_witness(ctx: &FContext, n: u64, eps_exp: u32, l_min: Option<u32>) -> Result<Witness> {
    if eps_exp == 0 || eps_exp > 40 {
        return Err(Error::InvalidArgument(format!("eps_exp {eps_exp} must be in 1..=40")));
    }
    let pe = 1u64 << eps_exp;
    let mut t = (n + 2).div_ceil(pe);
    if t % 2 == 0 {
        t += 1;
    }
    let big_k = pe * t - n;
    let k = big_k - 1;
    let bound = PrimeRegime::Two.hypothesis_bound(2, k);
    // L > hypothesis bound, L > e, 2^L > K, and k + ν_2(k) − L ≤ −1.
    let mut l = (bound + 1).max(eps_exp as u64 + 1).max(64 - big_k.leading_zeros() as u64).max(k + nu(k, 2) + 1) as u32;
    if let Some(lm) = l_min {
        l = l.max(lm);
    }
    loop {
        if l >= 63 || (1u64 << l) - big_k > ctx.config().modular_cap {
            return Err(Error::InvalidArgument(format!(
                "witness for n={n}, e={eps_exp} needs L={l}, beyond the modular cap {}",
                ctx.config().modular_cap
            )));
        }
        let m = (1u64 << l) - big_k;
        let metric_exp = nu(m.abs_diff(n), 2) as i64;
        let image = ctx.diff(m, n, 2)?;
        if let Some(DiffValuation::Exact(image_exp)) = image {
            if metric_exp == eps_exp as i64 && image_exp <= -1 {
                return Ok(Witness { n, eps_exp, t, l, m, metric_exp, image_exp, exact: ctx.exact_feasible(m.max(n)) });
            }
        }
        l += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsum::EngineConfig;

    #[test]
    fn witness_examples() {
        let ctx = FContext::new(EngineConfig::default());
        let w = find_discontinuity_witness(&ctx, 0, 1, Some(10)).unwrap();
        assert_eq!((w.m, w.image_exp, w.metric_exp), (1022, -9, 1));
        let w = find_discontinuity_witness(&ctx, 6, 4, None).unwrap();
        assert_eq!(w.metric_exp, 4);
        let w = find_discontinuity_witness(&ctx, 14, 3, None).unwrap();
        assert_eq!((w.t, w.metric_exp), (3, 3));
        assert!(w.image_exp <= -1);
    }

    #[test]
    fn sparse_hypothesis_indices() {
        assert_eq!(sparse_hypothesis(&[1, 4, 21]), vec![false, true, true]);
        assert_eq!(sparse_hypothesis(&[1, 2, 21]), vec![false, false, true]);
        assert_eq!(sparse_hypothesis(&[0, 1]), vec![false, false]);
    }

    #[test]
    fn minus_one_at_two() {
        let ctx = FContext::new(EngineConfig::default());
        let spec = PadicIntegerSpec::integer(2, -1).unwrap();
        let r = analyze_definability(&ctx, &spec, 10).unwrap();
        assert_eq!(r.theorem_tag, Some(TheoremTag::MinusOne));
        assert_eq!(r.failures(), 0, "{r:?}");
        assert_eq!(r.verdict, Verdict::CauchyEvidence, "{r:?}");
    }

    #[test]
    fn minus_three_at_three_diverges() {
        let ctx = FContext::new(EngineConfig::default());
        let spec = PadicIntegerSpec::integer(3, -3).unwrap();
        let r = analyze_definability(&ctx, &spec, 6).unwrap();
        assert_eq!(r.theorem_tag, Some(TheoremTag::NegativeInteger));
        assert_eq!(r.verdict, Verdict::DivergenceEvidence);
        for row in &r.rows {
            if row.expected_nu.is_some() {
                assert_eq!(row.nu_f, 1 - (row.n as i64 + 1));
            }
        }
        assert_eq!(r.failures(), 0);
    }
}
