//! The case `ν_p(f(c−1)) = 2`: the weighted row identity, the two-digit
//! binomial congruence mod `p²`, the congruences used to lift `f(cp−1)`
//! to `p³`, the sums (f1)/(f2), and the split `D_1 = L_1 + H_1`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{diff_claim, inv_binomial_padic, rational_claim, summarize, Claim, FContext, VerificationReport};
use crate::binomial::{exact_binomial, InverseSum, UnitFactorials};
use crate::error::Result;
use crate::padic::Rational;
use crate::params;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section5Params {
    pub p: u64,
    pub c: u64,
    /// `j` values for (f1) and (f2); `None` means `1..=(p−1)/2`.
    pub j_range: Option<Vec<u64>>,
    pub sample_budget: usize,
    pub seed: u64,
    pub sample_primes: Vec<u64>,
    /// Upper end of the weighted row identity sweep.
    pub c_max: u64,
    pub f2: bool,
}

impl Default for Section5Params {
    fn default() -> Self {
        Section5Params {
            p: 23,
            c: 13,
            j_range: None,
            sample_budget: 500,
            seed: 0,
            sample_primes: vec![5, 7, 11, 13, 23],
            c_max: 200,
            f2: true,
        }
    }
}

impl Section5Params {
    fn js(&self) -> Vec<u64> {
        self.j_range.clone().unwrap_or_else(|| (1..=(self.p - 1) / 2).collect())
    }
}

pub fn verify_section5(ctx: &FContext, params: &Section5Params) -> Result<Vec<VerificationReport>> {
    let mut rows = weighted_rows(ctx, params.c_max)?;
    rows.extend(two_digit_samples(params)?);
    rows.extend(lift_rows(ctx, &params.sample_primes)?);

    let (p, c) = (params.p, params.c);
    let base = params! {"p" => p, "c" => c};
    let v = if c >= 1 && ctx.exact_feasible(c - 1) { Some(ctx.valuation(c - 1, p)?) } else { None };
    if v != Some(2) || c % p == 0 {
        for id in ["sec5.f1", "sec5.f2", "sec5.d1_split"] {
            rows.push(VerificationReport::skipped(id, base.clone(), "requires nu_p(f(c-1)) = 2 and p not dividing c"));
        }
        return Ok(rows);
    }
    let js = params.js();
    rows.extend(f1_rows(p, c, &js)?);
    if params.f2 {
        rows.extend(f2_rows(p, c, &js)?);
    } else {
        rows.push(VerificationReport::skipped("sec5.f2", base, "disabled"));
    }
    rows.extend(split_rows(ctx, p, c)?);
    Ok(rows)
}

fn inv(x: &BigUint) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(x.clone()))
}

fn int(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// `C(n, 0..=n)`.
fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut cur = BigUint::one();
    for k in 0..=n {
        row.push(cur.clone());
        cur = cur * (n - k) / (k + 1);
    }
    row
}

/// `S_m = Σ_{i=1}^m 1/i`.
fn harmonic(m: u64) -> Rational {
    (1..=m).fold(Rational::zero(), |acc, i| acc + Rational::new(BigInt::one(), BigInt::from(i)))
}

/// `Σ_i i·C(c−1,i)^{-1} = ½(c−1)f(c−1)`, exactly.
fn weighted_rows(ctx: &FContext, c_max: u64) -> Result<Vec<VerificationReport>> {
    let each = (1..=c_max)
        .map(|c| {
            let row = binomial_row(c - 1);
            let lhs = row.iter().enumerate().fold(Rational::zero(), |acc, (i, b)| acc + int(i as u64) * inv(b));
            let rhs = int(c - 1) * ctx.exact(c - 1)? / int(2);
            Ok(VerificationReport::check("sec5.lemma5.1", params! {"c" => c}, Claim::Flag(true), Claim::Flag(lhs == rhs)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("sec5.lemma5.1", params! {"c_max" => c_max}, each))
}

/// One `(p, A, B, C, D)` case of the two-digit congruence: `ν_p(LHS − RHS)`.
fn two_digit(p: u64, a: u64, b: u64, c: u64, d: u64) -> Result<Claim> {
    let x = inv(&exact_binomial(a, c)?) * inv(&exact_binomial(b, d)?);
    let lhs = inv(&exact_binomial(a * p + b, c * p + d)?) - x.clone();
    let bracket = int(c) * harmonic(d) + int(a - c) * harmonic(b - d) - int(a) * harmonic(b);
    let rhs = int(p) * x * bracket;
    rational_claim(&(lhs - rhs), p)
}

fn two_digit_samples(params: &Section5Params) -> Result<Vec<VerificationReport>> {
    let id = "sec5.lemma5.2";
    let mut rows = vec![VerificationReport::check(
        id,
        params! {"p" => 5, "A" => 3, "B" => 2, "C" => 1, "D" => 1},
        Claim::AtLeast(2),
        two_digit(5, 3, 2, 1, 1)?,
    )];
    if params.sample_primes.is_empty() {
        return Ok(rows);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let cases: Vec<[u64; 5]> = (0..params.sample_budget)
        .map(|_| {
            let p = params.sample_primes[rng.gen_range(0..params.sample_primes.len())];
            let a = rng.gen_range(0..p);
            let b = rng.gen_range(0..p);
            let c = rng.gen_range(0..=a);
            let d = rng.gen_range(0..=b);
            [p, a, b, c, d]
        })
        .collect();
    let each = cases
        .par_iter()
        .map(|&[p, a, b, c, d]| {
            let measured = two_digit(p, a, b, c, d)?;
            Ok(VerificationReport::check(id, params! {"p" => p, "A" => a, "B" => b, "C" => c, "D" => d}, Claim::AtLeast(2), measured))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.extend(summarize(id, params! {"samples" => params.sample_budget, "seed" => params.seed}, each));
    Ok(rows)
}

/// For each prime and each `2 ≤ c < p`: the `p³` congruence
/// `C(cp−1, pj)^{-1} ≡ C(c−1, j)^{-1}` for every `j < c`, and, when
/// `ν_p(f(c−1)) > 0`, the congruences (ip+2j), (2) and (p3).
fn lift_rows(ctx: &FContext, primes: &[u64]) -> Result<Vec<VerificationReport>> {
    let cases: Vec<(u64, u64)> = primes.iter().flat_map(|&p| (2..p).map(move |c| (p, c))).collect();
    let per_case = cases
        .par_iter()
        .map(|&(p, c)| {
            let mut rows = Vec::new();
            let table = UnitFactorials::new(p, 5, c * p)?;
            for j in 0..c {
                let hi = inv_binomial_padic(&table, c * p - 1, p * j)?;
                let lo = inv_binomial_padic(&table, c - 1, j)?;
                rows.push(VerificationReport::check(
                    "sec5.0modp3",
                    params! {"p" => p, "c" => c, "j" => j},
                    Claim::AtLeast(3),
                    diff_claim(&hi, &lo)?,
                ));
            }
            if ctx.valuation(c - 1, p)? > 0 {
                rows.extend(proposition_rows(ctx, p, c)?);
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let (lift, other): (Vec<_>, Vec<_>) = per_case.into_iter().flatten().partition(|r| r.check_id == "sec5.0modp3");
    let mut rows = summarize("sec5.0modp3", params! {"primes" => primes.len()}, lift);
    rows.extend(other);
    Ok(rows)
}

fn proposition_rows(ctx: &FContext, p: u64, c: u64) -> Result<Vec<VerificationReport>> {
    let top = binomial_row(c * p - 1);
    let second = binomial_row(c * p - 2);
    let low = binomial_row(c - 1);
    let row_p1 = binomial_row(p - 1);
    let row_p2 = binomial_row(p - 2);
    let fc = ctx.exact(c - 1)?;
    let mut rows = Vec::new();
    for j in 1..=(p - 1) / 2 {
        let params = params! {"p" => p, "c" => c, "j" => j};
        let k = |i: u64| (i * p + 2 * j) as usize;
        let mut ip2j = Rational::zero();
        let mut two = Rational::zero();
        for i in 0..c {
            ip2j += inv(&top[k(i)]) / int(i * p + 2 * j) - inv(&low[i as usize]) * inv(&row_p1[2 * j as usize]) / int(2 * j);
            two -= inv(&second[k(i) - 1]);
        }
        two += inv(&row_p2[2 * j as usize - 1]) * fc.clone();
        rows.push(VerificationReport::check("sec5.ip2j", params.clone(), Claim::AtLeast(2), rational_claim(&ip2j, p)?));
        rows.push(VerificationReport::check("sec5.two", params, Claim::AtLeast(2), rational_claim(&two, p)?));
    }
    let off = (0..c * p).filter(|k| k % p != 0).fold(Rational::zero(), |acc, k| acc + inv(&top[k as usize]));
    let inner = (1..p).fold(Rational::zero(), |acc, k| acc + inv(&row_p1[k as usize]));
    let rhs = int(c) * inner * fc;
    rows.push(VerificationReport::check("sec5.p3", params! {"p" => p, "c" => c}, Claim::AtLeast(3), rational_claim(&(off - rhs), p)?));
    Ok(rows)
}

fn inverse_sum_claim(s: InverseSum) -> Claim {
    match s {
        InverseSum::Zero => Claim::Infinite,
        InverseSum::Value { valuation, .. } => Claim::Valuation(valuation),
        InverseSum::AtLeast(b) => Claim::AtLeast(b),
    }
}

/// `Σ_{i=u}^{cp+u−1} C(cp²+up−2, ip+2j−1)^{-1} ≡ 0 mod p` for `1 ≤ u ≤ p−1`.
fn f1_rows(p: u64, c: u64, js: &[u64]) -> Result<Vec<VerificationReport>> {
    let table = UnitFactorials::new(p, 6, c * p * p + (p - 1) * p)?;
    let mut rows = Vec::new();
    for &j in js {
        let each = (1..p)
            .map(|u| {
                let n = c * p * p + u * p - 2;
                let s = table.inv_binomial_sum(n, (u..=c * p + u - 1).map(|i| i * p + 2 * j - 1))?;
                let claim = inverse_sum_claim(s);
                Ok(VerificationReport::check("sec5.f1", params! {"p" => p, "c" => c, "j" => j, "u" => u}, Claim::AtLeast(1), claim))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(each);
    }
    // Exact cross-check of the word-sized route on the first (u, j).
    if let Some(&j) = js.first() {
        let n = c * p * p + p - 2;
        let row = binomial_row(n);
        let exact = (1..=c * p).fold(Rational::zero(), |acc, i| acc + inv(&row[(i * p + 2 * j - 1) as usize]));
        let exact_claim = rational_claim(&exact, p)?;
        let modular = rows.iter().find(|r| r.params["j"] == j as i64 && r.params["u"] == 1).map(|r| r.measured.clone());
        let consistent = match (&modular, &exact_claim) {
            (Some(Claim::Valuation(a)), Claim::Valuation(b)) => a == b,
            (Some(Claim::AtLeast(a)), Claim::Valuation(b)) => a <= b,
            (Some(Claim::AtLeast(_) | Claim::Infinite), Claim::Infinite) => true,
            _ => false,
        };
        if !consistent {
            return Err(crate::error::Error::EngineDisagreement(format!(
                "(f1) at p={p}, c={c}, j={j}, u=1: modular {modular:?}, exact {exact_claim:?}"
            )));
        }
    }
    Ok(rows)
}

/// `ν_p(Σ_{i=up}^{cp²+up−1} C(cp³+up²−2, ip+2j−1)^{-1}) ≥ 0`.
fn f2_rows(p: u64, c: u64, js: &[u64]) -> Result<Vec<VerificationReport>> {
    let table = UnitFactorials::new(p, 8, c * p * p * p + (p - 1) * p * p)?;
    let grid: Vec<(u64, u64)> = js.iter().flat_map(|&j| (1..p).map(move |u| (j, u))).collect();
    grid.par_iter()
        .map(|&(j, u)| {
            let n = c * p * p * p + u * p * p - 2;
            let s = table.inv_binomial_sum(n, (u * p..=c * p * p + u * p - 1).map(|i| i * p + 2 * j - 1))?;
            Ok(VerificationReport::check(
                "sec5.f2",
                params! {"p" => p, "c" => c, "j" => j, "u" => u},
                Claim::AtLeast(0),
                inverse_sum_claim(s),
            ))
        })
        .collect()
}

/// `D_1 = f(cp+u−1) − f(u−1)` against `L_1 + H_1` summed term by term.
fn split_rows(ctx: &FContext, p: u64, c: u64) -> Result<Vec<VerificationReport>> {
    (1..p)
        .map(|u| {
            let n = c * p + u - 1;
            let big = binomial_row(n);
            let small = binomial_row(u - 1);
            let l = (0..u as usize).fold(Rational::zero(), |acc, i| acc + inv(&big[i]) - inv(&small[i]));
            let h = (u as usize..=n as usize).fold(Rational::zero(), |acc, i| acc + inv(&big[i]));
            let d = ctx.exact(n)? - ctx.exact(u - 1)?;
            Ok(VerificationReport::check(
                "sec5.d1_split",
                params! {"p" => p, "c" => c, "u" => u},
                Claim::Flag(true),
                Claim::Flag(d == l + h),
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsum::EngineConfig;
    use crate::verify::tally;

    #[test]
    fn frozen_examples() {
        assert!(Claim::AtLeast(2).accepts(&two_digit(5, 3, 2, 1, 1).unwrap()));
        let ctx = FContext::new(EngineConfig::default());
        let w = weighted_rows(&ctx, 3).unwrap();
        assert_eq!(w[0].measured, Claim::Count(3));
        let f1 = f1_rows(23, 13, &[1]).unwrap();
        assert!(f1.iter().all(|r| r.pass), "{f1:?}");
    }

    #[test]
    fn small_suite_has_no_failures() {
        let ctx = FContext::new(EngineConfig::default());
        let params = Section5Params {
            sample_budget: 40,
            sample_primes: vec![5, 7, 11],
            c_max: 30,
            j_range: Some(vec![1, 2]),
            f2: false,
            ..Section5Params::default()
        };
        let rows = verify_section5(&ctx, &params).unwrap();
        assert_eq!(tally(&rows).fail, 0, "{:?}", rows.iter().filter(|r| r.is_failure()).collect::<Vec<_>>());
        assert!(rows.iter().any(|r| r.check_id == "sec5.d1_split"));
    }
}
