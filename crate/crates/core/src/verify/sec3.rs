//! Good primes and the `ν_p(f(c−1)) = 2` case: the `cp − 1` congruence
//! mod p³, stability of `ν_p(f(cp^e − 1))`, the `Δ(i) = f(cp^e+i) − f(i)`
//! valuation formula and its recurrence, the `D_e` stability lemma, the
//! `≤ 0` difference bound and the hypothesis checked for `p = 23, c = 13`.

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{diff_claim, rational_claim, same_digits, Claim, FContext, VerificationReport};
use crate::binomial::nu;
use crate::error::{Error, Result};
use crate::modarith::checked_pow;
use crate::padic::{PadicValue, Rational};
use crate::params;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section3Params {
    pub p_list: Vec<u64>,
    /// `None` sweeps `1 ≤ c ≤ p−1`.
    pub c_list: Option<Vec<u64>>,
    pub e_max: u32,
    /// Number of `i` values per `(p, c, e)` in the `Δ(i)` sweep.
    pub i_budget: u64,
}

impl Default for Section3Params {
    fn default() -> Self {
        Section3Params { p_list: vec![3, 5, 7, 11, 13, 23], c_list: None, e_max: 3, i_budget: 24 }
    }
}

const DELTA_PRECISION: u32 = 12;
const DELTA_PRECISION_MAX: u32 = 96;

/// Per-prime facts every sub-check filters on.
struct PrimeData {
    p: u64,
    /// `ν_p(f(c−1))` for `c = 1..p−1` (index `c−1`).
    nu_f: Vec<i64>,
    /// `c` values with `ν_p(f(c−1)) = 2` whose extra hypothesis holds.
    cond_ok: Vec<u64>,
}

impl PrimeData {
    fn nu_f(&self, c: u64) -> i64 {
        self.nu_f[c as usize - 1]
    }

    /// Whether `ν_p(f(cp^e+i) − f(i)) ≤ 0` follows at this `(c, e)`.
    fn pdiff_applies(&self, c: u64, e: u32) -> bool {
        let v = self.nu_f(c);
        v <= 1 || (v == 2 && self.cond_ok.contains(&c) && e >= 3)
    }
}

pub fn verify_section3(ctx: &FContext, params: &Section3Params) -> Result<Vec<VerificationReport>> {
    let mut rows = Vec::new();
    for &p in &params.p_list {
        if p < 3 || !crate::modarith::is_prime(p) {
            return Err(Error::InvalidArgument(format!("odd-prime congruences need an odd prime, got {p}")));
        }
        let cs: Vec<u64> = match &params.c_list {
            Some(list) => list.iter().copied().filter(|&c| c >= 1 && c < p).collect(),
            None => (1..p).collect(),
        };
        let (data, cond_rows) = prime_data(ctx, p)?;
        rows.extend(cond_rows);
        for &c in &cs {
            rows.push(prop_3_1(ctx, &data, c)?);
        }
        for &c in &cs {
            rows.extend(cor_3_2(ctx, &data, c, params.e_max)?);
        }
        let deltas: Vec<Vec<VerificationReport>> = cs
            .par_iter()
            .flat_map_iter(|&c| (1..=params.e_max).map(move |e| (c, e)))
            .map(|(c, e)| delta_rows(ctx, &data, c, e, params.i_budget))
            .collect::<Result<_>>()?;
        rows.extend(deltas.into_iter().flatten());
        for &c in cs.iter().filter(|&&c| data.nu_f(c) == 2) {
            rows.extend(lemma_3_4(ctx, p, c)?);
        }
    }
    Ok(rows)
}

/// Valuations `ν_p(f(c−1))`, goodness, and the hypothesis rows for each
/// `c` with `ν_p(f(c−1)) = 2`: for every `u` with `ν_p(f(u−1)) = 0`,
/// `ν_p(f(cp+u−1) − f(u−1)) = 1` and `(f(cp+u−1) − f(u−1))/p ≢ (c/u)f(u−1) mod p`.
fn prime_data(ctx: &FContext, p: u64) -> Result<(PrimeData, Vec<VerificationReport>)> {
    let nu_f: Vec<i64> = (1..p).map(|c| ctx.valuation(c - 1, p)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut cond_ok = Vec::new();
    for c in (1..p).filter(|&c| nu_f[c as usize - 1] == 2) {
        rows.push(VerificationReport::info("sec3.nu_f_c_minus_1", params! {"p" => p, "c" => c}, Claim::Valuation(2), Claim::Valuation(2)));
        let mut ok = true;
        for u in (1..p).filter(|&u| nu_f[u as usize - 1] == 0) {
            let params = params! {"p" => p, "c" => c, "u" => u};
            let fu = ctx.exact(u - 1)?;
            let d = ctx.exact(c * p + u - 1)? - &fu;
            let nu_row = VerificationReport::check("sec3.23cond.nu", params.clone(), Claim::Valuation(1), rational_claim(&d, p)?);
            let scaled = d / Rational::from_integer(BigInt::from(p)) - Rational::new(BigInt::from(c), BigInt::from(u)) * fu;
            let res_row = VerificationReport::check("sec3.23cond.residue", params, Claim::AtMost(0), rational_claim(&scaled, p)?)
                .with_notes("valuation 0 means the two sides differ mod p");
            ok &= nu_row.pass && res_row.pass;
            rows.push(nu_row);
            rows.push(res_row);
        }
        if ok {
            cond_ok.push(c);
        }
    }
    Ok((PrimeData { p, nu_f, cond_ok }, rows))
}

/// `f(cp−1) − f(c−1) ≡ c(1−2^{p−1})f(c−1) mod p³` when `ν_p(f(c−1)) > 0`.
fn prop_3_1(ctx: &FContext, data: &PrimeData, c: u64) -> Result<VerificationReport> {
    let p = data.p;
    let params = params! {"p" => p, "c" => c};
    if data.nu_f(c) <= 0 {
        return Ok(VerificationReport::skipped("sec3.prop3.1", params, "hypothesis needs nu_p(f(c-1)) > 0"));
    }
    let lo = ctx.exact(c - 1)?;
    let coeff = Rational::from_integer(BigInt::from(c) * (BigInt::one() - BigInt::from(2).pow(p as u32 - 1)));
    let d = ctx.exact(c * p - 1)? - &lo - coeff * lo;
    Ok(VerificationReport::check("sec3.prop3.1", params, Claim::AtLeast(3), rational_claim(&d, p)?))
}

/// `ν_p(f(cp^e − 1)) = ν_p(f(c−1))` when the latter is at most 2.
fn cor_3_2(ctx: &FContext, data: &PrimeData, c: u64, e_max: u32) -> Result<Vec<VerificationReport>> {
    let p = data.p;
    let v = data.nu_f(c);
    let mut rows = Vec::new();
    for e in 0..=e_max {
        let params = params! {"p" => p, "c" => c, "e" => e};
        if v > 2 {
            rows.push(VerificationReport::skipped("sec3.cor3.2", params, "hypothesis needs nu_p(f(c-1)) <= 2"));
            continue;
        }
        let n = c * checked_pow(p, e).expect("small grid") - 1;
        if !ctx.padic_feasible(n) {
            rows.push(VerificationReport::skipped("sec3.cor3.2", params, "c*p^e - 1 beyond the modular cap"));
            continue;
        }
        rows.push(VerificationReport::check("sec3.cor3.2", params, Claim::Valuation(v), Claim::Valuation(ctx.valuation(n, p)?)));
    }
    Ok(rows)
}

/// `f(base), f(base+1), …` by the forward recursion from a modular value at `base`.
fn forward(ctx: &FContext, p: u64, base: u64, count: u64, prec: u32) -> Result<Vec<PadicValue>> {
    let one = PadicValue::from_u64(1, p, prec)?;
    let mut out = Vec::with_capacity(count as usize);
    out.push(ctx.padic(base, p, prec)?);
    for n in base + 1..base + count {
        let factor = PadicValue::from_rational(&Rational::new(BigInt::from(n + 1), BigInt::from(2 * n)), p, prec)?;
        let next = out.last().expect("seeded").mul(&factor)?.add(&one)?;
        out.push(next);
    }
    Ok(out)
}

/// `Δ(i) = f(cp^e+i) − f(i)` for `i < min(p^e − 1, budget)`: the valuation
/// formula (or, with `ν_p(f(c−1)) = 2`, the same formula for `e ≥ 3` under
/// the extra hypothesis), agreement with the recurrence for `Δ`, and the
/// `≤ 0` bound.
fn delta_rows(ctx: &FContext, data: &PrimeData, c: u64, e: u32, budget: u64) -> Result<Vec<VerificationReport>> {
    let p = data.p;
    let v = data.nu_f(c);
    let pe = checked_pow(p, e).expect("small grid");
    let big = c * pe;
    let count = (pe - 1).min(budget);
    let pp = params! {"p" => p, "c" => c, "e" => e};
    let (id, applies) = match v {
        ..=1 => ("sec3.prop3.3", true),
        2 => ("sec3.prop3.5", data.cond_ok.contains(&c) && e >= 3),
        _ => ("sec3.prop3.3", false),
    };
    if !ctx.padic_feasible(big + count) {
        return Ok(vec![VerificationReport::skipped(id, pp, "c*p^e + i beyond the modular cap")]);
    }
    let small: Vec<Rational> = (0..count).map(|i| ctx.exact(i)).collect::<Result<_>>()?;

    let mut prec = DELTA_PRECISION;
    let (values, deltas) = loop {
        let values = forward(ctx, p, big, count, prec)?;
        let deltas: Vec<PadicValue> = values
            .iter()
            .zip(&small)
            .map(|(x, q)| x.sub(&PadicValue::from_rational(q, p, prec)?))
            .collect::<Result<_>>()
            .or_else(|e| if matches!(e, Error::PrecisionExhausted) { Ok(Vec::new()) } else { Err(e) })?;
        if deltas.len() == values.len() || prec >= DELTA_PRECISION_MAX {
            break (values, deltas);
        }
        prec *= 2;
    };

    // The recursion-driven value at the far end must match a direct evaluation.
    let last = big + count - 1;
    let direct = ctx.padic(last, p, prec)?;
    if !same_digits(&direct, values.last().expect("count >= 1")) {
        return Err(Error::EngineDisagreement(format!("f({last}) at p={p}: forward recursion vs modular engine")));
    }

    let mut rows = Vec::new();
    for i in 0..count {
        let params = params! {"p" => p, "c" => c, "e" => e, "i" => i};
        if !applies {
            rows.push(VerificationReport::skipped(id, params, "hypothesis on nu_p(f(c-1)) not met"));
            continue;
        }
        let expected = -(e as i64) + nu(i + 1, p) as i64 + v;
        let measured = match deltas.get(i as usize) {
            Some(d) => Claim::Valuation(d.valuation()?),
            None => diff_claim(&values[i as usize], &PadicValue::from_rational(&small[i as usize], p, prec)?)?,
        };
        rows.push(VerificationReport::check(id, params, Claim::Valuation(expected), measured));
    }

    // Recurrence for Δ: Δ(i) = (N+i+1)/(2(N+i))·Δ(i−1) − N/(2i(N+i))·f(i−1).
    let mut consistent = deltas.len() as u64 == count;
    for i in 1..deltas.len() as u64 {
        let n = big + i;
        let a = PadicValue::from_rational(&Rational::new(BigInt::from(n + 1), BigInt::from(2 * n)), p, prec)?;
        let b = PadicValue::from_rational(&(Rational::new(BigInt::from(big), BigInt::from(2 * i * n)) * &small[i as usize - 1]), p, prec)?;
        let predicted = deltas[i as usize - 1].mul(&a)?.sub(&b)?;
        consistent &= matches!(diff_claim(&predicted, &deltas[i as usize])?, Claim::AtLeast(_) | Claim::Infinite);
    }
    rows.push(VerificationReport::check("sec3.ind", pp.clone(), Claim::Flag(true), Claim::Flag(consistent)));

    if data.pdiff_applies(c, e) {
        let worst = deltas
            .iter()
            .map(|d| d.valuation())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .map_or(Claim::AtLeast(prec as i64), Claim::Valuation);
        let worst = if deltas.len() as u64 == count { worst } else { Claim::AtLeast(0) };
        rows.push(VerificationReport::check("sec3.pdiff", pp, Claim::AtMost(0), worst).with_notes(format!("max over {count} values of i")));
    } else {
        rows.push(VerificationReport::skipped("sec3.pdiff", pp, "needs nu_p(f(c-1)) <= 1, or e >= 3 under the extra hypothesis"));
    }
    Ok(rows)
}

/// `D_e = f(cp^e + up^{e−1} − 1) − f(up^{e−1} − 1)`: `D_e ≡ 0 mod p` and
/// `D_{e+1} ≡ D_e mod p²` for `e = 1, 2, 3`, every `u`.
fn lemma_3_4(ctx: &FContext, p: u64, c: u64) -> Result<Vec<VerificationReport>> {
    let rows: Vec<Vec<VerificationReport>> = (1..p)
        .into_par_iter()
        .map(|u| {
            let mut rows = Vec::new();
            let mut ds: Vec<Option<PadicValue>> = Vec::new();
            for e in 1..=4u32 {
                let pe1 = checked_pow(p, e - 1).expect("small");
                let (hi, lo) = (c * pe1 * p + u * pe1 - 1, u * pe1 - 1);
                if !ctx.padic_feasible(hi) {
                    ds.push(None);
                    continue;
                }
                ds.push(Some(d_value(ctx, p, hi, lo)?));
            }
            for e in 1..=3u32 {
                let params = params! {"p" => p, "c" => c, "u" => u, "e" => e};
                match (&ds[e as usize - 1], &ds[e as usize]) {
                    (Some(a), Some(b)) => {
                        rows.push(VerificationReport::check(
                            "sec3.lemma3.4.div",
                            params.clone(),
                            Claim::AtLeast(1),
                            Claim::Valuation(a.valuation()?),
                        ));
                        rows.push(VerificationReport::check("sec3.lemma3.4.stable", params, Claim::AtLeast(2), diff_claim(b, a)?));
                    }
                    _ => rows.push(VerificationReport::skipped("sec3.lemma3.4.stable", params, "D_(e+1) beyond the modular cap")),
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn d_value(ctx: &FContext, p: u64, hi: u64, lo: u64) -> Result<PadicValue> {
    let mut prec = 6;
    loop {
        match ctx.padic(hi, p, prec)?.sub(&ctx.padic(lo, p, prec)?) {
            Err(Error::PrecisionExhausted) if prec < 48 => prec *= 2,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsum::EngineConfig;
    use crate::verify::tally;

    #[test]
    fn published_examples() {
        let ctx = FContext::new(EngineConfig::default());
        let params = Section3Params { p_list: vec![3, 5], c_list: None, e_max: 2, i_budget: 24 };
        let rows = verify_section3(&ctx, &params).unwrap();
        assert_eq!(tally(&rows).fail, 0, "{:?}", rows.iter().filter(|r| r.is_failure()).collect::<Vec<_>>());
        let find = |p: i64, c: i64, e: i64, i: i64| {
            rows.iter()
                .find(|r| {
                    r.check_id == "sec3.prop3.3" && r.params["p"] == p && r.params["c"] == c && r.params["e"] == e && r.params["i"] == i
                })
                .unwrap()
        };
        assert_eq!(find(3, 1, 2, 4).measured, Claim::Valuation(-2));
        for i in 0..=23 {
            assert!(find(5, 2, 2, i).pass);
        }
    }
}
