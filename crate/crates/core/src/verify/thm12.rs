//! `ν_p(f(p^e − k − 1))` in the three prime regimes. The hypothesis bound
//! on `e` is computed per `k`; pairs that miss it become skipped rows.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{Claim, FContext, VerificationReport};
use crate::binomial::nu;
use crate::error::{Error, Result};
use crate::modarith::{checked_pow, is_prime};
use crate::params;

/// The two known Wieferich primes.
pub const KNOWN_WIEFERICH: [u64; 2] = [1093, 3511];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeRegime {
    Two,
    /// Odd, `2^{p−1} ≢ 1 mod p²`.
    Ordinary,
    /// 1093 or 3511.
    KnownWieferich,
}

pub fn is_wieferich(p: u64) -> bool {
    let p2 = BigUint::from(p) * p;
    BigUint::from(2u32).modpow(&BigUint::from(p - 1), &p2) == BigUint::from(1u32)
}

pub fn regime(p: u64) -> Result<PrimeRegime> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(PrimeRegime::Two);
    }
    if KNOWN_WIEFERICH.contains(&p) {
        return Ok(PrimeRegime::KnownWieferich);
    }
    if p > 3511 && is_wieferich(p) {
        return Err(Error::LargeWieferich(p));
    }
    Ok(PrimeRegime::Ordinary)
}

impl PrimeRegime {
    /// The offset `δ` with `ν_p(f(p^e−k−1)) = δ + ν_p(k) − e` (for p = 2, `δ = k`).
    pub fn delta(self, k: u64) -> i64 {
        match self {
            PrimeRegime::Two => k as i64,
            PrimeRegime::Ordinary => 1,
            PrimeRegime::KnownWieferich => 2,
        }
    }

    /// `e` must exceed this.
    pub fn hypothesis_bound(self, p: u64, k: u64) -> u64 {
        (1..k)
            .map(|j| match self {
                PrimeRegime::Two => j + nu(j, 2),
                PrimeRegime::Ordinary => 1 + nu(j, p),
                PrimeRegime::KnownWieferich => 2 + nu(j, p),
            })
            .max()
            .unwrap_or(0)
            .max(1)
    }

    pub fn expected(self, p: u64, k: u64, e: u32) -> i64 {
        self.delta(k) + nu(k, p) as i64 - e as i64
    }
}

pub fn verify_thm_1_2(ctx: &FContext, p: u64, k_max: u64, e_list: &[u32]) -> Result<Vec<VerificationReport>> {
    let regime = regime(p)?;
    let id = match regime {
        PrimeRegime::Two => "thm1.2a",
        PrimeRegime::Ordinary => "thm1.2b",
        PrimeRegime::KnownWieferich => "thm1.2c",
    };
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let bound = regime.hypothesis_bound(p, k);
        for &e in e_list {
            let params = params! {"p" => p, "k" => k, "e" => e};
            if (e as u64) <= bound {
                rows.push(VerificationReport::skipped(id, params, format!("hypothesis needs e > {bound}")));
                continue;
            }
            let n = match checked_pow(p, e).and_then(|q| q.checked_sub(k + 1)) {
                Some(n) if ctx.padic_feasible(n) => n,
                _ => {
                    rows.push(VerificationReport::skipped(id, params, "p^e - k - 1 beyond the modular cap"));
                    continue;
                }
            };
            let measured = ctx.valuation(n, p)?;
            rows.push(VerificationReport::check(id, params, Claim::Valuation(regime.expected(p, k, e)), Claim::Valuation(measured)));
        }
    }
    Ok(rows)
}
