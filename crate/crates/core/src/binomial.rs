//! Digit sums, Legendre and Kummer valuations, exact binomials.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{inv_mod, mul_mod};

pub fn alpha_p(mut n: u64, p: u64) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// Legendre: `ν_p(n!) = (n − α_p(n))/(p−1)`.
pub fn nu_factorial(n: u64, p: u64) -> u64 {
    (n - alpha_p(n, p)) / (p - 1)
}

pub fn nu_binomial(n: u64, k: u64, p: u64) -> Result<u64> {
    if k > n {
        return Err(Error::BinomialDomain { n, k });
    }
    Ok((alpha_p(k, p) + alpha_p(n - k, p) - alpha_p(n, p)) / (p - 1))
}

/// `ν_p(m)` for a nonzero machine integer.
pub fn nu(m: u64, p: u64) -> u64 {
    debug_assert!(m != 0);
    if p == 2 {
        return m.trailing_zeros() as u64;
    }
    let mut m = m;
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarryProfile {
    pub n: u64,
    pub k: u64,
    pub p: u64,
    pub carries: u64,
}

/// Counts carries in the base-p addition `k + (n − k)`.
pub fn carry_profile(n: u64, k: u64, p: u64) -> Result<CarryProfile> {
    if k > n {
        return Err(Error::BinomialDomain { n, k });
    }
    let (mut a, mut b) = (k, n - k);
    let (mut carry, mut carries) = (0, 0);
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        carry = u64::from(s >= p);
        carries += carry;
        a /= p;
        b /= p;
    }
    Ok(CarryProfile { n, k, p, carries })
}

/// `C(n, k)` by the multiplicative recurrence, dividing out common factors each step.
pub fn exact_binomial(n: u64, k: u64) -> Result<BigUint> {
    if k > n {
        return Err(Error::BinomialDomain { n, k });
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 1..=k {
        // With g = gcd(c, i), i/g is coprime to c/g and so divides n−k+i.
        let g = c.gcd(&BigUint::from(i));
        let g = u64::try_from(&g).expect("gcd with a u64 fits in u64");
        c = (c / g) * ((n - k + i) / (i / g));
    }
    Ok(c)
}

/// p-free parts of `0!, 1!, …, n!` modulo `p^m`, for binomial units and
/// sums of inverse binomials in a word-sized ring.
#[derive(Clone, Debug)]
pub struct UnitFactorials {
    p: u64,
    digits: u32,
    modulus: u64,
    units: Vec<u64>,
}

impl UnitFactorials {
    pub fn new(p: u64, digits: u32, n_max: u64) -> Result<Self> {
        let modulus = crate::modarith::checked_pow(p, digits)
            .filter(|&m| m < 1 << 63)
            .ok_or_else(|| Error::InvalidArgument(format!("{p}^{digits} does not fit in a word")))?;
        let mut units = Vec::with_capacity(n_max as usize + 1);
        units.push(1 % modulus);
        for i in 1..=n_max {
            let (_, u) = crate::modarith::split_prime_power(i, p);
            let next = mul_mod(units[i as usize - 1], u % modulus, modulus);
            units.push(next);
        }
        Ok(UnitFactorials { p, digits, modulus, units })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> u64 {
        self.units.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    fn unit(&self, n: u64) -> Result<u64> {
        self.units.get(n as usize).copied().ok_or_else(|| Error::InvalidArgument(format!("factorial table ends before {n}")))
    }

    /// `(ν_p C(n,k), C(n,k)/p^ν mod p^m)`.
    pub fn binomial(&self, n: u64, k: u64) -> Result<(u64, u64)> {
        let nu = nu_binomial(n, k, self.p)?;
        let den = mul_mod(self.unit(k)?, self.unit(n - k)?, self.modulus);
        let inv = inv_mod(den, self.modulus).expect("unit factorials are invertible");
        Ok((nu, mul_mod(self.unit(n)?, inv, self.modulus)))
    }

    /// `ν_p(Σ_{k∈ks} C(n,k)^{-1})`, or a lower bound when every known digit cancels.
    pub fn inv_binomial_sum(&self, n: u64, ks: impl IntoIterator<Item = u64>) -> Result<InverseSum> {
        let ks: Vec<u64> = ks.into_iter().collect();
        let mut nus = Vec::with_capacity(ks.len());
        for &k in &ks {
            nus.push(nu_binomial(n, k, self.p)?);
        }
        let top = nus.iter().copied().max().unwrap_or(0);
        let pows: Vec<u64> = (0..=top).map(|e| crate::modarith::checked_pow(self.p, e as u32).map_or(0, |x| x % self.modulus)).collect();
        let mut total = 0u64;
        for (&k, &nu) in ks.iter().zip(&nus) {
            let term = mul_mod(self.unit(k)?, self.unit(n - k)?, self.modulus);
            total = (total + mul_mod(term, pows[(top - nu) as usize], self.modulus)) % self.modulus;
        }
        let fn_inv = inv_mod(self.unit(n)?, self.modulus).expect("unit factorials are invertible");
        let total = mul_mod(total, fn_inv, self.modulus);
        if ks.is_empty() {
            return Ok(InverseSum::Zero);
        }
        if total == 0 {
            return Ok(InverseSum::AtLeast(self.digits as i64 - top as i64));
        }
        let (t, unit) = crate::modarith::split_prime_power(total, self.p);
        Ok(InverseSum::Value { valuation: t as i64 - top as i64, unit, precision: self.digits - t })
    }
}

/// A sum of inverse binomials reduced to its p-adic leading data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseSum {
    /// Empty sum.
    Zero,
    Value {
        valuation: i64,
        unit: u64,
        precision: u32,
    },
    AtLeast(i64),
}

impl InverseSum {
    pub fn is_at_least(self, m: i64) -> bool {
        match self {
            InverseSum::Zero => true,
            InverseSum::Value { valuation, .. } => valuation >= m,
            InverseSum::AtLeast(b) => b >= m,
        }
    }

    pub fn valuation(self) -> Option<i64> {
        match self {
            InverseSum::Value { valuation, .. } => Some(valuation),
            _ => None,
        }
    }
}
