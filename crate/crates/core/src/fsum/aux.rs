//! Auxiliary sums: odd reciprocals, elementary symmetric polynomials, the
//! alternating harmonic sum against `(2^p − 2)/p`, and truncated inverse
//! binomial rows.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::binomial::exact_binomial;
use crate::error::{Error, Result};
use crate::modarith::{inv_mod, mul_mod, pow_mod};
use crate::padic::Rational;

/// `Σ_{j=1}^n 1/(2j−1)`.
pub fn odd_reciprocal_sum(n: u64) -> Rational {
    (1..=n).fold(Rational::zero(), |acc, j| acc + Rational::new(BigInt::one(), BigInt::from(2 * j - 1)))
}

/// `odd_reciprocal_sum(1..=n_max)` in one pass.
pub fn odd_reciprocal_sums(n_max: u64) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n_max as usize);
    let mut acc = Rational::zero();
    for j in 1..=n_max {
        acc += Rational::new(BigInt::one(), BigInt::from(2 * j - 1));
        out.push(acc.clone());
    }
    out
}

/// `σ_k(args)`, exact. For `k` above half the length the product
/// `Π (x + a_i)` is expanded keeping only degrees `≤ len − k`.
pub fn elementary_symmetric(args: &[BigInt], k: usize) -> Result<BigInt> {
    let n = args.len();
    if k > n {
        return Err(Error::InvalidArgument(format!("degree {k} exceeds {n} arguments")));
    }
    if k <= n - k {
        // e[j] = σ_j of the arguments seen so far.
        let mut e = vec![BigInt::zero(); k + 1];
        e[0] = BigInt::one();
        for (seen, a) in args.iter().enumerate() {
            for j in (1..=k.min(seen + 1)).rev() {
                let add = &e[j - 1] * a;
                e[j] += add;
            }
        }
        Ok(e.swap_remove(k))
    } else {
        // c[d] = coefficient of x^d in Π (x + a_i) over the arguments seen so far.
        let top = n - k;
        let mut c = vec![BigInt::zero(); top + 1];
        c[0] = BigInt::one();
        for a in args {
            for d in (0..=top).rev() {
                let mut next = &c[d] * a;
                if d > 0 {
                    next += &c[d - 1];
                }
                c[d] = next;
            }
        }
        Ok(c.swap_remove(top))
    }
}

pub fn elementary_symmetric_i64(args: &[i64], k: usize) -> Result<BigInt> {
    let big: Vec<BigInt> = args.iter().map(|&a| BigInt::from(a)).collect();
    elementary_symmetric(&big, k)
}

/// `±1, ±3, …, ±(2^e − 1)`.
pub fn signed_odds(e: u32) -> Vec<i64> {
    let top = (1i64 << e) - 1;
    (-top..=top).step_by(2).collect()
}

/// Both sides of `Σ_{c=1}^{p−1} (−1)^{c+1}/c ≡ (2^p − 2)/p (mod p)` as residues.
pub fn signed_reciprocal_sum(p: u64) -> Result<(u64, u64)> {
    if p < 3 || !crate::modarith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
    }
    let mut lhs = 0u64;
    for c in 1..p {
        let inv = inv_mod(c, p).expect("c < p");
        lhs = if c % 2 == 1 { (lhs + inv) % p } else { (lhs + p - inv) % p };
    }
    let p2 = p * p;
    let two_p = mul_mod(pow_mod(2, p - 1, p2), 2, p2);
    let rhs = ((two_p + p2 - 2) % p2 / p) % p;
    Ok((lhs, rhs))
}

/// `Σ_{k=1}^{p−1} C(p^e − 1, k)^{-1}`, exact.
pub fn low_inverse_binomial_sum(p: u64, e: u32) -> Result<Rational> {
    let n = p.checked_pow(e).ok_or_else(|| Error::InvalidArgument("p^e overflows".into()))? - 1;
    let mut acc = Rational::zero();
    for k in 1..p {
        acc += Rational::new(BigInt::one(), BigInt::from(exact_binomial(n, k)?));
    }
    Ok(acc)
}

/// `(p−1)!·H_{p−1}` and `Σ 1/i²` for `i < p`, exact.
pub fn wolstenholme_sums(p: u64) -> (Rational, Rational) {
    let mut h = Rational::zero();
    let mut h2 = Rational::zero();
    let mut fact = BigInt::one();
    for i in 1..p {
        h += Rational::new(BigInt::one(), BigInt::from(i));
        h2 += Rational::new(BigInt::one(), BigInt::from(i * i));
        fact *= i;
    }
    (h * Rational::from_integer(fact), h2)
}
