//! Word-sized modular arithmetic and the residue rings `Z/p^M` used by the
//! modular engines and the scanners.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest `M` with `p^M < 2^63`, the limit for [`Mont64`].
pub fn max_word_digits(p: u64) -> u32 {
    let mut m = 0u32;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 63) {
        acc *= p as u128;
        m += 1;
    }
    m
}

pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// `Z/p^M` for some prime power modulus. Elements are ring-internal
/// representations; use `from_u64`/`to_biguint` to cross the boundary.
pub trait ResidueRing {
    type Elem: Clone;

    fn prime(&self) -> u64;
    fn digits(&self) -> u32;
    fn elem(&self, x: u64) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn to_biguint(&self, a: &Self::Elem) -> BigUint;

    fn pow(&self, a: &Self::Elem, mut exp: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// `p^e` inside the ring.
    fn pow_prime(&self, e: u64) -> Self::Elem {
        if e >= self.digits() as u64 {
            return self.zero();
        }
        self.pow(&self.elem(self.prime()), e)
    }

    /// Table of `p^0 .. p^len` inside the ring.
    fn prime_powers(&self, len: usize) -> Vec<Self::Elem> {
        let p = self.elem(self.prime());
        let mut out = Vec::with_capacity(len + 1);
        out.push(self.one());
        for i in 0..len {
            let next = self.mul(&out[i], &p);
            out.push(next);
        }
        out
    }
}

/// Montgomery arithmetic modulo an odd `m < 2^63`.
#[derive(Clone, Debug)]
pub struct Mont64 {
    p: u64,
    digits: u32,
    m: u64,
    m_neg_inv: u64,
    r2: u64,
}

impl Mont64 {
    pub fn new(p: u64, digits: u32) -> Option<Self> {
        if p % 2 == 0 || digits == 0 || digits > max_word_digits(p) {
            return None;
        }
        let m = checked_pow(p, digits)?;
        let mut inv = m;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r = (1u128 << 64) % m as u128;
        let r2 = ((r * r) % m as u128) as u64;
        Some(Mont64 { p, digits, m, m_neg_inv: inv.wrapping_neg(), r2 })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let q = (t as u64).wrapping_mul(self.m_neg_inv);
        let r = ((t + q as u128 * self.m as u128) >> 64) as u64;
        if r >= self.m {
            r - self.m
        } else {
            r
        }
    }

    #[inline]
    pub fn to_plain(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }
}

impl ResidueRing for Mont64 {
    type Elem = u64;

    fn prime(&self) -> u64 {
        self.p
    }
    fn digits(&self) -> u32 {
        self.digits
    }
    #[inline]
    fn elem(&self, x: u64) -> u64 {
        self.redc((x % self.m) as u128 * self.r2 as u128)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        self.elem(1)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.redc(*a as u128 * *b as u128)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        let plain = self.to_plain(*a);
        inv_mod(plain, self.m).map(|x| self.elem(x))
    }
    fn to_biguint(&self, a: &u64) -> BigUint {
        BigUint::from(self.to_plain(*a))
    }
}

/// Arithmetic modulo `2^M` for `M <= 128` using wrapping `u128` operations.
#[derive(Clone, Debug)]
pub struct Pow2Ring {
    digits: u32,
    mask: u128,
}

impl Pow2Ring {
    pub fn new(digits: u32) -> Option<Self> {
        if digits == 0 || digits > 128 {
            return None;
        }
        let mask = if digits == 128 { u128::MAX } else { (1u128 << digits) - 1 };
        Some(Pow2Ring { digits, mask })
    }
}

impl ResidueRing for Pow2Ring {
    type Elem = u128;

    fn prime(&self) -> u64 {
        2
    }
    fn digits(&self) -> u32 {
        self.digits
    }
    fn elem(&self, x: u64) -> u128 {
        x as u128 & self.mask
    }
    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        1
    }
    #[inline]
    fn add(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_add(*b) & self.mask
    }
    #[inline]
    fn sub(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_sub(*b) & self.mask
    }
    #[inline]
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_mul(*b) & self.mask
    }
    fn inv(&self, a: &u128) -> Option<u128> {
        if a & 1 == 0 {
            return None;
        }
        // Newton iteration doubles the number of correct low bits each step.
        let mut x: u128 = *a;
        for _ in 0..7 {
            x = x.wrapping_mul(2u128.wrapping_sub(a.wrapping_mul(x)));
        }
        Some(x & self.mask)
    }
    fn to_biguint(&self, a: &u128) -> BigUint {
        BigUint::from(*a)
    }
    fn pow_prime(&self, e: u64) -> u128 {
        if e >= self.digits as u64 {
            0
        } else {
            1u128 << e
        }
    }
}

/// Arbitrary `p^M` backed by `BigUint`; the slow fallback.
#[derive(Clone, Debug)]
pub struct BigRing {
    p: u64,
    digits: u32,
    m: BigUint,
    /// `2^M − 1` when `p = 2`, so reduction is a mask instead of a division.
    mask: Option<BigUint>,
}

impl BigRing {
    pub fn new(p: u64, digits: u32) -> Self {
        let m = BigUint::from(p).pow(digits);
        let mask = (p == 2).then(|| &m - 1u32);
        BigRing { p, digits, m, mask }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.m
    }

    #[inline]
    pub fn reduce(&self, x: BigUint) -> BigUint {
        match &self.mask {
            Some(mask) => x & mask,
            None => x % &self.m,
        }
    }
}

impl ResidueRing for BigRing {
    type Elem = BigUint;

    fn prime(&self) -> u64 {
        self.p
    }
    fn digits(&self) -> u32 {
        self.digits
    }
    fn elem(&self, x: u64) -> BigUint {
        self.reduce(BigUint::from(x))
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        self.reduce(BigUint::one())
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.m {
            s - &self.m
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.m - (b - a)
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        self.reduce(a * b)
    }
    fn inv(&self, a: &BigUint) -> Option<BigUint> {
        a.modinv(&self.m)
    }
    fn to_biguint(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn pow_prime(&self, e: u64) -> BigUint {
        if e >= self.digits as u64 {
            BigUint::zero()
        } else if self.p == 2 {
            BigUint::one() << e
        } else {
            BigUint::from(self.p).pow(e as u32)
        }
    }
}

/// Splits `n = p^v * u` with `p` not dividing `u`. `n` must be nonzero.
#[inline]
pub fn split_prime_power(mut n: u64, p: u64) -> (u32, u64) {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// `floor(log_p(n))` for `n >= 1`.
pub fn ilog(n: u64, p: u64) -> u32 {
    debug_assert!(n >= 1 && p >= 2);
    let mut k = 0;
    let mut acc = p as u128;
    while acc <= n as u128 {
        acc *= p as u128;
        k += 1;
    }
    k
}

pub fn biguint_to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

/// Runs a generic ring computation in the fastest ring that holds `p^digits`.
#[macro_export]
macro_rules! with_ring {
    ($p:expr, $digits:expr, |$ring:ident| $body:expr) => {{
        let (p, digits) = ($p, $digits);
        if p == 2 && digits <= 128 {
            let $ring = $crate::modarith::Pow2Ring::new(digits).expect("digits in 1..=128");
            $body
        } else if let Some($ring) = $crate::modarith::Mont64::new(p, digits) {
            $body
        } else {
            let $ring = $crate::modarith::BigRing::new(p, digits);
            $body
        }
    }};
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_power_basics() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(6, 9), None);
        assert_eq!(pow_mod(2, 1092, 1093 * 1093), 1);
        assert_eq!(pow_mod(2, 3510, 3511 * 3511), 1);
        assert_ne!(pow_mod(2, 22, 23 * 23), 1);
    }

    #[test]
    fn primality_small_and_large() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn montgomery_matches_plain_arithmetic() {
        let ring = Mont64::new(23, 13).unwrap();
        let m = ring.modulus();
        for (a, b) in [(5u64, 7u64), (m - 1, m - 2), (123_456_789, 987_654_321)] {
            let prod = ring.mul(&ring.elem(a), &ring.elem(b));
            assert_eq!(ring.to_plain(prod), mul_mod(a % m, b % m, m));
        }
        let x = ring.elem(10);
        let xi = ring.inv(&x).unwrap();
        assert_eq!(ring.to_plain(ring.mul(&x, &xi)), 1);
        assert!(ring.inv(&ring.elem(46)).is_none());
        assert!(Mont64::new(23, 14).is_none());
    }

    #[test]
    fn pow2_ring_inverse() {
        let ring = Pow2Ring::new(128).unwrap();
        for a in [1u128, 3, 12345, u128::MAX] {
            let inv = ring.inv(&a).unwrap();
            assert_eq!(ring.mul(&a, &inv), 1);
        }
        let small = Pow2Ring::new(5).unwrap();
        assert_eq!(small.mul(&small.inv(&3).unwrap(), &3), 1);
    }

    #[test]
    fn big_ring_agrees_with_word_rings() {
        let big = BigRing::new(2, 100);
        let small = Pow2Ring::new(100).unwrap();
        let a = 0x1234_5678_9abc_def1u64;
        let x = big.mul(&big.elem(a), &big.inv(&big.elem(3)).unwrap());
        let y = small.mul(&small.elem(a), &small.inv(&3).unwrap());
        assert_eq!(big.to_biguint(&x), small.to_biguint(&y));
        assert_eq!(big.to_biguint(&big.pow_prime(99)), BigUint::one() << 99u32);
        assert!(big.pow_prime(100).is_zero());
        let bo = BigRing::new(23, 20);
        let mo = Mont64::new(23, 13).unwrap();
        let x = bo.to_biguint(&bo.sub(&bo.elem(5), &bo.elem(9))) % mo.modulus();
        assert_eq!(x, mo.to_biguint(&mo.sub(&mo.elem(5), &mo.elem(9))));
    }

    #[test]
    fn logs_and_digit_limits() {
        assert_eq!(ilog(1, 3), 0);
        assert_eq!(ilog(8, 3), 1);
        assert_eq!(ilog(9, 3), 2);
        assert_eq!(max_word_digits(23), 13);
        assert_eq!(max_word_digits(1093), 6);
        assert_eq!(split_prime_power(24, 2), (3, 3));
    }
}
