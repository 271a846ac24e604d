//! Residue-ring routes to `f(n)` as a p-adic value.
//!
//! * identity route: `f(n) = (n+1)·2^{−(n+1)}·Σ_{k=1}^{n+1} 2^k/k`;
//! * factorial route: `f(n) = Σ_k p^{−ν_p C(n,k)}·F_k F_{n−k} / F_n` where
//!   `F_m` is the p-free part of `m!`.
//!
//! Both run in `Z/p^M` with one modular inversion per evaluation. The
//! identity route needs `M ≳ n` digits when `p = 2`, which is why it has its
//! own cap there.

use num_bigint::BigUint;
use num_traits::Zero;

use super::EngineConfig;
use crate::error::{Error, Result};
use crate::modarith::{ilog, split_prime_power, ResidueRing};
use crate::padic::{split_biguint, PadicValue};
use crate::with_ring;

const FIRST_GUARD: u32 = 2;

/// `f(n)` to relative precision `precision`, default caps, guard escalation.
pub fn f_padic(n: u64, p: u64, precision: u32) -> Result<PadicValue> {
    f_padic_config(n, p, precision, &EngineConfig::default())
}

/// Identity route when within its cap, otherwise the factorial route.
pub fn f_padic_config(n: u64, p: u64, precision: u32, cfg: &EngineConfig) -> Result<PadicValue> {
    check_prime(p)?;
    if n <= identity_cap(p, cfg) {
        f_padic_identity(n, p, precision, cfg)
    } else {
        f_padic_factorial(n, p, precision, cfg)
    }
}

pub fn identity_cap(p: u64, cfg: &EngineConfig) -> u64 {
    if p == 2 {
        cfg.pow2_identity_cap.min(cfg.modular_cap)
    } else {
        cfg.modular_cap
    }
}

fn check_prime(p: u64) -> Result<()> {
    if crate::modarith::is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn escalate(cfg: &EngineConfig, mut attempt: impl FnMut(u32) -> Result<PadicValue>) -> Result<PadicValue> {
    let mut guard = FIRST_GUARD;
    loop {
        match attempt(guard) {
            Err(Error::PrecisionExhausted) if guard < cfg.max_guard => guard = (guard * 2).min(cfg.max_guard),
            other => return other,
        }
    }
}

pub fn f_padic_identity(n: u64, p: u64, precision: u32, cfg: &EngineConfig) -> Result<PadicValue> {
    check_prime(p)?;
    let cap = identity_cap(p, cfg);
    if n > cap {
        return Err(Error::ModularCapExceeded { n, cap });
    }
    escalate(cfg, |guard| identity_at_guard(n, p, precision, guard))
}

/// Identity route at a fixed number of guard digits; surfaces
/// [`Error::PrecisionExhausted`] instead of retrying.
pub fn f_padic_with_guard(n: u64, p: u64, precision: u32, guard: u32, cfg: &EngineConfig) -> Result<PadicValue> {
    check_prime(p)?;
    let cap = identity_cap(p, cfg);
    if n > cap {
        return Err(Error::ModularCapExceeded { n, cap });
    }
    identity_at_guard(n, p, precision, guard)
}

pub fn f_padic_factorial(n: u64, p: u64, precision: u32, cfg: &EngineConfig) -> Result<PadicValue> {
    check_prime(p)?;
    if n > cfg.modular_cap {
        return Err(Error::ModularCapExceeded { n, cap: cfg.modular_cap });
    }
    escalate(cfg, |guard| factorial_at_guard(n, p, precision, guard))
}

fn modulus(p: u64, digits: u32) -> BigUint {
    BigUint::from(p).pow(digits)
}

/// Splits a ring residue into `(ν, unit)` and checks `precision` digits survive.
fn certify(residue: BigUint, p: u64, working: u32, precision: u32) -> Result<(u64, BigUint)> {
    if residue.is_zero() {
        return Err(Error::PrecisionExhausted);
    }
    let (t, unit) = split_biguint(&residue, p);
    if (working as u64) < t + precision as u64 {
        return Err(Error::PrecisionExhausted);
    }
    Ok((t, unit))
}

fn identity_at_guard(n: u64, p: u64, precision: u32, guard: u32) -> Result<PadicValue> {
    if precision == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    let (v1, u1) = split_prime_power(n + 1, p);
    let out_mod = modulus(p, precision);
    if p == 2 {
        let working = (n + 1 + precision as u64 + v1 as u64 + guard as u64) as u32;
        let s = with_ring!(2, working, |ring| identity_two_core(&ring, n));
        let (t, unit_s) = certify(s, 2, working, precision)?;
        let unit = (unit_s * u1) % &out_mod;
        let valuation = v1 as i64 + t as i64 - (n + 1) as i64;
        return PadicValue::new(2, valuation, unit, precision);
    }
    let v_max = ilog(n + 1, p);
    let working = precision + v_max + guard;
    let t_res = with_ring!(p, working, |ring| identity_odd_core(&ring, n, v_max));
    let (t, unit_t) = certify(t_res, p, working, precision)?;
    let two_pow = BigUint::from(2u32).modpow(&BigUint::from(n + 1), &out_mod);
    let two_inv = two_pow.modinv(&out_mod).ok_or(Error::DivisionByZero)?;
    let unit = (unit_t * u1 % &out_mod) * two_inv % &out_mod;
    let valuation = v1 as i64 + t as i64 - v_max as i64;
    PadicValue::new(p, valuation, unit, precision)
}

/// `p^V · Σ_{k=1}^{n+1} 2^k/k` for odd `p`, as a plain residue.
fn identity_odd_core<R: ResidueRing>(ring: &R, n: u64, v_max: u32) -> BigUint {
    let p = ring.prime();
    let pows = ring.prime_powers(v_max as usize);
    let two = ring.elem(2);
    let mut pw2 = ring.one();
    let (mut num, mut den) = (ring.zero(), ring.one());
    for k in 1..=n + 1 {
        pw2 = ring.mul(&pw2, &two);
        let (v, u) = split_prime_power(k, p);
        let a = ring.mul(&pw2, &pows[(v_max - v) as usize]);
        let ue = ring.elem(u);
        num = ring.add(&ring.mul(&num, &ue), &ring.mul(&a, &den));
        den = ring.mul(&den, &ue);
    }
    let den_inv = ring.inv(&den).expect("product of p-units is invertible");
    ring.to_biguint(&ring.mul(&num, &den_inv))
}

/// `Σ_{k=1}^{n+1} 2^k/k` modulo `2^M` (every term is a 2-adic integer).
fn identity_two_core<R: ResidueRing>(ring: &R, n: u64) -> BigUint {
    let (mut num, mut den) = (ring.zero(), ring.one());
    for k in 1..=n + 1 {
        let (v, u) = split_prime_power(k, 2);
        let a = ring.pow_prime(k - v as u64);
        let ue = ring.elem(u);
        num = ring.add(&ring.mul(&num, &ue), &ring.mul(&a, &den));
        den = ring.mul(&den, &ue);
    }
    let den_inv = ring.inv(&den).expect("odd product is invertible");
    ring.to_biguint(&ring.mul(&num, &den_inv))
}

fn factorial_at_guard(n: u64, p: u64, precision: u32, guard: u32) -> Result<PadicValue> {
    if precision == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    let b = if n == 0 { 0 } else { ilog(n, p) };
    let working = precision + b + guard;
    let (t_res, fn_res) = with_ring!(p, working, |ring| factorial_core(&ring, n, b));
    let (t, unit_t) = certify(t_res, p, working, precision)?;
    let out_mod = modulus(p, precision);
    let fn_inv = (fn_res % &out_mod).modinv(&out_mod).ok_or(Error::DivisionByZero)?;
    let unit = unit_t * fn_inv % &out_mod;
    PadicValue::new(p, t as i64 - b as i64, unit, precision)
}

/// Returns `(Σ_k p^{B−ν_k} F_k F_{n−k}, F_n)` as plain residues.
fn factorial_core<R: ResidueRing>(ring: &R, n: u64, b: u32) -> (BigUint, BigUint) {
    let p = ring.prime();
    let mut units = Vec::with_capacity(n as usize + 1);
    units.push(ring.one());
    for i in 1..=n {
        let (_, u) = split_prime_power(i, p);
        let next = ring.mul(&units[i as usize - 1], &ring.elem(u));
        units.push(next);
    }
    let pows = ring.prime_powers(b as usize);
    let mut nu_k: i64 = 0;
    let mut total = ring.zero();
    for k in 0..=n / 2 {
        if k > 0 {
            nu_k += split_prime_power(n - k + 1, p).0 as i64 - split_prime_power(k, p).0 as i64;
        }
        let shift = &pows[(b as i64 - nu_k) as usize];
        let term = ring.mul(shift, &ring.mul(&units[k as usize], &units[(n - k) as usize]));
        total = ring.add(&total, &term);
        if 2 * k != n {
            total = ring.add(&total, &term);
        }
    }
    (ring.to_biguint(&total), ring.to_biguint(&units[n as usize]))
}

/// Plain `f(n) mod p^m` for p-integral `f(n)`, through the factorial route.
pub fn f_residue(n: u64, p: u64, m: u32, cfg: &EngineConfig) -> Result<Option<BigUint>> {
    let v = f_padic_factorial(n, p, m.max(1), cfg)?;
    Ok(v.residue(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsum::{f_exact, FTable};

    #[test]
    fn documented_valuations() {
        assert_eq!(f_padic(14, 2, 4).unwrap().valuation().unwrap(), -3);
        assert_eq!(f_padic(12, 23, 4).unwrap().valuation().unwrap(), 2);
        assert_eq!(f_padic(30, 2, 4).unwrap().valuation().unwrap(), -4);
        assert_eq!(f_padic(0, 5, 3).unwrap(), PadicValue::new(5, 0, BigUint::from(1u32), 3).unwrap());
    }

    #[test]
    fn routes_match_exact_values() {
        // The identity route is external to the factorial-sum definition;
        // both modular routes are gated on the exact table here.
        let cfg = EngineConfig::default();
        let table = FTable::up_to(300);
        for p in [2u64, 3, 5, 7, 11, 23] {
            for n in 0..=300u64 {
                let exact = table.get(n).unwrap();
                let a = f_padic_identity(n, p, 8, &cfg).unwrap();
                let b = f_padic_factorial(n, p, 8, &cfg).unwrap();
                assert!(a.agrees_with(exact), "identity n={n} p={p}");
                assert!(b.agrees_with(exact), "factorial n={n} p={p}");
            }
        }
    }

    #[test]
    fn fixed_guard_reports_exhaustion() {
        let cfg = EngineConfig::default();
        // ν_2(f(7)) = 8 is far above the budget of zero guard digits.
        assert!(matches!(f_padic_with_guard(7, 2, 4, 0, &cfg), Err(Error::PrecisionExhausted)));
        let v = f_padic(7, 2, 4).unwrap();
        assert_eq!(v.valuation().unwrap(), 8);
        assert!(v.agrees_with(&f_exact(7).unwrap()));
    }

    #[test]
    fn caps_are_enforced() {
        let cfg = EngineConfig { pow2_identity_cap: 100, modular_cap: 1000, ..EngineConfig::default() };
        assert!(matches!(f_padic_identity(101, 2, 4, &cfg), Err(Error::ModularCapExceeded { n: 101, cap: 100 })));
        assert!(f_padic_config(500, 2, 4, &cfg).is_ok());
        assert!(matches!(f_padic_factorial(1001, 3, 4, &cfg), Err(Error::ModularCapExceeded { .. })));
        assert!(matches!(f_padic(10, 4, 4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn large_arguments_agree_across_routes() {
        let cfg = EngineConfig::default();
        for (n, p) in [(4095u64, 2u64), (6000, 3), (20_000, 23), (12_166, 23)] {
            let a = f_padic_identity(n, p, 6, &cfg).unwrap();
            let b = f_padic_factorial(n, p, 6, &cfg).unwrap();
            assert_eq!(a, b, "n={n} p={p}");
        }
    }
}
