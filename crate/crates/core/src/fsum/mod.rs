//! Engines for `f(n) = Σ_k C(n,k)^{-1}`.
//!
//! Three independent routes: the direct factorial sum (exact), the
//! recursion `f(n) = (n+1)/(2n)·f(n−1) + 1` (exact), and two residue-ring
//! routes ([`modular`]) that return precision-tracked p-adic values.

pub mod aux;
pub mod modular;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{DiffValuation, PadicValue, Rational, DEFAULT_PRECISION};

pub use modular::{f_padic, f_padic_factorial, f_padic_identity, f_padic_with_guard};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub exact_cap: u64,
    /// Cap for the p=2 identity route, which needs absolute precision ~n.
    pub pow2_identity_cap: u64,
    pub modular_cap: u64,
    pub precision: u32,
    /// Largest guard-digit count tried before reporting exhausted precision.
    pub max_guard: u32,
    /// Modular results for `n` up to this bound are also compared with the exact engine.
    pub cross_exact_cap: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            exact_cap: 5000,
            pow2_identity_cap: 1 << 16,
            modular_cap: 1 << 22,
            precision: DEFAULT_PRECISION,
            max_guard: 512,
            cross_exact_cap: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Direct,
    Recursive,
    Modular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FNumber {
    Exact(Rational),
    Padic(PadicValue),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FValue {
    pub n: u64,
    pub engine: Engine,
    pub value: FNumber,
}

impl FValue {
    pub fn valuation(&self, p: u64) -> Result<i64> {
        match &self.value {
            FNumber::Exact(q) => crate::padic::valuation_rational(q, p),
            FNumber::Padic(v) => v.valuation(),
        }
    }
}

pub fn evaluate(n: u64, engine: Engine, p: u64, cfg: &EngineConfig) -> Result<FValue> {
    let value = match engine {
        Engine::Direct => FNumber::Exact(f_exact_capped(n, cfg.exact_cap)?),
        Engine::Recursive => {
            if n > cfg.exact_cap * 4 {
                return Err(Error::ExactCapExceeded { n, cap: cfg.exact_cap * 4 });
            }
            FNumber::Exact(f_recursive(n))
        }
        Engine::Modular => FNumber::Padic(modular::f_padic_config(n, p, cfg.precision, cfg)?),
    };
    Ok(FValue { n, engine, value })
}

pub fn f_exact(n: u64) -> Result<Rational> {
    f_exact_capped(n, EngineConfig::default().exact_cap)
}

/// `Σ_k k!(n−k)! / n!` over a common denominator.
pub fn f_exact_capped(n: u64, cap: u64) -> Result<Rational> {
    if n > cap {
        return Err(Error::ExactCapExceeded { n, cap });
    }
    let mut fact = Vec::with_capacity(n as usize + 1);
    fact.push(BigUint::one());
    for i in 1..=n {
        let next = &fact[i as usize - 1] * i;
        fact.push(next);
    }
    let mut num = BigUint::zero();
    for k in 0..=n / 2 {
        let term = &fact[k as usize] * &fact[(n - k) as usize];
        if 2 * k == n {
            num += term;
        } else {
            num += term << 1u32;
        }
    }
    Ok(Rational::new(BigInt::from(num), BigInt::from(fact.pop().expect("nonempty"))))
}

/// Applies one step of the forward recursion: `f(n)` from `f(n−1)`.
pub fn rec_forward(n: u64, prev: &Rational) -> Rational {
    debug_assert!(n >= 1);
    let factor = Rational::new(BigInt::from(n + 1), BigInt::from(2 * n));
    prev * factor + Rational::one()
}

/// Inverse recursion: `f(n−1) = (f(n) − 1)·2n/(n+1)`.
pub fn rec_inverse(n: u64, cur: &Rational) -> Rational {
    debug_assert!(n >= 1);
    (cur - Rational::one()) * Rational::new(BigInt::from(2 * n), BigInt::from(n + 1))
}

pub fn f_recursive(n: u64) -> Rational {
    let mut acc = Rational::one();
    for i in 1..=n {
        acc = rec_forward(i, &acc);
    }
    acc
}

/// `f(0..=n)` by the recursion, grown on demand.
#[derive(Clone, Debug, Default)]
pub struct FTable {
    values: Vec<Rational>,
}

impl FTable {
    pub fn new() -> Self {
        FTable { values: vec![Rational::one()] }
    }

    pub fn up_to(n: u64) -> Self {
        let mut t = Self::new();
        t.extend_to(n);
        t
    }

    pub fn extend_to(&mut self, n: u64) {
        if self.values.is_empty() {
            self.values.push(Rational::one());
        }
        while (self.values.len() as u64) <= n {
            let i = self.values.len() as u64;
            let next = rec_forward(i, &self.values[i as usize - 1]);
            self.values.push(next);
        }
    }

    pub fn get(&self, n: u64) -> Option<&Rational> {
        self.values.get(n as usize)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `ν_p(f(m) − f(n))`, certified. Exact arithmetic when both arguments are
/// within the exact cap; otherwise modular values at escalating precision.
pub fn f_diff_valuation(m: u64, n: u64, p: u64) -> Result<i64> {
    f_diff_valuation_with(m, n, p, &EngineConfig::default())
}

pub fn f_diff_valuation_with(m: u64, n: u64, p: u64, cfg: &EngineConfig) -> Result<i64> {
    match f_diff_bound(m, n, p, cfg, 4 * cfg.precision.max(32))? {
        DiffValuation::Exact(v) => Ok(v),
        DiffValuation::AtLeast(_) => Err(Error::PrecisionExhausted),
    }
}

/// Like [`f_diff_valuation_with`], but returns a lower bound instead of
/// failing once the working precision reaches `ceiling` relative digits.
pub fn f_diff_bound(m: u64, n: u64, p: u64, cfg: &EngineConfig, ceiling: u32) -> Result<DiffValuation> {
    if m == n {
        return Err(Error::InvalidArgument("f_diff_valuation needs m != n".into()));
    }
    if m.max(n) <= cfg.exact_cap {
        let d = f_exact_capped(m, cfg.exact_cap)? - f_exact_capped(n, cfg.exact_cap)?;
        return crate::padic::valuation_rational(&d, p).map(DiffValuation::Exact);
    }
    let mut prec = cfg.precision.max(8);
    loop {
        let a = modular::f_padic_config(m, p, prec, cfg)?;
        let b = modular::f_padic_config(n, p, prec, cfg)?;
        let d = a.sub_bound(&b)?;
        if d.exact().is_some() || prec >= ceiling {
            return Ok(d);
        }
        prec = (prec * 2).min(ceiling);
    }
}
