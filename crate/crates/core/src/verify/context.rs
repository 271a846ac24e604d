use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fsum::modular::{f_padic_config, f_padic_factorial, identity_cap};
use crate::fsum::{EngineConfig, FTable};
use crate::padic::{valuation_rational, DiffValuation, PadicValue, Rational};

/// Shared evaluator for the verifier suites.
///
/// Exact values come from the recursion table (up to `exact_cap`); p-adic
/// values come from the identity route and are re-derived through the
/// factorial route whenever both are within cap, and against the exact
/// table up to `cross_exact_cap`. Any mismatch is [`Error::EngineDisagreement`].
pub struct FContext {
    cfg: EngineConfig,
    table: Mutex<FTable>,
    cache: Mutex<HashMap<(u64, u64), PadicValue>>,
    diff_ceiling: u32,
}

impl FContext {
    pub fn new(cfg: EngineConfig) -> Self {
        let diff_ceiling = 8 * cfg.precision.max(32);
        FContext { cfg, table: Mutex::new(FTable::new()), cache: Mutex::new(HashMap::new()), diff_ceiling }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn exact(&self, n: u64) -> Result<Rational> {
        if n > self.cfg.exact_cap {
            return Err(Error::ExactCapExceeded { n, cap: self.cfg.exact_cap });
        }
        let mut table = self.table.lock().expect("table lock");
        table.extend_to(n);
        Ok(table.get(n).expect("extended").clone())
    }

    pub fn exact_feasible(&self, n: u64) -> bool {
        n <= self.cfg.exact_cap
    }

    pub fn padic_feasible(&self, n: u64) -> bool {
        n <= self.cfg.modular_cap
    }

    /// `f(n)` with at least `precision` relative digits.
    pub fn padic(&self, n: u64, p: u64, precision: u32) -> Result<PadicValue> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&(n, p)) {
            if v.precision().is_some_and(|have| have >= precision) {
                return Ok(v.truncate(precision));
            }
        }
        let primary = f_padic_config(n, p, precision, &self.cfg)?;
        if n <= identity_cap(p, &self.cfg) && n <= self.cfg.modular_cap {
            let other = f_padic_factorial(n, p, precision, &self.cfg)?;
            if !same_digits(&primary, &other) {
                return Err(Error::EngineDisagreement(format!("f({n}) at p={p}: identity route {primary}, factorial route {other}")));
            }
        }
        if n <= self.cfg.cross_exact_cap && !primary.agrees_with(&self.exact(n)?) {
            return Err(Error::EngineDisagreement(format!("f({n}) at p={p}: modular {primary} disagrees with exact value")));
        }
        self.cache.lock().expect("cache lock").insert((n, p), primary.clone());
        Ok(primary)
    }

    /// `ν_p(f(n))`.
    pub fn valuation(&self, n: u64, p: u64) -> Result<i64> {
        let v = self.padic(n, p, 2)?.valuation()?;
        if n > self.cfg.cross_exact_cap && self.exact_feasible(n) {
            let exact = valuation_rational(&self.exact(n)?, p)?;
            if exact != v {
                return Err(Error::EngineDisagreement(format!("nu_{p}(f({n})): exact {exact}, modular {v}")));
            }
        }
        Ok(v)
    }

    /// `ν_p(f(m) − f(n))`; `None` when the difference is exactly zero.
    ///
    /// Exact when both arguments are within the exact cap (and then
    /// confirmed by the modular routes); otherwise certified by precision
    /// escalation, which may end in a lower bound.
    pub fn diff(&self, m: u64, n: u64, p: u64) -> Result<Option<DiffValuation>> {
        if m == n {
            return Ok(None);
        }
        if self.exact_feasible(m.max(n)) {
            let d = self.exact(m)? - self.exact(n)?;
            if d.is_zero() {
                return Ok(None);
            }
            let v = valuation_rational(&d, p)?;
            if self.padic_feasible(m.max(n)) {
                let prec = self.cfg.precision.max(8);
                let modular = self.padic(m, p, prec)?.sub_bound(&self.padic(n, p, prec)?);
                let consistent = match modular {
                    Ok(DiffValuation::Exact(w)) => w == v,
                    Ok(DiffValuation::AtLeast(b)) => b <= v,
                    Err(_) => false,
                };
                if !consistent {
                    return Err(Error::EngineDisagreement(format!("nu_{p}(f({m}) - f({n})): exact {v}, modular {modular:?}")));
                }
            }
            return Ok(Some(DiffValuation::Exact(v)));
        }
        let mut prec = self.cfg.precision.max(8);
        loop {
            let d = self.padic(m, p, prec)?.sub_bound(&self.padic(n, p, prec)?)?;
            if d.exact().is_some() || prec >= self.diff_ceiling {
                return Ok(Some(d));
            }
            prec = (prec * 2).min(self.diff_ceiling);
        }
    }

    /// `f(n) mod p^m`, or `None` when `f(n)` is not p-integral.
    pub fn residue(&self, n: u64, p: u64, m: u32) -> Result<Option<BigUint>> {
        let v = self.padic(n, p, m.max(1))?;
        if v.valuation()? < 0 {
            return Ok(None);
        }
        Ok(v.residue(m))
    }
}

/// Equal on every digit both values claim.
pub(crate) fn same_digits(a: &PadicValue, b: &PadicValue) -> bool {
    match (a.precision(), b.precision()) {
        (Some(na), Some(nb)) => {
            let n = na.min(nb);
            a.truncate(n) == b.truncate(n)
        }
        _ => a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_matches_frozen_values() {
        let ctx = FContext::new(EngineConfig::default());
        assert_eq!(ctx.valuation(12, 23).unwrap(), 2);
        assert_eq!(ctx.valuation(14, 2).unwrap(), -3);
        assert_eq!(ctx.valuation(7, 2).unwrap(), 8);
        assert_eq!(ctx.diff(46, 14, 2).unwrap(), Some(DiffValuation::Exact(-2)));
        assert_eq!(ctx.diff(7, 3, 2).unwrap(), Some(DiffValuation::Exact(3)));
        assert_eq!(ctx.diff(3, 4, 5).unwrap(), None);
        assert_eq!(ctx.residue(0, 5, 3).unwrap(), Some(BigUint::from(1u32)));
        assert_eq!(ctx.residue(14, 2, 3).unwrap(), None);
    }

    #[test]
    fn modular_difference_beyond_exact_cap() {
        let cfg = EngineConfig { exact_cap: 100, cross_exact_cap: 100, ..EngineConfig::default() };
        let ctx = FContext::new(cfg);
        // Both ≡ 14 mod 16 with ν_2(n+2) = 4: ν_2(m−n) + 1 − 8.
        let d = ctx.diff(4078, 2030, 2).unwrap().unwrap();
        assert_eq!(d, DiffValuation::Exact(11 + 1 - 8));
    }
}
