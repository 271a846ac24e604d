//! `ν_2(f(m) − f(n)) = ν_2(m − n) + 1 − 2ν_2(m + 2)` when
//! `ν_2(m+2) = ν_2(n+2) ≥ 4`, and `ν_2(f(n)) = 1 − ν_2(n+2)` for `n ≡ 14 mod 16`.
//! Empirical: asserted only below the supplied bound.

use rayon::prelude::*;

use super::{Claim, FContext, VerificationReport};
use crate::binomial::nu;
use crate::error::{Error, Result};
use crate::params;

pub const MAX_BOUND: u64 = 8000;
pub const DEFAULT_BOUND: u64 = 2000;

pub fn verify_prop_1_1(ctx: &FContext, bound: u64) -> Result<Vec<VerificationReport>> {
    if bound > MAX_BOUND {
        return Err(Error::InvalidArgument(format!("bound {bound} exceeds {MAX_BOUND}")));
    }
    let values: Vec<u64> = (0..bound).filter(|&n| nu(n + 2, 2) >= 4).collect();
    let pairs: Vec<(u64, u64)> = values
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| values[i + 1..].iter().map(move |&m| (m, n)))
        .filter(|&(m, n)| nu(m + 2, 2) == nu(n + 2, 2))
        .collect();

    let mut rows: Vec<VerificationReport> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let expected = nu(m - n, 2) as i64 + 1 - 2 * nu(m + 2, 2) as i64;
            let measured = match ctx.diff(m, n, 2)? {
                Some(d) => Claim::from_diff(d),
                None => Claim::Infinite,
            };
            Ok(VerificationReport::check("prop1.1.diff", params! {"m" => m, "n" => n}, Claim::Valuation(expected), measured))
        })
        .collect::<Result<_>>()?;

    let singles: Vec<VerificationReport> = values
        .par_iter()
        .map(|&n| {
            let expected = 1 - nu(n + 2, 2) as i64;
            let measured = ctx.valuation(n, 2)?;
            Ok(VerificationReport::check("prop1.1.value", params! {"n" => n}, Claim::Valuation(expected), Claim::Valuation(measured)))
        })
        .collect::<Result<_>>()?;
    rows.extend(singles);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsum::EngineConfig;

    #[test]
    fn small_bound_rows() {
        let ctx = FContext::new(EngineConfig::default());
        let rows = verify_prop_1_1(&ctx, 100).unwrap();
        let pair = rows.iter().find(|r| r.params.get("m") == Some(&46) && r.params.get("n") == Some(&14)).unwrap();
        assert_eq!(pair.measured, Claim::Valuation(-2));
        let single = rows.iter().find(|r| r.check_id == "prop1.1.value" && r.params["n"] == 30).unwrap();
        assert_eq!(single.measured, Claim::Valuation(-4));
        assert!(rows.iter().all(|r| r.pass));
        assert!(verify_prop_1_1(&ctx, 8001).is_err());
    }
}
