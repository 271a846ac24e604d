//! Per-prime good-prime test.
//!
//! For `1 ≤ n ≤ p−2`, `f(n) = (n+1)/2^{n+1} · Σ_{k=1}^{n+1} 2^k/k` and the
//! prefactor is a p-unit, so `ν_p(f(n))` is the valuation of the prefix sum.

use crate::error::{Error, Result};
use crate::fsum::FTable;
use crate::modarith::{max_word_digits, Mont64, ResidueRing};
use crate::padic::valuation_rational;

/// Working digits for `p` at the requested depth.
pub fn working_digits(p: u64, depth: u32) -> u32 {
    depth.min(max_word_digits(p))
}

/// `ν_p(f(n))` for `n = 1..=p−2`, each capped at `digits` (a value equal to
/// `digits` means "at least").
pub fn prefix_valuations(p: u64, digits: u32) -> Result<Vec<u32>> {
    let ring = Mont64::new(p, digits).ok_or_else(|| Error::InvalidArgument(format!("no word ring for {p}^{digits}")))?;
    let m = ring.modulus();
    let top = p - 1;
    // Batch inversion of 1..=top: one ring inversion in total.
    let mut prefix = Vec::with_capacity(top as usize + 1);
    prefix.push(ring.one());
    for k in 1..=top {
        let next = ring.mul(&prefix[k as usize - 1], &ring.elem(k));
        prefix.push(next);
    }
    let mut inv_all = ring.inv(&prefix[top as usize]).expect("(p-1)! is a unit");
    let mut inverses = vec![0u64; top as usize + 1];
    for k in (1..=top).rev() {
        inverses[k as usize] = ring.mul(&inv_all, &prefix[k as usize - 1]);
        inv_all = ring.mul(&inv_all, &ring.elem(k));
    }
    drop(prefix);

    let two = ring.elem(2);
    let mut pow = ring.one();
    let mut sum = ring.zero();
    let mut out = Vec::with_capacity(top.saturating_sub(1) as usize);
    for k in 1..=top {
        pow = ring.mul(&pow, &two);
        sum = ring.add(&sum, &ring.mul(&pow, &inverses[k as usize]));
        if k >= 2 {
            out.push(valuation_word(ring.to_plain(sum), p, digits, m));
        }
    }
    Ok(out)
}

fn valuation_word(mut x: u64, p: u64, digits: u32, m: u64) -> u32 {
    debug_assert!(x < m);
    if x == 0 {
        return digits;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Compares every fast-path valuation for `p` with the exact value of
/// `f(n)`; a mismatch is an engine disagreement.
pub fn oracle_check(p: u64, digits: u32, fast: &[u32], table: &mut FTable) -> Result<()> {
    table.extend_to(p.saturating_sub(2));
    for (idx, &v) in fast.iter().enumerate() {
        let n = idx as u64 + 1;
        let exact = valuation_rational(table.get(n).expect("extended"), p)?;
        let agrees = if v < digits { exact == v as i64 } else { exact >= digits as i64 };
        if !agrees {
            return Err(Error::EngineDisagreement(format!(
                "good-prime fast path at p={p}, n={n}: {v} (of {digits} digits), exact {exact}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_three_has_the_known_exception() {
        let v = prefix_valuations(23, 3).unwrap();
        let high: Vec<(u64, u32)> = v.iter().enumerate().filter(|(_, &x)| x > 1).map(|(i, &x)| (i as u64 + 1, x)).collect();
        assert_eq!(high, vec![(12, 2)]);
    }

    #[test]
    fn fast_path_matches_exact_values_below_200() {
        let mut table = FTable::new();
        for p in crate::primes::primes_in(3, 200) {
            let d = working_digits(p, 3);
            let v = prefix_valuations(p, d).unwrap();
            oracle_check(p, d, &v, &mut table).unwrap();
        }
    }
}
