//! Segmented sieve of Eratosthenes.

const SEGMENT: u64 = 1 << 18;

fn base_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All primes in `[lo, hi)`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_segment(lo, hi, |seg| out.extend_from_slice(seg));
    out
}

/// Calls `f` with the primes of each consecutive sieve segment of `[lo, hi)`.
pub fn for_each_segment(lo: u64, hi: u64, mut f: impl FnMut(&[u64])) {
    let lo = lo.max(2);
    if hi <= lo {
        return;
    }
    let base = base_primes(isqrt(hi - 1) + 1);
    let mut start = lo;
    let mut flags = vec![true; SEGMENT as usize];
    let mut found = Vec::new();
    while start < hi {
        let end = (start + SEGMENT).min(hi);
        let len = (end - start) as usize;
        flags[..len].iter_mut().for_each(|b| *b = true);
        for &q in &base {
            if q * q >= end {
                break;
            }
            let mut j = (start.div_ceil(q) * q).max(q * q);
            while j < end {
                flags[(j - start) as usize] = false;
                j += q;
            }
        }
        found.clear();
        found.extend((0..len).filter(|&i| flags[i]).map(|i| start + i as u64));
        f(&found);
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::is_prime;

    #[test]
    fn sieve_matches_miller_rabin() {
        for (lo, hi) in [(0, 2), (0, 100), (90, 1000), (262_100, 262_200), (999_000, 1_001_000)] {
            let expected: Vec<u64> = (lo..hi).filter(|&n| is_prime(n)).collect();
            assert_eq!(primes_in(lo, hi), expected, "[{lo},{hi})");
        }
        assert_eq!(primes_in(0, 10_000).len(), 1229);
        assert_eq!(primes_in(0, 1_000_000).len(), 78_498);
    }
}
