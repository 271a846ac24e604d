//! Acceptance criteria, each run at tolerance zero against its runtime
//! budget. Prints one PASS/FAIL line per criterion and exits non-zero if
//! any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use invbinom::binomial::nu;
use invbinom::definability::{analyze_definability, find_discontinuity_witness, Verdict};
use invbinom::fsum::modular::{f_padic_config, f_padic_factorial};
use invbinom::fsum::{f_exact, f_recursive, EngineConfig};
use invbinom::padic::valuation_rational;
use invbinom::scan::{scan_good_primes, scan_wieferich, ScanException, ScanOptions};
use invbinom::verify::thm12::regime;
use invbinom::verify::{
    verify_prop_1_1, verify_section2, verify_section3, verify_section4, verify_section5, verify_thm_1_2, wieferich_constant,
    wieferich_constant_grouped, Claim, FContext, Section2Params, Section3Params, Section4Params, Section5Params, Status,
    VerificationReport,
};
use invbinom::{PadicIntegerSpec, PadicValue};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ctx() -> FContext {
    FContext::new(EngineConfig::default())
}

fn no_failures(rows: &[VerificationReport]) -> Result<(), String> {
    let bad: Vec<_> = rows.iter().filter(|r| r.is_failure()).take(3).collect();
    ensure(bad.is_empty(), || format!("failing rows: {bad:?}"))
}

/// Every asserted row with this id must pass, and there must be at least `min` of them.
/// Skipped rows lie outside the hypothesis and are not asserted.
fn asserted(rows: &[VerificationReport], id: &str, min: usize) -> Result<usize, String> {
    let hits: Vec<_> = rows.iter().filter(|r| r.check_id == id && matches!(r.status, Status::Pass | Status::Fail)).collect();
    ensure(hits.len() >= min, || format!("{id}: {} rows, expected at least {min}", hits.len()))?;
    ensure(hits.iter().all(|r| r.status == Status::Pass), || format!("{id}: not all rows pass"))?;
    Ok(hits.len())
}

fn e_err(e: invbinom::Error) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let cfg = EngineConfig::default();
    for n in 0..=500u64 {
        ensure(f_exact(n).map_err(e_err)? == f_recursive(n), || format!("f_exact({n}) != f_recursive({n})"))?;
    }
    let mut checked = 0;
    for p in [2u64, 3, 5, 7, 11, 23] {
        for n in 0..=300u64 {
            let exact = PadicValue::from_rational(&f_exact(n).map_err(e_err)?, p, 8).map_err(e_err)?;
            let modular = f_padic_config(n, p, 8, &cfg).map_err(e_err)?.truncate(8);
            let factorial = f_padic_factorial(n, p, 8, &cfg).map_err(e_err)?.truncate(8);
            ensure(modular == exact && factorial == exact, || {
                format!("f({n}) at p={p}: exact {exact}, modular {modular}, factorial {factorial}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("501 exact/recursive pairs, {checked} p-adic values mod p^8"))
}

fn criterion_2() -> Outcome {
    let rows = verify_prop_1_1(&ctx(), 2000).map_err(e_err)?;
    no_failures(&rows)?;
    let diffs = asserted(&rows, "prop1.1.diff", 1)?;
    let values = asserted(&rows, "prop1.1.value", 1)?;
    Ok(format!("{diffs} difference rows, {values} value rows"))
}

fn criterion_3() -> Outcome {
    let ctx = ctx();
    let mut rows = verify_thm_1_2(&ctx, 2, 6, &(1..=12).collect::<Vec<_>>()).map_err(e_err)?;
    for p in [3u64, 5, 7, 11, 13] {
        rows.extend(verify_thm_1_2(&ctx, p, 4, &(1..=4).collect::<Vec<_>>()).map_err(e_err)?);
    }
    no_failures(&rows)?;
    // Every hypothesis-satisfying (p, k, e) must be asserted, never skipped.
    for r in &rows {
        let (p, k, e) = (r.params["p"] as u64, r.params["k"] as u64, r.params["e"] as u64);
        let bound = regime(p).map_err(e_err)?.hypothesis_bound(p, k);
        let should_assert = e > bound;
        ensure((r.status == Status::Pass) == should_assert, || format!("p={p} k={k} e={e}: status {:?}", r.status))?;
    }
    let pass = rows.iter().filter(|r| r.status == Status::Pass).count();
    Ok(format!("{pass} asserted rows exact, {} outside hypothesis", rows.len() - pass))
}

fn criterion_4() -> Outcome {
    let params = Section2Params { p_list: vec![3, 5, 7, 11, 13], e_max: 4, ..Section2Params::default() };
    let rows = verify_section2(&ctx(), &params).map_err(e_err)?;
    for p in [3i64, 5, 7, 11, 13] {
        for e in 2..=4i64 {
            let r = rows
                .iter()
                .find(|r| r.check_id == "sec2.lemma2.1" && r.params["p"] == p && r.params["e"] == e)
                .ok_or_else(|| format!("no p^e - 2 row for p={p}, e={e}"))?;
            ensure(r.pass && r.measured == Claim::Valuation(-(e - 1)), || format!("{r:?}"))?;
        }
    }
    let w1093 = rows.iter().find(|r| r.check_id == "sec2.lemma2.1" && r.params["p"] == 1093).ok_or("no p=1093 row")?;
    ensure(w1093.status == Status::Pass && w1093.measured == Claim::Valuation(0), || format!("{w1093:?}"))?;
    for (p, k) in [(1093u64, 487u64 * 1093), (3511, 51 * 3511)] {
        let direct = wieferich_constant(p).map_err(e_err)?;
        let grouped = wieferich_constant_grouped(p).map_err(e_err)?;
        ensure(direct == k && grouped == k, || format!("p={p}: {direct}, {grouped}, want {k}"))?;
    }
    Ok("nu_p(f(p^e-2)) = -(e-1); nu_1093(f(1093^2-2)) = 0; constants 487*1093 and 51*3511".into())
}

fn criterion_5() -> Outcome {
    let r = scan_good_primes(3, 10_000, &ScanOptions::default()).map_err(e_err)?;
    let want = vec![ScanException { p: 23, n: Some(12), nu: Some(2), censored: false }];
    ensure(r.exceptions == want, || format!("exceptions {:?}", r.exceptions))?;
    Ok(format!("{} primes, single exception (23, 12, 2)", r.checked_count))
}

fn criterion_6() -> Outcome {
    let r = scan_wieferich(2, 4_000_000, &ScanOptions::default()).map_err(e_err)?;
    let got: Vec<u64> = r.exceptions.iter().map(|e| e.p).collect();
    ensure(got == [1093, 3511], || format!("{got:?}"))?;
    Ok(format!("{} primes, {{1093, 3511}}", r.checked_count))
}

fn criterion_7() -> Outcome {
    let ctx = ctx();
    let mut rows = verify_section2(&ctx, &Section2Params::default()).map_err(e_err)?;
    rows.extend(verify_section3(&ctx, &Section3Params::default()).map_err(e_err)?);
    no_failures(&rows)?;
    for id in [
        "sec2.prop2.3",
        "sec2.lemma2.4",
        "sec2.lemma2.5",
        "sec3.prop3.1",
        "sec3.cor3.2",
        "sec3.prop3.3",
        "sec3.lemma3.4.div",
        "sec3.lemma3.4.stable",
    ] {
        asserted(&rows, id, 1)?;
    }
    for id in ["sec3.23cond.nu", "sec3.23cond.residue"] {
        let r = rows
            .iter()
            .find(|r| r.check_id == id && r.params["p"] == 23 && r.params["c"] == 13)
            .ok_or_else(|| format!("no {id} row for p=23, c=13"))?;
        ensure(r.status == Status::Pass, || format!("{r:?}"))?;
    }
    let pass = rows.iter().filter(|r| r.status == Status::Pass).count();
    Ok(format!("{pass} rows pass, 0 fail"))
}

fn criterion_8() -> Outcome {
    let rows = verify_section4(&ctx(), &Section4Params::default()).map_err(e_err)?;
    let prop41 = rows.iter().find(|r| r.check_id == "sec4.prop4.1").ok_or("no odd-reciprocal row")?;
    ensure(prop41.pass && prop41.measured == Claim::Count(4096), || format!("{prop41:?}"))?;
    asserted(&rows, "sec4.sig1", 10)?;
    asserted(&rows, "sec4.sig2", 9)?;
    asserted(&rows, "sec4.prop4.3", 12)?;
    asserted(&rows, "sec4.induct", 1)?;
    let conj: Vec<_> = rows.iter().filter(|r| r.check_id == "sec4.conjecture" && r.params["e"] >= 4).collect();
    ensure(conj.len() == 11 && conj.iter().all(|r| r.status == Status::Info), || "conjecture rows".into())?;
    let mut pairs = 0;
    let mut broken = Vec::new();
    for e in 1..=14i64 {
        for i in (0..=12i64).filter(|&i| (1i64 << e) > i) {
            let r = rows
                .iter()
                .find(|r| r.check_id == "sec4.2e_plus_i" && r.params["e"] == e && r.params["i"] == i)
                .ok_or_else(|| format!("no row e={e}, i={i}"))?;
            pairs += 1;
            if r.status != Status::Pass {
                broken.push(format!("(e={e}, i={i}): measured {:?}, bound {:?}", r.measured, r.expected));
            }
        }
    }
    // The (2^e+i) inequality is required on the whole grid, small e included.
    ensure(broken.is_empty(), || format!("(2^e+i) inequality fails on {}/{pairs} pairs: {}", broken.len(), broken.join("; ")))?;
    no_failures(&rows)?;
    Ok(format!("{pairs} (e, i) pairs; conjecture rows informational"))
}

fn criterion_9() -> Outcome {
    let rows = verify_section5(&ctx(), &Section5Params::default()).map_err(e_err)?;
    no_failures(&rows)?;
    let count = |id: &str| rows.iter().find(|r| r.check_id == id && matches!(r.expected, Claim::Count(_))).cloned();
    let l51 = count("sec5.lemma5.1").ok_or("no c <= 200 row")?;
    ensure(l51.pass && l51.measured == Claim::Count(200), || format!("{l51:?}"))?;
    let l52 = count("sec5.lemma5.2").ok_or("no sampled-congruence row")?;
    ensure(l52.pass && l52.measured == Claim::Count(500), || format!("{l52:?}"))?;
    let lift = count("sec5.0modp3").ok_or("no (0modp^3) row")?;
    ensure(lift.pass, || format!("{lift:?}"))?;
    let js: BTreeSet<i64> = rows.iter().filter(|r| r.check_id == "sec5.f1" && r.pass).map(|r| r.params["j"]).collect();
    ensure(js == (1..=11).collect(), || format!("(f1) j values {js:?}"))?;
    let f1 = asserted(&rows, "sec5.f1", 11)?;
    Ok(format!(
        "{f1} (f1) rows, 500 samples, {} lift cases",
        match lift.measured {
            Claim::Count(c) => c,
            _ => 0,
        }
    ))
}

fn criterion_10() -> Outcome {
    let ctx = ctx();
    let mut notes = Vec::new();
    for (p, depth) in [(2u64, 10u64), (3, 6), (5, 5)] {
        let spec = PadicIntegerSpec::integer(p, -1).map_err(e_err)?;
        let r = analyze_definability(&ctx, &spec, depth).map_err(e_err)?;
        ensure(r.verdict == Verdict::CauchyEvidence && r.failures() == 0, || format!("-1 at p={p}: {r:?}"))?;
        if p == 2 {
            // The limit is 0: ν_2(f(2^e − 1)) ≥ 2e on every row from e = 3.
            ensure(r.rows.iter().filter(|row| row.n >= 2).all(|row| row.nu_f >= 2 * (row.n as i64 + 1)), || "p=2 rows".into())?;
        } else {
            // The limit is ≡ 1 mod p.
            ensure(r.rows.iter().all(|row| row.residue == Some(1)), || format!("-1 at p={p}: residues"))?;
        }
        notes.push(format!("-1@{p}"));
    }
    for (p, k) in [(2u64, 1u64), (2, 3), (3, 2), (5, 1)] {
        let spec = PadicIntegerSpec::integer(p, -(k as i64) - 1).map_err(e_err)?;
        let depth = if p == 2 {
            12
        } else if p == 3 {
            8
        } else {
            6
        };
        let r = analyze_definability(&ctx, &spec, depth).map_err(e_err)?;
        ensure(r.verdict == Verdict::DivergenceEvidence, || format!("-{}@{p}: verdict {:?}", k + 1, r.verdict))?;
        let reg = regime(p).map_err(e_err)?;
        let tagged: Vec<_> = r.rows.iter().filter(|row| row.expected_nu.is_some()).collect();
        ensure(tagged.len() >= 2, || format!("-{}@{p}: {} tagged rows", k + 1, tagged.len()))?;
        for row in tagged {
            let e = row.n as u32 + 1;
            let want = reg.delta(k) + nu(k, p) as i64 - e as i64;
            ensure(row.nu_f == want, || format!("-{}@{p}, e={e}: {} vs {want}", k + 1, row.nu_f))?;
        }
        notes.push(format!("-{}@{p}", k + 1));
    }
    let spec = PadicIntegerSpec::sparse2(vec![1, 4, 21]).map_err(e_err)?;
    let r = analyze_definability(&ctx, &spec, 2).map_err(e_err)?;
    ensure(r.rows.len() == 3, || format!("sparse rows {}", r.rows.len()))?;
    let d1 = r.rows[0].diff.clone().ok_or("missing diff E1-E0")?;
    let d2 = r.rows[1].diff.clone().ok_or("missing diff E2-E1")?;
    ensure(Claim::AtLeast(1).accepts(&d1) && Claim::AtLeast(2).accepts(&d2), || format!("sparse diffs {d1:?}, {d2:?}"))?;
    Ok(format!("{}; sparse2 (1,4,21): {d1:?}, {d2:?}", notes.join(" ")))
}

/// `ν_2(f(m))` from `f(m) = (m+1)/2^{m+1} · Σ_{k=1}^{m+1} 2^k/k`, summed as
/// one integer after scaling by the odd part of `lcm(1..=m+1)`.
fn nu2_f_exact(m: u64) -> i64 {
    let top = m + 1;
    let mut odd_lcm = BigUint::one();
    for p in (3..=top).step_by(2).filter(|&p| (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)) {
        let mut q = p;
        while q * p <= top {
            q *= p;
        }
        odd_lcm *= q;
    }
    let mut sum = BigInt::zero();
    for k in 1..=top {
        let tz = k.trailing_zeros() as u64;
        let term = (&odd_lcm / (k >> tz)) << (k - tz) as usize;
        sum += BigInt::from(term);
    }
    let v = sum.trailing_zeros().expect("nonzero sum") as i64;
    nu(top, 2) as i64 - top as i64 + v
}

fn criterion_11() -> Outcome {
    let ctx = ctx();
    let mut found = Vec::new();
    for n in [0u64, 6, 14] {
        for e in [3u32, 4] {
            let w = find_discontinuity_witness(&ctx, n, e, None).map_err(e_err)?;
            ensure(nu(w.m.abs_diff(n), 2) == e as u64 && w.metric_exp == e as i64, || format!("{w:?}: metric"))?;
            // Independent exact recomputation of ν_2(f(m) − f(n)).
            let fm = nu2_f_exact(w.m);
            let fn_ = valuation_rational(&f_exact(n).map_err(e_err)?, 2).map_err(e_err)?;
            let image = if w.m <= 5000 {
                valuation_rational(&(f_exact(w.m).map_err(e_err)? - f_exact(n).map_err(e_err)?), 2).map_err(e_err)?
            } else {
                ensure(fm != fn_, || format!("{w:?}: equal valuations, difference not determined"))?;
                fm.min(fn_)
            };
            ensure(image == w.image_exp && image <= -1, || format!("{w:?}: exact image valuation {image}"))?;
            found.push(format!("({n},{e})->m={}", w.m));
        }
    }
    Ok(found.join(" "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("engine equivalence", Duration::from_secs(30), criterion_1),
        ("difference formulas below 2000", Duration::from_secs(60), criterion_2),
        ("valuations at p^e - k - 1", Duration::from_secs(60), criterion_3),
        ("valuations at p^e - 2, Wieferich constants", Duration::from_secs(300), criterion_4),
        ("good-prime scan [3, 10^4)", Duration::from_secs(60), criterion_5),
        ("Wieferich scan [2, 4*10^6)", Duration::from_secs(120), criterion_6),
        ("odd-prime congruence suite", Duration::from_secs(300), criterion_7),
        ("the prime 2 suite", Duration::from_secs(300), criterion_8),
        ("nu = 2 suite", Duration::from_secs(300), criterion_9),
        ("definability reports", Duration::from_secs(300), criterion_10),
        ("discontinuity witnesses", Duration::from_secs(30), criterion_11),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        if only.is_some_and(|o| o != number) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {number:>2} PASS  {name} ({:.1}s): {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {number:>2} FAIL  {name} ({:.1}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
