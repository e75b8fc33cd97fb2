//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use qrious_cli::search::{search, CandidateVerdict};
use qrious_core::laurent::{g2_product, verify_g2, G2Options, DEFAULT_TERM_BUDGET};
use qrious_core::poly::divisors;
use qrious_core::qratio::{
    expected_degree, known_families, lookup_family, positivity_scan_family, q_factorial_direct, q_ratio_poly,
    reduce_cq_check, PositivityStatus, QRatio,
};
use qrious_core::ratio::{box_points, check_integrality_1d, check_integrality_scan};
use qrious_core::{cyclotomic, factorial_big, Evaluation, IntPoly, RatioSpec, Verdict};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn integer(spec: &RatioSpec, v: &[i64]) -> Option<BigUint> {
    match spec.eval_big(v) {
        Ok(Evaluation::Integer(x)) => Some(x),
        _ => None,
    }
}

fn a_integral_on_box() -> Check {
    let a = &lookup_family("A").unwrap().spec;
    ensure(check_integrality_scan(a, 120, 8).is_ok_and(|v| v.is_integral()), || {
        "residue scan did not certify A".into()
    })?;
    // Direct factorial products, independent of the ratio evaluator.
    let f = |x: i64| factorial_big(x as u64);
    for m in 0..=40i64 {
        for n in 0..=40i64 {
            let num = f(3 * m + 3 * n) * f(3 * n) * f(2 * m) * f(2 * n);
            let den = f(2 * m + 3 * n) * f(m + 2 * n) * f(m + n) * f(m) * f(n) * f(n);
            ensure(&num % &den == BigUint::from(0u8), || format!("A({m},{n}) is not an integer"))?;
            ensure(integer(a, &[m, n]) == Some(&num / &den), || format!("evaluator disagrees at ({m},{n})"))?;
        }
    }
    let spot = |v: [i64; 2]| integer(a, &v).map(|x| x.to_string());
    ensure(spot([0, 0]).as_deref() == Some("1"), || "A(0,0) != 1".into())?;
    ensure(spot([1, 0]).as_deref() == Some("6"), || "A(1,0) != 6".into())?;
    ensure(spot([0, 1]).as_deref() == Some("6"), || "A(0,1) != 6".into())
}

fn chebyshev() -> Check {
    let c = &lookup_family("C").unwrap().spec;
    ensure(check_integrality_1d(c) == Ok(Verdict::Integral { depth: 30 }), || {
        "one-parameter criterion did not certify C".into()
    })?;
    for n in 0..=20u64 {
        let f = factorial_big;
        let num = f(30 * n) * f(n);
        let den = f(15 * n) * f(10 * n) * f(6 * n);
        ensure(&num % &den == BigUint::from(0u8), || format!("C({n}) is not an integer"))?;
        ensure(integer(c, &[n as i64]) == Some(&num / &den), || format!("evaluator disagrees at {n}"))?;
    }
    for t in 0..30i64 {
        let step = |a: i64| (a * t).div_euclid(30);
        let value = step(30) + step(1) - step(15) - step(10) - step(6);
        ensure(value >= 0, || format!("step function negative at {t}/30"))?;
    }
    Ok(())
}

fn registry_shapes() -> Check {
    for f in known_families() {
        for v in box_points(f.spec.k(), 6).filter(|v| f.in_domain(v)) {
            let p = match q_ratio_poly(&f.spec, &v) {
                Ok(QRatio::Polynomial(p)) => p,
                other => return Err(format!("{} at {v:?}: {other:?}", f.name)),
            };
            let shaped = p.is_monic()
                && p.is_palindromic()
                && p.constant_coeff() == BigInt::from(1)
                && p.degree().map(|d| d as i64) == expected_degree(&f.spec, &v).ok();
            ensure(shaped, || format!("{} at {v:?}: wrong shape", f.name))?;
        }
    }
    Ok(())
}

fn oracle_equivalence() -> Check {
    let direct: Vec<IntPoly> = (0..=40).map(q_factorial_direct).collect();
    let product = |vals: &[u64]| vals.iter().fold(IntPoly::one(), |acc, &x| acc.mul(&direct[x as usize]));
    for f in known_families() {
        let points: Vec<Vec<i64>> = box_points(f.spec.k(), 40)
            .filter(|v| f.in_domain(v))
            .filter(|v| f.spec.form_values(v).is_ok_and(|(n, d)| n.iter().chain(&d).all(|&x| x <= 40)))
            .collect();
        ensure(!points.is_empty(), || format!("{}: no points tried", f.name))?;
        points.par_iter().try_for_each(|v| {
            let (num, den) = f.spec.form_values(v).map_err(|e| e.to_string())?;
            let p = q_ratio_poly(&f.spec, v)
                .ok()
                .and_then(QRatio::into_polynomial)
                .ok_or_else(|| format!("{} at {v:?}: no polynomial", f.name))?;
            ensure(p.mul(&product(&den)) == product(&num), || {
                format!("{} at {v:?}: cross-multiplied products differ", f.name)
            })?;
            let at_one = BigUint::try_from(p.eval_i64(1)).ok();
            ensure(at_one == integer(&f.spec, v), || format!("{} at {v:?}: q=1 value differs", f.name))
        })?;
    }
    Ok(())
}

fn positivity() -> Check {
    for (name, bound) in [("Aq", 5), ("Cq", 2)] {
        let f = lookup_family(name).unwrap();
        let report = positivity_scan_family(f, bound).map_err(|e| e.to_string())?;
        ensure(report.status == PositivityStatus::AllNonNegative, || {
            format!("{name} box {bound}: {:?}", report.status)
        })?;
    }
    Ok(())
}

fn g2_constant_term() -> Check {
    for total in 0..=3u32 {
        for m in 0..=total {
            let n = total - m;
            ensure(verify_g2(m, n, DEFAULT_TERM_BUDGET) == Ok(true), || format!("identity fails at ({m},{n})"))?;
        }
    }
    let a = &lookup_family("A").unwrap().spec;
    let q1 = G2Options {
        at_q_one: true,
        ..G2Options::default()
    };
    for total in 0..=4u32 {
        for m in 0..=total {
            let n = total - m;
            let ct = g2_product(m, n, &q1).map_err(|e| e.to_string())?.constant_term();
            let expected = integer(a, &[m as i64, n as i64]).map(|x| IntPoly::constant(BigInt::from(x)));
            ensure(Some(ct) == expected, || format!("q=1 constant term differs from A at ({m},{n})"))?;
        }
    }
    Ok(())
}

fn chebyshev_reduction() -> Check {
    ensure(reduce_cq_check(3), || "C_q(0,n) differs from the q-Chebyshev ratio".into())
}

fn search_finds_chebyshev() -> Check {
    let found = search(31, 2);
    let hit = found
        .iter()
        .any(|c| c.num == [30, 1] && c.den == [15, 10, 6] && c.verdict == CandidateVerdict::Integral);
    ensure(hit, || "(30,1 ; 15,10,6) missing or not integral".into())?;
    let errors = found
        .iter()
        .filter(|c| matches!(c.verdict, CandidateVerdict::InternalError { .. }))
        .count();
    ensure(errors == 0, || format!("{errors} INTERNAL-ERROR rows"))
}

fn kernel_round_trips() -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let random_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
        let len = rng.gen_range(1..12);
        let mut c: Vec<i64> = (0..len).map(|_| rng.gen_range(-50..=50)).collect();
        // Monic divisors keep the round trip exact.
        *c.last_mut().unwrap() = 1;
        IntPoly::from_i64s(&c)
    };
    for i in 0..1000 {
        let a = random_poly(&mut rng);
        let b = random_poly(&mut rng);
        let back = a.mul(&b).exact_div(&b).map_err(|e| format!("round trip {i}: {e}"))?;
        ensure(back == a, || format!("round trip {i} lost information"))?;
    }
    for d in 1..=120u64 {
        let prod = divisors(d).into_iter().fold(IntPoly::one(), |acc, c| acc.mul(&cyclotomic(c)));
        let mut target = vec![0i64; d as usize + 1];
        target[0] = -1;
        target[d as usize] = 1;
        ensure(prod == IntPoly::from_i64s(&target), || format!("divisor product fails at {d}"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("A(m,n) is an integer for 0 <= m,n <= 40", a_integral_on_box),
        ("Chebyshev ratio certified and cross-checked", chebyshev),
        ("registry q-analogues are monic palindromic polynomials on box 6", registry_shapes),
        ("assembled q-analogues match direct q-factorial products", oracle_equivalence),
        ("A_q box 5 and C_q box 2 have no negative coefficients", positivity),
        ("G2 constant term identity and q=1 specialization", g2_constant_term),
        ("C_q(0,n) reduces to the q-Chebyshev ratio", chebyshev_reduction),
        ("search up to sum 31 finds the Chebyshev ratio", search_finds_chebyshev),
        ("polynomial kernel round trips and divisor products", kernel_round_trips),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS [{}] {name} ({secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL [{}] {name}: {e} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
