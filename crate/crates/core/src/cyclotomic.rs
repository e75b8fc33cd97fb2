//! Cyclotomic polynomials with a process-wide memo table.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::One;

use crate::poly::{divisors, IntPoly};

fn cache() -> &'static RwLock<HashMap<u64, Arc<IntPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<IntPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The `d`-th cyclotomic polynomial `Φ_d(q)`.
///
/// Built as `q^d - 1` divided exactly by `Φ_e` for every proper divisor `e`
/// of `d`. Entries are written once and shared afterwards.
///
/// # Panics
///
/// Panics if `d == 0`.
pub fn cyclotomic(d: u64) -> Arc<IntPoly> {
    assert!(d >= 1, "cyclotomic index must be positive");
    if let Some(p) = cache().read().expect("cyclotomic cache poisoned").get(&d) {
        return Arc::clone(p);
    }
    let mut poly = IntPoly::monomial(BigInt::one(), d as usize);
    poly = &poly - &IntPoly::one();
    for e in divisors(d) {
        if e == d {
            break;
        }
        poly = poly
            .exact_div(&cyclotomic(e))
            .expect("q^d - 1 is divisible by every Φ_e with e | d");
    }
    let mut table = cache().write().expect("cyclotomic cache poisoned");
    Arc::clone(table.entry(d).or_insert_with(|| Arc::new(poly)))
}

/// Fills the memo table for every index up to `max_d`.
///
/// Call this before fanning out across threads so workers only read.
pub fn warm_cyclotomics(max_d: u64) {
    for d in 1..=max_d {
        cyclotomic(d);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_indices() {
        assert_eq!(*cyclotomic(1), IntPoly::from_i64s(&[-1, 1]));
        assert_eq!(*cyclotomic(2), IntPoly::from_i64s(&[1, 1]));
        assert_eq!(*cyclotomic(12), IntPoly::from_i64s(&[1, 0, -1, 0, 1]));
        assert_eq!(*cyclotomic(7), IntPoly::from_i64s(&[1; 7]));
    }

    #[test]
    fn first_non_unit_coefficient() {
        // Φ_105 is the smallest cyclotomic polynomial with a coefficient -2.
        let p = cyclotomic(105);
        assert_eq!(p.degree(), Some(48));
        assert_eq!(p.coeff(7), BigInt::from(-2));
        assert_eq!(p.coeff(41), BigInt::from(-2));
    }

    #[test]
    fn concurrent_warmup_agrees() {
        let handles: Vec<_> = (0..4)
            .map(|_| std::thread::spawn(|| (1..=60).map(|d| (*cyclotomic(d)).clone()).collect::<Vec<_>>()))
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for r in &results[1..] {
            assert_eq!(r, &results[0]);
        }
    }
}
