//! q-factorial ratios.
//!
//! With `[m]! = Π_{i=1}^m (1-q^i)/(1-q)` and `1 - q^i = -Π_{d|i} Φ_d(q)`,
//! a q-factorial factors as `[m]! = Π_{d≥2} Φ_d^{⌊m/d⌋}`. A balanced
//! q-factorial ratio at `v` is therefore `Π_{d≥2} Φ_d^{e_d}` with `e_d` the
//! floor sum `Δ(v, d)`, and it is a polynomial exactly when every `e_d ≥ 0`.

mod families;
mod positivity;

pub use families::{known_families, lookup_family, Domain, Family};
pub use positivity::{
    positivity_scan, positivity_scan_family, positivity_table, positivity_table_family, MinCoefficient, Outcome,
    PointIssue, PointRow, PointTable, PositivityReport, PositivityStatus, PositivityWitness,
};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::cyclotomic;
use crate::poly::{divisors, mobius, IntPoly};
use crate::ratio::{RatioError, RatioSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QError {
    #[error("spec is not balanced; the (1-q) normalisation does not cancel")]
    Unbalanced,
    #[error(transparent)]
    Ratio(#[from] RatioError),
}

/// Exponent `e_d` of each `Φ_d` (`d ≥ 2`) in a q-factorial ratio; zero entries are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CyclotomicExponents(BTreeMap<u64, i64>);

impl CyclotomicExponents {
    pub fn get(&self, d: u64) -> i64 {
        self.0.get(&d).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.0.iter().map(|(&d, &e)| (d, e))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.0.keys().next_back().copied()
    }

    /// The negative exponent with the smallest index, if any.
    pub fn first_negative(&self) -> Option<(u64, i64)> {
        self.iter().find(|&(_, e)| e < 0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.first_negative().is_none()
    }

    /// Degree of `Π Φ_d^{e_d}`, i.e. `Σ e_d φ(d)`.
    pub fn degree(&self) -> i64 {
        self.iter()
            .map(|(d, e)| e * cyclotomic(d).degree().expect("nonzero") as i64)
            .sum()
    }
}

impl FromIterator<(u64, i64)> for CyclotomicExponents {
    fn from_iter<I: IntoIterator<Item = (u64, i64)>>(iter: I) -> Self {
        CyclotomicExponents(iter.into_iter().filter(|&(_, e)| e != 0).collect())
    }
}

impl fmt::Display for CyclotomicExponents {
    /// `Φ2·Φ3^2`; the empty product prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(d, e)| if e == 1 { format!("Φ{d}") } else { format!("Φ{d}^{e}") })
            .collect();
        f.write_str(&parts.join("·"))
    }
}

/// Result of assembling a q-factorial ratio at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QRatio {
    Polynomial(IntPoly),
    /// `Φ_d` appears with a negative exponent.
    NotPolynomial { d: u64, exponent: i64 },
}

impl QRatio {
    pub fn polynomial(&self) -> Option<&IntPoly> {
        match self {
            QRatio::Polynomial(p) => Some(p),
            QRatio::NotPolynomial { .. } => None,
        }
    }

    pub fn into_polynomial(self) -> Option<IntPoly> {
        match self {
            QRatio::Polynomial(p) => Some(p),
            QRatio::NotPolynomial { .. } => None,
        }
    }
}

/// How a cyclotomic product is multiplied out.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Assembly {
    /// Each `Φ_d` is applied as `Π_{c|d} (1-q^c)^{μ(d/c)}`: linear-time
    /// multiplications and exact divisions by binomials.
    #[default]
    Binomial,
    /// Dense `Φ_d` from the memo table, raised by repeated squaring and
    /// multiplied in schoolbook fashion.
    Dense,
}

/// `e_d = Δ(v, d)` for `2 ≤ d ≤` the largest factorial argument at `v`.
pub fn q_ratio_exponents(spec: &RatioSpec, v: &[i64]) -> Result<CyclotomicExponents, QError> {
    if !spec.is_balanced() {
        return Err(QError::Unbalanced);
    }
    let (num, den) = spec.form_values(v)?;
    let top = num.iter().chain(&den).copied().max().unwrap_or(0);
    Ok((2..=top).map(|d| (d, spec.floor_sum(v, d))).collect())
}

/// Multiplies out `Π Φ_d^{e_d}` in increasing `d`. `None` if some exponent is negative.
pub fn assemble(exps: &CyclotomicExponents, how: Assembly) -> Option<IntPoly> {
    if !exps.is_polynomial() {
        return None;
    }
    let mut acc = IntPoly::one();
    match how {
        Assembly::Binomial => {
            for (d, e) in exps.iter() {
                let (up, down): (Vec<u64>, Vec<u64>) = divisors(d)
                    .into_iter()
                    .filter(|&c| mobius(d / c) != 0)
                    .partition(|&c| mobius(d / c) == 1);
                for _ in 0..e {
                    for &c in &up {
                        acc.mul_one_minus_q_pow(c as usize);
                    }
                    for &c in &down {
                        acc.div_one_minus_q_pow(c as usize)
                            .expect("a product of cyclotomic factors is divisible by each binomial step");
                    }
                }
            }
        }
        Assembly::Dense => {
            for (d, e) in exps.iter() {
                acc = acc.mul(&cyclotomic(d).pow(e as u32));
            }
        }
    }
    Some(acc)
}

/// The q-factorial ratio at `v` as an explicit polynomial, or the first negative exponent.
pub fn q_ratio_poly(spec: &RatioSpec, v: &[i64]) -> Result<QRatio, QError> {
    q_ratio_poly_with(spec, v, Assembly::default())
}

pub fn q_ratio_poly_with(spec: &RatioSpec, v: &[i64], how: Assembly) -> Result<QRatio, QError> {
    let exps = q_ratio_exponents(spec, v)?;
    Ok(match exps.first_negative() {
        Some((d, exponent)) => QRatio::NotPolynomial { d, exponent },
        None => QRatio::Polynomial(assemble(&exps, how).expect("all exponents non-negative")),
    })
}

/// `[m] = 1 + q + … + q^{m-1}`.
pub fn q_integer(m: u64) -> IntPoly {
    IntPoly::from_coeffs(vec![BigInt::one(); m as usize])
}

/// `[m]! = [1][2]⋯[m]` by plain polynomial multiplication.
pub fn q_factorial_direct(m: u64) -> IntPoly {
    (1..=m).fold(IntPoly::one(), |acc, i| acc.mul(&q_integer(i)))
}

/// `Σ T(A_i(v)) − Σ T(B_j(v))` with `T(m) = m(m-1)/2`.
pub fn expected_degree(spec: &RatioSpec, v: &[i64]) -> Result<i64, RatioError> {
    let (num, den) = spec.form_values(v)?;
    let t = |m: &u64| (m * m.saturating_sub(1) / 2) as i64;
    Ok(num.iter().map(t).sum::<i64>() - den.iter().map(t).sum::<i64>())
}

/// Checks `C_q(0, n)` against the q-Chebyshev ratio for every `n ≤ n_max`.
pub fn reduce_cq_check(n_max: u64) -> bool {
    let cq = &lookup_family("Cq").expect("registry entry").spec;
    let cheb = &lookup_family("C").expect("registry entry").spec;
    (0..=n_max as i64).all(|n| {
        match (q_ratio_poly(cq, &[0, n]), q_ratio_poly(cheb, &[n])) {
            (Ok(QRatio::Polynomial(a)), Ok(QRatio::Polynomial(b))) => a == b,
            _ => false,
        }
    })
}
