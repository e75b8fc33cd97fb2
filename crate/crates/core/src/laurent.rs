//! Laurent polynomials in `x, y` with coefficients in `ℤ[q]`, and the G2
//! constant-term product
//!
//! ```text
//! (x, q/x, y, q/y, y/x, qx/y; q)_m · (xy, q/xy, y/x², qx²/y, y²/x, qx/y²; q)_n
//! ```
//!
//! where `(a_1, …, a_k; q)_n = Π_i Π_{j=1}^n (1 - a_i q^{j-1})`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::IntPoly;
use crate::qratio::{lookup_family, q_ratio_poly, QRatio};
use crate::ratio::Evaluation;

/// Default cap on stored terms while building a product.
pub const DEFAULT_TERM_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtError {
    #[error("term budget exceeded: {terms} stored terms > budget {budget}")]
    BudgetExceeded { terms: usize, budget: usize },
}

/// `q^qpow x^xpow y^ypow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LaurentMonomial {
    pub qpow: u32,
    pub xpow: i32,
    pub ypow: i32,
}

impl LaurentMonomial {
    pub const fn new(qpow: u32, xpow: i32, ypow: i32) -> Self {
        LaurentMonomial { qpow, xpow, ypow }
    }
}

/// Bases of the `m`-type Pochhammer symbols: `x, q/x, y, q/y, y/x, qx/y`.
pub const G2_SHORT_BASES: [LaurentMonomial; 6] = [
    LaurentMonomial::new(0, 1, 0),
    LaurentMonomial::new(1, -1, 0),
    LaurentMonomial::new(0, 0, 1),
    LaurentMonomial::new(1, 0, -1),
    LaurentMonomial::new(0, -1, 1),
    LaurentMonomial::new(1, 1, -1),
];

/// Bases of the `n`-type Pochhammer symbols: `xy, q/xy, y/x², qx²/y, y²/x, qx/y²`.
pub const G2_LONG_BASES: [LaurentMonomial; 6] = [
    LaurentMonomial::new(0, 1, 1),
    LaurentMonomial::new(1, -1, -1),
    LaurentMonomial::new(0, -2, 1),
    LaurentMonomial::new(1, 2, -1),
    LaurentMonomial::new(0, -1, 2),
    LaurentMonomial::new(1, 1, -2),
];

/// Sparse `Σ c_{a,b}(q) x^a y^b`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly2 {
    terms: BTreeMap<(i32, i32), IntPoly>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(IntPoly::one())
    }

    pub fn constant(c: IntPoly) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(xpow: i32, ypow: i32, c: IntPoly) -> Self {
        let mut p = Self::zero();
        p.add_term(xpow, ypow, &c);
        p
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), &IntPoly)> {
        self.terms.iter().map(|(&k, v)| (k, v))
    }

    pub fn coeff(&self, xpow: i32, ypow: i32) -> IntPoly {
        self.terms.get(&(xpow, ypow)).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, xpow: i32, ypow: i32, c: &IntPoly) {
        if c.is_zero() {
            return;
        }
        let key = (xpow, ypow);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = &*existing + c;
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add(&self, other: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = self.clone();
        for ((a, b), c) in other.terms() {
            out.add_term(a, b, c);
        }
        out
    }

    /// Multiplies every coefficient by the q-polynomial `c`.
    pub fn scale(&self, c: &IntPoly) -> LaurentPoly2 {
        let mut out = LaurentPoly2::zero();
        for ((a, b), v) in self.terms() {
            out.add_term(a, b, &v.mul(c));
        }
        out
    }

    /// `self · (1 - q^s x^α y^β)`.
    pub fn mul_factor(&self, m: LaurentMonomial) -> LaurentPoly2 {
        let mut out = self.clone();
        for ((a, b), c) in self.terms() {
            out.add_term(a + m.xpow, b + m.ypow, &(-&c.shift(m.qpow as usize)));
        }
        out
    }

    /// Replaces every coefficient by its value at `q = 1`.
    pub fn specialize_at_one(&self) -> LaurentPoly2 {
        let mut out = LaurentPoly2::zero();
        for ((a, b), c) in self.terms() {
            out.add_term(a, b, &IntPoly::constant(c.eval_i64(1)));
        }
        out
    }

    /// Coefficient of `x^0 y^0`.
    pub fn constant_term(&self) -> IntPoly {
        self.coeff(0, 0)
    }

    /// One `xpow ypow : coefficient` line per term, sorted by `(xpow, ypow)`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ((a, b), c) in self.terms() {
            let _ = writeln!(out, "{a} {b} : {}", c.to_ascii());
        }
        out
    }
}

/// `[base, q·base, …, q^{count-1}·base]`.
pub fn pochhammer_factors(base: LaurentMonomial, count: u32) -> Vec<LaurentMonomial> {
    (0..count)
        .map(|j| LaurentMonomial {
            qpow: base.qpow + j,
            ..base
        })
        .collect()
}

/// Every factor `a q^{j-1}` of the G2 product in multiplication order: all
/// `m`-type factors, then all `n`-type factors, each family in listed order.
pub fn g2_factors(m: u32, n: u32) -> Vec<LaurentMonomial> {
    G2_SHORT_BASES
        .iter()
        .flat_map(|&b| pochhammer_factors(b, m))
        .chain(G2_LONG_BASES.iter().flat_map(|&b| pochhammer_factors(b, n)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct G2Options {
    pub budget: usize,
    /// Evaluate coefficients at `q = 1` after every multiplication.
    pub at_q_one: bool,
}

impl Default for G2Options {
    fn default() -> Self {
        G2Options {
            budget: DEFAULT_TERM_BUDGET,
            at_q_one: false,
        }
    }
}

/// Builds the full G2 product by folding [`LaurentPoly2::mul_factor`] over [`g2_factors`].
pub fn g2_product(m: u32, n: u32, opts: &G2Options) -> Result<LaurentPoly2, CtError> {
    let factors = g2_factors(m, n);
    let x_bound: i64 = factors.iter().map(|f| f.xpow.unsigned_abs() as i64).sum();
    let y_bound: i64 = factors.iter().map(|f| f.ypow.unsigned_abs() as i64).sum();
    let mut acc = LaurentPoly2::one();
    for f in factors {
        acc = acc.mul_factor(f);
        if opts.at_q_one {
            acc = acc.specialize_at_one();
        }
        if acc.num_terms() > opts.budget {
            return Err(CtError::BudgetExceeded {
                terms: acc.num_terms(),
                budget: opts.budget,
            });
        }
    }
    assert!(acc
        .terms()
        .all(|((a, b), _)| (a as i64).abs() <= x_bound && (b as i64).abs() <= y_bound));
    Ok(acc)
}

/// Outcome of comparing the constant term against the cyclotomic assembly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G2Check {
    pub constant_term: IntPoly,
    pub expected: IntPoly,
}

impl G2Check {
    pub fn matches(&self) -> bool {
        self.constant_term == self.expected
    }
}

/// Constant term of the G2 product against `A_q(m,n)` (or `A(m,n)` when `at_q_one`).
pub fn check_g2(m: u32, n: u32, opts: &G2Options) -> Result<G2Check, CtError> {
    let ct = g2_product(m, n, opts)?.constant_term();
    let a = &lookup_family("Aq").expect("registry entry").spec;
    let point = [m as i64, n as i64];
    let expected = if opts.at_q_one {
        match a.eval_big(&point).expect("non-negative point is in domain") {
            Evaluation::Integer(v) => IntPoly::constant(BigInt::from(v)),
            Evaluation::NonInteger { .. } => IntPoly::zero(),
        }
    } else {
        match q_ratio_poly(a, &point).expect("balanced registry spec") {
            QRatio::Polynomial(p) => p,
            QRatio::NotPolynomial { .. } => IntPoly::zero(),
        }
    };
    Ok(G2Check {
        constant_term: ct,
        expected,
    })
}

/// True iff `CT[g2_product(m, n)] = A_q(m, n)` coefficientwise.
pub fn verify_g2(m: u32, n: u32, budget: usize) -> Result<bool, CtError> {
    check_g2(
        m,
        n,
        &G2Options {
            budget,
            at_q_one: false,
        },
    )
    .map(|c| c.matches())
}
