//! Factorial-ratio specifications.
//!
//! A [`RatioSpec`] is a template
//! `(A_1(v))! ⋯ (A_l(v))! / (B_1(v))! ⋯ (B_r(v))!` whose factorial
//! arguments are integer linear forms in `k` parameters. The same template
//! is read both as an integer ratio and, with every factorial replaced by a
//! q-factorial, as a rational function of `q`.

mod criteria;
mod parse;

pub use criteria::{
    certified_threshold, check_integrality_1d, check_integrality_scan, check_integrality_scan_with,
    ScanConfig, Verdict, Witness,
};
pub use parse::parse_spec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::factorial_big;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatioError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("parameter {name:?} appears twice in one factorial argument (byte {position})")]
    DuplicateParam { position: usize, name: String },
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("point {point:?} is outside the domain: factorial argument #{form} evaluates to {value}")]
    Domain {
        point: Vec<i64>,
        form: usize,
        value: i64,
    },
    #[error("point has {got} coordinates but the spec has {expected} parameters")]
    Arity { expected: usize, got: usize },
    #[error("unsupported spec for this criterion: {0}")]
    Unsupported(String),
}

impl RatioError {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        RatioError::Parse {
            position,
            message: message.into(),
        }
    }
}

/// One factorial argument: `c_1 v_1 + … + c_k v_k + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    coeffs: Vec<i64>,
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    constant: i64,
}

fn is_zero_i64(x: &i64) -> bool {
    *x == 0
}

impl LinearForm {
    pub fn new(coeffs: Vec<i64>) -> Self {
        LinearForm { coeffs, constant: 0 }
    }

    pub fn with_constant(coeffs: Vec<i64>, constant: i64) -> Self {
        LinearForm { coeffs, constant }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn eval(&self, v: &[i64]) -> i64 {
        self.coeffs
            .iter()
            .zip(v)
            .map(|(c, x)| c * x)
            .sum::<i64>()
            + self.constant
    }
}

/// Canonical JSON shape: `{"params": [...], "num": [[..]], "den": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecJson {
    pub params: Vec<String>,
    pub num: Vec<Vec<i64>>,
    pub den: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_const: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den_const: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatioSpec {
    params: Vec<String>,
    num: Vec<LinearForm>,
    den: Vec<LinearForm>,
}

/// Exact value of a ratio at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Integer(BigUint),
    /// The reduced fraction when the division is not exact.
    NonInteger {
        numerator: BigUint,
        denominator: BigUint,
    },
}

impl Evaluation {
    pub fn is_integer(&self) -> bool {
        matches!(self, Evaluation::Integer(_))
    }

    pub fn as_integer(&self) -> Option<&BigUint> {
        match self {
            Evaluation::Integer(v) => Some(v),
            Evaluation::NonInteger { .. } => None,
        }
    }
}

impl RatioSpec {
    pub fn new(
        params: Vec<String>,
        num: Vec<LinearForm>,
        den: Vec<LinearForm>,
    ) -> Result<Self, RatioError> {
        let k = params.len();
        if k == 0 {
            return Err(RatioError::Invalid("no parameters".into()));
        }
        for (i, p) in params.iter().enumerate() {
            if p.chars().count() != 1 || !p.chars().all(char::is_alphabetic) {
                return Err(RatioError::Invalid(format!("parameter name {p:?} is not a single letter")));
            }
            if params[..i].contains(p) {
                return Err(RatioError::DuplicateParam {
                    position: i,
                    name: p.clone(),
                });
            }
        }
        if num.is_empty() || den.is_empty() {
            return Err(RatioError::Invalid("numerator and denominator must be nonempty".into()));
        }
        for f in num.iter().chain(&den) {
            if f.coeffs.len() != k {
                return Err(RatioError::Invalid(format!(
                    "form {:?} has {} coefficients, expected {k}",
                    f.coeffs,
                    f.coeffs.len()
                )));
            }
            if f.coeffs.iter().all(|&c| c == 0) {
                return Err(RatioError::Invalid("a factorial argument has no parameter".into()));
            }
        }
        Ok(RatioSpec { params, num, den })
    }

    /// Shorthand for specs without constant offsets, used by the registry and tests.
    pub fn from_vectors(params: &[&str], num: &[&[i64]], den: &[&[i64]]) -> Result<Self, RatioError> {
        let forms = |v: &[&[i64]]| v.iter().map(|c| LinearForm::new(c.to_vec())).collect();
        RatioSpec::new(params.iter().map(|s| s.to_string()).collect(), forms(num), forms(den))
    }

    pub fn from_json(j: &SpecJson) -> Result<Self, RatioError> {
        let build = |coeffs: &[Vec<i64>], consts: &Option<Vec<i64>>| -> Result<Vec<LinearForm>, RatioError> {
            if let Some(c) = consts {
                if c.len() != coeffs.len() {
                    return Err(RatioError::Invalid("constant list length mismatch".into()));
                }
            }
            Ok(coeffs
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    LinearForm::with_constant(v.clone(), consts.as_ref().map_or(0, |c| c[i]))
                })
                .collect())
        };
        RatioSpec::new(
            j.params.clone(),
            build(&j.num, &j.num_const)?,
            build(&j.den, &j.den_const)?,
        )
    }

    pub fn to_json(&self) -> SpecJson {
        let consts = |forms: &[LinearForm]| {
            forms
                .iter()
                .any(|f| f.constant != 0)
                .then(|| forms.iter().map(|f| f.constant).collect())
        };
        SpecJson {
            params: self.params.clone(),
            num: self.num.iter().map(|f| f.coeffs.clone()).collect(),
            den: self.den.iter().map(|f| f.coeffs.clone()).collect(),
            num_const: consts(&self.num),
            den_const: consts(&self.den),
        }
    }

    pub fn k(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn numerator(&self) -> &[LinearForm] {
        &self.num
    }

    pub fn denominator(&self) -> &[LinearForm] {
        &self.den
    }

    /// Number of denominator factorials minus number of numerator factorials.
    pub fn height(&self) -> i64 {
        self.den.len() as i64 - self.num.len() as i64
    }

    /// Numerator and denominator coefficient vectors (and constants) have equal sums.
    pub fn is_balanced(&self) -> bool {
        let sum = |forms: &[LinearForm]| {
            let mut acc = vec![0i64; self.k() + 1];
            for f in forms {
                for (a, c) in acc.iter_mut().zip(&f.coeffs) {
                    *a += c;
                }
                acc[self.k()] += f.constant;
            }
            acc
        };
        sum(&self.num) == sum(&self.den)
    }

    /// Every coefficient of every form is positive and there are no constants.
    pub fn all_coefficients_positive(&self) -> bool {
        self.forms().all(|f| f.constant == 0 && f.coeffs.iter().all(|&c| c > 0))
    }

    pub fn forms(&self) -> impl Iterator<Item = &LinearForm> {
        self.num.iter().chain(&self.den)
    }

    /// Sum of the absolute values of all coefficients.
    pub fn coefficient_mass(&self) -> u64 {
        self.forms()
            .flat_map(|f| f.coeffs.iter())
            .map(|c| c.unsigned_abs())
            .sum()
    }

    /// `2 × coefficient_mass`, the default residue-scan depth.
    pub fn default_d_max(&self) -> u64 {
        2 * self.coefficient_mass()
    }

    pub fn check_arity(&self, v: &[i64]) -> Result<(), RatioError> {
        if v.len() != self.k() {
            return Err(RatioError::Arity {
                expected: self.k(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Numerator and denominator argument values at `v`, checking the domain.
    pub fn form_values(&self, v: &[i64]) -> Result<(Vec<u64>, Vec<u64>), RatioError> {
        self.check_arity(v)?;
        let mut idx = 0;
        let mut eval = |forms: &[LinearForm]| -> Result<Vec<u64>, RatioError> {
            forms
                .iter()
                .map(|f| {
                    let value = f.eval(v);
                    let form = idx;
                    idx += 1;
                    u64::try_from(value).map_err(|_| RatioError::Domain {
                        point: v.to_vec(),
                        form,
                        value,
                    })
                })
                .collect()
        };
        let n = eval(&self.num)?;
        let d = eval(&self.den)?;
        Ok((n, d))
    }

    /// True iff every factorial argument is non-negative at `v`.
    pub fn in_domain(&self, v: &[i64]) -> bool {
        v.len() == self.k() && self.forms().all(|f| f.eval(v) >= 0)
    }

    /// The exact value of the ratio at `v`, by direct factorial products.
    pub fn eval_big(&self, v: &[i64]) -> Result<Evaluation, RatioError> {
        let (n, d) = self.form_values(v)?;
        let prod = |vals: &[u64]| vals.iter().fold(BigUint::from(1u32), |acc, &x| acc * factorial_big(x));
        let num = prod(&n);
        let den = prod(&d);
        let (q, r) = num.div_rem(&den);
        if r.is_zero() {
            return Ok(Evaluation::Integer(q));
        }
        let g = num.gcd(&den);
        Ok(Evaluation::NonInteger {
            numerator: num / &g,
            denominator: den / g,
        })
    }

    /// `Σ_i ⌊A_i(v)/d⌋ − Σ_j ⌊B_j(v)/d⌋`, requiring every argument to be non-negative.
    pub fn delta(&self, v: &[i64], d: u64) -> Result<i64, RatioError> {
        self.form_values(v)?;
        Ok(self.floor_sum(v, d))
    }

    /// The floor sum with floor division for negative arguments and no domain check.
    pub(crate) fn floor_sum(&self, v: &[i64], d: u64) -> i64 {
        let d = d as i64;
        let part = |forms: &[LinearForm]| forms.iter().map(|f| f.eval(v).div_euclid(d)).sum::<i64>();
        part(&self.num) - part(&self.den)
    }
}

impl std::fmt::Display for RatioSpec {
    /// Ratio notation accepted by [`parse_spec`].
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let form = |lf: &LinearForm| {
            let mut s = String::new();
            // Positive terms first: the grammar has no leading minus.
            let mut terms: Vec<(&i64, &String)> =
                lf.coeffs.iter().zip(&self.params).filter(|(c, _)| **c != 0).collect();
            terms.sort_by_key(|(c, _)| **c < 0);
            for (c, p) in terms {
                if *c < 0 {
                    s.push('-');
                } else if !s.is_empty() {
                    s.push('+');
                }
                if c.abs() != 1 {
                    s.push_str(&c.abs().to_string());
                }
                s.push_str(p);
            }
            if lf.constant != 0 {
                s.push(if lf.constant < 0 { '-' } else { '+' });
                s.push_str(&lf.constant.abs().to_string());
            }
            s
        };
        let side = |forms: &[LinearForm]| forms.iter().map(form).collect::<Vec<_>>().join(", ");
        write!(f, "{} / {}", side(&self.num), side(&self.den))
    }
}

/// Every point of `{0..=bound}^k` in lexicographic order.
pub fn box_points(k: usize, bound: u64) -> impl Iterator<Item = Vec<i64>> {
    let side = bound as i64 + 1;
    let total = (side as u64).checked_pow(k as u32).expect("box too large");
    (0..total).map(move |mut idx| {
        let mut v = vec![0i64; k];
        for slot in v.iter_mut().rev() {
            *slot = (idx % side as u64) as i64;
            idx /= side as u64;
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a_spec() -> RatioSpec {
        parse_spec("3m+3n, 3n, 2m, 2n / 2m+3n, m+2n, m+n, m, n, n").unwrap()
    }

    fn c_spec() -> RatioSpec {
        parse_spec("30n, n / 15n, 10n, 6n").unwrap()
    }

    #[test]
    fn heights() {
        assert_eq!(a_spec().height(), 2);
        assert_eq!(c_spec().height(), 1);
        assert_eq!(parse_spec("m+n / m, n").unwrap().height(), 1);
    }

    #[test]
    fn balance() {
        assert!(a_spec().is_balanced());
        assert!(c_spec().is_balanced());
        assert!(!parse_spec("2n / n").unwrap().is_balanced());
        assert!(!parse_spec("n+1 / n").unwrap().is_balanced());
    }

    #[test]
    fn eval_examples() {
        let a = a_spec();
        assert_eq!(a.eval_big(&[0, 0]).unwrap(), Evaluation::Integer(1u32.into()));
        assert_eq!(a.eval_big(&[1, 0]).unwrap(), Evaluation::Integer(6u32.into()));
        assert_eq!(a.eval_big(&[0, 1]).unwrap(), Evaluation::Integer(6u32.into()));
        let bad = parse_spec("5n, 2n / 3n, 3n, n").unwrap();
        // 240/36 = 20/3
        assert_eq!(
            bad.eval_big(&[1]).unwrap(),
            Evaluation::NonInteger {
                numerator: 20u32.into(),
                denominator: 3u32.into()
            }
        );
    }

    #[test]
    fn domain_errors() {
        let f3 = parse_spec("m, 2n / 2m, n, n-m").unwrap();
        assert!(matches!(f3.eval_big(&[2, 1]), Err(RatioError::Domain { form: 4, value: -1, .. })));
        assert!(matches!(f3.delta(&[2, 1], 2), Err(RatioError::Domain { .. })));
        assert!(!f3.in_domain(&[2, 1]));
        assert!(f3.in_domain(&[1, 2]));
        assert!(matches!(f3.eval_big(&[1]), Err(RatioError::Arity { .. })));
    }

    #[test]
    fn delta_examples() {
        let c = c_spec();
        assert_eq!(c.delta(&[1], 2).unwrap(), 0);
        assert_eq!(c.delta(&[1], 7).unwrap(), 1);
        let b = parse_spec("m+n / m, n").unwrap();
        assert_eq!(b.delta(&[1, 1], 2).unwrap(), 1);
    }

    #[test]
    fn json_shape() {
        let j = a_spec().to_json();
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(
            text,
            r#"{"params":["m","n"],"num":[[3,3],[0,3],[2,0],[0,2]],"den":[[2,3],[1,2],[1,1],[1,0],[0,1],[0,1]]}"#
        );
        assert_eq!(RatioSpec::from_json(&j).unwrap(), a_spec());
    }

    #[test]
    fn display_round_trips() {
        for text in ["3m+3n, 3n, 2m, 2n / 2m+3n, m+2n, m+n, m, n, n", "m, 2n / 2m, n, n-m", "n+1 / n, 1n-2"] {
            let s = parse_spec(text).unwrap();
            assert_eq!(parse_spec(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn box_iteration_is_lexicographic() {
        let pts: Vec<_> = box_points(2, 1).collect();
        assert_eq!(pts, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(box_points(3, 4).count(), 125);
    }

    #[test]
    fn invalid_specs() {
        assert!(RatioSpec::from_vectors(&["m", "m"], &[&[1, 1]], &[&[1, 0]]).is_err());
        assert!(RatioSpec::from_vectors(&["m"], &[&[0]], &[&[1]]).is_err());
        assert!(RatioSpec::from_vectors(&["m"], &[&[1, 2]], &[&[1]]).is_err());
        assert!(RatioSpec::from_vectors(&["mn"], &[&[1]], &[&[1]]).is_err());
    }
}
