//! Floor-sum integrality criteria.
//!
//! For a balanced ratio the `p`-adic order of its value at `v` is
//! `Σ_{j≥1} Δ(v, p^j)` with `Δ(v, d) = Σ ⌊A_i(v)/d⌋ − Σ ⌊B_j(v)/d⌋`, so
//! non-negativity of `Δ` everywhere implies integrality. Balance also makes
//! `Δ(·, d)` periodic with period `d` in every coordinate, which reduces the
//! check at a fixed `d` to the residue box `{0..d-1}^k`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::{box_points, Evaluation, RatioError, RatioSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `Δ(t/L) < 0` for the one-parameter step function.
    Breakpoint { t: u64, l: u64, delta: i64 },
    /// `Δ(v, d) < 0` for a residue vector `v`.
    Residue { point: Vec<i64>, d: u64, delta: i64 },
    /// The ratio is not an integer at `point`.
    Point {
        point: Vec<i64>,
        #[serde(serialize_with = "crate::serde_decimal")]
        numerator: BigUint,
        #[serde(serialize_with = "crate::serde_decimal")]
        denominator: BigUint,
    },
}

impl Witness {
    /// The breakpoint as a reduced fraction `(num, den)`.
    pub fn breakpoint_fraction(&self) -> Option<(u64, u64)> {
        match *self {
            Witness::Breakpoint { t, l, .. } => {
                let g = t.gcd(&l).max(1);
                Some((t / g, l / g))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    /// No negative floor sum up to `depth`, which is at or past the certification threshold.
    Integral { depth: u64 },
    Counterexample { witness: Witness },
    /// The scan passed but stopped below the certification threshold.
    Inconclusive { depth: u64, threshold: u64 },
}

impl Verdict {
    pub fn is_integral(&self) -> bool {
        matches!(self, Verdict::Integral { .. })
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self, Verdict::Counterexample { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Integral { .. } => "Integral",
            Verdict::Counterexample { .. } => "Counterexample",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }
}

fn lcm_all(values: impl IntoIterator<Item = u64>) -> Result<u64, RatioError> {
    values.into_iter().try_fold(1u64, |acc, c| {
        let g = acc.gcd(&c);
        (acc / g)
            .checked_mul(c)
            .ok_or_else(|| RatioError::Unsupported("coefficient lcm overflows u64".into()))
    })
}

/// Least common multiple of the absolute values of all nonzero coefficients.
///
/// For one parameter every breakpoint of `Δ` lies in `(1/L)ℤ`, so a residue
/// scan reaching `d = L` is complete. For two or more parameters this value
/// is only a heuristic default; use [`ScanConfig::threshold`] to override it.
pub fn certified_threshold(spec: &RatioSpec) -> Result<u64, RatioError> {
    lcm_all(
        spec.forms()
            .flat_map(|f| f.coeffs().iter())
            .filter(|&&c| c != 0)
            .map(|c| c.unsigned_abs()),
    )
}

/// Exact one-parameter criterion.
///
/// `Δ(x) = Σ ⌊a_i x⌋ − Σ ⌊b_j x⌋` is right-continuous and 1-periodic with
/// jumps only at multiples of `1/c` for the coefficients `c`. Its values on
/// `[0, 1)` are therefore exactly its values at those jump points, which are
/// a subset of `{t/L : 0 ≤ t < L}`.
pub fn check_integrality_1d(spec: &RatioSpec) -> Result<Verdict, RatioError> {
    if spec.k() != 1 {
        return Err(RatioError::Unsupported(format!("expected one parameter, found {}", spec.k())));
    }
    if !spec.is_balanced() {
        return Err(RatioError::Unsupported("spec is not balanced".into()));
    }
    if spec.height() < 0 {
        return Err(RatioError::Unsupported("negative height".into()));
    }
    if !spec.all_coefficients_positive() {
        return Err(RatioError::Unsupported("all coefficients must be positive".into()));
    }
    let coeff = |f: &super::LinearForm| f.coeffs()[0] as u64;
    let l = certified_threshold(spec)?;
    let mut jumps = BTreeSet::new();
    for c in spec.forms().map(coeff) {
        let step = l / c;
        jumps.extend((0..c).map(|j| j * step));
    }
    let floor_at = |a: u64, t: u64| ((a as u128 * t as u128) / l as u128) as i64;
    for t in jumps {
        let delta = spec.numerator().iter().map(|f| floor_at(coeff(f), t)).sum::<i64>()
            - spec.denominator().iter().map(|f| floor_at(coeff(f), t)).sum::<i64>();
        if delta < 0 {
            return Ok(Verdict::Counterexample {
                witness: Witness::Breakpoint { t, l, delta },
            });
        }
    }
    Ok(Verdict::Integral { depth: l })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanConfig {
    /// Largest modulus `d` in the residue scan.
    pub d_max: u64,
    /// The brute-force oracle evaluates every point of `{0..=box_bound}^k`.
    pub box_bound: u64,
    /// Depth at which a passing scan is reported `Integral`; defaults to [`certified_threshold`].
    pub threshold: Option<u64>,
}

impl ScanConfig {
    pub fn defaults_for(spec: &RatioSpec) -> Self {
        ScanConfig {
            d_max: spec.default_d_max(),
            box_bound: 8,
            threshold: None,
        }
    }
}

/// Residue scan plus brute-force cross-check with the default threshold.
pub fn check_integrality_scan(spec: &RatioSpec, d_max: u64, box_bound: u64) -> Result<Verdict, RatioError> {
    check_integrality_scan_with(
        spec,
        &ScanConfig {
            d_max,
            box_bound,
            threshold: None,
        },
    )
}

pub fn check_integrality_scan_with(spec: &RatioSpec, config: &ScanConfig) -> Result<Verdict, RatioError> {
    if !spec.is_balanced() {
        return Err(RatioError::Unsupported("spec is not balanced".into()));
    }
    if config.d_max < 2 || config.box_bound < 1 {
        return Err(RatioError::Unsupported("need d_max >= 2 and box >= 1".into()));
    }
    let k = spec.k();

    let residue_failure = (2..=config.d_max)
        .into_par_iter()
        .find_map_first(|d| {
            box_points(k, d - 1).find_map(|v| {
                let delta = spec.floor_sum(&v, d);
                (delta < 0).then_some(Witness::Residue { point: v, d, delta })
            })
        });
    if let Some(witness) = residue_failure {
        return Ok(Verdict::Counterexample { witness });
    }

    let points: Vec<Vec<i64>> = box_points(k, config.box_bound).filter(|v| spec.in_domain(v)).collect();
    let point_failure = points.par_iter().find_map_first(|v| match spec.eval_big(v) {
        Ok(Evaluation::NonInteger {
            numerator,
            denominator,
        }) => Some(Witness::Point {
            point: v.clone(),
            numerator,
            denominator,
        }),
        _ => None,
    });
    if let Some(witness) = point_failure {
        return Ok(Verdict::Counterexample { witness });
    }

    let threshold = match config.threshold {
        Some(t) => t,
        None => certified_threshold(spec)?,
    };
    Ok(if config.d_max >= threshold {
        Verdict::Integral { depth: config.d_max }
    } else {
        Verdict::Inconclusive {
            depth: config.d_max,
            threshold,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse_spec;
    use super::*;

    /// The literal `t = 0..L-1` table, kept independent of the jump-point shortcut.
    fn delta_table(a: &[u64], b: &[u64], l: u64) -> Vec<i64> {
        (0..l)
            .map(|t| {
                a.iter().map(|&c| (c * t / l) as i64).sum::<i64>()
                    - b.iter().map(|&c| (c * t / l) as i64).sum::<i64>()
            })
            .collect()
    }

    #[test]
    fn chebyshev_is_integral() {
        let c = parse_spec("30n, n / 15n, 10n, 6n").unwrap();
        assert_eq!(check_integrality_1d(&c).unwrap(), Verdict::Integral { depth: 30 });
        assert!(delta_table(&[30, 1], &[15, 10, 6], 30).iter().all(|&x| x >= 0));
    }

    #[test]
    fn five_two_counterexample() {
        let s = parse_spec("5n, 2n / 3n, 3n, n").unwrap();
        let table = delta_table(&[5, 2], &[3, 3, 1], 30);
        let first_neg = table.iter().position(|&x| x < 0).unwrap();
        assert_eq!((first_neg, table[first_neg]), (10, -1));
        let v = check_integrality_1d(&s).unwrap();
        assert_eq!(
            v,
            Verdict::Counterexample {
                witness: Witness::Breakpoint { t: 10, l: 30, delta: -1 }
            }
        );
        if let Verdict::Counterexample { witness } = v {
            assert_eq!(witness.breakpoint_fraction(), Some((1, 3)));
        }
    }

    #[test]
    fn central_binomial() {
        let s = parse_spec("2n / n, n").unwrap();
        assert!(check_integrality_1d(&s).unwrap().is_integral());
    }

    #[test]
    fn one_dim_preconditions() {
        for text in ["m+n / m, n", "2n / n", "n+1 / n, 1", "2n / 2n, n, n, n"] {
            let s = parse_spec(text);
            if let Ok(s) = s {
                assert!(matches!(check_integrality_1d(&s), Err(RatioError::Unsupported(_))), "{text}");
            }
        }
        // Negative height.
        let s = parse_spec("n, n / 2n").unwrap();
        assert!(check_integrality_1d(&s).is_err());
    }

    #[test]
    fn scan_examples() {
        let a = parse_spec("3m+3n, 3n, 2m, 2n / 2m+3n, m+2n, m+n, m, n, n").unwrap();
        assert_eq!(check_integrality_scan(&a, 16, 12).unwrap(), Verdict::Integral { depth: 16 });
        let bad = parse_spec("5n, 2n / 3n, 3n, n").unwrap();
        assert_eq!(
            check_integrality_scan(&bad, 6, 2).unwrap(),
            Verdict::Counterexample {
                witness: Witness::Residue { point: vec![1], d: 3, delta: -1 }
            }
        );
    }

    #[test]
    fn scan_reports_inconclusive_below_threshold() {
        let c = parse_spec("30n, n / 15n, 10n, 6n").unwrap();
        assert_eq!(
            check_integrality_scan(&c, 10, 3).unwrap(),
            Verdict::Inconclusive { depth: 10, threshold: 30 }
        );
        let cfg = ScanConfig { d_max: 10, box_bound: 3, threshold: Some(10) };
        assert!(check_integrality_scan_with(&c, &cfg).unwrap().is_integral());
    }

    #[test]
    fn scan_rejects_unbalanced() {
        let s = parse_spec("2n / n").unwrap();
        assert!(matches!(check_integrality_scan(&s, 4, 2), Err(RatioError::Unsupported(_))));
    }

    #[test]
    fn scan_handles_negative_coefficients() {
        // The triangular family is integral on m <= n; residues outside the
        // domain are reached from inside it by periodicity.
        let f3 = parse_spec("m, 2n / 2m, n, n-m").unwrap();
        assert!(check_integrality_scan(&f3, 12, 6).unwrap().is_integral());
    }
}
