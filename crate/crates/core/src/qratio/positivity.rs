//! Coefficient-positivity sweeps over a parameter box.

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use super::{q_ratio_poly, Family, QError, QRatio};
use crate::ratio::{box_points, RatioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PositivityStatus {
    AllNonNegative,
    NegativeCoefficientFound,
    NotPolynomialAt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinCoefficient {
    #[serde(serialize_with = "crate::serde_decimal")]
    pub value: BigInt,
    pub point: Vec<i64>,
    pub power: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointIssue {
    /// The most negative coefficient at this point.
    NegativeCoefficient {
        power: usize,
        #[serde(serialize_with = "crate::serde_decimal")]
        value: BigInt,
    },
    NotPolynomial { d: u64, exponent: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositivityWitness {
    pub point: Vec<i64>,
    #[serde(flatten)]
    pub issue: PointIssue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositivityReport {
    pub family: String,
    #[serde(rename = "box")]
    pub box_bound: u64,
    pub status: PositivityStatus,
    pub min_coefficient: Option<MinCoefficient>,
    pub witnesses: Vec<PositivityWitness>,
    pub points_checked: usize,
    pub skipped_points: usize,
}

/// What the assembly produced at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Poly { degree: usize, min_power: usize, min_value: BigInt },
    NotPoly { d: u64, exponent: i64 },
}

/// One in-domain point of a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointRow {
    pub point: Vec<i64>,
    pub outcome: Outcome,
}

/// Per-point results of a sweep, before aggregation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointTable {
    pub name: String,
    pub box_bound: u64,
    pub rows: Vec<PointRow>,
    pub skipped_points: usize,
}

impl PointTable {
    pub fn summarize(&self) -> PositivityReport {
        let points: Vec<Vec<i64>> = self.rows.iter().map(|r| r.point.clone()).collect();
        let outcomes = self.rows.iter().map(|r| r.outcome.clone()).collect();
        summarize(self.name.clone(), self.box_bound, &points, outcomes, self.skipped_points)
    }
}

fn scan(
    name: String,
    spec: &RatioSpec,
    box_bound: u64,
    in_domain: impl Fn(&[i64]) -> bool + Sync,
) -> Result<PointTable, QError> {
    if !spec.is_balanced() {
        return Err(QError::Unbalanced);
    }
    let all: Vec<Vec<i64>> = box_points(spec.k(), box_bound).collect();
    let total = all.len();
    let points: Vec<Vec<i64>> = all.into_iter().filter(|v| in_domain(v)).collect();
    let skipped_points = total - points.len();

    let rows: Vec<PointRow> = points
        .into_par_iter()
        .map(|point| {
            let outcome = match q_ratio_poly(spec, &point)? {
                QRatio::Polynomial(p) => {
                    let (min_power, min_value) = p.min_coeff().map(|(i, c)| (i, c.clone())).expect("nonzero");
                    Outcome::Poly {
                        degree: p.degree().expect("nonzero"),
                        min_power,
                        min_value,
                    }
                }
                QRatio::NotPolynomial { d, exponent } => Outcome::NotPoly { d, exponent },
            };
            Ok(PointRow { point, outcome })
        })
        .collect::<Result<_, QError>>()?;
    Ok(PointTable {
        name,
        box_bound,
        rows,
        skipped_points,
    })
}

fn summarize(
    name: String,
    box_bound: u64,
    points: &[Vec<i64>],
    outcomes: Vec<Outcome>,
    skipped_points: usize,
) -> PositivityReport {
    let mut min_coefficient: Option<MinCoefficient> = None;
    let mut witnesses = Vec::new();
    let mut saw_negative = false;
    let mut saw_non_poly = false;
    for (v, out) in points.iter().zip(outcomes) {
        match out {
            Outcome::Poly { min_power, min_value, .. } => {
                if min_value.is_negative() {
                    saw_negative = true;
                    witnesses.push(PositivityWitness {
                        point: v.clone(),
                        issue: PointIssue::NegativeCoefficient {
                            power: min_power,
                            value: min_value.clone(),
                        },
                    });
                }
                if min_coefficient.as_ref().is_none_or(|m| min_value < m.value) {
                    min_coefficient = Some(MinCoefficient {
                        value: min_value,
                        point: v.clone(),
                        power: min_power,
                    });
                }
            }
            Outcome::NotPoly { d, exponent } => {
                saw_non_poly = true;
                witnesses.push(PositivityWitness {
                    point: v.clone(),
                    issue: PointIssue::NotPolynomial { d, exponent },
                });
            }
        }
    }
    let status = if saw_non_poly {
        PositivityStatus::NotPolynomialAt
    } else if saw_negative {
        PositivityStatus::NegativeCoefficientFound
    } else {
        PositivityStatus::AllNonNegative
    };
    PositivityReport {
        family: name,
        box_bound,
        status,
        min_coefficient,
        witnesses,
        points_checked: points.len(),
        skipped_points,
    }
}

/// Scans every in-domain point of `{0..=box_bound}^k`, in lexicographic order.
pub fn positivity_scan(spec: &RatioSpec, box_bound: u64) -> Result<PositivityReport, QError> {
    positivity_table(spec, box_bound).map(|t| t.summarize())
}

/// As [`positivity_scan`], honouring the family's own domain restriction.
pub fn positivity_scan_family(family: &Family, box_bound: u64) -> Result<PositivityReport, QError> {
    positivity_table_family(family, box_bound).map(|t| t.summarize())
}

pub fn positivity_table(spec: &RatioSpec, box_bound: u64) -> Result<PointTable, QError> {
    scan(spec.to_string(), spec, box_bound, |v| spec.in_domain(v))
}

pub fn positivity_table_family(family: &Family, box_bound: u64) -> Result<PointTable, QError> {
    scan(family.name.to_string(), &family.spec, box_bound, |v| family.in_domain(v))
}

#[cfg(test)]
mod tests {
    use super::super::lookup_family;
    use super::*;
    use crate::ratio::parse_spec;

    #[test]
    fn binomial_box_ten() {
        let r = positivity_scan_family(lookup_family("binomial").unwrap(), 10).unwrap();
        assert_eq!(r.status, PositivityStatus::AllNonNegative);
        assert_eq!(r.min_coefficient.as_ref().unwrap().value, BigInt::from(1));
        assert_eq!(r.points_checked, 121);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn non_polynomial_point() {
        let s = parse_spec("5n, 2n / 3n, 3n, n").unwrap();
        let r = positivity_scan(&s, 2).unwrap();
        assert_eq!(r.status, PositivityStatus::NotPolynomialAt);
        assert_eq!(
            r.witnesses[0],
            PositivityWitness {
                point: vec![1],
                issue: PointIssue::NotPolynomial { d: 3, exponent: -1 }
            }
        );
    }

    #[test]
    fn negative_coefficients_are_reported() {
        let points = vec![vec![0], vec![1], vec![2]];
        let outcomes = vec![
            Outcome::Poly { degree: 0, min_power: 0, min_value: BigInt::from(1) },
            Outcome::Poly { degree: 4, min_power: 3, min_value: BigInt::from(-2) },
            Outcome::Poly { degree: 4, min_power: 1, min_value: BigInt::from(-5) },
        ];
        let r = summarize("synthetic".into(), 2, &points, outcomes, 0);
        assert_eq!(r.status, PositivityStatus::NegativeCoefficientFound);
        assert_eq!(r.witnesses.len(), 2);
        assert_eq!(
            r.min_coefficient,
            Some(MinCoefficient { value: BigInt::from(-5), point: vec![2], power: 1 })
        );
    }

    #[test]
    fn ties_keep_the_first_point() {
        let points = vec![vec![0], vec![1]];
        let outcomes = vec![
            Outcome::Poly { degree: 0, min_power: 0, min_value: BigInt::from(1) },
            Outcome::Poly { degree: 0, min_power: 0, min_value: BigInt::from(1) },
        ];
        let r = summarize("t".into(), 1, &points, outcomes, 0);
        assert_eq!(r.min_coefficient.unwrap().point, vec![0]);
        assert_eq!(r.status, PositivityStatus::AllNonNegative);
    }

    #[test]
    fn family3_skips_out_of_domain() {
        let r = positivity_scan_family(lookup_family("family3").unwrap(), 4).unwrap();
        assert_eq!(r.status, PositivityStatus::AllNonNegative);
        assert_eq!(r.points_checked, 15);
        assert_eq!(r.skipped_points, 10);
    }

    #[test]
    fn json_shape() {
        let r = positivity_scan_family(lookup_family("superCatalan").unwrap(), 1).unwrap();
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["family"], "superCatalan");
        assert_eq!(j["box"], 1);
        assert_eq!(j["status"], "AllNonNegative");
        assert_eq!(j["min_coefficient"]["value"], "1");
        assert_eq!(j["min_coefficient"]["point"], serde_json::json!([0, 0]));
        assert_eq!(j["min_coefficient"]["power"], 0);
    }
}
