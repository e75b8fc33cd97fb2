use std::sync::OnceLock;

use crate::ratio::{parse_spec, RatioSpec};

/// Extra restriction on top of "every factorial argument is non-negative".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    NonNegative,
    /// `v[lo] <= v[hi]`.
    Ordered { lo: usize, hi: usize },
}

#[derive(Debug, Clone)]
pub struct Family {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: RatioSpec,
    pub domain: Domain,
}

impl Family {
    pub fn in_domain(&self, v: &[i64]) -> bool {
        let extra = match self.domain {
            Domain::NonNegative => true,
            Domain::Ordered { lo, hi } => v.get(lo) <= v.get(hi),
        };
        extra && self.spec.in_domain(v)
    }

    pub fn height(&self) -> i64 {
        self.spec.height()
    }

    pub fn is_balanced(&self) -> bool {
        self.spec.is_balanced()
    }
}

const TABLE: [(&str, &str, &str, Domain); 7] = [
    (
        "A",
        "A(m,n), the G2 ratio",
        "3m+3n, 3n, 2m, 2n / 2m+3n, m+2n, m+n, m, n, n",
        Domain::NonNegative,
    ),
    (
        "Aq",
        "A_q(m,n), q-analogue of A",
        "3m+3n, 3n, 2m, 2n / 2m+3n, m+2n, m+n, m, n, n",
        Domain::NonNegative,
    ),
    ("C", "Chebyshev's ratio C(n)", "30n, n / 15n, 10n, 6n", Domain::NonNegative),
    (
        "Cq",
        "C_q(m,n), two-parameter extension of Chebyshev's ratio",
        "6m+30n, n / 3m+15n, 2m+10n, m, 6n",
        Domain::NonNegative,
    ),
    ("binomial", "binomial coefficients (m+n)!/(m! n!)", "m+n / m, n", Domain::NonNegative),
    (
        "superCatalan",
        "super Catalan numbers (2m)!(2n)!/(m! n! (m+n)!)",
        "2m, 2n / m, n, m+n",
        Domain::NonNegative,
    ),
    (
        "family3",
        "m!(2n)!/((2m)! n! (n-m)!) for m <= n",
        "m, 2n / 2m, n, n-m",
        Domain::Ordered { lo: 0, hi: 1 },
    ),
];

/// The named families, in a fixed order.
pub fn known_families() -> &'static [Family] {
    static REGISTRY: OnceLock<Vec<Family>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        TABLE
            .iter()
            .map(|&(name, description, text, domain)| Family {
                name,
                description,
                spec: parse_spec(text).expect("registry specs parse"),
                domain,
            })
            .collect()
    })
}

pub fn lookup_family(name: &str) -> Option<&'static Family> {
    known_families().iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vectors(f: &Family) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let j = f.spec.to_json();
        (j.num, j.den)
    }

    #[test]
    fn displayed_formulas() {
        let (num, den) = vectors(lookup_family("A").unwrap());
        assert_eq!(num, vec![vec![3, 3], vec![0, 3], vec![2, 0], vec![0, 2]]);
        assert_eq!(
            den,
            vec![vec![2, 3], vec![1, 2], vec![1, 1], vec![1, 0], vec![0, 1], vec![0, 1]]
        );
        let (num, den) = vectors(lookup_family("Cq").unwrap());
        assert_eq!(num, vec![vec![6, 30], vec![0, 1]]);
        assert_eq!(den, vec![vec![3, 15], vec![2, 10], vec![1, 0], vec![0, 6]]);
        let (num, den) = vectors(lookup_family("superCatalan").unwrap());
        assert_eq!(num, vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(den, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn heights_and_balance() {
        let heights: Vec<(&str, i64)> = known_families().iter().map(|f| (f.name, f.height())).collect();
        assert_eq!(
            heights,
            vec![
                ("A", 2),
                ("Aq", 2),
                ("C", 1),
                ("Cq", 2),
                ("binomial", 1),
                ("superCatalan", 1),
                ("family3", 1)
            ]
        );
        assert!(known_families().iter().all(Family::is_balanced));
    }

    #[test]
    fn triangular_domain() {
        let f = lookup_family("family3").unwrap();
        assert!(f.in_domain(&[2, 3]));
        assert!(f.in_domain(&[3, 3]));
        assert!(!f.in_domain(&[3, 2]));
        assert!(lookup_family("nope").is_none());
    }
}
