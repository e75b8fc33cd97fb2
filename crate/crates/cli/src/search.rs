//! Enumeration of balanced, height-one, one-parameter factorial ratios
//! `(a_1 n)!⋯(a_l n)! / (b_1 n)!⋯(b_{l+1} n)!`.

use num_integer::Integer;
use qrious_core::ratio::{check_integrality_1d, Verdict, Witness};
use qrious_core::{RatioSpec, LinearForm};
use rayon::prelude::*;
use serde::Serialize;

/// Largest `n` tried when looking for a concrete non-integral value.
const WITNESS_SEARCH_LIMIT: i64 = 64;
/// Every `Integral` verdict is re-checked by direct evaluation on `1..=REVALIDATE_UP_TO`.
pub const REVALIDATE_UP_TO: i64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum CandidateVerdict {
    Integral,
    NonIntegral {
        /// Smallest `n` with a non-integral value, when one was found.
        witness_n: Option<i64>,
        /// Where the step function goes negative, as `t/L`.
        breakpoint: String,
    },
    Skipped { reason: String },
    #[serde(rename = "INTERNAL-ERROR")]
    InternalError { detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchCandidate {
    pub num: Vec<u64>,
    pub den: Vec<u64>,
    #[serde(flatten)]
    pub verdict: CandidateVerdict,
}

impl SearchCandidate {
    pub fn sum(&self) -> u64 {
        self.num.iter().sum()
    }

    /// `30,1 ; 15,10,6`.
    pub fn label(&self) -> String {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        format!("{} ; {}", join(&self.num), join(&self.den))
    }

    pub fn spec(&self) -> RatioSpec {
        let forms = |v: &[u64]| v.iter().map(|&c| LinearForm::new(vec![c as i64])).collect();
        RatioSpec::new(vec!["n".into()], forms(&self.num), forms(&self.den)).expect("positive coefficients")
    }
}

/// Partitions of `total` into exactly `parts` positive parts, each in descending order.
fn partitions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    fn go(rest: u64, parts: usize, cap: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // Each remaining part is at least 1 and at most `cap`.
        let hi = cap.min(rest.saturating_sub(parts as u64 - 1));
        let lo = rest.div_ceil(parts as u64).max(1);
        for first in (lo..=hi).rev() {
            prefix.push(first);
            go(rest - first, parts - 1, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, total, &mut Vec::new(), &mut out);
    out
}

/// All primitive canonical pairs with `l <= max_terms` and `Σa = Σb <= max_sum`,
/// sorted by `(Σa, a, b)`.
pub fn enumerate(max_sum: u64, max_terms: usize) -> Vec<(Vec<u64>, Vec<u64>)> {
    let mut out = Vec::new();
    for s in 2..=max_sum {
        for l in 1..=max_terms {
            for a in partitions(s, l) {
                for b in partitions(s, l + 1) {
                    let g = a.iter().chain(&b).fold(0u64, |g, &x| g.gcd(&x));
                    if g == 1 {
                        out.push((a.clone(), b));
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| {
        let sx: u64 = x.0.iter().sum();
        let sy: u64 = y.0.iter().sum();
        (sx, &x.0, &x.1).cmp(&(sy, &y.0, &y.1))
    });
    out
}

fn classify(num: Vec<u64>, den: Vec<u64>) -> SearchCandidate {
    let mut cand = SearchCandidate {
        num,
        den,
        verdict: CandidateVerdict::Integral,
    };
    if let Some(x) = cand.num.iter().find(|x| cand.den.contains(x)) {
        cand.verdict = CandidateVerdict::Skipped {
            reason: format!("factor ({x}n)! cancels"),
        };
        return cand;
    }
    let spec = cand.spec();
    cand.verdict = match check_integrality_1d(&spec) {
        Ok(Verdict::Integral { .. }) => {
            match (1..=REVALIDATE_UP_TO).find(|&n| !spec.eval_big(&[n]).map(|e| e.is_integer()).unwrap_or(false)) {
                None => CandidateVerdict::Integral,
                Some(n) => CandidateVerdict::InternalError {
                    detail: format!("criterion says integral but the value at n={n} is not an integer"),
                },
            }
        }
        Ok(Verdict::Counterexample { witness }) => {
            let (t, l) = match witness {
                Witness::Breakpoint { .. } => witness.breakpoint_fraction().expect("breakpoint"),
                _ => (0, 1),
            };
            let witness_n = (1..=WITNESS_SEARCH_LIMIT)
                .find(|&n| !spec.eval_big(&[n]).map(|e| e.is_integer()).unwrap_or(true));
            CandidateVerdict::NonIntegral {
                witness_n,
                breakpoint: format!("{t}/{l}"),
            }
        }
        Ok(Verdict::Inconclusive { .. }) => CandidateVerdict::InternalError {
            detail: "one-parameter criterion returned inconclusive".into(),
        },
        Err(e) => CandidateVerdict::Skipped { reason: e.to_string() },
    };
    cand
}

/// Enumerates and classifies every candidate; output order matches [`enumerate`].
pub fn search(max_sum: u64, max_terms: usize) -> Vec<SearchCandidate> {
    enumerate(max_sum, max_terms)
        .into_par_iter()
        .map(|(a, b)| classify(a, b))
        .collect()
}
