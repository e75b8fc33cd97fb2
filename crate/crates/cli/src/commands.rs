//! Subcommand implementations. Each returns printable text, a JSON report
//! and an exit code; `main` only does argument parsing and I/O.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qrious_core::laurent::{check_g2, CtError, G2Options};
use qrious_core::qratio::{
    known_families, lookup_family, positivity_table, positivity_table_family, q_ratio_exponents, q_ratio_poly,
    Family, Outcome, PointTable, PositivityStatus, QRatio,
};
use qrious_core::ratio::{
    box_points, check_integrality_1d, check_integrality_scan_with, ScanConfig, SpecJson, Witness,
};
use qrious_core::{parse_spec, Evaluation, RatioError, RatioSpec, Verdict};
use serde::Serialize;
use serde_json::{json, Value};

use crate::search::{search, CandidateVerdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

pub struct CommandOutput {
    pub text: String,
    pub json: Value,
    pub exit_code: i32,
    /// Per-point table, only produced by `positivity`.
    pub csv: Option<String>,
}

impl CommandOutput {
    fn new(text: String, json: Value, exit_code: i32) -> Self {
        CommandOutput {
            text,
            json,
            exit_code,
            csv: None,
        }
    }

    fn input_error(command: &str, arg: &str, err: impl std::fmt::Display) -> Self {
        let msg = format!("error: {err}\n");
        let report = ScanReport {
            command: command.into(),
            spec: None,
            parameters: BTreeMap::from([("input".into(), json!(arg))]),
            outcomes: vec![json!({ "error": err.to_string() })],
            summary: BTreeMap::from([("status".into(), json!("InputError"))]),
        };
        CommandOutput::new(msg, to_value(&report), EXIT_INPUT)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecIdentity {
    pub name: Option<String>,
    pub text: String,
    pub canonical: SpecJson,
}

/// Machine-readable record of one invocation. Contains no timestamps.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub command: String,
    pub spec: Option<SpecIdentity>,
    pub parameters: BTreeMap<String, Value>,
    pub outcomes: Vec<Value>,
    pub summary: BTreeMap<String, Value>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// A registry family or a spec parsed from text.
pub struct Resolved {
    pub name: Option<String>,
    pub spec: RatioSpec,
    pub family: Option<&'static Family>,
}

impl Resolved {
    fn in_domain(&self, v: &[i64]) -> bool {
        match self.family {
            Some(f) => f.in_domain(v),
            None => self.spec.in_domain(v),
        }
    }

    fn identity(&self) -> SpecIdentity {
        SpecIdentity {
            name: self.name.clone(),
            text: self.spec.to_string(),
            canonical: self.spec.to_json(),
        }
    }
}

/// Registry names first, then spec text.
pub fn resolve(arg: &str) -> Result<Resolved, RatioError> {
    if let Some(f) = lookup_family(arg.trim()) {
        return Ok(Resolved {
            name: Some(f.name.to_string()),
            spec: f.spec.clone(),
            family: Some(f),
        });
    }
    Ok(Resolved {
        name: None,
        spec: parse_spec(arg)?,
        family: None,
    })
}

/// Parses `1,0` or `(1,0)`.
pub fn parse_point(text: &str) -> Result<Vec<i64>, String> {
    text.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|e| format!("bad coordinate {s:?}: {e}")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Criterion,
    Brute,
    Both,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub method: Method,
    pub box_bound: u64,
    pub d_max: Option<u64>,
    pub threshold: Option<u64>,
}

fn criterion(spec: &RatioSpec, opts: &CheckOptions) -> Result<(&'static str, Verdict), RatioError> {
    if spec.k() == 1 && spec.all_coefficients_positive() && spec.height() >= 0 && spec.is_balanced() {
        return Ok(("landau-1d", check_integrality_1d(spec)?));
    }
    let config = ScanConfig {
        d_max: opts.d_max.unwrap_or_else(|| spec.default_d_max()),
        box_bound: opts.box_bound,
        threshold: opts.threshold,
    };
    Ok(("residue-scan", check_integrality_scan_with(spec, &config)?))
}

/// First non-integral value on `{0..=box}^k`, in lexicographic order.
fn brute(r: &Resolved, box_bound: u64) -> Result<(usize, Option<Witness>), RatioError> {
    let mut checked = 0;
    for v in box_points(r.spec.k(), box_bound).filter(|v| r.in_domain(v)) {
        checked += 1;
        if let Evaluation::NonInteger {
            numerator,
            denominator,
        } = r.spec.eval_big(&v)?
        {
            return Ok((
                checked,
                Some(Witness::Point {
                    point: v,
                    numerator,
                    denominator,
                }),
            ));
        }
    }
    Ok((checked, None))
}

fn describe_witness(w: &Witness) -> String {
    match w {
        Witness::Breakpoint { t, l, delta } => {
            let (a, b) = w.breakpoint_fraction().unwrap_or((*t, *l));
            format!("step function is {delta} at x = {a}/{b}")
        }
        Witness::Residue { point, d, delta } => format!("floor sum {delta} at residue {point:?} mod {d}"),
        Witness::Point {
            point,
            numerator,
            denominator,
        } => format!("value {numerator}/{denominator} at {point:?}"),
    }
}

pub fn cmd_check(arg: &str, opts: &CheckOptions) -> CommandOutput {
    let r = match resolve(arg) {
        Ok(r) => r,
        Err(e) => return CommandOutput::input_error("check", arg, e),
    };
    let mut outcomes = Vec::new();
    let mut text = String::new();
    let mut found = false;
    let mut crit_verdict = None;
    let mut brute_witness = None;

    if matches!(opts.method, Method::Criterion | Method::Both) {
        match criterion(&r.spec, opts) {
            Ok((name, v)) => {
                let _ = writeln!(text, "criterion ({name}): {}", v.label());
                if let Verdict::Counterexample { witness } = &v {
                    let _ = writeln!(text, "  {}", describe_witness(witness));
                    found = true;
                }
                if let Verdict::Inconclusive { depth, threshold } = &v {
                    let _ = writeln!(text, "  scanned d <= {depth}; certification threshold {threshold}");
                }
                outcomes.push(json!({ "method": name, "verdict": to_value(&v) }));
                crit_verdict = Some(v);
            }
            Err(e) => return CommandOutput::input_error("check", arg, e),
        }
    }
    if matches!(opts.method, Method::Brute | Method::Both) {
        match brute(&r, opts.box_bound) {
            Ok((checked, witness)) => {
                match &witness {
                    Some(w) => {
                        let _ = writeln!(text, "brute force (box {}): Counterexample", opts.box_bound);
                        let _ = writeln!(text, "  {}", describe_witness(w));
                        found = true;
                    }
                    None => {
                        let _ = writeln!(
                            text,
                            "brute force (box {}): all {checked} values are integers",
                            opts.box_bound
                        );
                    }
                }
                outcomes.push(json!({
                    "method": "brute",
                    "points_checked": checked,
                    "witness": witness.as_ref().map(to_value),
                }));
                brute_witness = witness;
            }
            Err(e) => return CommandOutput::input_error("check", arg, e),
        }
    }

    let disagreement = opts.method == Method::Both
        && crit_verdict.as_ref().is_some_and(Verdict::is_integral)
        && brute_witness.is_some();
    let status = if disagreement {
        "InternalError"
    } else if found {
        "Counterexample"
    } else if crit_verdict.as_ref().is_some_and(|v| matches!(v, Verdict::Inconclusive { .. })) {
        "Inconclusive"
    } else {
        "Integral"
    };
    if opts.method == Method::Both && !disagreement {
        let agree = crit_verdict.as_ref().map(Verdict::is_counterexample) == Some(brute_witness.is_some());
        let _ = writeln!(
            text,
            "{status}, methods {}",
            if agree { "agree" } else { "differ only in reach (no contradiction)" }
        );
    } else if disagreement {
        let _ = writeln!(text, "INTERNAL-ERROR: criterion says integral but a non-integral value exists");
    } else {
        let _ = writeln!(text, "{status}");
    }
    let exit_code = if disagreement {
        EXIT_INTERNAL
    } else if found {
        EXIT_FOUND
    } else {
        EXIT_OK
    };
    let report = ScanReport {
        command: "check".into(),
        spec: Some(r.identity()),
        parameters: BTreeMap::from([
            ("method".into(), json!(format!("{:?}", opts.method).to_lowercase())),
            ("box".into(), json!(opts.box_bound)),
            ("d_max".into(), json!(opts.d_max.unwrap_or_else(|| r.spec.default_d_max()))),
            ("threshold".into(), json!(opts.threshold)),
        ]),
        outcomes,
        summary: BTreeMap::from([
            ("status".into(), json!(status)),
            ("height".into(), json!(r.spec.height())),
            ("balanced".into(), json!(r.spec.is_balanced())),
        ]),
    };
    CommandOutput::new(text, to_value(&report), exit_code)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolyFormat {
    Coeffs,
    Factored,
}

pub fn cmd_qpoly(arg: &str, point: &[i64], format: PolyFormat) -> CommandOutput {
    let r = match resolve(arg) {
        Ok(r) => r,
        Err(e) => return CommandOutput::input_error("qpoly", arg, e),
    };
    if let Err(e) = r.spec.check_arity(point) {
        return CommandOutput::input_error("qpoly", arg, e);
    }
    if !r.in_domain(point) {
        return CommandOutput::input_error("qpoly", arg, format!("point {point:?} is outside the domain"));
    }
    let exps = match q_ratio_exponents(&r.spec, point) {
        Ok(e) => e,
        Err(e) => return CommandOutput::input_error("qpoly", arg, e),
    };
    let mut report = ScanReport {
        command: "qpoly".into(),
        spec: Some(r.identity()),
        parameters: BTreeMap::from([
            ("point".into(), json!(point)),
            ("format".into(), json!(format!("{format:?}").to_lowercase())),
        ]),
        outcomes: Vec::new(),
        summary: BTreeMap::new(),
    };
    let exps_json: BTreeMap<String, i64> = exps.iter().map(|(d, e)| (d.to_string(), e)).collect();
    match q_ratio_poly(&r.spec, point) {
        Ok(QRatio::Polynomial(p)) => {
            let coeffs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
            let text = match format {
                PolyFormat::Coeffs => coeffs.join(","),
                PolyFormat::Factored => exps.to_string(),
            };
            report.outcomes.push(json!({
                "point": point,
                "coefficients": coeffs,
                "cyclotomic_exponents": exps_json,
            }));
            report.summary.insert("status".into(), json!("Polynomial"));
            report.summary.insert("degree".into(), json!(p.degree()));
            CommandOutput::new(text + "\n", to_value(&report), EXIT_OK)
        }
        Ok(QRatio::NotPolynomial { d, exponent }) => {
            report.outcomes.push(json!({
                "point": point,
                "not_polynomial": { "d": d, "exponent": exponent },
                "cyclotomic_exponents": exps_json,
            }));
            report.summary.insert("status".into(), json!("NotPolynomial"));
            CommandOutput::new(
                format!("not a polynomial: Φ{d} has exponent {exponent}\n"),
                to_value(&report),
                EXIT_FOUND,
            )
        }
        Err(e) => CommandOutput::input_error("qpoly", arg, e),
    }
}

fn table_csv(table: &PointTable) -> String {
    let mut out = String::from("point,status,degree,min_coefficient,min_power,d,exponent\n");
    for row in &table.rows {
        let point = row.point.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        match &row.outcome {
            Outcome::Poly {
                degree,
                min_power,
                min_value,
            } => {
                let _ = writeln!(out, "{point},polynomial,{degree},{min_value},{min_power},,");
            }
            Outcome::NotPoly { d, exponent } => {
                let _ = writeln!(out, "{point},not_polynomial,,,,{d},{exponent}");
            }
        }
    }
    out
}

pub fn cmd_positivity(arg: &str, box_bound: u64) -> CommandOutput {
    let r = match resolve(arg) {
        Ok(r) => r,
        Err(e) => return CommandOutput::input_error("positivity", arg, e),
    };
    let table = match r.family {
        Some(f) => positivity_table_family(f, box_bound),
        None => positivity_table(&r.spec, box_bound),
    };
    let table = match table {
        Ok(t) => t,
        Err(e) => return CommandOutput::input_error("positivity", arg, e),
    };
    let report = table.summarize();
    let mut text = format!(
        "{}: {:?} over box {} ({} points, {} skipped)\n",
        report.family, report.status, box_bound, report.points_checked, report.skipped_points
    );
    if let Some(m) = &report.min_coefficient {
        let _ = writeln!(text, "minimum coefficient {} at {:?}, power {}", m.value, m.point, m.power);
    }
    for w in &report.witnesses {
        let _ = writeln!(text, "  witness {:?}: {:?}", w.point, w.issue);
    }
    let exit_code = if report.status == PositivityStatus::AllNonNegative {
        EXIT_OK
    } else {
        EXIT_FOUND
    };
    let mut out = CommandOutput::new(text, to_value(&report), exit_code);
    out.csv = Some(table_csv(&table));
    out
}

pub fn cmd_ct(m: u32, n: u32, q1: bool, budget: usize) -> CommandOutput {
    let opts = G2Options { budget, at_q_one: q1 };
    match check_g2(m, n, &opts) {
        Ok(check) => {
            let verdict = if check.matches() { "MATCH" } else { "MISMATCH" };
            let mut text = format!("{} — {verdict}\n", check.constant_term);
            if !check.matches() {
                let _ = writeln!(text, "expected {}", check.expected);
            }
            let coeffs = |p: &qrious_core::IntPoly| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>();
            let report = ScanReport {
                command: "ct".into(),
                spec: lookup_family("Aq").map(|f| SpecIdentity {
                    name: Some(f.name.into()),
                    text: f.spec.to_string(),
                    canonical: f.spec.to_json(),
                }),
                parameters: BTreeMap::from([
                    ("m".into(), json!(m)),
                    ("n".into(), json!(n)),
                    ("q1".into(), json!(q1)),
                    ("budget".into(), json!(budget)),
                ]),
                outcomes: vec![json!({
                    "constant_term": coeffs(&check.constant_term),
                    "expected": coeffs(&check.expected),
                })],
                summary: BTreeMap::from([("status".into(), json!(verdict))]),
            };
            let code = if check.matches() { EXIT_OK } else { EXIT_FOUND };
            CommandOutput::new(text, to_value(&report), code)
        }
        Err(e @ CtError::BudgetExceeded { .. }) => {
            let report = ScanReport {
                command: "ct".into(),
                spec: None,
                parameters: BTreeMap::from([
                    ("m".into(), json!(m)),
                    ("n".into(), json!(n)),
                    ("q1".into(), json!(q1)),
                    ("budget".into(), json!(budget)),
                ]),
                outcomes: vec![json!({ "error": e.to_string() })],
                summary: BTreeMap::from([("status".into(), json!("BudgetExceeded"))]),
            };
            CommandOutput::new(format!("error: {e}\n"), to_value(&report), EXIT_BUDGET)
        }
    }
}

pub fn cmd_search(max_sum: u64, max_terms: usize) -> CommandOutput {
    if max_sum < 2 || max_terms < 1 {
        return CommandOutput::input_error(
            "search",
            &format!("{max_sum} {max_terms}"),
            "need max_sum >= 2 and max_terms >= 1",
        );
    }
    let found = search(max_sum, max_terms);
    let mut counts: BTreeMap<String, Value> = BTreeMap::new();
    let mut text = String::new();
    for c in &found {
        let key = match &c.verdict {
            CandidateVerdict::Integral => {
                let _ = writeln!(text, "{:>4}  {}  Integral", c.sum(), c.label());
                "integral"
            }
            CandidateVerdict::InternalError { detail } => {
                let _ = writeln!(text, "{:>4}  {}  INTERNAL-ERROR {detail}", c.sum(), c.label());
                "internal_error"
            }
            CandidateVerdict::NonIntegral { .. } => "non_integral",
            CandidateVerdict::Skipped { .. } => "skipped",
        };
        let entry = counts.entry(key.into()).or_insert(json!(0));
        *entry = json!(entry.as_u64().unwrap_or(0) + 1);
    }
    let internal = counts.get("internal_error").and_then(Value::as_u64).unwrap_or(0);
    let _ = writeln!(
        text,
        "{} candidates: {}",
        found.len(),
        counts
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    counts.insert("candidates".into(), json!(found.len()));
    let report = ScanReport {
        command: "search".into(),
        spec: None,
        parameters: BTreeMap::from([
            ("max_sum".into(), json!(max_sum)),
            ("max_terms".into(), json!(max_terms)),
        ]),
        outcomes: found.iter().map(to_value).collect(),
        summary: counts,
    };
    let code = if internal > 0 { EXIT_INTERNAL } else { EXIT_OK };
    CommandOutput::new(text, to_value(&report), code)
}

pub fn cmd_families() -> CommandOutput {
    let mut text = String::new();
    let mut rows = Vec::new();
    for f in known_families() {
        let domain = match f.domain {
            qrious_core::qratio::Domain::NonNegative => "all non-negative".to_string(),
            qrious_core::qratio::Domain::Ordered { lo, hi } => {
                format!("{} <= {}", f.spec.params()[lo], f.spec.params()[hi])
            }
        };
        let _ = writeln!(
            text,
            "{:<13} height {}  {}  [{}]  {}",
            f.name,
            f.height(),
            f.spec,
            domain,
            f.description
        );
        rows.push(json!({
            "name": f.name,
            "description": f.description,
            "spec": f.spec.to_string(),
            "canonical": f.spec.to_json(),
            "height": f.height(),
            "balanced": f.is_balanced(),
            "domain": domain,
        }));
    }
    let report = ScanReport {
        command: "families".into(),
        spec: None,
        parameters: BTreeMap::new(),
        outcomes: rows,
        summary: BTreeMap::from([("count".into(), json!(known_families().len()))]),
    };
    CommandOutput::new(text, to_value(&report), EXIT_OK)
}

/// Runs `f` on a dedicated pool of `jobs` threads, or on the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse_with_or_without_parentheses() {
        assert_eq!(parse_point("1,0"), Ok(vec![1, 0]));
        assert_eq!(parse_point(" (2, 3) "), Ok(vec![2, 3]));
        assert!(parse_point("1,x").is_err());
    }

    #[test]
    fn registry_names_win_over_spec_text() {
        let r = resolve("binomial").unwrap();
        assert_eq!(r.name.as_deref(), Some("binomial"));
        let r = resolve("m+n / m, n").unwrap();
        assert!(r.name.is_none());
        assert!(resolve("nonsense").is_err());
    }

    #[test]
    fn registry_families_check_as_integral() {
        let opts = CheckOptions {
            method: Method::Both,
            box_bound: 4,
            d_max: None,
            threshold: None,
        };
        for f in known_families() {
            let out = cmd_check(f.name, &opts);
            assert_eq!(out.exit_code, EXIT_OK, "{}", f.name);
            assert_eq!(out.json["summary"]["status"], "Integral", "{}", f.name);
        }
    }

    #[test]
    fn search_rejects_empty_ranges() {
        assert_eq!(cmd_search(1, 2).exit_code, EXIT_INPUT);
        assert_eq!(cmd_search(5, 0).exit_code, EXIT_INPUT);
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let out = cmd_positivity("binomial", 2);
        assert_eq!(out.csv.unwrap().lines().count(), 1 + 9);
    }
}
