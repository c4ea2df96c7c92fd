use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use banachlab::geoconst::ConstantEstimate;
use banachlab::pglab::BoundReport;
use banachlab::projlab::ProjectionAudit;
use banachlab::suite::{SuiteReport, SCHEMA};
use banachlab::NormedSpace;
use serde_json::{json, Value};

use crate::Format;

pub enum Outcome {
    Pass,
    Violation,
}

/// One rendered command result.
pub struct Report {
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    text: String,
    violations: usize,
}

impl Report {
    pub fn outcome(&self) -> Outcome {
        if self.violations == 0 {
            Outcome::Pass
        } else {
            Outcome::Violation
        }
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string()),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).map_err(|e| e.to_string())?;
                for row in &self.rows {
                    w.write_record(row).map_err(|e| e.to_string())?;
                }
                let bytes = w.into_inner().map_err(|e| e.to_string())?;
                String::from_utf8(bytes).map_err(|e| e.to_string())
            }
            Format::Text => Ok(self.text.clone()),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.17e}")
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn range_violations(name: &str, v: f64, out: &mut Vec<String>) {
    if !(1.0 - 1e-9..=2.0 + 1e-6).contains(&v) {
        out.push(format!("{name} = {v} lies outside [1, 2]"));
    }
}

pub fn constants(
    space: &NormedSpace,
    seed: u64,
    cnj: ConstantEstimate,
    cbm: ConstantEstimate,
    dbm: Option<ConstantEstimate>,
) -> Report {
    let mut violations = Vec::new();
    range_violations("C_NJ estimate", cnj.value, &mut violations);
    range_violations("C_BM estimate", cbm.value, &mut violations);
    if let Some(d) = &dbm {
        range_violations("plane distance", d.value, &mut violations);
        if d.value > SQRT_2 + 1e-6 {
            violations.push(format!("plane distance {} exceeds sqrt 2", d.value));
        }
    }
    let mut rows = vec![
        vec!["cnj".into(), num(cnj.value)],
        vec!["cbm".into(), num(cbm.value)],
    ];
    let mut text = format!("{} in dimension {}, seed {seed}\n", space.label(), space.dim());
    let _ = writeln!(text, "  C_NJ >= {:.9}", cnj.value);
    let _ = writeln!(text, "  C_BM >= {:.9}", cbm.value);
    if let Some(d) = &dbm {
        rows.push(vec!["dbm".into(), num(d.value)]);
        let _ = writeln!(text, "  d_BM(V, l2) <= {:.9}", d.value);
    }
    for v in &violations {
        let _ = writeln!(text, "  VIOLATION: {v}");
    }
    Report {
        json: json!({
            "schema": SCHEMA,
            "command": "constants",
            "seed": seed,
            "space": space.to_spec(),
            "cnj": cnj,
            "cbm": cbm,
            "dbm": dbm,
            "violations": violations,
        }),
        header: strings(&["constant", "value"]),
        rows,
        text,
        violations: violations.len(),
    }
}

pub fn dbm(space: &NormedSpace, seed: u64, d: ConstantEstimate) -> Report {
    let mut violations = Vec::new();
    range_violations("plane distance", d.value, &mut violations);
    if d.value > SQRT_2 + 1e-6 {
        violations.push(format!("plane distance {} exceeds sqrt 2", d.value));
    }
    let mut text = format!("{}: d_BM(V, l2) <= {:.9}\n", space.label(), d.value);
    for v in &violations {
        let _ = writeln!(text, "  VIOLATION: {v}");
    }
    Report {
        json: json!({
            "schema": SCHEMA,
            "command": "dbm",
            "seed": seed,
            "space": space.to_spec(),
            "dbm": d,
            "violations": violations,
        }),
        header: strings(&["constant", "value"]),
        rows: vec![vec!["dbm".into(), num(d.value)]],
        text,
        violations: violations.len(),
    }
}

/// On inner-product spaces every audit also checks `|P| = |I - P|`.
pub fn proj_audit(space: &NormedSpace, seed: u64, cbm: f64, mut audits: Vec<ProjectionAudit>) -> Report {
    if space.is_hilbert() {
        for a in &mut audits {
            let gap = (a.norm_p.lower - a.norm_i_minus_p.lower).abs();
            if gap > 1e-8 {
                a.violations.push(format!("|P| and |I-P| differ by {gap:.3e} in an inner-product space"));
            }
        }
    }
    let failed = audits.iter().filter(|a| !a.passed()).count();
    let header = strings(&[
        "trial",
        "dim",
        "rank",
        "norm_p",
        "norm_i_minus_p",
        "method",
        "cbm",
        "bound_c",
        "operator_bound",
        "operator_slack",
        "observed_ratio",
        "per_vector_worst_slack",
        "vectors_checked",
        "distance_evaluations",
        "violations",
    ]);
    let rows = audits
        .iter()
        .enumerate()
        .map(|(k, a)| {
            vec![
                k.to_string(),
                a.dim.to_string(),
                a.rank.to_string(),
                num(a.norm_p.lower),
                num(a.norm_i_minus_p.lower),
                format!("{:?}", a.norm_p.method),
                num(a.cbm),
                num(a.bound_c),
                num(a.operator_bound),
                num(a.operator_slack),
                num(a.observed_ratio),
                a.per_vector_worst_slack.map(num).unwrap_or_default(),
                a.vectors_checked.to_string(),
                a.distance_evaluations.to_string(),
                a.violations.len().to_string(),
            ]
        })
        .collect();
    let mut text = format!(
        "{} in dimension {}: {} projections audited with C_BM = {cbm}, {failed} failed\n",
        space.label(),
        space.dim(),
        audits.len()
    );
    let worst = audits.iter().map(|a| a.observed_ratio).fold(f64::NAN, f64::max);
    let _ = writeln!(text, "  largest |I-P|/|P| = {worst:.9}");
    for (k, a) in audits.iter().enumerate() {
        for v in &a.violations {
            let _ = writeln!(text, "  trial {k}: VIOLATION: {v}");
        }
    }
    Report {
        json: json!({
            "schema": SCHEMA,
            "command": "proj-audit",
            "seed": seed,
            "space": space.to_spec(),
            "cbm": cbm,
            "trials": audits.len(),
            "failed": failed,
            "audits": audits,
        }),
        header,
        rows,
        text,
        violations: failed,
    }
}

pub fn pg_verify(seed: u64, r: BoundReport) -> Report {
    let mut text = format!("{}: n = {}, n_h = {}\n", r.problem_id, r.n, r.n_h);
    let _ = writeln!(text, "  M = {:.9}, m = {:.9}, m_h = {:.9}", r.m_cont, r.m, r.m_h);
    let _ = writeln!(text, "  err = {:.9e}, best = {:.9e}", r.err, r.best);
    let _ = writeln!(text, "  Babuska bound {:.9e}, sharpened bound {:.9e} (C = {:.6})", r.bound_babuska, r.bound_sharp, r.c_used);
    if let Some(b) = r.bound_xz {
        let _ = writeln!(text, "  Xu-Zikatanov bound {b:.9e}");
    }
    for v in &r.violations {
        let _ = writeln!(text, "  VIOLATION: {v}");
    }
    let mut json = json!({ "schema": SCHEMA, "command": "pg-verify", "seed": seed });
    if let (Value::Object(map), Ok(Value::Object(fields))) = (&mut json, serde_json::to_value(&r)) {
        map.extend(fields);
    }
    Report {
        json,
        header: strings(&BoundReport::csv_header()),
        rows: vec![r.csv_record()],
        text,
        violations: r.violations.len(),
    }
}

pub fn suite(r: SuiteReport) -> Report {
    let mut text = String::new();
    for c in &r.criteria {
        let _ = writeln!(
            text,
            "criterion {} {}: {} ({} checks, {} violations)",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.title,
            c.checked,
            c.violation_count
        );
        for v in &c.violations {
            let _ = writeln!(text, "  {v}");
        }
    }
    let rows = r
        .criteria
        .iter()
        .map(|c| {
            vec![
                c.id.to_string(),
                c.title.clone(),
                c.passed.to_string(),
                c.checked.to_string(),
                c.violation_count.to_string(),
            ]
        })
        .collect();
    let violations = r.criteria.iter().map(|c| c.violation_count).sum();
    let mut json = serde_json::to_value(&r).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut json {
        map.insert("command".into(), "suite".into());
    }
    Report {
        json,
        header: strings(&["id", "title", "passed", "checked", "violations"]),
        rows,
        text,
        violations,
    }
}
