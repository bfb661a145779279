//! The five subcommands. Each produces a [`Table`]: a JSON document plus the
//! equivalent flat CSV rows.

use std::fs;
use std::path::Path;

use loglocal_core::givental::{degree_box, mirror_map_check, p_closed, p_local_series, q_closed, q_local_series};
use loglocal_core::toric::{factors_from_json, validate_factors};
use loglocal_core::tropical::{build_p_curve, build_q_curve, log_invariants, multiplicity};
use loglocal_core::verify::{expand_bound, fleet, rational_string, sweep, DegreeReport};
use loglocal_core::{CurveClass, NefToricProduct};
use serde_json::{json, Value};

use crate::{CliError, SCHEMA_VERSION};

pub struct Table {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

type CmdResult = Result<Outcome, CliError>;

fn load(path: &Path) -> Result<NefToricProduct, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input("io", format!("cannot read {}: {e}", path.display())))?;
    let factors = factors_from_json(&text)?;
    Ok(NefToricProduct::new(factors)?)
}

fn bound(x: &NefToricProduct, d_max: &[u64]) -> Result<Vec<u64>, CliError> {
    expand_bound(x, d_max).ok_or_else(|| {
        CliError::input(
            "input",
            format!(
                "--dmax {d_max:?}: expected a positive scalar or {} positive entries, one per factor",
                x.num_factors()
            ),
        )
    })
}

fn list<T: ToString>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(T::to_string).collect();
    format!("({})", parts.join(","))
}

fn header(command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m
}

pub fn describe(path: &Path) -> CmdResult {
    let x = load(path)?;
    let report = validate_factors(x.factors());
    let factors: Vec<Value> = x
        .factors()
        .iter()
        .zip(&report.recomputed_group_orders)
        .map(|(f, g)| {
            let rays: Vec<Vec<Value>> = f
                .rays
                .iter()
                .map(|r| r.iter().map(|c| c.to_string().parse().expect("integer literal")).collect())
                .collect();
            json!({
                "weights": f.weights,
                "rays": rays,
                "group_order": f.group_order,
                "recomputed_group_order": g,
            })
        })
        .collect();
    let k = x.point_constant().to_string();

    let mut doc = header("describe");
    doc.insert("n".into(), json!(x.dim()));
    doc.insert("dims".into(), json!(x.dims()));
    doc.insert("r".into(), json!(x.num_factors()));
    doc.insert("l_D".into(), json!(x.num_divisors()));
    doc.insert("Q".into(), json!(x.q_matrix()));
    doc.insert("K".into(), json!(k));
    doc.insert("factors".into(), Value::Array(factors));
    doc.insert("validation".into(), serde_json::to_value(&report).expect("serializable"));

    let mut rows = vec![
        vec!["n".into(), x.dim().to_string()],
        vec!["dims".into(), list(x.dims())],
        vec!["r".into(), x.num_factors().to_string()],
        vec!["l_D".into(), x.num_divisors().to_string()],
        vec!["K".into(), k],
    ];
    for (i, row) in x.q_matrix().iter().enumerate() {
        rows.push(vec![format!("Q[{i}]"), list(row)]);
    }
    for (i, (f, g)) in x.factors().iter().zip(&report.recomputed_group_orders).enumerate() {
        rows.push(vec![format!("group_order[{i}]"), f.group_order.to_string()]);
        rows.push(vec![
            format!("recomputed_group_order[{i}]"),
            g.clone().unwrap_or_default(),
        ]);
    }
    Ok(Outcome {
        table: Table {
            json: Value::Object(doc),
            header: vec!["key", "value"],
            rows,
        },
        passed: true,
    })
}

fn rows_document(command: &str, d_max: &[u64], rows: Vec<Value>) -> serde_json::Map<String, Value> {
    let mut doc = header(command);
    doc.insert("d_max".into(), json!(d_max));
    doc.insert("rows".into(), Value::Array(rows));
    doc
}

pub fn log(path: &Path, d_max: &[u64]) -> CmdResult {
    let x = load(path)?;
    let d_max = bound(&x, d_max)?;
    let mut json_rows = Vec::new();
    let mut rows = Vec::new();
    for d in degree_box(&d_max) {
        let row = log_row(&x, &d)?;
        rows.push(vec![
            d.to_string(),
            list(&row.e),
            row.rp.clone(),
            row.rq.clone(),
            row.rp_tropical.clone(),
            row.rq_tropical.clone(),
        ]);
        json_rows.push(json!({
            "d": d.0,
            "e": row.e,
            "Rp": row.rp,
            "Rq": row.rq,
            "Rp_tropical": row.rp_tropical,
            "Rq_tropical": row.rq_tropical,
        }));
    }
    Ok(Outcome {
        table: Table {
            json: Value::Object(rows_document("log", &d_max, json_rows)),
            header: vec!["d", "e", "Rp", "Rq", "Rp_tropical", "Rq_tropical"],
            rows,
        },
        passed: true,
    })
}

struct LogRow {
    e: Vec<u64>,
    rp: String,
    rq: String,
    rp_tropical: String,
    rq_tropical: String,
}

fn log_row(x: &NefToricProduct, d: &CurveClass) -> Result<LogRow, CliError> {
    let e = x.tangencies(d)?;
    let closed = log_invariants(x, d)?;
    let (rp_tropical, rq_tropical) = if e.contains(&0) {
        ("0".to_string(), "0".to_string())
    } else {
        (
            multiplicity(&build_p_curve(x, d)?)?.to_string(),
            multiplicity(&build_q_curve(x, d)?)?.to_string(),
        )
    };
    Ok(LogRow {
        e,
        rp: rational_string(&closed.rp),
        rq: rational_string(&closed.rq),
        rp_tropical,
        rq_tropical,
    })
}

pub fn local(path: &Path, d_max: &[u64]) -> CmdResult {
    let x = load(path)?;
    let d_max = bound(&x, d_max)?;
    let mut json_rows = Vec::new();
    let mut rows = Vec::new();
    for d in degree_box(&d_max) {
        let e = x.tangencies(&d)?;
        let n = x.sign_factor(&d)?.to_string();
        let p = rational_string(&p_local_series(&x, &d)?);
        let q = rational_string(&q_local_series(&x, &d)?);
        json_rows.push(json!({
            "d": d.0,
            "e": e,
            "N": n,
            "p": p,
            "q": q,
            "p_closed": rational_string(&p_closed(&x, &d)?),
            "q_closed": rational_string(&q_closed(&x, &d)?),
        }));
        rows.push(vec![d.to_string(), list(&e), n, p, q]);
    }
    Ok(Outcome {
        table: Table {
            json: Value::Object(rows_document("local", &d_max, json_rows)),
            header: vec!["d", "e", "N", "p", "q"],
            rows,
        },
        passed: true,
    })
}

const VERIFY_HEADER: [&str; 17] = [
    "d",
    "e",
    "N",
    "rp_closed",
    "rp_tropical",
    "rq_closed",
    "rq_tropical",
    "p_closed",
    "p_series",
    "q_closed",
    "q_series",
    "correspondence_p",
    "correspondence_q",
    "pipelines_agree",
    "degenerate",
    "p_series_agrees",
    "match",
];

fn verify_csv_row(r: &DegreeReport) -> Vec<String> {
    vec![
        list(&r.d),
        list(&r.e),
        r.n.to_string(),
        rational_string(&r.rp_closed),
        rational_string(&r.rp_tropical),
        rational_string(&r.rq_closed),
        rational_string(&r.rq_tropical),
        rational_string(&r.p_closed),
        rational_string(&r.p_series),
        rational_string(&r.q_closed),
        rational_string(&r.q_series),
        r.correspondence_p.to_string(),
        r.correspondence_q.to_string(),
        r.pipelines_agree.to_string(),
        r.degenerate.to_string(),
        r.p_series_agrees.to_string(),
        r.matches.to_string(),
    ]
}

pub fn verify(path: &Path, d_max: &[u64]) -> CmdResult {
    let x = load(path)?;
    let d_max = bound(&x, d_max)?;
    let s = sweep(&x, &d_max)?;
    let rows = s.reports.iter().map(verify_csv_row).collect();
    let json_rows = s
        .reports
        .iter()
        .map(|r| serde_json::to_value(r).expect("serializable"))
        .collect();
    let mut doc = rows_document("verify", &d_max, json_rows);
    doc.insert("summary".into(), serde_json::to_value(&s.summary).expect("serializable"));
    Ok(Outcome {
        passed: s.passed(),
        table: Table {
            json: Value::Object(doc),
            header: VERIFY_HEADER.to_vec(),
            rows,
        },
    })
}

pub fn selftest(d_max: u64) -> CmdResult {
    if d_max == 0 {
        return Err(CliError::input("input", "--dmax must be positive"));
    }
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut first_failure = Value::Null;
    let mut passed = true;
    for (name, x) in fleet() {
        let bound = vec![d_max; x.num_factors()];
        let s = sweep(&x, &bound)?;
        let mirror = mirror_map_check(&x, &bound)?;
        let ok = s.passed() && mirror.passed();
        if first_failure.is_null() {
            if let Some(f) = &s.summary.first_failure {
                first_failure = json!({ "geometry": name, "d": f.d, "check": f.check });
            } else if !mirror.passed() {
                first_failure = json!({ "geometry": name, "check": "mirror_map" });
            }
        }
        passed &= ok;
        let first = s
            .summary
            .first_failure
            .as_ref()
            .map(|f| format!("{} {}", list(&f.d), f.check))
            .unwrap_or_default();
        rows.push(vec![
            name.to_string(),
            s.summary.degrees.to_string(),
            s.summary.failed_degrees.to_string(),
            first,
            mirror.passed().to_string(),
            ok.to_string(),
        ]);
        entries.push(json!({
            "geometry": name,
            "degrees": s.summary.degrees,
            "failed_degrees": s.summary.failed_degrees,
            "first_failure": s.summary.first_failure,
            "mirror_map_trivial": mirror.passed(),
            "passed": ok,
        }));
    }
    let mut doc = header("selftest");
    doc.insert("d_max".into(), json!(d_max));
    doc.insert("geometries".into(), Value::Array(entries));
    doc.insert("first_failure".into(), first_failure);
    doc.insert("passed".into(), json!(passed));
    Ok(Outcome {
        table: Table {
            json: Value::Object(doc),
            header: vec!["geometry", "degrees", "failed_degrees", "first_failure", "mirror_map_trivial", "passed"],
            rows,
        },
        passed,
    })
}
