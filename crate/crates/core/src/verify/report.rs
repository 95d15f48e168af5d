use std::fmt::Write;
use std::str::FromStr;

use super::{ClaimReport, SuiteConfig, Value};
use crate::error::{Error, Result};

pub const REPORT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

/// Renders reports. JSON keys are emitted in a fixed order and reals with
/// 17 significant digits, so equal inputs give equal bytes.
pub fn emit_report(cfg: &SuiteConfig, reports: &[ClaimReport], format: Format) -> String {
    match format {
        Format::Json => json(cfg, reports),
        Format::Text => text(reports),
    }
}

fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map_or_else(|| "null".into(), real)
}

fn string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Real(x) => real(*x),
        Value::Text(s) => string(s),
    }
}

fn object(kv: &[(String, Value)]) -> String {
    let body: Vec<String> = kv.iter().map(|(k, v)| format!("{}:{}", string(k), value(v))).collect();
    format!("{{{}}}", body.join(","))
}

fn json(cfg: &SuiteConfig, reports: &[ClaimReport]) -> String {
    let (p, q) = cfg
        .signature
        .map_or(("null".into(), "null".into()), |(p, q)| (p.to_string(), q.to_string()));
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"version\":{},\"config\":{{\"suite\":{},\"p\":{p},\"q\":{q},\"trials\":{},\"seed\":{},\"fd_step\":{},\"tol_exact\":{},\"tol_fd\":{}}},\"claims\":[",
        string(REPORT_VERSION),
        string(cfg.suite.name()),
        cfg.trials,
        cfg.seed,
        real(cfg.fd_step),
        opt_real(cfg.tol_exact),
        opt_real(cfg.tol_fd),
    );
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "\n{{\"claim_id\":{},\"paper_anchor\":{},\"params\":{},\"trials\":{},\"max_residual\":{},\"tolerance\":{},\"extra\":{},\"status\":{}}}",
            string(&r.claim_id),
            string(&r.paper_anchor),
            object(&r.params),
            r.trials,
            real(r.max_residual),
            opt_real(r.tolerance),
            object(&r.extra),
            string(r.status.as_str()),
        );
    }
    if !reports.is_empty() {
        out.push('\n');
    }
    out.push_str("]}\n");
    out
}

fn short(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Real(x) => format!("{x:.3e}"),
        Value::Text(s) => s.clone(),
    }
}

fn pad(s: &str, w: usize) -> String {
    let n = s.chars().count();
    if n >= w {
        s.to_string()
    } else {
        format!("{s}{}", " ".repeat(w - n))
    }
}

fn text(reports: &[ClaimReport]) -> String {
    let rows: Vec<[String; 7]> = reports
        .iter()
        .map(|r| {
            let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={}", short(v))).collect();
            [
                r.claim_id.clone(),
                r.paper_anchor.clone(),
                params.join(","),
                r.trials.to_string(),
                if r.max_residual.is_finite() {
                    format!("{:.3e}", r.max_residual)
                } else {
                    "nan".into()
                },
                r.tolerance.map_or_else(|| "-".into(), |t| format!("{t:.1e}")),
                r.status.as_str().to_string(),
            ]
        })
        .collect();
    let header = [
        "claim_id",
        "paper_anchor",
        "params",
        "trials",
        "max_residual",
        "tol",
        "status",
    ]
    .map(String::from);
    let mut widths = header.clone().map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |row: &[String; 7]| {
        let cells: Vec<String> = row.iter().zip(widths).map(|(c, w)| pad(c, w)).collect();
        cells.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&header);
    out.push_str(&(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n"));
    for row in &rows {
        out.push_str(&line(row));
    }
    out
}
