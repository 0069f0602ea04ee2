use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use super::JobConfig;
use crate::analysis::VerificationReport;
use crate::catalog::FamilyId;
use crate::error::{Error, Result};

pub const VERSION_HEADER: &str = concat!("# zepot ", env!("CARGO_PKG_VERSION"));

/// Named columns of equal length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|row| row[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{VERSION_HEADER}").unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }

    fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        for (i, name) in self.columns.iter().enumerate() {
            let col: Vec<Value> = self.rows.iter().map(|row| number(row[i])).collect();
            obj.insert(name.clone(), Value::Array(col));
        }
        Value::Object(obj)
    }
}

/// JSON has no encoding for non-finite numbers; they become strings.
fn number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn to_pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn report_value(report: &VerificationReport) -> Result<Value> {
    let mut v = serde_json::to_value(report).map_err(|e| Error::Config(e.to_string()))?;
    if let Value::Object(obj) = &mut v {
        obj.insert("passed".into(), json!(report.passed()));
    }
    Ok(v)
}

pub(super) fn json_document(
    job: &JobConfig,
    provenance: &[String],
    reports: &[VerificationReport],
    table: Option<&Table>,
) -> Result<String> {
    let reports: Vec<Value> = reports.iter().map(report_value).collect::<Result<_>>()?;
    let report = match reports.len() {
        0 => Value::Null,
        1 => reports[0].clone(),
        _ => Value::Array(reports),
    };
    let doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": job,
        "provenance": provenance,
        "report": report,
        "samples": table.map(Table::to_json).unwrap_or(Value::Null),
    });
    to_pretty(&doc)
}

pub(super) fn verify_text(reports: &[VerificationReport]) -> String {
    let mut s = String::new();
    writeln!(s, "{VERSION_HEADER}").unwrap();
    writeln!(s, "subject,check,passed,value,threshold").unwrap();
    for report in reports {
        for check in &report.flags {
            writeln!(
                s,
                "{},{},{},{:.6e},{:.6e}",
                report.subject,
                check.name,
                if check.passed { "PASS" } else { "FAIL" },
                check.value,
                check.threshold
            )
            .unwrap();
        }
    }
    s
}

pub(super) fn catalog_text(families: &[FamilyId]) -> String {
    let mut s = String::new();
    writeln!(s, "{VERSION_HEADER}").unwrap();
    for f in families {
        writeln!(s, "{}", f.label()).unwrap();
        writeln!(s, "    {}", f.formula()).unwrap();
        writeln!(s, "    domain: {}", f.domain_text()).unwrap();
        writeln!(
            s,
            "    closed-form pair: {}",
            if f.has_closed_form_pair() { "yes" } else { "no" }
        )
        .unwrap();
    }
    s
}

pub(super) fn catalog_json(families: &[FamilyId]) -> Result<String> {
    let entries: Vec<Value> = families
        .iter()
        .map(|f| {
            json!({
                "id": f.name(),
                "defaults": f.params(),
                "formula": f.formula(),
                "domain": f.domain_text(),
                "closed_form_pair": f.has_closed_form_pair(),
            })
        })
        .collect();
    to_pretty(&json!({ "version": env!("CARGO_PKG_VERSION"), "families": entries }))
}
