//! Check rows and their CSV serialization.

use std::io::Write;

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const HEADER: [&str; 7] = [
    "check_id",
    "param_json",
    "measured",
    "bound",
    "tolerance",
    "pass",
    "error_estimate",
];

/// Complex number as `re+imj`.
pub fn format_complex(z: Complex64) -> String {
    format!("{}{:+}j", z.re, z.im)
}

/// One certificate: passes when `measured ≤ bound + tolerance`, inverted for
/// rows whose parameters carry `"expect": "fail"`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub check_id: String,
    pub params: Map<String, Value>,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub error_estimate: f64,
}

impl Row {
    pub fn new(check_id: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self {
            check_id: check_id.into(),
            params: Map::new(),
            measured,
            bound,
            tolerance,
            error_estimate: 0.0,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn complex_param(self, key: &str, z: Complex64) -> Self {
        self.param(key, format_complex(z))
    }

    pub fn error(mut self, e: f64) -> Self {
        self.error_estimate = e;
        self
    }

    pub fn expect_fail(self) -> Self {
        self.param("expect", "fail")
    }

    pub fn expects_failure(&self) -> bool {
        self.params.get("expect").and_then(Value::as_str) == Some("fail")
    }

    pub fn within(&self) -> bool {
        self.measured <= self.bound + self.tolerance
    }

    pub fn pass(&self) -> bool {
        self.within() != self.expects_failure()
    }
}

/// Ordered rows of one command run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = Row>) {
        self.rows.extend(rows);
    }

    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.pass()).count()
    }

    pub fn failed(&self) -> usize {
        self.rows.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("writing report: {e}"));
        w.write_record(HEADER).map_err(io)?;
        for r in &self.rows {
            let params = serde_json::to_string(&r.params).map_err(|e| Error::Config(e.to_string()))?;
            w.write_record([
                r.check_id.clone(),
                params,
                r.measured.to_string(),
                r.bound.to_string(),
                r.tolerance.to_string(),
                r.pass().to_string(),
                r.error_estimate.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Config(format!("writing report: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_format() {
        assert_eq!(format_complex(Complex64::new(1.5, -2.0)), "1.5-2j");
        assert_eq!(format_complex(Complex64::new(0.0, 0.25)), "0+0.25j");
    }

    #[test]
    fn pass_rule_and_negative_control() {
        let ok = Row::new("a", 1e-9, 0.0, 1e-8);
        assert!(ok.pass());
        let bad = Row::new("b", 1e-7, 0.0, 1e-8);
        assert!(!bad.pass());
        assert!(bad.clone().expect_fail().pass());
        assert!(!ok.clone().expect_fail().pass());
        let nan = Row::new("c", f64::NAN, 0.0, 1.0);
        assert!(!nan.pass());
    }

    #[test]
    fn csv_layout_and_quoting() {
        let mut r = Report::default();
        r.push(Row::new("kk", 0.5, 1.0, 0.0).complex_param("z", Complex64::new(1.0, 0.5)).error(1e-3));
        let s = r.to_csv_string().unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(lines.next().unwrap(), r#"kk,"{""z"":""1+0.5j""}",0.5,1,0,true,0.001"#);
    }
}
