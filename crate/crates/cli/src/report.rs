//! Run reports: per-check status plus values, serialized with a fixed key order.

use std::fmt::Display;
use std::time::Duration;

use serde_json::{json, Map, Value};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

/// One named verification with the values it looked at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub reason: Option<String>,
    /// Which published result or closed form the check audits.
    pub reference: Option<&'static str>,
    /// Every value as a decimal string, in insertion order.
    pub values: Vec<(String, String)>,
}

impl Check {
    pub fn new(id: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            status: Status::Pass,
            reason: None,
            reference: None,
            values: Vec::new(),
        }
    }

    pub fn skipped(id: impl Into<String>, reason: impl Into<String>) -> Check {
        Check {
            status: Status::Skipped,
            reason: Some(reason.into()),
            ..Check::new(id)
        }
    }

    /// Compares `got` with `expected` through their decimal renderings.
    pub fn equal(id: impl Into<String>, got: impl Display, expected: impl Display) -> Check {
        let (g, e) = (got.to_string(), expected.to_string());
        let ok = g == e;
        Check::new(id)
            .value("got", &g)
            .value("expected", &e)
            .require(ok, "value differs from the expected one")
    }

    pub fn value(mut self, key: impl Into<String>, v: impl Display) -> Check {
        self.values.push((key.into(), v.to_string()));
        self
    }

    pub fn reference(mut self, r: &'static str) -> Check {
        self.reference = Some(r);
        self
    }

    /// Marks the check failed with `reason` unless `ok`; never revives a failure.
    pub fn require(mut self, ok: bool, reason: impl Into<String>) -> Check {
        if !ok && self.status != Status::Fail {
            self.status = Status::Fail;
            self.reason = Some(reason.into());
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Renders a list as "[a, b, c]" with decimal entries.
pub fn list<T: Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub timings: Vec<(String, Duration)>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> RunReport {
        RunReport {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn param(mut self, key: &str, v: impl Display) -> RunReport {
        self.params.push((key.to_string(), v.to_string()));
        self
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn time(&mut self, label: impl Into<String>, d: Duration) {
        self.timings.push((label.into(), d));
    }

    /// Appends another report's checks and timings, prefixing ids with `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: RunReport) {
        for mut c in other.checks {
            c.id = format!("{prefix}.{}", c.id);
            self.checks.push(c);
        }
        for (label, d) in other.timings {
            self.timings.push((format!("{prefix}.{label}"), d));
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Timings are opt-in so that default reports are byte-identical between runs.
    pub fn to_json(&self, paper_refs: bool, timings: bool) -> Value {
        let mut root = Map::new();
        root.insert("tool".into(), json!("framelab"));
        root.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        root.insert("command".into(), json!(self.command));
        root.insert("params".into(), pairs(&self.params));
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("id".into(), json!(c.id));
                m.insert("status".into(), json!(c.status.label()));
                if let Some(r) = &c.reason {
                    m.insert("reason".into(), json!(r));
                }
                if paper_refs {
                    m.insert("ref".into(), json!(c.reference));
                }
                m.insert("values".into(), pairs(&c.values));
                Value::Object(m)
            })
            .collect();
        root.insert("checks".into(), Value::Array(checks));
        if timings {
            let t: Vec<(String, String)> = self
                .timings
                .iter()
                .map(|(k, d)| (k.clone(), format!("{:.3}", d.as_secs_f64())))
                .collect();
            root.insert("timings_s".into(), pairs(&t));
        }
        root.insert("passed".into(), json!(self.passed()));
        Value::Object(root)
    }

    /// One row per check; values are flattened into `key=value` pairs joined by `;`.
    pub fn to_csv(&self, paper_refs: bool) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["command", "check", "status", "reason"];
        if paper_refs {
            header.push("ref");
        }
        header.push("values");
        w.write_record(&header).expect("in-memory write");
        for c in &self.checks {
            let vals: Vec<String> = c.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let mut row = vec![
                self.command.clone(),
                c.id.clone(),
                c.status.label().to_string(),
                c.reason.clone().unwrap_or_default(),
            ];
            if paper_refs {
                row.push(c.reference.unwrap_or("").to_string());
            }
            row.push(vals.join(";"));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
    }
}

fn pairs(kv: &[(String, String)]) -> Value {
    Value::Object(kv.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keeps_order_and_strings() {
        let mut r = RunReport::new("count").param("n", 4).param("q", 3);
        r.push(Check::equal("euler", -9044i64 * -1, 9044).value("b", 19557643832u64));
        r.push(Check::skipped("oracle", "too large"));
        let s = r.to_json(false, false).to_string();
        assert!(s.starts_with(r#"{"tool":"framelab","version":"#));
        assert!(s.contains(r#""values":{"got":"9044","expected":"9044","b":"19557643832"}"#));
        assert!(r.passed());
        assert!(!s.contains("timings"));
        r.push(Check::equal("bad", 1, 2));
        assert!(!r.passed());
    }

    #[test]
    fn csv_rows() {
        let mut r = RunReport::new("walks");
        r.push(Check::new("a,b").value("k", 1).value("v", "x"));
        let s = r.to_csv(true);
        assert_eq!(s, "command,check,status,reason,ref,values\nwalks,\"a,b\",pass,,,k=1;v=x\n");
    }
}
