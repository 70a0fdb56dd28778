// Copyright 2026 The qmldesk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use qmldesk_core::ResourceLedger;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::ErrorReport;

/// Significant digits kept for floating-point values in reports.
pub const REPORT_DIGITS: usize = 12;

/// JSON schema every report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/run_report.schema.json");

/// Rows of plot data; written as TSV with a `#`-prefixed header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("#{}\n", self.columns.join("\t"));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub status: RunStatus,
    pub result: Option<Value>,
    pub table: Option<Table>,
    pub error: Option<ErrorReport>,
    pub ledger: ResourceLedger,
    /// Not covered by the determinism contract.
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Error,
}

impl RunReport {
    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// JSON with the wall-time field removed.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(map) = &mut v {
            map.remove("wall_time_seconds");
        }
        serde_json::to_string_pretty(&v).expect("values serialize")
    }
}

pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses")
}

/// Rounds every float in `v` to [`REPORT_DIGITS`] significant digits.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"), REPORT_DIGITS);
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round_significant(1.0 / 3.0, 12), 0.333333333333);
        assert_eq!(round_significant(-123456.7890123456, 12), -123456.789012);
        assert_eq!(round_significant(0.0, 12), 0.0);
        let v = round_value(json!({"a": [0.1 + 0.2, 3], "b": "x"}));
        assert_eq!(v, json!({"a": [0.3, 3], "b": "x"}));
    }

    #[test]
    fn tsv_header_is_commented() {
        let mut t = Table::new(&["shots", "std"]);
        t.push(vec![json!(100), json!(0.5)]);
        t.push(vec![json!(1000), json!("n/a")]);
        assert_eq!(t.to_tsv(), "#shots\tstd\n100\t0.5\n1000\tn/a\n");
    }
}
