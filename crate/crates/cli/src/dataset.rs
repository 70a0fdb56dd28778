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

//! CSV ingestion.
//!
//! Files have a header row. A first column named `label` holds class names;
//! every other column is a numeric feature.

use std::path::Path;

use nalgebra::DMatrix;
use qmldesk_core::boltzmann::BinaryDataset;
use qmldesk_core::distance::LabeledDataset;
use serde::{Deserialize, Serialize};

use crate::error::{lift, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvTable {
    pub feature_names: Vec<String>,
    pub labels: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_csv(text: &str) -> CliResult<CsvTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_error(1, &e))?.clone();
    if header.is_empty() {
        return Err(CliError::Parse {
            line: 1,
            message: "missing header row".into(),
        });
    }
    let labeled = header.get(0) == Some("label");
    let skip = labeled as usize;
    let feature_names: Vec<String> = header.iter().skip(skip).map(str::to_string).collect();
    if feature_names.is_empty() {
        return Err(CliError::Parse {
            line: 1,
            message: "no feature columns".into(),
        });
    }
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, &e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if labeled {
            labels.push(record[0].to_string());
        }
        let row = record
            .iter()
            .skip(skip)
            .zip(&feature_names)
            .map(|(field, name)| {
                field.parse::<f64>().map_err(|_| CliError::Parse {
                    line,
                    message: format!("column `{name}`: `{field}` is not a number"),
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Parse {
            line: 2,
            message: "no data rows".into(),
        });
    }
    Ok(CsvTable {
        feature_names,
        labels: labeled.then_some(labels),
        rows,
    })
}

fn parse_error(line: u64, e: &csv::Error) -> CliError {
    CliError::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn load_csv(path: &Path) -> CliResult<CsvTable> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_csv(&text)
}

impl CsvTable {
    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = Vec::new();
        if self.labels.is_some() {
            header.push("label");
        }
        header.extend(self.feature_names.iter().map(String::as_str));
        w.write_record(&header).expect("in-memory write");
        for (i, row) in self.rows.iter().enumerate() {
            let mut fields: Vec<String> = Vec::new();
            if let Some(labels) = &self.labels {
                fields.push(labels[i].clone());
            }
            fields.extend(row.iter().map(|x| x.to_string()));
            w.write_record(&fields).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    fn require_labels(&self) -> CliResult<&[String]> {
        self.labels
            .as_deref()
            .ok_or_else(|| CliError::InvalidArgument("dataset needs a `label` column".into()))
    }

    /// Labeled points; zero rows are rejected.
    pub fn labeled(&self) -> CliResult<LabeledDataset> {
        let labels = self.require_labels()?;
        LabeledDataset::new(
            self.rows
                .iter()
                .cloned()
                .zip(labels.iter().cloned())
                .collect(),
        )
        .map_err(lift)
    }

    /// Feature rows with zero rows rejected.
    pub fn points(&self) -> CliResult<Vec<Vec<f64>>> {
        if let Some(row) = self.rows.iter().position(|r| r.iter().all(|&x| x == 0.0)) {
            return Err(CliError::ZeroVector { row });
        }
        Ok(self.rows.clone())
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows.len(), self.dim(), |i, j| self.rows[i][j])
    }

    /// Rows as 0/1 patterns.
    pub fn binary_rows(&self) -> CliResult<Vec<Vec<u8>>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(row, r)| {
                r.iter()
                    .map(|&x| {
                        if x == 0.0 || x == 1.0 {
                            Ok(x as u8)
                        } else {
                            Err(CliError::InvalidArgument(format!(
                                "row {row}: value {x} is not binary"
                            )))
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn binary_dataset(&self) -> CliResult<BinaryDataset> {
        BinaryDataset::new(self.binary_rows()?).map_err(lift)
    }

    /// Labels parsed as 0/1 targets.
    pub fn binary_labels(&self) -> CliResult<Vec<u8>> {
        self.require_labels()?
            .iter()
            .enumerate()
            .map(|(row, l)| match l.as_str() {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(CliError::InvalidArgument(format!(
                    "row {row}: label `{l}` is not 0 or 1"
                ))),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_dataset() {
        let t = parse_csv("label,f1,f2\nA,1,0\nB,0,1\n").unwrap();
        assert_eq!(t.dim(), 2);
        let ds = t.labeled().unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.class_names(), ["A", "B"]);
    }

    #[test]
    fn bad_number_names_line() {
        let e = parse_csv("label,f1,f2\nA,1,0\nB,x,1\n").unwrap_err();
        match e {
            CliError::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("f1"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ragged_row_is_a_parse_error() {
        assert!(matches!(
            parse_csv("f1,f2\n1,2\n3\n"),
            Err(CliError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn zero_row_reported_by_index() {
        let t = parse_csv("label,f1,f2\nA,1,0\nB,0,0\n").unwrap();
        assert_eq!(t.labeled().unwrap_err(), CliError::ZeroVector { row: 1 });
        assert_eq!(t.points().unwrap_err(), CliError::ZeroVector { row: 1 });
    }

    #[test]
    fn unlabeled_and_binary() {
        let t = parse_csv("v1,v2,v3\n1,0,1\n0,0,1\n").unwrap();
        assert!(t.labels.is_none());
        assert_eq!(t.binary_rows().unwrap(), vec![vec![1, 0, 1], vec![0, 0, 1]]);
        assert!(parse_csv("v1\n0.5\n").unwrap().binary_rows().is_err());
    }

    #[test]
    fn round_trip() {
        let t = CsvTable {
            feature_names: vec!["f1".into(), "f2".into()],
            labels: Some(vec!["a".into(), "b".into()]),
            rows: vec![vec![0.1, -3.25e-7], vec![1.0 / 3.0, 12.0]],
        };
        assert_eq!(parse_csv(&t.to_csv_string()).unwrap(), t);
    }
}
