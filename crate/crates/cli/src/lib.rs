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

//! Experiment runner for `qmldesk-core`: CSV datasets in, JSON reports and
//! TSV plot data out.
//!
//! Every run is driven by an [`ExperimentConfig`] and produces a
//! [`RunReport`] holding the result, the resource ledger and, on failure, a
//! machine-readable error. Reports for the same config and seed are
//! identical apart from the wall-time field.

pub mod bench;
pub mod config;
pub mod dataset;
pub mod error;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, OutputFormat, Params};
pub use error::{CliError, CliResult, ErrorReport};
pub use report::{RunReport, RunStatus, Table};
pub use run::run_experiment;
