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

use serde::{Deserialize, Serialize};

/// Errors raised by the command-line layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("row {row} is the zero vector")]
    ZeroVector { row: usize },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("need at least {required} runs, found {found}")]
    InsufficientRuns { found: usize, required: usize },
    #[error(transparent)]
    Core(#[from] qmldesk_core::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Serialized form written into failed reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
}

impl CliError {
    /// Variant name, e.g. `ParseError` or `SingularSystem`.
    pub fn kind(&self) -> String {
        match self {
            CliError::Parse { .. } => "ParseError".into(),
            CliError::ZeroVector { .. } => "ZeroVector".into(),
            CliError::Io { .. } => "IoError".into(),
            CliError::UnknownAlgorithm(_) => "UnknownAlgorithm".into(),
            CliError::InvalidArgument(_) => "InvalidArgument".into(),
            CliError::InsufficientRuns { .. } => "InsufficientRuns".into(),
            CliError::Core(e) => {
                let debug = format!("{e:?}");
                debug
                    .split(|c: char| !c.is_alphanumeric())
                    .next()
                    .unwrap_or("CoreError")
                    .to_string()
            }
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            kind: self.kind(),
            message: self.to_string(),
        }
    }
}

/// Row-level zero vectors keep their row index when surfaced here.
pub(crate) fn lift(e: qmldesk_core::Error) -> CliError {
    match e {
        qmldesk_core::Error::ZeroVectorAt { index } => CliError::ZeroVector { row: index },
        other => CliError::Core(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_kinds_use_variant_names() {
        assert_eq!(
            CliError::Core(qmldesk_core::Error::SingularSystem).kind(),
            "SingularSystem"
        );
        assert_eq!(
            CliError::Core(qmldesk_core::Error::SizeCapExceeded { nodes: 3, cap: 2 }).kind(),
            "SizeCapExceeded"
        );
        assert_eq!(
            lift(qmldesk_core::Error::ZeroVectorAt { index: 4 }),
            CliError::ZeroVector { row: 4 }
        );
    }
}
