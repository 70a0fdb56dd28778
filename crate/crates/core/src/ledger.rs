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

//! Per-run resource accounting: qubits, unitary applications, oracle
//! queries, measurement shots and state-preparation events.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Counters only ever grow during a run.
///
/// `gate_count` counts unitary applications at the level the algorithms are
/// written (a controlled `e^{iAt}` is one application), not elementary gates.
/// `notes` carries symbolic cost annotations that are recorded but never
/// executed, such as the sparsity of an HHL matrix or a QRAM preparation cost.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub qubits_peak: u64,
    pub gate_count: u64,
    pub oracle_queries: u64,
    pub shots: u64,
    pub state_preps: u64,
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
}

impl ResourceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge_qubits(&mut self, qubits: usize) {
        self.qubits_peak = self.qubits_peak.max(qubits as u64);
    }

    pub fn charge_gates(&mut self, n: u64) {
        self.gate_count += n;
    }

    pub fn charge_queries(&mut self, n: u64) {
        self.oracle_queries += n;
    }

    pub fn charge_shots(&mut self, n: u64) {
        self.shots += n;
    }

    pub fn charge_state_prep(&mut self) {
        self.state_preps += 1;
    }

    pub fn charge_state_preps(&mut self, n: u64) {
        self.state_preps += n;
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.insert(key.into(), value.to_string());
    }

    /// Folds another ledger into this one: peaks take the max, counts add.
    pub fn absorb(&mut self, other: &ResourceLedger) {
        self.qubits_peak = self.qubits_peak.max(other.qubits_peak);
        self.gate_count += other.gate_count;
        self.oracle_queries += other.oracle_queries;
        self.shots += other.shots;
        self.state_preps += other.state_preps;
        for (k, v) in &other.notes {
            self.notes.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }
}
