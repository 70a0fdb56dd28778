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

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::linalg::{c, C64, ZERO};

/// Normalization tolerance for states built from caller-supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Upper bound on register width. Defaults to 20 qubits (16 MiB of
/// double-precision amplitudes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitCap(pub usize);

impl Default for QubitCap {
    fn default() -> Self {
        QubitCap(20)
    }
}

impl QubitCap {
    pub const ENV_VAR: &'static str = "QMLDESK_QUBIT_CAP";

    /// Reads `QMLDESK_QUBIT_CAP`, falling back to the default when unset or
    /// unparsable.
    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(QubitCap)
            .unwrap_or_default()
    }

    pub fn check(self, qubits: usize) -> Result<()> {
        if qubits > self.0 {
            Err(Error::DimensionOverflow {
                required: qubits,
                cap: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// Pure state of `num_qubits` qubits.
///
/// Basis index `i` is read big-endian: qubit 0 is the most significant bit,
/// so `a ⊗ b` places `a` on the low-numbered qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Wraps an amplitude vector, checking length and normalization.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits == 0 {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalizes, zero-pads to a power of two (at least two entries) and wraps.
    pub fn from_unnormalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let len = amplitudes.len().max(2).next_power_of_two();
        amplitudes.resize(len, ZERO);
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(amplitudes)
    }

    /// `|index⟩` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidParameter(
                "a register needs at least one qubit".into(),
            ));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = c(1.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &QuantumState) -> QuantumState {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        QuantumState {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        }
    }
}

/// Amplitude-encodes `x` as `Σ xᵢ|i⟩ / ‖x‖`, zero-padded to the next power of
/// two.
///
/// State preparation is modelled as an ideal oracle: the ledger records one
/// preparation event rather than a gate sequence.
pub fn prepare_amplitude_state(
    x: &[f64],
    cap: QubitCap,
    ledger: &mut ResourceLedger,
) -> Result<QuantumState> {
    prepare_complex_state(&x.iter().map(|&v| c(v)).collect::<Vec<_>>(), cap, ledger)
}

/// Complex counterpart of [`prepare_amplitude_state`].
pub fn prepare_complex_state(
    x: &[C64],
    cap: QubitCap,
    ledger: &mut ResourceLedger,
) -> Result<QuantumState> {
    if x.is_empty() {
        return Err(Error::ZeroVector);
    }
    let qubits = x.len().max(2).next_power_of_two().trailing_zeros() as usize;
    cap.check(qubits)?;
    let state = QuantumState::from_unnormalized(x.to_vec())?;
    ledger.charge_state_prep();
    ledger.charge_qubits(state.num_qubits());
    Ok(state)
}
