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

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::linalg::{c, unitary_deviation, CMatrix, C64, ONE, ZERO};

use super::state::QuantumState;

/// Unitary tolerance enforced when a gate is constructed.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// A dense `2^k × 2^k` unitary acting on `k` ordered target qubits,
/// optionally conditioned on a set of control qubits all being `|1⟩`.
///
/// The first target is the most significant bit of the matrix index.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    matrix: CMatrix,
    targets: Vec<usize>,
    controls: Vec<usize>,
}

fn check_distinct(qubits: &[usize]) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(Error::DuplicateTarget(*q));
        }
    }
    Ok(())
}

impl GateOp {
    pub fn new(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        let size = matrix.nrows();
        if targets.is_empty() || matrix.ncols() != size || size != 1 << targets.len() {
            return Err(Error::GateShape {
                size,
                targets: targets.len(),
            });
        }
        check_distinct(&targets)?;
        let deviation = unitary_deviation(&matrix);
        if deviation > UNITARY_TOLERANCE {
            return Err(Error::NonUnitaryGate { deviation });
        }
        Ok(Self {
            matrix,
            targets,
            controls: Vec::new(),
        })
    }

    /// Adds control qubits.
    pub fn controlled_by(mut self, controls: Vec<usize>) -> Result<Self> {
        let mut all = self.targets.clone();
        all.extend(&controls);
        check_distinct(&all)?;
        self.controls = controls;
        Ok(self)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn adjoint(&self) -> GateOp {
        GateOp {
            matrix: self.matrix.adjoint(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    fn check_range(&self, num_qubits: usize) -> Result<()> {
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= num_qubits {
                return Err(Error::TargetOutOfRange {
                    target: q,
                    num_qubits,
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn bit(num_qubits: usize, qubit: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

/// Full-register offsets of every sub-index of `qubits` (first qubit is the
/// sub-index MSB).
pub(crate) fn sub_offsets(num_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|m| {
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| (m >> (k - 1 - j)) & 1 == 1)
                .map(|(_, &q)| bit(num_qubits, q))
                .sum()
        })
        .collect()
}

pub(crate) fn apply_matrix_in_place(
    amps: &mut [C64],
    num_qubits: usize,
    matrix: &CMatrix,
    targets: &[usize],
    controls: &[usize],
) {
    let offsets = sub_offsets(num_qubits, targets);
    let target_mask: usize = offsets.iter().fold(0, |acc, o| acc | o);
    let control_mask: usize = controls.iter().map(|&q| bit(num_qubits, q)).sum();
    let dim = offsets.len();
    let mut buf = vec![ZERO; dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 || base & control_mask != control_mask {
            continue;
        }
        for (slot, off) in buf.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (col, v) in buf.iter().enumerate() {
                acc += matrix[(r, col)] * v;
            }
            amps[base | off] = acc;
        }
    }
}

impl QuantumState {
    /// In-place gate application; charges one unitary application.
    pub fn apply(&mut self, gate: &GateOp, ledger: &mut ResourceLedger) -> Result<()> {
        gate.check_range(self.num_qubits())?;
        let n = self.num_qubits();
        apply_matrix_in_place(
            self.amplitudes_mut(),
            n,
            &gate.matrix,
            &gate.targets,
            &gate.controls,
        );
        ledger.charge_gates(1);
        ledger.charge_qubits(n);
        Ok(())
    }
}

/// Returns `gate · state`, leaving the input untouched.
pub fn apply_unitary(
    state: &QuantumState,
    gate: &GateOp,
    ledger: &mut ResourceLedger,
) -> Result<QuantumState> {
    let mut out = state.clone();
    out.apply(gate, ledger)?;
    Ok(out)
}

/// A uniformly controlled operation: for every basis value `k` of the
/// control register, `blocks[k]` is applied to the targets.
#[derive(Debug, Clone)]
pub struct MultiplexedOp {
    controls: Vec<usize>,
    targets: Vec<usize>,
    blocks: Vec<CMatrix>,
}

impl MultiplexedOp {
    pub fn new(controls: Vec<usize>, targets: Vec<usize>, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != 1 << controls.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << controls.len(),
                found: blocks.len(),
            });
        }
        let mut all = targets.clone();
        all.extend(&controls);
        check_distinct(&all)?;
        for b in &blocks {
            if b.nrows() != 1 << targets.len() || b.ncols() != b.nrows() {
                return Err(Error::GateShape {
                    size: b.nrows(),
                    targets: targets.len(),
                });
            }
            let deviation = unitary_deviation(b);
            if deviation > UNITARY_TOLERANCE {
                return Err(Error::NonUnitaryGate { deviation });
            }
        }
        Ok(Self {
            controls,
            targets,
            blocks,
        })
    }

    pub fn apply(&self, state: &mut QuantumState, ledger: &mut ResourceLedger) -> Result<()> {
        let n = state.num_qubits();
        for &q in self.controls.iter().chain(&self.targets) {
            if q >= n {
                return Err(Error::TargetOutOfRange {
                    target: q,
                    num_qubits: n,
                });
            }
        }
        let target_offsets = sub_offsets(n, &self.targets);
        let control_offsets = sub_offsets(n, &self.controls);
        let target_mask: usize = target_offsets.iter().fold(0, |a, o| a | o);
        let control_mask: usize = control_offsets.iter().fold(0, |a, o| a | o);
        let amps = state.amplitudes_mut();
        let mut buf = vec![ZERO; target_offsets.len()];
        for base in 0..amps.len() {
            if base & (target_mask | control_mask) != 0 {
                continue;
            }
            for (block, coff) in self.blocks.iter().zip(&control_offsets) {
                let origin = base | coff;
                for (slot, off) in buf.iter_mut().zip(&target_offsets) {
                    *slot = amps[origin | off];
                }
                for (r, off) in target_offsets.iter().enumerate() {
                    let mut acc = ZERO;
                    for (col, v) in buf.iter().enumerate() {
                        acc += block[(r, col)] * v;
                    }
                    amps[origin | off] = acc;
                }
            }
        }
        ledger.charge_gates(1);
        ledger.charge_qubits(n);
        Ok(())
    }
}

/// Multiplies each amplitude by `-1` where `marked` is true: a phase oracle.
pub fn apply_phase_flip(
    state: &mut QuantumState,
    marked: &[bool],
    ledger: &mut ResourceLedger,
) -> Result<()> {
    if marked.len() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: marked.len(),
        });
    }
    for (a, &m) in state.amplitudes_mut().iter_mut().zip(marked) {
        if m {
            *a = -*a;
        }
    }
    ledger.charge_gates(1);
    Ok(())
}

/// Grover diffusion `2|s⟩⟨s| − I` with `|s⟩` the uniform superposition,
/// applied as `a ↦ 2·mean − a`. Equal to `H^⊗n (2|0⟩⟨0| − I) H^⊗n`.
pub fn reflect_about_uniform(state: &mut QuantumState, ledger: &mut ResourceLedger) {
    let amps = state.amplitudes_mut();
    let mean: C64 = amps.iter().sum::<C64>() / amps.len() as f64;
    for a in amps.iter_mut() {
        *a = mean * 2.0 - *a;
    }
    ledger.charge_gates(1);
}

/// Common gate matrices.
pub mod gates {
    use super::*;

    pub fn h() -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                c(FRAC_1_SQRT_2),
                c(FRAC_1_SQRT_2),
                c(FRAC_1_SQRT_2),
                c(-FRAC_1_SQRT_2),
            ],
        )
    }

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    pub fn swap() -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        m[(1, 2)] = ONE;
        m[(2, 1)] = ONE;
        m[(3, 3)] = ONE;
        m
    }

    /// `R_y`-style rotation sending `|0⟩` to `cos θ|0⟩ + sin θ|1⟩`.
    pub fn ry(theta: f64) -> CMatrix {
        let (s, co) = theta.sin_cos();
        CMatrix::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)])
    }

    /// Quantum Fourier transform on `k` qubits: `|x⟩ ↦ Σ_y ω^{xy}|y⟩/√N`.
    pub fn qft(k: usize) -> CMatrix {
        let n = 1usize << k;
        let norm = 1.0 / (n as f64).sqrt();
        CMatrix::from_fn(n, n, |y, x| {
            let phase = 2.0 * std::f64::consts::PI * ((x * y) % n) as f64 / n as f64;
            C64::from_polar(norm, phase)
        })
    }

    /// Householder reflection `I − 2|w⟩⟨w|/⟨w|w⟩` with `w = φ − e₀`, which
    /// maps the real unit vector `φ` onto `|0⟩`.
    pub fn householder_to_zero(phi: &[f64]) -> CMatrix {
        let n = phi.len();
        let mut w: Vec<f64> = phi.to_vec();
        w[0] -= 1.0;
        let ww: f64 = w.iter().map(|v| v * v).sum();
        if ww < 1e-30 {
            return CMatrix::identity(n, n);
        }
        CMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            c(id - 2.0 * w[i] * w[j] / ww)
        })
    }
}
