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

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, hermitian_eigen, trace, CMatrix, ZERO};

use super::gate::{apply_matrix_in_place, bit, GateOp};
use super::state::QuantumState;

pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite matrix over `num_qubits`
/// qubits (same big-endian ordering as [`QuantumState`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::InvalidDensityMatrix("matrix is not square".into()));
        }
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let (values, _) = hermitian_eigen(&matrix);
        if values[0] < -PSD_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {}",
                values[0]
            )));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn from_pure(state: &QuantumState) -> Self {
        let v = crate::linalg::CVector::from_column_slice(state.amplitudes());
        Self {
            num_qubits: state.num_qubits(),
            matrix: &v * v.adjoint(),
        }
    }

    /// `I / d`.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        Self {
            num_qubits,
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            num_qubits: self.num_qubits + other.num_qubits,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// `U ρ U†` for a gate embedded on this register.
    pub fn conjugate_by(&self, gate: &GateOp) -> Result<DensityMatrix> {
        let matrix = conjugate_matrix(&self.matrix, self.num_qubits, gate)?;
        Ok(DensityMatrix {
            num_qubits: self.num_qubits,
            matrix,
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// `U M U†` for an arbitrary square matrix on `num_qubits` qubits.
pub(crate) fn conjugate_matrix(m: &CMatrix, num_qubits: usize, gate: &GateOp) -> Result<CMatrix> {
    for &q in gate.targets().iter().chain(gate.controls()) {
        if q >= num_qubits {
            return Err(Error::TargetOutOfRange {
                target: q,
                num_qubits,
            });
        }
    }
    let apply_columns = |src: &CMatrix| -> CMatrix {
        let mut out = src.clone();
        for mut col in out.column_iter_mut() {
            let slice = col.as_mut_slice();
            apply_matrix_in_place(
                slice,
                num_qubits,
                gate.matrix(),
                gate.targets(),
                gate.controls(),
            );
        }
        out
    };
    // (U (U M)†)† = U M U†
    let um = apply_columns(m);
    Ok(apply_columns(&um.adjoint()).adjoint())
}

/// Traces out every qubit not in `keep` from a square matrix on
/// `num_qubits` qubits. Kept qubits retain ascending order.
pub fn partial_trace_matrix(m: &CMatrix, num_qubits: usize, keep: &[usize]) -> Result<CMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&q) = kept.iter().find(|&&q| q >= num_qubits) {
        return Err(Error::TargetOutOfRange {
            target: q,
            num_qubits,
        });
    }
    let traced: Vec<usize> = (0..num_qubits).filter(|q| !kept.contains(q)).collect();
    let offsets = |qs: &[usize]| -> Vec<usize> {
        let k = qs.len();
        (0..1usize << k)
            .map(|s| {
                (0..k)
                    .filter(|j| (s >> (k - 1 - j)) & 1 == 1)
                    .map(|j| bit(num_qubits, qs[j]))
                    .sum()
            })
            .collect()
    };
    let keep_off = offsets(&kept);
    let trace_off = offsets(&traced);
    let dk = keep_off.len();
    let mut out = CMatrix::from_element(dk, dk, ZERO);
    for (i, ki) in keep_off.iter().enumerate() {
        for (j, kj) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for t in &trace_off {
                acc += m[(ki | t, kj | t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Reduced density matrix over `keep` (sorted ascending in the result).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let matrix = partial_trace_matrix(&rho.matrix, rho.num_qubits, keep)?;
    let num_qubits = matrix.nrows().trailing_zeros() as usize;
    Ok(DensityMatrix { num_qubits, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, C64};
    use crate::rng::RandomSource;

    fn bell() -> QuantumState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::new(vec![c(r), ZERO, ZERO, c(r)]).unwrap()
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let s = QuantumState::basis(1, 0)
            .unwrap()
            .tensor(&QuantumState::basis(1, 1).unwrap());
        let rho = DensityMatrix::from_pure(&s);
        let r1 = rho.partial_trace(&[1]).unwrap();
        assert_eq!(r1.matrix()[(1, 1)], c(1.0));
        assert_eq!(r1.matrix()[(0, 0)], ZERO);
    }

    #[test]
    fn bell_reduces_to_identity_half() {
        let rho = DensityMatrix::from_pure(&bell());
        for q in 0..2 {
            let r = rho.partial_trace(&[q]).unwrap();
            let expect = CMatrix::identity(2, 2).scale(0.5);
            assert!((r.matrix() - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn sequential_trace_equals_one_shot() {
        let mut rng = RandomSource::new(11);
        let amps: Vec<C64> = (0..8)
            .map(|_| C64::new(rng.normal(), rng.normal()))
            .collect();
        let rho = DensityMatrix::from_pure(&QuantumState::from_unnormalized(amps).unwrap());
        // drop qubit 2, then (what was) qubit 1
        let two_step = rho
            .partial_trace(&[0, 1])
            .unwrap()
            .partial_trace(&[0])
            .unwrap();
        let one_shot = rho.partial_trace(&[0]).unwrap();
        assert!((two_step.matrix() - one_shot.matrix()).norm() < 1e-12);
        assert!((trace(one_shot.matrix()).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_keep_rejected() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert_eq!(rho.partial_trace(&[]), Err(Error::EmptyKeepSet));
    }

    #[test]
    fn validation() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = CMatrix::from_row_slice(2, 2, &[c(1.5), ZERO, ZERO, c(-0.5)]);
        assert!(DensityMatrix::new(negative).is_err());
        let non_herm = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), ZERO, c(0.5)]);
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(2, 2).scale(0.5)).is_ok());
    }
}
