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

use thiserror::Error;

/// Errors raised by the simulator and the algorithms built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input vector has zero norm")]
    ZeroVector,
    #[error("vector at index {index} has zero norm")]
    ZeroVectorAt { index: usize },
    #[error("{required} qubits required but the cap is {cap}")]
    DimensionOverflow { required: usize, cap: usize },
    #[error("qubit {target} out of range for a {num_qubits}-qubit register")]
    TargetOutOfRange { target: usize, num_qubits: usize },
    #[error("qubit {0} appears more than once in a target list")]
    DuplicateTarget(usize),
    #[error("gate matrix is not unitary (deviation {deviation:e})")]
    NonUnitaryGate { deviation: f64 },
    #[error("gate matrix of size {size} does not act on {targets} qubits")]
    GateShape { size: usize, targets: usize },
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepSet,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("eigenvalue {eigenvalue} maps outside the phase window for t0 = {t0}")]
    EigenvalueOutOfRange { eigenvalue: f64, t0: f64 },
    #[error("every eigencomponent of the right-hand side falls below the cutoff")]
    SingularSystem,
    #[error("post-selection failed after {attempts} attempts")]
    PostSelectionFailed { attempts: u64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("stationary point is the zero vector")]
    ZeroSolution,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("target vector y - b is identically zero")]
    ZeroTarget,
    #[error("no marked items")]
    NoMarkedItems,
    #[error("{nodes} units exceed the exact enumeration cap of {cap}")]
    SizeCapExceeded { nodes: usize, cap: usize },
    #[error("mean-field iteration did not converge (residual {residual:e})")]
    MeanFieldNonConvergence { residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
