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

//! Dense statevector and density-matrix engine.
//!
//! Gates are dense matrices applied by index arithmetic over a big-endian
//! register (qubit 0 is the most significant bit of a basis index). States
//! and density matrices are plain values; functions that transform them
//! return new values unless they take `&mut self`.

mod density;
mod gate;
mod measure;
mod state;
mod swap_test;

pub use density::{
    partial_trace, partial_trace_matrix, DensityMatrix, HERMITIAN_TOLERANCE, PSD_TOLERANCE,
    TRACE_TOLERANCE,
};
pub use gate::{
    apply_phase_flip, apply_unitary, gates, reflect_about_uniform, GateOp, MultiplexedOp,
    UNITARY_TOLERANCE,
};
pub use measure::{
    format_outcome, marginal_probabilities, measure_qubits, sample_counts, Histogram,
};
pub use state::{
    prepare_amplitude_state, prepare_complex_state, QuantumState, QubitCap, NORM_TOLERANCE,
};
pub use swap_test::{
    swap_test_circuit, swap_test_circuit_probability, swap_test_probability, swap_test_sampled,
};
