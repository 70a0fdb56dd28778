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
use crate::ledger::ResourceLedger;
use crate::rng::RandomSource;

use super::gate::{gates, GateOp};
use super::measure::{marginal_probabilities, measure_qubits};
use super::state::QuantumState;

/// Ancilla-`|0⟩` probability of the swap test, `½(1 + |⟨a|b⟩|²)`.
pub fn swap_test_probability(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    check_pair(a, b)?;
    Ok(0.5 * (1.0 + a.fidelity(b)?))
}

fn check_pair(a: &QuantumState, b: &QuantumState) -> Result<()> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.num_qubits(),
            found: b.num_qubits(),
        });
    }
    Ok(())
}

/// Builds `(H ⊗ I)·CSWAP·(H ⊗ I)|0⟩|a⟩|b⟩`. The ancilla is qubit 0, `a`
/// occupies qubits `1..=n` and `b` the next `n`.
pub fn swap_test_circuit(
    a: &QuantumState,
    b: &QuantumState,
    ledger: &mut ResourceLedger,
) -> Result<QuantumState> {
    check_pair(a, b)?;
    let n = a.num_qubits();
    let mut state = QuantumState::zero(1)?.tensor(a).tensor(b);
    let h = GateOp::new(gates::h(), vec![0])?;
    state.apply(&h, ledger)?;
    for q in 0..n {
        let cswap = GateOp::new(gates::swap(), vec![1 + q, 1 + n + q])?.controlled_by(vec![0])?;
        state.apply(&cswap, ledger)?;
    }
    state.apply(&h, ledger)?;
    Ok(state)
}

/// Exact ancilla-`|0⟩` probability read off the simulated circuit.
pub fn swap_test_circuit_probability(
    a: &QuantumState,
    b: &QuantumState,
    ledger: &mut ResourceLedger,
) -> Result<f64> {
    let state = swap_test_circuit(a, b, ledger)?;
    Ok(marginal_probabilities(&state, &[0])?[0])
}

/// Sampled estimate of the ancilla-`|0⟩` probability.
pub fn swap_test_sampled(
    a: &QuantumState,
    b: &QuantumState,
    shots: u64,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<f64> {
    let state = swap_test_circuit(a, b, ledger)?;
    let hist = measure_qubits(&state, &[0], rng, shots, ledger)?;
    Ok(hist.get("0").copied().unwrap_or(0) as f64 / shots as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, C64};

    fn random_state(qubits: usize, rng: &mut RandomSource) -> QuantumState {
        QuantumState::from_unnormalized(
            (0..1 << qubits)
                .map(|_| C64::new(rng.normal(), rng.normal()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_states_give_one() {
        let mut rng = RandomSource::new(1);
        let a = random_state(2, &mut rng);
        assert!((swap_test_probability(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let mut l = ResourceLedger::new();
        assert!((swap_test_circuit_probability(&a, &a, &mut l).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_states_give_half() {
        let a = QuantumState::basis(1, 0).unwrap();
        let b = QuantumState::basis(1, 1).unwrap();
        assert_eq!(swap_test_probability(&a, &b).unwrap(), 0.5);
    }

    #[test]
    fn sampled_within_five_sigma() {
        let mut rng = RandomSource::new(77);
        let a = random_state(2, &mut rng);
        let b = random_state(2, &mut rng);
        let exact = 0.5 * (1.0 + a.inner(&b).unwrap().norm_sqr());
        let shots = 100_000;
        let mut l = ResourceLedger::new();
        let est = swap_test_sampled(&a, &b, shots, &mut rng, &mut l).unwrap();
        let sigma = (exact * (1.0 - exact) / shots as f64).sqrt();
        assert!((est - exact).abs() < 5.0 * sigma);
        assert_eq!(l.shots, shots);
    }

    #[test]
    fn mismatch_rejected() {
        let a = QuantumState::zero(1).unwrap();
        let b = QuantumState::new(vec![c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert!(matches!(
            swap_test_probability(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
