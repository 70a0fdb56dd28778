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

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::rng::RandomSource;

use super::gate::sub_offsets;
use super::state::QuantumState;

/// Outcome counts keyed by bitstring, one character per measured qubit in
/// the order the targets were given.
pub type Histogram = BTreeMap<String, u64>;

/// Born-rule probabilities of every outcome of `targets`; outcome `k` has
/// the first target as its most significant bit.
pub fn marginal_probabilities(state: &QuantumState, targets: &[usize]) -> Result<Vec<f64>> {
    let n = state.num_qubits();
    for (i, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(Error::TargetOutOfRange {
                target: q,
                num_qubits: n,
            });
        }
        if targets[..i].contains(&q) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    let offsets = sub_offsets(n, targets);
    let mask: usize = offsets.iter().fold(0, |a, o| a | o);
    let mut probs = vec![0.0; offsets.len()];
    // Map each full index to its outcome by reading the target bits.
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let bits = idx & mask;
        let k = targets
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((bits >> (n - 1 - q)) & 1));
        probs[k] += p;
    }
    Ok(probs)
}

/// Draws `shots` samples from a discrete distribution, returning counts.
pub fn sample_counts(probs: &[f64], shots: u64, rng: &mut RandomSource) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    let mut counts = vec![0u64; probs.len()];
    if total <= 0.0 {
        return counts;
    }
    for _ in 0..shots {
        let u = rng.uniform() * total;
        let k = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        counts[k] += 1;
    }
    counts
}

pub fn format_outcome(k: usize, width: usize) -> String {
    (0..width)
        .map(|j| {
            if (k >> (width - 1 - j)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Samples `shots` measurements of `targets` without collapsing the input.
pub fn measure_qubits(
    state: &QuantumState,
    targets: &[usize],
    rng: &mut RandomSource,
    shots: u64,
    ledger: &mut ResourceLedger,
) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let probs = marginal_probabilities(state, targets)?;
    let counts = sample_counts(&probs, shots, rng);
    ledger.charge_shots(shots);
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(k, c)| (format_outcome(k, targets.len()), c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gate::{gates, GateOp};

    #[test]
    fn deterministic_outcome() {
        let s = QuantumState::basis(1, 1).unwrap();
        let mut l = ResourceLedger::new();
        let h = measure_qubits(&s, &[0], &mut RandomSource::new(1), 100, &mut l).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h["1"], 100);
        assert_eq!(l.shots, 100);
    }

    #[test]
    fn plus_state_is_balanced() {
        let mut l = ResourceLedger::new();
        let mut s = QuantumState::zero(1).unwrap();
        s.apply(&GateOp::new(gates::h(), vec![0]).unwrap(), &mut l)
            .unwrap();
        let shots = 100_000u64;
        let h = measure_qubits(&s, &[0], &mut RandomSource::new(5), shots, &mut l).unwrap();
        let sigma = (0.25 / shots as f64).sqrt();
        for key in ["0", "1"] {
            let f = h[key] as f64 / shots as f64;
            assert!((f - 0.5).abs() < 5.0 * sigma, "{key}: {f}");
        }
    }

    #[test]
    fn same_seed_same_histogram() {
        let s = QuantumState::from_unnormalized(
            (0..8).map(|i| crate::linalg::c(i as f64 + 1.0)).collect(),
        )
        .unwrap();
        let mut l = ResourceLedger::new();
        let a = measure_qubits(&s, &[0, 2], &mut RandomSource::new(42), 1000, &mut l).unwrap();
        let b = measure_qubits(&s, &[0, 2], &mut RandomSource::new(42), 1000, &mut l).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn marginal_respects_target_order() {
        // |q0 q1⟩ = |01⟩
        let s = QuantumState::basis(2, 0b01).unwrap();
        assert_eq!(
            marginal_probabilities(&s, &[0, 1]).unwrap(),
            vec![0.0, 1.0, 0.0, 0.0]
        );
        assert_eq!(
            marginal_probabilities(&s, &[1, 0]).unwrap(),
            vec![0.0, 0.0, 1.0, 0.0]
        );
        assert_eq!(marginal_probabilities(&s, &[1]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn measure_errors() {
        let s = QuantumState::zero(2).unwrap();
        let mut l = ResourceLedger::new();
        let mut r = RandomSource::new(0);
        assert!(matches!(
            measure_qubits(&s, &[3], &mut r, 1, &mut l),
            Err(Error::TargetOutOfRange { .. })
        ));
        assert_eq!(
            measure_qubits(&s, &[0], &mut r, 0, &mut l),
            Err(Error::ZeroShots)
        );
    }
}
