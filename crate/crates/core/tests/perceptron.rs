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

use proptest::prelude::*;
use qmldesk_core::perceptron::*;
use qmldesk_core::{RandomSource, ResourceLedger};

fn train(ts: &PerceptronTrainingSet, clock: usize) -> WeightState {
    let cfg = PerceptronConfig {
        clock_qubits: clock,
        ..Default::default()
    };
    let mut l = ResourceLedger::new();
    train_weights(ts, &cfg, &mut RandomSource::new(1), &mut l).unwrap()
}

#[test]
fn known_binary_solution_w3() {
    // All binary x of width 3 labelled by w* = (1,1,0), restricted to the rows
    // where A w* = y holds.
    let w_star = [1u8, 1, 0];
    let rows: Vec<(Vec<u8>, u8)> = (0..8)
        .map(|k| bits(k, 3))
        .filter_map(|x| {
            let dot: u8 = x.iter().zip(&w_star).map(|(a, b)| a & b).sum();
            (dot <= 1).then_some((x, dot))
        })
        .collect();
    let ts = PerceptronTrainingSet::new(rows, 0.0).unwrap();
    assert_eq!(exhaustive_binary_solutions(&ts), vec![w_star.to_vec()]);
    let w = train(&ts, 8);
    assert_eq!(w.decoded_weights, w_star);
}

#[test]
fn weight_fidelity_rises_with_clock() {
    let mut rng = RandomSource::new(44);
    let suites: Vec<_> = (0..6)
        .map(|_| random_consistent_suite(4, 12, &mut rng))
        .collect();
    let mean = |clock: usize| {
        suites
            .iter()
            .map(|(ts, _)| {
                let w = train(ts, clock);
                let sys = assemble_system(ts).unwrap();
                let exact = sys.a.clone().pseudo_inverse(1e-10).unwrap() * &sys.target;
                let exact = exact.normalize();
                let overlap: f64 = w
                    .amplitudes
                    .iter()
                    .zip(exact.iter())
                    .map(|(a, e)| a.re * e)
                    .sum();
                overlap * overlap
            })
            .sum::<f64>()
            / suites.len() as f64
    };
    let f: Vec<f64> = [4, 6, 8].iter().map(|&c| mean(c)).collect();
    assert!(f[0] <= f[1] && f[1] <= f[2], "{f:?}");
    assert!(f[2] > 0.99, "{f:?}");
}

#[test]
fn end_to_end_agreement_small() {
    let mut rng = RandomSource::new(7);
    for _ in 0..4 {
        let width = 2 + rng.below(3);
        let rows = width + rng.below(20);
        let (ts, w_star) = random_consistent_suite(width, rows, &mut rng);
        let mut w = train(&ts, 8);
        let mut l = ResourceLedger::new();
        let rule = ActivationRule { bias: ts.bias() };
        for k in 0..1usize << width {
            let x = bits(k, width);
            let got = classify(&mut w, &x, rule, &mut l).unwrap();
            assert_eq!(got, classical_label(&w_star, &x, 0.0));
        }
    }
}

#[test]
fn cg_matches_least_squares() {
    let mut rng = RandomSource::new(3);
    for _ in 0..10 {
        let (ts, _) = random_consistent_suite(5, 30, &mut rng);
        let base = classical_baselines(&ts).unwrap();
        assert!(base.conjugate_gradient.converged);
        for (a, b) in base
            .conjugate_gradient
            .weights
            .iter()
            .zip(&base.least_squares)
        {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn repeated_classification_leaves_register(seed in any::<u64>(), width in 1usize..=4, calls in 1usize..6) {
        let mut rng = RandomSource::new(seed);
        let amps: Vec<_> = (0..width).map(|_| qmldesk_core::linalg::c(rng.normal())).collect();
        prop_assume!(amps.iter().any(|a| a.norm() > 1e-3));
        let mut w = WeightState::from_amplitudes(amps, 0.0).unwrap();
        let before = w.register().clone();
        let mut l = ResourceLedger::new();
        for _ in 0..calls {
            let x = bits(rng.below(1 << width), width);
            classify(&mut w, &x, ActivationRule { bias: 0.0 }, &mut l).unwrap();
        }
        for (a, b) in w.register().amplitudes().iter().zip(before.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn circuit_matches_dot_product(wk in 0usize..64, xk in 0usize..64, bias in -2.5f64..1.5) {
        let (wb, xb) = (bits(wk, 6), bits(xk, 6));
        let mut w = WeightState::from_bits(&wb, bias).unwrap();
        let mut l = ResourceLedger::new();
        let got = classify(&mut w, &xb, ActivationRule { bias }, &mut l).unwrap();
        prop_assert_eq!(got, classical_label(&wb, &xb, bias));
    }
}
