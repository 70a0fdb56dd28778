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
use qmldesk_core::linalg::{c, hermitian_eigen, CMatrix, C64};
use qmldesk_core::qpca::*;
use qmldesk_core::sim::DensityMatrix;
use qmldesk_core::{RandomSource, ResourceLedger};

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn step_matches_commutator_closed_form() {
    // Tr₁[e^{−iS dt}(ρ⊗σ)e^{iS dt}] = cos²σ + sin²ρ − i cos sin [ρ, σ]
    let mut rng = RandomSource::new(1);
    for _ in 0..5 {
        let rho = random_density_matrix(2, 4, &mut rng);
        let sigma = random_density_matrix(2, 4, &mut rng);
        let dt = 0.37;
        let out = dm_exp_step(&rho, &sigma, dt).unwrap();
        let (cs, sn) = (dt.cos(), dt.sin());
        let expect = sigma.matrix() * c(cs * cs) + rho.matrix() * c(sn * sn)
            - commutator(rho.matrix(), sigma.matrix()) * C64::new(0.0, cs * sn);
        assert!((out.matrix() - expect).norm() < 1e-12);
    }
}

#[test]
fn step_first_order_is_commutator() {
    let mut rng = RandomSource::new(2);
    let rho = random_density_matrix(1, 2, &mut rng);
    let sigma = random_density_matrix(1, 2, &mut rng);
    let mut ratios = Vec::new();
    for dt in [1e-2, 5e-3, 2.5e-3] {
        let out = dm_exp_step(&rho, &sigma, dt).unwrap();
        let first = sigma.matrix() - commutator(rho.matrix(), sigma.matrix()) * C64::new(0.0, dt);
        ratios.push((out.matrix() - first).norm() / (dt * dt));
    }
    // O(dt²): the scaled remainder stays bounded and roughly constant.
    for r in &ratios {
        assert!(
            *r < 10.0 && (r / ratios[0] - 1.0).abs() < 0.05,
            "{ratios:?}"
        );
    }
}

#[test]
fn commuting_states_relax_by_closed_form() {
    // With [ρ, σ] = 0 each step is σ ↦ cos²σ + sin²ρ, so after n steps
    // σₙ = σ + (1 − cos^{2n}(t/n))(ρ − σ), while the exact evolution leaves σ fixed.
    let rho = DensityMatrix::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(0.6),
        c(0.3),
        c(0.1),
        c(0.0),
    ])))
    .unwrap();
    let sigma = DensityMatrix::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(0.1),
        c(0.2),
        c(0.3),
        c(0.4),
    ])))
    .unwrap();
    let mut l = ResourceLedger::new();
    for (t, n) in [(1.0, 16u64), (0.5, 100), (2.0, 64)] {
        let out = dm_exponentiate(
            &rho,
            &sigma,
            &ExponentiationPlan::new(t, n).unwrap(),
            &mut l,
        )
        .unwrap();
        let f = 1.0 - (t / n as f64).cos().powi(2 * n as i32);
        let expect = sigma.matrix() + (rho.matrix() - sigma.matrix()) * c(f);
        assert!((out.state.matrix() - expect).norm() < 1e-10);
        assert!((exact_evolution(&rho, &sigma, t) - sigma.matrix()).norm() < 1e-10);
    }
    let same = dm_exponentiate(
        &rho,
        &rho,
        &ExponentiationPlan::new(3.0, 7).unwrap(),
        &mut l,
    )
    .unwrap();
    assert!((same.state.matrix() - rho.matrix()).norm() < 1e-10);
}

#[test]
fn doubling_copies_halves_error() {
    let mut rng = RandomSource::new(3);
    for _ in 0..5 {
        let rho = random_density_matrix(2, 4, &mut rng);
        let sigma = random_density_matrix(2, 4, &mut rng);
        let mut l = ResourceLedger::new();
        let e64 = dm_exponentiate(
            &rho,
            &sigma,
            &ExponentiationPlan::new(1.0, 64).unwrap(),
            &mut l,
        )
        .unwrap()
        .error;
        let e128 = dm_exponentiate(
            &rho,
            &sigma,
            &ExponentiationPlan::new(1.0, 128).unwrap(),
            &mut l,
        )
        .unwrap()
        .error;
        let ratio = e64 / e128;
        assert!((1.6..=2.4).contains(&ratio), "{ratio}");
    }
}

#[test]
fn error_exponent_near_minus_one() {
    let mut rng = RandomSource::new(4);
    let rho = random_density_matrix(2, 4, &mut rng);
    let sigma = random_density_matrix(2, 4, &mut rng);
    let ns = [16u64, 32, 64, 128, 256, 512];
    let mut l = ResourceLedger::new();
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            dm_exponentiate(
                &rho,
                &sigma,
                &ExponentiationPlan::new(1.0, n).unwrap(),
                &mut l,
            )
            .unwrap()
            .error
        })
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let k = slope(&xs, &ys);
    assert!((-1.2..=-0.8).contains(&k), "{k}");
}

#[test]
fn rank_two_eigenvalue_extraction() {
    let mut rng = RandomSource::new(5);
    for c_bits in [4usize, 6] {
        let rho = random_spectrum_density(3, &[0.8, 0.2], &mut rng).unwrap();
        let plan = ExponentiationPlan::new(1.0, 1000).unwrap();
        let opts = QpcaOptions {
            clock_qubits: c_bits,
            ..Default::default()
        };
        let mut l = ResourceLedger::new();
        let out = qpca_extract(&rho, &plan, &opts, &mut rng, &mut l).unwrap();
        let tol = 2f64.powi(1 - c_bits as i32);
        assert!(
            (out.eigenvalues[0] - 0.8).abs() <= tol,
            "{:?}",
            out.eigenvalues
        );
        assert_eq!(out.rank, 2);
        let (_, vecs) = hermitian_eigen(rho.matrix());
        let top: Vec<C64> = vecs.column(7).iter().copied().collect();
        let overlap: C64 = top
            .iter()
            .zip(&out.eigenvectors[0])
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(overlap.norm() > 0.99);
        assert!(l.state_preps > 0);
    }
}

#[test]
fn sampled_levels_match_eigenvalues() {
    // 0.8 and 0.2 are exact levels at c = 4 (12/15 and 3/15).
    let mut rng = RandomSource::new(6);
    let rho = random_spectrum_density(2, &[0.8, 0.2], &mut rng).unwrap();
    let plan = ExponentiationPlan::new(1.0, 2000).unwrap();
    let shots = 100_000u64;
    let opts = QpcaOptions {
        clock_qubits: 4,
        shots,
        ..Default::default()
    };
    let mut l = ResourceLedger::new();
    let out = qpca_extract(&rho, &plan, &opts, &mut rng, &mut l).unwrap();
    assert_eq!(l.shots, shots);
    for (w, lam) in out.weights.iter().zip([0.8, 0.2]) {
        let sigma = (lam * (1.0 - lam) / shots as f64).sqrt();
        assert!((w - lam).abs() <= 5.0 * sigma, "{w} vs {lam}");
    }
}

#[test]
fn decomposition_invariants() {
    let mut rng = RandomSource::new(8);
    for _ in 0..3 {
        let rho = random_density_matrix(2, 3, &mut rng);
        let plan = ExponentiationPlan::new(1.0, 500).unwrap();
        let mut l = ResourceLedger::new();
        let out = qpca_extract(&rho, &plan, &QpcaOptions::default(), &mut rng, &mut l).unwrap();
        assert!(out.eigenvalues.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(out.eigenvalues.iter().sum::<f64>() <= 1.0 + 1e-9);
        assert!(out.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        for (i, u) in out.eigenvectors.iter().enumerate() {
            for (j, v) in out.eigenvectors.iter().enumerate() {
                let ip: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(expect)).norm() < 1e-8);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn step_output_is_physical(seed in any::<u64>(), dt in 0.0f64..1.5, qubits in 1usize..=2) {
        let mut rng = RandomSource::new(seed);
        let rho = random_density_matrix(qubits, 1 + rng.below(4), &mut rng);
        let sigma = random_density_matrix(qubits, 1 + rng.below(4), &mut rng);
        // DensityMatrix::new checks Hermitian, unit trace and PSD.
        prop_assert!(dm_exp_step(&rho, &sigma, dt).is_ok());
    }
}
