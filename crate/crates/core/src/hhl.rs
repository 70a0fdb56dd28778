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

//! HHL linear-system solver.
//!
//! The register is `clock ⊗ system ⊗ ancilla`. Phase estimation of
//! `U = e^{iAt₀}` writes eigenvalue estimates into the clock, a multiplexed
//! rotation loads `C/λ̂` onto the ancilla, phase estimation is undone, and the
//! `clock = 0, ancilla = 1` branch is kept. Matrix exponentials are exact
//! dense spectral maps.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::linalg::{c, hermitian_deviation, hermitian_eigen, spectral_map, CMatrix, CVector, C64};
use crate::rng::RandomSource;
use crate::sim::{gates, prepare_complex_state, GateOp, MultiplexedOp, QuantumState, QubitCap};

const HERMITIAN_CHECK: f64 = 1e-10;

/// `A x = b` with `A` square.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    a: CMatrix,
    b: CVector,
    hermitian: bool,
}

impl LinearSystem {
    pub fn new(a: CMatrix, b: CVector) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        if b.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let hermitian = hermitian_deviation(&a) <= HERMITIAN_CHECK;
        Ok(Self { a, b, hermitian })
    }

    /// Real system from a row-major matrix.
    pub fn real(a: &DMatrix<f64>, b: &[f64]) -> Result<Self> {
        Self::new(
            a.map(c),
            CVector::from_iterator(b.len(), b.iter().map(|&x| c(x))),
        )
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Largest number of nonzero entries in any row.
    pub fn sparsity(&self) -> usize {
        self.a
            .row_iter()
            .map(|r| r.iter().filter(|z| z.norm() > 0.0).count())
            .max()
            .unwrap_or(0)
    }

    /// Dense LU solve, used as the classical reference.
    pub fn classical_solve(&self) -> Option<CVector> {
        self.a.clone().lu().solve(&self.b)
    }
}

/// `[[0, A], [A†, 0]]` with `b ↦ (b, 0)` for non-Hermitian `A`; Hermitian
/// systems come back unchanged. The solution of the embedded system is
/// `(0, x)`: see [`embedded_solution_block`].
pub fn hermitian_embed(sys: &LinearSystem) -> LinearSystem {
    if sys.hermitian {
        return sys.clone();
    }
    let n = sys.dim();
    let mut a = CMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).copy_from(&sys.a);
    a.view_mut((n, 0), (n, n)).copy_from(&sys.a.adjoint());
    let mut b = CVector::zeros(2 * n);
    b.rows_mut(0, n).copy_from(&sys.b);
    LinearSystem {
        a,
        b,
        hermitian: true,
    }
}

/// Rows `n..2n` of an embedded solution, which hold `x`.
pub fn embedded_solution_block(embedded: &[C64], n: usize) -> Vec<C64> {
    embedded[n..2 * n].to_vec()
}

/// Identity-pads a system to the next power of two (at least 2). The padded
/// coordinates have eigenvalue 1 and no right-hand-side weight.
pub fn pad_to_power_of_two(sys: &LinearSystem) -> LinearSystem {
    let n = sys.dim();
    let dim = n.max(2).next_power_of_two();
    if dim == n {
        return sys.clone();
    }
    let mut a = CMatrix::identity(dim, dim);
    a.view_mut((0, 0), (n, n)).copy_from(&sys.a);
    let mut b = CVector::zeros(dim);
    b.rows_mut(0, n).copy_from(&sys.b);
    LinearSystem {
        a,
        b,
        hermitian: sys.hermitian,
    }
}

/// How clock values map to eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseWindow {
    /// Phases in `[0, 1)`; for positive spectra.
    Unsigned,
    /// Two's-complement clock: phases in `[−½, ½)`.
    Signed,
}

impl PhaseWindow {
    /// Eigenvalue represented by clock value `k`.
    pub fn decode(self, k: usize, clock_qubits: usize, t0: f64) -> f64 {
        let size = 1usize << clock_qubits;
        let signed = match self {
            PhaseWindow::Signed if k >= size / 2 => k as f64 - size as f64,
            _ => k as f64,
        };
        2.0 * PI * signed / (t0 * size as f64)
    }

    fn contains(self, phase: f64) -> bool {
        const SLACK: f64 = 1e-12;
        match self {
            PhaseWindow::Unsigned => (-SLACK..1.0).contains(&phase),
            PhaseWindow::Signed => (-0.5 - SLACK..0.5).contains(&phase),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HHLParams {
    pub clock_qubits: usize,
    pub evolution_time: f64,
    /// Estimates with `|λ̂| < eigenvalue_cutoff` are dropped.
    pub eigenvalue_cutoff: f64,
    pub inversion_constant: f64,
    pub window: PhaseWindow,
    pub cap: QubitCap,
}

/// Gershgorin disc bounds `(lower, upper)` on the spectrum of a Hermitian
/// matrix.
pub fn gershgorin_bounds(a: &CMatrix) -> (f64, f64) {
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for i in 0..a.nrows() {
        let radius: f64 = (0..a.ncols())
            .filter(|&j| j != i)
            .map(|j| a[(i, j)].norm())
            .sum();
        lower = lower.min(a[(i, i)].re - radius);
        upper = upper.max(a[(i, i)].re + radius);
    }
    (lower, upper)
}

impl HHLParams {
    /// Parameters from spectral bounds `lower ≤ λ ≤ upper`.
    ///
    /// Positive spectra use the unsigned window with
    /// `t₀ = 2π(1 − 2^{-c})/upper`. Otherwise the signed window is used with
    /// `t₀ = 2π(½ − 2^{-c})/max(|lower|, |upper|)`. The cutoff is one clock
    /// step, so only the zero bin is dropped, and `C = cutoff`.
    pub fn from_bounds(clock_qubits: usize, lower: f64, upper: f64) -> Result<Self> {
        if clock_qubits == 0 {
            return Err(Error::InvalidParameter(
                "need at least one clock qubit".into(),
            ));
        }
        let size = (1usize << clock_qubits) as f64;
        let (window, t0) = if lower > 0.0 {
            (PhaseWindow::Unsigned, 2.0 * PI * (1.0 - 1.0 / size) / upper)
        } else {
            if clock_qubits < 2 {
                return Err(Error::InvalidParameter(
                    "a signed phase window needs at least two clock qubits".into(),
                ));
            }
            let bound = lower.abs().max(upper.abs());
            (PhaseWindow::Signed, 2.0 * PI * (0.5 - 1.0 / size) / bound)
        };
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "evolution time {t0} is not positive"
            )));
        }
        let step = 2.0 * PI / (t0 * size);
        Ok(Self {
            clock_qubits,
            evolution_time: t0,
            eigenvalue_cutoff: step,
            inversion_constant: step,
            window,
            cap: QubitCap::default(),
        })
    }

    /// Parameters from the Gershgorin bounds of a Hermitian matrix, with the
    /// cutoff tuned by [`HHLParams::with_spectral_cutoff`].
    pub fn for_matrix(a: &CMatrix, clock_qubits: usize) -> Result<Self> {
        let (lower, upper) = gershgorin_bounds(a);
        let (values, _) = hermitian_eigen(a);
        let magnitudes: Vec<f64> = values.iter().map(|l| l.abs()).collect();
        Ok(Self::from_bounds(clock_qubits, lower, upper)?.with_spectral_cutoff(&magnitudes))
    }

    /// Raises the cutoff to half the smallest eigenvalue magnitude that is at
    /// least one clock step, so phase-estimation leakage into bins near zero
    /// is not amplified by `1/λ̂`. Smaller magnitudes are treated as null
    /// space. `C` follows the cutoff.
    pub fn with_spectral_cutoff(mut self, magnitudes: &[f64]) -> Self {
        let step = self.clock_step();
        let smallest = magnitudes
            .iter()
            .copied()
            .filter(|&l| l >= step)
            .fold(f64::INFINITY, f64::min);
        if smallest.is_finite() {
            self.eigenvalue_cutoff = step.max(0.5 * smallest);
            self.inversion_constant = self.eigenvalue_cutoff;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.clock_qubits == 0 {
            return Err(Error::InvalidParameter(
                "need at least one clock qubit".into(),
            ));
        }
        if !(self.evolution_time > 0.0) {
            return Err(Error::InvalidParameter(
                "evolution time must be positive".into(),
            ));
        }
        if !(self.eigenvalue_cutoff > 0.0 && self.inversion_constant > 0.0) {
            return Err(Error::InvalidParameter(
                "cutoff and C must be positive".into(),
            ));
        }
        if self.inversion_constant > self.eigenvalue_cutoff * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "C = {} exceeds the cutoff {}",
                self.inversion_constant, self.eigenvalue_cutoff
            )));
        }
        Ok(())
    }

    pub fn clock_step(&self) -> f64 {
        2.0 * PI / (self.evolution_time * (1usize << self.clock_qubits) as f64)
    }
}

/// Controlled powers of `e^{iAt₀}` plus the clock Fourier transform.
struct PhaseEstimator {
    powers: Vec<CMatrix>,
    clock_qubits: usize,
    system_qubits: usize,
}

impl PhaseEstimator {
    fn new(a: &CMatrix, t0: f64, window: PhaseWindow, clock_qubits: usize) -> Result<Self> {
        let (values, vectors) = hermitian_eigen(a);
        for &lam in &values {
            if !window.contains(lam * t0 / (2.0 * PI)) {
                return Err(Error::EigenvalueOutOfRange {
                    eigenvalue: lam,
                    t0,
                });
            }
        }
        let powers = (0..clock_qubits)
            .map(|p| {
                let t = t0 * (1u64 << p) as f64;
                spectral_map(&values, &vectors, |lam| C64::from_polar(1.0, lam * t))
            })
            .collect();
        Ok(Self {
            powers,
            clock_qubits,
            system_qubits: a.nrows().trailing_zeros() as usize,
        })
    }

    fn system_targets(&self) -> Vec<usize> {
        (self.clock_qubits..self.clock_qubits + self.system_qubits).collect()
    }

    fn clock_targets(&self) -> Vec<usize> {
        (0..self.clock_qubits).collect()
    }

    /// Clock qubit `j` (0 = MSB) controls `U^{2^{c−1−j}}`.
    fn forward(&self, state: &mut QuantumState, ledger: &mut ResourceLedger) -> Result<()> {
        let c = self.clock_qubits;
        for q in 0..c {
            state.apply(&GateOp::new(gates::h(), vec![q])?, ledger)?;
        }
        for j in 0..c {
            let gate = GateOp::new(self.powers[c - 1 - j].clone(), self.system_targets())?
                .controlled_by(vec![j])?;
            state.apply(&gate, ledger)?;
        }
        let iqft = GateOp::new(gates::qft(c).adjoint(), self.clock_targets())?;
        state.apply(&iqft, ledger)
    }

    fn inverse(&self, state: &mut QuantumState, ledger: &mut ResourceLedger) -> Result<()> {
        let c = self.clock_qubits;
        state.apply(&GateOp::new(gates::qft(c), self.clock_targets())?, ledger)?;
        for j in (0..c).rev() {
            let gate = GateOp::new(self.powers[c - 1 - j].adjoint(), self.system_targets())?
                .controlled_by(vec![j])?;
            state.apply(&gate, ledger)?;
        }
        for q in 0..c {
            state.apply(&GateOp::new(gates::h(), vec![q])?, ledger)?;
        }
        Ok(())
    }
}

/// Phase estimation of `e^{iAt₀}` on `input`; returns `clock ⊗ system`.
///
/// Clock value `k` (clock qubit 0 is its MSB) estimates the phase
/// `λt₀/2π ≈ k/2^c`, read through `window`.
pub fn phase_estimation(
    a: &CMatrix,
    t0: f64,
    window: PhaseWindow,
    input: &QuantumState,
    clock_qubits: usize,
    ledger: &mut ResourceLedger,
) -> Result<QuantumState> {
    if hermitian_deviation(a) > HERMITIAN_CHECK {
        return Err(Error::InvalidParameter(
            "phase estimation needs a Hermitian matrix".into(),
        ));
    }
    if a.nrows() != input.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: input.dim(),
        });
    }
    if clock_qubits == 0 {
        return Err(Error::InvalidParameter(
            "need at least one clock qubit".into(),
        ));
    }
    let estimator = PhaseEstimator::new(a, t0, window, clock_qubits)?;
    let mut state = QuantumState::zero(clock_qubits)?.tensor(input);
    estimator.forward(&mut state, ledger)?;
    Ok(state)
}

/// Probability of each clock value in a `clock ⊗ system` state.
pub fn clock_distribution(state: &QuantumState, clock_qubits: usize) -> Vec<f64> {
    let system_dim = state.dim() >> clock_qubits;
    let mut out = vec![0.0; 1 << clock_qubits];
    for (i, a) in state.amplitudes().iter().enumerate() {
        out[i / system_dim] += a.norm_sqr();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HhlMode {
    /// Conditional state computed directly from the post-selected branch.
    Exact,
    /// Post-selection is retried with fresh shots up to `max_attempts`.
    Sampled { max_attempts: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HhlSolution {
    /// Normalized post-selected system register (padded dimension).
    pub state: QuantumState,
    /// Normalized solution direction in the original coordinates.
    pub solution: Vec<C64>,
    pub success_probability: f64,
    /// Post-selection attempts consumed (zero in exact mode).
    pub attempts: u64,
}

/// Success probabilities at or below this count as "no branch survived".
const SINGULAR_THRESHOLD: f64 = 1e-24;

pub fn hhl_solve(
    sys: &LinearSystem,
    params: &HHLParams,
    mode: HhlMode,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<HhlSolution> {
    params.validate()?;
    let original_dim = sys.dim();
    let embedded = !sys.is_hermitian();
    let herm = hermitian_embed(sys);
    let herm_dim = herm.dim();
    let padded = pad_to_power_of_two(&herm);

    let c = params.clock_qubits;
    let system_qubits = padded.dim().trailing_zeros() as usize;
    let total = c + system_qubits + 1;
    params.cap.check(total)?;
    ledger.charge_qubits(total);
    ledger.note("hhl.sparsity", padded.sparsity());
    ledger.note("hhl.clock_qubits", c);

    let estimator = PhaseEstimator::new(padded.a(), params.evolution_time, params.window, c)?;
    let b_state = prepare_complex_state(padded.b().as_slice(), params.cap, ledger)?;
    let mut state = QuantumState::zero(c)?
        .tensor(&b_state)
        .tensor(&QuantumState::zero(1)?);

    estimator.forward(&mut state, ledger)?;
    let blocks = (0..1usize << c)
        .map(|k| {
            let lam = params.window.decode(k, c, params.evolution_time);
            if lam.abs() < params.eigenvalue_cutoff * (1.0 - 1e-9) {
                CMatrix::identity(2, 2)
            } else {
                let ratio = (params.inversion_constant / lam).clamp(-1.0, 1.0);
                gates::ry(ratio.asin())
            }
        })
        .collect();
    let ancilla = total - 1;
    MultiplexedOp::new((0..c).collect(), vec![ancilla], blocks)?.apply(&mut state, ledger)?;
    estimator.inverse(&mut state, ledger)?;

    // Keep clock = 0, ancilla = 1.
    let sys_dim = padded.dim();
    let branch: Vec<C64> = (0..sys_dim)
        .map(|i| state.amplitudes()[(i << 1) | 1])
        .collect();
    let success_probability: f64 = branch.iter().map(|a| a.norm_sqr()).sum();
    if success_probability <= SINGULAR_THRESHOLD {
        return Err(Error::SingularSystem);
    }

    let attempts = match mode {
        HhlMode::Exact => 0,
        HhlMode::Sampled { max_attempts } => {
            let mut tries = 0;
            loop {
                if tries == max_attempts {
                    ledger.charge_shots(tries);
                    return Err(Error::PostSelectionFailed { attempts: tries });
                }
                tries += 1;
                if rng.uniform() < success_probability {
                    break;
                }
            }
            ledger.charge_shots(tries);
            tries
        }
    };

    let scale = 1.0 / success_probability.sqrt();
    let normalized: Vec<C64> = branch.iter().map(|a| a * scale).collect();
    let herm_part = &normalized[..herm_dim];
    let raw = if embedded {
        embedded_solution_block(herm_part, original_dim)
    } else {
        herm_part.to_vec()
    };
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::SingularSystem);
    }
    Ok(HhlSolution {
        state: QuantumState::new(normalized)?,
        solution: raw.iter().map(|a| a / norm).collect(),
        success_probability,
        attempts,
    })
}

/// Random Hermitian system `Q diag(λ) Q† x = b` with Haar-like `Q`, eigenvalue
/// magnitudes in `[1, κ]` (both ends attained for `n ≥ 2`) and, when `signed`,
/// random eigenvalue signs.
pub fn random_hermitian_system(
    n: usize,
    condition: f64,
    signed: bool,
    rng: &mut RandomSource,
) -> LinearSystem {
    let g = CMatrix::from_fn(n, n, |_, _| C64::new(rng.normal(), rng.normal()));
    let q = g.qr().q();
    let values = CVector::from_iterator(
        n,
        (0..n).map(|i| {
            let m = match i {
                0 => 1.0,
                1 => condition,
                _ => 1.0 + (condition - 1.0) * rng.uniform(),
            };
            c(if signed && rng.uniform() < 0.5 { -m } else { m })
        }),
    );
    let a = &q * CMatrix::from_diagonal(&values) * q.adjoint();
    let a = (&a + a.adjoint()).scale(0.5);
    let b = CVector::from_fn(n, |_, _| C64::new(rng.normal(), rng.normal()));
    LinearSystem::new(a, b).expect("generated system is valid")
}

/// `|⟨x̂|ŷ⟩|²` of two vectors after normalization.
pub fn vector_fidelity(x: &[C64], y: &[C64]) -> f64 {
    let nx: f64 = x.iter().map(|a| a.norm_sqr()).sum();
    let ny: f64 = y.iter().map(|a| a.norm_sqr()).sum();
    let inner: C64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    inner.norm_sqr() / (nx * ny)
}

/// `f(x) = xᵀAx + bᵀx + c` with symmetric `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    a: DMatrix<f64>,
    b: Vec<f64>,
    c: f64,
}

impl QuadraticForm {
    pub fn new(a: DMatrix<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        if !a.is_square() || a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: b.len(),
            });
        }
        let dev = (&a - a.transpose()).amax();
        if dev > HERMITIAN_CHECK {
            return Err(Error::InvalidParameter(format!(
                "A is not symmetric ({dev:e})"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let xv = nalgebra::DVector::from_column_slice(x);
        (xv.transpose() * &self.a * &xv)[(0, 0)]
            + self.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>()
            + self.c
    }

    /// Best multiple of `direction`: `α* = −bᵀs / (2 sᵀAs)`.
    pub fn line_minimizer(&self, direction: &[f64]) -> Vec<f64> {
        let s = nalgebra::DVector::from_column_slice(direction);
        let curvature = (s.transpose() * &self.a * &s)[(0, 0)];
        let slope: f64 = self.b.iter().zip(direction).map(|(b, x)| b * x).sum();
        let alpha = -slope / (2.0 * curvature);
        direction.iter().map(|x| alpha * x).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSolution {
    pub hhl: HhlSolution,
    /// Real part of the normalized solution direction.
    pub direction: Vec<f64>,
}

/// Minimizes a positive-definite quadratic by solving its stationarity
/// condition `2Ax = −b` with HHL.
pub fn quadratic_minimize(
    q: &QuadraticForm,
    clock_qubits: usize,
    mode: HhlMode,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<QuadraticSolution> {
    let ca = q.a.map(c);
    let (values, _) = hermitian_eigen(&ca);
    if values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: values[0],
        });
    }
    if q.b.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroSolution);
    }
    let sys = LinearSystem::new(
        ca.scale(2.0),
        CVector::from_iterator(q.b.len(), q.b.iter().map(|&x| c(-x))),
    )?;
    let params = HHLParams::for_matrix(sys.a(), clock_qubits)?;
    let hhl = hhl_solve(&sys, &params, mode, rng, ledger)?;
    let direction = hhl.solution.iter().map(|z| z.re).collect();
    Ok(QuadraticSolution { hhl, direction })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_system(d: &[f64], b: &[f64]) -> LinearSystem {
        LinearSystem::real(
            &DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)),
            b,
        )
        .unwrap()
    }

    #[test]
    fn embed_leaves_hermitian_alone() {
        let sys = diag_system(&[1.0, 2.0], &[1.0, 0.0]);
        assert_eq!(hermitian_embed(&sys), sys);
    }

    #[test]
    fn embed_nilpotent() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let sys = LinearSystem::real(&a, &[1.0, 0.0]).unwrap();
        assert!(!sys.is_hermitian());
        let e = hermitian_embed(&sys);
        assert_eq!(e.dim(), 4);
        assert!(hermitian_deviation(e.a()) == 0.0);
        assert!(e.is_hermitian());
    }

    #[test]
    fn qpe_reads_exact_phase() {
        // A = diag(1, 2), t0 = 2π/4, c = 2: λ = 1 has phase 1/4 → clock 01.
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[1.0, 2.0])).map(c);
        let input = QuantumState::basis(1, 0).unwrap();
        let mut l = ResourceLedger::new();
        let out =
            phase_estimation(&a, 2.0 * PI / 4.0, PhaseWindow::Unsigned, &input, 2, &mut l).unwrap();
        let dist = clock_distribution(&out, 2);
        assert!((dist[0b01] - 1.0).abs() < 1e-12, "{dist:?}");
    }

    #[test]
    fn qpe_rejects_out_of_window() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[1.0, 5.0])).map(c);
        let input = QuantumState::basis(1, 0).unwrap();
        let mut l = ResourceLedger::new();
        assert!(matches!(
            phase_estimation(&a, 2.0 * PI / 4.0, PhaseWindow::Unsigned, &input, 2, &mut l),
            Err(Error::EigenvalueOutOfRange { .. })
        ));
    }

    #[test]
    fn identity_system_returns_b() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sys = LinearSystem::real(&DMatrix::identity(2, 2), &[r, -r]).unwrap();
        let params = HHLParams::for_matrix(sys.a(), 4).unwrap();
        let mut l = ResourceLedger::new();
        let sol = hhl_solve(
            &sys,
            &params,
            HhlMode::Exact,
            &mut RandomSource::new(0),
            &mut l,
        )
        .unwrap();
        assert!((sol.solution[0].re - r).abs() < 1e-10);
        assert!((sol.solution[1].re + r).abs() < 1e-10);
        let expect = params.inversion_constant.powi(2);
        assert!((sol.success_probability - expect).abs() < 1e-10);
    }

    #[test]
    fn diagonal_exact_phases_give_exact_solution() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sys = diag_system(&[1.0, 2.0], &[r, r]);
        let mut params = HHLParams::for_matrix(sys.a(), 2).unwrap();
        params.evolution_time = 2.0 * PI / 4.0;
        params.eigenvalue_cutoff = 1.0;
        params.inversion_constant = 1.0;
        let mut l = ResourceLedger::new();
        let sol = hhl_solve(
            &sys,
            &params,
            HhlMode::Exact,
            &mut RandomSource::new(0),
            &mut l,
        )
        .unwrap();
        // LU oracle: A⁻¹b ∝ (1, 1/2) → (2/√5, 1/√5)
        let x = sys.classical_solve().unwrap();
        assert!((x[0].re / x[1].re - 2.0).abs() < 1e-12);
        assert!((sol.solution[0].re - 2.0 / 5f64.sqrt()).abs() < 1e-10);
        assert!((sol.solution[1].re - 1.0 / 5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn diagonal_default_params_high_fidelity() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sys = diag_system(&[1.0, 2.0], &[r, r]);
        let params = HHLParams::for_matrix(sys.a(), 8).unwrap();
        let mut l = ResourceLedger::new();
        let sol = hhl_solve(
            &sys,
            &params,
            HhlMode::Exact,
            &mut RandomSource::new(0),
            &mut l,
        )
        .unwrap();
        let x = sys.classical_solve().unwrap();
        assert!(vector_fidelity(&sol.solution, x.as_slice()) > 0.99);
        assert!((sol.state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_right_hand_side() {
        let sys = diag_system(&[0.0, 1.0], &[1.0, 0.0]);
        let params = HHLParams::from_bounds(4, 0.0, 1.0).unwrap();
        let mut l = ResourceLedger::new();
        assert_eq!(
            hhl_solve(
                &sys,
                &params,
                HhlMode::Exact,
                &mut RandomSource::new(0),
                &mut l
            ),
            Err(Error::SingularSystem)
        );
    }

    #[test]
    fn sampled_mode_post_selection() {
        let sys = diag_system(&[1.0, 2.0], &[1.0, 1.0]);
        let params = HHLParams::for_matrix(sys.a(), 4).unwrap();
        let mut l = ResourceLedger::new();
        let ok = hhl_solve(
            &sys,
            &params,
            HhlMode::Sampled {
                max_attempts: 1_000_000,
            },
            &mut RandomSource::new(4),
            &mut l,
        )
        .unwrap();
        assert!(ok.attempts >= 1);
        assert_eq!(l.shots, ok.attempts);
        let err = hhl_solve(
            &sys,
            &params,
            HhlMode::Sampled { max_attempts: 0 },
            &mut RandomSource::new(4),
            &mut l,
        );
        assert_eq!(err, Err(Error::PostSelectionFailed { attempts: 0 }));
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = HHLParams::from_bounds(4, 1.0, 2.0).unwrap();
        p.inversion_constant = 2.0 * p.eigenvalue_cutoff;
        assert!(p.validate().is_err());
        assert!(HHLParams::from_bounds(1, -1.0, 1.0).is_err());
    }

    #[test]
    fn quadratic_examples() {
        let mut l = ResourceLedger::new();
        let mut rng = RandomSource::new(0);
        let q = QuadraticForm::new(DMatrix::identity(2, 2), vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(
            quadratic_minimize(&q, 6, HhlMode::Exact, &mut rng, &mut l).err(),
            Some(Error::ZeroSolution)
        );
        // ∇f = 2Ax + b = 0 with A = 2I, b = (−4, 0) → x = (1, 0)
        let q = QuadraticForm::new(DMatrix::identity(2, 2) * 2.0, vec![-4.0, 0.0], 3.0).unwrap();
        let sol = quadratic_minimize(&q, 6, HhlMode::Exact, &mut rng, &mut l).unwrap();
        let x = q.line_minimizer(&sol.direction);
        assert!((x[0] - 1.0).abs() < 1e-9 && x[1].abs() < 1e-9, "{x:?}");
        let neg = QuadraticForm::new(DMatrix::identity(2, 2) * -1.0, vec![1.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            quadratic_minimize(&neg, 6, HhlMode::Exact, &mut rng, &mut l),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
