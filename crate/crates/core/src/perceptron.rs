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

//! Perceptron with binary weights trained by HHL.
//!
//! Training solves `A w = ỹ` where row `t` of `A` is the binary instance
//! `xᵗ` and `ỹ = y − b`. Classification runs the Toffoli scratchpad circuit
//! on a `W`-qubit weight register, data qubits and ancillas, then undoes it so
//! the weights can be reused.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hhl::{hhl_solve, HHLParams, HhlMode, LinearSystem};
use crate::ledger::ResourceLedger;
use crate::linalg::{c, CMatrix, CVector, C64};
use crate::rng::RandomSource;
use crate::sim::{gates, marginal_probabilities, GateOp, QuantumState, QubitCap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronTrainingSet {
    instances: Vec<(Vec<u8>, u8)>,
    /// One global bias, used both in `ỹ = y − b` and in the activation rule.
    bias: f64,
}

impl PerceptronTrainingSet {
    pub fn new(instances: Vec<(Vec<u8>, u8)>, bias: f64) -> Result<Self> {
        let width = match instances.first() {
            Some((x, _)) if !x.is_empty() => x.len(),
            _ => return Err(Error::EmptyTrainingSet),
        };
        for (x, y) in &instances {
            if x.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    found: x.len(),
                });
            }
            if x.iter().chain([y]).any(|&v| v > 1) {
                return Err(Error::InvalidParameter(
                    "instances and labels must be 0 or 1".into(),
                ));
            }
        }
        if !bias.is_finite() {
            return Err(Error::InvalidParameter("bias must be finite".into()));
        }
        Ok(Self { instances, bias })
    }

    pub fn instances(&self) -> &[(Vec<u8>, u8)] {
        &self.instances
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn width(&self) -> usize {
        self.instances[0].0.len()
    }
}

/// Rectangular `N × W` training system.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronSystem {
    pub a: DMatrix<f64>,
    pub target: DVector<f64>,
}

pub fn assemble_system(ts: &PerceptronTrainingSet) -> Result<PerceptronSystem> {
    let (n, w) = (ts.len(), ts.width());
    let a = DMatrix::from_fn(n, w, |t, j| ts.instances[t].0[j] as f64);
    let target = DVector::from_fn(n, |t, _| ts.instances[t].1 as f64 - ts.bias);
    if target.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroTarget);
    }
    Ok(PerceptronSystem { a, target })
}

impl PerceptronSystem {
    /// `‖A w − ỹ‖₂` at the best multiple of `direction`.
    pub fn residual(&self, direction: &[f64]) -> (Vec<f64>, f64) {
        let s = DVector::from_column_slice(direction);
        let as_ = &self.a * &s;
        let denom = as_.norm_squared();
        let alpha = if denom > 0.0 {
            as_.dot(&self.target) / denom
        } else {
            0.0
        };
        let w: Vec<f64> = direction.iter().map(|v| alpha * v).collect();
        let r = (&as_ * alpha - &self.target).norm();
        (w, r)
    }

    /// Square system for HHL: zero columns or rows are appended to make `A`
    /// square. Non-Hermitian results are embedded by the solver.
    fn square(&self) -> Result<LinearSystem> {
        let (n, w) = self.a.shape();
        let m = n.max(w);
        let mut a = CMatrix::zeros(m, m);
        a.view_mut((0, 0), (n, w)).copy_from(&self.a.map(c));
        let mut b = CVector::zeros(m);
        b.rows_mut(0, n).copy_from(&self.target.map(c));
        LinearSystem::new(a, b)
    }

    /// Normal equations `AᵀA w = Aᵀỹ`.
    fn normal_equations(&self) -> Result<LinearSystem> {
        let ata = self.a.transpose() * &self.a;
        let aty = self.a.transpose() * &self.target;
        if aty.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroTarget);
        }
        LinearSystem::real(&ata, aty.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrainingMode {
    /// `A w = ỹ` through the Hermitian embedding; inconsistent systems get the
    /// pseudo-inverse solution.
    Exact,
    /// `AᵀA w = Aᵀỹ`.
    LeastSquares,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerceptronConfig {
    pub clock_qubits: usize,
    pub mode: TrainingMode,
    pub cap: QubitCap,
}

impl Default for PerceptronConfig {
    fn default() -> Self {
        Self {
            clock_qubits: 8,
            mode: TrainingMode::Exact,
            cap: QubitCap::default(),
        }
    }
}

/// Weights held in a `W`-qubit register.
///
/// The HHL output encodes `w` in amplitudes; it is loaded into a product
/// register where qubit `j` is `|1⟩` with probability `|w_j|² / max|w|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    register: QuantumState,
    /// Normalized HHL amplitudes `w/‖w‖`.
    pub amplitudes: Vec<C64>,
    /// Dominant basis state of `register`; for tests and reports only.
    pub decoded_weights: Vec<u8>,
    /// `‖A w − ỹ‖` at the best scale of the trained direction.
    pub residual: f64,
    pub success_probability: f64,
    bias: f64,
}

impl WeightState {
    /// Product register from weight amplitudes.
    pub fn from_amplitudes(amplitudes: Vec<C64>, bias: f64) -> Result<Self> {
        let peak = amplitudes.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::ZeroVector);
        }
        let probs: Vec<f64> = amplitudes
            .iter()
            .map(|a| (a.norm_sqr() / peak).min(1.0))
            .collect();
        let mut register = single_qubit(probs[0]);
        for &q in &probs[1..] {
            register = register.tensor(&single_qubit(q));
        }
        let decoded_weights = probs.iter().map(|&q| u8::from(q >= 0.5)).collect();
        Ok(Self {
            register,
            amplitudes,
            decoded_weights,
            residual: 0.0,
            success_probability: 1.0,
            bias,
        })
    }

    /// Register holding the basis state `w`.
    pub fn from_bits(w: &[u8], bias: f64) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let index = w.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let register = QuantumState::basis(w.len(), index)?;
        Ok(Self {
            register,
            amplitudes: w.iter().map(|&b| c(b as f64)).collect(),
            decoded_weights: w.to_vec(),
            residual: 0.0,
            success_probability: 1.0,
            bias,
        })
    }

    pub fn register(&self) -> &QuantumState {
        &self.register
    }

    pub fn width(&self) -> usize {
        self.register.num_qubits()
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }
}

fn single_qubit(p_one: f64) -> QuantumState {
    QuantumState::new(vec![c((1.0 - p_one).max(0.0).sqrt()), c(p_one.sqrt())])
        .expect("single-qubit state is normalized")
}

/// Runs HHL on the assembled system and loads the result into a register.
pub fn train_weights(
    ts: &PerceptronTrainingSet,
    cfg: &PerceptronConfig,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<WeightState> {
    let sys = assemble_system(ts)?;
    let width = ts.width();
    let (linear, params) = match cfg.mode {
        TrainingMode::Exact => {
            let linear = sys.square()?;
            // ‖A‖₂ ≤ √(‖A‖₁‖A‖∞) bounds the embedded spectrum.
            let col = (0..width)
                .map(|j| sys.a.column(j).sum())
                .fold(0.0, f64::max);
            let row = (0..ts.len())
                .map(|t| sys.a.row(t).sum())
                .fold(0.0, f64::max);
            let bound = (col * row).sqrt().max(1.0);
            let sv = sys.a.clone().singular_values();
            let params = HHLParams::from_bounds(cfg.clock_qubits, -bound, bound)?
                .with_spectral_cutoff(sv.as_slice());
            (linear, params)
        }
        TrainingMode::LeastSquares => {
            let linear = sys.normal_equations()?;
            let params = HHLParams::for_matrix(linear.a(), cfg.clock_qubits)?;
            (linear, params)
        }
    };
    let params = HHLParams {
        cap: cfg.cap,
        ..params
    };
    let sol = hhl_solve(&linear, &params, HhlMode::Exact, rng, ledger)?;
    let amplitudes: Vec<C64> = sol.solution[..width].to_vec();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::SingularSystem);
    }
    let amplitudes: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
    let direction: Vec<f64> = amplitudes.iter().map(|a| a.re).collect();
    let (_, residual) = sys.residual(&direction);
    let mut state = WeightState::from_amplitudes(amplitudes, ts.bias)?;
    state.residual = residual;
    state.success_probability = sol.success_probability;
    Ok(state)
}

/// `y = 1` iff `w·x + b > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivationRule {
    pub bias: f64,
}

/// Toffoli scratchpad classification.
///
/// Layout is weights (qubits `0..W`), data (`W..2W`), ancillas (`2W..3W`).
/// Ancilla `j` is set by a Toffoli on `(w_j, x_j)`, so the ancilla Hamming
/// weight is `w·x`. The output is 1 when `w·x + b > 0` has probability at
/// least ½. The Toffolis are then undone and the weight register is restored
/// from the `x, 0` slice.
pub fn classify(
    w: &mut WeightState,
    x: &[u8],
    rule: ActivationRule,
    ledger: &mut ResourceLedger,
) -> Result<u8> {
    let width = w.width();
    if x.len() != width {
        return Err(Error::DimensionMismatch {
            expected: width,
            found: x.len(),
        });
    }
    let total = 3 * width;
    QubitCap::default().check(total)?;
    ledger.charge_qubits(total);

    let x_index = x.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let data = QuantumState::basis(width, x_index)?;
    let mut state = w.register.tensor(&data).tensor(&QuantumState::zero(width)?);
    let toffolis = (0..width)
        .map(|j| GateOp::new(gates::x(), vec![2 * width + j])?.controlled_by(vec![j, width + j]))
        .collect::<Result<Vec<_>>>()?;
    for g in &toffolis {
        state.apply(g, ledger)?;
    }
    let ancillas: Vec<usize> = (2 * width..total).collect();
    let probs = marginal_probabilities(&state, &ancillas)?;
    let p_one: f64 = probs
        .iter()
        .enumerate()
        .filter(|(k, _)| k.count_ones() as f64 + rule.bias > 0.0)
        .map(|(_, p)| p)
        .sum();
    for g in toffolis.iter().rev() {
        state.apply(g, ledger)?;
    }

    let amps = state.amplitudes();
    let restored: Vec<C64> = (0..1usize << width)
        .map(|k| amps[(k << (2 * width)) | (x_index << width)])
        .collect();
    w.register = QuantumState::new(restored)?;
    Ok(u8::from(p_one >= 0.5))
}

/// Classical reference label `[w·x + b > 0]`.
pub fn classical_label(w: &[u8], x: &[u8], bias: f64) -> u8 {
    let dot: u32 = w.iter().zip(x).map(|(&a, &b)| (a & b) as u32).sum();
    u8::from(dot as f64 + bias > 0.0)
}

/// Every binary `w` with zero training error under `[w·x + b > 0]`.
pub fn exhaustive_binary_solutions(ts: &PerceptronTrainingSet) -> Vec<Vec<u8>> {
    let width = ts.width();
    (0..1usize << width)
        .map(|k| bits(k, width))
        .filter(|w| {
            ts.instances
                .iter()
                .all(|(x, y)| classical_label(w, x, ts.bias) == *y)
        })
        .collect()
}

/// Big-endian bits of `k`.
pub fn bits(k: usize, width: usize) -> Vec<u8> {
    (0..width)
        .map(|j| ((k >> (width - 1 - j)) & 1) as u8)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterativeResult {
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBaselines {
    /// Rosenblatt perceptron; the last weight is the learned bias.
    pub perceptron: IterativeResult,
    pub least_squares: Vec<f64>,
    pub least_squares_residual: f64,
    /// Conjugate gradient on the normal equations.
    pub conjugate_gradient: IterativeResult,
}

/// Rosenblatt perceptron with an appended constant feature.
pub fn rosenblatt(rows: &[Vec<f64>], labels: &[u8], max_epochs: usize) -> IterativeResult {
    let width = rows.first().map_or(0, Vec::len) + 1;
    let mut w = vec![0.0; width];
    let mut iterations = 0;
    for _ in 0..max_epochs {
        let mut mistakes = 0;
        for (x, &y) in rows.iter().zip(labels) {
            let act: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[width - 1];
            let predicted = u8::from(act > 0.0);
            if predicted != y {
                let sign = if y == 1 { 1.0 } else { -1.0 };
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += sign * xj;
                }
                w[width - 1] += sign;
                mistakes += 1;
            }
            iterations += 1;
        }
        if mistakes == 0 {
            return IterativeResult {
                weights: w,
                iterations,
                converged: true,
            };
        }
    }
    IterativeResult {
        weights: w,
        iterations,
        converged: false,
    }
}

/// Conjugate gradient on `AᵀA w = Aᵀy` (CGNR).
pub fn conjugate_gradient_normal(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> IterativeResult {
    let at = a.transpose();
    let rhs = &at * y;
    let mut w = DVector::zeros(a.ncols());
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rs = r.norm_squared();
    let stop = tol * tol * rhs.norm_squared().max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    while rs > stop && iterations < max_iter {
        let ap = &at * (a * &p);
        let alpha = rs / p.dot(&ap);
        w += &p * alpha;
        r -= &ap * alpha;
        let next = r.norm_squared();
        p = &r + &p * (next / rs);
        rs = next;
        iterations += 1;
    }
    IterativeResult {
        weights: w.iter().copied().collect(),
        iterations,
        converged: rs <= stop,
    }
}

pub fn classical_baselines(ts: &PerceptronTrainingSet) -> Result<ClassicalBaselines> {
    let sys = assemble_system(ts)?;
    let rows: Vec<Vec<f64>> = ts
        .instances
        .iter()
        .map(|(x, _)| x.iter().map(|&v| v as f64).collect())
        .collect();
    let labels: Vec<u8> = ts.instances.iter().map(|(_, y)| *y).collect();
    let perceptron = rosenblatt(&rows, &labels, 1000);
    let pinv = sys
        .a
        .clone()
        .pseudo_inverse(1e-10)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let ls = &pinv * &sys.target;
    let residual = (&sys.a * &ls - &sys.target).norm();
    let cg = conjugate_gradient_normal(&sys.a, &sys.target, 1e-12, 10 * ts.width().max(1));
    Ok(ClassicalBaselines {
        perceptron,
        least_squares: ls.iter().copied().collect(),
        least_squares_residual: residual,
        conjugate_gradient: cg,
    })
}

/// Consistent suite with a unique binary solution.
///
/// Rows are drawn from `{x : x·w* ≤ 1}` so `A w* = y` holds exactly, and
/// draws are repeated until `A` has full column rank and `w*` is the only
/// binary vector with zero training error.
pub fn random_consistent_suite(
    width: usize,
    rows: usize,
    rng: &mut RandomSource,
) -> (PerceptronTrainingSet, Vec<u8>) {
    assert!(width >= 1 && rows >= width);
    loop {
        let w_star = bits(1 + rng.below((1 << width) - 1), width);
        let mut instances = Vec::with_capacity(rows);
        while instances.len() < rows {
            let x = bits(rng.below(1 << width), width);
            let dot: u8 = x.iter().zip(&w_star).map(|(a, b)| a & b).sum();
            if dot <= 1 {
                instances.push((x, dot));
            }
        }
        let ts = PerceptronTrainingSet::new(instances, 0.0).expect("well-formed suite");
        let a = assemble_system(&ts).expect("w* is nonzero").a;
        if a.rank(1e-9) < width {
            continue;
        }
        if exhaustive_binary_solutions(&ts) == [w_star.clone()] {
            return (ts, w_star);
        }
    }
}
