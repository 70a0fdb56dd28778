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

//! Quantum principal component analysis.
//!
//! `e^{−iρt}` is applied to a state `σ` by repeatedly swapping `σ` with a
//! fresh copy of `ρ` for a short time and discarding the copy. Phase
//! estimation driven by these evolutions, with `σ = ρ`, samples eigenvalues of
//! `ρ` with probabilities equal to the eigenvalues themselves.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::linalg::{
    exp_i_hermitian, hermitian_eigen, hermitian_operator_norm, kron, trace_distance, CMatrix, C64,
    ONE, ZERO,
};
use crate::rng::RandomSource;
use crate::sim::{gates, partial_trace_matrix, sample_counts, DensityMatrix, QubitCap};

/// `n_copies` swap steps of length `t / n_copies`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentiationPlan {
    pub t: f64,
    pub n_copies: u64,
}

impl ExponentiationPlan {
    pub fn new(t: f64, n_copies: u64) -> Result<Self> {
        if n_copies == 0 {
            return Err(Error::InvalidParameter(
                "n_copies must be at least 1".into(),
            ));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "evolution time {t} must be ≥ 0"
            )));
        }
        Ok(Self { t, n_copies })
    }

    pub fn dt(&self) -> f64 {
        self.t / self.n_copies as f64
    }

    fn check_step(&self, rho: &DensityMatrix) -> Result<()> {
        let largest = rho.eigenvalues().last().copied().unwrap_or(0.0);
        if self.dt() * largest >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "step dt·‖ρ‖ = {} must be below 1",
                self.dt() * largest
            )));
        }
        Ok(())
    }
}

fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, j * d + i)] = ONE;
        }
    }
    s
}

/// `e^{−iS·dt} = cos(dt) I − i sin(dt) S`, since `S² = I`.
fn swap_step_unitary(d: usize, dt: f64) -> CMatrix {
    CMatrix::identity(d * d, d * d) * C64::new(dt.cos(), 0.0)
        + swap_operator(d) * C64::new(0.0, -dt.sin())
}

/// `Tr₁[L (ρ ⊗ X) R]` with `L = e^{−iS·dt}` when `left` and `R = e^{iS·dt}`
/// when `right` (identity otherwise). `X` need not be a density matrix, which
/// is what the controlled versions below need.
fn swap_sandwich(rho: &CMatrix, x: &CMatrix, u: &CMatrix, left: bool, right: bool) -> CMatrix {
    let d = rho.nrows();
    let q = d.trailing_zeros() as usize;
    let mut joint = kron(rho, x);
    if left {
        joint = u * joint;
    }
    if right {
        joint *= u.adjoint();
    }
    let keep: Vec<usize> = (q..2 * q).collect();
    partial_trace_matrix(&joint, 2 * q, &keep).expect("keep set is valid")
}

/// One swap step: `Tr₁[e^{−iS·dt}(ρ ⊗ σ)e^{iS·dt}]`.
pub fn dm_exp_step(rho: &DensityMatrix, sigma: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let u = swap_step_unitary(rho.dim(), dt);
    DensityMatrix::new(swap_sandwich(rho.matrix(), sigma.matrix(), &u, true, true))
}

/// `e^{−iρt} σ e^{iρt}` by dense exponentiation.
pub fn exact_evolution(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> CMatrix {
    let u = exp_i_hermitian(rho.matrix(), -t);
    &u * sigma.matrix() * u.adjoint()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exponentiated {
    pub state: DensityMatrix,
    /// Trace distance to [`exact_evolution`].
    pub error: f64,
}

pub fn dm_exponentiate(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    plan: &ExponentiationPlan,
    ledger: &mut ResourceLedger,
) -> Result<Exponentiated> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    plan.check_step(rho)?;
    let d = rho.dim();
    let u = swap_step_unitary(d, plan.dt());
    let mut m = sigma.matrix().clone();
    for _ in 0..plan.n_copies {
        m = swap_sandwich(rho.matrix(), &m, &u, true, true);
    }
    ledger.charge_qubits(2 * rho.num_qubits());
    ledger.charge_gates(plan.n_copies);
    ledger.charge_state_preps(plan.n_copies);
    let state = DensityMatrix::new(m)?;
    let error = trace_distance(state.matrix(), &exact_evolution(rho, sigma, plan.t));
    Ok(Exponentiated { state, error })
}

fn mat_pow(m: &CMatrix, mut n: u64) -> CMatrix {
    let mut base = m.clone();
    let mut acc = CMatrix::identity(m.nrows(), m.ncols());
    while n > 0 {
        if n & 1 == 1 {
            acc = &acc * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Controlled `e^{−iρτ}` realized as `steps` swap steps, split by the control
/// value of the row and column of a `control ⊗ system` operator.
struct ControlledEvolution {
    /// Superoperator on row-major `vec(X)` for the `|1⟩⟨1|` block.
    both: CMatrix,
    /// Left factor for the `|1⟩⟨0|` block; its adjoint multiplies `|0⟩⟨1|`.
    left: CMatrix,
    d: usize,
}

impl ControlledEvolution {
    fn new(rho: &CMatrix, dt: f64, steps: u64) -> Self {
        let d = rho.nrows();
        let u = swap_step_unitary(d, dt);
        let mut superop = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = ONE;
                let out = swap_sandwich(rho, &e, &u, true, true);
                for r in 0..d {
                    for s in 0..d {
                        superop[(r * d + s, i * d + j)] = out[(r, s)];
                    }
                }
            }
        }
        let left = swap_sandwich(rho, &CMatrix::identity(d, d), &u, true, false);
        Self {
            both: mat_pow(&superop, steps),
            left: mat_pow(&left, steps),
            d,
        }
    }

    fn apply(&self, x: &CMatrix, row_bit: bool, col_bit: bool) -> CMatrix {
        match (row_bit, col_bit) {
            (false, false) => x.clone(),
            (true, false) => &self.left * x,
            (false, true) => x * self.left.adjoint(),
            (true, true) => {
                let d = self.d;
                let v = nalgebra::DVector::from_iterator(d * d, x.transpose().iter().copied());
                let out = &self.both * v;
                CMatrix::from_fn(d, d, |r, s| out[r * d + s])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpcaOptions {
    pub clock_qubits: usize,
    /// Peaks need this much probability, and components with a smaller
    /// eigenvalue are not counted in the retained rank.
    pub threshold: f64,
    /// Eigenvalue-register samples; 0 uses the exact distribution.
    pub shots: u64,
    pub cap: QubitCap,
}

impl Default for QpcaOptions {
    fn default() -> Self {
        Self {
            clock_qubits: 6,
            threshold: 0.01,
            shots: 0,
            cap: QubitCap::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalDecomposition {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalue-register probability mass attributed to each component.
    pub weights: Vec<f64>,
    /// Orthonormal, aligned with `eigenvalues`.
    pub eigenvectors: Vec<Vec<C64>>,
    pub rank: usize,
    /// Probability of each eigenvalue level `k/(2^c − 1)`, `k = 0..2^c`.
    pub level_distribution: Vec<f64>,
    pub counts: Option<Vec<u64>>,
}

impl PrincipalDecomposition {
    /// Dense eigendecomposition of `ρ`, keeping eigenvalues ≥ `threshold`.
    pub fn exact(rho: &DensityMatrix, threshold: f64) -> Self {
        let (values, vectors) = hermitian_eigen(rho.matrix());
        let mut eigenvalues = Vec::new();
        let mut eigenvectors = Vec::new();
        for k in (0..values.len()).rev() {
            if values[k] >= threshold {
                eigenvalues.push(values[k].clamp(0.0, 1.0));
                eigenvectors.push(vectors.column(k).iter().copied().collect());
            }
        }
        Self {
            rank: eigenvalues.len(),
            weights: eigenvalues.clone(),
            eigenvalues,
            eigenvectors,
            level_distribution: Vec::new(),
            counts: None,
        }
    }
}

/// Phase estimation of `e^{−iρτ}` on input `ρ`.
///
/// Clock qubit `j` controls `2^{c−1−j}` units of time `τ = 2π(1 − 2^{−c})`,
/// so eigenvalue `λ ∈ [0, 1]` lands on level `λ(2^c − 1)`. Each controlled
/// evolution uses swap steps no longer than the plan's `dt`. Eigenvectors are
/// principal eigenvectors of the system state conditioned on each peak level,
/// orthonormalized in descending eigenvalue order.
pub fn qpca_extract(
    rho: &DensityMatrix,
    plan: &ExponentiationPlan,
    opts: &QpcaOptions,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<PrincipalDecomposition> {
    let c = opts.clock_qubits;
    if c < 2 {
        return Err(Error::InvalidParameter(
            "need at least two clock qubits".into(),
        ));
    }
    if plan.dt() <= 0.0 {
        return Err(Error::InvalidParameter(
            "plan must have a positive step".into(),
        ));
    }
    plan.check_step(rho)?;
    let q = rho.num_qubits();
    opts.cap.check(c + 2 * q)?;
    ledger.charge_qubits(c + 2 * q);

    let size = 1usize << c;
    let unit = 2.0 * PI * (1.0 - 1.0 / size as f64);
    let d = rho.dim();
    let mut copies = 0u64;
    let controls: Vec<ControlledEvolution> = (0..c)
        .map(|j| {
            let time = unit * (1u64 << (c - 1 - j)) as f64;
            let steps = (time / plan.dt()).ceil().max(1.0) as u64;
            copies += steps;
            ControlledEvolution::new(rho.matrix(), time / steps as f64, steps)
        })
        .collect();
    ledger.charge_state_preps(copies);
    ledger.charge_gates(copies + c as u64 + 1);
    ledger.note("qpca.copies", copies);

    // Blocks X_ab of the clock ⊗ system operator after the Hadamards and the
    // controlled evolutions, built one clock qubit at a time.
    let mut blocks: Vec<(usize, usize, CMatrix)> =
        vec![(0, 0, rho.matrix().scale(1.0 / size as f64))];
    for ctrl in &controls {
        let mut next = Vec::with_capacity(blocks.len() * 4);
        for (a, b, x) in &blocks {
            for ra in [false, true] {
                for cb in [false, true] {
                    next.push((
                        (a << 1) | ra as usize,
                        (b << 1) | cb as usize,
                        ctrl.apply(x, ra, cb),
                    ));
                }
            }
        }
        blocks = next;
    }
    let mut grid = vec![CMatrix::zeros(d, d); size * size];
    for (a, b, x) in blocks {
        grid[a * size + b] = x;
    }

    // Diagonal blocks after the inverse Fourier transform on the clock:
    // Y_kk = Σ_ab conj(F_ak) F_bk X_ab.
    let f = gates::qft(c);
    let mut level_distribution = vec![0.0; size];
    let mut conditional = vec![CMatrix::zeros(d, d); size];
    for k in 0..size {
        let mut y = CMatrix::zeros(d, d);
        for b in 0..size {
            let mut inner = CMatrix::zeros(d, d);
            for a in 0..size {
                inner += &grid[a * size + b] * f[(a, k)].conj();
            }
            y += inner * f[(b, k)];
        }
        let level = (size - k) % size;
        level_distribution[level] = y.trace().re.max(0.0);
        conditional[level] = y;
    }

    let (observed, counts) = if opts.shots > 0 {
        let counts = sample_counts(&level_distribution, opts.shots, rng);
        ledger.charge_shots(opts.shots);
        let freq = counts
            .iter()
            .map(|&n| n as f64 / opts.shots as f64)
            .collect();
        (freq, Some(counts))
    } else {
        (level_distribution.clone(), None)
    };

    let peaks = find_peaks(&observed, opts.threshold);
    let mut weights = vec![0.0; peaks.len()];
    if !peaks.is_empty() {
        for (level, p) in observed.iter().enumerate() {
            let nearest = peaks
                .iter()
                .enumerate()
                .min_by_key(|(_, &pk)| pk.abs_diff(level))
                .map(|(i, _)| i)
                .expect("peaks is not empty");
            weights[nearest] += p;
        }
    }

    let scale = (size - 1) as f64;
    let mut components: Vec<(f64, f64, Vec<C64>)> = peaks
        .iter()
        .zip(&weights)
        .map(|(&level, &w)| {
            let cond = &conditional[level];
            let herm = (cond + cond.adjoint()).scale(0.5);
            let (_, vecs) = hermitian_eigen(&herm);
            (
                level as f64 / scale,
                w,
                vecs.column(d - 1).iter().copied().collect(),
            )
        })
        .collect();
    components.sort_by(|x, y| y.0.total_cmp(&x.0));

    let total: f64 = components.iter().map(|c| c.0).sum();
    if total > 1.0 {
        for comp in &mut components {
            comp.0 /= total;
        }
    }
    let eigenvectors = gram_schmidt(components.iter().map(|c| c.2.clone()).collect());
    let rank = components.iter().filter(|c| c.0 >= opts.threshold).count();
    Ok(PrincipalDecomposition {
        eigenvalues: components.iter().map(|c| c.0).collect(),
        weights: components.iter().map(|c| c.1).collect(),
        eigenvectors,
        rank,
        level_distribution,
        counts,
    })
}

/// Local maxima with probability at least `floor`.
fn find_peaks(p: &[f64], floor: f64) -> Vec<usize> {
    (0..p.len())
        .filter(|&i| {
            let left = if i > 0 { p[i - 1] } else { f64::NEG_INFINITY };
            let right = p.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
            p[i] >= floor && p[i] >= left && p[i] > right
        })
        .collect()
}

fn gram_schmidt(vectors: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for u in &out {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            out.push(v.iter().map(|z| z / n).collect());
        }
    }
    out
}

/// `‖ρ − PρP‖` (operator norm) with `P` projecting onto the first `r`
/// eigenvectors of `decomposition`.
pub fn principal_projection_error(
    rho: &DensityMatrix,
    decomposition: &PrincipalDecomposition,
    r: usize,
) -> Result<f64> {
    let d = rho.dim();
    if r > d {
        return Err(Error::InvalidParameter(format!(
            "rank {r} exceeds dimension {d}"
        )));
    }
    let mut p = CMatrix::zeros(d, d);
    for v in decomposition.eigenvectors.iter().take(r) {
        let col = nalgebra::DVector::from_column_slice(v);
        p += &col * col.adjoint();
    }
    let diff = rho.matrix() - &p * rho.matrix() * &p;
    Ok(hermitian_operator_norm(&diff))
}

/// Effective rank `1/Tr ρ²` over the dimension: 1 for a flat spectrum, `1/d`
/// for a pure state.
pub fn spectrum_flatness(rho: &DensityMatrix) -> f64 {
    let purity = (rho.matrix() * rho.matrix()).trace().re;
    1.0 / (purity * rho.dim() as f64)
}

/// `XᵀX / tr(XᵀX)` over mean-centered rows, zero-padded to a power-of-two
/// dimension.
pub fn covariance_density(rows: &[Vec<f64>]) -> Result<DensityMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(Error::ZeroVector);
    }
    for r in rows {
        if r.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: r.len(),
            });
        }
    }
    let mean: Vec<f64> = (0..m)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let d = m.max(2).next_power_of_two();
    let mut cov = CMatrix::from_element(d, d, ZERO);
    for r in rows {
        for i in 0..m {
            for j in 0..m {
                cov[(i, j)] += C64::new((r[i] - mean[i]) * (r[j] - mean[j]), 0.0);
            }
        }
    }
    let tr = cov.trace().re;
    if tr <= 0.0 {
        return Err(Error::ZeroVector);
    }
    DensityMatrix::new(cov.scale(1.0 / tr))
}

/// Random density matrix `GG†/tr` with `G` a complex Gaussian `d × rank`.
pub fn random_density_matrix(
    num_qubits: usize,
    rank: usize,
    rng: &mut RandomSource,
) -> DensityMatrix {
    let d = 1usize << num_qubits;
    let g = CMatrix::from_fn(d, rank.max(1), |_, _| C64::new(rng.normal(), rng.normal()));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.scale(1.0 / tr);
    DensityMatrix::new((&m + m.adjoint()).scale(0.5)).expect("Wishart matrix is a valid state")
}

/// `w₁|v₁⟩⟨v₁| + w₂|v₂⟩⟨v₂| + …` over random orthonormal vectors.
pub fn random_spectrum_density(
    num_qubits: usize,
    weights: &[f64],
    rng: &mut RandomSource,
) -> Result<DensityMatrix> {
    let d = 1usize << num_qubits;
    if weights.len() > d {
        return Err(Error::InvalidParameter(
            "more weights than dimensions".into(),
        ));
    }
    let g = CMatrix::from_fn(d, d, |_, _| C64::new(rng.normal(), rng.normal()));
    let q = g.qr().q();
    let mut m = CMatrix::zeros(d, d);
    for (k, &w) in weights.iter().enumerate() {
        let v = q.column(k);
        m += v * v.adjoint() * C64::new(w, 0.0);
    }
    DensityMatrix::new((&m + m.adjoint()).scale(0.5))
}
