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

//! Restricted Boltzmann machines at enumeration scale.
//!
//! `E(v, h) = −a·v − b·h − vᵀWh (+ offset)` and `P ∝ e^{−E}`. The exact
//! Gibbs table stands in for a prepared quantum Gibbs state; mean-field
//! magnetizations give the classical approximate gradient.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::rng::RandomSource;

/// Largest `n_v + n_h` that is enumerated.
pub const SIZE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannMachine {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `n_v × n_h`.
    pub w: DMatrix<f64>,
    /// Constant added to every energy; it cancels in every probability.
    pub energy_offset: f64,
}

impl BoltzmannMachine {
    pub fn new(a: Vec<f64>, b: Vec<f64>, w: DMatrix<f64>) -> Result<Self> {
        if w.nrows() != a.len() || w.ncols() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len() * b.len(),
                found: w.nrows() * w.ncols(),
            });
        }
        let nodes = a.len() + b.len();
        if nodes > SIZE_CAP {
            return Err(Error::SizeCapExceeded {
                nodes,
                cap: SIZE_CAP,
            });
        }
        Ok(Self {
            a,
            b,
            w,
            energy_offset: 0.0,
        })
    }

    pub fn zeros(n_v: usize, n_h: usize) -> Result<Self> {
        Self::new(vec![0.0; n_v], vec![0.0; n_h], DMatrix::zeros(n_v, n_h))
    }

    /// Parameters drawn from `N(0, scale²)`.
    pub fn random(n_v: usize, n_h: usize, scale: f64, rng: &mut RandomSource) -> Result<Self> {
        let a = (0..n_v).map(|_| scale * rng.normal()).collect();
        let b = (0..n_h).map(|_| scale * rng.normal()).collect();
        let w = DMatrix::from_fn(n_v, n_h, |_, _| scale * rng.normal());
        Self::new(a, b, w)
    }

    pub fn n_v(&self) -> usize {
        self.a.len()
    }

    pub fn n_h(&self) -> usize {
        self.b.len()
    }

    pub fn energy(&self, v: &[u8], h: &[u8]) -> f64 {
        let mut e = self.energy_offset;
        for (i, &vi) in v.iter().enumerate() {
            if vi == 1 {
                e -= self.a[i];
                for (j, &hj) in h.iter().enumerate() {
                    if hj == 1 {
                        e -= self.w[(i, j)];
                    }
                }
            }
        }
        for (j, &hj) in h.iter().enumerate() {
            if hj == 1 {
                e -= self.b[j];
            }
        }
        e
    }

    fn apply(&mut self, g: &Gradient, step: f64) {
        for (x, d) in self.a.iter_mut().zip(&g.a) {
            *x += step * d;
        }
        for (x, d) in self.b.iter_mut().zip(&g.b) {
            *x += step * d;
        }
        self.w += &g.w * step;
    }

    /// Parameters in the order `a`, `b`, `W` (row-major).
    pub fn parameters(&self) -> Vec<f64> {
        let mut p = self.a.clone();
        p.extend(&self.b);
        p.extend(self.w.transpose().iter());
        p
    }

    pub fn set_parameters(&mut self, p: &[f64]) {
        let (nv, nh) = (self.n_v(), self.n_h());
        self.a.copy_from_slice(&p[..nv]);
        self.b.copy_from_slice(&p[nv..nv + nh]);
        self.w = DMatrix::from_row_slice(nv, nh, &p[nv + nh..]);
    }
}

/// Big-endian bits of `k`.
fn bits(k: usize, width: usize) -> Vec<u8> {
    (0..width)
        .map(|j| ((k >> (width - 1 - j)) & 1) as u8)
        .collect()
}

fn index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Visible patterns with weights summing to 1; duplicates are merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryDataset {
    patterns: Vec<Vec<u8>>,
    weights: Vec<f64>,
}

impl BinaryDataset {
    pub fn new(patterns: Vec<Vec<u8>>) -> Result<Self> {
        let weights = vec![1.0; patterns.len()];
        Self::with_weights(patterns, weights)
    }

    pub fn with_weights(patterns: Vec<Vec<u8>>, weights: Vec<f64>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if weights.len() != patterns.len() {
            return Err(Error::DimensionMismatch {
                expected: patterns.len(),
                found: weights.len(),
            });
        }
        let width = patterns[0].len();
        let mut merged: std::collections::BTreeMap<Vec<u8>, f64> = Default::default();
        for (p, &w) in patterns.into_iter().zip(&weights) {
            if p.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    found: p.len(),
                });
            }
            if p.iter().any(|&x| x > 1) || !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(
                    "patterns must be binary and weights non-negative".into(),
                ));
            }
            *merged.entry(p).or_insert(0.0) += w;
        }
        let total: f64 = merged.values().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("weights sum to zero".into()));
        }
        let (patterns, weights) = merged.into_iter().map(|(p, w)| (p, w / total)).unzip();
        Ok(Self { patterns, weights })
    }

    pub fn patterns(&self) -> &[Vec<u8>] {
        &self.patterns
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn width(&self) -> usize {
        self.patterns[0].len()
    }
}

/// Exact `P(v, h)` indexed by `(v_index << n_h) | h_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsTable {
    pub n_v: usize,
    pub n_h: usize,
    pub probabilities: Vec<f64>,
    pub log_partition: f64,
}

impl GibbsTable {
    pub fn probability(&self, v: &[u8], h: &[u8]) -> f64 {
        self.probabilities[(index(v) << self.n_h) | index(h)]
    }

    /// Marginal `P(v)` over all visible patterns.
    pub fn visible_marginal(&self) -> Vec<f64> {
        let nh = 1usize << self.n_h;
        self.probabilities
            .chunks(nh)
            .map(|c| c.iter().sum())
            .collect()
    }
}

pub fn gibbs_distribution(bm: &BoltzmannMachine) -> Result<GibbsTable> {
    let (nv, nh) = (bm.n_v(), bm.n_h());
    if nv + nh > SIZE_CAP {
        return Err(Error::SizeCapExceeded {
            nodes: nv + nh,
            cap: SIZE_CAP,
        });
    }
    let neg_energy: Vec<f64> = (0..1usize << (nv + nh))
        .map(|k| -bm.energy(&bits(k >> nh, nv), &bits(k & ((1 << nh) - 1), nh)))
        .collect();
    let log_partition = log_sum_exp(neg_energy.iter().copied());
    let probabilities = neg_energy
        .iter()
        .map(|x| (x - log_partition).exp())
        .collect();
    Ok(GibbsTable {
        n_v: nv,
        n_h: nh,
        probabilities,
        log_partition,
    })
}

/// `Σ_d p_d log P(v_d)`.
pub fn log_likelihood(bm: &BoltzmannMachine, data: &BinaryDataset) -> Result<f64> {
    check_width(bm, data)?;
    let table = gibbs_distribution(bm)?;
    let nh = bm.n_h();
    Ok(data
        .patterns
        .iter()
        .zip(&data.weights)
        .map(|(v, w)| {
            let lv = log_sum_exp((0..1usize << nh).map(|k| -bm.energy(v, &bits(k, nh))));
            w * (lv - table.log_partition)
        })
        .sum())
}

fn check_width(bm: &BoltzmannMachine, data: &BinaryDataset) -> Result<()> {
    if data.width() != bm.n_v() {
        return Err(Error::DimensionMismatch {
            expected: bm.n_v(),
            found: data.width(),
        });
    }
    Ok(())
}

/// `∂L/∂a`, `∂L/∂b`, `∂L/∂W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub w: DMatrix<f64>,
}

impl Gradient {
    pub fn flatten(&self) -> Vec<f64> {
        let mut p = self.a.clone();
        p.extend(&self.b);
        p.extend(self.w.transpose().iter());
        p
    }

    pub fn norm(&self) -> f64 {
        self.flatten().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Sufficient statistics `⟨v⟩`, `⟨h⟩`, `⟨v hᵀ⟩`.
struct Moments {
    v: DVector<f64>,
    h: DVector<f64>,
    vh: DMatrix<f64>,
}

impl Moments {
    fn minus(self, other: Moments) -> Gradient {
        Gradient {
            a: (self.v - other.v).iter().copied().collect(),
            b: (self.h - other.h).iter().copied().collect(),
            w: self.vh - other.vh,
        }
    }
}

/// Data moments with `h` drawn from the exact conditional
/// `P(h_j = 1 | v) = σ(b_j + Σ_i W_ij v_i)`.
fn data_moments(bm: &BoltzmannMachine, data: &BinaryDataset) -> Moments {
    let (nv, nh) = (bm.n_v(), bm.n_h());
    let mut m = Moments {
        v: DVector::zeros(nv),
        h: DVector::zeros(nh),
        vh: DMatrix::zeros(nv, nh),
    };
    for (v, &p) in data.patterns.iter().zip(&data.weights) {
        let vv = DVector::from_iterator(nv, v.iter().map(|&x| x as f64));
        let field = DVector::from_column_slice(&bm.b) + bm.w.transpose() * &vv;
        let hh = field.map(sigmoid);
        m.v += &vv * p;
        m.h += &hh * p;
        m.vh += &vv * hh.transpose() * p;
    }
    m
}

fn model_moments(bm: &BoltzmannMachine) -> Result<Moments> {
    let (nv, nh) = (bm.n_v(), bm.n_h());
    let table = gibbs_distribution(bm)?;
    let mut m = Moments {
        v: DVector::zeros(nv),
        h: DVector::zeros(nh),
        vh: DMatrix::zeros(nv, nh),
    };
    for (k, &p) in table.probabilities.iter().enumerate() {
        let v = DVector::from_iterator(nv, bits(k >> nh, nv).into_iter().map(f64::from));
        let h =
            DVector::from_iterator(nh, bits(k & ((1 << nh) - 1), nh).into_iter().map(f64::from));
        m.vh += &v * h.transpose() * p;
        m.v += v * p;
        m.h += h * p;
    }
    Ok(m)
}

pub fn exact_gradient(bm: &BoltzmannMachine, data: &BinaryDataset) -> Result<Gradient> {
    check_width(bm, data)?;
    Ok(data_moments(bm, data).minus(model_moments(bm)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldConfig {
    pub damping: f64,
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for MeanFieldConfig {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tolerance: 1e-8,
            max_sweeps: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSolution {
    pub visible: Vec<f64>,
    pub hidden: Vec<f64>,
    /// Max-norm fixed-point residual before each sweep.
    pub residuals: Vec<f64>,
}

/// Self-consistent magnetizations `μ = σ(a + Wν)`, `ν = σ(b + Wᵀμ)` by damped
/// alternating updates from `μ = ν = ½`.
pub fn mean_field(bm: &BoltzmannMachine, cfg: &MeanFieldConfig) -> Result<MeanFieldSolution> {
    mean_field_from(bm, cfg, None)
}

/// [`mean_field`] started from given magnetizations.
pub fn mean_field_from(
    bm: &BoltzmannMachine,
    cfg: &MeanFieldConfig,
    start: Option<(&[f64], &[f64])>,
) -> Result<MeanFieldSolution> {
    let (mut mu, mut nu) = match start {
        Some((v, h)) if v.len() == bm.n_v() && h.len() == bm.n_h() => {
            (DVector::from_column_slice(v), DVector::from_column_slice(h))
        }
        _ => (
            DVector::from_element(bm.n_v(), 0.5),
            DVector::from_element(bm.n_h(), 0.5),
        ),
    };
    let a = DVector::from_column_slice(&bm.a);
    let b = DVector::from_column_slice(&bm.b);
    let d = cfg.damping;
    let mut residuals = Vec::new();
    for _ in 0..cfg.max_sweeps {
        let mu_next = (&a + &bm.w * &nu).map(sigmoid);
        let r_mu = (&mu_next - &mu).amax();
        let mu_new = &mu * (1.0 - d) + mu_next * d;
        let nu_next = (&b + bm.w.transpose() * &mu_new).map(sigmoid);
        let r = r_mu.max((&nu_next - &nu).amax());
        residuals.push(r);
        if r < cfg.tolerance {
            return Ok(MeanFieldSolution {
                visible: mu.iter().copied().collect(),
                hidden: nu.iter().copied().collect(),
                residuals,
            });
        }
        mu = mu_new;
        nu = &nu * (1.0 - d) + nu_next * d;
    }
    Err(Error::MeanFieldNonConvergence {
        residual: residuals.last().copied().unwrap_or(f64::INFINITY),
    })
}

pub fn mean_field_gradient(
    bm: &BoltzmannMachine,
    data: &BinaryDataset,
    cfg: &MeanFieldConfig,
) -> Result<Gradient> {
    mean_field_gradient_from(bm, data, cfg, None).map(|(g, _)| g)
}

fn mean_field_gradient_from(
    bm: &BoltzmannMachine,
    data: &BinaryDataset,
    cfg: &MeanFieldConfig,
    start: Option<(&[f64], &[f64])>,
) -> Result<(Gradient, MeanFieldSolution)> {
    check_width(bm, data)?;
    let nodes = bm.n_v() + bm.n_h();
    if nodes > SIZE_CAP {
        return Err(Error::SizeCapExceeded {
            nodes,
            cap: SIZE_CAP,
        });
    }
    let mf = mean_field_from(bm, cfg, start)?;
    let mu = DVector::from_column_slice(&mf.visible);
    let nu = DVector::from_column_slice(&mf.hidden);
    let model = Moments {
        vh: &mu * nu.transpose(),
        v: mu,
        h: nu,
    };
    Ok((data_moments(bm, data).minus(model), mf))
}

/// Centered finite differences of [`log_likelihood`].
pub fn finite_difference_gradient(
    bm: &BoltzmannMachine,
    data: &BinaryDataset,
    step: f64,
) -> Result<Vec<f64>> {
    let base = bm.parameters();
    let mut probe = bm.clone();
    let mut out = Vec::with_capacity(base.len());
    for k in 0..base.len() {
        let mut p = base.clone();
        p[k] = base[k] + step;
        probe.set_parameters(&p);
        let up = log_likelihood(&probe, data)?;
        p[k] = base[k] - step;
        probe.set_parameters(&p);
        let down = log_likelihood(&probe, data)?;
        out.push((up - down) / (2.0 * step));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientBackend {
    Exact,
    MeanField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub backend: GradientBackend,
    pub steps: usize,
    pub learning_rate: f64,
    pub mean_field: MeanFieldConfig,
    /// Scaling factor in the recorded Gibbs-preparation cost; not derived.
    pub kappa: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            backend: GradientBackend::Exact,
            steps: 500,
            learning_rate: 0.1,
            mean_field: MeanFieldConfig::default(),
            kappa: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub bm: BoltzmannMachine,
    /// Exact log-likelihood before training and after each step.
    pub trace: Vec<f64>,
}

/// Gradient ascent on the log-likelihood.
pub fn train_bm(
    bm0: &BoltzmannMachine,
    data: &BinaryDataset,
    cfg: &TrainConfig,
    ledger: &mut ResourceLedger,
) -> Result<TrainResult> {
    check_width(bm0, data)?;
    let mut bm = bm0.clone();
    let mut trace = Vec::with_capacity(cfg.steps + 1);
    trace.push(log_likelihood(&bm, data)?);
    // Magnetizations carry over between steps as the next starting point.
    let mut warm: Option<MeanFieldSolution> = None;
    for _ in 0..cfg.steps {
        let g = match cfg.backend {
            GradientBackend::Exact => exact_gradient(&bm, data)?,
            GradientBackend::MeanField => {
                let start = warm.as_ref().map(|m| (&m.visible[..], &m.hidden[..]));
                let (g, mf) = mean_field_gradient_from(&bm, data, &cfg.mean_field, start)?;
                warm = Some(mf);
                g
            }
        };
        bm.apply(&g, cfg.learning_rate);
        trace.push(log_likelihood(&bm, data)?);
    }
    let edges = bm.n_v() * bm.n_h();
    let examples = data.patterns.len();
    ledger.charge_qubits(bm.n_v() + bm.n_h());
    if cfg.backend == GradientBackend::Exact {
        ledger.charge_state_preps((cfg.steps * examples) as u64);
    }
    ledger.note(
        "bm.gibbs_cost_per_step",
        format!(
            "N·E·√κ = {examples}·{edges}·√{} = {:.6}",
            cfg.kappa,
            examples as f64 * edges as f64 * cfg.kappa.sqrt()
        ),
    );
    Ok(TrainResult { bm, trace })
}

/// Norm-wise relative error `‖x − y‖ / ‖y‖` (absolute when `y = 0`).
pub fn relative_error(x: &[f64], y: &[f64]) -> f64 {
    let diff = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}
