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

//! Swap-test distance estimation and the classifiers built on it.
//!
//! For a query `u` and class references `v₁…vₙ` the estimator prepares
//!
//! ```text
//! |ψ⟩ = (|u⟩|0⟩ + n^{-1/2} Σⱼ |vⱼ⟩|j⟩) / √2          (data ⊗ index)
//! |φ⟩ = (‖u‖|0⟩ − n^{-1/2} Σⱼ ‖vⱼ‖|j⟩) / √Z,   Z = ‖u‖² + n⁻¹ Σⱼ ‖vⱼ‖²
//! ```
//!
//! and projects the index register of `ψ` onto `φ`. The success probability
//! is `p = ‖u − v̄‖² / 2Z` with `v̄` the mean reference, so `D = √(2pZ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::linalg::{c, ZERO};
use crate::rng::RandomSource;
use crate::sim::{gates, marginal_probabilities, measure_qubits, GateOp, QuantumState, QubitCap};

pub type ClassId = usize;

/// Real feature vectors with class labels and cached norms.
///
/// Class ids index `class_names`, which is sorted, so the lowest id is the
/// lexicographically smallest name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<ClassId>,
    norms: Vec<f64>,
    class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(rows: Vec<(Vec<f64>, String)>) -> Result<Self> {
        let mut class_names: Vec<String> = rows.iter().map(|(_, l)| l.clone()).collect();
        class_names.sort();
        class_names.dedup();
        let labels = rows
            .iter()
            .map(|(_, l)| class_names.binary_search(l).expect("label collected above"))
            .collect();
        let features = rows.into_iter().map(|(f, _)| f).collect();
        Self::from_parts(features, labels, class_names)
    }

    /// Points without labels; every point is placed in a single class `""`.
    pub fn unlabeled(features: Vec<Vec<f64>>) -> Result<Self> {
        let n = features.len();
        Self::from_parts(features, vec![0; n], vec![String::new()])
    }

    pub fn from_parts(
        features: Vec<Vec<f64>>,
        labels: Vec<ClassId>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidParameter("dataset has no points".into()));
        }
        if labels.len() != features.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                found: labels.len(),
            });
        }
        let m = features[0].len();
        if m == 0 {
            return Err(Error::InvalidParameter("feature vectors are empty".into()));
        }
        let mut norms = Vec::with_capacity(features.len());
        for (index, f) in features.iter().enumerate() {
            if f.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: f.len(),
                });
            }
            let norm = euclidean_norm(f);
            if norm == 0.0 {
                return Err(Error::ZeroVectorAt { index });
            }
            norms.push(norm);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidParameter(format!(
                "label id {bad} has no class name"
            )));
        }
        Ok(Self {
            features,
            labels,
            norms,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_members(&self, class: ClassId) -> Vec<Vec<f64>> {
        self.features
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == class)
            .map(|(f, _)| f.clone())
            .collect()
    }
}

pub fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Reference vectors per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidModel {
    pub classes: Vec<ClassReferences>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReferences {
    pub id: ClassId,
    pub name: String,
    pub vectors: Vec<Vec<f64>>,
}

impl CentroidModel {
    /// Every training point of a class becomes one of its references; the
    /// estimator then measures distance to the class mean.
    pub fn from_dataset(ds: &LabeledDataset) -> Self {
        let classes = (0..ds.num_classes())
            .map(|id| ClassReferences {
                id,
                name: ds.class_names()[id].clone(),
                vectors: ds.class_members(id),
            })
            .filter(|c| !c.vectors.is_empty())
            .collect();
        Self { classes }
    }

    /// One reference per class: its classical mean.
    pub fn from_means(ds: &LabeledDataset) -> Result<Self> {
        let mut model = Self::from_dataset(ds);
        for class in &mut model.classes {
            let n = class.vectors.len() as f64;
            let mut mean = vec![0.0; ds.dim()];
            for v in &class.vectors {
                for (m, x) in mean.iter_mut().zip(v) {
                    *m += x / n;
                }
            }
            if euclidean_norm(&mean) == 0.0 {
                return Err(Error::ZeroVector);
            }
            class.vectors = vec![mean];
        }
        Ok(model)
    }
}

/// Stop sampling once `|D_A − D_B| > z · pooled SE` or `max_shots` is spent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveStop {
    pub z: f64,
    pub max_shots: u64,
}

impl Default for AdaptiveStop {
    fn default() -> Self {
        Self {
            z: 3.0,
            max_shots: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceConfig {
    pub cap: QubitCap,
    /// Distances closer than this (relative) are a tie, resolved to the
    /// lowest class id.
    pub tie_tolerance: f64,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self {
            cap: QubitCap::default(),
            tie_tolerance: 1e-12,
        }
    }
}

/// The two registers the estimator needs, plus the normalization `Z`.
#[derive(Debug, Clone)]
pub struct ClassStates {
    pub psi: QuantumState,
    pub phi: QuantumState,
    pub z: f64,
    pub data_qubits: usize,
    pub index_qubits: usize,
}

fn register_qubits(len: usize) -> usize {
    len.max(2).next_power_of_two().trailing_zeros() as usize
}

pub fn build_class_states(
    u: &[f64],
    class_vectors: &[Vec<f64>],
    cap: QubitCap,
    ledger: &mut ResourceLedger,
) -> Result<ClassStates> {
    if class_vectors.is_empty() {
        return Err(Error::InvalidParameter(
            "class has no reference vectors".into(),
        ));
    }
    let m = u.len();
    let u_norm = euclidean_norm(u);
    if u_norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut v_norms = Vec::with_capacity(class_vectors.len());
    for (index, v) in class_vectors.iter().enumerate() {
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: v.len(),
            });
        }
        let norm = euclidean_norm(v);
        if norm == 0.0 {
            return Err(Error::ZeroVectorAt { index });
        }
        v_norms.push(norm);
    }
    let n = class_vectors.len();
    let nf = n as f64;
    let data_qubits = register_qubits(m);
    let index_qubits = register_qubits(n + 1);
    cap.check(data_qubits + index_qubits)?;
    let index_dim = 1usize << index_qubits;

    let mut psi = vec![ZERO; (1usize << data_qubits) * index_dim];
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for (i, x) in u.iter().enumerate() {
        psi[i * index_dim] = c(half * x / u_norm);
    }
    let weight = half / nf.sqrt();
    for (j, (v, norm)) in class_vectors.iter().zip(&v_norms).enumerate() {
        for (i, x) in v.iter().enumerate() {
            psi[i * index_dim + j + 1] = c(weight * x / norm);
        }
    }

    let z = u_norm * u_norm + v_norms.iter().map(|x| x * x).sum::<f64>() / nf;
    let mut phi = vec![ZERO; index_dim];
    phi[0] = c(u_norm / z.sqrt());
    for (j, norm) in v_norms.iter().enumerate() {
        phi[j + 1] = c(-norm / (z * nf).sqrt());
    }

    ledger.charge_state_prep();
    ledger.charge_state_prep();
    ledger.charge_qubits(data_qubits + index_qubits);
    Ok(ClassStates {
        psi: QuantumState::new(psi)?,
        phi: QuantumState::new(phi)?,
        z,
        data_qubits,
        index_qubits,
    })
}

impl ClassStates {
    /// Rotates the index register so that projecting onto `φ` becomes
    /// measuring `|0…0⟩` there.
    fn rotated(&self, ledger: &mut ResourceLedger) -> Result<QuantumState> {
        let phi: Vec<f64> = self.phi.amplitudes().iter().map(|a| a.re).collect();
        let targets: Vec<usize> =
            (self.data_qubits..self.data_qubits + self.index_qubits).collect();
        let gate = GateOp::new(gates::householder_to_zero(&phi), targets)?;
        let mut state = self.psi.clone();
        state.apply(&gate, ledger)?;
        Ok(state)
    }

    fn index_targets(&self) -> Vec<usize> {
        (self.data_qubits..self.data_qubits + self.index_qubits).collect()
    }

    /// Exact success probability `‖(I ⊗ ⟨φ|)ψ‖²`.
    pub fn projection_probability(&self, ledger: &mut ResourceLedger) -> Result<f64> {
        let state = self.rotated(ledger)?;
        Ok(marginal_probabilities(&state, &self.index_targets())?[0].clamp(0.0, 1.0))
    }

    /// Number of successful projections in `shots` trials.
    pub fn sample_projection(
        &self,
        shots: u64,
        rng: &mut RandomSource,
        ledger: &mut ResourceLedger,
    ) -> Result<u64> {
        let state = self.rotated(ledger)?;
        let hist = measure_qubits(&state, &self.index_targets(), rng, shots, ledger)?;
        let zero = "0".repeat(self.index_qubits);
        Ok(hist.get(&zero).copied().unwrap_or(0))
    }
}

/// A distance read off the projection probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub p_hat: f64,
    /// Zero means the exact probability was used.
    pub shots: u64,
    pub distance: f64,
    pub standard_error: f64,
    pub z: f64,
}

impl DistanceEstimate {
    /// `D = √(2pZ)`; the error is the binomial error on `p` propagated
    /// through the square root. At `p̂ = 0` the derivative diverges, so the
    /// bound `√(2Z)·√(¼/shots)` (the `p → 0` limit) is used instead.
    pub fn from_probability(p_hat: f64, shots: u64, z: f64) -> Self {
        let distance = (2.0 * p_hat * z).sqrt();
        let standard_error = if shots == 0 {
            0.0
        } else if p_hat > 0.0 {
            (2.0 * z).sqrt() * (p_hat * (1.0 - p_hat) / shots as f64).sqrt() / (2.0 * p_hat.sqrt())
        } else {
            (2.0 * z).sqrt() * (0.25 / shots as f64).sqrt()
        };
        Self {
            p_hat,
            shots,
            distance,
            standard_error,
            z,
        }
    }

    fn from_counts(successes: u64, shots: u64, z: f64) -> Self {
        Self::from_probability(successes as f64 / shots as f64, shots, z)
    }
}

/// Distance from `u` to the mean of `class_vectors`. `shots == 0` uses the
/// exact projection probability.
pub fn estimate_distance(
    u: &[f64],
    class_vectors: &[Vec<f64>],
    shots: u64,
    rng: &mut RandomSource,
    cfg: &DistanceConfig,
    ledger: &mut ResourceLedger,
) -> Result<DistanceEstimate> {
    let states = build_class_states(u, class_vectors, cfg.cap, ledger)?;
    if shots == 0 {
        let p = states.projection_probability(ledger)?;
        Ok(DistanceEstimate::from_probability(p, 0, states.z))
    } else {
        let hits = states.sample_projection(shots, rng, ledger)?;
        Ok(DistanceEstimate::from_counts(hits, shots, states.z))
    }
}

fn argmin_with_ties(distances: &[f64], tol: f64) -> usize {
    let mut best = 0;
    for (i, &d) in distances.iter().enumerate().skip(1) {
        let scale = d.abs().max(distances[best].abs()).max(f64::MIN_POSITIVE);
        if d < distances[best] && (distances[best] - d) / scale > tol {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidDecision {
    pub class: ClassId,
    pub estimates: Vec<(ClassId, DistanceEstimate)>,
}

/// Assigns `u` to the class with the smallest estimated distance. Each class
/// draws from its own stream split off `rng`.
pub fn nearest_centroid_classify(
    u: &[f64],
    model: &CentroidModel,
    shots: u64,
    rng: &RandomSource,
    cfg: &DistanceConfig,
    ledger: &mut ResourceLedger,
) -> Result<CentroidDecision> {
    if model.classes.len() < 2 {
        return Err(Error::InvalidParameter("need at least two classes".into()));
    }
    let mut classes: Vec<&ClassReferences> = model.classes.iter().collect();
    classes.sort_by_key(|c| c.id);
    let mut estimates = Vec::with_capacity(classes.len());
    for class in classes {
        let mut stream = rng.split(class.id as u64);
        let est = estimate_distance(u, &class.vectors, shots, &mut stream, cfg, ledger)?;
        estimates.push((class.id, est));
    }
    let distances: Vec<f64> = estimates.iter().map(|(_, e)| e.distance).collect();
    let class = estimates[argmin_with_ties(&distances, cfg.tie_tolerance)].0;
    Ok(CentroidDecision { class, estimates })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinaryLabel {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryDecision {
    pub label: BinaryLabel,
    pub a: DistanceEstimate,
    pub b: DistanceEstimate,
    pub pooled_standard_error: f64,
}

impl BinaryDecision {
    fn new(a: DistanceEstimate, b: DistanceEstimate, tol: f64) -> Self {
        let label = if argmin_with_ties(&[a.distance, b.distance], tol) == 0 {
            BinaryLabel::A
        } else {
            BinaryLabel::B
        };
        Self {
            label,
            a,
            b,
            pooled_standard_error: (a.standard_error.powi(2) + b.standard_error.powi(2)).sqrt(),
        }
    }

    pub fn gap(&self) -> f64 {
        (self.a.distance - self.b.distance).abs()
    }

    /// Whether the gap exceeds `z` pooled standard errors.
    pub fn is_confident(&self, z: f64) -> bool {
        self.gap() > z * self.pooled_standard_error
    }
}

fn pad_to(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(len, 0.0);
    out
}

fn binary_inputs(u: &[f64], v_a: &[f64], v_b: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if v_a.len() != u.len() || v_b.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: if v_a.len() != u.len() {
                v_a.len()
            } else {
                v_b.len()
            },
        });
    }
    // The photonic reference setup works with 8-dimensional vectors.
    let len = u.len().max(8).next_power_of_two();
    Ok((pad_to(u, len), pad_to(v_a, len), pad_to(v_b, len)))
}

/// Two-class decision: `A` iff `D_A − D_B < 0`, ties to `A`.
pub fn binary_classify(
    u: &[f64],
    v_a: &[f64],
    v_b: &[f64],
    shots: u64,
    rng: &RandomSource,
    cfg: &DistanceConfig,
    ledger: &mut ResourceLedger,
) -> Result<BinaryDecision> {
    let (u, v_a, v_b) = binary_inputs(u, v_a, v_b)?;
    let a = estimate_distance(&u, &[v_a], shots, &mut rng.split(0), cfg, ledger)?;
    let b = estimate_distance(&u, &[v_b], shots, &mut rng.split(1), cfg, ledger)?;
    Ok(BinaryDecision::new(a, b, cfg.tie_tolerance))
}

/// Samples both distances in batches of `batch_shots` until the decision is
/// confident at `stop.z` or `stop.max_shots` per class is reached.
pub fn binary_classify_adaptive(
    u: &[f64],
    v_a: &[f64],
    v_b: &[f64],
    batch_shots: u64,
    stop: AdaptiveStop,
    rng: &RandomSource,
    cfg: &DistanceConfig,
    ledger: &mut ResourceLedger,
) -> Result<BinaryDecision> {
    if batch_shots == 0 {
        return Err(Error::ZeroShots);
    }
    let (u, v_a, v_b) = binary_inputs(u, v_a, v_b)?;
    let states_a = build_class_states(&u, &[v_a], cfg.cap, ledger)?;
    let states_b = build_class_states(&u, &[v_b], cfg.cap, ledger)?;
    let (mut rng_a, mut rng_b) = (rng.split(0), rng.split(1));
    let (mut hits_a, mut hits_b, mut shots) = (0u64, 0u64, 0u64);
    loop {
        hits_a += states_a.sample_projection(batch_shots, &mut rng_a, ledger)?;
        hits_b += states_b.sample_projection(batch_shots, &mut rng_b, ledger)?;
        shots += batch_shots;
        let decision = BinaryDecision::new(
            DistanceEstimate::from_counts(hits_a, shots, states_a.z),
            DistanceEstimate::from_counts(hits_b, shots, states_b.z),
            cfg.tie_tolerance,
        );
        if decision.is_confident(stop.z) || shots + batch_shots > stop.max_shots {
            return Ok(decision);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> DistanceConfig {
        DistanceConfig::default()
    }

    fn exact(u: &[f64], vs: &[Vec<f64>]) -> DistanceEstimate {
        let mut l = ResourceLedger::new();
        estimate_distance(u, vs, 0, &mut RandomSource::new(0), &cfg(), &mut l).unwrap()
    }

    #[test]
    fn single_identical_reference() {
        let mut l = ResourceLedger::new();
        let s = build_class_states(&[1.0, 0.0], &[vec![1.0, 0.0]], QubitCap::default(), &mut l)
            .unwrap();
        assert!((s.z - 2.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let phi: Vec<f64> = s.phi.amplitudes().iter().map(|a| a.re).collect();
        assert!((phi[0] - r).abs() < 1e-15 && (phi[1] + r).abs() < 1e-15);
        let e = exact(&[1.0, 0.0], &[vec![1.0, 0.0]]);
        assert!(e.p_hat.abs() < 1e-15 && e.distance < 1e-7);
    }

    #[test]
    fn phi_for_unequal_norms() {
        let mut l = ResourceLedger::new();
        let s = build_class_states(&[1.0, 0.0], &[vec![0.0, 2.0]], QubitCap::default(), &mut l)
            .unwrap();
        assert!((s.z - 5.0).abs() < 1e-15);
        let phi = s.phi.amplitudes();
        assert!((phi[0].re - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((phi[1].re + 2.0 / 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn z_for_two_references() {
        let mut l = ResourceLedger::new();
        let s = build_class_states(
            &[1.0, 1.0],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            QubitCap::default(),
            &mut l,
        )
        .unwrap();
        // independently evaluated: 2 + (1 + 1)/2
        assert!((s.z - 3.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_pair() {
        let e = exact(&[1.0, 0.0], &[vec![0.0, 1.0]]);
        assert!((e.z - 2.0).abs() < 1e-15);
        assert!((e.p_hat - 0.5).abs() < 1e-12);
        assert!((e.distance - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_and_mismatch_errors() {
        let mut l = ResourceLedger::new();
        let cap = QubitCap::default();
        assert_eq!(
            build_class_states(&[0.0, 0.0], &[vec![1.0, 0.0]], cap, &mut l).err(),
            Some(Error::ZeroVector)
        );
        assert_eq!(
            build_class_states(&[1.0, 0.0], &[vec![1.0, 0.0], vec![0.0, 0.0]], cap, &mut l).err(),
            Some(Error::ZeroVectorAt { index: 1 })
        );
        assert!(matches!(
            build_class_states(&[1.0, 0.0], &[vec![1.0, 0.0, 0.0]], cap, &mut l),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn standard_error_at_zero_uses_bound() {
        let e = DistanceEstimate::from_probability(0.0, 100, 2.0);
        assert!((e.standard_error - 2.0 * 0.05).abs() < 1e-15);
        let e = DistanceEstimate::from_probability(0.25, 100, 2.0);
        let expect = 2.0 * (0.25f64 * 0.75 / 100.0).sqrt() / (2.0 * 0.5);
        assert!((e.standard_error - expect).abs() < 1e-15);
        assert_eq!(
            DistanceEstimate::from_probability(0.25, 0, 2.0).standard_error,
            0.0
        );
    }

    fn model(classes: &[&[Vec<f64>]]) -> CentroidModel {
        CentroidModel {
            classes: classes
                .iter()
                .enumerate()
                .map(|(id, v)| ClassReferences {
                    id,
                    name: format!("{id}"),
                    vectors: v.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn nearest_centroid_examples() {
        let mut l = ResourceLedger::new();
        let rng = RandomSource::new(1);
        let m = model(&[&[vec![1.0, 0.0]], &[vec![0.0, 1.0]]]);
        let d = nearest_centroid_classify(&[1.0, 0.0], &m, 0, &rng, &cfg(), &mut l).unwrap();
        assert_eq!(d.class, 0);
        let d = nearest_centroid_classify(&[0.6, 0.8], &m, 0, &rng, &cfg(), &mut l).unwrap();
        assert_eq!(d.class, 1);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let d = nearest_centroid_classify(&[r, r], &m, 0, &rng, &cfg(), &mut l).unwrap();
        assert_eq!(d.class, 0);
        assert!(nearest_centroid_classify(
            &[1.0, 0.0],
            &model(&[&[vec![1.0, 0.0]]]),
            0,
            &rng,
            &cfg(),
            &mut l
        )
        .is_err());
    }

    #[test]
    fn binary_examples() {
        let mut l = ResourceLedger::new();
        let rng = RandomSource::new(2);
        let d = binary_classify(
            &[1.0, 2.0],
            &[1.0, 2.0],
            &[0.0, 1.0],
            0,
            &rng,
            &cfg(),
            &mut l,
        )
        .unwrap();
        assert_eq!(d.label, BinaryLabel::A);
        assert!(d.a.distance < 1e-7);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let d =
            binary_classify(&[r, r], &[1.0, 0.0], &[0.0, 1.0], 0, &rng, &cfg(), &mut l).unwrap();
        assert!((d.a.distance - d.b.distance).abs() < 1e-12);
        assert_eq!(d.label, BinaryLabel::A);
    }

    #[test]
    fn adaptive_stops_early_on_clear_cases() {
        let mut l = ResourceLedger::new();
        let d = binary_classify_adaptive(
            &[1.0, 0.0],
            &[1.0, 0.1],
            &[-1.0, 0.0],
            100,
            AdaptiveStop::default(),
            &RandomSource::new(3),
            &cfg(),
            &mut l,
        )
        .unwrap();
        assert_eq!(d.label, BinaryLabel::A);
        assert_eq!(d.a.shots, 100);
    }

    #[test]
    fn dataset_validation() {
        let ds = LabeledDataset::new(vec![
            (vec![1.0, 0.0], "B".into()),
            (vec![0.0, 1.0], "A".into()),
        ])
        .unwrap();
        assert_eq!(ds.class_names(), &["A".to_string(), "B".to_string()]);
        assert_eq!(ds.labels(), &[1, 0]);
        assert_eq!(
            LabeledDataset::new(vec![(vec![0.0, 0.0], "A".into())]),
            Err(Error::ZeroVectorAt { index: 0 })
        );
    }
}
