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

//! Grover search, Dürr–Høyer minimum finding, and the k-NN and
//! minimum-spanning-tree clustering built on them.
//!
//! Oracle tables are classical lists read by a simulated phase oracle. Each
//! Grover iteration is one quantum query; reading a single entry is one
//! classical query.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::distance::{estimate_distance, ClassId, DistanceConfig, LabeledDataset};
use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::rng::RandomSource;
use crate::sim::{apply_phase_flip, reflect_about_uniform, QuantumState};

/// Values padded to a power of two with `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable {
    values: Vec<f64>,
    len: usize,
    queries: u64,
}

impl OracleTable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("oracle table is empty".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("oracle table contains NaN".into()));
        }
        let len = values.len();
        let mut values = values;
        values.resize(len.max(2).next_power_of_two(), f64::INFINITY);
        Ok(Self {
            values,
            len,
            queries: 0,
        })
    }

    /// Number of real (unpadded) entries.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Padded size.
    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Classical lookup; one query.
    pub fn query(&mut self, i: usize) -> f64 {
        self.queries += 1;
        self.values[i]
    }

    /// Marks `{i : values[i] < threshold}` for one quantum query.
    fn below(&self, threshold: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v < threshold).collect()
    }

    /// Sets an entry to `+∞` (used for exclusion).
    pub fn exclude(&mut self, i: usize) {
        self.values[i] = f64::INFINITY;
    }

    /// Uncharged linear scan, for verification only.
    pub fn true_minimum(&self) -> (usize, f64) {
        self.values[..self.len].iter().copied().enumerate().fold(
            (0, f64::INFINITY),
            |best, (i, v)| if v < best.1 { (i, v) } else { best },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Iterations {
    /// `⌊(π/4)√(N/M)⌋` with `M` the number of marked items.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroverOutcome {
    pub index: usize,
    pub iterations: usize,
    /// Probability that a measurement returns a marked item.
    pub success_probability: f64,
}

/// `sin²((2j + 1)θ)` with `θ = arcsin √(M/N)`.
pub fn grover_success_closed_form(n: usize, m: usize, j: usize) -> f64 {
    let theta = (m as f64 / n as f64).sqrt().asin();
    ((2 * j + 1) as f64 * theta).sin().powi(2)
}

/// Amplitude state after `j` Grover iterations on `marked` (length a power of
/// two).
pub fn grover_state(
    marked: &[bool],
    iterations: usize,
    ledger: &mut ResourceLedger,
) -> Result<QuantumState> {
    let n = marked.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let qubits = n.trailing_zeros() as usize;
    ledger.charge_qubits(qubits);
    let amp = crate::linalg::c(1.0 / (n as f64).sqrt());
    let mut state = QuantumState::new(vec![amp; n])?;
    ledger.charge_gates(qubits as u64);
    for _ in 0..iterations {
        apply_phase_flip(&mut state, marked, ledger)?;
        reflect_about_uniform(&mut state, ledger);
    }
    ledger.charge_queries(iterations as u64);
    Ok(state)
}

/// Runs Grover iterations and measures once.
pub fn grover_search(
    marked: &[bool],
    iterations: Iterations,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<GroverOutcome> {
    let n = marked.len();
    let m = marked.iter().filter(|&&b| b).count();
    let j = match iterations {
        Iterations::Fixed(j) => j,
        Iterations::Auto => {
            if m == 0 {
                return Err(Error::NoMarkedItems);
            }
            (PI / 4.0 * (n as f64 / m as f64).sqrt()).floor() as usize
        }
    };
    let state = grover_state(marked, j, ledger)?;
    let probs = state.probabilities();
    let success_probability = probs
        .iter()
        .zip(marked)
        .filter(|(_, &b)| b)
        .map(|(p, _)| p)
        .sum();
    let u = rng.uniform();
    let mut acc = 0.0;
    let mut index = n - 1;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            index = i;
            break;
        }
    }
    ledger.charge_shots(1);
    Ok(GroverOutcome {
        index,
        iterations: j,
        success_probability,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinFindConfig {
    /// Queries allowed: `budget_factor · √N`.
    pub budget_factor: f64,
    /// Stop after `stall_factor · √N` queries without improvement.
    pub stall_factor: f64,
    /// Growth of the iteration range in the unknown-`M` search.
    pub growth: f64,
    /// Verify against an uncharged linear scan and rerun on failure.
    pub verify: bool,
    pub max_retries: usize,
}

impl Default for MinFindConfig {
    fn default() -> Self {
        Self {
            budget_factor: 22.5,
            stall_factor: 9.0,
            growth: 1.2,
            verify: false,
            max_retries: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinFindResult {
    pub index: usize,
    pub value: f64,
    /// Queries charged, including reruns.
    pub queries: u64,
    pub budget_exhausted: bool,
    /// Every real entry has the same value.
    pub degenerate: bool,
    pub retries: usize,
}

/// Dürr–Høyer minimum finding.
///
/// Starting from a random threshold index, repeatedly searches for an entry
/// below the threshold with the exponential-schedule Grover search for an
/// unknown number of marked items: `j` is drawn uniformly from `[0, m)` and
/// `m` grows by `growth` up to `√N` after each miss. A round costs `j`
/// Grover queries plus one lookup of the measured index.
pub fn durr_hoyer_minimum(
    table: &mut OracleTable,
    cfg: &MinFindConfig,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<MinFindResult> {
    let start = table.queries;
    let mut retries = 0;
    loop {
        let mut result = durr_hoyer_once(table, cfg, rng, ledger)?;
        result.retries = retries;
        result.queries = table.queries - start;
        if !cfg.verify || retries >= cfg.max_retries {
            return Ok(result);
        }
        let (_, best) = table.true_minimum();
        if result.value <= best {
            return Ok(result);
        }
        retries += 1;
    }
}

fn durr_hoyer_once(
    table: &mut OracleTable,
    cfg: &MinFindConfig,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<MinFindResult> {
    let n = table.size();
    let sqrt_n = (table.len as f64).sqrt();
    let budget = (cfg.budget_factor * sqrt_n).ceil() as u64;
    let stall = (cfg.stall_factor * sqrt_n).ceil() as u64;
    let begin = table.queries;

    let finite: Vec<f64> = table.values[..table.len].to_vec();
    let degenerate = finite.windows(2).all(|w| w[0] == w[1]);

    let mut best = rng.below(table.len);
    let mut value = table.query(best);
    ledger.charge_queries(1);
    let mut since_improvement = 0u64;
    let mut m = 1.0f64;
    let cap = (n as f64).sqrt();
    let mut exhausted = false;
    loop {
        let used = table.queries - begin;
        if used >= budget {
            exhausted = true;
            break;
        }
        if since_improvement >= stall {
            break;
        }
        let j = rng.below(m.ceil().max(1.0) as usize);
        let marked = table.below(value);
        let outcome = grover_search(&marked, Iterations::Fixed(j), rng, ledger)?;
        table.queries += j as u64;
        let candidate = table.query(outcome.index);
        ledger.charge_queries(1);
        since_improvement += j as u64 + 1;
        if candidate < value {
            best = outcome.index;
            value = candidate;
            since_improvement = 0;
            m = 1.0;
        } else {
            m = (m * cfg.growth).min(cap);
        }
    }
    Ok(MinFindResult {
        index: best,
        value,
        queries: table.queries - begin,
        budget_exhausted: exhausted,
        degenerate,
        retries: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceBackend {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    pub shots: u64,
    pub backend: DistanceBackend,
    pub min_find: MinFindConfig,
    pub distance: DistanceConfig,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 3,
            shots: 500,
            backend: DistanceBackend::Exact,
            min_find: MinFindConfig::default(),
            distance: DistanceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnResult {
    pub class: ClassId,
    /// Training indices in the order found.
    pub neighbors: Vec<usize>,
    pub votes: Vec<usize>,
    /// Some minimum-finding call hit its budget.
    pub budget_exhausted: bool,
    /// Oracle queries spent on minimum finding.
    pub min_find_queries: u64,
}

/// Swap-test distances to every training point.
pub fn knn_distances(
    query: &[f64],
    dataset: &LabeledDataset,
    cfg: &KnnConfig,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<Vec<f64>> {
    let shots = match cfg.backend {
        DistanceBackend::Exact => 0,
        DistanceBackend::Sampled => cfg.shots,
    };
    dataset
        .features()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut stream = rng.split(i as u64);
            estimate_distance(
                query,
                std::slice::from_ref(v),
                shots,
                &mut stream,
                &cfg.distance,
                ledger,
            )
            .map(|e| e.distance)
        })
        .collect()
}

/// k successive minimum findings with exclusion, then an unweighted majority
/// vote; ties go to the lowest class id.
pub fn knn_classify(
    query: &[f64],
    dataset: &LabeledDataset,
    cfg: &KnnConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<KnnResult> {
    if dataset.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if cfg.k == 0 || cfg.k > dataset.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {} must be in 1..={}",
            cfg.k,
            dataset.len()
        )));
    }
    let mut dist_rng = rng.split(0);
    let distances = knn_distances(query, dataset, cfg, &mut dist_rng, ledger)?;
    let mut table = OracleTable::new(distances)?;
    let mut search_rng = rng.split(1);
    let mut neighbors = Vec::with_capacity(cfg.k);
    let mut budget_exhausted = false;
    for _ in 0..cfg.k {
        let r = durr_hoyer_minimum(&mut table, &cfg.min_find, &mut search_rng, ledger)?;
        budget_exhausted |= r.budget_exhausted;
        neighbors.push(r.index);
        table.exclude(r.index);
    }
    let mut votes = vec![0usize; dataset.num_classes()];
    for &i in &neighbors {
        if i < dataset.len() {
            votes[dataset.labels()[i]] += 1;
        }
    }
    let class = majority(&votes);
    Ok(KnnResult {
        class,
        neighbors,
        votes,
        budget_exhausted,
        min_find_queries: table.queries(),
    })
}

fn majority(votes: &[usize]) -> ClassId {
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    best
}

/// Exhaustive classical k-NN with the same vote and tie rules.
pub fn classical_knn(query: &[f64], dataset: &LabeledDataset, k: usize) -> ClassId {
    let mut order: Vec<(f64, usize)> = dataset
        .features()
        .iter()
        .enumerate()
        .map(|(i, v)| (crate::distance::euclidean_distance(query, v), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; dataset.num_classes()];
    for &(_, i) in order.iter().take(k) {
        votes[dataset.labels()[i]] += 1;
    }
    majority(&votes)
}

/// k nearest neighbors of every point (Euclidean, excluding itself).
pub fn knn_graph(points: &[Vec<f64>], k: usize) -> Vec<Vec<usize>> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut order: Vec<(f64, usize)> = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, q)| (crate::distance::euclidean_distance(p, q), j))
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            order.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MstClustering {
    pub tree: Vec<Edge>,
    /// Cluster id per point; ids follow the order of each cluster's lowest
    /// point index.
    pub assignment: Vec<usize>,
    pub queries: u64,
    pub budget_exhausted: bool,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

fn validate_points(points: &[Vec<f64>], k: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let d = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.len(),
        });
    }
    if k == 0 || k > points.len() {
        return Err(Error::InvalidParameter(format!(
            "cluster count {k} must be in 1..={}",
            points.len()
        )));
    }
    Ok(())
}

/// Clusters by removing the `k − 1` heaviest edges of the tree and labelling
/// connected components.
fn cut_tree(n: usize, tree: &[Edge], k: usize) -> Vec<usize> {
    let mut edges = tree.to_vec();
    edges.sort_by(|x, y| {
        x.weight
            .total_cmp(&y.weight)
            .then((x.a, x.b).cmp(&(y.a, y.b)))
    });
    edges.truncate(edges.len().saturating_sub(k - 1));
    let mut uf = UnionFind::new(n);
    for e in &edges {
        uf.union(e.a, e.b);
    }
    let mut ids = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for i in 0..n {
        let r = uf.find(i);
        if ids[r] == usize::MAX {
            ids[r] = next;
            next += 1;
        }
        out[i] = ids[r];
    }
    out
}

/// MST clustering with minimum finding on the edge oracle.
///
/// Borůvka rounds: every current component finds its lightest outgoing edge
/// with Dürr–Høyer over the `|C|(N − |C|)` cut edges, and all found edges are
/// merged. Each round at least halves the number of components, giving
/// `O(N^{3/2})` queries overall.
pub fn mst_cluster(
    points: &[Vec<f64>],
    k: usize,
    cfg: &MinFindConfig,
    rng: &mut RandomSource,
    ledger: &mut ResourceLedger,
) -> Result<MstClustering> {
    validate_points(points, k)?;
    let n = points.len();
    let dist = |a: usize, b: usize| crate::distance::euclidean_distance(&points[a], &points[b]);
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    let mut queries = 0u64;
    let mut budget_exhausted = false;
    while tree.len() + 1 < n {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = uf.find(i);
            members[r].push(i);
        }
        let mut found = Vec::new();
        for comp in members.iter().filter(|m| !m.is_empty()) {
            let root = uf.find(comp[0]);
            let mut cut = Vec::new();
            for &a in comp {
                for b in 0..n {
                    if uf.find(b) != root {
                        cut.push((a, b));
                    }
                }
            }
            let mut table = OracleTable::new(cut.iter().map(|&(a, b)| dist(a, b)).collect())?;
            let r = durr_hoyer_minimum(&mut table, cfg, rng, ledger)?;
            queries += table.queries();
            budget_exhausted |= r.budget_exhausted;
            let (a, b) = cut[r.index];
            found.push(Edge {
                a: a.min(b),
                b: a.max(b),
                weight: r.value,
            });
        }
        found.sort_by(|x, y| {
            x.weight
                .total_cmp(&y.weight)
                .then((x.a, x.b).cmp(&(y.a, y.b)))
        });
        for e in found {
            if uf.union(e.a, e.b) {
                tree.push(e);
            }
        }
    }
    ledger.note("mst.points", n);
    Ok(MstClustering {
        assignment: cut_tree(n, &tree, k),
        tree,
        queries,
        budget_exhausted,
    })
}

/// Kruskal over all `N(N − 1)/2` edges; every edge weight is one query.
pub fn classical_mst_cluster(
    points: &[Vec<f64>],
    k: usize,
    ledger: &mut ResourceLedger,
) -> Result<MstClustering> {
    validate_points(points, k)?;
    let n = points.len();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            edges.push(Edge {
                a,
                b,
                weight: crate::distance::euclidean_distance(&points[a], &points[b]),
            });
        }
    }
    let queries = edges.len() as u64;
    ledger.charge_queries(queries);
    edges.sort_by(|x, y| {
        x.weight
            .total_cmp(&y.weight)
            .then((x.a, x.b).cmp(&(y.a, y.b)))
    });
    let mut uf = UnionFind::new(n);
    let tree: Vec<Edge> = edges.into_iter().filter(|e| uf.union(e.a, e.b)).collect();
    Ok(MstClustering {
        assignment: cut_tree(n, &tree, k),
        tree,
        queries,
        budget_exhausted: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grover_small_cases() {
        let mut l = ResourceLedger::new();
        let mut rng = RandomSource::new(0);
        let out = grover_search(
            &[false, false, true, false],
            Iterations::Fixed(1),
            &mut rng,
            &mut l,
        )
        .unwrap();
        assert!((out.success_probability - 1.0).abs() < 1e-12);
        assert_eq!(out.index, 2);
        let out = grover_search(&[true, false], Iterations::Fixed(0), &mut rng, &mut l).unwrap();
        assert!((out.success_probability - 0.5).abs() < 1e-12);
        assert_eq!(l.oracle_queries, 1);
        assert_eq!(
            grover_search(&[false; 8], Iterations::Auto, &mut rng, &mut l),
            Err(Error::NoMarkedItems)
        );
    }

    #[test]
    fn table_counts_and_pads() {
        let mut t = OracleTable::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(t.size(), 4);
        assert_eq!(t.query(3), f64::INFINITY);
        t.query(0);
        assert_eq!(t.queries(), 2);
        assert_eq!(t.true_minimum(), (1, 1.0));
    }

    #[test]
    fn min_of_small_list() {
        let mut l = ResourceLedger::new();
        let cfg = MinFindConfig::default();
        for seed in 0..20 {
            let mut t = OracleTable::new(vec![5.0, 2.0, 9.0, 4.0]).unwrap();
            let r = durr_hoyer_minimum(&mut t, &cfg, &mut RandomSource::new(seed), &mut l).unwrap();
            assert_eq!(r.index, 1);
            assert!(!r.degenerate);
        }
    }

    #[test]
    fn degenerate_list_flagged() {
        let mut l = ResourceLedger::new();
        let mut t = OracleTable::new(vec![1.5; 6]).unwrap();
        let r = durr_hoyer_minimum(
            &mut t,
            &MinFindConfig::default(),
            &mut RandomSource::new(1),
            &mut l,
        )
        .unwrap();
        assert!(r.degenerate);
        assert_eq!(r.value, 1.5);
        assert!(r.index < 6);
    }

    #[test]
    fn collinear_clusters() {
        let pts: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 10.0].iter().map(|&x| vec![x]).collect();
        let mut l = ResourceLedger::new();
        let cfg = MinFindConfig {
            verify: true,
            ..Default::default()
        };
        let r = mst_cluster(&pts, 2, &cfg, &mut RandomSource::new(3), &mut l).unwrap();
        assert_eq!(r.assignment, vec![0, 0, 0, 1]);
        let all = mst_cluster(&pts, 4, &cfg, &mut RandomSource::new(3), &mut l).unwrap();
        assert_eq!(all.assignment, vec![0, 1, 2, 3]);
        assert!(mst_cluster(&pts, 5, &cfg, &mut RandomSource::new(3), &mut l).is_err());
    }
}
