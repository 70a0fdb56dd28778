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
use qmldesk_core::distance::LabeledDataset;
use qmldesk_core::grover::*;
use qmldesk_core::{RandomSource, ResourceLedger};

fn marked_set(n: usize, m: usize) -> Vec<bool> {
    (0..n).map(|i| i * 7 % n < m).collect()
}

#[test]
fn success_matches_closed_form() {
    let mut l = ResourceLedger::new();
    for n in [2usize, 4, 8, 16, 64, 256] {
        for m in [1, n / 4, n / 2].into_iter().filter(|&m| m >= 1) {
            let marked = marked_set(n, m);
            assert_eq!(marked.iter().filter(|&&b| b).count(), m);
            for j in 0..=20 {
                let state = grover_state(&marked, j, &mut l).unwrap();
                let p: f64 = state
                    .probabilities()
                    .iter()
                    .zip(&marked)
                    .filter(|(_, &b)| b)
                    .map(|(p, _)| p)
                    .sum();
                let expect = grover_success_closed_form(n, m, j);
                assert!((p - expect).abs() < 1e-10, "n={n} m={m} j={j}");
            }
        }
    }
}

#[test]
fn auto_iterations_empirical_rate() {
    let marked = marked_set(64, 1);
    let runs = 1000;
    let mut hits = 0;
    let mut l = ResourceLedger::new();
    for s in 0..runs {
        let out =
            grover_search(&marked, Iterations::Auto, &mut RandomSource::new(s), &mut l).unwrap();
        assert_eq!(out.iterations, 6);
        hits += usize::from(marked[out.index]);
    }
    let p = grover_success_closed_form(64, 1, 6);
    let sigma = (p * (1.0 - p) / runs as f64).sqrt();
    let rate = hits as f64 / runs as f64;
    assert!((rate - p).abs() <= 5.0 * sigma.max(1e-3), "{rate} vs {p}");
}

#[test]
fn min_finding_random_tables() {
    let cfg = MinFindConfig::default();
    for n in [8usize, 64, 512, 1024] {
        let mut ok = 0;
        for s in 0..50 {
            let mut rng = RandomSource::new(s);
            let vals: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            let mut t = OracleTable::new(vals).unwrap();
            let mut l = ResourceLedger::new();
            let r = durr_hoyer_minimum(&mut t, &cfg, &mut rng, &mut l).unwrap();
            assert_eq!(l.oracle_queries, r.queries);
            assert!(r.queries <= (22.5 * (n as f64).sqrt()).ceil() as u64 + 2 * 32);
            ok += usize::from(r.index == t.true_minimum().0);
        }
        assert!(ok >= 25, "n={n}: {ok}/50");
    }
}

#[test]
fn verify_mode_always_returns_minimum() {
    let cfg = MinFindConfig {
        stall_factor: 0.5,
        verify: true,
        max_retries: 1000,
        ..Default::default()
    };
    for s in 0..30 {
        let mut rng = RandomSource::new(s);
        let vals: Vec<f64> = (0..200).map(|_| rng.normal()).collect();
        let mut t = OracleTable::new(vals).unwrap();
        let mut l = ResourceLedger::new();
        let r = durr_hoyer_minimum(&mut t, &cfg, &mut rng, &mut l).unwrap();
        assert_eq!(r.index, t.true_minimum().0);
    }
}

fn blobs(rng: &mut RandomSource, sizes: &[(usize, [f64; 2], &str)]) -> LabeledDataset {
    let mut rows = Vec::new();
    for (n, center, name) in sizes {
        for _ in 0..*n {
            rows.push((
                vec![
                    center[0] + 0.3 * rng.normal(),
                    center[1] + 0.3 * rng.normal(),
                ],
                name.to_string(),
            ));
        }
    }
    LabeledDataset::new(rows).unwrap()
}

#[test]
fn knn_agrees_with_classical_on_blobs() {
    let mut rng = RandomSource::new(10);
    let ds = blobs(&mut rng, &[(10, [2.0, 2.0], "a"), (10, [-2.0, 1.0], "b")]);
    let cfg = KnnConfig {
        k: 3,
        min_find: MinFindConfig {
            verify: true,
            ..Default::default()
        },
        ..Default::default()
    };
    for s in 0..40 {
        let q = vec![4.0 * rng.uniform() - 2.0, 3.0 * rng.uniform()];
        let mut l = ResourceLedger::new();
        let r = knn_classify(&q, &ds, &cfg, &RandomSource::new(s), &mut l).unwrap();
        assert_eq!(r.class, classical_knn(&q, &ds, 3));
    }
}

#[test]
fn knn_with_k1_is_nearest_point() {
    let mut rng = RandomSource::new(11);
    let ds = blobs(
        &mut rng,
        &[
            (6, [1.0, 1.0], "x"),
            (6, [-1.0, 2.0], "y"),
            (6, [0.5, -2.0], "z"),
        ],
    );
    let cfg = KnnConfig {
        k: 1,
        min_find: MinFindConfig {
            verify: true,
            ..Default::default()
        },
        ..Default::default()
    };
    for s in 0..20 {
        let q = vec![rng.normal(), rng.normal()];
        let mut l = ResourceLedger::new();
        let r = knn_classify(&q, &ds, &cfg, &RandomSource::new(s), &mut l).unwrap();
        let nearest = (0..ds.len())
            .min_by(|&a, &b| {
                let da = qmldesk_core::distance::euclidean_distance(&q, &ds.features()[a]);
                let db = qmldesk_core::distance::euclidean_distance(&q, &ds.features()[b]);
                da.total_cmp(&db)
            })
            .unwrap();
        assert_eq!(r.class, ds.labels()[nearest]);
    }
}

#[test]
fn biased_dataset_bias_is_inherent() {
    // 18 majority points around the origin, 2 minority points inside that
    // region: a query next to the minority pair is outvoted under k = 5 by
    // both the classical and the quantum k-NN.
    let mut rng = RandomSource::new(12);
    let mut rows: Vec<(Vec<f64>, String)> = (0..18)
        .map(|_| {
            (
                vec![1.0 + 0.5 * rng.normal(), 1.0 + 0.5 * rng.normal()],
                "major".to_string(),
            )
        })
        .collect();
    rows.push((vec![1.05, 1.0], "minor".into()));
    rows.push((vec![1.0, 1.05], "minor".into()));
    let ds = LabeledDataset::new(rows).unwrap();
    let cfg = KnnConfig {
        k: 5,
        min_find: MinFindConfig {
            verify: true,
            ..Default::default()
        },
        ..Default::default()
    };
    let q = vec![1.02, 1.02];
    let mut l = ResourceLedger::new();
    let r = knn_classify(&q, &ds, &cfg, &RandomSource::new(1), &mut l).unwrap();
    assert_eq!(r.class, classical_knn(&q, &ds, 5));
    let major = ds.class_names().iter().position(|n| n == "major").unwrap();
    assert_eq!(r.class, major);
}

#[test]
fn knn_rejects_bad_k() {
    let mut rng = RandomSource::new(13);
    let ds = blobs(&mut rng, &[(2, [1.0, 1.0], "a")]);
    let mut l = ResourceLedger::new();
    let cfg = KnnConfig {
        k: 3,
        ..Default::default()
    };
    assert!(knn_classify(&[1.0, 1.0], &ds, &cfg, &RandomSource::new(0), &mut l).is_err());
}

#[test]
fn sampled_backend_runs() {
    let mut rng = RandomSource::new(14);
    let ds = blobs(&mut rng, &[(5, [3.0, 3.0], "a"), (5, [-3.0, 3.0], "b")]);
    let cfg = KnnConfig {
        k: 3,
        shots: 500,
        backend: DistanceBackend::Sampled,
        ..Default::default()
    };
    let mut l = ResourceLedger::new();
    let r = knn_classify(&[3.0, 3.2], &ds, &cfg, &RandomSource::new(2), &mut l).unwrap();
    assert_eq!(ds.class_names()[r.class], "a");
    assert!(l.shots >= 5000);
}

#[test]
fn mst_matches_kruskal_on_random_points() {
    let cfg = MinFindConfig {
        verify: true,
        ..Default::default()
    };
    for s in 0..5 {
        let mut rng = RandomSource::new(100 + s);
        let pts: Vec<Vec<f64>> = (0..32)
            .map(|_| vec![rng.uniform(), rng.uniform()])
            .collect();
        let mut l = ResourceLedger::new();
        let q = mst_cluster(&pts, 3, &cfg, &mut rng, &mut l).unwrap();
        let c = classical_mst_cluster(&pts, 3, &mut l).unwrap();
        assert_eq!(q.assignment, c.assignment);
        let wq: f64 = q.tree.iter().map(|e| e.weight).sum();
        let wc: f64 = c.tree.iter().map(|e| e.weight).sum();
        assert!((wq - wc).abs() < 1e-12);
        assert_eq!(c.queries, 32 * 31 / 2);
    }
}

#[test]
fn knn_graph_neighbors() {
    let pts: Vec<Vec<f64>> = [0.0, 1.0, 3.0, 7.0].iter().map(|&x| vec![x]).collect();
    let g = knn_graph(&pts, 2);
    assert_eq!(g[0], vec![1, 2]);
    assert_eq!(g[3], vec![2, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn table_counter_is_exact(vals in prop::collection::vec(-10.0f64..10.0, 1..40), picks in prop::collection::vec(0usize..64, 0..20)) {
        let mut t = OracleTable::new(vals).unwrap();
        let size = t.size();
        for &p in &picks {
            t.query(p % size);
        }
        prop_assert_eq!(t.queries(), picks.len() as u64);
    }

    #[test]
    fn min_finding_never_returns_padding(vals in prop::collection::vec(-10.0f64..10.0, 1..40), seed in any::<u64>()) {
        let mut t = OracleTable::new(vals.clone()).unwrap();
        let mut l = ResourceLedger::new();
        let r = durr_hoyer_minimum(&mut t, &MinFindConfig::default(), &mut RandomSource::new(seed), &mut l).unwrap();
        prop_assert!(r.index < vals.len());
        prop_assert_eq!(r.value, vals[r.index]);
    }
}
