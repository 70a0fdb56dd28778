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

//! Scaling sweeps and power-law fits of ledgered resource counts.

use std::time::Instant;

use qmldesk_core::distance::{build_class_states, LabeledDataset};
use qmldesk_core::grover::{
    classical_mst_cluster, durr_hoyer_minimum, knn_classify, mst_cluster, KnnConfig, MinFindConfig,
    OracleTable,
};
use qmldesk_core::sim::QubitCap;
use qmldesk_core::{RandomSource, ResourceLedger};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, CliResult};
use crate::report::{RunReport, Table};
use crate::run::{finish, Output};

/// Minimum number of runs a fit accepts.
pub const MIN_RUNS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// `ln` of the prefactor.
    pub intercept: f64,
    /// 95% confidence interval on the exponent.
    pub ci_low: f64,
    pub ci_high: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares fit of `ln y = intercept + exponent · ln x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> CliResult<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(CliError::InvalidArgument(
            "size and count lists differ in length".into(),
        ));
    }
    if xs.len() < MIN_RUNS {
        return Err(CliError::InsufficientRuns {
            found: xs.len(),
            required: MIN_RUNS,
        });
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(CliError::InvalidArgument(
            "power-law fit needs positive values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(CliError::InvalidArgument("sizes do not vary".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let se = (ss_res / (n - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 2.0)
        .expect("at least two degrees of freedom")
        .inverse_cdf(0.975);
    Ok(PowerLawFit {
        exponent,
        intercept,
        ci_low: exponent - t * se,
        ci_high: exponent + t * se,
        r_squared,
        points: xs.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub algorithm: String,
    pub counter: String,
    pub fit: PowerLawFit,
    /// Exponent of the asymptotic query or shot bound, when one applies.
    pub reference_exponent: Option<f64>,
}

pub fn reference_exponent(algorithm: &str) -> Option<f64> {
    match algorithm {
        "mst-cluster" => Some(1.5),
        "mst-classical" => Some(2.0),
        "knn" | "min-find" => Some(0.5),
        _ => None,
    }
}

/// Fits ledgered counts against `result[size_key]`, one row per algorithm.
///
/// Oracle queries are used when a run records any, shots otherwise.
pub fn ledger_report(runs: &[RunReport], size_key: &str) -> CliResult<Vec<ExponentRow>> {
    let mut algorithms: Vec<&str> = runs.iter().map(|r| r.config.algorithm.as_str()).collect();
    algorithms.sort_unstable();
    algorithms.dedup();
    if algorithms.is_empty() {
        return Err(CliError::InsufficientRuns {
            found: 0,
            required: MIN_RUNS,
        });
    }
    algorithms
        .into_iter()
        .map(|alg| {
            let group: Vec<&RunReport> = runs
                .iter()
                .filter(|r| r.config.algorithm == alg && r.is_ok())
                .collect();
            let use_queries = group.iter().any(|r| r.ledger.oracle_queries > 0);
            let mut xs = Vec::with_capacity(group.len());
            let mut ys = Vec::with_capacity(group.len());
            for r in &group {
                let size = r
                    .result
                    .as_ref()
                    .and_then(|v| v.get(size_key))
                    .and_then(Value::as_f64)
                    .ok_or_else(|| {
                        CliError::InvalidArgument(format!("run has no numeric `{size_key}`"))
                    })?;
                xs.push(size);
                ys.push(if use_queries {
                    r.ledger.oracle_queries
                } else {
                    r.ledger.shots
                } as f64);
            }
            Ok(ExponentRow {
                algorithm: alg.to_string(),
                counter: if use_queries {
                    "oracle_queries"
                } else {
                    "shots"
                }
                .into(),
                fit: fit_power_law(&xs, &ys)?,
                reference_exponent: reference_exponent(alg),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotNoisePoint {
    pub shots: u64,
    pub mean_p_hat: f64,
    pub std_p_hat: f64,
    /// `√(p(1 − p)/shots)` at the exact projection probability.
    pub binomial_std: f64,
}

/// Spread of the projection estimate across repetitions at each shot count.
///
/// One fixed 8-dimensional instance; grid point `i` draws from stream `i`.
pub fn shot_noise_sweep(
    shots: &[u64],
    repetitions: usize,
    seed: u64,
    ledger: &mut ResourceLedger,
) -> CliResult<Vec<ShotNoisePoint>> {
    if repetitions < 2 {
        return Err(CliError::InvalidArgument(
            "need at least two repetitions".into(),
        ));
    }
    let root = RandomSource::new(seed);
    let mut inst = root.split(u64::MAX);
    let u: Vec<f64> = (0..8).map(|_| inst.normal()).collect();
    let v: Vec<f64> = (0..8).map(|_| inst.normal()).collect();
    let states = build_class_states(&u, &[v], QubitCap::from_env(), ledger)?;
    let p = states.projection_probability(ledger)?;
    let points: Vec<CliResult<(ShotNoisePoint, ResourceLedger)>> = shots
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut rng = root.split(i as u64);
            let mut local = ResourceLedger::new();
            let estimates = (0..repetitions)
                .map(|_| Ok(states.sample_projection(s, &mut rng, &mut local)? as f64 / s as f64))
                .collect::<CliResult<Vec<f64>>>()?;
            let n = repetitions as f64;
            let mean = estimates.iter().sum::<f64>() / n;
            let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Ok((
                ShotNoisePoint {
                    shots: s,
                    mean_p_hat: mean,
                    std_p_hat: var.sqrt(),
                    binomial_std: (p * (1.0 - p) / s as f64).sqrt(),
                },
                local,
            ))
        })
        .collect();
    let mut out = Vec::with_capacity(points.len());
    for r in points {
        let (point, local) = r?;
        ledger.absorb(&local);
        out.push(point);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scaling {
    /// Grover MST clustering and the Kruskal baseline on uniform 2-d points.
    Mst,
    /// k-NN with exact distances on two Gaussian blobs.
    Knn,
    /// Minimum finding on a random table.
    MinFind,
}

impl Scaling {
    fn algorithms(self) -> &'static [&'static str] {
        match self {
            Scaling::Mst => &["mst-cluster", "mst-classical"],
            Scaling::Knn => &["knn"],
            Scaling::MinFind => &["min-find"],
        }
    }
}

/// Points around `classes` centres, labeled `c0`, `c1`, ...
pub fn gaussian_blobs(
    n: usize,
    dim: usize,
    classes: usize,
    spread: f64,
    rng: &mut RandomSource,
) -> Vec<(Vec<f64>, String)> {
    (0..n)
        .map(|i| {
            let c = i % classes;
            let p = (0..dim)
                .map(|j| 1.0 + if j == c % dim { 3.0 } else { 0.0 } + spread * rng.normal())
                .collect();
            (p, format!("c{c}"))
        })
        .collect()
}

fn scaling_run(alg: &str, n: usize, seed: u64, rng: &mut RandomSource) -> RunReport {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(alg, seed);
    cfg.params = Params {
        sizes: Some(vec![n as u64]),
        ..Params::default()
    };
    let mut ledger = ResourceLedger::new();
    let outcome = (|| -> CliResult<Output> {
        let queries = match alg {
            "mst-cluster" | "mst-classical" => {
                let points: Vec<Vec<f64>> =
                    (0..n).map(|_| vec![rng.uniform(), rng.uniform()]).collect();
                if alg == "mst-cluster" {
                    mst_cluster(&points, 2, &MinFindConfig::default(), rng, &mut ledger)?.queries
                } else {
                    classical_mst_cluster(&points, 2, &mut ledger)?;
                    ledger.oracle_queries
                }
            }
            "knn" => {
                let ds = LabeledDataset::new(gaussian_blobs(n, 4, 2, 0.7, rng))?;
                let q = gaussian_blobs(1, 4, 2, 0.7, rng).remove(0).0;
                let kcfg = KnnConfig {
                    shots: 0,
                    ..Default::default()
                };
                knn_classify(&q, &ds, &kcfg, &rng.split(0), &mut ledger)?.min_find_queries
            }
            "min-find" => {
                let mut table = OracleTable::new((0..n).map(|_| rng.uniform()).collect())?;
                durr_hoyer_minimum(&mut table, &MinFindConfig::default(), rng, &mut ledger)?;
                table.queries()
            }
            other => return Err(CliError::UnknownAlgorithm(other.to_string())),
        };
        Ok(Output {
            result: json!({"n": n, "queries": queries}),
            table: Table::new(&[]),
        })
    })();
    finish(&cfg, outcome, ledger, start)
}

/// One run per (algorithm, size, repetition); run `i` draws from stream `i`.
pub fn scaling_runs(
    kind: Scaling,
    sizes: &[usize],
    repetitions: usize,
    seed: u64,
) -> Vec<RunReport> {
    let root = RandomSource::new(seed);
    let jobs: Vec<(&str, usize)> = kind
        .algorithms()
        .iter()
        .flat_map(|&a| {
            sizes
                .iter()
                .flat_map(move |&n| (0..repetitions).map(move |_| (a, n)))
        })
        .collect();
    jobs.par_iter()
        .enumerate()
        .map(|(i, &(alg, n))| scaling_run(alg, n, seed, &mut root.split(i as u64)))
        .collect()
}

fn sizes_or(cfg: &ExperimentConfig, default: &[u64]) -> Vec<u64> {
    cfg.params.sizes.clone().unwrap_or_else(|| default.to_vec())
}

fn fit_json(rows: &[ExponentRow]) -> Value {
    serde_json::to_value(rows).expect("fits serialize")
}

pub(crate) fn run_bench(cfg: &ExperimentConfig, ledger: &mut ResourceLedger) -> CliResult<Output> {
    let experiment = cfg.params.experiment.as_deref().unwrap_or("shot-noise");
    let reps = cfg.params.repetitions;
    match experiment {
        "shot-noise" => {
            let shots = sizes_or(cfg, &[100, 1_000, 10_000, 100_000]);
            if shots.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::InvalidArgument("shot grid must increase".into()));
            }
            let points = shot_noise_sweep(&shots, reps.unwrap_or(200), cfg.seed, ledger)?;
            let mut table = Table::new(&["shots", "mean_p_hat", "std_p_hat", "binomial_std"]);
            for p in &points {
                table.push(vec![
                    json!(p.shots),
                    json!(p.mean_p_hat),
                    json!(p.std_p_hat),
                    json!(p.binomial_std),
                ]);
            }
            let xs: Vec<f64> = points.iter().map(|p| p.shots as f64).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.std_p_hat).collect();
            let fit = fit_power_law(&xs, &ys)?;
            Ok(Output {
                result: json!({"experiment": experiment, "points": points, "std_vs_shots": fit}),
                table,
            })
        }
        "mst-scaling" | "knn-scaling" | "min-find-scaling" => {
            let (kind, default): (Scaling, &[u64]) = match experiment {
                "mst-scaling" => (Scaling::Mst, &[8, 16, 32, 64, 128]),
                "knn-scaling" => (Scaling::Knn, &[16, 32, 64, 128, 256]),
                _ => (Scaling::MinFind, &[16, 64, 256, 1024, 4096]),
            };
            let sizes: Vec<usize> = sizes_or(cfg, default).iter().map(|&n| n as usize).collect();
            let runs = scaling_runs(kind, &sizes, reps.unwrap_or(5), cfg.seed);
            let mut table = Table::new(&["algorithm", "n", "queries"]);
            for r in &runs {
                if let Some(err) = &r.error {
                    return Err(CliError::InvalidArgument(format!(
                        "{} run failed: {}",
                        r.config.algorithm, err.message
                    )));
                }
                ledger.absorb(&r.ledger);
                let res = r.result.as_ref().expect("successful runs carry results");
                table.push(vec![
                    json!(r.config.algorithm),
                    res["n"].clone(),
                    res["queries"].clone(),
                ]);
            }
            let rows = ledger_report(&runs, "n")?;
            Ok(Output {
                result: json!({"experiment": experiment, "fits": fit_json(&rows)}),
                table,
            })
        }
        other => Err(CliError::InvalidArgument(format!(
            "unknown experiment `{other}`"
        ))),
    }
}
