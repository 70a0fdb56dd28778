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

//! Dispatch from an [`ExperimentConfig`] to the algorithm it names.

use std::time::Instant;

use qmldesk_core::boltzmann::{train_bm, BoltzmannMachine, GradientBackend, TrainConfig};
use qmldesk_core::distance::{
    binary_classify, euclidean_distance, nearest_centroid_classify, BinaryLabel, CentroidModel,
    DistanceConfig, LabeledDataset,
};
use qmldesk_core::grover::{
    classical_knn, classical_mst_cluster, knn_classify, mst_cluster, DistanceBackend, KnnConfig,
    MinFindConfig,
};
use qmldesk_core::hhl::{
    hermitian_embed, hhl_solve, vector_fidelity, HHLParams, HhlMode, LinearSystem,
};
use qmldesk_core::perceptron::{
    bits, classical_label, classify, exhaustive_binary_solutions, train_weights, ActivationRule,
    PerceptronConfig, PerceptronTrainingSet, TrainingMode,
};
use qmldesk_core::qpca::{
    covariance_density, qpca_extract, ExponentiationPlan, PrincipalDecomposition, QpcaOptions,
};
use qmldesk_core::sim::QubitCap;
use qmldesk_core::{RandomSource, ResourceLedger};
use serde_json::{json, Value};

use crate::bench;
use crate::config::ExperimentConfig;
use crate::dataset::{load_csv, CsvTable};
use crate::error::{lift, CliError, CliResult};
use crate::report::{round_value, RunReport, RunStatus, Table};

pub const ALGORITHMS: [&str; 9] = [
    "classify",
    "binary-classify",
    "knn",
    "mst-cluster",
    "hhl-solve",
    "train-perceptron",
    "qpca",
    "train-bm",
    "bench",
];

/// Confidence multiplier applied to pooled standard errors.
const CONFIDENCE_Z: f64 = 3.0;

pub(crate) struct Output {
    pub result: Value,
    pub table: Table,
}

/// Runs the configured algorithm. Failures are captured in the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> RunReport {
    let start = Instant::now();
    let rng = RandomSource::new(cfg.seed);
    let mut ledger = ResourceLedger::new();
    let outcome = dispatch(cfg, &rng, &mut ledger);
    finish(cfg, outcome, ledger, start)
}

pub(crate) fn finish(
    cfg: &ExperimentConfig,
    outcome: CliResult<Output>,
    ledger: ResourceLedger,
    start: Instant,
) -> RunReport {
    let (status, result, table, error) = match outcome {
        Ok(out) => (
            RunStatus::Ok,
            Some(round_value(out.result)),
            Some(round_table(out.table)),
            None,
        ),
        Err(e) => (RunStatus::Error, None, None, Some(e.report())),
    };
    RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        status,
        result,
        table,
        error,
        ledger,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    }
}

fn round_table(mut t: Table) -> Table {
    for row in &mut t.rows {
        for cell in row.iter_mut() {
            *cell = round_value(std::mem::take(cell));
        }
    }
    t
}

fn dispatch(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    match cfg.algorithm.as_str() {
        "classify" => run_classify(cfg, rng, ledger),
        "binary-classify" => run_binary(cfg, rng, ledger),
        "knn" => run_knn(cfg, rng, ledger),
        "mst-cluster" => run_mst(cfg, rng, ledger),
        "hhl-solve" => run_hhl(cfg, rng, ledger),
        "train-perceptron" => run_perceptron(cfg, rng, ledger),
        "qpca" => run_qpca(cfg, rng, ledger),
        "train-bm" => run_bm(cfg, rng, ledger),
        "bench" => bench::run_bench(cfg, ledger),
        other => Err(CliError::UnknownAlgorithm(other.to_string())),
    }
}

fn dataset(cfg: &ExperimentConfig) -> CliResult<CsvTable> {
    let path = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| CliError::InvalidArgument(format!("{} needs --dataset", cfg.algorithm)))?;
    load_csv(path)
}

fn query(cfg: &ExperimentConfig, dim: usize) -> CliResult<Vec<f64>> {
    let q = cfg
        .params
        .query
        .clone()
        .ok_or_else(|| CliError::InvalidArgument("missing --query".into()))?;
    if q.len() != dim {
        return Err(CliError::InvalidArgument(format!(
            "query has {} features, dataset has {dim}",
            q.len()
        )));
    }
    Ok(q)
}

fn distance_config() -> DistanceConfig {
    DistanceConfig {
        cap: QubitCap::from_env(),
        ..Default::default()
    }
}

fn class_means(ds: &LabeledDataset) -> Vec<Vec<f64>> {
    (0..ds.num_classes())
        .map(|id| {
            let members = ds.class_members(id);
            let n = members.len() as f64;
            (0..ds.dim())
                .map(|j| members.iter().map(|v| v[j]).sum::<f64>() / n)
                .collect()
        })
        .collect()
}

fn argmin(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x < xs[best] { i } else { best })
}

fn run_classify(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    let ds = dataset(cfg)?.labeled()?;
    let u = query(cfg, ds.dim())?;
    let model = CentroidModel::from_dataset(&ds);
    let decision =
        nearest_centroid_classify(&u, &model, cfg.shots, rng, &distance_config(), ledger)?;
    let exact: Vec<f64> = class_means(&ds)
        .iter()
        .map(|m| euclidean_distance(&u, m))
        .collect();
    let names = ds.class_names();
    let mut table = Table::new(&["class", "distance", "standard_error", "exact_distance"]);
    let estimates: Vec<Value> = decision
        .estimates
        .iter()
        .map(|(id, e)| {
            table.push(vec![
                json!(names[*id]),
                json!(e.distance),
                json!(e.standard_error),
                json!(exact[*id]),
            ]);
            json!({
                "class": names[*id],
                "distance": e.distance,
                "p_hat": e.p_hat,
                "standard_error": e.standard_error,
                "shots": e.shots,
                "normalization": e.z,
            })
        })
        .collect();
    Ok(Output {
        result: json!({
            "class": names[decision.class],
            "estimates": estimates,
            "classical_class": names[argmin(&exact)],
            "classical_distances": exact,
        }),
        table,
    })
}

fn run_binary(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    let ds = dataset(cfg)?.labeled()?;
    if ds.num_classes() != 2 {
        return Err(CliError::InvalidArgument(format!(
            "binary classification needs exactly two classes, found {}",
            ds.num_classes()
        )));
    }
    let u = query(cfg, ds.dim())?;
    let means = class_means(&ds);
    let d = binary_classify(
        &u,
        &means[0],
        &means[1],
        cfg.shots,
        rng,
        &distance_config(),
        ledger,
    )
    .map_err(lift)?;
    let names = ds.class_names();
    let label = match d.label {
        BinaryLabel::A => &names[0],
        BinaryLabel::B => &names[1],
    };
    let exact = [
        euclidean_distance(&u, &means[0]),
        euclidean_distance(&u, &means[1]),
    ];
    let mut table = Table::new(&["class", "distance", "standard_error", "exact_distance"]);
    for (i, e) in [d.a, d.b].iter().enumerate() {
        table.push(vec![
            json!(names[i]),
            json!(e.distance),
            json!(e.standard_error),
            json!(exact[i]),
        ]);
    }
    Ok(Output {
        result: json!({
            "class": label,
            "distance_a": d.a.distance,
            "distance_b": d.b.distance,
            "gap": d.gap(),
            "pooled_standard_error": d.pooled_standard_error,
            "confident": d.is_confident(CONFIDENCE_Z),
            "classical_class": names[argmin(&exact)],
        }),
        table,
    })
}

fn run_knn(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    let ds = dataset(cfg)?.labeled()?;
    let u = query(cfg, ds.dim())?;
    let kcfg = KnnConfig {
        k: cfg.params.k.unwrap_or(3),
        shots: cfg.shots,
        backend: if cfg.shots > 0 {
            DistanceBackend::Sampled
        } else {
            DistanceBackend::Exact
        },
        distance: distance_config(),
        ..Default::default()
    };
    let r = knn_classify(&u, &ds, &kcfg, rng, ledger)?;
    let names = ds.class_names();
    let mut table = Table::new(&["rank", "index", "class", "distance"]);
    for (rank, &i) in r.neighbors.iter().enumerate() {
        table.push(vec![
            json!(rank),
            json!(i),
            json!(names[ds.labels()[i]]),
            json!(euclidean_distance(&u, &ds.features()[i])),
        ]);
    }
    Ok(Output {
        result: json!({
            "class": names[r.class],
            "neighbors": r.neighbors,
            "votes": r.votes,
            "min_find_queries": r.min_find_queries,
            "budget_exhausted": r.budget_exhausted,
            "classical_class": names[classical_knn(&u, &ds, kcfg.k)],
        }),
        table,
    })
}

fn run_mst(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    let points = dataset(cfg)?.points()?;
    let k = cfg.params.k.unwrap_or(2);
    let q = mst_cluster(
        &points,
        k,
        &MinFindConfig::default(),
        &mut rng.split(0),
        ledger,
    )?;
    let mut classical_ledger = ResourceLedger::new();
    let c = classical_mst_cluster(&points, k, &mut classical_ledger)?;
    let mut table = Table::new(&["point", "cluster", "classical_cluster"]);
    for (i, (a, b)) in q.assignment.iter().zip(&c.assignment).enumerate() {
        table.push(vec![json!(i), json!(a), json!(b)]);
    }
    let tree: Vec<Value> = q
        .tree
        .iter()
        .map(|e| json!({"a": e.a, "b": e.b, "weight": e.weight}))
        .collect();
    Ok(Output {
        result: json!({
            "n": points.len(),
            "assignment": q.assignment,
            "tree": tree,
            "queries": q.queries,
            "budget_exhausted": q.budget_exhausted,
            "classical_assignment": c.assignment,
            "classical_queries": classical_ledger.oracle_queries,
            "matches_classical": q.assignment == c.assignment,
        }),
        table,
    })
}

fn run_hhl(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    let table = dataset(cfg)?;
    let a = table.matrix();
    if !a.is_square() {
        return Err(CliError::InvalidArgument(format!(
            "matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    let b = cfg
        .params
        .rhs
        .clone()
        .ok_or_else(|| CliError::InvalidArgument("missing --rhs".into()))?;
    let sys = LinearSystem::real(&a, &b)?;
    let clock = cfg.params.clock_qubits.unwrap_or(8);
    let params = if sys.is_hermitian() {
        HHLParams::for_matrix(sys.a(), clock)?
    } else {
        HHLParams::for_matrix(hermitian_embed(&sys).a(), clock)?
    };
    let params = HHLParams {
        cap: QubitCap::from_env(),
        ..params
    };
    let mode = if cfg.shots > 0 {
        HhlMode::Sampled {
            max_attempts: cfg.shots,
        }
    } else {
        HhlMode::Exact
    };
    let sol = hhl_solve(&sys, &params, mode, &mut rng.split(0), ledger)?;
    let classical = sys
        .classical_solve()
        .ok_or(qmldesk_core::Error::SingularSystem)?;
    let fidelity = vector_fidelity(&sol.solution, classical.as_slice());
    let norm = classical.norm();
    let mut out = Table::new(&["index", "re", "im", "classical"]);
    for (i, (x, y)) in sol.solution.iter().zip(classical.iter()).enumerate() {
        out.push(vec![json!(i), json!(x.re), json!(x.im), json!(y.re / norm)]);
    }
    Ok(Output {
        result: json!({
            "solution_re": sol.solution.iter().map(|x| x.re).collect::<Vec<_>>(),
            "solution_im": sol.solution.iter().map(|x| x.im).collect::<Vec<_>>(),
            "classical_solution": classical.iter().map(|x| x.re).collect::<Vec<_>>(),
            "fidelity": fidelity,
            "success_probability": sol.success_probability,
            "attempts": sol.attempts,
            "clock_qubits": clock,
        }),
        table: out,
    })
}

fn run_perceptron(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    let table = dataset(cfg)?;
    let xs = table.binary_rows()?;
    let ys = table.binary_labels()?;
    let bias = cfg.params.bias.unwrap_or(0.0);
    let ts = PerceptronTrainingSet::new(xs.into_iter().zip(ys).collect(), bias)?;
    let mode = match cfg.params.backend.as_deref() {
        None | Some("exact") => TrainingMode::Exact,
        Some("least-squares") => TrainingMode::LeastSquares,
        Some(other) => {
            return Err(CliError::InvalidArgument(format!(
                "unknown training mode `{other}`"
            )))
        }
    };
    let pcfg = PerceptronConfig {
        clock_qubits: cfg.params.clock_qubits.unwrap_or(8),
        mode,
        cap: QubitCap::from_env(),
    };
    let mut w = train_weights(&ts, &pcfg, &mut rng.split(0), ledger)?;
    let width = ts.width();
    let solutions = exhaustive_binary_solutions(&ts);
    let mut out = Table::new(&["input", "quantum", "exhaustive"]);
    let mut agree = true;
    if width <= 12 {
        let rule = ActivationRule { bias };
        for k in 0..1usize << width {
            let x = bits(k, width);
            let got = classify(&mut w, &x, rule, ledger)?;
            let want = solutions.first().map(|s| classical_label(s, &x, bias));
            agree &= want.is_none_or(|v| v == got);
            let input: String = x.iter().map(|b| char::from(b'0' + b)).collect();
            out.push(vec![json!(input), json!(got), json!(want)]);
        }
    }
    Ok(Output {
        result: json!({
            "weights": w.decoded_weights,
            "residual": w.residual,
            "success_probability": w.success_probability,
            "exhaustive_solutions": solutions,
            "matches_exhaustive": agree && !solutions.is_empty(),
        }),
        table: out,
    })
}

fn run_qpca(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    let rows = dataset(cfg)?.rows;
    let rho = covariance_density(&rows)?;
    let plan = ExponentiationPlan::new(
        cfg.params.time.unwrap_or(1.0),
        cfg.params.copies.unwrap_or(1000),
    )?;
    let opts = QpcaOptions {
        clock_qubits: cfg.params.clock_qubits.unwrap_or(6),
        threshold: cfg.params.threshold.unwrap_or(0.01),
        shots: cfg.shots,
        cap: QubitCap::from_env(),
    };
    let dec = qpca_extract(&rho, &plan, &opts, &mut rng.split(0), ledger)?;
    let exact = PrincipalDecomposition::exact(&rho, opts.threshold);
    let mut out = Table::new(&["level", "probability"]);
    for (k, p) in dec.level_distribution.iter().enumerate() {
        out.push(vec![json!(k), json!(p)]);
    }
    Ok(Output {
        result: json!({
            "eigenvalues": dec.eigenvalues,
            "weights": dec.weights,
            "rank": dec.rank,
            "eigenvectors_re": dec.eigenvectors.iter().map(|v| v.iter().map(|x| x.re).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "eigenvectors_im": dec.eigenvectors.iter().map(|v| v.iter().map(|x| x.im).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "exact_eigenvalues": exact.eigenvalues,
            "counts": dec.counts,
        }),
        table: out,
    })
}

fn run_bm(
    cfg: &ExperimentConfig,
    rng: &RandomSource,
    ledger: &mut ResourceLedger,
) -> CliResult<Output> {
    let data = dataset(cfg)?.binary_dataset()?;
    let backend = match cfg.params.backend.as_deref() {
        None | Some("exact") => GradientBackend::Exact,
        Some("mean-field") => GradientBackend::MeanField,
        Some(other) => {
            return Err(CliError::InvalidArgument(format!(
                "unknown backend `{other}`"
            )))
        }
    };
    let bm0 = BoltzmannMachine::random(
        data.width(),
        cfg.params.hidden.unwrap_or(2),
        0.1,
        &mut rng.split(0),
    )?;
    let tcfg = TrainConfig {
        backend,
        steps: cfg.params.steps.unwrap_or(500),
        learning_rate: cfg.params.learning_rate.unwrap_or(0.1),
        kappa: cfg.params.kappa.unwrap_or(1.0),
        ..Default::default()
    };
    let out = train_bm(&bm0, &data, &tcfg, ledger)?;
    let mut table = Table::new(&["step", "log_likelihood"]);
    for (i, ll) in out.trace.iter().enumerate() {
        table.push(vec![json!(i), json!(ll)]);
    }
    Ok(Output {
        result: json!({
            "final_log_likelihood": out.trace.last(),
            "initial_log_likelihood": out.trace[0],
            "a": out.bm.a,
            "b": out.bm.b,
            "w": out.bm.w.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        table,
    })
}
