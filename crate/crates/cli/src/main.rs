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

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qmldesk::{run_experiment, ExperimentConfig, OutputFormat, Params, RunReport};

#[derive(Parser)]
#[command(
    name = "qmldesk",
    version,
    about = "Quantum machine-learning experiments on a dense simulator"
)]
struct Cli {
    /// Input CSV with a header row (`label,f1,...` or `f1,...`).
    #[arg(long, global = true, visible_alias = "data")]
    dataset: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Measurement shots; 0 uses exact probabilities.
    #[arg(long, global = true, default_value_t = 0)]
    shots: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Nearest-centroid classification by swap-test distances.
    Classify {
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        query: Vec<f64>,
    },
    /// Two-class decision with a pooled standard-error guard.
    BinaryClassify {
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        query: Vec<f64>,
    },
    /// k-nearest-neighbour vote with minimum finding.
    Knn {
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        query: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Minimum-spanning-tree clustering.
    MstCluster {
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Solve `A x = b`; the dataset holds the rows of `A`.
    HhlSolve {
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        rhs: Vec<f64>,
        #[arg(long, default_value_t = 8)]
        clock_qubits: usize,
    },
    /// Train binary perceptron weights; labels are 0 or 1.
    TrainPerceptron {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        bias: f64,
        #[arg(long, default_value_t = 8)]
        clock_qubits: usize,
        #[arg(long, default_value = "exact", value_parser = ["exact", "least-squares"])]
        mode: String,
    },
    /// Principal components of the dataset covariance.
    Qpca {
        #[arg(long, default_value_t = 6)]
        clock_qubits: usize,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, default_value_t = 1000)]
        copies: u64,
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
    },
    /// Train a restricted Boltzmann machine on binary patterns.
    TrainBm {
        #[arg(long, default_value_t = 2)]
        hidden: usize,
        #[arg(long, default_value = "exact", value_parser = ["exact", "mean-field"])]
        backend: String,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
    },
    /// Resource-scaling sweeps with power-law fits.
    Bench {
        #[arg(long, default_value = "shot-noise",
              value_parser = ["shot-noise", "mst-scaling", "knn-scaling", "min-find-scaling"])]
        experiment: String,
        /// Grid of shot counts or problem sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<u64>>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
}

impl Cli {
    fn into_config(self) -> ExperimentConfig {
        let mut p = Params::default();
        let algorithm = match self.command {
            Command::Classify { query } => {
                p.query = Some(query);
                "classify"
            }
            Command::BinaryClassify { query } => {
                p.query = Some(query);
                "binary-classify"
            }
            Command::Knn { query, k } => {
                p.query = Some(query);
                p.k = Some(k);
                "knn"
            }
            Command::MstCluster { k } => {
                p.k = Some(k);
                "mst-cluster"
            }
            Command::HhlSolve { rhs, clock_qubits } => {
                p.rhs = Some(rhs);
                p.clock_qubits = Some(clock_qubits);
                "hhl-solve"
            }
            Command::TrainPerceptron {
                bias,
                clock_qubits,
                mode,
            } => {
                p.bias = Some(bias);
                p.clock_qubits = Some(clock_qubits);
                p.backend = Some(mode);
                "train-perceptron"
            }
            Command::Qpca {
                clock_qubits,
                time,
                copies,
                threshold,
            } => {
                p.clock_qubits = Some(clock_qubits);
                p.time = Some(time);
                p.copies = Some(copies);
                p.threshold = Some(threshold);
                "qpca"
            }
            Command::TrainBm {
                hidden,
                backend,
                steps,
                lr,
                kappa,
            } => {
                p.hidden = Some(hidden);
                p.backend = Some(backend);
                p.steps = Some(steps);
                p.learning_rate = Some(lr);
                p.kappa = Some(kappa);
                "train-bm"
            }
            Command::Bench {
                experiment,
                sizes,
                repetitions,
            } => {
                p.experiment = Some(experiment);
                p.sizes = sizes;
                p.repetitions = repetitions;
                "bench"
            }
        };
        ExperimentConfig {
            algorithm: algorithm.into(),
            dataset: self.dataset,
            seed: self.seed,
            shots: self.shots,
            params: p,
            out: self.out,
            format: match self.format {
                Format::Json => OutputFormat::Json,
                Format::Tsv => OutputFormat::Tsv,
            },
        }
    }
}

fn render(report: &RunReport) -> String {
    match (report.config.format, &report.table) {
        (OutputFormat::Tsv, Some(t)) if report.is_ok() => t.to_tsv(),
        _ => report.to_json() + "\n",
    }
}

fn main() -> ExitCode {
    let cfg = Cli::parse().into_config();
    let report = run_experiment(&cfg);
    let text = render(&report);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("qmldesk: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if report.is_ok() {
        ExitCode::SUCCESS
    } else {
        if let Some(err) = &report.error {
            eprintln!("qmldesk: {}: {}", err.kind, err.message);
        }
        ExitCode::FAILURE
    }
}
