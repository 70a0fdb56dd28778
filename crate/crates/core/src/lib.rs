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

//! A desk-scale quantum simulator and a set of quantum machine-learning
//! algorithms, each paired with a classical reference it can be checked
//! against.
//!
//! * [`sim`]: statevector and density-matrix engine, measurement, swap test
//! * [`distance`]: swap-test distance estimation and nearest-centroid
//!   classification
//! * [`hhl`]: linear-system solver built on phase estimation
//! * [`perceptron`]: binary perceptron trained through [`hhl`]
//! * [`qpca`]: density-matrix exponentiation and principal components
//! * [`grover`]: Grover search, Dürr–Høyer minimum finding, k-NN and MST
//!   clustering
//! * [`boltzmann`]: exact Gibbs distribution and gradients for Boltzmann
//!   machines
//!
//! Every operation that consumes quantum resources takes a
//! [`ResourceLedger`] and every random draw comes from an explicit
//! [`RandomSource`].

pub mod boltzmann;
pub mod distance;
pub mod error;
pub mod grover;
pub mod hhl;
pub mod ledger;
pub mod linalg;
pub mod perceptron;
pub mod qpca;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use ledger::ResourceLedger;
pub use rng::RandomSource;
