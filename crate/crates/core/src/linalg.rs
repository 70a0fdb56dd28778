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

//! Dense complex linear-algebra helpers shared by the simulator and the
//! algorithm modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, eigenvectors in
/// the matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Rebuilds `V f(Λ) V†` from an eigendecomposition.
pub fn spectral_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let fj = f(lam);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(i·t·H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    spectral_map(&values, &vectors, |lam| C64::from_polar(1.0, lam * t))
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn unitary_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    (m * m.adjoint() - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `½ Σ |λᵢ(a − b)|` for Hermitian `a`, `b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let (values, _) = hermitian_eigen(&(a - b));
    0.5 * values.iter().map(|v| v.abs()).sum::<f64>()
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn hermitian_operator_norm(m: &CMatrix) -> f64 {
    let (values, _) = hermitian_eigen(m);
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| c(data[i * cols + j]))
}

pub fn next_pow2_exponent(len: usize) -> usize {
    len.max(1).next_power_of_two().trailing_zeros() as usize
}
