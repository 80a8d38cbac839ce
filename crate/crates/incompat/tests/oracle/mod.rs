//! Independent witness certifier working on exported JSON only.
//!
//! It shares no code with the crate: matrices are rebuilt from the raw JSON
//! values into nalgebra and checked with nalgebra's Hermitian eigensolver.

use nalgebra::{Complex, DMatrix};
use serde_json::Value;

pub type Matrix = DMatrix<Complex<f64>>;

pub const PSD_TOL: f64 = 1e-8;
pub const MARGIN_TOL: f64 = 1e-6;
const NOISE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct Report {
    pub min_eig: f64,
    pub margin_first: f64,
    pub margin_second: f64,
    pub noise_ok: bool,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.min_eig >= -PSD_TOL
            && self.margin_first <= MARGIN_TOL
            && self.margin_second <= MARGIN_TOL
            && self.noise_ok
    }
}

fn matrix(dim: usize, entries: &Value) -> Matrix {
    let entries = entries.as_array().expect("effect is a list");
    assert_eq!(entries.len(), dim * dim, "effect size");
    Matrix::from_fn(dim, dim, |i, j| {
        let e = &entries[i * dim + j];
        Complex::new(e[0].as_f64().unwrap(), e[1].as_f64().unwrap())
    })
}

/// Effects of a Povm JSON object.
pub fn effects(povm: &Value) -> Vec<Matrix> {
    let dim = povm["dim"].as_u64().unwrap() as usize;
    povm["effects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| matrix(dim, e))
        .collect()
}

fn weights(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn min_eigenvalue(m: &Matrix) -> f64 {
    let h = (m + m.adjoint()) * Complex::new(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn noise_ok(w: &[f64]) -> bool {
    w.iter().all(|&x| x >= 0.0) && (w.iter().sum::<f64>() - 1.0).abs() <= NOISE_TOL
}

/// `sqrt(Σ_j ‖Σ_k G[j,k] − (t·M(j) + (1−t)·w_j·I)‖²)` with `sums[j]` the
/// summed blocks.
fn margin_defect(sums: &[Matrix], m: &[Matrix], t: f64, w: &[f64]) -> f64 {
    let dim = m[0].nrows();
    sums.iter()
        .zip(m)
        .zip(w)
        .map(|((s, e), &wj)| {
            let target = e * Complex::new(t, 0.0)
                + Matrix::identity(dim, dim) * Complex::new((1.0 - t) * wj, 0.0);
            (s - target).norm_squared()
        })
        .sum::<f64>()
        .sqrt()
}

/// Certifies a witness (`WitnessJson` layout) against the pair of effects.
pub fn certify(m1: &[Matrix], m2: &[Matrix], witness: &Value) -> Report {
    let lambda = witness["lambda"].as_f64().unwrap();
    let mu = witness["mu"].as_f64().unwrap();
    let joint = &witness["joint"];
    let dim = joint["dim"].as_u64().unwrap() as usize;
    let n1 = joint["n1"].as_u64().unwrap() as usize;
    let n2 = joint["n2"].as_u64().unwrap() as usize;
    let blocks: Vec<Matrix> = joint["effects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| matrix(dim, e))
        .collect();
    assert_eq!(
        (blocks.len(), m1.len(), m2.len()),
        (n1 * n2, n1, n2),
        "witness shape"
    );
    let p = weights(&witness["noise_first"]);
    let q = weights(&witness["noise_second"]);

    let zero = || Matrix::zeros(dim, dim);
    let mut rows = vec![zero(); n1];
    let mut cols = vec![zero(); n2];
    for j in 0..n1 {
        for k in 0..n2 {
            rows[j] += &blocks[j * n2 + k];
            cols[k] += &blocks[j * n2 + k];
        }
    }
    Report {
        min_eig: blocks
            .iter()
            .map(min_eigenvalue)
            .fold(f64::INFINITY, f64::min),
        margin_first: margin_defect(&rows, m1, lambda, &p),
        margin_second: margin_defect(&cols, m2, mu, &q),
        noise_ok: noise_ok(&p) && noise_ok(&q) && p.len() == n1 && q.len() == n2,
    }
}
