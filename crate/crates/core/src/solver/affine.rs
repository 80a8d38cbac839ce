//! Euclidean projection onto the affine set of margin equations.
//!
//! Variables are `(G, p, q)`: an `n1 × n2` grid of Hermitian blocks and two
//! real vectors. The constraint operator is
//!
//! ```text
//! A(G, p, q) = ( Σ_k G[j,k] − (1−λ) p_j I ,   j < n1
//!                Σ_j G[j,k] − (1−μ) q_k I ,   k < n2
//!                Σ_j p_j ,  Σ_k q_k )
//! ```
//!
//! with right-hand side `(λ M₁(j), μ M₂(k), 1, 1)`. The projection of `z` is
//! `z − Aᵀy` where `AAᵀ y = Az − b`, solved by conjugate gradients. `AAᵀ`
//! couples blocks only through row and column sums and has very few distinct
//! eigenvalues, so CG converges in a handful of steps.

use alloc::vec::Vec;

use crate::linalg::ComplexMatrix;

/// Relative CG tolerance on the normal-equation residual.
const CG_REL_TOL: f64 = 1e-12;
/// Absolute floor, relative to `‖b‖` of the constraints, for points that
/// already sit on the affine set.
const CG_ABS_FLOOR: f64 = 1e-15;

/// Minimal real inner-product space interface for conjugate gradients.
pub(crate) trait Vector: Clone {
    fn dot(&self, other: &Self) -> f64;
    /// `self += a · other`
    fn axpy(&mut self, a: f64, other: &Self);
    fn scale(&mut self, a: f64);

    fn norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }
}

/// Point in the primal space `(G, p, q)`.
#[derive(Clone, Debug)]
pub(crate) struct Primal {
    pub g: Vec<ComplexMatrix>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Point in the constraint space.
#[derive(Clone, Debug)]
pub(crate) struct Dual {
    pub rows: Vec<ComplexMatrix>,
    pub cols: Vec<ComplexMatrix>,
    pub sum_p: f64,
    pub sum_q: f64,
}

impl Vector for Primal {
    fn dot(&self, other: &Self) -> f64 {
        let g: f64 = self
            .g
            .iter()
            .zip(&other.g)
            .map(|(a, b)| a.inner_re(b))
            .sum();
        let p: f64 = self.p.iter().zip(&other.p).map(|(a, b)| a * b).sum();
        let q: f64 = self.q.iter().zip(&other.q).map(|(a, b)| a * b).sum();
        g + p + q
    }

    fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.g.iter_mut().zip(&other.g) {
            x.add_scaled(a, y);
        }
        for (x, y) in self.p.iter_mut().zip(&other.p) {
            *x += a * y;
        }
        for (x, y) in self.q.iter_mut().zip(&other.q) {
            *x += a * y;
        }
    }

    fn scale(&mut self, a: f64) {
        self.g.iter_mut().for_each(|x| x.scale_mut(a));
        self.p.iter_mut().for_each(|x| *x *= a);
        self.q.iter_mut().for_each(|x| *x *= a);
    }
}

impl Vector for Dual {
    fn dot(&self, other: &Self) -> f64 {
        let r: f64 = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.inner_re(b))
            .sum();
        let c: f64 = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| a.inner_re(b))
            .sum();
        r + c + self.sum_p * other.sum_p + self.sum_q * other.sum_q
    }

    fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.rows.iter_mut().zip(&other.rows) {
            x.add_scaled(a, y);
        }
        for (x, y) in self.cols.iter_mut().zip(&other.cols) {
            x.add_scaled(a, y);
        }
        self.sum_p += a * other.sum_p;
        self.sum_q += a * other.sum_q;
    }

    fn scale(&mut self, a: f64) {
        self.rows.iter_mut().for_each(|x| x.scale_mut(a));
        self.cols.iter_mut().for_each(|x| x.scale_mut(a));
        self.sum_p *= a;
        self.sum_q *= a;
    }
}

impl Primal {
    pub fn zeros(d: usize, n1: usize, n2: usize) -> Self {
        Self {
            g: alloc::vec![ComplexMatrix::zeros(d); n1 * n2],
            p: alloc::vec![0.0; n1],
            q: alloc::vec![0.0; n2],
        }
    }
}

impl Dual {
    pub fn zeros(d: usize, n1: usize, n2: usize) -> Self {
        Self {
            rows: alloc::vec![ComplexMatrix::zeros(d); n1],
            cols: alloc::vec![ComplexMatrix::zeros(d); n2],
            sum_p: 0.0,
            sum_q: 0.0,
        }
    }
}

/// The margin constraint operator for a fixed noise point.
#[derive(Clone, Debug)]
pub(crate) struct MarginOperator {
    pub d: usize,
    pub n1: usize,
    pub n2: usize,
    /// `1 − λ`
    pub noise1: f64,
    /// `1 − μ`
    pub noise2: f64,
}

impl MarginOperator {
    pub fn apply(&self, x: &Primal) -> Dual {
        let mut out = Dual::zeros(self.d, self.n1, self.n2);
        for j in 0..self.n1 {
            for k in 0..self.n2 {
                let block = &x.g[j * self.n2 + k];
                out.rows[j] += block;
                out.cols[k] += block;
            }
        }
        for (row, &pj) in out.rows.iter_mut().zip(&x.p) {
            row.add_identity(-self.noise1 * pj);
        }
        for (col, &qk) in out.cols.iter_mut().zip(&x.q) {
            col.add_identity(-self.noise2 * qk);
        }
        out.sum_p = x.p.iter().sum();
        out.sum_q = x.q.iter().sum();
        out
    }

    pub fn adjoint(&self, y: &Dual) -> Primal {
        let mut g = Vec::with_capacity(self.n1 * self.n2);
        for row in &y.rows {
            for col in &y.cols {
                g.push(row + col);
            }
        }
        let p = y
            .rows
            .iter()
            .map(|r| y.sum_p - self.noise1 * r.trace_re())
            .collect();
        let q = y
            .cols
            .iter()
            .map(|c| y.sum_q - self.noise2 * c.trace_re())
            .collect();
        Primal { g, p, q }
    }

    /// `AAᵀy` in closed form, without materializing the `n1·n2` blocks:
    ///
    /// ```text
    /// rows_j = n2 Y_j + ΣZ − (1−λ)(a − (1−λ) tr Y_j) I
    /// cols_k = ΣY + n1 Z_k − (1−μ)(b − (1−μ) tr Z_k) I
    /// sum_p  = n1 a − (1−λ) Σ tr Y_j,   sum_q = n2 b − (1−μ) Σ tr Z_k
    /// ```
    fn normal(&self, y: &Dual) -> Dual {
        let (n1, n2) = (self.n1 as f64, self.n2 as f64);
        let (a, b) = (y.sum_p, y.sum_q);
        let mut sum_rows = ComplexMatrix::zeros(self.d);
        let mut sum_cols = ComplexMatrix::zeros(self.d);
        y.rows.iter().for_each(|r| sum_rows += r);
        y.cols.iter().for_each(|c| sum_cols += c);
        let tr_rows: Vec<f64> = y.rows.iter().map(ComplexMatrix::trace_re).collect();
        let tr_cols: Vec<f64> = y.cols.iter().map(ComplexMatrix::trace_re).collect();
        let rows = y
            .rows
            .iter()
            .zip(&tr_rows)
            .map(|(r, &t)| {
                let mut out = sum_cols.clone();
                out.add_scaled(n2, r);
                out.add_identity(-self.noise1 * (a - self.noise1 * t));
                out
            })
            .collect();
        let cols = y
            .cols
            .iter()
            .zip(&tr_cols)
            .map(|(c, &t)| {
                let mut out = sum_rows.clone();
                out.add_scaled(n1, c);
                out.add_identity(-self.noise2 * (b - self.noise2 * t));
                out
            })
            .collect();
        Dual {
            rows,
            cols,
            sum_p: n1 * a - self.noise1 * tr_rows.iter().sum::<f64>(),
            sum_q: n2 * b - self.noise2 * tr_cols.iter().sum::<f64>(),
        }
    }
}

/// Projector onto `{x : Ax = b}` with a warm-started multiplier.
#[derive(Clone, Debug)]
pub(crate) struct AffineProjector {
    pub op: MarginOperator,
    pub rhs: Dual,
    multiplier: Dual,
    max_cg_iters: usize,
    abs_tol: f64,
}

impl AffineProjector {
    pub fn new(op: MarginOperator, rhs: Dual) -> Self {
        let multiplier = Dual::zeros(op.d, op.n1, op.n2);
        let unknowns = (op.n1 + op.n2) * op.d * op.d + 2;
        let abs_tol = CG_ABS_FLOOR * rhs.norm().max(1.0);
        Self {
            op,
            rhs,
            multiplier,
            max_cg_iters: unknowns.max(16),
            abs_tol,
        }
    }

    /// `Ax − b`.
    pub fn violation(&self, x: &Primal) -> Dual {
        let mut r = self.op.apply(x);
        r.axpy(-1.0, &self.rhs);
        r
    }

    pub fn project(&mut self, z: &Primal) -> Primal {
        let target = self.violation(z);
        conjugate_gradient(
            |y| self.op.normal(y),
            &target,
            &mut self.multiplier,
            CG_REL_TOL,
            self.abs_tol,
            self.max_cg_iters,
        );
        let mut x = z.clone();
        x.axpy(-1.0, &self.op.adjoint(&self.multiplier));
        x
    }
}

/// Solves `N y = b` for symmetric positive semidefinite `N`, starting from
/// the current `y`. Stops when `‖b − Ny‖ ≤ max(rel_tol·‖b‖, abs_tol)`.
/// Returns the number of iterations taken.
pub(crate) fn conjugate_gradient<V: Vector>(
    normal: impl Fn(&V) -> V,
    b: &V,
    y: &mut V,
    rel_tol: f64,
    abs_tol: f64,
    max_iters: usize,
) -> usize {
    let b_norm = b.norm();
    if b_norm == 0.0 {
        y.scale(0.0);
        return 0;
    }
    let threshold = (rel_tol * b_norm).max(abs_tol);
    let mut r = b.clone();
    r.axpy(-1.0, &normal(y));
    let mut rr = r.dot(&r);
    if libm::sqrt(rr) <= threshold {
        return 0;
    }
    let mut dir = r.clone();
    for it in 1..=max_iters {
        let nd = normal(&dir);
        let curvature = dir.dot(&nd);
        if curvature <= 0.0 {
            return it;
        }
        let alpha = rr / curvature;
        y.axpy(alpha, &dir);
        r.axpy(-alpha, &nd);
        let rr_next = r.dot(&r);
        if libm::sqrt(rr_next) <= threshold {
            return it;
        }
        let beta = rr_next / rr;
        dir.scale(beta);
        dir.axpy(1.0, &r);
        rr = rr_next;
    }
    max_iters
}
