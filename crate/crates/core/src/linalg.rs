//! Dense complex matrices and the handful of kernels the rest of the crate
//! needs: Kronecker products, partial traces, a cyclic Jacobi Hermitian
//! eigensolver and the Frobenius-nearest PSD projection.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::LinalgError;

/// Shorthand for the complex scalar used everywhere.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
#[cfg(test)]
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Relative Hermiticity tolerance, scaled by the dimension.
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;

/// A dense `dim × dim` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

/// Which tensor factor a partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Result of [`ComplexMatrix::eigh`]: eigenvalues in descending order and
/// the matching eigenvectors as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(scale, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails unless `data.len()` is
    /// `dim²`.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != dim * dim {
            return Err(LinalgError::EntryCount {
                dim,
                len: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// Rank-one projector `|v⟩⟨v|` (no normalization applied).
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_row_major(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Real part of the trace; the natural quantity for Hermitian operators.
    pub fn trace_re(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.frobenius_norm_sqr())
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `‖self − other‖_F`. Panics on a dimension mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        libm::sqrt(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>(),
        )
    }

    /// Real Frobenius inner product `Re tr(self† other)`.
    pub fn inner_re(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// `‖M − M†‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        libm::sqrt(acc)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL * self.dim.max(1) as f64
    }

    fn ensure_hermitian(&self) -> Result<(), LinalgError> {
        let defect = self.hermitian_defect();
        if defect <= HERMITIAN_TOL * self.dim.max(1) as f64 {
            Ok(())
        } else {
            Err(LinalgError::NotHermitian { defect })
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_mut(&mut self, s: f64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// `self += s · I`.
    pub fn add_identity(&mut self, s: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i].re += s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`; entry `((i,k),(j,l)) = a[i,j]·b[k,l]`.
    pub fn tensor_product(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let n = da * db;
        let mut out = Self::zeros(n);
        for i in 0..da {
            for j in 0..da {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out.data[(i * db + k) * n + (j * db + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Reduced operator on one factor of `H_{d1} ⊗ H_{d2}`.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Keep) -> Result<Self, LinalgError> {
        let (d1, d2) = dims;
        if d1 * d2 != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: d1 * d2,
                found: self.dim,
            });
        }
        let n = self.dim;
        let out = match keep {
            Keep::First => Self::from_fn(d1, |i, j| {
                (0..d2)
                    .map(|k| self.data[(i * d2 + k) * n + (j * d2 + k)])
                    .sum()
            }),
            Keep::Second => Self::from_fn(d2, |k, l| {
                (0..d1)
                    .map(|i| self.data[(i * d2 + k) * n + (i * d2 + l)])
                    .sum()
            }),
        };
        Ok(out)
    }

    /// Hermitian eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back in descending order; `vectors` is unitary and
    /// `self = V diag(values) V†`.
    pub fn eigh(&self) -> Result<Eigh, LinalgError> {
        self.ensure_hermitian()?;
        Ok(jacobi_eigh(self))
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64, LinalgError> {
        let e = self.eigh()?;
        Ok(e.values.last().copied().unwrap_or(0.0))
    }

    /// Applies `f` to the spectrum: `V diag(f(w)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self, LinalgError> {
        let e = self.eigh()?;
        let rows = e.vectors.adjoint();
        let mut out = Self::zeros(self.dim);
        for (c, &w) in e.values.iter().enumerate() {
            accumulate_rank_one(&mut out, &rows, c, f(w));
        }
        hermitize_in_place(&mut out);
        Ok(out)
    }

    /// Frobenius-nearest positive semidefinite matrix: negative eigenvalues
    /// are clipped to zero. The output is exactly Hermitian.
    pub fn psd_project(&self) -> Result<Self, LinalgError> {
        self.ensure_hermitian()?;
        Ok(psd_project_unchecked(self))
    }
}

/// PSD projection without the Hermiticity gate; the caller guarantees the
/// input is Hermitian up to rounding.
pub(crate) fn psd_project_unchecked(m: &ComplexMatrix) -> ComplexMatrix {
    let mut basis = ComplexMatrix::identity(m.dim);
    psd_project_warm(m, &mut basis)
}

/// PSD projection starting Jacobi from a unitary `basis` whose rows are
/// conjugated approximate eigenvectors, e.g. those of a nearby matrix.
/// On return `basis` holds the refined eigenvectors in the same layout.
pub(crate) fn psd_project_warm(m: &ComplexMatrix, basis: &mut ComplexMatrix) -> ComplexMatrix {
    let n = m.dim;
    if n == 1 {
        let x = m.data[0].re.max(0.0);
        return ComplexMatrix {
            dim: 1,
            data: vec![C64::new(x, 0.0)],
        };
    }
    let mut a = conjugate_by_rows(m, basis);
    hermitize_in_place(&mut a);
    jacobi_sweeps(&mut a, basis);
    let values: Vec<f64> = (0..n).map(|i| a.data[i * n + i].re).collect();
    let negatives = values.iter().filter(|&&w| w < 0.0).count();
    if negatives == 0 {
        return hermitize(m);
    }
    if negatives == n {
        return ComplexMatrix::zeros(n);
    }
    // Rebuild from whichever spectral part has fewer terms.
    let mut out = if n - negatives <= negatives {
        let mut acc = ComplexMatrix::zeros(n);
        for (r, &w) in values.iter().enumerate().filter(|(_, &w)| w > 0.0) {
            accumulate_rank_one(&mut acc, basis, r, w);
        }
        acc
    } else {
        let mut acc = m.clone();
        for (r, &w) in values.iter().enumerate().filter(|(_, &w)| w < 0.0) {
            accumulate_rank_one(&mut acc, basis, r, -w);
        }
        acc
    };
    hermitize_in_place(&mut out);
    out
}

/// `B m B†` for `B` given row-wise.
fn conjugate_by_rows(m: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim;
    // t = m B†
    let mut t = ComplexMatrix::zeros(n);
    for i in 0..n {
        let mi = &m.data[i * n..i * n + n];
        for r in 0..n {
            let br = &b.data[r * n..r * n + n];
            t.data[i * n + r] = mi.iter().zip(br).map(|(x, y)| x * y.conj()).sum();
        }
    }
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        let row = &mut out.data[r * n..r * n + n];
        for i in 0..n {
            let br = b.data[r * n + i];
            for (o, ti) in row.iter_mut().zip(&t.data[i * n..i * n + n]) {
                *o += br * ti;
            }
        }
    }
    out
}

/// Smallest eigenvalue without the Hermiticity gate.
pub(crate) fn jacobi_min_eigenvalue(m: &ComplexMatrix) -> f64 {
    match m.dim {
        0 => 0.0,
        1 => m.data[0].re,
        _ => jacobi_eigh(m).values.last().copied().unwrap_or(0.0),
    }
}

/// `acc += w · v v†` where row `r` of `rows` is `v†`; upper triangle only.
fn accumulate_rank_one(acc: &mut ComplexMatrix, rows: &ComplexMatrix, r: usize, w: f64) {
    let n = acc.dim;
    let v = &rows.data[r * n..r * n + n];
    for i in 0..n {
        let vi = v[i].conj() * w;
        for (a, vj) in acc.data[i * n + i..i * n + n].iter_mut().zip(&v[i..]) {
            *a += vi * vj;
        }
    }
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = m.clone();
    hermitize_in_place(&mut out);
    out
}

/// Mirrors the upper triangle onto the lower one and zeroes imaginary
/// diagonal parts.
fn hermitize_in_place(m: &mut ComplexMatrix) {
    let n = m.dim;
    for i in 0..n {
        m.data[i * n + i].im = 0.0;
        for j in (i + 1)..n {
            m.data[j * n + i] = m.data[i * n + j].conj();
        }
    }
}

fn jacobi_eigh(m: &ComplexMatrix) -> Eigh {
    let n = m.dim;
    let mut a = m.clone();
    hermitize_in_place(&mut a);
    let mut vt = ComplexMatrix::identity(n);
    jacobi_sweeps(&mut a, &mut vt);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a.data[y * n + y].re.total_cmp(&a.data[x * n + x].re));
    let values = order.iter().map(|&i| a.data[i * n + i].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| vt.data[order[c] * n + r].conj());
    Eigh { values, vectors }
}

/// Cyclic Jacobi on Hermitian `a` until the off-diagonal mass is at round-off
/// level. Rotations are applied to the rows of `vt` (conjugated eigenvectors),
/// so the rows of the result satisfy `vt·m·vt† = diag(a)` for the original `m`.
fn jacobi_sweeps(a: &mut ComplexMatrix, vt: &mut ComplexMatrix) {
    let n = a.dim;
    let total = a.frobenius_norm_sqr();
    let threshold = (f64::EPSILON * f64::EPSILON) * total;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.data[p * n + q].norm_sqr();
            }
        }
        if off <= threshold || off == 0.0 {
            break;
        }
        // Entries this small cannot keep `off` above the threshold.
        let negligible = threshold / (n * (n - 1) / 2) as f64;
        for p in 0..n {
            for q in (p + 1)..n {
                if a.data[p * n + q].norm_sqr() > negligible {
                    rotate(a, vt, p, q);
                }
            }
        }
    }
}

/// One complex Jacobi rotation `a ← U†aU` annihilating `a[p,q]`, with
/// `vt ← (vt† U)†` accumulated row-wise.
///
/// Only columns `p` and `q` are computed; rows follow by Hermiticity and
/// the pivot block is set in closed form.
fn rotate(a: &mut ComplexMatrix, vt: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim;
    let apq = a.data[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a.data[p * n + p].re;
    let aqq = a.data[q * n + q].re;
    // Phase that makes the pivot real, then a real symmetric rotation.
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + libm::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;
    // U restricted to (p,q): [[c, s·phase], [−s·conj(phase), c]]
    let u_pq = phase * s;
    let u_qp = -phase.conj() * s;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a.data[k * n + p];
        let akq = a.data[k * n + q];
        let kp = akp * c + akq * u_qp;
        let kq = akp * u_pq + akq * c;
        a.data[k * n + p] = kp;
        a.data[k * n + q] = kq;
        a.data[p * n + k] = kp.conj();
        a.data[q * n + k] = kq.conj();
    }
    a.data[p * n + p] = C64::new(app - t * r, 0.0);
    a.data[q * n + q] = C64::new(aqq + t * r, 0.0);
    a.data[p * n + q] = ZERO;
    a.data[q * n + p] = ZERO;

    let (head, tail) = vt.data.split_at_mut(q * n);
    let row_p = &mut head[p * n..p * n + n];
    let row_q = &mut tail[..n];
    let (cp, cq) = (u_qp.conj(), u_pq.conj());
    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = xp * c + yq * cp;
        *y = xp * cq + yq * c;
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
