use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};

/// Entries of `(G + G†)/2` with i.i.d. standard complex Gaussian `G`.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut h = &g + &g.adjoint();
    h.scale_mut(0.5);
    h
}

/// A random density matrix `GG†/tr(GG†)`.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = g.matmul(&g.adjoint());
    let t = rho.trace_re();
    rho.scale(1.0 / t)
}
