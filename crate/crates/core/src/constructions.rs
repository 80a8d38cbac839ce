//! Named observables: the Fourier-connected pair of mutually unbiased bases,
//! truncated number and binned canonical phase observables, and random
//! POVMs for test instances.
//!
//! The phase observable is modelled by cutting its kernel
//! `(1/2π)∫_X e^{i(m−n)θ} dθ` down to the number states `0..d`. That keeps
//! the diagonal exact, so the truncated effects still sum to the identity.
//! It is a model of the canonical phase observable, not the observable
//! itself. Binning only coarse-grains, so degrees computed on binned
//! models bound the unbinned model from above.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::ConstructionError;
use crate::linalg::{ComplexMatrix, C64};
use crate::povm::{Label, Povm};

const RANDOM_POVM_ATTEMPTS: usize = 16;

/// Two orthonormal bases with `|⟨φ_j|ψ_k⟩|² = 1/d`, as projective POVMs.
#[derive(Clone, Debug)]
pub struct MubPair {
    pub dim: usize,
    /// Projectors onto the computational basis `φ_j`.
    pub povm_a: Povm,
    /// Projectors onto the Fourier basis `ψ_k`.
    pub povm_b: Povm,
}

impl MubPair {
    /// Largest deviation of `|⟨φ_j|ψ_k⟩|²` from `1/d`, computed as
    /// `tr(A_j B_k)` for the rank-one projectors.
    pub fn unbiasedness_defect(&self) -> f64 {
        let target = 1.0 / self.dim as f64;
        let mut worst: f64 = 0.0;
        for a in self.povm_a.effects() {
            for b in self.povm_b.effects() {
                let overlap = a.matmul(b).trace_re();
                worst = worst.max((overlap - target).abs());
            }
        }
        worst
    }
}

/// The Fourier vector `ψ_k = d^{-1/2} Σ_j e^{2πi jk/d} φ_j`.
pub fn fourier_vector(d: usize, k: usize) -> Vec<C64> {
    let norm = 1.0 / libm::sqrt(d as f64);
    (0..d)
        .map(|j| {
            // Reduce jk mod d before scaling to keep the angle small.
            let angle = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
            C64::new(libm::cos(angle) * norm, libm::sin(angle) * norm)
        })
        .collect()
}

pub fn fourier_mub_pair(d: usize) -> Result<MubPair, ConstructionError> {
    if d < 2 {
        return Err(ConstructionError::DimensionTooSmall { min: 2, got: d });
    }
    let povm_a = number_povm(d);
    let projectors = (0..d)
        .map(|k| ComplexMatrix::outer(&fourier_vector(d, k)))
        .collect();
    let povm_b = Povm::from_effects(projectors).expect("rank-one projectors are Hermitian");
    Ok(MubPair {
        dim: d,
        povm_a,
        povm_b,
    })
}

/// Joint measurability degree of the Fourier MUB pair,
/// `(2 + √d) / (2(1 + √d))`.
pub fn mub_jmd_analytic(d: u64) -> Result<f64, ConstructionError> {
    if d < 2 {
        return Err(ConstructionError::DimensionTooSmall {
            min: 2,
            got: d as usize,
        });
    }
    let s = libm::sqrt(d as f64);
    Ok((2.0 + s) / (2.0 * (1.0 + s)))
}

/// Projectors `|n⟩⟨n|` onto the first `d` number states.
///
/// Panics if `d == 0`.
pub fn number_povm(d: usize) -> Povm {
    assert!(d >= 1, "number observable needs d ≥ 1");
    let effects = (0..d)
        .map(|n| {
            let mut e = ComplexMatrix::zeros(d);
            e[(n, n)] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    Povm::from_effects(effects).expect("diagonal projectors")
}

/// `(1/2π) ∫_lo^hi e^{ikθ} dθ`.
fn phase_kernel_integral(k: i64, lo: f64, hi: f64) -> C64 {
    if k == 0 {
        return C64::new((hi - lo) / (2.0 * PI), 0.0);
    }
    let kf = k as f64;
    let (sh, ch) = (libm::sin(kf * hi), libm::cos(kf * hi));
    let (sl, cl) = (libm::sin(kf * lo), libm::cos(kf * lo));
    // (e^{ik·hi} − e^{ik·lo}) / (ik) / 2π
    let num = C64::new(ch - cl, sh - sl);
    num / C64::new(0.0, kf * 2.0 * PI)
}

/// Canonical phase observable truncated to `d` number states and binned
/// into `bins` equal arcs `[2πb/bins, 2π(b+1)/bins)`.
///
/// Panics if `d == 0` or `bins < 2`.
pub fn phase_povm_binned(d: usize, bins: usize) -> Povm {
    assert!(d >= 1, "phase observable needs d ≥ 1");
    assert!(bins >= 2, "phase observable needs at least two bins");
    let width = 2.0 * PI / bins as f64;
    let mut effects = Vec::with_capacity(bins);
    let mut labels = Vec::with_capacity(bins);
    for b in 0..bins {
        let lo = width * b as f64;
        let hi = width * (b + 1) as f64;
        // Entries depend only on m − n; tabulate once per bin.
        let table: Vec<C64> = (0..d as i64)
            .map(|k| phase_kernel_integral(k, lo, hi))
            .collect();
        let mut e = ComplexMatrix::zeros(d);
        for m in 0..d {
            e[(m, m)] = C64::new(1.0 / bins as f64, 0.0);
            for n in (m + 1)..d {
                let v = table[n - m].conj();
                e[(m, n)] = v;
                e[(n, m)] = v.conj();
            }
        }
        effects.push(e);
        labels.push(Label::Bin { lo, hi });
    }
    Povm::with_labels(effects, labels).expect("kernel blocks are Hermitian")
}

/// Random POVM with `outcomes` effects: Ginibre draws `E'_j = G_j G_j†`
/// normalized as `S^{-1/2} E'_j S^{-1/2}` with `S = Σ E'_j`. Deterministic
/// in `seed`.
pub fn random_povm(d: usize, outcomes: usize, seed: u64) -> Result<Povm, ConstructionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_povm_with(&mut rng, d, outcomes)
}

/// Two random POVMs on `C^d` drawn in sequence from one generator seeded
/// with `seed`.
pub fn random_povm_pair(
    d: usize,
    outcomes: (usize, usize),
    seed: u64,
) -> Result<(Povm, Povm), ConstructionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = random_povm_with(&mut rng, d, outcomes.0)?;
    let second = random_povm_with(&mut rng, d, outcomes.1)?;
    Ok((first, second))
}

/// [`random_povm`] drawing from a caller-supplied generator.
pub fn random_povm_with<R: Rng>(
    rng: &mut R,
    d: usize,
    outcomes: usize,
) -> Result<Povm, ConstructionError> {
    if d < 1 {
        return Err(ConstructionError::DimensionTooSmall { min: 1, got: d });
    }
    if outcomes < 1 {
        return Err(ConstructionError::TooFewOutcomes {
            min: 1,
            got: outcomes,
        });
    }
    if outcomes == 1 {
        return Ok(Povm::from_effects(alloc::vec![ComplexMatrix::identity(d)]).expect("identity"));
    }
    for _ in 0..RANDOM_POVM_ATTEMPTS {
        let raw: Vec<ComplexMatrix> = (0..outcomes)
            .map(|_| {
                let g = ComplexMatrix::from_fn(d, |_, _| {
                    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                hermitian_product(&g)
            })
            .collect();
        let mut total = ComplexMatrix::zeros(d);
        for e in &raw {
            total += e;
        }
        let eig = total.eigh().expect("sum of Gram matrices is Hermitian");
        let (max, min) = (eig.values[0], eig.values[d - 1]);
        let well_conditioned = min > 1e-10 * max;
        if !well_conditioned {
            continue;
        }
        let inv_sqrt = total
            .map_spectrum(|w| 1.0 / libm::sqrt(w))
            .expect("Hermitian");
        let effects = raw
            .iter()
            .map(|e| hermitian_product_sandwich(&inv_sqrt, e))
            .collect();
        return Ok(Povm::from_effects(effects).expect("Hermitian by construction"));
    }
    Err(ConstructionError::Singular(RANDOM_POVM_ATTEMPTS))
}

/// `G G†`, exactly Hermitian.
fn hermitian_product(g: &ComplexMatrix) -> ComplexMatrix {
    let d = g.dim();
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            let v: C64 = (0..d).map(|k| g[(i, k)] * g[(j, k)].conj()).sum();
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
        out[(i, i)].im = 0.0;
    }
    out
}

/// `A E A` for Hermitian `A`, `E`, exactly Hermitian.
fn hermitian_product_sandwich(a: &ComplexMatrix, e: &ComplexMatrix) -> ComplexMatrix {
    let ae = a.matmul(e);
    let d = a.dim();
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            let v: C64 = (0..d).map(|k| ae[(i, k)] * a[(k, j)]).sum();
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
        out[(i, i)].im = 0.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_mub_is_z_and_x() {
        let pair = fourier_mub_pair(2).unwrap();
        let s = 1.0 / libm::sqrt(2.0);
        let plus = [C64::new(s, 0.0), C64::new(s, 0.0)];
        let minus = [C64::new(s, 0.0), C64::new(-s, 0.0)];
        assert!(pair.povm_b.effect(0).distance(&ComplexMatrix::outer(&plus)) <= 1e-15);
        assert!(
            pair.povm_b
                .effect(1)
                .distance(&ComplexMatrix::outer(&minus))
                <= 1e-15
        );
        assert_eq!(
            *pair.povm_a.effect(0),
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0])
        );
    }

    #[test]
    fn fourier_vectors_are_orthonormal() {
        for d in 2..9 {
            for k in 0..d {
                for l in 0..d {
                    let (u, v) = (fourier_vector(d, k), fourier_vector(d, l));
                    let ip: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    let expected = if k == l { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(expected, 0.0)).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn unbiasedness_up_to_dimension_eight() {
        for d in 2..=8 {
            let pair = fourier_mub_pair(d).unwrap();
            assert!(pair.unbiasedness_defect() <= 1e-10, "d = {d}");
            assert!(pair.povm_a.validate().ok && pair.povm_b.validate().ok);
        }
    }

    #[test]
    fn qutrit_overlap() {
        let psi2 = fourier_vector(3, 2);
        assert!((psi2[0].norm_sqr() - 1.0 / 3.0).abs() <= 1e-15);
    }

    #[test]
    fn mub_pair_rejects_small_dims() {
        assert!(fourier_mub_pair(1).is_err());
        assert!(mub_jmd_analytic(1).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn analytic_degree_values() {
        assert!((mub_jmd_analytic(2).unwrap() - 0.707_106_78).abs() < 1e-8);
        assert!((mub_jmd_analytic(4).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((mub_jmd_analytic(100_000_000).unwrap() - 0.5).abs() < 1e-3);
        let mut prev = mub_jmd_analytic(2).unwrap();
        for d in 3..500 {
            let v = mub_jmd_analytic(d).unwrap();
            assert!(v < prev && v > 0.5);
            prev = v;
        }
    }

    #[test]
    fn number_observable() {
        let n = number_povm(2);
        assert_eq!(*n.effect(0), ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
        assert_eq!(*n.effect(1), ComplexMatrix::from_real_diagonal(&[0.0, 1.0]));
        let n = number_povm(5);
        for (i, a) in n.effects().iter().enumerate() {
            assert_eq!(a.trace_re(), 1.0);
            for (j, b) in n.effects().iter().enumerate() {
                let expected = if i == j {
                    a.clone()
                } else {
                    ComplexMatrix::zeros(5)
                };
                assert_eq!(a.matmul(b), expected);
            }
        }
    }

    #[test]
    fn one_dimensional_phase_is_trivial() {
        for bins in [2, 3, 8] {
            let p = phase_povm_binned(1, bins);
            for e in p.effects() {
                assert!((e[(0, 0)].re - 1.0 / bins as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn qubit_half_circle_phase_effect() {
        let p = phase_povm_binned(2, 2);
        let e = p.effect(0);
        let expected = ComplexMatrix::from_fn(2, |m, n| match (m, n) {
            (0, 1) => C64::new(0.0, -1.0 / PI),
            (1, 0) => C64::new(0.0, 1.0 / PI),
            _ => C64::new(0.5, 0.0),
        });
        assert!(e.distance(&expected) <= 1e-15);
        let w = e.eigh().unwrap().values;
        assert!((w[0] - (0.5 + 1.0 / PI)).abs() < 1e-14);
        assert!((w[1] - (0.5 - 1.0 / PI)).abs() < 1e-14);
    }

    #[test]
    fn phase_effects_psd_and_complete() {
        for d in [1, 2, 3, 5, 8, 13, 21, 32] {
            for bins in [2, 3, 4, 7, 8, 16, 32] {
                let p = phase_povm_binned(d, bins);
                let report = p.validate();
                assert!(report.ok, "d={d} bins={bins}: {report:?}");
                for e in p.effects() {
                    assert!(e.min_eigenvalue().unwrap() >= -1e-12);
                }
            }
        }
    }

    #[test]
    fn phase_refinement_coarse_grains_back() {
        for (d, bins) in [(3, 4), (6, 8), (10, 5)] {
            let coarse = phase_povm_binned(d, bins);
            let fine = phase_povm_binned(d, 2 * bins);
            for b in 0..bins {
                let merged = fine.effect(2 * b) + fine.effect(2 * b + 1);
                assert!(merged.distance(coarse.effect(b)) <= 1e-14);
            }
        }
    }

    #[test]
    fn random_povm_is_deterministic_and_valid() {
        let a = random_povm(3, 4, 99).unwrap();
        let b = random_povm(3, 4, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().ok);
        assert_ne!(a, random_povm(3, 4, 100).unwrap());
        let single = random_povm(4, 1, 0).unwrap();
        assert_eq!(single.effects(), &[ComplexMatrix::identity(4)]);
        assert!(random_povm(2, 0, 0).is_err());
    }

    #[test]
    fn random_pairs_are_distinct_and_reproducible() {
        let (a, b) = random_povm_pair(3, (2, 4), 5).unwrap();
        assert_eq!((a.outcomes(), b.outcomes()), (2, 4));
        assert!(a.validate().ok && b.validate().ok);
        assert_eq!(random_povm_pair(3, (2, 4), 5).unwrap(), (a, b));
    }
}
