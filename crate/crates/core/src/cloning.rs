//! Universal symmetric `1 → 2` cloning and the joint observable it induces.
//!
//! The cloner is `C(ρ) = 2/(d+1) · S(ρ ⊗ I)S` with `S` the projector onto
//! the symmetric subspace of `H_d ⊗ H_d`. Each clone is
//! `c(d)ρ + (1−c(d)) I/d` with `c(d) = (2+d)/(2(1+d))`. Measuring `M₁` on
//! one clone and `M₂` on the other gives a joint observable whose margins
//! are the `c(d)`-noisy versions of `M₁` and `M₂`, so every pair on `H_d`
//! is jointly measurable at `(c(d), c(d))`.

use alloc::vec::Vec;

use crate::error::CloningError;
use crate::linalg::{ComplexMatrix, Keep, C64};
use crate::povm::{JointPovm, Povm, TrivialNoise};

const DENSITY_TOL: f64 = 1e-10;

/// `c(d) = (2+d)/(2(1+d))`.
///
/// Panics if `d < 2`.
pub fn cloning_coefficient(d: u64) -> f64 {
    assert!(d >= 2, "cloning needs d ≥ 2");
    let d = d as f64;
    (2.0 + d) / (2.0 * (1.0 + d))
}

/// `S = (I + SWAP)/2` on `H_d ⊗ H_d`, index `i·d + j` for `|i, j⟩`.
pub fn symmetric_projector(d: usize) -> ComplexMatrix {
    let n = d * d;
    let mut s = ComplexMatrix::zeros(n);
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            s[(row, row)] += C64::new(0.5, 0.0);
            s[(row, j * d + i)] += C64::new(0.5, 0.0);
        }
    }
    s
}

/// The cloning channel on `H_d`.
#[derive(Clone, Debug)]
pub struct CloningDevice {
    dim: usize,
    symmetric_projector: ComplexMatrix,
}

impl CloningDevice {
    pub fn new(d: usize) -> Result<Self, CloningError> {
        if d < 2 {
            return Err(CloningError::DimensionTooSmall(d));
        }
        Ok(Self {
            dim: d,
            symmetric_projector: symmetric_projector(d),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symmetric_projector(&self) -> &ComplexMatrix {
        &self.symmetric_projector
    }

    pub fn coefficient(&self) -> f64 {
        cloning_coefficient(self.dim as u64)
    }

    fn prefactor(&self) -> f64 {
        2.0 / (self.dim as f64 + 1.0)
    }

    /// Two-clone output `2/(d+1) · S(ρ ⊗ I)S`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, CloningError> {
        check_density(rho, self.dim)?;
        let s = &self.symmetric_projector;
        let lifted = rho.tensor_product(&ComplexMatrix::identity(self.dim));
        Ok(s.matmul(&lifted).matmul(s).scale(self.prefactor()))
    }

    /// State of a single clone.
    pub fn clone_state(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, CloningError> {
        let out = self.apply(rho)?;
        Ok(out.partial_trace((self.dim, self.dim), Keep::First)?)
    }

    /// Heisenberg picture of the cloner applied to `a ⊗ b`:
    /// `2/(d+1) · Tr₂[S(a ⊗ b)S]`, so that `tr[ρ E] = tr[C(ρ)(a ⊗ b)]`.
    pub fn dual(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let s = &self.symmetric_projector;
        let sandwiched = s.matmul(&a.tensor_product(b)).matmul(s);
        let mut e = sandwiched
            .partial_trace((self.dim, self.dim), Keep::First)
            .expect("d² by construction");
        e.scale_mut(self.prefactor());
        e
    }

    /// Joint observable from measuring `m1` and `m2` on the two clones.
    pub fn joint_observable(&self, m1: &Povm, m2: &Povm) -> Result<JointPovm, CloningError> {
        for m in [m1, m2] {
            if m.dim() != self.dim {
                return Err(crate::error::PovmError::DimensionMismatch {
                    left: self.dim,
                    right: m.dim(),
                }
                .into());
            }
            m.require_valid()?;
        }
        let mut effects = Vec::with_capacity(m1.outcomes() * m2.outcomes());
        for a in m1.effects() {
            for b in m2.effects() {
                effects.push(hermitian_part(&self.dual(a, b)));
            }
        }
        Ok(JointPovm::new(m1.outcomes(), m2.outcomes(), effects)?)
    }

    /// The joint observable plus the trivial noises `T_i(j) = tr(M_i(j))/d`
    /// that make it a witness at `(c(d), c(d))`.
    pub fn witness(
        &self,
        m1: &Povm,
        m2: &Povm,
    ) -> Result<(JointPovm, TrivialNoise, TrivialNoise), CloningError> {
        let joint = self.joint_observable(m1, m2)?;
        Ok((joint, m1.uniform_trivial(), m2.uniform_trivial()))
    }
}

/// Single-clone state of `rho` under the universal cloner on `H_d`.
pub fn clone_state(rho: &ComplexMatrix, d: usize) -> Result<ComplexMatrix, CloningError> {
    CloningDevice::new(d)?.clone_state(rho)
}

/// Joint observable of `m1` and `m2` induced by the universal cloner.
pub fn cloning_joint_observable(m1: &Povm, m2: &Povm) -> Result<JointPovm, CloningError> {
    if m1.dim() != m2.dim() {
        return Err(crate::error::PovmError::DimensionMismatch {
            left: m1.dim(),
            right: m2.dim(),
        }
        .into());
    }
    CloningDevice::new(m1.dim())?.joint_observable(m1, m2)
}

fn check_density(rho: &ComplexMatrix, d: usize) -> Result<(), CloningError> {
    if rho.dim() != d {
        return Err(crate::error::LinalgError::DimensionMismatch {
            expected: d,
            found: rho.dim(),
        }
        .into());
    }
    if (rho.trace_re() - 1.0).abs() > DENSITY_TOL {
        return Err(CloningError::NotDensity("trace is not 1"));
    }
    if rho.min_eigenvalue()? < -DENSITY_TOL {
        return Err(CloningError::NotDensity("not positive semidefinite"));
    }
    Ok(())
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    let mut h = m + &m.adjoint();
    h.scale_mut(0.5);
    h
}
