//! Joint measurability of noisy finite-dimensional quantum observables.
//!
//! The crate decides whether `λM₁ + (1−λ)T₁` and `μM₂ + (1−μ)T₂` admit a
//! joint observable for some trivial observables `T₁, T₂`, brackets the
//! joint measurability degree by bisection, maps the joint measurability
//! region, and builds the universal-cloning joint observable that gives the
//! dimension-dependent lower bound `(2+d)/(2(1+d))`.
//!
//! Everything here is `no_std` + `alloc`; file formats, the CLI and parallel
//! scheduling live in the `incompat` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cloning;
pub mod constructions;
pub mod error;
pub mod linalg;
pub mod povm;
pub mod region;
pub mod solver;

#[cfg(test)]
pub(crate) mod testutil;

pub use cloning::{
    clone_state, cloning_coefficient, cloning_joint_observable, symmetric_projector, CloningDevice,
};
pub use constructions::{
    fourier_mub_pair, mub_jmd_analytic, number_povm, phase_povm_binned, random_povm,
    random_povm_pair, MubPair,
};
pub use error::{CloningError, ConstructionError, LinalgError, PovmError, SolverError};
pub use linalg::{ComplexMatrix, Eigh, Keep, C64};
pub use povm::{JointPovm, Label, NoisePoint, Povm, TrivialNoise, ValidationReport};
pub use region::{
    boundary_row, downward_closure_violations, figure3_curves, grid_points, region_boundary,
    region_grid, uniform_grid, BoundaryRow, CurveRow, RegionSample,
};
pub use solver::{
    bisect_line, certify_witness, check_witness, feasibility_test, jmd_bisection,
    CertificateReport, FeasibilityProblem, FeasibilityResult, JmdBracket, Probe, SolverConfig,
    Verdict, Witness,
};
