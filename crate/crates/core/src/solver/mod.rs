//! Feasibility of noisy joint measurements and bisection for the joint
//! measurability degree.
//!
//! For a noise point `(λ, μ)` the engine looks for an `n1 × n2` grid of PSD
//! blocks `G[j,k]` and probability vectors `p`, `q` with
//!
//! ```text
//! Σ_k G[j,k] = λ M₁(j) + (1−λ) p_j I
//! Σ_j G[j,k] = μ M₂(k) + (1−μ) q_k I
//! ```
//!
//! using Dykstra's alternating projections between the product cone
//! (PSD blocks, nonnegative `p`, `q`) and the affine set of the equations.
//! A `Feasible` verdict always carries a witness that passed
//! [`certify_witness`]. `Infeasible` is heuristic: projections cannot prove
//! emptiness, so it only means the residual stalled above
//! `tol_infeasible`. Everything in between is `Undecided`.

mod affine;
mod bisect;
mod witness;

use alloc::vec::Vec;

pub use bisect::{bisect_line, jmd_bisection, JmdBracket, Probe};
pub use witness::{
    axis_witness, certify_witness, check_witness, remix_witness, triangle_witness,
    CertificateReport, Witness, CERTIFY_MARGIN_TOL, CERTIFY_PSD_TOL,
};

use affine::{AffineProjector, Dual, MarginOperator, Primal, Vector};
use witness::round_and_certify;

use crate::error::{PovmError, SolverError};
use crate::linalg::{psd_project_warm, ComplexMatrix};
use crate::povm::{NoisePoint, Povm, TrivialNoise};

/// Iteration budget and verdict thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Affine residual at or below which a certification attempt is made.
    pub tol_feasible: f64,
    /// Residual a stalled run must exceed to be called `Infeasible`.
    pub tol_infeasible: f64,
    pub max_iters: usize,
    /// Iterations between stall checks.
    pub stall_window: usize,
    /// A window whose best residual improved by a factor above this counts
    /// as stalled.
    pub stall_factor: f64,
    /// Answer points inside the triangle `λ + μ ≤ 1` with the explicit
    /// mixing witness instead of iterating.
    pub constructive_shortcuts: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_feasible: 1e-7,
            tol_infeasible: 1e-5,
            max_iters: 50_000,
            stall_window: 2_000,
            stall_factor: 0.999,
            constructive_shortcuts: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ordered = self.tol_feasible < self.tol_infeasible;
        if !ordered {
            return Err(SolverError::Tolerances {
                feasible: self.tol_feasible,
                infeasible: self.tol_infeasible,
            });
        }
        Ok(())
    }

    /// Same thresholds with the iteration budget multiplied by `factor`.
    pub fn with_budget_scaled(&self, factor: usize) -> Self {
        Self {
            max_iters: self.max_iters.saturating_mul(factor),
            ..*self
        }
    }
}

/// A pair of observables and the noise point at which to test them.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    m1: Povm,
    m2: Povm,
    point: NoisePoint,
    optimize_noise: bool,
    fixed: (TrivialNoise, TrivialNoise),
}

impl FeasibilityProblem {
    /// With `optimize_noise` the trivial observables are decision variables;
    /// otherwise they are pinned to `T_i(j) = tr(M_i(j))/d`.
    pub fn new(
        m1: Povm,
        m2: Povm,
        point: NoisePoint,
        optimize_noise: bool,
    ) -> Result<Self, SolverError> {
        if m1.dim() != m2.dim() {
            return Err(PovmError::DimensionMismatch {
                left: m1.dim(),
                right: m2.dim(),
            }
            .into());
        }
        m1.require_valid()?;
        m2.require_valid()?;
        let fixed = (m1.uniform_trivial(), m2.uniform_trivial());
        Ok(Self {
            m1,
            m2,
            point,
            optimize_noise,
            fixed,
        })
    }

    /// The same pair at another noise point, skipping revalidation.
    pub fn at(&self, point: NoisePoint) -> Self {
        Self {
            point,
            ..self.clone()
        }
    }

    pub fn first(&self) -> &Povm {
        &self.m1
    }

    pub fn second(&self) -> &Povm {
        &self.m2
    }

    pub fn point(&self) -> NoisePoint {
        self.point
    }

    pub fn optimize_noise(&self) -> bool {
        self.optimize_noise
    }

    /// The pinned noises `tr(M_i(j))/d` (also used by the constructive
    /// witnesses).
    pub fn fixed_noises(&self) -> (TrivialNoise, TrivialNoise) {
        self.fixed.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Undecided,
}

#[derive(Clone, Debug)]
pub struct FeasibilityResult {
    pub verdict: Verdict,
    /// Present exactly when the verdict is `Feasible`.
    pub witness: Option<Witness>,
    /// Best affine residual `‖A(G,p,q) − b‖` seen on the cone side.
    pub residual: f64,
    pub iterations: usize,
}

impl FeasibilityResult {
    fn feasible(witness: Witness, residual: f64, iterations: usize) -> Self {
        Self {
            verdict: Verdict::Feasible,
            witness: Some(witness),
            residual,
            iterations,
        }
    }
}

/// Decides whether the problem's noise point admits a joint observable.
pub fn feasibility_test(
    problem: &FeasibilityProblem,
    cfg: &SolverConfig,
) -> Result<FeasibilityResult, SolverError> {
    cfg.validate()?;
    if let Some(done) = shortcut(problem, cfg) {
        return Ok(done);
    }
    Ok(Dykstra::new(problem).run(problem, cfg))
}

fn shortcut(problem: &FeasibilityProblem, cfg: &SolverConfig) -> Option<FeasibilityResult> {
    let point = problem.point();
    let (p, q) = (&problem.fixed.0, &problem.fixed.1);
    let (m1, m2) = (problem.first(), problem.second());
    let witness = if point.lambda() == 0.0 || point.mu() == 0.0 {
        axis_witness(m1, m2, point, p, q)?
    } else if cfg.constructive_shortcuts && point.in_triangle() {
        triangle_witness(m1, m2, point, p, q)?
    } else {
        return None;
    };
    let report = check_witness(&witness, problem);
    report.ok.then(|| {
        FeasibilityResult::feasible(witness, report.margin_first.max(report.margin_second), 0)
    })
}

/// Iterations between cold restarts of the per-block eigenbases, bounding
/// the drift of their unitarity.
const BASIS_REFRESH: usize = 128;

/// Dykstra's alternating projections. The affine set needs no correction
/// term, so only the cone step carries an increment.
struct Dykstra {
    affine: AffineProjector,
    n2: usize,
    /// Eigenbasis of each block from the previous cone projection.
    bases: Vec<ComplexMatrix>,
}

impl Dykstra {
    fn new(problem: &FeasibilityProblem) -> Self {
        let (m1, m2) = (problem.first(), problem.second());
        let (lambda, mu) = (problem.point().lambda(), problem.point().mu());
        let (d, n1, n2) = (m1.dim(), m1.outcomes(), m2.outcomes());
        let op = MarginOperator {
            d,
            n1,
            n2,
            noise1: 1.0 - lambda,
            noise2: 1.0 - mu,
        };
        let rhs = Dual {
            rows: m1.effects().iter().map(|e| e.scale(lambda)).collect(),
            cols: m2.effects().iter().map(|e| e.scale(mu)).collect(),
            sum_p: 1.0,
            sum_q: 1.0,
        };
        let bases = alloc::vec![ComplexMatrix::identity(d); n1 * n2];
        Self {
            affine: AffineProjector::new(op, rhs),
            n2,
            bases,
        }
    }

    /// `G[j,k] = (λM₁(j) + (1−λ)I/n1)/n2`, `p`, `q` uniform.
    fn initial_point(problem: &FeasibilityProblem) -> Primal {
        let m1 = problem.first();
        let (n1, n2) = (m1.outcomes(), problem.second().outcomes());
        let lambda = problem.point().lambda();
        let mut g = Vec::with_capacity(n1 * n2);
        for e in m1.effects() {
            let mut block = e.scale(lambda);
            block.add_identity((1.0 - lambda) / n1 as f64);
            block.scale_mut(1.0 / n2 as f64);
            for _ in 0..n2 {
                g.push(block.clone());
            }
        }
        Primal {
            g,
            p: alloc::vec![1.0 / n1 as f64; n1],
            q: alloc::vec![1.0 / n2 as f64; n2],
        }
    }

    fn project_cone(&mut self, z: &Primal, problem: &FeasibilityProblem) -> Primal {
        let g =
            z.g.iter()
                .zip(&mut self.bases)
                .map(|(b, u)| psd_project_warm(b, u))
                .collect();
        let (p, q) = if problem.optimize_noise() {
            (
                z.p.iter().map(|x| x.max(0.0)).collect(),
                z.q.iter().map(|x| x.max(0.0)).collect(),
            )
        } else {
            (
                problem.fixed.0.weights().to_vec(),
                problem.fixed.1.weights().to_vec(),
            )
        };
        Primal { g, p, q }
    }

    fn run(mut self, problem: &FeasibilityProblem, cfg: &SolverConfig) -> FeasibilityResult {
        debug_assert_eq!(self.n2, problem.second().outcomes());
        let mut x = Self::initial_point(problem);
        let mut increment = {
            let d = problem.first().dim();
            Primal::zeros(d, problem.first().outcomes(), self.n2)
        };
        let mut best = f64::INFINITY;
        let mut checkpoint = f64::INFINITY;
        let mut stalled = false;
        let window = cfg.stall_window.max(1);

        for it in 1..=cfg.max_iters {
            if it % BASIS_REFRESH == 0 {
                let d = problem.first().dim();
                self.bases
                    .iter_mut()
                    .for_each(|u| *u = ComplexMatrix::identity(d));
            }
            let mut z = self.affine.project(&x);
            z.axpy(1.0, &increment);
            x = self.project_cone(&z, problem);
            increment = z;
            increment.axpy(-1.0, &x);

            let residual = self.affine.violation(&x).norm();
            best = best.min(residual);
            if residual <= cfg.tol_feasible {
                if let Some(w) = round_and_certify(&x.g, &x.p, &x.q, problem) {
                    return FeasibilityResult::feasible(w, residual, it);
                }
            }
            if it % window == 0 {
                stalled = best > checkpoint * cfg.stall_factor;
                if stalled && best > cfg.tol_infeasible {
                    return infeasible(best, it);
                }
                checkpoint = best;
            }
        }
        if best > cfg.tol_infeasible && stalled {
            infeasible(best, cfg.max_iters)
        } else {
            FeasibilityResult {
                verdict: Verdict::Undecided,
                witness: None,
                residual: best,
                iterations: cfg.max_iters,
            }
        }
    }
}

fn infeasible(residual: f64, iterations: usize) -> FeasibilityResult {
    FeasibilityResult {
        verdict: Verdict::Infeasible,
        witness: None,
        residual,
        iterations,
    }
}

#[cfg(test)]
mod tests;
