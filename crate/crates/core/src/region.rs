//! Sampling the joint measurability region `J(M₁, M₂)`.
//!
//! `J` is convex and downward closed, so each slice at fixed `μ` is an
//! interval `[0, λ*(μ)]` with `λ*(μ) ≥ 1 − μ`. Boundary rows bisect that
//! slice; grids record raw verdicts for consistency checks. All output is
//! empirical: the upper ends come from heuristic `Infeasible` verdicts.

use alloc::vec::Vec;

use crate::cloning::cloning_coefficient;
use crate::constructions::mub_jmd_analytic;
use crate::error::SolverError;
use crate::povm::{NoisePoint, Povm};
use crate::solver::{bisect_line, feasibility_test, FeasibilityProblem, SolverConfig, Verdict};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionSample {
    pub point: NoisePoint,
    pub verdict: Verdict,
}

/// Bracket on the boundary `λ*(μ)` at one `μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryRow {
    pub mu: f64,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    /// Probes that ended undecided.
    pub undecided: usize,
}

/// One row of the dimension comparison: the Fourier-MUB degree and the
/// cloning lower bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub d: u64,
    pub eq2: f64,
    pub cloning: f64,
}

/// `n` equally spaced values `i/(n−1)` covering `[0, 1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { 1.0 } else { i as f64 / last })
        .collect()
}

/// All points of the `n × n` grid, `μ` outer and `λ` inner.
pub fn grid_points(n: usize) -> Vec<NoisePoint> {
    let axis = uniform_grid(n);
    let mut out = Vec::with_capacity(n * n);
    for &mu in &axis {
        for &lambda in &axis {
            out.push(NoisePoint::new(lambda, mu).expect("grid inside the unit square"));
        }
    }
    out
}

/// Verdicts on the `n × n` grid, evaluated sequentially.
pub fn region_grid(
    m1: &Povm,
    m2: &Povm,
    n: usize,
    cfg: &SolverConfig,
) -> Result<Vec<RegionSample>, SolverError> {
    let base = FeasibilityProblem::new(m1.clone(), m2.clone(), NoisePoint::new(0.0, 0.0)?, true)?;
    grid_points(n)
        .into_iter()
        .map(|point| {
            let verdict = feasibility_test(&base.at(point), cfg)?.verdict;
            Ok(RegionSample { point, verdict })
        })
        .collect()
}

/// Pairs `(infeasible, feasible)` of sample indices where an `Infeasible`
/// point lies coordinate-wise at or below a `Feasible` one.
pub fn downward_closure_violations(samples: &[RegionSample]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, low) in samples.iter().enumerate() {
        if low.verdict != Verdict::Infeasible {
            continue;
        }
        for (f, high) in samples.iter().enumerate() {
            if high.verdict == Verdict::Feasible
                && low.point.lambda() <= high.point.lambda()
                && low.point.mu() <= high.point.mu()
            {
                out.push((i, f));
            }
        }
    }
    out
}

/// Boundary bracket at a single `μ`: bisection of `λ` over
/// `[max(0, 1−μ), 1]`.
pub fn boundary_row(
    problem: &FeasibilityProblem,
    mu: f64,
    cfg: &SolverConfig,
    tol: f64,
) -> Result<BoundaryRow, SolverError> {
    let lo = (1.0 - mu).max(0.0);
    let bracket = bisect_line(problem, cfg, lo, 1.0, tol, |t| {
        NoisePoint::new(t.clamp(0.0, 1.0), mu).expect("inside the unit square")
    })?;
    Ok(BoundaryRow {
        mu,
        lambda_lower: bracket.certified_lower,
        lambda_upper: bracket.heuristic_upper,
        undecided: bracket.undecided(),
    })
}

/// Boundary rows for `mu_grid` equally spaced values of `μ`, sorted by `μ`.
pub fn region_boundary(
    m1: &Povm,
    m2: &Povm,
    mu_grid: usize,
    cfg: &SolverConfig,
    tol: f64,
) -> Result<Vec<BoundaryRow>, SolverError> {
    let base = FeasibilityProblem::new(m1.clone(), m2.clone(), NoisePoint::new(0.0, 0.0)?, true)?;
    uniform_grid(mu_grid)
        .into_iter()
        .map(|mu| boundary_row(&base, mu, cfg, tol))
        .collect()
}

/// Rows `d = 2..=d_max` of `(2+√d)/(2(1+√d))` against `(2+d)/(2(1+d))`.
pub fn figure3_curves(d_max: u64) -> Vec<CurveRow> {
    (2..=d_max.max(1))
        .map(|d| CurveRow {
            d,
            eq2: mub_jmd_analytic(d).expect("d ≥ 2"),
            cloning: cloning_coefficient(d),
        })
        .collect()
}
