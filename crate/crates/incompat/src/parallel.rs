//! Region sampling spread over a worker pool.
//!
//! Rows and grid points are independent; results are collected in input
//! order, so the output is identical for any number of workers.

use incompat_core::{
    boundary_row, feasibility_test, grid_points, uniform_grid, BoundaryRow, FeasibilityProblem,
    NoisePoint, Povm, RegionSample, SolverConfig, SolverError,
};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum ParallelError {
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// `jobs = 0` means one worker per available core.
pub fn pool(jobs: usize) -> Result<rayon::ThreadPool, ParallelError> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

fn base_problem(m1: &Povm, m2: &Povm) -> Result<FeasibilityProblem, SolverError> {
    FeasibilityProblem::new(m1.clone(), m2.clone(), NoisePoint::new(0.0, 0.0)?, true)
}

/// Boundary rows at `mu_grid` equally spaced values of `μ`, sorted by `μ`.
pub fn region_boundary_par(
    m1: &Povm,
    m2: &Povm,
    mu_grid: usize,
    cfg: &SolverConfig,
    tol: f64,
    jobs: usize,
) -> Result<Vec<BoundaryRow>, ParallelError> {
    let base = base_problem(m1, m2)?;
    let mus = uniform_grid(mu_grid);
    let rows = pool(jobs)?.install(|| {
        mus.par_iter()
            .map(|&mu| boundary_row(&base, mu, cfg, tol))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(rows)
}

/// Verdicts on the `n × n` grid, `μ` outer and `λ` inner.
pub fn region_grid_par(
    m1: &Povm,
    m2: &Povm,
    n: usize,
    cfg: &SolverConfig,
    jobs: usize,
) -> Result<Vec<RegionSample>, ParallelError> {
    let base = base_problem(m1, m2)?;
    let points = grid_points(n);
    let samples = pool(jobs)?.install(|| {
        points
            .par_iter()
            .map(|&point| {
                let verdict = feasibility_test(&base.at(point), cfg)?.verdict;
                Ok::<_, SolverError>(RegionSample { point, verdict })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(samples)
}
