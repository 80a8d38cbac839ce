//! Bisection along a line of noise points.

use alloc::vec::Vec;

use super::{feasibility_test, FeasibilityProblem, SolverConfig, Verdict, Witness};
use crate::error::SolverError;
use crate::povm::{NoisePoint, Povm};

/// Undecided probes tolerated before a bisection gives up.
const UNDECIDED_BUDGET: usize = 6;
/// Hard cap on probes per bisection.
const MAX_PROBES: usize = 64;

/// One evaluated point on the bisection line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub t: f64,
    /// Verdict after the retry, if one was needed.
    pub verdict: Verdict,
    pub residual: f64,
    /// Iterations over both attempts.
    pub iterations: usize,
    /// Whether the first attempt was undecided and the point was rerun.
    pub retried: bool,
}

/// Bracket `[certified_lower, heuristic_upper]` on a line parameter.
///
/// The lower end is backed by a certified witness (`witness`, absent only
/// when the lower end is the caller-supplied start). The upper end is the
/// smallest probe reported `Infeasible`, or the line's end if none was.
#[derive(Clone, Debug)]
pub struct JmdBracket {
    pub certified_lower: f64,
    pub heuristic_upper: f64,
    pub witness: Option<Witness>,
    pub probes: Vec<Probe>,
}

impl JmdBracket {
    pub fn width(&self) -> f64 {
        self.heuristic_upper - self.certified_lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.certified_lower <= x && x <= self.heuristic_upper
    }

    /// Probes still undecided after their retry.
    pub fn undecided(&self) -> usize {
        self.probes
            .iter()
            .filter(|p| p.verdict == Verdict::Undecided)
            .count()
    }

    pub fn total_iterations(&self) -> usize {
        self.probes.iter().map(|p| p.iterations).sum()
    }
}

/// Bisects `t ∈ [lo, hi]` for the largest certified-feasible parameter.
///
/// `lo` must be known feasible. `hi` is probed first. An `Undecided` probe
/// is retried once with four times the iteration budget; if it stays
/// undecided it moves neither end and the next probe is taken halfway
/// between `lo` and the undecided point.
pub fn bisect_line(
    problem: &FeasibilityProblem,
    cfg: &SolverConfig,
    lo: f64,
    hi: f64,
    tol: f64,
    point_at: impl Fn(f64) -> NoisePoint,
) -> Result<JmdBracket, SolverError> {
    let mut bracket = JmdBracket {
        certified_lower: lo,
        heuristic_upper: hi,
        witness: None,
        probes: Vec::new(),
    };
    let retry_cfg = cfg.with_budget_scaled(4);
    let evaluate = |t: f64, bracket: &mut JmdBracket| -> Result<Verdict, SolverError> {
        let p = problem.at(point_at(t));
        let mut result = feasibility_test(&p, cfg)?;
        let mut iterations = result.iterations;
        let retried = result.verdict == Verdict::Undecided;
        if retried {
            result = feasibility_test(&p, &retry_cfg)?;
            iterations += result.iterations;
        }
        bracket.probes.push(Probe {
            t,
            verdict: result.verdict,
            residual: result.residual,
            iterations,
            retried,
        });
        if result.verdict == Verdict::Feasible {
            bracket.witness = result.witness;
        }
        Ok(result.verdict)
    };

    match evaluate(hi, &mut bracket)? {
        Verdict::Feasible => {
            bracket.certified_lower = hi;
            return Ok(bracket);
        }
        Verdict::Infeasible | Verdict::Undecided => {}
    }

    let mut undecided_left = UNDECIDED_BUDGET;
    let mut step = (bracket.heuristic_upper - bracket.certified_lower) / 2.0;
    while bracket.width() > tol && bracket.probes.len() < MAX_PROBES {
        let t = bracket.certified_lower + step;
        match evaluate(t, &mut bracket)? {
            Verdict::Feasible => bracket.certified_lower = t,
            Verdict::Infeasible => bracket.heuristic_upper = t,
            Verdict::Undecided => {
                undecided_left -= 1;
                if undecided_left == 0 {
                    break;
                }
                step /= 2.0;
                continue;
            }
        }
        step = bracket.width() / 2.0;
    }
    Ok(bracket)
}

/// Brackets the joint measurability degree: bisection on `λ = μ` over
/// `[1/2, 1]`, where `1/2` is always feasible by the triangle witness.
pub fn jmd_bisection(
    m1: &Povm,
    m2: &Povm,
    cfg: &SolverConfig,
    tol: f64,
) -> Result<JmdBracket, SolverError> {
    let half = NoisePoint::diagonal(0.5).expect("in range");
    let problem = FeasibilityProblem::new(m1.clone(), m2.clone(), half, true)?;
    bisect_line(&problem, cfg, 0.5, 1.0, tol, |t| {
        NoisePoint::diagonal(t).expect("bisection stays inside [0, 1]")
    })
}
