//! Witnesses of joint measurability and the rounding certifier that gates
//! every `Feasible` verdict.

use alloc::vec::Vec;

use super::FeasibilityProblem;
use crate::linalg::{jacobi_min_eigenvalue, psd_project_unchecked, ComplexMatrix};
use crate::povm::{JointPovm, NoisePoint, Povm, TrivialNoise};

/// Certified blocks may dip this far below zero.
pub const CERTIFY_PSD_TOL: f64 = 1e-8;
/// Frobenius tolerance on each margin equation.
pub const CERTIFY_MARGIN_TOL: f64 = 1e-6;

/// A joint observable `G` with trivial noises `p`, `q` such that the margins
/// of `G` are `λM₁ + (1−λ)p·I` and `μM₂ + (1−μ)q·I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub joint: JointPovm,
    pub noise_first: TrivialNoise,
    pub noise_second: TrivialNoise,
}

/// Outcome of checking a witness, with the measured defects.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateReport {
    pub min_eig: f64,
    pub margin_first: f64,
    pub margin_second: f64,
    pub ok: bool,
}

/// Checks a witness against a problem after rounding: blocks are projected
/// onto the PSD cone and the noises clipped and renormalized. Returns
/// `false` on any shape mismatch.
pub fn certify_witness(
    joint: &JointPovm,
    noise_first: &TrivialNoise,
    noise_second: &TrivialNoise,
    problem: &FeasibilityProblem,
) -> bool {
    round_and_certify(
        joint.effects(),
        noise_first.weights(),
        noise_second.weights(),
        problem,
    )
    .is_some()
}

/// Rounds raw solver output into a witness and certifies it.
pub(crate) fn round_and_certify(
    blocks: &[ComplexMatrix],
    p: &[f64],
    q: &[f64],
    problem: &FeasibilityProblem,
) -> Option<Witness> {
    let (m1, m2) = (problem.first(), problem.second());
    let (n1, n2, d) = (m1.outcomes(), m2.outcomes(), m1.dim());
    if blocks.len() != n1 * n2 || p.len() != n1 || q.len() != n2 {
        return None;
    }
    if blocks.iter().any(|b| b.dim() != d || !b.is_hermitian()) {
        return None;
    }
    let rounded: Vec<ComplexMatrix> = blocks.iter().map(psd_project_unchecked).collect();
    let joint = JointPovm::new(n1, n2, rounded).ok()?;
    let witness = Witness {
        joint,
        noise_first: TrivialNoise::clip_normalize(p),
        noise_second: TrivialNoise::clip_normalize(q),
    };
    if check_witness(&witness, problem).ok {
        Some(witness)
    } else {
        None
    }
}

/// Measures a witness exactly as given, without rounding.
pub fn check_witness(witness: &Witness, problem: &FeasibilityProblem) -> CertificateReport {
    let point = problem.point();
    let (m1, m2) = (problem.first(), problem.second());
    let joint = &witness.joint;
    let shapes_ok = joint.n1() == m1.outcomes()
        && joint.n2() == m2.outcomes()
        && joint.dim() == m1.dim()
        && witness.noise_first.len() == m1.outcomes()
        && witness.noise_second.len() == m2.outcomes();
    if !shapes_ok {
        return CertificateReport {
            min_eig: f64::NAN,
            margin_first: f64::INFINITY,
            margin_second: f64::INFINITY,
            ok: false,
        };
    }
    let min_eig = joint
        .effects()
        .iter()
        .map(jacobi_min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let margin_first = margin_defect(
        &joint.row_sums(),
        m1,
        point.lambda(),
        witness.noise_first.weights(),
    );
    let margin_second = margin_defect(
        &joint.column_sums(),
        m2,
        point.mu(),
        witness.noise_second.weights(),
    );
    let mut ok = min_eig >= -CERTIFY_PSD_TOL
        && margin_first <= CERTIFY_MARGIN_TOL
        && margin_second <= CERTIFY_MARGIN_TOL;
    if !problem.optimize_noise() {
        let (f1, f2) = problem.fixed_noises();
        ok &= noise_distance(&witness.noise_first, &f1) <= 1e-12
            && noise_distance(&witness.noise_second, &f2) <= 1e-12;
    }
    CertificateReport {
        min_eig,
        margin_first,
        margin_second,
        ok,
    }
}

fn noise_distance(a: &TrivialNoise, b: &TrivialNoise) -> f64 {
    a.weights()
        .iter()
        .zip(b.weights())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `sqrt(Σ_j ‖margin_j − (w·M(j) + (1−w) noise_j I)‖²_F)`.
fn margin_defect(margins: &[ComplexMatrix], m: &Povm, weight: f64, noise: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((margin, effect), &nj) in margins.iter().zip(m.effects()).zip(noise) {
        let mut diff = margin.clone();
        diff.add_scaled(-weight, effect);
        diff.add_identity(-(1.0 - weight) * nj);
        acc += diff.frobenius_norm_sqr();
    }
    libm::sqrt(acc)
}

/// Convex mixture `Σ_i c_i W_i` of grids sharing a shape.
fn mix_grids(terms: &[(f64, &[ComplexMatrix])]) -> Vec<ComplexMatrix> {
    let len = terms[0].1.len();
    let d = terms[0].1[0].dim();
    (0..len)
        .map(|i| {
            let mut acc = ComplexMatrix::zeros(d);
            for (c, grid) in terms {
                if *c != 0.0 {
                    acc.add_scaled(*c, &grid[i]);
                }
            }
            acc
        })
        .collect()
}

/// Grid `G[j,k] = A(j)·B(k)`; callers always pass one family of multiples
/// of the identity, so the products are Hermitian.
fn product_grid(first: &[ComplexMatrix], second: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(first.len() * second.len());
    for a in first {
        for b in second {
            out.push(a.matmul(b));
        }
    }
    out
}

/// `w·M(j) + (1−w)·noise_j·I` for every outcome.
fn noisy_effects(m: &Povm, weight: f64, noise: &TrivialNoise) -> Vec<ComplexMatrix> {
    m.effects()
        .iter()
        .zip(noise.weights())
        .map(|(e, &nj)| {
            let mut out = e.scale(weight);
            out.add_identity((1.0 - weight) * nj);
            out
        })
        .collect()
}

/// Witness for any point with `λ + μ ≤ 1`:
/// `G = λ·M₁(j)q_k + μ·p_j M₂(k) + (1−λ−μ)·p_j q_k I`.
pub fn triangle_witness(
    m1: &Povm,
    m2: &Povm,
    point: NoisePoint,
    p: &TrivialNoise,
    q: &TrivialNoise,
) -> Option<Witness> {
    let (lambda, mu) = (point.lambda(), point.mu());
    if lambda + mu > 1.0 {
        return None;
    }
    let d = m1.dim();
    let p_ops: Vec<ComplexMatrix> = p
        .weights()
        .iter()
        .map(|&w| ComplexMatrix::scaled_identity(d, w))
        .collect();
    let q_ops: Vec<ComplexMatrix> = q
        .weights()
        .iter()
        .map(|&w| ComplexMatrix::scaled_identity(d, w))
        .collect();
    let a = product_grid(m1.effects(), &q_ops);
    let b = product_grid(&p_ops, m2.effects());
    let c = product_grid(&p_ops, &q_ops);
    let rest = (1.0 - lambda - mu).max(0.0);
    let g = mix_grids(&[(lambda, &a), (mu, &b), (rest, &c)]);
    let joint = JointPovm::new(m1.outcomes(), m2.outcomes(), g).ok()?;
    Some(Witness {
        joint,
        noise_first: p.clone(),
        noise_second: q.clone(),
    })
}

/// Witness for a point with a zero coordinate: the product of the noisy
/// nonzero side with the other noise.
pub fn axis_witness(
    m1: &Povm,
    m2: &Povm,
    point: NoisePoint,
    p: &TrivialNoise,
    q: &TrivialNoise,
) -> Option<Witness> {
    let d = m1.dim();
    let g = if point.mu() == 0.0 {
        let q_ops: Vec<ComplexMatrix> = q
            .weights()
            .iter()
            .map(|&w| ComplexMatrix::scaled_identity(d, w))
            .collect();
        product_grid(&noisy_effects(m1, point.lambda(), p), &q_ops)
    } else if point.lambda() == 0.0 {
        let p_ops: Vec<ComplexMatrix> = p
            .weights()
            .iter()
            .map(|&w| ComplexMatrix::scaled_identity(d, w))
            .collect();
        product_grid(&p_ops, &noisy_effects(m2, point.mu(), q))
    } else {
        return None;
    };
    let joint = JointPovm::new(m1.outcomes(), m2.outcomes(), g).ok()?;
    Some(Witness {
        joint,
        noise_first: p.clone(),
        noise_second: q.clone(),
    })
}

/// Moves a witness at `from` to any point `to ≤ from` coordinate-wise by
/// mixing it with the product witnesses at `(λ₀,0)`, `(0,μ₀)` and `(0,0)`.
/// The noises are unchanged.
pub fn remix_witness(
    witness: &Witness,
    m1: &Povm,
    m2: &Povm,
    from: NoisePoint,
    to: NoisePoint,
) -> Option<Witness> {
    if to.lambda() > from.lambda() || to.mu() > from.mu() {
        return None;
    }
    let ratio = |t: f64, f: f64| if f > 0.0 { t / f } else { 0.0 };
    let a = ratio(to.lambda(), from.lambda());
    let b = ratio(to.mu(), from.mu());
    let (p, q) = (&witness.noise_first, &witness.noise_second);
    let d = m1.dim();
    let p_ops: Vec<ComplexMatrix> = p
        .weights()
        .iter()
        .map(|&w| ComplexMatrix::scaled_identity(d, w))
        .collect();
    let q_ops: Vec<ComplexMatrix> = q
        .weights()
        .iter()
        .map(|&w| ComplexMatrix::scaled_identity(d, w))
        .collect();
    let first_only = product_grid(&noisy_effects(m1, from.lambda(), p), &q_ops);
    let second_only = product_grid(&p_ops, &noisy_effects(m2, from.mu(), q));
    let neither = product_grid(&p_ops, &q_ops);
    let g = mix_grids(&[
        (a * b, witness.joint.effects()),
        (a * (1.0 - b), &first_only),
        ((1.0 - a) * b, &second_only),
        ((1.0 - a) * (1.0 - b), &neither),
    ]);
    let joint = JointPovm::new(m1.outcomes(), m2.outcomes(), g).ok()?;
    Some(Witness {
        joint,
        noise_first: p.clone(),
        noise_second: q.clone(),
    })
}
