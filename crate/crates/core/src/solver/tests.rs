use super::*;
use crate::cloning::{cloning_coefficient, CloningDevice};
use crate::constructions::{fourier_mub_pair, mub_jmd_analytic, number_povm, random_povm};
use crate::linalg::ComplexMatrix;
use crate::povm::JointPovm;

fn problem(m1: &Povm, m2: &Povm, lambda: f64, mu: f64) -> FeasibilityProblem {
    FeasibilityProblem::new(
        m1.clone(),
        m2.clone(),
        NoisePoint::new(lambda, mu).unwrap(),
        true,
    )
    .unwrap()
}

fn iterative() -> SolverConfig {
    SolverConfig {
        constructive_shortcuts: false,
        ..SolverConfig::default()
    }
}

fn assert_certified(result: &FeasibilityResult, prob: &FeasibilityProblem) {
    assert_eq!(result.verdict, Verdict::Feasible);
    let w = result.witness.as_ref().expect("feasible carries a witness");
    assert!(certify_witness(
        &w.joint,
        &w.noise_first,
        &w.noise_second,
        prob
    ));
}

#[test]
fn config_rejects_inverted_tolerances() {
    let cfg = SolverConfig {
        tol_feasible: 1e-4,
        tol_infeasible: 1e-5,
        ..SolverConfig::default()
    };
    assert!(matches!(
        cfg.validate(),
        Err(SolverError::Tolerances { .. })
    ));
    let m = number_povm(2);
    let p = problem(&m, &m, 0.9, 0.9);
    assert!(feasibility_test(&p, &cfg).is_err());
}

#[test]
fn problem_rejects_mismatched_pairs() {
    let a = number_povm(2);
    let b = number_povm(3);
    let point = NoisePoint::new(0.5, 0.5).unwrap();
    assert!(FeasibilityProblem::new(a.clone(), b, point, true).is_err());
    let broken = Povm::from_effects(alloc::vec![ComplexMatrix::identity(2); 2]).unwrap();
    assert!(FeasibilityProblem::new(a, broken, point, true).is_err());
}

#[test]
fn zero_coordinates_short_circuit() {
    let pair = fourier_mub_pair(3).unwrap();
    for (l, m) in [(1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (0.7, 0.0)] {
        let p = problem(&pair.povm_a, &pair.povm_b, l, m);
        let r = feasibility_test(&p, &iterative()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_certified(&r, &p);
    }
}

#[test]
fn triangle_points_by_construction_and_by_iteration() {
    let m1 = random_povm(2, 3, 21).unwrap();
    let m2 = random_povm(2, 2, 22).unwrap();
    for (l, m) in [(0.5, 0.5), (0.3, 0.6), (0.9, 0.1)] {
        let p = problem(&m1, &m2, l, m);
        assert_certified(&feasibility_test(&p, &SolverConfig::default()).unwrap(), &p);
        let r = feasibility_test(&p, &iterative()).unwrap();
        assert!(r.iterations > 0);
        assert_certified(&r, &p);
    }
}

#[test]
fn qubit_mub_verdicts() {
    let pair = fourier_mub_pair(2).unwrap();
    let (a, b) = (&pair.povm_a, &pair.povm_b);
    let c = cloning_coefficient(2);
    let p = problem(a, b, c, c);
    assert_certified(&feasibility_test(&p, &SolverConfig::default()).unwrap(), &p);
    let p = problem(a, b, 0.72, 0.72);
    let r = feasibility_test(&p, &SolverConfig::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Infeasible, "residual {}", r.residual);
    assert!(r.witness.is_none());
}

#[test]
fn fixed_noise_mode_uses_pinned_noises() {
    let pair = fourier_mub_pair(2).unwrap();
    let point = NoisePoint::diagonal(0.68).unwrap();
    let p =
        FeasibilityProblem::new(pair.povm_a.clone(), pair.povm_b.clone(), point, false).unwrap();
    let r = feasibility_test(&p, &SolverConfig::default()).unwrap();
    assert_certified(&r, &p);
    let w = r.witness.unwrap();
    assert_eq!(w.noise_first.weights(), &[0.5, 0.5]);
}

#[test]
fn certifier_accepts_constructions_and_rejects_zero_grid() {
    for d in 2..=4 {
        let m1 = random_povm(d, 3, d as u64).unwrap();
        let m2 = random_povm(d, 2, 100 + d as u64).unwrap();
        let c = cloning_coefficient(d as u64);
        let (g, t1, t2) = CloningDevice::new(d).unwrap().witness(&m1, &m2).unwrap();
        assert!(certify_witness(&g, &t1, &t2, &problem(&m1, &m2, c, c)));
        // Wrong point: the same grid does not certify (λ, μ) = (1, 1).
        assert!(!certify_witness(&g, &t1, &t2, &problem(&m1, &m2, 1.0, 1.0)));

        let on_edge = problem(&m1, &m2, 0.4, 0.6);
        let w = triangle_witness(&m1, &m2, on_edge.point(), &t1, &t2).unwrap();
        assert!(certify_witness(
            &w.joint,
            &w.noise_first,
            &w.noise_second,
            &on_edge
        ));

        let zero = JointPovm::new(3, 2, alloc::vec![ComplexMatrix::zeros(d); 6]).unwrap();
        assert!(!certify_witness(&zero, &t1, &t2, &on_edge));
    }
}

#[test]
fn certifier_rejects_shape_mismatch() {
    let m1 = random_povm(2, 3, 1).unwrap();
    let m2 = random_povm(2, 2, 2).unwrap();
    let p = problem(&m1, &m2, 0.5, 0.5);
    let g = JointPovm::new(
        2,
        2,
        alloc::vec![ComplexMatrix::scaled_identity(2, 0.25); 4],
    )
    .unwrap();
    assert!(!certify_witness(
        &g,
        &TrivialNoise::uniform(2),
        &TrivialNoise::uniform(2),
        &p
    ));
}

#[test]
fn remixing_moves_witnesses_down() {
    let m1 = random_povm(3, 2, 8).unwrap();
    let m2 = random_povm(3, 3, 9).unwrap();
    let c = cloning_coefficient(3);
    let top = NoisePoint::diagonal(c).unwrap();
    let (g, t1, t2) = CloningDevice::new(3).unwrap().witness(&m1, &m2).unwrap();
    let w = Witness {
        joint: g,
        noise_first: t1,
        noise_second: t2,
    };
    for (l, m) in [(0.6, 0.2), (c, 0.0), (0.1, 0.1), (0.0, c), (c, c)] {
        let to = NoisePoint::new(l, m).unwrap();
        let moved = remix_witness(&w, &m1, &m2, top, to).unwrap();
        assert!(
            check_witness(&moved, &problem(&m1, &m2, l, m)).ok,
            "({l}, {m})"
        );
    }
    assert!(remix_witness(&w, &m1, &m2, top, NoisePoint::diagonal(0.9).unwrap()).is_none());
}

#[test]
fn commuting_pair_has_degree_one() {
    let n = number_povm(3);
    let b = jmd_bisection(&n, &n, &SolverConfig::default(), 1e-3).unwrap();
    assert_eq!((b.certified_lower, b.heuristic_upper), (1.0, 1.0));
}

#[test]
fn qubit_mub_bracket() {
    let pair = fourier_mub_pair(2).unwrap();
    let b = jmd_bisection(&pair.povm_a, &pair.povm_b, &SolverConfig::default(), 2e-3).unwrap();
    let exact = mub_jmd_analytic(2).unwrap();
    assert!(b.contains(exact), "{b:?}");
    assert!(b.certified_lower >= 0.5 && b.certified_lower <= b.heuristic_upper);
}
