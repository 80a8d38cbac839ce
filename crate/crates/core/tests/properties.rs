use incompat_core::{
    cloning_coefficient, cloning_joint_observable, fourier_mub_pair, jmd_bisection,
    mub_jmd_analytic, number_povm, phase_povm_binned, random_povm, random_povm_pair,
    region_boundary, CloningDevice, ComplexMatrix, Keep, SolverConfig, C64,
};
use proptest::prelude::*;

/// Hermitian matrix from `dim²` free real parameters.
fn hermitian(dim: usize, params: &[f64]) -> ComplexMatrix {
    let mut it = params.iter().copied();
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = C64::new(it.next().unwrap(), 0.0);
        for j in (i + 1)..dim {
            let z = C64::new(it.next().unwrap(), it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn hermitian_strategy(dims: std::ops::Range<usize>) -> impl Strategy<Value = ComplexMatrix> {
    dims.prop_flat_map(|d| {
        prop::collection::vec(-1.0f64..1.0, d * d).prop_map(move |p| hermitian(d, &p))
    })
}

fn integer_hermitian_strategy() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..4).prop_flat_map(|d| {
        prop::collection::vec(-8i32..8, d * d)
            .prop_map(move |p| hermitian(d, &p.iter().map(|&x| f64::from(x)).collect::<Vec<_>>()))
    })
}

/// Density matrix `E/tr E` from an effect of a random POVM.
fn density(d: usize, seed: u64) -> ComplexMatrix {
    let e = random_povm(d, 2, seed).unwrap().effect(0).clone();
    let t = e.trace_re();
    e.scale(1.0 / t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_of_tensor_product(a in hermitian_strategy(1..5), b in hermitian_strategy(1..5)) {
        let ab = a.tensor_product(&b);
        let first = ab.partial_trace((a.dim(), b.dim()), Keep::First).unwrap();
        prop_assert!(first.distance(&a.scale(b.trace_re())) <= 1e-10);
        let second = ab.partial_trace((a.dim(), b.dim()), Keep::Second).unwrap();
        prop_assert!(second.distance(&b.scale(a.trace_re())) <= 1e-10);
    }

    // Small Gaussian-integer entries keep every product exact.
    #[test]
    fn tensor_product_associates_exactly(
        a in integer_hermitian_strategy(),
        b in integer_hermitian_strategy(),
        c in integer_hermitian_strategy(),
    ) {
        let left = a.tensor_product(&b).tensor_product(&c);
        let right = a.tensor_product(&b.tensor_product(&c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn psd_projection_is_psd_and_fixes_psd_inputs(m in hermitian_strategy(1..9)) {
        let p = m.psd_project().unwrap();
        prop_assert!(p.min_eigenvalue().unwrap() >= -1e-10);
        prop_assert!(p.psd_project().unwrap().distance(&p) <= 1e-10);
        // Nearest point: m − p is negative semidefinite.
        prop_assert!((&m - &p).eigh().unwrap().values[0] <= 1e-10);
    }

    #[test]
    fn uniform_trivial_weights_sum_to_one(d in 1usize..6, outcomes in 1usize..6, seed in any::<u64>()) {
        let m = random_povm(d, outcomes, seed).unwrap();
        let w = m.uniform_trivial();
        prop_assert!((w.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(w.weights().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn clone_state_matches_closed_form(d in 2usize..6, seed in any::<u64>()) {
        let rho = density(d, seed);
        let dev = CloningDevice::new(d).unwrap();
        let c = dev.coefficient();
        let mut expected = rho.scale(c);
        expected.add_identity((1.0 - c) / d as f64);
        prop_assert!(dev.clone_state(&rho).unwrap().distance(&expected) <= 1e-10);
    }

    #[test]
    fn cloning_joint_observable_is_valid(
        d in 2usize..6,
        k1 in 1usize..6,
        k2 in 1usize..6,
        seed in any::<u64>(),
    ) {
        let (m1, m2) = random_povm_pair(d, (k1, k2), seed).unwrap();
        let g = cloning_joint_observable(&m1, &m2).unwrap();
        prop_assert!(g.validate().ok);
        let c = cloning_coefficient(d as u64);
        for (got, m) in [(g.margin_first().unwrap(), &m1), (g.margin_second().unwrap(), &m2)] {
            for (e_got, e) in got.effects().iter().zip(m.effects()) {
                let mut want = e.scale(c);
                want.add_identity((1.0 - c) * e.trace_re() / d as f64);
                prop_assert!(e_got.distance(&want) <= 1e-10);
            }
        }
    }

    #[test]
    fn analytic_degrees_decrease_towards_half(d in 2u64..1_000_000) {
        let (a, b) = (mub_jmd_analytic(d).unwrap(), mub_jmd_analytic(d + 1).unwrap());
        prop_assert!(a > b && b > 0.5);
        let (c, e) = (cloning_coefficient(d), cloning_coefficient(d + 1));
        prop_assert!(c > e && e > 0.5);
    }
}

#[test]
fn phase_effects_are_psd_up_to_32() {
    for d in [1, 2, 5, 16, 32] {
        for bins in [2, 3, 8, 32] {
            let m = phase_povm_binned(d, bins);
            let report = m.validate();
            assert!(report.ok, "d={d} bins={bins}: {report:?}");
        }
    }
}

#[test]
fn mub_brackets_contain_the_analytic_degree() {
    let cfg = SolverConfig::default();
    for (d, tol) in [(2, 2e-3), (3, 5e-3), (4, 5e-3), (5, 5e-3)] {
        let pair = fourier_mub_pair(d).unwrap();
        let b = jmd_bisection(&pair.povm_a, &pair.povm_b, &cfg, tol).unwrap();
        let exact = mub_jmd_analytic(d as u64).unwrap();
        assert!(
            b.contains(exact),
            "d={d}: [{}, {}] vs {exact}",
            b.certified_lower,
            b.heuristic_upper
        );
        assert!(b.width() <= tol);
    }
}

#[test]
fn brackets_are_symmetric_under_swapping() {
    let cfg = SolverConfig::default();
    let mut pairs = vec![(number_povm(2), phase_povm_binned(2, 4))];
    let mub = fourier_mub_pair(3).unwrap();
    pairs.push((mub.povm_a, mub.povm_b));
    for seed in [0, 2] {
        pairs.push(random_povm_pair(2, (2, 3), seed).unwrap());
    }
    for (a, b) in &pairs {
        let ab = jmd_bisection(a, b, &cfg, 5e-3).unwrap();
        let ba = jmd_bisection(b, a, &cfg, 5e-3).unwrap();
        assert!(
            ab.certified_lower <= ba.heuristic_upper && ba.certified_lower <= ab.heuristic_upper,
            "[{}, {}] vs [{}, {}]",
            ab.certified_lower,
            ab.heuristic_upper,
            ba.certified_lower,
            ba.heuristic_upper
        );
    }
}

#[test]
fn boundary_rows_form_a_staircase() {
    let cfg = SolverConfig::default();
    let tol = 1e-2;
    let m1 = number_povm(2);
    let m2 = phase_povm_binned(2, 4);
    let rows = region_boundary(&m1, &m2, 9, &cfg, tol).unwrap();
    for (i, hi_row) in rows.iter().enumerate() {
        assert!(hi_row.lambda_lower >= 1.0 - hi_row.mu - 1e-15);
        for lo_row in &rows[..i] {
            // A certified point at larger μ bounds every slice below it.
            assert!(
                hi_row.lambda_lower <= lo_row.lambda_upper,
                "{lo_row:?} {hi_row:?}"
            );
            assert!(
                hi_row.lambda_upper <= lo_row.lambda_upper + tol,
                "{lo_row:?} {hi_row:?}"
            );
        }
    }
}
