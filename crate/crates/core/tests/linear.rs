mod common;

use ibc_lab::linear::{
    chebyshev_solve, gen_rho_instance, gen_worst_case_spectrum_for, minres_solve, MatrixClassSpec,
};
use ibc_lab::mtx::{read_matrix_market, write_symmetric};
use ibc_lab::{rng, LinearOracle};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

#[test]
fn residual_history_is_orthogonally_invariant() {
    for seed in 0..5 {
        let (a, b) = common::random_instance(30, 40 + seed);
        let q = rng::random_orthogonal(&mut rng::stream(seed, 9), 30);
        let qa = &q * &a * q.transpose();
        let qb: Vec<f64> = (&q * DVector::from_column_slice(&b))
            .iter()
            .copied()
            .collect();
        let r1 = minres_solve(&LinearOracle::dense(a).unwrap(), &b, 1e-300, 20).unwrap();
        let r2 = minres_solve(&LinearOracle::dense(qa).unwrap(), &qb, 1e-300, 20).unwrap();
        for (x, y) in r1
            .trace
            .residual_history
            .iter()
            .zip(&r2.trace.residual_history)
        {
            assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
        }
    }
}

#[test]
fn similarity_instances_need_the_same_steps() {
    for class in [
        MatrixClassSpec::F1 { m: 50.0 },
        MatrixClassSpec::F2 { m: 10.0 },
    ] {
        let diag = gen_worst_case_spectrum_for(&class, 120, 1e-2, 3, false).unwrap();
        let dense = gen_worst_case_spectrum_for(&class, 120, 1e-2, 3, true).unwrap();
        let s1 = minres_solve(&diag.oracle, &diag.b, 1e-2, 120)
            .unwrap()
            .steps;
        let s2 = minres_solve(&dense.oracle, &dense.b, 1e-2, 120)
            .unwrap()
            .steps;
        assert_eq!(s1, s2, "{class:?}");
    }
}

#[test]
fn solution_satisfies_the_system_directly() {
    let (a, b) = common::random_instance(40, 11);
    let a = a + DMatrix::identity(40, 40) * 3.0;
    let rep = minres_solve(&LinearOracle::dense(a.clone()).unwrap(), &b, 1e-10, 40).unwrap();
    assert!(rep.converged);
    assert!(common::residual(&a, &rep.x, &b) <= 1e-9);
    assert!((rep.final_residual - common::residual(&a, &rep.x, &b)).abs() <= 1e-12);
}

#[test]
fn chebyshev_guarantee_holds_on_rotated_instances() {
    for seed in 0..5 {
        let inst = gen_rho_instance(0.8, 80, seed, true).unwrap();
        let rep = chebyshev_solve(&inst.oracle, &inst.b, 0.8, 1e-3).unwrap();
        assert!(
            common::residual(&inst.dense(), &rep.x, &inst.b) <= rep.residual_bound * (1.0 + 1e-9)
        );
        assert!(rep.residual_bound <= 1e-3);
        assert!(rep.promise_notice().is_some());
    }
}

#[test]
fn solves_a_matrix_market_file() {
    let n = 30;
    let lap = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lap.mtx");
    std::fs::write(&path, write_symmetric(&lap)).unwrap();
    let oracle = read_matrix_market(&path).unwrap().into_oracle();
    let b = vec![1.0; n];
    let rep = minres_solve(&oracle, &b, 1e-10, n).unwrap();
    assert!(rep.converged);
    assert!(common::residual(&lap, &rep.x, &b) <= 1e-8 * (n as f64).sqrt());
    // an invariant subspace of dimension at most n is exhausted by step n
    assert!(rep.steps <= n);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn residuals_never_increase(n in 8usize..40, seed in 0u64..10_000) {
        let (a, b) = common::random_instance(n, seed);
        let rep = minres_solve(&LinearOracle::dense(a).unwrap(), &b, 1e-300, n).unwrap();
        let h = &rep.trace.residual_history;
        prop_assert!((h[0] - 1.0).abs() < 1e-15);
        for w in h.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
        }
        prop_assert!(rep.steps <= n);
        prop_assert_eq!(rep.ledger.info_count(), rep.steps as u64);
    }

    #[test]
    fn scaling_the_system_leaves_steps_unchanged(s in 0.01f64..100.0, seed in 0u64..1000) {
        let inst = gen_rho_instance(0.6, 50, seed, false).unwrap();
        let scaled_b: Vec<f64> = inst.b.iter().map(|v| v * s).collect();
        let r1 = minres_solve(&inst.oracle, &inst.b, 1e-6, 50).unwrap();
        let r2 = minres_solve(&inst.oracle, &scaled_b, 1e-6, 50).unwrap();
        prop_assert_eq!(r1.steps, r2.steps);
    }
}
