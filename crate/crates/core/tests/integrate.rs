use ibc_lab::integrate::{
    avg_cardinality, hammersley_points, radical_inverse, sample_mean_integrate,
    star_discrepancy_1d, van_der_corput_discrepancy_bound, BrownianSheet, IntegrandSample, PRIMES,
};
use rayon::prelude::*;

#[test]
fn sheet_variance_at_the_far_corner_is_one() {
    for d in [1usize, 2] {
        let seeds = 10_000u64;
        let corner = vec![4usize; d];
        let vals: Vec<f64> = (0..seeds)
            .into_par_iter()
            .map(|s| BrownianSheet::generate(d, 4, s).unwrap().node(&corner))
            .collect();
        let mean = vals.iter().sum::<f64>() / seeds as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
        assert!((var - 1.0).abs() <= 0.1, "d={d}: variance {var}");
    }
}

#[test]
fn sheet_covariance_matches_the_product_kernel() {
    // Cov(W(s), W(t)) = prod_j min(s_j, t_j); nodes (1/2, 1) and (1/4, 1/2) on a 4-grid
    let seeds = 20_000u64;
    let pairs: Vec<(f64, f64)> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let w = BrownianSheet::generate(2, 4, s).unwrap();
            (w.node(&[2, 4]), w.node(&[1, 2]))
        })
        .collect();
    let cov = pairs.iter().map(|(a, b)| a * b).sum::<f64>() / seeds as f64;
    assert!((cov - 0.125).abs() <= 0.02, "covariance {cov}");
}

#[test]
fn van_der_corput_discrepancy_stays_below_the_bound() {
    for &p in &PRIMES {
        let pts: Vec<f64> = (0..4096u64).map(|i| radical_inverse(i, p)).collect();
        let worst = (16..=4096usize)
            .into_par_iter()
            .map(|n| star_discrepancy_1d(&pts[..n]) / van_der_corput_discrepancy_bound(p, n))
            .reduce(|| 0.0, f64::max);
        assert!(
            worst <= 1.0,
            "p={p}: discrepancy reaches {worst} of the bound"
        );
    }
}

#[test]
fn hammersley_first_axis_is_the_regular_grid() {
    let pts = hammersley_points(64, 4).unwrap();
    let first = pts.projection(0);
    assert!(first.iter().enumerate().all(|(i, x)| *x == i as f64 / 64.0));
    assert_eq!(star_discrepancy_1d(&first), 1.0 / 64.0);
}

#[test]
fn sample_mean_charges_one_evaluation_per_point() {
    let f = IntegrandSample::analytic("sum", 3, Some(1.5), |x| x.iter().sum());
    let pts = hammersley_points(1000, 3).unwrap();
    let (est, ledger) = sample_mean_integrate(&f, &pts).unwrap();
    assert_eq!(ledger.info_count(), 1000);
    assert!((est - 1.5).abs() < 0.01);
}

#[test]
fn cardinality_grows_as_eps_shrinks() {
    let mut last = 0;
    for e in 1..=12 {
        let n = avg_cardinality(2f64.powi(-e), 2);
        assert!(n > last);
        last = n;
    }
}
