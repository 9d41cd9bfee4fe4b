//! Calibration of the estimators and tests under their null hypotheses.

use chaoslab_core::rng::replica_rng;
use chaoslab_core::stattest::{
    independence_test, kolmogorov_sf, ks_two_sample, mc_estimate, normal_sf, slope_fit, spearman,
};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

fn normals(seed: u64, stream: u64, n: usize, shift: f64) -> Vec<f64> {
    let mut rng = replica_rng(seed, stream);
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal) + shift)
        .collect()
}

#[test]
fn normal_tail_matches_reference() {
    let n = Normal::new(0.0, 1.0).unwrap();
    for k in -80..=80 {
        let z = k as f64 / 10.0;
        let want = n.sf(z);
        assert!(
            (normal_sf(z) - want).abs() <= 1e-14 + 1e-10 * want,
            "z={z}: {} vs {want}",
            normal_sf(z)
        );
    }
}

#[test]
fn kolmogorov_tail_known_values() {
    // P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01
    assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
    assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-4);
    assert_eq!(kolmogorov_sf(0.0), 1.0);
}

#[test]
fn ks_separates_shifted_normals() {
    let r = ks_two_sample(&normals(1, 0, 1000, 0.0), &normals(1, 1, 1000, 3.0)).unwrap();
    assert!(r.p_value < 1e-6 && r.reject);
}

#[test]
fn ks_rejects_at_its_level_under_the_null() {
    let runs = 400;
    let mut rejects = 0;
    let mut p_sum = 0.0;
    for k in 0..runs {
        let r = ks_two_sample(
            &normals(2, 2 * k, 1000, 0.0),
            &normals(2, 2 * k + 1, 1000, 0.0),
        )
        .unwrap();
        rejects += r.reject as usize;
        p_sum += r.p_value;
    }
    // Binomial(400, 0.01) exceeds 12 with probability below 1e-4
    assert!(rejects <= 12, "{rejects} rejections");
    let mean_p = p_sum / runs as f64;
    assert!((mean_p - 0.5).abs() < 0.06, "mean p {mean_p}");
}

#[test]
fn spearman_rejects_at_its_level_under_the_null() {
    let runs = 200;
    let mut rejects = 0;
    for k in 0..runs {
        let mut rng = replica_rng(3, k);
        let x: Vec<f64> = (0..500).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..500).map(|_| rng.random()).collect();
        rejects += independence_test(&x, &y, 299, k).unwrap().reject as usize;
    }
    assert!(rejects <= 8, "{rejects} rejections");
}

#[test]
fn spearman_detects_monotone_dependence() {
    let x = normals(4, 0, 200, 0.0);
    let y: Vec<f64> = x.iter().map(|v| -v).collect();
    let r = independence_test(&x, &x, 999, 1).unwrap();
    assert!((r.statistic - 1.0).abs() < 1e-12 && r.p_value <= 1.0 / 1000.0 + 1e-12);
    let r = independence_test(&x, &y, 999, 1).unwrap();
    assert!((r.statistic + 1.0).abs() < 1e-12 && r.p_value <= 1.0 / 1000.0 + 1e-12);
}

#[test]
fn confidence_interval_coverage() {
    let runs = 200;
    let covered = (0..runs)
        .filter(|&k| {
            let r = mc_estimate(|rng| rng.sample(StandardNormal), 10_000, 1000 + k).unwrap();
            r.ci_low <= 0.0 && 0.0 <= r.ci_high
        })
        .count();
    let rate = covered as f64 / runs as f64;
    assert!((0.89..=0.995).contains(&rate), "coverage {rate}");
}

#[test]
fn bernoulli_mean() {
    let r = mc_estimate(|rng| rng.random_bool(0.5) as u8 as f64, 10_000, 5).unwrap();
    assert!(r.within(0.5, 5.0));
    assert_eq!(
        r,
        mc_estimate(|rng| rng.random_bool(0.5) as u8 as f64, 10_000, 5).unwrap()
    );
}

#[test]
fn noisy_line_slope() {
    let mut rng = replica_rng(6, 0);
    let x: Vec<f64> = (0..50).map(|i| i as f64 / 10.0).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| 1.5 * v - 2.0 + 0.1 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let f = slope_fit(&x, &y).unwrap();
    assert!((f.slope - 1.5).abs() <= 5.0 * f.slope_se);
}

proptest! {
    #[test]
    fn ks_is_invariant_under_monotone_maps(
        a in prop::collection::vec(-5.0f64..5.0, 50..120),
        b in prop::collection::vec(-5.0f64..5.0, 50..120),
    ) {
        let base = ks_two_sample(&a, &b).unwrap();
        let f = |v: &f64| v.exp() + 3.0 * v;
        let fa: Vec<f64> = a.iter().map(f).collect();
        let fb: Vec<f64> = b.iter().map(f).collect();
        let mapped = ks_two_sample(&fa, &fb).unwrap();
        prop_assert!((0.0..=1.0).contains(&base.statistic));
        prop_assert_eq!(base.statistic, mapped.statistic);
        prop_assert_eq!(base.p_value, mapped.p_value);
    }

    #[test]
    fn spearman_ignores_replica_order(
        pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 100..150),
        rot in 0usize..100,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let mut xr = x.clone();
        let mut yr = y.clone();
        xr.rotate_left(rot % x.len());
        yr.rotate_left(rot % y.len());
        prop_assert!((spearman(&x, &y) - spearman(&xr, &yr)).abs() < 1e-12);
    }
}
