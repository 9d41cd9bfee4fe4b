//! Algebraic identities of the inverse on random realizations.

use chaoslab_core::gmc::{build_measure, GmcMeasure};
use chaoslab_core::inverse::{invert, scale_comparison, QuantilePath};
use chaoslab_core::logfield::{FieldSampler, FieldSpec, Grid, ScaleLadder};
use chaoslab_core::Error;
use proptest::prelude::*;

const SEED: u64 = 7_001;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn line_measures(gamma: f64, count: usize) -> Vec<GmcMeasure> {
    let spec = FieldSpec::line(gamma, 1.0, 1.0 / 64.0).unwrap();
    let sampler = FieldSampler::new(spec, Grid::covering(&spec, 0.0, 3.0).unwrap()).unwrap();
    (0..count)
        .map(|r| build_measure(&sampler.sample(SEED, r as u64)))
        .collect()
}

#[test]
fn inverse_pairs() {
    for m in line_measures(0.8, 100) {
        let q = QuantilePath::new(&m);
        for k in 0..=50 {
            let x = (m.total() * k as f64 / 50.0).min(m.total());
            let t = q.q(x).unwrap();
            assert!(close(m.cumulative_at(t).unwrap(), x));
            let t = 3.0 * k as f64 / 50.0;
            assert!(close(q.q(m.cumulative_at(t).unwrap()).unwrap(), t));
        }
    }
}

#[test]
fn semigroup_identity() {
    for m in line_measures(0.8, 100) {
        let q = QuantilePath::new(&m);
        let total = m.total();
        for &(fx, fy) in &[(0.1, 0.3), (0.0, 0.5), (0.45, 0.55), (0.2, 0.0)] {
            let (x, y) = (fx * total, fy * total);
            let qx = q.q(x).unwrap();
            let shifted = q.semigroup_shift(y, qx).unwrap();
            assert!(close(qx + shifted, q.q((x + y).min(total)).unwrap()));
            assert!(close(q.increment(x, (x + y).min(total)).unwrap(), shifted));
        }
        let err = q.semigroup_shift(total, 1.0).unwrap_err();
        assert!(matches!(err, Error::InsufficientMass { .. }));
    }
}

#[test]
fn dyadic_sandwich() {
    for m in line_measures(0.5, 100) {
        let q = QuantilePath::new(&m);
        for &a in &[0.05, 0.3, 1.0] {
            if a > m.total() {
                continue;
            }
            let qa = q.q(a).unwrap();
            for n in [1u32, 4, 10, 20] {
                let d = q.dyadic_approx(a, n).unwrap();
                let step = (n as f64).exp2().recip();
                assert!(d.value - step <= qa && qa < d.value);
                assert_eq!((d.value * (n as f64).exp2()).fract(), 0.0);
            }
        }
    }
}

#[test]
fn circle_inverse_is_periodic() {
    let spec = FieldSpec::circle(0.6, 1.0 / 64.0).unwrap();
    let sampler = FieldSampler::new(spec, Grid::circle(&spec).unwrap()).unwrap();
    for r in 0..100 {
        let m = build_measure(&sampler.sample(SEED, r));
        assert!(close(m.end(), 1.0));
        let q = QuantilePath::new(&m);
        assert_eq!(q.normalized_inverse(0.0).unwrap(), 0.0);
        assert_eq!(q.normalized_inverse(1.0).unwrap(), 1.0);
        for k in 0..20 {
            let x = k as f64 / 20.0 + 0.013;
            let h = q.normalized_inverse(x).unwrap();
            assert!(close(q.normalized_forward(h).unwrap(), x));
            for shift in [-2.0, 1.0, 3.0] {
                assert!(close(q.periodic_inverse(x + shift).unwrap(), h + shift));
            }
        }
    }
}

#[test]
fn same_scale_comparison_is_trivial() {
    for m in line_measures(0.5, 20) {
        let total = m.total();
        let s = scale_comparison(&m, &m, 0.2 * total, 0.3 * total).unwrap();
        assert!(close(s.g_point, 1.0) && close(s.g_interval, 1.0));
        assert!(close(s.ratio_min, 1.0) && close(s.ratio_max, 1.0));
        assert!(close(s.mapped.0, s.direct.0) && close(s.mapped.1, s.direct.1));
    }
}

#[test]
fn cross_scale_comparison_brackets_the_density_ratio() {
    let spec = FieldSpec::line(0.5, 1.0, 1.0 / 64.0).unwrap();
    let grid = Grid::covering(&spec, 0.0, 3.0).unwrap();
    let ladder = ScaleLadder::new(0.5, vec![1.0 / 64.0, 1.0 / 8.0, 1.0], grid).unwrap();
    for r in 0..50 {
        let bands = ladder.sample_bands(SEED, r);
        let (fine, fs) = ladder.field(&bands, 0, 2).unwrap();
        let (coarse, cs) = ladder.field(&bands, 1, 2).unwrap();
        let eta = GmcMeasure::from_values(fs, grid, &fine).unwrap();
        let eta_n = GmcMeasure::from_values(cs, grid, &coarse).unwrap();
        let total = eta.total().min(eta_n.total());
        let s = scale_comparison(&eta, &eta_n, 0.2 * total, 0.2 * total).unwrap();
        assert!(s.ratio_min <= s.g_interval * (1.0 + 1e-12));
        assert!(s.g_interval <= s.ratio_max * (1.0 + 1e-12));
        // Qⁿ of the rescaled levels lands back on Q
        assert!((s.mapped.0 - s.direct.0).abs() < 1e-9 && (s.mapped.1 - s.direct.1).abs() < 1e-9);
    }
}

#[test]
fn comparison_needs_a_common_grid() {
    let a = line_measures(0.5, 1).remove(0);
    let spec = FieldSpec::line(0.5, 1.0, 1.0 / 64.0).unwrap();
    let other = Grid::covering(&spec, 0.0, 2.0).unwrap();
    let b = GmcMeasure::from_density(spec, other, &vec![1.0; other.count - 1]);
    assert!(matches!(
        scale_comparison(&a, &b, 0.1, 0.1),
        Err(Error::ScaleMismatch(_))
    ));
}

fn arbitrary_measure() -> impl Strategy<Value = GmcMeasure> {
    prop::collection::vec(1e-3f64..10.0, 2..200).prop_map(|density| {
        let spec = FieldSpec::line(0.5, 1.0, 0.5).unwrap();
        let grid = Grid::new(0.0, 0.1, density.len() + 1).unwrap();
        GmcMeasure::from_density(spec, grid, &density)
    })
}

proptest! {
    #[test]
    fn inverse_is_monotone(m in arbitrary_measure(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let total = m.total();
        prop_assert!(invert(&m, lo * total).unwrap() <= invert(&m, hi * total).unwrap());
    }

    #[test]
    fn mass_is_additive(m in arbitrary_measure(), a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        let mut p = [a, b, c].map(|v| m.start() + v * (m.end() - m.start()));
        p.sort_by(f64::total_cmp);
        let whole = m.mass(p[0], p[2]).unwrap();
        let parts = m.mass(p[0], p[1]).unwrap() + m.mass(p[1], p[2]).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * m.total().max(1.0));
    }

    #[test]
    fn dyadic_sandwich_holds(m in arbitrary_measure(), frac in 0.0f64..1.0, n in 0u32..30) {
        let q = QuantilePath::new(&m);
        let a = frac * m.total();
        let qa = q.q(a).unwrap();
        let d = q.dyadic_approx(a, n).unwrap();
        prop_assert!(d.value - (n as f64).exp2().recip() <= qa && qa < d.value);
    }
}
