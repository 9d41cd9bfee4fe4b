//! Kernels against hyperbolic areas of intersected regions, computed by quadrature.

use chaoslab_core::logfield::{
    circle_cov, circle_joint, cone_cov, scaled_cov, truncated_cov, FieldSpec,
};
use proptest::prelude::*;
use std::f64::consts::PI;

/// ∫ f over [a, b] in the variable s = ln y, composite Simpson.
fn log_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (la, lb) = (a.ln(), b.ln());
    let h = (lb - la) / n as f64;
    let g = |s: f64| {
        let y = s.exp();
        f(y) * y
    };
    let mut acc = g(la) + g(lb);
    for i in 1..n {
        acc += g(la + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Integrates `f` over [a, b] split at the given breakpoints.
fn piecewise(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.windows(2)
        .map(|w| log_simpson(f, w[0], w[1], 4000))
        .sum()
}

/// Area of U_ε^δ ∩ (U_ε^δ + d) under dx dy / y²: width y at height y.
fn truncated_area(delta: f64, eps: f64, d: f64) -> f64 {
    piecewise(|y| (y - d).max(0.0) / (y * y), eps, delta, &[d])
}

/// Same for the cone region, whose width is capped at δ and has no upper cut.
fn cone_area(delta: f64, eps: f64, d: f64) -> f64 {
    let top = 1e7 * delta;
    let body = piecewise(
        |y| (y.min(delta) - d).max(0.0) / (y * y),
        eps,
        top,
        &[d, delta],
    );
    body + (delta - d).max(0.0) / top
}

/// Periodic wedge: width (2/π)·atan(πy/2) at height y, overlaps with both images.
fn circle_area(eps: f64, d: f64) -> f64 {
    let w = |y: f64| 2.0 / PI * (PI * y / 2.0).atan();
    let overlap = |y: f64| (w(y) - d).max(0.0) + (w(y) - (1.0 - d)).max(0.0);
    let top = 1e7;
    let kinks = [
        2.0 / PI * (PI * d / 2.0).tan(),
        2.0 / PI * (PI * (1.0 - d) / 2.0).tan(),
    ];
    let body = piecewise(|y| overlap(y) / (y * y), eps, top, &kinks);
    // beyond `top` the overlap is 2w − 1 ≈ 1 − 8/(π² y)
    body + 1.0 / top
}

#[test]
fn truncated_kernel_is_a_hyperbolic_area() {
    for &(delta, eps) in &[(1.0, 1.0 / 128.0), (0.5, 0.01), (2.0, 0.3)] {
        for k in 0..=40 {
            let d = 1.1 * delta * k as f64 / 40.0;
            let want = truncated_area(delta, eps, d);
            assert!(
                (truncated_cov(delta, eps, d) - want).abs() < 1e-8,
                "δ={delta} ε={eps} d={d}"
            );
        }
    }
}

#[test]
fn cone_kernel_is_a_hyperbolic_area() {
    for &(delta, eps) in &[(1.0, 1.0 / 128.0), (0.5, 0.01)] {
        for k in 0..=40 {
            let d = 1.1 * delta * k as f64 / 40.0;
            let want = cone_area(delta, eps, d);
            assert!(
                (cone_cov(delta, eps, d) - want).abs() < 1e-6,
                "δ={delta} ε={eps} d={d}"
            );
        }
    }
}

#[test]
fn circle_kernel_is_a_hyperbolic_area() {
    for &eps in &[1.0 / 64.0, 0.05, 0.2] {
        for k in 0..=50 {
            let d = 0.5 * k as f64 / 50.0;
            let want = circle_area(eps, d);
            assert!(
                (circle_cov(eps, d) - want).abs() < 1e-6,
                "ε={eps} d={d}: {} vs {want}",
                circle_cov(eps, d)
            );
        }
    }
}

#[test]
fn branches_meet_continuously() {
    for &(delta, eps) in &[(1.0, 1.0 / 128.0), (0.25, 0.001), (3.0, 0.5)] {
        for f in [truncated_cov, cone_cov] {
            assert!((f(delta, eps, eps * (1.0 - 1e-15)) - f(delta, eps, eps)).abs() <= 1e-12);
            assert!(f(delta, eps, delta * (1.0 - 1e-15)).abs() <= 1e-12);
        }
        let lam = 0.5;
        // the scaled kernel jumps to zero at δ/λ by ln λ + 1 − λ
        let jump = scaled_cov(delta, eps, lam, delta / lam * (1.0 - 1e-15));
        assert!((jump - (lam.ln() + 1.0 - lam)).abs() <= 1e-12);
        assert_eq!(scaled_cov(delta, eps, lam, delta / lam), 0.0);
        assert!(scaled_cov(delta, eps, lam, delta).abs() <= 1e-12);
        assert!(
            (scaled_cov(delta, eps, lam, eps * (1.0 - 1e-15)) - scaled_cov(delta, eps, lam, eps))
                .abs()
                <= 1e-12
        );
    }
    for &eps in &[1.0 / 1024.0, 1.0 / 64.0, 0.3] {
        let x0 = circle_joint(eps);
        let below = circle_cov(eps, x0 * (1.0 - 1e-15));
        let above = circle_cov(eps, x0 * (1.0 + 1e-15));
        assert!(
            (below - above).abs() <= 1e-12,
            "ε={eps}: {below} vs {above}"
        );
    }
}

#[test]
fn cone_and_scaled_kernels_match_closed_forms() {
    // ω: ln(1/λ) shift under joint rescaling of ε and d
    let (delta, eps) = (1.0, 1.0 / 256.0);
    for &lam in &[0.5, 0.25, 0.1] {
        for k in 0..20 {
            let d = delta * k as f64 / 20.0;
            let lhs = cone_cov(delta, lam * eps, lam * d);
            let rhs = (1.0 / lam).ln() + cone_cov(delta, eps, d);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
    // the scaled kernel is the truncated one plus (1 − λ)(1 − d/δ) for d ≤ δ
    for k in 0..20 {
        let d = delta * k as f64 / 20.0;
        let lhs = scaled_cov(delta, eps, 0.5, d);
        let rhs = truncated_cov(delta, eps, d) + 0.5 * (1.0 - d / delta);
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn spec_rejects_supercritical_gamma() {
    let err = FieldSpec::line(2.5, 1.0, 0.01).unwrap_err().to_string();
    assert!(err.contains("gamma² < 2 required"), "{err}");
}

proptest! {
    #[test]
    fn kernel_scaling_identity(delta in 0.05f64..4.0, ratio in 1e-4f64..1.0, frac in 0.0f64..1.2, lam in 0.01f64..10.0) {
        let eps = ratio * delta;
        let d = frac * delta;
        let lhs = truncated_cov(delta, eps, d);
        let rhs = truncated_cov(lam * delta, lam * eps, lam * d);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        let lhs = cone_cov(delta, eps, d);
        let rhs = cone_cov(lam * delta, lam * eps, lam * d);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn truncated_kernel_is_nonincreasing(delta in 0.05f64..4.0, ratio in 1e-4f64..1.0, a in 0.0f64..1.2, b in 0.0f64..1.2) {
        let eps = ratio * delta;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(truncated_cov(delta, eps, lo * delta) >= truncated_cov(delta, eps, hi * delta) - 1e-12);
    }
}
