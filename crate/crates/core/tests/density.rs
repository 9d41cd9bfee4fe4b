//! Density of the hitting time of the exact-scaling measure.
//!
//! The oracle is the distribution function
//! F(t) = P(Q(x) ≤ t) = E[Φ̄((ln(x/η₁) + (1 + γ²/2)L)/(γ√L))], L = ln(1/t),
//! evaluated with an independent normal implementation.

use chaoslab_core::gmc::build_measure;
use chaoslab_core::inverse::density_q_omega;
use chaoslab_core::logfield::{FieldSampler, FieldSpec, Grid};
use chaoslab_core::rng::par_map;
use statrs::distribution::{ContinuousCDF, Normal};

fn cdf(x: f64, t: f64, gamma: f64, eta1: &[f64]) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    let l = (1.0 / t).ln();
    let c = 1.0 + gamma * gamma / 2.0;
    eta1.iter()
        .map(|&e| n.sf(((x / e).ln() + c * l) / (gamma * l.sqrt())))
        .sum::<f64>()
        / eta1.len() as f64
}

#[test]
fn density_is_the_derivative_of_the_distribution_function() {
    let eta1 = [0.7, 1.0, 1.6];
    for &gamma in &[0.5, 1.0] {
        for &x in &[0.3, 0.5] {
            for &t in &[0.05, 0.2, 0.5, 0.8] {
                let h = 1e-5 * t;
                let fd = (cdf(x, t + h, gamma, &eta1) - cdf(x, t - h, gamma, &eta1)) / (2.0 * h);
                let rho = density_q_omega(x, t, gamma, &eta1, 8).unwrap();
                assert!(
                    (rho - fd).abs() <= 1e-5 * fd.abs().max(1e-3),
                    "γ={gamma} x={x} t={t}: {rho} vs {fd}"
                );
            }
        }
    }
}

#[test]
fn density_rejects_bad_arguments() {
    assert!(density_q_omega(0.5, 1.5, 0.5, &[1.0], 4).is_err());
    assert!(density_q_omega(0.5, 0.5, 0.0, &[1.0], 4).is_err());
    assert!(density_q_omega(0.5, 0.5, 0.5, &[], 4).is_err());
}

/// ∫₀^{t₀} ρ dt against the frequency of η(0,t₀) ≥ x in direct simulations.
///
/// The direct field uses lower cutoff t₀·ε so that, by exact scaling, its
/// mass on [0,t₀] has the law of t₀·e^{Ω̄}·η₁ with η₁ at cutoff ε.
#[test]
fn integrated_density_matches_direct_simulation() {
    let (gamma, x, t0, eps) = (0.5, 0.3, 0.5, 1.0 / 256.0);
    let replicas = 4000;
    let unit = FieldSpec::cone(gamma, 1.0, eps).unwrap();
    let sampler = FieldSampler::new(unit, Grid::covering(&unit, 0.0, 1.0).unwrap()).unwrap();
    let eta1: Vec<f64> = par_map(replicas, |r| {
        build_measure(&sampler.sample(11, r as u64)).total()
    });

    let fine = FieldSpec::cone(gamma, 1.0, t0 * eps).unwrap();
    let direct = FieldSampler::new(fine, Grid::covering(&fine, 0.0, t0).unwrap()).unwrap();
    let hits: Vec<f64> = par_map(replicas, |r| {
        let m = build_measure(&direct.sample(12, r as u64));
        if m.total() >= x {
            1.0
        } else {
            0.0
        }
    });
    let p = hits.iter().sum::<f64>() / replicas as f64;

    // Simpson in u = ln t over [ln 1e-12, ln t₀]
    let (a, b, n) = ((1e-12f64).ln(), t0.ln(), 200);
    let hstep = (b - a) / n as f64;
    let integral = (0..=n)
        .map(|i| {
            let t = (a + i as f64 * hstep).exp();
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * t * density_q_omega(x, t, gamma, &eta1, 2).unwrap()
        })
        .sum::<f64>()
        * hstep
        / 3.0;
    let exact = cdf(x, t0, gamma, &eta1);
    assert!((integral - exact).abs() < 1e-5, "{integral} vs {exact}");

    let n = Normal::new(0.0, 1.0).unwrap();
    let c = 1.0 + gamma * gamma / 2.0;
    let l = (1.0 / t0).ln();
    let cond: Vec<f64> = eta1
        .iter()
        .map(|&e| n.sf(((x / e).ln() + c * l) / (gamma * l.sqrt())))
        .collect();
    let var_cond = cond.iter().map(|v| (v - exact).powi(2)).sum::<f64>() / (replicas - 1) as f64;
    let se = (p * (1.0 - p) / replicas as f64 + var_cond / replicas as f64).sqrt();
    assert!((integral - p).abs() <= 3.0 * se, "{integral} vs {p} ± {se}");
}
