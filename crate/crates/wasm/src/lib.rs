//! Browser bindings: kernel curves, a sampled measure with its inverse, and
//! a small moment-scaling fit. Each export returns a flat `Float64Array`.

use chaoslab_core::experiments::MomentExponent;
use chaoslab_core::gmc::build_measure;
use chaoslab_core::inverse::QuantilePath;
use chaoslab_core::logfield::{FieldSampler, FieldSpec, Grid};
use wasm_bindgen::prelude::*;

fn js_err(e: chaoslab_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn spec_for(
    kind: &str,
    gamma: f64,
    delta: f64,
    epsilon: f64,
    lambda: f64,
) -> chaoslab_core::Result<FieldSpec> {
    match kind {
        "cone" => FieldSpec::cone(gamma, delta, epsilon),
        "circle" => FieldSpec::circle(gamma, epsilon),
        "scaled" => FieldSpec::scaled(gamma, delta, epsilon, lambda),
        _ => FieldSpec::line(gamma, delta, epsilon),
    }
}

/// Kernel values at `points` distances evenly spread over `[0, max_distance]`.
pub fn kernel_values(
    kind: &str,
    delta: f64,
    epsilon: f64,
    lambda: f64,
    max_distance: f64,
    points: usize,
) -> chaoslab_core::Result<Vec<f64>> {
    let kernel = spec_for(kind, 0.0, delta, epsilon, lambda)?.kernel();
    let n = points.max(2);
    Ok((0..n)
        .map(|i| kernel.eval(max_distance * i as f64 / (n - 1) as f64))
        .collect())
}

/// Cumulative mass η(0,t) at the grid knots followed by Q at `levels`
/// evenly spaced mass levels in `[0, η(0,span)]`.
pub fn measure_and_inverse(
    gamma: f64,
    epsilon: f64,
    span: f64,
    seed: u64,
    levels: usize,
) -> chaoslab_core::Result<(Vec<f64>, Vec<f64>)> {
    let spec = FieldSpec::line(gamma, 1.0, epsilon)?;
    let sampler = FieldSampler::new(spec, Grid::covering(&spec, 0.0, span)?)?;
    let m = build_measure(&sampler.sample(seed, 0));
    let q = QuantilePath::new(&m);
    let n = levels.max(2);
    let inverse = (0..n)
        .map(|i| q.q(m.total() * i as f64 / (n - 1) as f64))
        .collect::<chaoslab_core::Result<Vec<f64>>>()?;
    Ok((m.cumulative, inverse))
}

/// Rows `(q, slope, slope_se, ζ(q))` of a log-moment regression.
pub fn moment_fit(
    gamma: f64,
    qs: &[f64],
    replicas: usize,
    seed: u64,
) -> chaoslab_core::Result<Vec<f64>> {
    let params = MomentExponent {
        gamma,
        epsilon: 1.0 / 256.0,
        qs: qs.to_vec(),
        replicas,
        ..MomentExponent::default()
    };
    params.validate()?;
    let outcome = params.run(seed)?;
    let fit = outcome
        .series
        .iter()
        .find(|s| s.name == "moment_exponent_fit")
        .expect("fit table is always produced");
    Ok(fit.rows.iter().flat_map(|r| r[..4].to_vec()).collect())
}

#[wasm_bindgen]
pub fn kernel_curve(
    kind: &str,
    delta: f64,
    epsilon: f64,
    lambda: f64,
    max_distance: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    kernel_values(kind, delta, epsilon, lambda, max_distance, points).map_err(js_err)
}

/// Knot count `k`, then `k` cumulative masses, then the inverse values.
#[wasm_bindgen]
pub fn sample_path(
    gamma: f64,
    epsilon: f64,
    span: f64,
    seed: u32,
    levels: usize,
) -> Result<Vec<f64>, JsError> {
    let (cum, inv) =
        measure_and_inverse(gamma, epsilon, span, seed as u64, levels).map_err(js_err)?;
    let mut out = Vec::with_capacity(1 + cum.len() + inv.len());
    out.push(cum.len() as f64);
    out.extend(cum);
    out.extend(inv);
    Ok(out)
}

#[wasm_bindgen]
pub fn moment_scaling(
    gamma: f64,
    qs: Vec<f64>,
    replicas: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    moment_fit(gamma, &qs, replicas, seed as u64).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_curve_starts_at_the_variance() {
        let v = kernel_values("line", 1.0, 0.01, 0.5, 1.5, 31).unwrap();
        assert!((v[0] - 100f64.ln()).abs() < 1e-12);
        assert_eq!(*v.last().unwrap(), 0.0);
        assert!(kernel_values("line", 1.0, 2.0, 0.5, 1.0, 3).is_err());
    }

    #[test]
    fn inverse_runs_through_the_measure() {
        let (cum, inv) = measure_and_inverse(0.5, 1.0 / 64.0, 2.0, 3, 11).unwrap();
        assert_eq!(cum.len(), 2 * 256 + 1);
        assert_eq!(inv[0], 0.0);
        assert!((inv[10] - 2.0).abs() < 1e-12);
        assert!(inv.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn moment_fit_reports_zeta() {
        let rows = moment_fit(0.5, &[1.5], 200, 1).unwrap();
        assert_eq!(rows.len(), 4);
        assert!((rows[3] - 1.40625).abs() < 1e-12);
        assert!(rows[1].is_finite());
    }
}
