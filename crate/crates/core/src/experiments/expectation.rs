//! E[Q(a)] > a and its tilted-measure representation.

use super::support::{collect, line_sampler, measure, quantile};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::Result;
use crate::gmc::GmcMeasure;
use crate::rng::{derive_seed, par_map};
use crate::stattest::EstimateReport;

params! {
    /// Confidence interval for E[Q(a)] − a, plus the tilted-measure identity
    /// a = ∫ P(η_{R(t)}(0,t) < a) dt evaluated on every `tilt_stride`-th knot.
    NonlinearExpectation {
        gamma: f64 = 0.8,
        delta: f64 = 1.0,
        epsilon_ratio: f64 = 1.0 / 128.0,
        a: f64 = 0.5,
        replicas: usize = 10_000,
        span: f64 = 6.0,
        tilt_stride: usize = 4,
        comparison_gammas: Vec<f64> = vec![0.3, 1.0],
        comparison_replicas: usize = 2000,
    }
}

impl NonlinearExpectation {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        self.comparison_gammas
            .iter()
            .try_for_each(|&g| check_gamma(g))?;
        check_positive("delta", self.delta)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_positive("a", self.a)?;
        check_positive("span", self.span)?;
        check_replicas(self.replicas)?;
        if !self.comparison_gammas.is_empty() {
            check_replicas(self.comparison_replicas)?;
        }
        Ok(())
    }

    fn excess(
        &self,
        gamma: f64,
        replicas: usize,
        seed: u64,
        tilt: bool,
    ) -> Result<Vec<(f64, f64, f64)>> {
        let sampler = line_sampler(
            gamma,
            self.delta,
            self.delta * self.epsilon_ratio,
            self.span,
        )?;
        let stride = self.tilt_stride.max(1);
        collect(par_map(replicas, |r| {
            let m = measure(&sampler, seed, r);
            let q = quantile(&m, self.a)?;
            let (plain, tilted) = if tilt {
                layer_cake(&m, self.a, stride)
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok((q - self.a, plain, tilted))
        }))
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new("nonlinear_expectation", "E[Q(a)] − a > 0 for γ > 0");
        let mut series = Series::new(
            "nonlinear_expectation",
            &["gamma", "mean_excess", "std_error", "ci_low", "ci_high"],
        );
        let rows = self.excess(self.gamma, self.replicas, seed, self.gamma > 0.0)?;
        let excess: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let est = EstimateReport::from_samples(&excess, seed)?;
        series.push(vec![
            self.gamma,
            est.mean,
            est.std_error,
            est.ci_low,
            est.ci_high,
        ]);
        if self.gamma == 0.0 {
            verdict.degenerate = true;
            verdict.check(
                "gamma = 0: E[Q(a)] = a",
                est.mean.abs() <= 1e-12 && est.std_error <= 1e-12,
            );
        } else {
            verdict.check("CI lower bound > 0", est.ci_low > 0.0);
            let plain: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let tilted: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let window: Vec<f64> = rows.iter().map(|r| r.1 - r.2).collect();
            verdict.estimate(
                "riemann sum of P(η(0,t) < a)",
                EstimateReport::from_samples(&plain, seed)?,
            );
            verdict.estimate(
                "riemann sum of P(η_R(t)(0,t) < a), expected a",
                EstimateReport::from_samples(&tilted, seed)?,
            );
            verdict.estimate(
                "riemann sum of P(η(0,t) < a ≤ η_R(t)(0,t)), expected E[Q(a)] − a",
                EstimateReport::from_samples(&window, seed)?,
            );
        }
        verdict.estimate("E[Q(a)] - a", est);
        for (k, &g) in self.comparison_gammas.iter().enumerate() {
            let rows = self.excess(
                g,
                self.comparison_replicas,
                derive_seed(seed, k as u64 + 1),
                false,
            )?;
            let ex: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let e = EstimateReport::from_samples(&ex, seed)?;
            series.push(vec![g, e.mean, e.std_error, e.ci_low, e.ci_high]);
            verdict.estimate(format!("comparison gamma={g}"), e);
        }
        Ok(Outcome {
            verdict,
            series: vec![series],
        })
    }
}

/// Riemann sums over knots t of 1{η(0,t) < a} and 1{η_{R(t)}(0,t) < a},
/// where η_{R(t)} reweights cell j by exp(γ²K(t − x_j)).
fn layer_cake(m: &GmcMeasure, a: f64, stride: usize) -> (f64, f64) {
    let kernel = m.spec.kernel();
    let h = m.grid.spacing;
    let g2 = m.spec.gamma * m.spec.gamma;
    let reach = m
        .spec
        .cutoff()
        .map_or(usize::MAX, |c| (c / h).ceil() as usize);
    let weights: Vec<f64> = (0..=reach.min(m.knot_count()))
        .map(|l| (g2 * kernel.eval(l as f64 * h)).exp() - 1.0)
        .collect();
    let (mut plain, mut tilted) = (0.0, 0.0);
    let mut i = 0;
    while i < m.knot_count() && m.cumulative[i] < a {
        plain += 1.0;
        let lo = i.saturating_sub(reach);
        let mut extra = 0.0;
        for j in lo..i {
            extra += (m.cumulative[j + 1] - m.cumulative[j]) * weights[i - j];
        }
        if m.cumulative[i] + extra < a {
            tilted += 1.0;
        }
        i += stride;
    }
    let w = h * stride as f64;
    (plain * w, tilted * w)
}
