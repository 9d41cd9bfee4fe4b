//! Q(Tx)/T → x.

use super::support::{collect, line_sampler, measure, nonincreasing, quantile};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::rng::par_map;
use crate::stattest::EstimateReport;

params! {
    /// Mean absolute deviation |Q(Tx)/T − x| along a ladder of horizons T.
    Ergodic {
        gamma: f64 = 0.5,
        delta: f64 = 0.25,
        epsilon_ratio: f64 = 1.0 / 128.0,
        x: f64 = 1.0,
        horizons: Vec<f64> = vec![8.0, 16.0, 32.0],
        replicas: usize = 500,
        threshold: f64 = 0.05,
        /// Sampling window as a multiple of the largest T·x.
        span_factor: f64 = 1.25,
    }
}

impl Ergodic {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_positive("delta", self.delta)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_positive("x", self.x)?;
        check_positive("threshold", self.threshold)?;
        check_replicas(self.replicas)?;
        if self.horizons.is_empty() || self.horizons.iter().any(|&t| t <= 0.0) {
            return Err(Error::Config("horizons must be positive".into()));
        }
        if self.span_factor < 1.0 {
            return Err(Error::Config("span_factor must be at least 1".into()));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "ergodic",
            "E|Q(Tx)/T − x| decreases in T and is small at the largest T",
        );
        let mut series = Series::new(
            "ergodic",
            &["T", "mean_abs_deviation", "std_error", "ci_high"],
        );
        let t_max = self.horizons.iter().cloned().fold(0.0, f64::max);
        let span = self.span_factor * t_max * self.x + self.delta;
        let sampler = line_sampler(
            self.gamma,
            self.delta,
            self.delta * self.epsilon_ratio,
            span,
        )?;
        let rows = collect(par_map(self.replicas, |r| {
            let m = measure(&sampler, seed, r);
            collect(
                self.horizons
                    .iter()
                    .map(|&t| Ok((quantile(&m, t * self.x)? / t - self.x).abs()))
                    .collect(),
            )
        }))?;
        let mut means = Vec::new();
        let mut last = None;
        for (k, &t) in self.horizons.iter().enumerate() {
            let col: Vec<f64> = rows.iter().map(|row| row[k]).collect();
            let est = EstimateReport::from_samples(&col, seed)?;
            series.push(vec![t, est.mean, est.std_error, est.ci_high]);
            means.push(est.mean);
            last = Some(est.clone());
            verdict.estimate(format!("T={t}"), est);
        }
        verdict.check("deviation nonincreasing in T", nonincreasing(&means, 1e-12));
        let last = last.expect("at least one horizon");
        verdict.check(
            format!("largest T: CI upper bound < {}", self.threshold),
            last.ci_high < self.threshold,
        );
        verdict.degenerate = self.gamma == 0.0;
        Ok(Outcome {
            verdict,
            series: vec![series],
        })
    }
}
