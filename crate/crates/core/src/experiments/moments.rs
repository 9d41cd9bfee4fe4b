//! Moments of the inverse inside their finiteness window.

use super::support::{collect, line_sampler, measure, quantile};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::rng::par_map;
use crate::stattest::EstimateReport;

/// Left end −(1 + γ²/2)²/(2γ²) of the window of finite inverse moments.
pub fn moment_window_left(gamma: f64) -> f64 {
    let c = 1.0 + gamma * gamma / 2.0;
    -c * c / (2.0 * gamma * gamma)
}

params! {
    /// E[Q(x)^p] on a p-grid inside the window, with a replica-doubling stability check.
    InverseMoments {
        gamma: f64 = 0.5,
        delta: f64 = 1.0,
        epsilon_ratio: f64 = 1.0 / 128.0,
        x: f64 = 0.5,
        ps: Vec<f64> = vec![-1.5, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0],
        replicas: usize = 2000,
        margin: f64 = 0.2,
        stability: f64 = 0.1,
        span: f64 = 4.0,
    }
}

impl InverseMoments {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_positive("delta", self.delta)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_positive("x", self.x)?;
        check_positive("span", self.span)?;
        check_replicas(self.replicas)?;
        if self.gamma > 0.0 {
            let limit = (1.0 - self.margin) * moment_window_left(self.gamma);
            if let Some(p) = self.ps.iter().find(|&&p| p <= limit) {
                return Err(Error::Config(format!(
                    "p = {p} is within the {} margin of the window end {}",
                    self.margin,
                    moment_window_left(self.gamma)
                )));
            }
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "inverse_moments",
            "E[Q(x)^p] finite for p > −(1 + γ²/2)²/(2γ²)",
        );
        let mut series = Series::new(
            "inverse_moments",
            &["p", "moment", "std_error", "moment_half", "relative_change"],
        );
        let sampler = line_sampler(
            self.gamma,
            self.delta,
            self.delta * self.epsilon_ratio,
            self.span,
        )?;
        let q = collect(par_map(2 * self.replicas, |r| {
            quantile(&measure(&sampler, seed, r), self.x)
        }))?;
        if self.gamma > 0.0 {
            verdict.value("window left end", moment_window_left(self.gamma));
        }
        for &p in &self.ps {
            let v: Vec<f64> = q.iter().map(|t| t.powf(p)).collect();
            let half = EstimateReport::from_samples(&v[..self.replicas], seed)?;
            let full = EstimateReport::from_samples(&v, seed)?;
            let change = (full.mean - half.mean).abs() / half.mean.abs();
            verdict.check(
                format!("p={p}: finite, relative change < {}", self.stability),
                full.mean.is_finite() && change < self.stability,
            );
            series.push(vec![p, full.mean, full.std_error, half.mean, change]);
            verdict.estimate(format!("p={p}"), full);
        }
        verdict.degenerate = self.gamma == 0.0;
        Ok(Outcome {
            verdict,
            series: vec![series],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_endpoints() {
        assert!((moment_window_left(1.0) + 1.125).abs() < 1e-15);
        assert!((moment_window_left(0.5) + 2.53125).abs() < 1e-15);
    }
}
