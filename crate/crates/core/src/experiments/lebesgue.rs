//! Mean-square distance of the truncated mass from Lebesgue measure.

use super::support::{collect, line_sampler, measure, strictly_decreasing};
use super::{check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, par_map};
use crate::stattest::EstimateReport;

/// 2xδγ²/(1 − γ²).
pub fn lebesgue_bound(x: f64, delta: f64, gamma: f64) -> f64 {
    2.0 * x * delta * gamma * gamma / (1.0 - gamma * gamma)
}

params! {
    /// E[(η^{δ_n}(0,x) − x)²] against 2xδ_nγ²/(1 − γ²), the bound scaled by `bound_scale`.
    LebesgueRate {
        gamma: f64 = 0.5,
        deltas: Vec<f64> = vec![1.0 / 16.0, 1.0 / 64.0],
        x: f64 = 1.0,
        epsilon_ratio: f64 = 1.0 / 128.0,
        replicas: usize = 2000,
        bound_scale: f64 = 1.0,
    }
}

impl LebesgueRate {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(Error::Config(format!(
                "lebesgue_rate needs 0 <= gamma < 1, got {}",
                self.gamma
            )));
        }
        check_positive("x", self.x)?;
        check_positive("bound_scale", self.bound_scale)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_replicas(self.replicas)?;
        if self.deltas.is_empty() || self.deltas.iter().any(|&d| !(d > 0.0 && d < self.x)) {
            return Err(Error::Config("deltas must lie in (0, x)".into()));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new("lebesgue_rate", "E[(ηⁿ(x) − x)²] ≤ 2xδ_nγ²/(1 − γ²)");
        let mut series = Series::new(
            "lebesgue_rate",
            &["delta_n", "mean_square", "std_error", "ci_high", "bound"],
        );
        let mut means = Vec::new();
        for (k, &d) in self.deltas.iter().enumerate() {
            let sampler = line_sampler(self.gamma, d, d * self.epsilon_ratio, self.x)?;
            let s = derive_seed(seed, k as u64);
            let sq = collect(par_map(self.replicas, |r| {
                let m = measure(&sampler, s, r);
                Ok((m.mass(0.0, self.x)? - self.x).powi(2))
            }))?;
            let est = EstimateReport::from_samples(&sq, s)?;
            let bound = self.bound_scale * lebesgue_bound(self.x, d, self.gamma);
            series.push(vec![d, est.mean, est.std_error, est.ci_high, bound]);
            if self.gamma == 0.0 {
                verdict.check(format!("delta_n={d}: exact Lebesgue"), est.mean <= 1e-24);
            } else {
                verdict.check(
                    format!("delta_n={d}: CI upper bound < bound"),
                    est.ci_high < bound,
                );
            }
            verdict.value(format!("delta_n={d} bound"), bound);
            means.push(est.mean);
            verdict.estimate(format!("delta_n={d}"), est);
        }
        if self.gamma > 0.0 {
            let mut by_delta: Vec<(f64, f64)> = self.deltas.iter().cloned().zip(means).collect();
            by_delta.sort_by(|a, b| b.0.total_cmp(&a.0));
            let ordered: Vec<f64> = by_delta.iter().map(|p| p.1).collect();
            verdict.value(
                "estimate decreases with delta_n",
                f64::from(u8::from(strictly_decreasing(&ordered))),
            );
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
    fn bound_values() {
        assert!((lebesgue_bound(1.0, 0.01, 0.5) - 0.02 / 3.0).abs() < 1e-15);
        assert_eq!(
            lebesgue_bound(1.0, 0.005, 0.5) * 2.0,
            lebesgue_bound(1.0, 0.01, 0.5)
        );
    }
}
