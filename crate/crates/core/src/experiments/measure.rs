//! Mean and moment scaling of the GMC mass.

use super::support::{collect, line_sampler, measure};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::gmc::zeta;
use crate::rng::{derive_seed, par_map};
use crate::stattest::{slope_fit, EstimateReport};

params! {
    /// E[η(a,b)] = b − a, checked within `tolerance_se` standard errors.
    MeanMeasure {
        gammas: Vec<f64> = vec![0.25, 0.5, 1.0],
        delta: f64 = 1.0,
        epsilon_ratio: f64 = 1.0 / 128.0,
        a: Vec<f64> = vec![0.0, 0.2, 0.1],
        b: Vec<f64> = vec![1.0, 0.7, 0.15],
        replicas: usize = 10_000,
        tolerance_se: f64 = 5.0,
    }
}

impl MeanMeasure {
    pub fn validate(&self) -> Result<()> {
        self.gammas.iter().try_for_each(|&g| check_gamma(g))?;
        check_positive("delta", self.delta)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_replicas(self.replicas)?;
        if self.a.len() != self.b.len() || self.a.is_empty() {
            return Err(Error::Config("a and b need the same nonzero length".into()));
        }
        if self
            .a
            .iter()
            .zip(&self.b)
            .any(|(a, b)| !(*a >= 0.0 && a < b))
        {
            return Err(Error::Config("intervals need 0 <= a < b".into()));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new("mean_measure", "E[η(a,b)] = b − a");
        let mut series = Series::new("mean_measure", &["gamma", "a", "b", "mean", "std_error"]);
        let span = self.b.iter().cloned().fold(0.0, f64::max);
        for (gi, &gamma) in self.gammas.iter().enumerate() {
            let sampler = line_sampler(gamma, self.delta, self.delta * self.epsilon_ratio, span)?;
            let s = derive_seed(seed, gi as u64);
            let masses = collect(par_map(self.replicas, |r| {
                let m = measure(&sampler, s, r);
                collect(
                    self.a
                        .iter()
                        .zip(&self.b)
                        .map(|(&a, &b)| m.mass(a, b))
                        .collect(),
                )
            }))?;
            for (k, (&a, &b)) in self.a.iter().zip(&self.b).enumerate() {
                let col: Vec<f64> = masses.iter().map(|row| row[k]).collect();
                let est = EstimateReport::from_samples(&col, s)?;
                let label = format!("gamma={gamma} [{a},{b}]");
                verdict.check(
                    format!("{label} within {} SE", self.tolerance_se),
                    est.within(b - a, self.tolerance_se),
                );
                series.push(vec![gamma, a, b, est.mean, est.std_error]);
                verdict.estimate(label, est);
            }
        }
        verdict.degenerate = self.gammas.iter().all(|&g| g == 0.0);
        Ok(Outcome {
            verdict,
            series: vec![series],
        })
    }
}

params! {
    /// Regression of log E[η(0,t)^q] on log t against ζ(q).
    MomentExponent {
        gamma: f64 = 0.5,
        delta: f64 = 1.0,
        epsilon: f64 = 1.0 / 1024.0,
        qs: Vec<f64> = vec![0.5, 1.5, 2.0],
        ts: Vec<f64> = vec![1.0 / 64.0, 1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0],
        replicas: usize = 10_000,
        tolerance: f64 = 0.1,
    }
}

impl MomentExponent {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_positive("delta", self.delta)?;
        check_positive("epsilon", self.epsilon)?;
        if self.epsilon > self.delta {
            return Err(Error::Config("epsilon must not exceed delta".into()));
        }
        check_replicas(self.replicas)?;
        if self.ts.len() < 3 || self.ts.iter().any(|&t| !(t > 0.0 && t <= self.delta)) {
            return Err(Error::Config("need at least three ts in (0, delta]".into()));
        }
        let beta = self.gamma * self.gamma / 2.0;
        if self
            .qs
            .iter()
            .any(|&q| q == 0.0 || (beta > 0.0 && q >= 1.0 / beta))
        {
            return Err(Error::Config("moments need q != 0 and q < 2/γ²".into()));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "moment_exponent",
            "slope of log E[η(0,t)^q] against log t equals ζ(q)",
        );
        let mut table = Series::new("moment_exponent", &["q", "t", "moment", "std_error"]);
        let mut fits = Series::new(
            "moment_exponent_fit",
            &["q", "slope", "slope_se", "zeta", "trimmed_slope"],
        );
        let span = self.ts.iter().cloned().fold(0.0, f64::max);
        let sampler = line_sampler(self.gamma, self.delta, self.epsilon, span)?;
        let masses = collect(par_map(self.replicas, |r| {
            let m = measure(&sampler, seed, r);
            collect(self.ts.iter().map(|&t| m.mass(0.0, t)).collect())
        }))?;
        let log_t: Vec<f64> = self.ts.iter().map(|t| t.ln()).collect();
        let beta = self.gamma * self.gamma / 2.0;
        for &q in &self.qs {
            let mut log_m = Vec::new();
            let mut log_trim = Vec::new();
            for (k, &t) in self.ts.iter().enumerate() {
                let col: Vec<f64> = masses.iter().map(|row| row[k].powf(q)).collect();
                let est = EstimateReport::from_samples(&col, seed)?;
                table.push(vec![q, t, est.mean, est.std_error]);
                log_m.push(est.mean.ln());
                if beta > 0.0 && q > 0.8 / beta {
                    log_trim.push(trimmed(&col).ln());
                }
                verdict.estimate(format!("q={q} t={t}"), est);
            }
            let fit = slope_fit(&log_t, &log_m)?;
            let z = zeta(q, self.gamma);
            let trimmed_slope = if log_trim.is_empty() {
                f64::NAN
            } else {
                slope_fit(&log_t, &log_trim)?.slope
            };
            if trimmed_slope.is_finite() {
                verdict.value(format!("q={q} trimmed slope"), trimmed_slope);
            }
            verdict.value(format!("q={q} slope"), fit.slope);
            verdict.value(format!("q={q} zeta"), z);
            verdict.check(
                format!("q={q} |slope - zeta| < {}", self.tolerance),
                (fit.slope - z).abs() < self.tolerance,
            );
            fits.push(vec![
                q,
                fit.slope,
                fit.slope_se,
                z,
                if trimmed_slope.is_finite() {
                    trimmed_slope
                } else {
                    fit.slope
                },
            ]);
        }
        verdict.degenerate = self.gamma == 0.0;
        Ok(Outcome {
            verdict,
            series: vec![table, fits],
        })
    }
}

fn trimmed(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let keep = s.len() - s.len() / 100;
    super::support::mean(&s[..keep])
}
