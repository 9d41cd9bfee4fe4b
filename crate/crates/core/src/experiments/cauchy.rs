//! Cauchy rate of inverses along a ladder of lower truncations.

use super::support::{collect, quantile, strictly_decreasing};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::gmc::GmcMeasure;
use crate::logfield::{FieldSpec, Grid, ScaleLadder};
use crate::rng::par_map;
use crate::stattest::{slope_fit, EstimateReport};

params! {
    /// E|Q_{n+1}(x) − Q_n(x)|^ℓ with Q_n the inverse for the field truncated
    /// to heights (δ2⁻ⁿ, δ], all levels built from one noise.
    CauchyRate {
        gamma: f64 = 0.5,
        delta: f64 = 1.0,
        x: f64 = 0.5,
        levels: Vec<usize> = vec![3, 4, 5, 6, 7],
        ell: f64 = 1.5,
        ell_reference: f64 = 1.0,
        replicas: usize = 500,
        span: f64 = 3.0,
    }
}

impl CauchyRate {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_positive("delta", self.delta)?;
        check_positive("x", self.x)?;
        check_positive("span", self.span)?;
        check_positive("ell", self.ell)?;
        check_positive("ell_reference", self.ell_reference)?;
        check_replicas(self.replicas)?;
        if self.levels.len() < 3 || self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "levels must be at least three increasing integers".into(),
            ));
        }
        if *self.levels.last().unwrap() > 12 {
            return Err(Error::Config(
                "levels above 12 exceed the desk-scale grid budget".into(),
            ));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "cauchy_rate",
            "E|Q_{n+1}(x) − Q_n(x)|^ℓ decreases geometrically in n",
        );
        let mut series = Series::new(
            "cauchy_rate",
            &[
                "n",
                "moment_ell",
                "std_error",
                "moment_reference",
                "reference_std_error",
            ],
        );
        let top = *self.levels.last().unwrap() + 1;
        let bottom = self.levels[0];
        // heights δ2^-top < ... < δ2^-bottom < δ
        let mut heights: Vec<f64> = (bottom..=top)
            .rev()
            .map(|n| self.delta * (-(n as f64)).exp2())
            .collect();
        heights.push(self.delta);
        let finest = FieldSpec::line(self.gamma, self.delta, heights[0])?;
        let grid = Grid::covering(&finest, 0.0, self.span)?;
        let ladder = ScaleLadder::new(self.gamma, heights.clone(), grid)?;
        let last = heights.len() - 1;
        // ladder index of the height δ2^-n
        let index = |n: usize| top - n;
        let rows = collect(par_map(self.replicas, |r| {
            let bands = ladder.sample_bands(seed, r as u64);
            let mut q = Vec::new();
            for n in bottom..=top {
                let (values, spec) = ladder.field(&bands, index(n), last)?;
                let m = GmcMeasure::from_values(spec, grid, &values)?;
                q.push(quantile(&m, self.x)?);
            }
            Ok(q)
        }))?;
        let mut log_means = Vec::new();
        let mut ns = Vec::new();
        let mut means = Vec::new();
        for &n in &self.levels {
            let k = n - bottom;
            let diffs: Vec<f64> = rows.iter().map(|q| (q[k + 1] - q[k]).abs()).collect();
            let main: Vec<f64> = diffs.iter().map(|d| d.powf(self.ell)).collect();
            let refr: Vec<f64> = diffs.iter().map(|d| d.powf(self.ell_reference)).collect();
            let e = EstimateReport::from_samples(&main, seed)?;
            let e_ref = EstimateReport::from_samples(&refr, seed)?;
            series.push(vec![
                n as f64,
                e.mean,
                e.std_error,
                e_ref.mean,
                e_ref.std_error,
            ]);
            means.push(e.mean);
            log_means.push(e.mean.ln());
            ns.push(n as f64);
            verdict.estimate(format!("n={n} ell={}", self.ell), e);
            verdict.estimate(format!("n={n} ell={}", self.ell_reference), e_ref);
        }
        if means.iter().all(|&m| m == 0.0) {
            verdict.degenerate = true;
            verdict.check("all levels coincide", true);
        } else {
            verdict.check(
                "moments strictly decreasing in n",
                strictly_decreasing(&means),
            );
            let fit = slope_fit(&ns, &log_means)?;
            verdict.value("log2 decay per level", fit.slope / std::f64::consts::LN_2);
            verdict.value("slope", fit.slope);
            verdict.value("slope_se", fit.slope_se);
            verdict.check(
                "geometric decay: slope + 1.96 SE < 0",
                fit.slope + 1.96 * fit.slope_se < 0.0,
            );
        }
        Ok(Outcome {
            verdict,
            series: vec![series],
        })
    }
}
