//! Independence of mass beyond a hitting time.

use super::support::{collect, line_sampler, measure, quantile};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, par_map};
use crate::stattest::{independence_test, ALPHA};

params! {
    /// Rank correlation between Q(a) and η(Q(a)+r, Q(a)+r+t) for r = k·δ.
    DeltaSmp {
        gamma: f64 = 0.5,
        delta: f64 = 0.25,
        epsilon_ratio: f64 = 1.0 / 128.0,
        a: f64 = 0.3,
        t: f64 = 0.1,
        /// Separations r as multiples of δ; each must be at least 1.
        separations: Vec<f64> = vec![1.0, 2.0],
        replicas: usize = 2000,
        permutations: usize = 999,
        span: f64 = 2.0,
    }
}

impl DeltaSmp {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_positive("delta", self.delta)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_positive("a", self.a)?;
        check_positive("t", self.t)?;
        check_replicas(self.replicas)?;
        if self.separations.is_empty() || self.separations.iter().any(|&k| k < 1.0) {
            return Err(Error::Config(
                "separations must be multiples of delta >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "delta_smp",
            "η(Q(a)+r, Q(a)+r+t) is independent of Q(a) for r ≥ δ",
        );
        let mut series = Series::new("delta_smp", &["r", "spearman", "p_value"]);
        if self.gamma == 0.0 {
            verdict.degenerate = true;
            verdict.check("gamma = 0: both quantities are deterministic", true);
            return Ok(Outcome {
                verdict,
                series: vec![series],
            });
        }
        let sampler = line_sampler(
            self.gamma,
            self.delta,
            self.delta * self.epsilon_ratio,
            self.span,
        )?;
        // contrast r = 0 first, then the separations
        let rs: Vec<f64> = std::iter::once(0.0)
            .chain(self.separations.iter().map(|k| k * self.delta))
            .collect();
        let rows = collect(par_map(self.replicas, |r| {
            let m = measure(&sampler, seed, r);
            let q = quantile(&m, self.a)?;
            let mut row = vec![q];
            for &sep in &rs {
                row.push(m.mass(q + sep, q + sep + self.t)?);
            }
            Ok(row)
        }))?;
        let qa: Vec<f64> = rows.iter().map(|row| row[0]).collect();
        let level = ALPHA / self.separations.len() as f64;
        for (k, &sep) in rs.iter().enumerate() {
            let mass: Vec<f64> = rows.iter().map(|row| row[k + 1]).collect();
            let test = independence_test(
                &qa,
                &mass,
                self.permutations,
                derive_seed(seed, k as u64 + 1),
            )?;
            series.push(vec![sep, test.statistic, test.p_value]);
            if k == 0 {
                verdict.test("contrast r=0", test);
            } else {
                verdict.check(
                    format!("r={sep}: p > {level} (Bonferroni)"),
                    test.p_value > level,
                );
                verdict.test(format!("r={sep}"), test);
            }
        }
        Ok(Outcome {
            verdict,
            series: vec![series],
        })
    }
}
