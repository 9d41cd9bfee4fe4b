//! Distributional scaling of the inverse and of the exact-scaling mass.

use super::support::{collect, line_sampler, measure, quantile};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::gmc::build_measure;
use crate::logfield::{FieldSampler, FieldSpec, Grid, Lognormal, LognormalVariant};
use crate::rng::{derive_seed, par_map, replica_rng};
use crate::stattest::{ks_two_sample, two_proportion_test, ALPHA};

params! {
    /// Three two-sample comparisons:
    /// Q^δ(x) against δ·Q¹(x/δ);
    /// log η_ω^δ(λA) against log λ + Ω̄_λ + log η_ω^δ(A) for A = [0, δ/2];
    /// Q^δ(x)/λ against Q^{δ,λ}(c_λ·x) on the event that both are at most δ.
    InverseScaling {
        gamma: f64 = 0.5,
        delta: f64 = 0.5,
        x: f64 = 0.25,
        lambda: f64 = 0.5,
        lognormal_x: f64 = 0.15,
        epsilon_ratio: f64 = 1.0 / 128.0,
        replicas: usize = 2000,
        /// Sampling window for the inverse, as a multiple of x.
        span_factor: f64 = 8.0,
    }
}

impl InverseScaling {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_positive("delta", self.delta)?;
        check_positive("x", self.x)?;
        check_positive("lognormal_x", self.lognormal_x)?;
        check_positive("span_factor", self.span_factor)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_replicas(self.replicas)?;
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::Config(format!(
                "lambda must lie in (0,1), got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "inverse_scaling",
            "Q^δ(x) =d δQ¹(x/δ); η_ω^δ(λA) =d λe^{Ω̄_λ}η_ω^δ(A); Q^δ(x)/λ =d Q^{δ,λ}(c_λx) on {· ≤ δ}",
        );
        let mut series = Series::new("inverse_scaling", &["comparison", "statistic", "p_value"]);
        let n = self.replicas;
        let (d, g, lam) = (self.delta, self.gamma, self.lambda);
        let eps = d * self.epsilon_ratio;
        let span = self.span_factor * self.x;

        // Q^δ(x) against δ·Q¹(x/δ), from independent streams
        let s_delta = line_sampler(g, d, eps, span)?;
        let s_unit = line_sampler(g, 1.0, self.epsilon_ratio, span / d)?;
        let (k1, k2) = (derive_seed(seed, 1), derive_seed(seed, 2));
        let left = collect(par_map(n, |r| quantile(&measure(&s_delta, k1, r), self.x)))?;
        let right = collect(par_map(n, |r| {
            Ok(d * quantile(&measure(&s_unit, k2, r), self.x / d)?)
        }))?;
        let t1 = ks_two_sample(&left, &right)?;

        // exact lognormal scaling of the ω mass on A = [0, δ/2]
        let a_len = d / 2.0;
        let cone_small = FieldSpec::cone(g, d, lam * eps)?;
        let cone = FieldSpec::cone(g, d, eps)?;
        let s_small =
            FieldSampler::new(cone_small, Grid::covering(&cone_small, 0.0, lam * a_len)?)?;
        let s_cone = FieldSampler::new(cone, Grid::covering(&cone, 0.0, a_len)?)?;
        let omega = Lognormal::new(lam, g, LognormalVariant::Omega)?;
        let (k3, k4, k5) = (
            derive_seed(seed, 3),
            derive_seed(seed, 4),
            derive_seed(seed, 5),
        );
        let left_w = collect(par_map(n, |r| {
            Ok(build_measure(&s_small.sample(k3, r as u64))
                .mass(0.0, lam * a_len)?
                .ln())
        }))?;
        let right_w = collect(par_map(n, |r| {
            let w = omega.draw(&mut replica_rng(k5, r as u64));
            Ok(lam.ln()
                + w
                + build_measure(&s_cone.sample(k4, r as u64))
                    .mass(0.0, a_len)?
                    .ln())
        }))?;
        let t2 = ks_two_sample(&left_w, &right_w)?;

        // lognormal law for the inverse on {Q^δ(x) ≤ λδ}
        let xl = self.lognormal_x;
        let s_trunc = line_sampler(g, d, lam * eps, lam * d)?;
        let scaled = FieldSpec::scaled(g, d, eps, lam)?;
        let s_scaled = FieldSampler::new(scaled, Grid::covering(&scaled, 0.0, d)?)?;
        let zbar = Lognormal::new(lam, g, LognormalVariant::Z)?;
        let (k6, k7, k8) = (
            derive_seed(seed, 6),
            derive_seed(seed, 7),
            derive_seed(seed, 8),
        );
        let hit_left: Vec<Option<f64>> = collect(par_map(n, |r| {
            let m = measure(&s_trunc, k6, r);
            Ok(if xl <= m.total() {
                Some(quantile(&m, xl)? / lam)
            } else {
                None
            })
        }))?;
        let hit_right: Vec<Option<f64>> = collect(par_map(n, |r| {
            let m = measure(&s_scaled, k7, r);
            let z = zbar.draw(&mut replica_rng(k8, r as u64));
            let arg = zbar.inverse_factor(z) * xl;
            Ok(if arg <= m.total() {
                Some(quantile(&m, arg)?)
            } else {
                None
            })
        }))?;
        let cond_left: Vec<f64> = hit_left.iter().flatten().copied().collect();
        let cond_right: Vec<f64> = hit_right.iter().flatten().copied().collect();
        let t3 = ks_two_sample(&cond_left, &cond_right)?;
        let t4 = two_proportion_test(cond_left.len(), n, cond_right.len(), n);

        let level = ALPHA / 4.0;
        for (label, t) in [
            ("Q^delta(x) vs delta Q^1(x/delta)", t1),
            ("omega mass lognormal law", t2),
            ("inverse lognormal law on the event", t3),
            ("event probability", t4),
        ] {
            verdict.check(
                format!("{label}: p > {level} (Bonferroni)"),
                t.p_value > level,
            );
            series.push(vec![series.rows.len() as f64, t.statistic, t.p_value]);
            verdict.test(label, t);
        }
        verdict.value(
            "event probability, direct",
            cond_left.len() as f64 / n as f64,
        );
        verdict.value(
            "event probability, scaled field",
            cond_right.len() as f64 / n as f64,
        );
        verdict.degenerate = g == 0.0;
        Ok(Outcome {
            verdict,
            series: vec![series],
        })
    }
}
