//! Ratios of inverse increments and the Whitney bound on the dilatation.

use super::graph::GapParams;
use super::support::{collect, line_sampler, measure, quantile};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::inverse::QuantilePath;
use crate::rng::par_map;
use crate::stattest::{slope_fit, EstimateReport};

params! {
    /// E[(Q(J)/Q(I))^p] for J = (a, a+x), I = (b, b+x), b − a = separation·x,
    /// and Whitney sums of the dilatation bound over [0,1] × [2^-levels, 2].
    RatioDilatation {
        gamma: f64 = 0.5,
        delta: f64 = 1.0,
        epsilon: f64 = 1.0 / 1024.0,
        a: f64 = 0.25,
        separation: f64 = 2.0,
        xs: Vec<f64> = vec![1.0 / 64.0, 1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0],
        p: f64 = 1.0,
        replicas: usize = 2000,
        slope_limit: f64 = 0.5,
        whitney_levels: usize = 6,
        whitney_refine: usize = 5,
        whitney_replicas: usize = 200,
        increment_limit: f64 = 0.05,
        span: f64 = 8.0,
    }
}

impl RatioDilatation {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(Error::Config(format!(
                "ratio_dilatation needs 0 <= gamma < 1, got {}",
                self.gamma
            )));
        }
        check_positive("delta", self.delta)?;
        check_positive("epsilon", self.epsilon)?;
        check_positive("separation", self.separation)?;
        check_replicas(self.replicas)?;
        if self.whitney_replicas > self.replicas || self.whitney_replicas < 2 {
            return Err(Error::Config(
                "whitney_replicas must lie in [2, replicas]".into(),
            ));
        }
        if self.xs.len() < 3 || self.xs.iter().any(|&x| !(x > 0.0 && x < self.delta)) {
            return Err(Error::Config("need at least three xs in (0, delta)".into()));
        }
        if self.whitney_levels + self.whitney_refine > 16 {
            return Err(Error::Config(
                "whitney_levels + whitney_refine must be at most 16".into(),
            ));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "ratio_dilatation",
            "ratio moments have a small scaling exponent; Whitney sums of the dilatation bound converge",
        );
        let mut ratios = Series::new("ratio_moments", &["x", "moment", "std_error"]);
        let mut whitney = Series::new("whitney_sums", &["level", "level_sum", "partial_sum"]);
        let sampler = line_sampler(self.gamma, self.delta, self.epsilon, self.span)?;
        let finest = self.whitney_levels + self.whitney_refine;
        let rows = collect(par_map(self.replicas, |r| {
            let m = measure(&sampler, seed, r);
            let path = QuantilePath::new(&m);
            let mut row = Vec::new();
            for &x in &self.xs {
                let b = self.a + self.separation * x;
                quantile(&m, b + x)?;
                let ratio = path.increment(self.a, self.a + x)? / path.increment(b, b + x)?;
                row.push(ratio.powf(self.p));
            }
            let sums = if r < self.whitney_replicas {
                // Q at the dyadic points of [0, 2] at the finest level
                let cells = 1usize << (finest + 1);
                let scale = (finest as f64).exp2();
                let knots = collect(
                    (0..=cells)
                        .map(|j| quantile(&m, j as f64 / scale))
                        .collect(),
                )?;
                whitney_level_sums(&knots, self.whitney_levels, self.whitney_refine)
            } else {
                Vec::new()
            };
            Ok((row, sums))
        }))?;

        let mut log_x = Vec::new();
        let mut log_m = Vec::new();
        for (k, &x) in self.xs.iter().enumerate() {
            let col: Vec<f64> = rows.iter().map(|(row, _)| row[k]).collect();
            let est = EstimateReport::from_samples(&col, seed)?;
            ratios.push(vec![x, est.mean, est.std_error]);
            log_x.push((x / self.delta).ln());
            log_m.push(est.mean.ln());
            verdict.estimate(format!("x={x}"), est);
        }
        let fit = slope_fit(&log_x, &log_m)?;
        verdict.value("ratio moment slope", fit.slope);
        verdict.value("ratio moment slope_se", fit.slope_se);
        verdict.check(
            format!("|slope| < {}", self.slope_limit),
            fit.slope.abs() < self.slope_limit,
        );

        let used: Vec<&Vec<f64>> = rows
            .iter()
            .map(|(_, s)| s)
            .filter(|s| !s.is_empty())
            .collect();
        let mut partial = 0.0;
        let mut level_means = Vec::new();
        for n in 0..=self.whitney_levels {
            let col: Vec<f64> = used.iter().map(|s| s[n]).collect();
            let level = super::support::mean(&col);
            partial += level;
            level_means.push(level);
            whitney.push(vec![n as f64, level, partial]);
        }
        let last = *level_means.last().unwrap();
        verdict.value("whitney partial sum", partial);
        verdict.value("whitney last increment share", last / partial);
        verdict.check("whitney sums finite", partial.is_finite());
        verdict.check(
            format!("last increment / total < {}", self.increment_limit),
            last / partial < self.increment_limit,
        );
        verdict.degenerate = self.gamma == 0.0;
        Ok(Outcome {
            verdict,
            series: vec![ratios, whitney],
        })
    }
}

/// Whitney-square contributions per level n = 0..=levels.
///
/// `knots[j] = Q(j·2^-(levels+refine))` on [0, 2]. Level n covers
/// [0,1] × [2^-n, 2^-n+1] by squares C_I = I × [2^-n, 2^-n+1], I ∈ D_n, of
/// area 4^-n. On C_I the dilatation is at most the sum over ordered pairs
/// (J₁, J₂) of level-(n+refine) dyadic intervals in I and its neighbours of
/// Q(J₁)/Q(J₂) + Q(J₂)/Q(J₁), which equals 2·(Σ Q(J))·(Σ 1/Q(J)).
pub fn whitney_level_sums(knots: &[f64], levels: usize, refine: usize) -> Vec<f64> {
    let finest = levels + refine;
    (0..=levels)
        .map(|n| {
            let step = 1usize << (finest - n - refine);
            let per_cell = 1usize << refine;
            let count = 1usize << n;
            let inc = |j: usize| knots[(j + 1) * step] - knots[j * step];
            let mut level = 0.0;
            for k in 0..count {
                let first = k.saturating_sub(1) * per_cell;
                let end = (k + 2) * per_cell;
                let (mut s, mut inv) = (0.0, 0.0);
                for j in first..end {
                    let q = inc(j);
                    s += q;
                    inv += 1.0 / q;
                }
                level += 2.0 * s * inv;
            }
            level * (-2.0 * n as f64).exp2()
        })
        .collect()
}

params! {
    /// Gated product of increment ratios over the scales in `scales`.
    MultipointSanity {
        gamma: f64 = 0.5,
        epsilon_ratio: f64 = 1.0 / 128.0,
        rho_star: f64 = 0.5,
        r_a: f64 = 0.25,
        r_b: f64 = 0.75,
        scales: Vec<usize> = vec![1, 2, 3],
        replicas: usize = 2000,
        factor: f64 = 3.0,
        span: f64 = 6.0,
    }
}

impl MultipointSanity {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_positive("factor", self.factor)?;
        check_positive("span", self.span)?;
        check_replicas(self.replicas)?;
        self.gap().validate()?;
        if self.scales.is_empty() || self.scales.len() > 3 {
            return Err(Error::Config("scales must hold one to three levels".into()));
        }
        Ok(())
    }

    fn gap(&self) -> GapParams {
        GapParams {
            rho_star: self.rho_star,
            r_a: self.r_a,
            r_b: self.r_b,
        }
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "multipoint_sanity",
            "E[Π_k (Q^k(J_k)/Q^k(I_k)) 1_G] is finite, positive and at most a constant times Π_k E[Q^k(J_k)/Q^k(I_k)]",
        );
        let mut series = Series::new("multipoint_sanity", &["scale", "single_ratio", "std_error"]);
        let gap = self.gap();
        let (ra, rb) = (gap.rho_a(), gap.rho_b());
        let step = (ra - rb) / 3.0;
        let sampler = line_sampler(self.gamma, 1.0, self.epsilon_ratio, self.span)?;
        let ns = self.scales.len();
        let rows = collect(par_map(self.replicas, |r| {
            let mut per_scale = Vec::new();
            for (k, &scale) in self.scales.iter().enumerate() {
                let m = measure(&sampler, seed, r * ns + k);
                let q: Vec<f64> =
                    collect((0..4).map(|i| quantile(&m, rb + i as f64 * step)).collect())?;
                let d = gap.delta(scale);
                let ratio = (q[1] - q[0]) / (q[3] - q[2]);
                per_scale.push((scale, d * q[3], d * q[0], ratio));
            }
            let mut gated = true;
            for i in 0..ns {
                for j in 0..ns {
                    let (si, qa, _, _) = per_scale[i];
                    let (sj, _, qb, _) = per_scale[j];
                    if si < sj && qa - qb <= gap.delta(sj) {
                        gated = false;
                    }
                }
            }
            let product: f64 = per_scale.iter().map(|s| s.3).product();
            let singles: Vec<f64> = per_scale.iter().map(|s| s.3).collect();
            Ok((if gated { product } else { 0.0 }, gated, singles))
        }))?;
        let gated: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let est = EstimateReport::from_samples(&gated, seed)?;
        let mut bound = self.factor;
        for (k, &scale) in self.scales.iter().enumerate() {
            let col: Vec<f64> = rows.iter().map(|r| r.2[k]).collect();
            let e = EstimateReport::from_samples(&col, seed)?;
            bound *= e.mean;
            series.push(vec![scale as f64, e.mean, e.std_error]);
            verdict.estimate(format!("scale {scale} ratio"), e);
        }
        let gate_freq = rows.iter().filter(|r| r.1).count() as f64 / rows.len() as f64;
        verdict.value("gap event frequency", gate_freq);
        verdict.value("bound", bound);
        verdict.check(
            "gated product finite and positive",
            est.mean.is_finite() && est.mean > 0.0,
        );
        verdict.check(
            format!(
                "gated product <= {} x product of single ratios",
                self.factor
            ),
            est.mean <= bound,
        );
        verdict.estimate("gated product", est);
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
    fn whitney_lebesgue_sums() {
        // Q(x) = x: every ratio is 1, a cell with m subintervals contributes 2m²
        let (levels, refine) = (3, 2);
        let finest = levels + refine;
        let knots: Vec<f64> = (0..=(1 << (finest + 1)))
            .map(|j| j as f64 / (finest as f64).exp2())
            .collect();
        let sums = whitney_level_sums(&knots, levels, refine);
        for (n, s) in sums.iter().enumerate() {
            let per = 4.0f64;
            let count = 1usize << n;
            let mut expect = 0.0;
            for k in 0..count {
                let cells = if k == 0 { 2.0 } else { 3.0 };
                expect += 2.0 * (cells * per).powi(2);
            }
            expect *= (-2.0 * n as f64).exp2();
            assert!(
                (s - expect).abs() < 1e-9 * expect,
                "level {n}: {s} vs {expect}"
            );
        }
    }
}
