//! Monte Carlo estimates and two-sample tests.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{pairwise_sum, par_map, replica_rng, ReplicaRng};

/// Default per-test level.
pub const ALPHA: f64 = 0.01;

/// Mean of replicas with its standard error and a 95% normal interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicas: usize,
    pub seed: u64,
}

impl EstimateReport {
    pub fn from_samples(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::TooFewSamples { got: n, need: 2 });
        }
        let mean = pairwise_sum(values) / n as f64;
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = pairwise_sum(&sq) / (n - 1) as f64;
        let std_error = (var / n as f64).sqrt();
        Ok(EstimateReport {
            mean,
            std_error,
            ci_low: mean - 1.96 * std_error,
            ci_high: mean + 1.96 * std_error,
            replicas: n,
            seed,
        })
    }

    /// |mean − target| ≤ k·SE, with a rounding allowance for exact estimates.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error + 1e-12 * target.abs().max(1.0)
    }
}

/// Runs `sampler` once per replica, each on its own stream of `seed`.
pub fn mc_estimate<F>(sampler: F, replicas: usize, seed: u64) -> Result<EstimateReport>
where
    F: Fn(&mut ReplicaRng) -> f64 + Sync + Send,
{
    let values = par_map(replicas, |r| sampler(&mut replica_rng(seed, r as u64)));
    EstimateReport::from_samples(&values, seed)
}

/// Outcome of a hypothesis test at level `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub n_a: usize,
    pub n_b: usize,
}

impl TestReport {
    fn new(statistic: f64, p_value: f64, n_a: usize, n_b: usize) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestReport {
            statistic,
            p_value,
            alpha: ALPHA,
            reject: p_value < ALPHA,
            n_a,
            n_b,
        }
    }
}

/// Survival function of the Kolmogorov distribution, P(K > λ).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        let pi2 = std::f64::consts::PI.powi(2);
        let s: f64 = (1..=20)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-m * m * pi2 / (8.0 * lambda * lambda)).exp()
            })
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        2.0 * s
    }
}

/// P(N(0,1) > z).
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Two-sided z-test for equality of two binomial proportions.
pub fn two_proportion_test(hits_a: usize, n_a: usize, hits_b: usize, n_b: usize) -> TestReport {
    let (pa, pb) = (hits_a as f64 / n_a as f64, hits_b as f64 / n_b as f64);
    let pooled = (hits_a + hits_b) as f64 / (n_a + n_b) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n_a as f64 + 1.0 / n_b as f64)).sqrt();
    if se == 0.0 {
        return TestReport::new(0.0, 1.0, n_a, n_b);
    }
    let z = (pa - pb) / se;
    TestReport::new(z, 2.0 * normal_sf(z.abs()), n_a, n_b)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestReport> {
    const MIN: usize = 50;
    for s in [a, b] {
        if s.len() < MIN {
            return Err(Error::TooFewSamples {
                got: s.len(),
                need: MIN,
            });
        }
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(TestReport::new(d, kolmogorov_sf(lambda), n, m))
}

/// Ranks starting at 1, ties receiving their average rank.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut r = vec![0.0; v.len()];
    let mut s = 0;
    while s < idx.len() {
        let mut e = s + 1;
        while e < idx.len() && v[idx[e]] == v[idx[s]] {
            e += 1;
        }
        let avg = (s + e + 1) as f64 / 2.0;
        for &k in &idx[s..e] {
            r[k] = avg;
        }
        s = e;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

/// Spearman correlation test with a two-sided permutation p-value
/// (1 + #{|ρ_perm| ≥ |ρ|}) / (1 + permutations).
///
/// A constant sample has no rank association; the report then has
/// statistic 0 and p-value 1.
pub fn independence_test(
    x: &[f64],
    y: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<TestReport> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    const MIN: usize = 100;
    if x.len() < MIN {
        return Err(Error::TooFewSamples {
            got: x.len(),
            need: MIN,
        });
    }
    let n = x.len();
    let rx = ranks(x);
    let ry = ranks(y);
    let rho = pearson(&rx, &ry);
    if !rho.is_finite() {
        return Ok(TestReport::new(0.0, 1.0, n, n));
    }
    let hits = par_map(permutations, |p| {
        let mut perm = ry.clone();
        perm.shuffle(&mut replica_rng(seed, p as u64));
        (pearson(&rx, &perm).abs() >= rho.abs() - 1e-12) as usize
    })
    .into_iter()
    .sum::<usize>();
    let p = (1 + hits) as f64 / (1 + permutations) as f64;
    Ok(TestReport::new(rho, p, n, n))
}

/// Ordinary least squares fit y = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

pub fn slope_fit(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewSamples { got: n, need: 3 });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        slope_se: (ssr / (nf - 2.0) / sxx).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_sampler() {
        let r = mc_estimate(|_| 3.25, 100, 1).unwrap();
        assert_eq!(r.mean, 3.25);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.ci_low, r.ci_high);
        assert!(mc_estimate(|_| 1.0, 1, 1).is_err());
    }

    #[test]
    fn normal_tail_values() {
        assert_abs_diff_eq!(normal_sf(0.0), 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(normal_sf(1.959964), 0.025, epsilon = 1e-7);
        assert_abs_diff_eq!(normal_sf(-1.959964), 0.975, epsilon = 1e-7);
        assert_eq!(two_proportion_test(10, 100, 10, 100).p_value, 1.0);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn kolmogorov_branches_agree() {
        // both series are valid near λ = 1
        let pi2 = std::f64::consts::PI.powi(2);
        let l: f64 = 1.0;
        let small: f64 = 1.0
            - (2.0 * std::f64::consts::PI).sqrt() / l
                * (1..=20)
                    .map(|k| {
                        let m = (2 * k - 1) as f64;
                        (-m * m * pi2 / 8.0).exp()
                    })
                    .sum::<f64>();
        assert_abs_diff_eq!(small, kolmogorov_sf(1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(kolmogorov_sf(1.3580986), 0.05, epsilon = 1e-5);
    }

    #[test]
    fn ks_identical_samples() {
        let a: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(ks_two_sample(&a[..10], &a).is_err());
    }

    #[test]
    fn slope_of_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let f = slope_fit(&x, &y).unwrap();
        assert_abs_diff_eq!(f.slope, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.intercept, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.slope_se, 0.0, epsilon = 1e-7);
        assert_eq!(
            slope_fit(&[1.0; 3], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateDesign)
        );
    }

    #[test]
    fn independence_length_mismatch() {
        let x = vec![0.0; 120];
        assert!(matches!(
            independence_test(&x, &x[..110], 9, 1),
            Err(Error::LengthMismatch { .. })
        ));
        let r = independence_test(&x, &x, 9, 1).unwrap();
        assert_eq!(r.p_value, 1.0);
    }
}
