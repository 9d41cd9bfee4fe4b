//! Helpers shared by the experiments.

use crate::error::{Error, Result};
use crate::gmc::{build_measure, GmcMeasure};
use crate::inverse::invert;
use crate::logfield::{FieldSampler, FieldSpec, Grid};

/// Sampler for the truncated line field on `[0, span]` at the resolution limit.
pub fn line_sampler(gamma: f64, delta: f64, epsilon: f64, span: f64) -> Result<FieldSampler> {
    let spec = FieldSpec::line(gamma, delta, epsilon)?;
    FieldSampler::new(spec, Grid::covering(&spec, 0.0, span)?)
}

pub fn measure(sampler: &FieldSampler, seed: u64, replica: usize) -> GmcMeasure {
    build_measure(&sampler.sample(seed, replica as u64))
}

/// Q(x), failing with `InsufficientMass` when the sampled window is too short.
pub fn quantile(m: &GmcMeasure, x: f64) -> Result<f64> {
    if x > m.total() {
        return Err(Error::InsufficientMass {
            needed: x,
            available: m.total(),
        });
    }
    invert(m, x)
}

pub fn collect<T>(v: Vec<Result<T>>) -> Result<Vec<T>> {
    v.into_iter().collect()
}

pub fn mean(v: &[f64]) -> f64 {
    crate::rng::pairwise_sum(v) / v.len() as f64
}

/// Entries of `v` nonincreasing, up to `slack`.
pub fn nonincreasing(v: &[f64], slack: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + slack)
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}
