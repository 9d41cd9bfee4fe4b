//! GMC measures built from field realizations.
//!
//! A measure is stored as its cumulative mass at the grid knots and is
//! piecewise linear in between. Cell `i` (from knot `i` to knot `i+1`)
//! carries mass `h·exp(γU(x_i) − γ²K(0)/2)`. On the circle the last cell
//! wraps from the last grid point back to 1, so there is one more knot
//! than grid points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logfield::{FieldKind, FieldSample, FieldSampler, FieldSpec, Grid};
use crate::rng::par_map;
use crate::stattest::EstimateReport;

/// Cumulative mass function of a GMC measure on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmcMeasure {
    pub grid: Grid,
    pub cumulative: Vec<f64>,
    pub spec: FieldSpec,
}

impl GmcMeasure {
    /// Measure with density `exp(γ·values[i] − γ²·variance/2)` on cell `i`.
    pub fn from_values(spec: FieldSpec, grid: Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: grid.count,
            });
        }
        let g = spec.gamma;
        let shift = g * g * spec.variance() / 2.0;
        let cells = cell_count(&spec, &grid);
        let density: Vec<f64> = values[..cells]
            .iter()
            .map(|v| (g * v - shift).exp())
            .collect();
        Ok(Self::from_density(spec, grid, &density))
    }

    /// Measure with the given per-cell densities.
    pub fn from_density(spec: FieldSpec, grid: Grid, density: &[f64]) -> Self {
        let mut cumulative = Vec::with_capacity(density.len() + 1);
        let mut acc = 0.0;
        cumulative.push(acc);
        for d in density {
            acc += grid.spacing * d;
            cumulative.push(acc);
        }
        GmcMeasure {
            grid,
            cumulative,
            spec,
        }
    }

    pub fn periodic(&self) -> bool {
        self.spec.kind == FieldKind::CircleTrace
    }

    pub fn knot_count(&self) -> usize {
        self.cumulative.len()
    }

    /// Position of knot `i`.
    pub fn knot(&self, i: usize) -> f64 {
        self.grid.point(i)
    }

    /// Left end of the domain.
    pub fn start(&self) -> f64 {
        self.grid.origin
    }

    /// Right end of the domain (last knot).
    pub fn end(&self) -> f64 {
        self.knot(self.knot_count() - 1)
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Density of cell `i` with respect to Lebesgue measure.
    pub fn cell_density(&self, i: usize) -> f64 {
        (self.cumulative[i + 1] - self.cumulative[i]) / self.grid.spacing
    }

    /// η(start, t).
    pub fn cumulative_at(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.start(), self.end());
        // tolerate rounding in endpoints computed by callers
        let slack = 1e-9 * self.grid.spacing;
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::OutOfDomain { value: t, lo, hi });
        }
        let t = t.clamp(lo, hi);
        let s = (t - lo) / self.grid.spacing;
        let i = (s.floor() as usize).min(self.knot_count() - 2);
        if t == self.knot(i) {
            return Ok(self.cumulative[i]);
        }
        let frac = (t - self.knot(i)) / self.grid.spacing;
        Ok(self.cumulative[i] + frac * (self.cumulative[i + 1] - self.cumulative[i]))
    }

    /// η(a, b) for `a ≤ b` in the domain.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::OutOfDomain {
                value: a,
                lo: self.start(),
                hi: b,
            });
        }
        Ok(self.cumulative_at(b)? - self.cumulative_at(a)?)
    }
}

fn cell_count(spec: &FieldSpec, grid: &Grid) -> usize {
    if spec.kind == FieldKind::CircleTrace {
        grid.count
    } else {
        grid.count - 1
    }
}

pub fn build_measure(sample: &FieldSample) -> GmcMeasure {
    GmcMeasure::from_values(sample.spec, sample.grid, &sample.values)
        .expect("FieldSample has one value per grid point")
}

/// Multifractal exponent ζ(q) = q − (γ²/2)(q² − q).
pub fn zeta(q: f64, gamma: f64) -> f64 {
    q - gamma * gamma / 2.0 * (q * q - q)
}

/// Moment estimate, with a trimmed mean when `q` is close to the critical moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub estimate: EstimateReport,
    /// Mean with the top 1% of replicas removed; present when q > 0.8/β.
    pub trimmed_mean: Option<f64>,
}

/// Monte Carlo estimate of E[η(0,t)^q] for the field `spec`.
pub fn estimate_moment(
    spec: &FieldSpec,
    t: f64,
    q: f64,
    replicas: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    let grid = Grid::covering(spec, 0.0, t)?;
    let sampler = FieldSampler::new(*spec, grid)?;
    let values = par_map(replicas, |r| {
        let m = build_measure(&sampler.sample(seed, r as u64));
        m.mass(0.0, t).map(|x| x.powf(q))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let estimate = EstimateReport::from_samples(&values, seed)?;
    let beta = spec.beta();
    let trimmed_mean = (beta > 0.0 && q > 0.8 / beta).then(|| trimmed_mean(&values, 0.01));
    Ok(MomentEstimate {
        estimate,
        trimmed_mean,
    })
}

fn trimmed_mean(values: &[f64], top: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let keep = v.len() - ((v.len() as f64 * top).floor() as usize);
    crate::rng::pairwise_sum(&v[..keep]) / keep as f64
}

/// GMC measure reweighted by `exp(γ²·K(|x − a|))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedMeasure {
    pub base: GmcMeasure,
    pub anchor: f64,
    pub tilted: GmcMeasure,
}

impl TiltedMeasure {
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        self.tilted.mass(a, b)
    }
}

pub fn build_tilted(base: &GmcMeasure, a: f64) -> Result<TiltedMeasure> {
    if !(a >= base.start() && a <= base.end()) {
        return Err(Error::OutOfDomain {
            value: a,
            lo: base.start(),
            hi: base.end(),
        });
    }
    let kernel = base.spec.kernel();
    let g2 = base.spec.gamma * base.spec.gamma;
    if g2 == 0.0 {
        return Ok(TiltedMeasure {
            base: base.clone(),
            anchor: a,
            tilted: base.clone(),
        });
    }
    let density: Vec<f64> = (0..base.knot_count() - 1)
        .map(|i| base.cell_density(i) * (g2 * kernel.eval(base.knot(i) - a)).exp())
        .collect();
    Ok(TiltedMeasure {
        base: base.clone(),
        anchor: a,
        tilted: GmcMeasure::from_density(base.spec, base.grid, &density),
    })
}
