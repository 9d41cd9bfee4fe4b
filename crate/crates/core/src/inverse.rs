//! The inverse Q(x) = inf{t : η(0,t) ≥ x} of a GMC measure.
//!
//! Q is read off the piecewise-linear cumulative mass on demand, so
//! `Q(η(0,t)) = t` and `η(0,Q(x)) = x` hold up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmc::GmcMeasure;

/// Q(x) for `0 ≤ x ≤ total mass`, measured from the start of the domain.
pub fn invert(measure: &GmcMeasure, x: f64) -> Result<f64> {
    let c = &measure.cumulative;
    let total = measure.total();
    // levels computed by callers may overshoot the total by a few ulps
    let x = if x > total && x <= total + 16.0 * f64::EPSILON * total {
        total
    } else {
        x
    };
    if !(x >= 0.0 && x <= total) {
        return Err(Error::OutOfDomain {
            value: x,
            lo: 0.0,
            hi: total,
        });
    }
    // first knot with cumulative ≥ x
    let j = c.partition_point(|&v| v < x);
    if c[j] == x {
        return Ok(measure.knot(j) - measure.start());
    }
    let i = j - 1;
    let frac = (x - c[i]) / (c[j] - c[i]);
    Ok(measure.knot(i) - measure.start() + frac * measure.grid.spacing)
}

/// Read-only view of the inverse of a measure.
#[derive(Debug, Clone, Copy)]
pub struct QuantilePath<'a> {
    pub measure: &'a GmcMeasure,
}

/// Dyadic upper approximation `(m+1)/2ⁿ` of Q(a), where `m/2ⁿ ≤ Q(a) < (m+1)/2ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicApprox {
    pub level: u32,
    pub value: f64,
}

impl<'a> QuantilePath<'a> {
    pub fn new(measure: &'a GmcMeasure) -> Self {
        QuantilePath { measure }
    }

    pub fn total(&self) -> f64 {
        self.measure.total()
    }

    pub fn q(&self, x: f64) -> Result<f64> {
        invert(self.measure, x)
    }

    /// Q(a, b) = Q(b) − Q(a).
    pub fn increment(&self, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::OutOfDomain {
                value: a,
                lo: 0.0,
                hi: b,
            });
        }
        Ok(self.q(b)? - self.q(a)?)
    }

    /// Q_x • T: the first `t` with η(T, T+t) ≥ x, `T` measured from the start.
    pub fn semigroup_shift(&self, x: f64, t: f64) -> Result<f64> {
        let m = self.measure;
        let before = m.cumulative_at(m.start() + t)?;
        let available = m.total() - before;
        // rounding in `before` may cost an ulp of the total
        if x > available + 16.0 * f64::EPSILON * m.total() {
            return Err(Error::InsufficientMass {
                needed: x,
                available,
            });
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(self.q((before + x).min(m.total()))? - t)
    }

    pub fn dyadic_approx(&self, a: f64, n: u32) -> Result<DyadicApprox> {
        let q = self.q(a)?;
        let scale = (n as f64).exp2();
        let m = (q * scale).floor();
        Ok(DyadicApprox {
            level: n,
            value: (m + 1.0) / scale,
        })
    }

    /// h⁻¹(x) = Q(x·η(0,1)) for x ∈ [0,1]; the unit is the mass of the whole domain.
    pub fn normalized_inverse(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain {
                value: x,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if x == 1.0 {
            return Ok(self.measure.end() - self.measure.start());
        }
        self.q(x * self.total())
    }

    /// h(t) = η(0,t)/η(0,1), the inverse of [`Self::normalized_inverse`].
    pub fn normalized_forward(&self, t: f64) -> Result<f64> {
        Ok(self.measure.cumulative_at(self.measure.start() + t)? / self.total())
    }

    /// Periodic extension of h⁻¹ to the real line: h⁻¹(x + k) = h⁻¹(x) + k·L,
    /// with L the length of the domain (1 on the circle).
    pub fn periodic_inverse(&self, x: f64) -> Result<f64> {
        let k = x.floor();
        let len = self.measure.end() - self.measure.start();
        Ok(k * len + self.normalized_inverse(x - k)?)
    }
}

/// Comparison constants between two measures of the same noise at two scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleComparison {
    /// G(c) = c / ηⁿ(0, Q(c)).
    pub g_point: f64,
    /// G(c, c+y) = y / ηⁿ(Q(c), Q(c+y)).
    pub g_interval: f64,
    /// Smallest and largest ratio of cell densities dη/dηⁿ over [Q(c), Q(c+y)].
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Endpoints of Qⁿ applied to [c/G(c), c/G(c) + y/G(c,c+y)].
    pub mapped: (f64, f64),
    /// Endpoints of Q on [c, c+y].
    pub direct: (f64, f64),
}

/// Compares the measure `eta` with a measure `eta_n` of the same noise at another scale.
pub fn scale_comparison(
    eta: &GmcMeasure,
    eta_n: &GmcMeasure,
    c: f64,
    y: f64,
) -> Result<ScaleComparison> {
    if eta.grid != eta_n.grid || eta.knot_count() != eta_n.knot_count() {
        return Err(Error::ScaleMismatch(format!(
            "grids differ: {:?} vs {:?}",
            eta.grid, eta_n.grid
        )));
    }
    let q = QuantilePath::new(eta);
    let qn = QuantilePath::new(eta_n);
    let (t0, t1) = (q.q(c)?, q.q(c + y)?);
    let s = eta.start();
    let base = eta_n.cumulative_at(s + t0)?;
    let span = eta_n.cumulative_at(s + t1)? - base;
    let g_point = if c == 0.0 { 1.0 } else { c / base };
    let g_interval = y / span;
    let h = eta.grid.spacing;
    let first = ((t0 / h).floor() as usize).min(eta.knot_count() - 2);
    let last = ((t1 / h).ceil() as usize).clamp(first + 1, eta.knot_count() - 1);
    let (mut ratio_min, mut ratio_max) = (f64::INFINITY, 0f64);
    for i in first..last {
        let r = eta.cell_density(i) / eta_n.cell_density(i);
        ratio_min = ratio_min.min(r);
        ratio_max = ratio_max.max(r);
    }
    let lo = c / g_point;
    let hi = lo + y / g_interval;
    let mapped = (qn.q(lo)?, qn.q(hi.min(eta_n.total()))?);
    Ok(ScaleComparison {
        g_point,
        g_interval,
        ratio_min,
        ratio_max,
        mapped,
        direct: (t0, t1),
    })
}

/// Density at `t ∈ (0,1)` of the hitting time Q_ω(x) of the exact-scaling
/// measure with δ = 1.
///
/// Uses η_ω(0,t) = t·e^{Ω̄_t}·η_ω(0,1) with L = ln(1/t) and c = 1 + γ²/2:
/// the density is the average over the supplied draws of η_ω(0,1) of
///
/// ∫_{ln(x/η)}^∞ e^{−(y + cL)²/(2γ²L)} (c²L² + γ²L − y²) / (2√(2π) γ³ L^{5/2} t) dy,
///
/// with the y-integral cut where the Gaussian factor falls below 1e-14 of
/// its peak and evaluated by adaptive Simpson on `quad_points` panels.
pub fn density_q_omega(
    x: f64,
    t: f64,
    gamma: f64,
    eta1_samples: &[f64],
    quad_points: usize,
) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfDomain {
            value: t,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if !(gamma > 0.0) || x <= 0.0 || eta1_samples.is_empty() {
        return Err(Error::DegenerateTail(
            "need gamma > 0, x > 0 and at least one sample".into(),
        ));
    }
    let l = (1.0 / t).ln();
    let c = 1.0 + gamma * gamma / 2.0;
    let g2l = gamma * gamma * l;
    let sigma = g2l.sqrt();
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * 2.0 * gamma.powi(3) * l.powf(2.5) * t);
    let f = |y: f64| {
        let z = y + c * l;
        norm * (-z * z / (2.0 * g2l)).exp() * (c * c * l * l + g2l - y * y)
    };
    let cut = (2.0 * 1e14f64.ln()).sqrt() * sigma;
    let (peak_lo, peak_hi) = (-c * l - cut, -c * l + cut);
    let panels = quad_points.max(1);
    let mut total = 0.0;
    for &eta in eta1_samples {
        let lower = (x / eta).ln().max(peak_lo);
        if lower >= peak_hi {
            continue;
        }
        let w = (peak_hi - lower) / panels as f64;
        for k in 0..panels {
            let a = lower + k as f64 * w;
            total += adaptive_simpson(&f, a, a + w, 1e-12, 40)?;
        }
    }
    Ok(total / eta1_samples.len() as f64)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Option<f64> {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Some(left + right + delta / 15.0);
        }
        if depth == 0 {
            return None;
        }
        Some(
            rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)?
                + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)?,
        )
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, depth)
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            Error::DegenerateTail(format!("adaptive Simpson did not converge on [{a}, {b}]"))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logfield::{FieldSpec, Grid};

    fn lebesgue() -> GmcMeasure {
        let spec = FieldSpec::line(0.0, 1.0, 0.125).unwrap();
        let grid = Grid::covering(&spec, 0.0, 1.0).unwrap();
        GmcMeasure::from_values(spec, grid, &vec![0.0; grid.count]).unwrap()
    }

    #[test]
    fn lebesgue_inverse_is_identity() {
        let m = lebesgue();
        let p = QuantilePath::new(&m);
        assert_eq!(p.q(0.0).unwrap(), 0.0);
        for x in [0.1, 0.33, 0.5, 0.999] {
            assert!((p.q(x).unwrap() - x).abs() < 1e-14);
            assert!((p.semigroup_shift(0.2 * x, 0.1).unwrap() - 0.2 * x).abs() < 1e-14);
        }
        assert!(p.q(1.5).is_err());
        assert!(matches!(
            p.semigroup_shift(0.5, 0.7),
            Err(Error::InsufficientMass { .. })
        ));
    }

    #[test]
    fn dyadic_examples() {
        let m = lebesgue();
        let p = QuantilePath::new(&m);
        assert_eq!(p.dyadic_approx(0.3, 3).unwrap().value, 0.375);
        assert_eq!(p.dyadic_approx(0.25, 2).unwrap().value, 0.5);
    }

    #[test]
    fn normalized_inverse_ends() {
        let m = lebesgue();
        let p = QuantilePath::new(&m);
        assert_eq!(p.normalized_inverse(0.0).unwrap(), 0.0);
        assert_eq!(p.normalized_inverse(1.0).unwrap(), 1.0);
        assert_eq!(p.periodic_inverse(2.0).unwrap(), 2.0);
    }

    #[test]
    fn density_rejects_bad_time() {
        assert!(density_q_omega(0.5, 1.0, 0.5, &[1.0], 8).is_err());
        assert!(density_q_omega(0.5, 0.5, 0.5, &[], 8).is_err());
        assert_eq!(density_q_omega(1e30, 0.5, 0.5, &[1.0], 8).unwrap(), 0.0);
    }
}
