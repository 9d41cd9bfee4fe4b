//! Log-correlated Gaussian fields on the line and on the circle.
//!
//! Each field family is described by a [`FieldSpec`] and realized purely
//! through its closed-form covariance kernel. Realizations on a uniform
//! [`Grid`] come from an exact Gaussian sampler: a banded Cholesky factor
//! of the covariance matrix, or a circulant embedding when the kernel is
//! stationary and the embedding is nonnegative definite.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, replica_rng};

/// Which log-correlated field a [`FieldSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// Cone field truncated above at height `delta` and below at `epsilon`.
    LineTruncated,
    /// Cone field with no upper truncation; has exact lognormal scaling.
    ExactCone,
    /// Trace of the free field on the unit circle, lower-truncated at `epsilon`.
    CircleTrace,
    /// Auxiliary field of the truncated scaling law with parameter `lambda`.
    ScaledLambda,
}

/// Parameters of one log-correlated field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub lambda: Option<f64>,
}

impl FieldSpec {
    pub fn new(
        kind: FieldKind,
        gamma: f64,
        delta: f64,
        epsilon: f64,
        lambda: Option<f64>,
    ) -> Result<Self> {
        let spec = FieldSpec {
            kind,
            gamma,
            delta,
            epsilon,
            lambda,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn line(gamma: f64, delta: f64, epsilon: f64) -> Result<Self> {
        Self::new(FieldKind::LineTruncated, gamma, delta, epsilon, None)
    }

    pub fn cone(gamma: f64, delta: f64, epsilon: f64) -> Result<Self> {
        Self::new(FieldKind::ExactCone, gamma, delta, epsilon, None)
    }

    /// Circle field; the circle has unit length, so `delta` is fixed to 1.
    pub fn circle(gamma: f64, epsilon: f64) -> Result<Self> {
        Self::new(FieldKind::CircleTrace, gamma, 1.0, epsilon, None)
    }

    pub fn scaled(gamma: f64, delta: f64, epsilon: f64, lambda: f64) -> Result<Self> {
        Self::new(FieldKind::ScaledLambda, gamma, delta, epsilon, Some(lambda))
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be nonnegative, got {}", self.gamma));
        }
        if self.gamma * self.gamma >= 2.0 {
            return bad(format!("gamma² < 2 required, got gamma = {}", self.gamma));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= self.delta) {
            return bad(format!(
                "epsilon must lie in (0, delta], got epsilon = {}, delta = {}",
                self.epsilon, self.delta
            ));
        }
        match self.kind {
            FieldKind::ScaledLambda => match self.lambda {
                Some(l) if l > 0.0 && l < 1.0 => {}
                other => return bad(format!("lambda must lie in (0,1), got {other:?}")),
            },
            FieldKind::CircleTrace => {
                if self.epsilon > 0.5 {
                    return bad(format!(
                        "circle field needs epsilon <= 1/2, got {}",
                        self.epsilon
                    ));
                }
                if self.lambda.is_some() {
                    return bad("lambda only applies to ScaledLambda".into());
                }
            }
            _ => {
                if self.lambda.is_some() {
                    return bad("lambda only applies to ScaledLambda".into());
                }
            }
        }
        Ok(())
    }

    /// β = γ²/2.
    pub fn beta(&self) -> f64 {
        self.gamma * self.gamma / 2.0
    }

    /// Pointwise variance K(0).
    pub fn variance(&self) -> f64 {
        self.kernel().eval(0.0)
    }

    pub fn kernel(&self) -> CovarianceKernel {
        CovarianceKernel {
            spec: *self,
            periodic: self.kind == FieldKind::CircleTrace,
        }
    }

    /// Distance beyond which the covariance vanishes (`None` for the circle).
    pub fn cutoff(&self) -> Option<f64> {
        match self.kind {
            FieldKind::LineTruncated | FieldKind::ExactCone => Some(self.delta),
            FieldKind::ScaledLambda => Some(self.delta / self.lambda.unwrap_or(1.0)),
            FieldKind::CircleTrace => None,
        }
    }

    /// Same field with a different γ; the kernel does not depend on γ.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.kind, gamma, self.delta, self.epsilon, self.lambda)
    }
}

/// Stationary covariance R(|x₁ − x₂|) of a field family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceKernel {
    pub spec: FieldSpec,
    pub periodic: bool,
}

impl CovarianceKernel {
    /// Evaluates the kernel at distance `d ≥ 0`.
    pub fn eval(&self, d: f64) -> f64 {
        let s = &self.spec;
        let d = d.abs();
        match s.kind {
            FieldKind::LineTruncated => truncated_cov(s.delta, s.epsilon, d),
            FieldKind::ExactCone => cone_cov(s.delta, s.epsilon, d),
            FieldKind::ScaledLambda => scaled_cov(s.delta, s.epsilon, s.lambda.unwrap_or(1.0), d),
            FieldKind::CircleTrace => {
                let mut y = d.rem_euclid(1.0);
                if y > 0.5 {
                    y = 1.0 - y;
                }
                circle_cov(s.epsilon, y)
            }
        }
    }
}

/// Covariance of the cone field truncated to heights in (ε, δ].
pub fn truncated_cov(delta: f64, eps: f64, d: f64) -> f64 {
    if d >= delta {
        0.0
    } else if d <= eps {
        (delta / eps).ln() - (1.0 / eps - 1.0 / delta) * d
    } else {
        (delta / d).ln() + d / delta - 1.0
    }
}

/// Covariance of the untruncated-above cone field of width δ.
pub fn cone_cov(delta: f64, eps: f64, d: f64) -> f64 {
    if d >= delta {
        0.0
    } else if d <= eps {
        (delta / eps).ln() + 1.0 - d / eps
    } else {
        (delta / d).ln()
    }
}

/// Covariance of the λ-scaled truncated field. Negative on (δ, δ/λ), so it is
/// only positive definite on sets of diameter at most δ.
pub fn scaled_cov(delta: f64, eps: f64, lambda: f64, d: f64) -> f64 {
    let shift = (1.0 - lambda) * (1.0 - d / delta);
    if d >= delta / lambda {
        0.0
    } else if d <= eps {
        (delta / eps).ln() - (1.0 / eps - 1.0 / delta) * d + shift
    } else {
        (delta / d).ln() - 1.0 + d / delta + shift
    }
}

/// Width of the regime where the ε-truncation of the circle wedge is active.
pub fn circle_joint(eps: f64) -> f64 {
    2.0 / PI * (PI * eps / 2.0).atan()
}

/// Covariance of the lower-truncated circle trace field at folded distance `y ∈ [0, 1/2]`.
///
/// For `y` inside the truncation window the constant row and the
/// y-dependent row add up; together they give the hyperbolic area of the
/// intersected wedges cut at height ε, which is continuous at the joint.
pub fn circle_cov(eps: f64, y: f64) -> f64 {
    if y > circle_joint(eps) {
        2.0 * 2f64.ln() + (1.0 / (2.0 * (PI * y).sin())).ln()
    } else {
        let constant = (1.0 / eps).ln()
            + 0.5 * (PI * PI * eps * eps + 4.0).ln()
            + 2.0 / PI * (PI * eps / 2.0).atan() / eps;
        constant - PI.ln() - y / eps - (PI * y / 2.0).cos().ln()
    }
}

/// Uniform grid `origin + i·spacing`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: f64,
    pub spacing: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(origin: f64, spacing: f64, count: usize) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        if count < 1 {
            return Err(Error::InvalidSpec("grid needs at least one point".into()));
        }
        Ok(Grid {
            origin,
            spacing,
            count,
        })
    }

    /// Grid at the resolution limit ε/4 that covers `[origin, origin + span]`.
    pub fn covering(spec: &FieldSpec, origin: f64, span: f64) -> Result<Self> {
        let h = spec.epsilon / 4.0;
        let cells = (span / h - 1e-9).ceil().max(1.0) as usize;
        Grid::new(origin, h, cells + 1)
    }

    /// Full-circle grid with a power-of-two number of points and spacing ≤ ε/4.
    pub fn circle(spec: &FieldSpec) -> Result<Self> {
        let need = (4.0 / spec.epsilon).ceil() as usize;
        let count = need.next_power_of_two().max(4);
        Grid::new(0.0, 1.0 / count as f64, count)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn span(&self) -> f64 {
        (self.count - 1) as f64 * self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    /// Checks the resolution rule h ≤ ε/4 for `spec`.
    pub fn check_resolution(&self, spec: &FieldSpec) -> Result<()> {
        let limit = spec.epsilon / 4.0;
        if self.spacing > limit * (1.0 + 1e-12) {
            return Err(Error::GridTooCoarse {
                spacing: self.spacing,
                limit,
            });
        }
        Ok(())
    }

    fn covers_circle(&self) -> bool {
        (self.count as f64 * self.spacing - 1.0).abs() < 1e-12
    }
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

fn check_domain(spec: &FieldSpec, grid: &Grid) -> Result<()> {
    if spec.kind == FieldKind::ScaledLambda && grid.span() > spec.delta * (1.0 + 1e-12) {
        return Err(Error::InvalidSpec(format!(
            "ScaledLambda field can only be evaluated on sets of length <= delta = {}, grid span is {}",
            spec.delta,
            grid.span()
        )));
    }
    Ok(())
}

/// Covariance matrix M[i][j] = K(|x_i − x_j|) of a kernel on a grid.
pub fn covariance_matrix(kernel: &CovarianceKernel, grid: &Grid) -> Result<SymMatrix> {
    grid.check_resolution(&kernel.spec)?;
    check_domain(&kernel.spec, grid)?;
    let n = grid.count;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval((j - i) as f64 * grid.spacing);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(SymMatrix { n, data })
}

const JITTERS: [f64; 5] = [1e-12, 1e-11, 1e-10, 1e-9, 1e-8];

/// Lower Cholesky factor of a banded covariance matrix.
///
/// Row `i` stores `L[i][i-bw ..= i]`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    bw: usize,
    rows: Vec<f64>,
    pub jitter: f64,
}

impl CholeskyFactor {
    /// Factors the grid covariance of `kernel`, escalating the diagonal jitter
    /// from 1e-12 to 1e-8 before giving up.
    pub fn new(kernel: &CovarianceKernel, grid: &Grid) -> Result<Self> {
        grid.check_resolution(&kernel.spec)?;
        check_domain(&kernel.spec, grid)?;
        let n = grid.count;
        let bw = match (kernel.periodic, kernel.spec.cutoff()) {
            (false, Some(c)) => ((c / grid.spacing).ceil() as usize).min(n - 1),
            _ => n - 1,
        };
        // cov[k] = K(k·h) for the lags inside the band
        let cov: Vec<f64> = (0..=bw)
            .map(|k| kernel.eval(k as f64 * grid.spacing))
            .collect();
        let mut last_pivot = 0;
        for &jitter in &JITTERS {
            match Self::factor(n, bw, &cov, jitter) {
                Ok(rows) => {
                    return Ok(CholeskyFactor {
                        n,
                        bw,
                        rows,
                        jitter,
                    })
                }
                Err(pivot) => last_pivot = pivot,
            }
        }
        Err(Error::NotPositiveDefinite {
            pivot: last_pivot,
            jitter: *JITTERS.last().unwrap(),
        })
    }

    fn factor(
        n: usize,
        bw: usize,
        cov: &[f64],
        jitter: f64,
    ) -> std::result::Result<Vec<f64>, usize> {
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = cov[i - j];
                if i == j {
                    s += jitter;
                }
                let k0 = j0.max(j.saturating_sub(bw));
                let (ri, rj) = (i * w + bw - i, j * w + bw - j);
                for k in k0..j {
                    s -= l[ri + k] * l[rj + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(i);
                    }
                    l[ri + i] = s.sqrt();
                } else {
                    l[ri + j] = s / l[rj + j];
                }
            }
        }
        Ok(l)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.bw {
            0.0
        } else {
            self.rows[i * (self.bw + 1) + self.bw - i + j]
        }
    }

    /// Returns L·z.
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let w = self.bw + 1;
        (0..self.n)
            .map(|i| {
                let j0 = i.saturating_sub(self.bw);
                let row = &self.rows[i * w + self.bw - i..];
                (j0..=i).map(|j| row[j] * z[j]).sum()
            })
            .collect()
    }
}

/// Spectral square root of a circulant embedding of a stationary covariance.
#[derive(Clone)]
pub struct CirculantFactor {
    n: usize,
    scaled_sqrt_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    pub embedding: usize,
}

impl std::fmt::Debug for CirculantFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantFactor")
            .field("n", &self.n)
            .field("embedding", &self.embedding)
            .finish()
    }
}

impl CirculantFactor {
    /// Builds the embedding, doubling its size until the spectrum is
    /// nonnegative. Returns `None` when no admissible embedding is found.
    pub fn new(kernel: &CovarianceKernel, grid: &Grid) -> Option<Self> {
        let n = grid.count;
        let h = grid.spacing;
        let mut planner = FftPlanner::new();
        let mut sizes = Vec::new();
        if kernel.periodic && grid.covers_circle() {
            sizes.push(n);
        } else {
            let mut m = (2 * n.saturating_sub(1)).max(2).next_power_of_two();
            while m <= (1 << 24) && sizes.len() < 6 {
                sizes.push(m);
                m *= 2;
            }
        }
        for m in sizes {
            let mut buf: Vec<Complex<f64>> = (0..m)
                .map(|j| {
                    let lag = j.min(m - j);
                    Complex::new(kernel.eval(lag as f64 * h), 0.0)
                })
                .collect();
            let fft = planner.plan_fft_forward(m);
            fft.process(&mut buf);
            let max = buf.iter().map(|c| c.re).fold(0.0, f64::max);
            let min = buf.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
            if min < -1e-10 * max {
                continue;
            }
            let scaled_sqrt_eig = buf
                .iter()
                .map(|c| (c.re.max(0.0) / m as f64).sqrt())
                .collect();
            return Some(CirculantFactor {
                n,
                scaled_sqrt_eig,
                fft,
                embedding: m,
            });
        }
        None
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self
            .scaled_sqrt_eig
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf[..self.n].iter().map(|c| c.re).collect()
    }
}

/// How a [`FieldSampler`] realizes the Gaussian vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMethod {
    /// Circulant embedding when admissible, Cholesky otherwise.
    Auto,
    Cholesky,
    Circulant,
}

#[derive(Debug, Clone)]
enum Factor {
    Cholesky(CholeskyFactor),
    Circulant(CirculantFactor),
}

/// One realization of a field on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub spec: FieldSpec,
    pub seed: u64,
}

/// Precomputed exact sampler for a (spec, grid) pair.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    spec: FieldSpec,
    grid: Grid,
    factor: Factor,
}

impl FieldSampler {
    pub fn new(spec: FieldSpec, grid: Grid) -> Result<Self> {
        Self::with_method(spec, grid, SamplingMethod::Auto)
    }

    pub fn with_method(spec: FieldSpec, grid: Grid, method: SamplingMethod) -> Result<Self> {
        grid.check_resolution(&spec)?;
        check_domain(&spec, &grid)?;
        let kernel = spec.kernel();
        let circulant_ok = spec.kind != FieldKind::ScaledLambda;
        let factor = match method {
            SamplingMethod::Cholesky => Factor::Cholesky(CholeskyFactor::new(&kernel, &grid)?),
            SamplingMethod::Circulant => match CirculantFactor::new(&kernel, &grid) {
                Some(c) if circulant_ok => Factor::Circulant(c),
                _ => {
                    return Err(Error::InvalidSpec(
                        "no nonnegative circulant embedding for this field".into(),
                    ))
                }
            },
            SamplingMethod::Auto => match circulant_ok
                .then(|| CirculantFactor::new(&kernel, &grid))
                .flatten()
            {
                Some(c) => Factor::Circulant(c),
                None => Factor::Cholesky(CholeskyFactor::new(&kernel, &grid)?),
            },
        };
        Ok(FieldSampler { spec, grid, factor })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn method(&self) -> SamplingMethod {
        match self.factor {
            Factor::Cholesky(_) => SamplingMethod::Cholesky,
            Factor::Circulant(_) => SamplingMethod::Circulant,
        }
    }

    /// Draws field values from `rng`.
    pub fn sample_values<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.factor {
            Factor::Cholesky(l) => {
                let z: Vec<f64> = (0..self.grid.count)
                    .map(|_| rng.sample(StandardNormal))
                    .collect();
                l.apply(&z)
            }
            Factor::Circulant(c) => c.sample(rng),
        }
    }

    /// Realization number `replica` under master `seed`.
    pub fn sample(&self, seed: u64, replica: u64) -> FieldSample {
        let mut rng = replica_rng(seed, replica);
        FieldSample {
            grid: self.grid,
            values: self.sample_values(&mut rng),
            spec: self.spec,
            seed,
        }
    }
}

/// Exact sample `L·z` with `L` the Cholesky factor of the grid covariance.
pub fn sample_field(spec: &FieldSpec, grid: &Grid, seed: u64) -> Result<FieldSample> {
    let sampler = FieldSampler::with_method(*spec, *grid, SamplingMethod::Cholesky)?;
    Ok(sampler.sample(seed, 0))
}

/// Variance convention of a scale-λ lognormal factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LognormalVariant {
    /// Exact-scaling factor, variance ln(1/λ).
    Omega,
    /// Truncated-field factor, variance ln(1/λ) − 1 + λ.
    Z,
}

/// Normalized lognormal exponent γN(0, σ²) − γ²σ²/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lognormal {
    pub lambda: f64,
    pub gamma: f64,
    pub variant: LognormalVariant,
}

impl Lognormal {
    pub fn new(lambda: f64, gamma: f64, variant: LognormalVariant) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "lambda must lie in (0,1), got {lambda}"
            )));
        }
        Ok(Lognormal {
            lambda,
            gamma,
            variant,
        })
    }

    /// σ² of the underlying Gaussian (before the γ factor).
    pub fn variance(&self) -> f64 {
        let l = (1.0 / self.lambda).ln();
        match self.variant {
            LognormalVariant::Omega => l,
            LognormalVariant::Z => l - 1.0 + self.lambda,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s2 = self.variance();
        let z: f64 = rng.sample(StandardNormal);
        self.gamma * s2.sqrt() * z - self.gamma * self.gamma * s2 / 2.0
    }

    /// E[e^{p·X}] = e^{p(p−1)γ²σ²/2}.
    pub fn moment(&self, p: f64) -> f64 {
        (p * (p - 1.0) * self.gamma * self.gamma * self.variance() / 2.0).exp()
    }

    /// The prefactor (1/λ)·e^{−X} that rescales inverse arguments.
    pub fn inverse_factor(&self, draw: f64) -> f64 {
        (-draw).exp() / self.lambda
    }
}

pub fn draw_lognormal(ln: &Lognormal, seed: u64) -> f64 {
    ln.draw(&mut replica_rng(seed, 0))
}

/// Jointly sampled truncations of one cone field at several heights.
///
/// `heights` is strictly increasing. Band `j` is the independent field of
/// the cone between heights `heights[j]` and `heights[j+1]`; the field
/// truncated to `(heights[lo], heights[hi]]` is the sum of bands `lo..hi`.
#[derive(Debug, Clone)]
pub struct ScaleLadder {
    gamma: f64,
    heights: Vec<f64>,
    bands: Vec<FieldSampler>,
    grid: Grid,
}

impl ScaleLadder {
    pub fn new(gamma: f64, heights: Vec<f64>, grid: Grid) -> Result<Self> {
        if heights.len() < 2 || heights.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpec(
                "ladder heights must be strictly increasing".into(),
            ));
        }
        let bands = heights
            .windows(2)
            .map(|w| FieldSampler::new(FieldSpec::line(gamma, w[1], w[0])?, grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScaleLadder {
            gamma,
            heights,
            bands,
            grid,
        })
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Independent band realizations for one replica.
    pub fn sample_bands(&self, seed: u64, replica: u64) -> Vec<Vec<f64>> {
        self.bands
            .iter()
            .enumerate()
            .map(|(j, s)| {
                s.sample_values(&mut replica_rng(derive_seed(seed, j as u64 + 1), replica))
            })
            .collect()
    }

    /// Field truncated to `(heights[lo], heights[hi]]`, its pointwise variance,
    /// and the matching spec.
    pub fn field(&self, bands: &[Vec<f64>], lo: usize, hi: usize) -> Result<(Vec<f64>, FieldSpec)> {
        if !(lo < hi && hi < self.heights.len()) {
            return Err(Error::OutOfDomain {
                value: hi as f64,
                lo: lo as f64,
                hi: (self.heights.len() - 1) as f64,
            });
        }
        let mut values = bands[lo].clone();
        for band in &bands[lo + 1..hi] {
            for (v, b) in values.iter_mut().zip(band) {
                *v += b;
            }
        }
        let spec = FieldSpec::line(self.gamma, self.heights[hi], self.heights[lo])?;
        Ok((values, spec))
    }
}
