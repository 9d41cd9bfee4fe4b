//! Runnable Monte Carlo checks, one per verifiable law.
//!
//! Every experiment takes a parameter struct and a master seed and returns
//! an [`Outcome`]: a [`Verdict`] plus numeric series for tabulation. Runs
//! are bit-for-bit reproducible given (parameters, seed).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stattest::{EstimateReport, TestReport};

mod cauchy;
mod ergodic;
mod expectation;
mod graph;
mod lebesgue;
mod measure;
mod moments;
mod ratio;
mod scaling;
mod smp;
mod support;

pub use cauchy::CauchyRate;
pub use ergodic::Ergodic;
pub use expectation::NonlinearExpectation;
pub use graph::{
    build_gap_graph, independence_stats, Decoupling, GapGraph, GapParams, IndependenceStats,
};
pub use lebesgue::{lebesgue_bound, LebesgueRate};
pub use measure::{MeanMeasure, MomentExponent};
pub use moments::{moment_window_left, InverseMoments};
pub use ratio::{whitney_level_sums, MultipointSanity, RatioDilatation};
pub use scaling::InverseScaling;
pub use smp::DeltaSmp;

/// One piece of supporting evidence in a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Estimate {
        label: String,
        report: EstimateReport,
    },
    Test {
        label: String,
        report: TestReport,
    },
    Value {
        label: String,
        value: f64,
    },
    Check {
        label: String,
        passed: bool,
    },
}

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub experiment: String,
    pub passed: bool,
    /// True when γ = 0 or a similar setting makes the claim hold trivially.
    pub degenerate: bool,
    pub target: String,
    pub evidence: Vec<Evidence>,
}

impl Verdict {
    fn new(experiment: &str, target: &str) -> Self {
        Verdict {
            experiment: experiment.to_string(),
            passed: true,
            degenerate: false,
            target: target.to_string(),
            evidence: Vec::new(),
        }
    }

    fn estimate(&mut self, label: impl Into<String>, report: EstimateReport) {
        self.evidence.push(Evidence::Estimate {
            label: label.into(),
            report,
        });
    }

    fn test(&mut self, label: impl Into<String>, report: TestReport) {
        self.evidence.push(Evidence::Test {
            label: label.into(),
            report,
        });
    }

    fn value(&mut self, label: impl Into<String>, value: f64) {
        self.evidence.push(Evidence::Value {
            label: label.into(),
            value,
        });
    }

    /// Records a pass/fail check; any failing check fails the verdict.
    fn check(&mut self, label: impl Into<String>, passed: bool) {
        self.passed &= passed;
        self.evidence.push(Evidence::Check {
            label: label.into(),
            passed,
        });
    }

    /// Looks up a check by label.
    pub fn check_named(&self, label: &str) -> Option<bool> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Check { label: l, passed } if l == label => Some(*passed),
            _ => None,
        })
    }

    /// Looks up a test by label.
    pub fn test_named(&self, label: &str) -> Option<&TestReport> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Test { label: l, report } if l == label => Some(report),
            _ => None,
        })
    }

    /// Looks up an estimate by label.
    pub fn estimate_named(&self, label: &str) -> Option<&EstimateReport> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Estimate { label: l, report } if l == label => Some(report),
            _ => None,
        })
    }

    /// Looks up a value by label.
    pub fn value_named(&self, label: &str) -> Option<f64> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Value { label: l, value } if l == label => Some(*value),
            _ => None,
        })
    }
}

/// A rectangular numeric table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    fn new(name: &str, columns: &[&str]) -> Self {
        Series {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub verdict: Verdict,
    pub series: Vec<Series>,
}

/// Value types accepted in experiment parameters.
pub trait ParamValue: Sized {
    fn parse_value(s: &str) -> std::result::Result<Self, String>;
}

impl ParamValue for f64 {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| format!("expected a number, got `{s}`"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("expected a finite number, got `{s}`"))
        }
    }
}

impl ParamValue for usize {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        s.trim()
            .parse()
            .map_err(|_| format!("expected a nonnegative integer, got `{s}`"))
    }
}

impl ParamValue for Vec<f64> {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        s.split(',').map(f64::parse_value).collect()
    }
}

impl ParamValue for Vec<usize> {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        s.split(',').map(usize::parse_value).collect()
    }
}

/// Declares a parameter struct with defaults, key-based assignment and a key list.
macro_rules! params {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $field:ident : $ty:ty = $default:expr),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
        pub struct $name {
            $($(#[$fmeta])* pub $field: $ty,)*
        }

        impl Default for $name {
            fn default() -> Self {
                $name { $($field: $default,)* }
            }
        }

        impl $name {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($field)),*];

            pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
                match key {
                    $(stringify!($field) => {
                        self.$field = <$ty as $crate::experiments::ParamValue>::parse_value(value)?;
                        Ok(())
                    })*
                    _ => Err(format!("unknown key `{key}`")),
                }
            }
        }
    };
}
pub(crate) use params;

/// Names and one-line claims of all experiments, in suite order.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("mean_measure", "E[η(a,b)] = b − a for the truncated GMC on the line"),
    ("moment_exponent", "log E[η(0,t)^q] grows like ζ(q)·log t with ζ(q) = q − (γ²/2)(q² − q)"),
    ("delta_smp", "mass accrued at distance ≥ δ after the hitting time Q(a) is independent of Q(a)"),
    ("nonlinear_expectation", "E[Q(a)] > a for γ > 0, with equality at γ = 0"),
    ("inverse_scaling", "Q^δ(x) has the law of δ·Q¹(x/δ); exact lognormal scaling of η_ω and of the inverse on {Q ≤ λδ}"),
    ("ergodic", "Q(Tx)/T → x as T → ∞"),
    ("lebesgue_rate", "E[(ηⁿ(x) − x)²] ≤ 2xδ_nγ²/(1 − γ²) for γ < 1 and x > δ_n"),
    ("cauchy_rate", "E|Q_{n+1}(x) − Q_n(x)|^ℓ decays geometrically along the lower-truncation ladder ε_n = δ2⁻ⁿ"),
    ("inverse_moments", "E[Q(x)^p] is finite for p > −(1 + γ²/2)²/(2γ²)"),
    ("ratio_dilatation", "ratios of inverse increments over equal-length intervals have moments with a small scaling exponent; Whitney bound on the dilatation integral is finite"),
    ("decoupling", "P(α(G) < c·N) decreases in N for the overlap graph of inverses at geometric scales"),
    ("multipoint_sanity", "gated products of increment ratios at several scales are finite and bounded by products of single-ratio moments"),
];

/// Parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Params {
    MeanMeasure(MeanMeasure),
    MomentExponent(MomentExponent),
    DeltaSmp(DeltaSmp),
    NonlinearExpectation(NonlinearExpectation),
    InverseScaling(InverseScaling),
    Ergodic(Ergodic),
    LebesgueRate(LebesgueRate),
    CauchyRate(CauchyRate),
    InverseMoments(InverseMoments),
    RatioDilatation(RatioDilatation),
    Decoupling(Decoupling),
    MultipointSanity(MultipointSanity),
}

macro_rules! dispatch {
    ($self:expr, $p:ident => $body:expr) => {
        match $self {
            Params::MeanMeasure($p) => $body,
            Params::MomentExponent($p) => $body,
            Params::DeltaSmp($p) => $body,
            Params::NonlinearExpectation($p) => $body,
            Params::InverseScaling($p) => $body,
            Params::Ergodic($p) => $body,
            Params::LebesgueRate($p) => $body,
            Params::CauchyRate($p) => $body,
            Params::InverseMoments($p) => $body,
            Params::RatioDilatation($p) => $body,
            Params::Decoupling($p) => $body,
            Params::MultipointSanity($p) => $body,
        }
    };
}

impl Params {
    /// Default parameters of the named experiment.
    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "mean_measure" => Params::MeanMeasure(Default::default()),
            "moment_exponent" => Params::MomentExponent(Default::default()),
            "delta_smp" => Params::DeltaSmp(Default::default()),
            "nonlinear_expectation" => Params::NonlinearExpectation(Default::default()),
            "inverse_scaling" => Params::InverseScaling(Default::default()),
            "ergodic" => Params::Ergodic(Default::default()),
            "lebesgue_rate" => Params::LebesgueRate(Default::default()),
            "cauchy_rate" => Params::CauchyRate(Default::default()),
            "inverse_moments" => Params::InverseMoments(Default::default()),
            "ratio_dilatation" => Params::RatioDilatation(Default::default()),
            "decoupling" => Params::Decoupling(Default::default()),
            "multipoint_sanity" => Params::MultipointSanity(Default::default()),
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Params::MeanMeasure(_) => "mean_measure",
            Params::MomentExponent(_) => "moment_exponent",
            Params::DeltaSmp(_) => "delta_smp",
            Params::NonlinearExpectation(_) => "nonlinear_expectation",
            Params::InverseScaling(_) => "inverse_scaling",
            Params::Ergodic(_) => "ergodic",
            Params::LebesgueRate(_) => "lebesgue_rate",
            Params::CauchyRate(_) => "cauchy_rate",
            Params::InverseMoments(_) => "inverse_moments",
            Params::RatioDilatation(_) => "ratio_dilatation",
            Params::Decoupling(_) => "decoupling",
            Params::MultipointSanity(_) => "multipoint_sanity",
        }
    }

    pub fn keys(&self) -> &'static [&'static str] {
        fn keys_of<T: HasKeys>(_: &T) -> &'static [&'static str] {
            T::keys()
        }
        dispatch!(self, p => keys_of(p))
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        dispatch!(self, p => p.set(key, value))
    }

    pub fn validate(&self) -> Result<()> {
        dispatch!(self, p => p.validate())
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        self.validate()?;
        dispatch!(self, p => p.run(seed))
    }
}

trait HasKeys {
    fn keys() -> &'static [&'static str];
}

macro_rules! impl_keys {
    ($($t:ty),*) => { $(impl HasKeys for $t { fn keys() -> &'static [&'static str] { <$t>::KEYS } })* };
}
impl_keys!(
    MeanMeasure,
    MomentExponent,
    DeltaSmp,
    NonlinearExpectation,
    InverseScaling,
    Ergodic,
    LebesgueRate,
    CauchyRate,
    InverseMoments,
    RatioDilatation,
    Decoupling,
    MultipointSanity
);

/// An experiment together with its master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub params: Params,
}

impl ExperimentConfig {
    pub fn run(&self) -> Result<Outcome> {
        self.params.run(self.seed)
    }
}

/// Shared range checks.
fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Config(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    if gamma * gamma >= 2.0 {
        return Err(Error::Config(format!(
            "gamma² < 2 required, got gamma = {gamma}"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn check_replicas(replicas: usize) -> Result<()> {
    if replicas < 100 {
        return Err(Error::Config(format!(
            "replicas must be at least 100, got {replicas}"
        )));
    }
    Ok(())
}

fn check_unit_ratio(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")))
    }
}
