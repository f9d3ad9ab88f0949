//! JSON documents written by the subcommands.

use std::collections::BTreeMap;

use serde::Serialize;
use simplex_priors::{ChainSummary, SigmaEstimate, ThetaEstimate};

pub const SCHEMA: &str = "simplex-priors/1";

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TaggedValue {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl From<SigmaEstimate> for TaggedValue {
    fn from(s: SigmaEstimate) -> Self {
        TaggedValue { kind: s.kind().into(), value: s.value() }
    }
}

impl From<ThetaEstimate> for TaggedValue {
    fn from(t: ThetaEstimate) -> Self {
        TaggedValue { kind: t.kind().into(), value: t.value() }
    }
}

/// A fixed σ supplied on the command line.
pub fn fixed_sigma(sigma: f64) -> TaggedValue {
    if sigma.is_infinite() {
        TaggedValue { kind: "plus_infinity".into(), value: None }
    } else {
        TaggedValue { kind: "fixed".into(), value: Some(sigma) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub schema: &'static str,
    pub model_kind: String,
    pub alpha: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<TaggedValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<u64>>,
    /// The limiting value when σ is `+∞`; `diagnostics.log_likelihood_is_limit` is then 1.
    pub log_likelihood: f64,
    pub n_observations: usize,
    pub diagnostics: BTreeMap<String, f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PosteriorReport {
    pub schema: &'static str,
    pub model_kind: String,
    pub alpha: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<TaggedValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<u64>>,
    pub counts: Vec<u64>,
    pub posterior_alpha: Vec<f64>,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub log_normalizer: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EbReport {
    pub schema: &'static str,
    pub counts: Vec<u64>,
    pub sigma: f64,
    pub full_alpha: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<TaggedValue>,
    pub alpha: Vec<f64>,
    pub log_marginal: f64,
    pub estimate: Vec<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub schema: &'static str,
    pub model_kind: String,
    pub method: String,
    pub alpha: Vec<f64>,
    pub sigma: TaggedValue,
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub retained: usize,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub lag1_autocorrelation: Vec<f64>,
    pub mc_standard_error: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceptance_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proposals: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws_path: Option<String>,
}

impl SampleReport {
    pub(crate) fn fill_summary(&mut self, s: &ChainSummary) {
        self.retained = s.retained;
        self.mean = s.mean.clone();
        self.variance = s.variance.clone();
        self.lag1_autocorrelation = s.lag1_autocorrelation.clone();
        self.mc_standard_error = s.mc_standard_error.clone();
    }
}
