//! Maximum-likelihood fitting from a frequency sample `p^1, …, p^N`.
//!
//! Three pieces:
//! - α for a fixed weight `g` (Dirichlet when `g ≡ 1`) by damped Newton,
//! - σ for fixed α in the selection model `g = 1 + σH`, maximized over the
//!   compactified interval `[-1, +∞]`,
//! - joint `(α, σ)` by block coordinate ascent over the two.

use log::warn;
use nalgebra::{DMatrix, DVector};

use crate::density::{expected_homozygosity, log_moment, log_normalizing_constant};
use crate::error::{Error, Result};
use crate::optimize::bisect;
use crate::simplex::{DirichletParams, SimplexPoint};
use crate::special::{digamma, trigamma};
use crate::weight::PolynomialWeight;

/// Newton iterates are clamped to `[ALPHA_MIN, ALPHA_MAX]` per coordinate.
pub const ALPHA_MIN: f64 = 1e-8;
pub const ALPHA_MAX: f64 = 1e6;

/// Observed probability vectors, all interior and of one dimension.
#[derive(Debug, Clone)]
pub struct FrequencySample {
    points: Vec<SimplexPoint>,
    mean_log: Vec<f64>,
    homozygosity: Vec<f64>,
}

impl FrequencySample {
    pub fn new(points: Vec<SimplexPoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidSample("sample is empty".into()))?;
        let m = first.dim();
        for (k, p) in points.iter().enumerate() {
            if p.dim() != m {
                return Err(Error::InvalidSample(format!(
                    "observation {k} has {} coordinates, expected {m}",
                    p.dim()
                )));
            }
            if !p.is_interior() {
                return Err(Error::InvalidSample(format!(
                    "observation {k} lies on the simplex boundary"
                )));
            }
        }
        let n = points.len() as f64;
        let mean_log = (0..m)
            .map(|i| points.iter().map(|p| p[i].ln()).sum::<f64>() / n)
            .collect();
        let homozygosity = points.iter().map(SimplexPoint::homozygosity).collect();
        Ok(FrequencySample {
            points,
            mean_log,
            homozygosity,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let points = rows
            .into_iter()
            .enumerate()
            .map(|(k, r)| {
                SimplexPoint::new(r)
                    .map_err(|e| Error::InvalidSample(format!("observation {k}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FrequencySample::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[SimplexPoint] {
        &self.points
    }

    /// `(1/N) Σ_k ln p_i^k` per coordinate.
    pub fn mean_log(&self) -> &[f64] {
        &self.mean_log
    }

    /// `H_k = H(p^k)` per observation.
    pub fn homozygosities(&self) -> &[f64] {
        &self.homozygosity
    }

    /// Mean of `ln g(p^k)`; `-∞` if `g` vanishes at an observation.
    fn mean_log_weight(&self, weight: &PolynomialWeight) -> f64 {
        if weight.is_constant() {
            return weight.terms()[0].coef.ln();
        }
        let n = self.len() as f64;
        self.points
            .iter()
            .map(|p| weight.evaluate_slice(p.as_slice()).ln())
            .sum::<f64>()
            / n
    }
}

/// Maximum-likelihood estimate of σ on `[-1, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaEstimate {
    /// A finite maximizer in `(-1, ∞)`.
    Interior(f64),
    /// The maximum sits at `σ = -1`.
    LowerBoundary,
    /// The likelihood is maximized in the limit `σ → +∞`.
    PlusInfinity,
}

impl SigmaEstimate {
    /// Finite value, with `-1` for the lower boundary and `None` at `+∞`.
    pub fn value(&self) -> Option<f64> {
        match *self {
            SigmaEstimate::Interior(s) => Some(s),
            SigmaEstimate::LowerBoundary => Some(-1.0),
            SigmaEstimate::PlusInfinity => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SigmaEstimate::Interior(_) => "interior",
            SigmaEstimate::LowerBoundary => "lower_boundary",
            SigmaEstimate::PlusInfinity => "plus_infinity",
        }
    }

    /// The weight `1 + σH`, or `H` itself for the `+∞` limit (the same
    /// likelihood up to a σ-only constant).
    pub fn weight(&self, m: usize) -> Result<PolynomialWeight> {
        match self.value() {
            Some(s) => PolynomialWeight::selection(m, s),
            None => PolynomialWeight::homozygosity(m),
        }
    }

    fn as_sigma(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

/// Result of fitting α with the weight held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFit {
    pub params: DirichletParams,
    /// Total log-likelihood `Σ_k ln P_{α,g}(p^k)`.
    pub log_likelihood: f64,
    /// Max-norm of the per-observation gradient at the returned α.
    pub gradient_norm: f64,
    pub iterations: usize,
    /// The concentration hit [`ALPHA_MAX`]; the likelihood has no finite maximizer.
    pub clamped: bool,
}

/// Per-observation objective `ℓ(α)/N` with its gradient and Hessian.
struct AlphaObjective<'a> {
    sample: &'a FrequencySample,
    weight: &'a PolynomialWeight,
    mean_log_g: f64,
}

/// `ψ(a + k) - ψ(a)` and `ψ′(a + k) - ψ′(a)`.
fn polygamma_shift(a: f64, k: u64) -> (f64, f64) {
    if k <= 64 {
        (0..k).fold((0.0, 0.0), |(d1, d2), t| {
            let x = a + t as f64;
            (d1 + 1.0 / x, d2 - 1.0 / (x * x))
        })
    } else {
        let b = a + k as f64;
        (digamma(b) - digamma(a), trigamma(b) - trigamma(a))
    }
}

impl<'a> AlphaObjective<'a> {
    fn new(sample: &'a FrequencySample, weight: &'a PolynomialWeight) -> Self {
        AlphaObjective {
            sample,
            weight,
            mean_log_g: sample.mean_log_weight(weight),
        }
    }

    fn value(&self, alpha: &[f64]) -> f64 {
        let dirichlet = log_normalizing_constant(alpha)
            + alpha
                .iter()
                .zip(self.sample.mean_log())
                .map(|(a, l)| (a - 1.0) * l)
                .sum::<f64>();
        if self.weight.is_constant() {
            return dirichlet;
        }
        dirichlet + self.mean_log_g - self.log_expectation(alpha)
    }

    fn log_expectation(&self, alpha: &[f64]) -> f64 {
        self.weight
            .terms()
            .iter()
            .map(|t| t.coef * log_moment(alpha, t.powers.as_slice()).exp())
            .sum::<f64>()
            .ln()
    }

    fn gradient_hessian(&self, alpha: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let m = alpha.len();
        let total: f64 = alpha.iter().sum();
        let psi_total = digamma(total);
        let tri_total = trigamma(total);
        let mut grad = DVector::from_fn(m, |i, _| psi_total - digamma(alpha[i]) + self.sample.mean_log()[i]);
        let mut hess = DMatrix::from_fn(m, m, |i, j| {
            tri_total - if i == j { trigamma(alpha[i]) } else { 0.0 }
        });
        if self.weight.is_constant() {
            return (grad, hess);
        }
        // ln E_α[g] with E_α[g] = Σ_j c_j M_j(α).
        let mut g0 = 0.0_f64;
        let mut g1 = DVector::<f64>::zeros(m);
        let mut g2 = DMatrix::<f64>::zeros(m, m);
        for t in self.weight.terms() {
            let k = t.powers.as_slice();
            let cm = t.coef * log_moment(alpha, k).exp();
            let (ds1, ds2) = polygamma_shift(total, t.powers.total());
            let shifts: Vec<(f64, f64)> = alpha.iter().zip(k).map(|(&a, &ki)| polygamma_shift(a, ki)).collect();
            let d: Vec<f64> = shifts.iter().map(|s| s.0 - ds1).collect();
            g0 += cm;
            for i in 0..m {
                g1[i] += cm * d[i];
                for l in 0..m {
                    let dd = if i == l { shifts[i].1 } else { 0.0 } - ds2;
                    g2[(i, l)] += cm * (d[i] * d[l] + dd);
                }
            }
        }
        for i in 0..m {
            grad[i] -= g1[i] / g0;
            for l in 0..m {
                hess[(i, l)] -= g2[(i, l)] / g0 - g1[i] * g1[l] / (g0 * g0);
            }
        }
        (grad, hess)
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Newton direction for maximizing with Hessian `hess`, shifted towards
/// gradient ascent until `-hess + λI` is positive definite.
fn ascent_direction(grad: &DVector<f64>, hess: &DMatrix<f64>) -> DVector<f64> {
    let neg = -hess;
    let scale = neg.diagonal().iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(1e-12);
    let mut lambda = 0.0;
    for _ in 0..60 {
        let shifted = &neg + DMatrix::identity(grad.len(), grad.len()) * lambda;
        if let Some(chol) = shifted.cholesky() {
            let dir = chol.solve(grad);
            if dir.iter().all(|x| x.is_finite()) && dir.dot(grad) > 0.0 {
                return dir;
            }
        }
        lambda = if lambda == 0.0 { 1e-8 * scale } else { lambda * 10.0 };
    }
    grad / scale
}

fn initial_alpha(sample: &FrequencySample) -> Vec<f64> {
    let m = sample.dim();
    let n = sample.len() as f64;
    let mut mean = vec![0.0; m];
    let mut second = vec![0.0; m];
    for p in sample.points() {
        for i in 0..m {
            mean[i] += p[i] / n;
            second[i] += p[i] * p[i] / n;
        }
    }
    let precisions: Vec<f64> = (0..m)
        .map(|i| (mean[i] - second[i]) / (second[i] - mean[i] * mean[i]))
        .filter(|s| s.is_finite() && *s > 0.0)
        .collect();
    if !precisions.is_empty() {
        let s = precisions.iter().sum::<f64>() / precisions.len() as f64;
        let alpha: Vec<f64> = mean.iter().map(|mi| (mi * s).clamp(ALPHA_MIN, ALPHA_MAX)).collect();
        if alpha.iter().all(|a| a.is_finite() && *a > 0.0) {
            return alpha;
        }
    }
    // Moments left the admissible region: every parameter set to the
    // smallest observed proportion.
    let min_p = sample
        .points()
        .iter()
        .flat_map(|p| p.as_slice().iter().copied())
        .fold(f64::INFINITY, f64::min);
    vec![min_p.max(ALPHA_MIN); m]
}

/// Identical observations make the concentration diverge; some constant
/// coordinates alongside varying ones is reported as degenerate.
fn check_spread(sample: &FrequencySample) -> Result<bool> {
    let m = sample.dim();
    let mut constant = vec![true; m];
    let first = &sample.points()[0];
    for p in sample.points() {
        for i in 0..m {
            let tol = 4.0 * f64::EPSILON * first[i].abs().max(p[i].abs());
            if (p[i] - first[i]).abs() > tol {
                constant[i] = false;
            }
        }
    }
    if constant.iter().all(|&c| c) {
        return Ok(true);
    }
    if let Some(i) = constant.iter().position(|&c| c) {
        return Err(Error::DegenerateSample(format!(
            "coordinate {i} is constant across the sample"
        )));
    }
    Ok(false)
}

fn identical_sample_fit(sample: &FrequencySample, weight: &PolynomialWeight) -> Result<AlphaFit> {
    let p = &sample.points()[0];
    let top = p.as_slice().iter().cloned().fold(0.0, f64::max);
    let alpha: Vec<f64> = p.as_slice().iter().map(|x| (ALPHA_MAX * x / top).max(ALPHA_MIN)).collect();
    warn!("degenerate concentration: all observations identical, alpha clamped at {ALPHA_MAX:e}");
    let objective = AlphaObjective::new(sample, weight);
    let (grad, _) = objective.gradient_hessian(&alpha);
    Ok(AlphaFit {
        log_likelihood: objective.value(&alpha) * sample.len() as f64,
        gradient_norm: max_abs(&grad),
        params: DirichletParams::new(alpha)?,
        iterations: 0,
        clamped: true,
    })
}

/// Maximizes `Σ_k ln P_{α,g}(p^k)` over α for a fixed weight `g`.
///
/// Damped Newton from `init` (method of moments when `None`): each step is
/// halved until the objective does not decrease, and iterates are clamped to
/// `[ALPHA_MIN, ALPHA_MAX]`. Converged when the per-observation gradient has
/// max-norm below `tol`.
pub fn fit_alpha(
    sample: &FrequencySample,
    weight: &PolynomialWeight,
    init: Option<&DirichletParams>,
    tol: f64,
    max_iter: usize,
) -> Result<AlphaFit> {
    Error::check_dim(sample.dim(), weight.dim())?;
    if sample.len() < 2 {
        return Err(Error::InvalidSample("at least 2 observations are needed".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    if check_spread(sample)? {
        return identical_sample_fit(sample, weight);
    }
    let objective = AlphaObjective::new(sample, weight);
    if !objective.mean_log_g.is_finite() {
        return Err(Error::InvalidSample("weight vanishes at an observation".into()));
    }
    let mut alpha = match init {
        Some(a) => {
            Error::check_dim(sample.dim(), a.dim())?;
            a.as_slice().to_vec()
        }
        None => initial_alpha(sample),
    };
    let mut value = objective.value(&alpha);
    let mut gradient_norm = f64::INFINITY;
    for iter in 0..max_iter {
        let (grad, hess) = objective.gradient_hessian(&alpha);
        gradient_norm = max_abs(&grad);
        let at_upper: Vec<bool> = alpha.iter().zip(grad.iter()).map(|(a, g)| *a >= ALPHA_MAX && *g > 0.0).collect();
        let free_norm = grad
            .iter()
            .zip(&at_upper)
            .filter(|(_, &c)| !c)
            .fold(0.0_f64, |acc, (g, _)| acc.max(g.abs()));
        if gradient_norm < tol || (at_upper.iter().any(|&c| c) && free_norm < tol) {
            let clamped = gradient_norm >= tol;
            if clamped {
                warn!("degenerate concentration: alpha reached the {ALPHA_MAX:e} clamp");
            }
            return Ok(AlphaFit {
                params: DirichletParams::new(alpha)?,
                log_likelihood: value * sample.len() as f64,
                gradient_norm,
                iterations: iter,
                clamped,
            });
        }
        let direction = ascent_direction(&grad, &hess);
        let slack = 1e-14 * (1.0 + value.abs());
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-14 {
            let candidate: Vec<f64> = alpha
                .iter()
                .zip(direction.iter())
                .map(|(a, d)| (a + step * d).clamp(ALPHA_MIN, ALPHA_MAX))
                .collect();
            let v = objective.value(&candidate);
            if v.is_finite() && v >= value - slack {
                accepted = Some((candidate, v));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((candidate, v)) => {
                if candidate == alpha {
                    break;
                }
                alpha = candidate;
                value = v;
            }
            None => break,
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        gradient_norm,
        last: alpha,
    })
}

/// Dirichlet maximum likelihood (`g ≡ 1`). The log-likelihood is concave in
/// α, so the stationary point found is the global maximizer.
pub fn dirichlet_mle(sample: &FrequencySample, tol: f64, max_iter: usize) -> Result<AlphaFit> {
    let weight = PolynomialWeight::constant(sample.dim())?;
    fit_alpha(sample, &weight, None, tol, max_iter)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_nan() || sigma < -1.0 {
        return Err(Error::domain(format!("sigma must be >= -1, got {sigma}")));
    }
    Ok(())
}

/// σ-dependent part of the selection log-likelihood,
/// `Σ_k ln(1 + σ H_k) - N ln(1 + σ E_α[H])`, with its `σ → ∞` limit
/// `Σ_k ln(H_k / E_α[H])`.
pub fn sigma_log_likelihood_from_homozygosity(h: &[f64], expected_h: f64, sigma: f64) -> f64 {
    let n = h.len() as f64;
    if sigma == f64::INFINITY {
        return h.iter().map(|hk| (hk / expected_h).ln()).sum();
    }
    h.iter().map(|hk| (sigma * hk).ln_1p()).sum::<f64>() - n * (sigma * expected_h).ln_1p()
}

/// `d/dσ` of [`sigma_log_likelihood_from_homozygosity`].
pub fn sigma_score_from_homozygosity(h: &[f64], expected_h: f64, sigma: f64) -> f64 {
    // Termwise form of Σ H_k/(1+σH_k) - N E/(1+σE); no cancellation at large σ.
    let outer = 1.0 + sigma * expected_h;
    h.iter().map(|hk| (hk - expected_h) / ((1.0 + sigma * hk) * outer)).sum()
}

/// Selection-model log-likelihood `Σ_k ln P_{α,1+σH}(p^k)`. `σ = +∞` gives the
/// limiting value.
pub fn selection_log_likelihood(sample: &FrequencySample, params: &DirichletParams, sigma: f64) -> Result<f64> {
    Error::check_dim(sample.dim(), params.dim())?;
    check_sigma(sigma)?;
    let h = sample.homozygosities();
    if sigma == -1.0 && h.iter().any(|&hk| hk >= 1.0) {
        return Err(Error::domain("sigma = -1 with an observation at H = 1"));
    }
    let alpha = params.as_slice();
    let n = sample.len() as f64;
    let dirichlet = n * (log_normalizing_constant(alpha)
        + alpha.iter().zip(sample.mean_log()).map(|(a, l)| (a - 1.0) * l).sum::<f64>());
    Ok(dirichlet + sigma_log_likelihood_from_homozygosity(h, expected_homozygosity(params), sigma))
}

/// `∂ℓ/∂σ = Σ_k H_k/(1 + σH_k) - N E_α[H]/(1 + σE_α[H])`.
pub fn sigma_score(sample: &FrequencySample, params: &DirichletParams, sigma: f64) -> Result<f64> {
    Error::check_dim(sample.dim(), params.dim())?;
    check_sigma(sigma)?;
    Ok(sigma_score_from_homozygosity(
        sample.homozygosities(),
        expected_homozygosity(params),
        sigma,
    ))
}

/// Points in the geometric scan of `σ + 1` over `[1e-9, 1e6]`.
const SIGMA_SCAN_POINTS: usize = 800;

/// Global maximizer of the σ-likelihood over `[-1, +∞]` given homozygosities
/// and `E_α[H]`.
///
/// Candidates are `σ = -1`, the `+∞` limit, and every local maximum in
/// between (score sign changes from + to −, found on a geometric scan and
/// refined by bisection). Ties go to the finite candidate.
pub fn sigma_mle_from_homozygosity(h: &[f64], expected_h: f64) -> SigmaEstimate {
    let loglik = |s: f64| sigma_log_likelihood_from_homozygosity(h, expected_h, s);
    let score = |s: f64| sigma_score_from_homozygosity(h, expected_h, s);

    let mut best = (SigmaEstimate::LowerBoundary, loglik(-1.0));
    if best.1.is_nan() {
        best.1 = f64::NEG_INFINITY;
    }
    let (lo, hi) = (1e-9_f64, 1e6_f64);
    let ratio = (hi / lo).powf(1.0 / (SIGMA_SCAN_POINTS - 1) as f64);
    let mut x_prev = lo;
    let mut s_prev = score(x_prev - 1.0);
    for j in 1..SIGMA_SCAN_POINTS {
        let x = lo * ratio.powi(j as i32);
        let s = score(x - 1.0);
        if s_prev > 0.0 && s <= 0.0 {
            let root = bisect(score, x_prev - 1.0, x - 1.0, 1e-13 * x.max(1.0), 300);
            let v = loglik(root);
            if v > best.1 {
                best = (SigmaEstimate::Interior(root), v);
            }
        }
        x_prev = x;
        s_prev = s;
    }
    // A root past the scan: keep doubling while the score stays positive.
    while s_prev > 0.0 && x_prev < 1e150 {
        let x = 2.0 * x_prev;
        let s = score(x - 1.0);
        if s <= 0.0 {
            let root = bisect(score, x_prev - 1.0, x - 1.0, 1e-13 * x, 300);
            let v = loglik(root);
            if v > best.1 {
                best = (SigmaEstimate::Interior(root), v);
            }
        }
        x_prev = x;
        s_prev = s;
    }
    let limit = loglik(f64::INFINITY);
    if limit > best.1 {
        // The limit wins only if it strictly beats every finite candidate.
        best = (SigmaEstimate::PlusInfinity, limit);
    }
    best.0
}

/// Maximum-likelihood σ for fixed α.
pub fn sigma_mle(sample: &FrequencySample, params: &DirichletParams) -> Result<SigmaEstimate> {
    Error::check_dim(sample.dim(), params.dim())?;
    Ok(sigma_mle_from_homozygosity(
        sample.homozygosities(),
        expected_homozygosity(params),
    ))
}

/// Result of the joint `(α, σ)` fit.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFit {
    pub params: DirichletParams,
    pub sigma: SigmaEstimate,
    /// Total log-likelihood; the limiting value when σ is `+∞`.
    pub log_likelihood: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// Objective after each outer iteration; non-decreasing.
    pub trace: Vec<f64>,
}

/// α fitted with σ held at a given estimate. `σ = 0` is exactly [`dirichlet_mle`].
pub fn selection_mle_fixed_sigma(
    sample: &FrequencySample,
    sigma: SigmaEstimate,
    tol: f64,
    max_iter: usize,
) -> Result<AlphaFit> {
    let weight = sigma.weight(sample.dim())?;
    let mut fit = fit_alpha(sample, &weight, None, tol, max_iter)?;
    fit.log_likelihood = selection_log_likelihood(sample, &fit.params, sigma.as_sigma())?;
    Ok(fit)
}

/// Joint maximum likelihood by block coordinate ascent: Newton in α at fixed
/// σ, then the global σ-maximizer at fixed α, until the per-observation
/// objective improves by less than `tol`.
pub fn selection_mle_joint(sample: &FrequencySample, tol: f64, max_iter: usize) -> Result<JointFit> {
    let start = dirichlet_mle(sample, tol, max_iter)?;
    let n = sample.len() as f64;
    let mut params = start.params;
    let mut sigma = sigma_mle(sample, &params)?;
    let mut value = selection_log_likelihood(sample, &params, sigma.as_sigma())?;
    let mut trace = vec![value];
    let mut gradient_norm = start.gradient_norm;
    for iter in 1..=max_iter {
        let weight = sigma.weight(sample.dim())?;
        let fit = fit_alpha(sample, &weight, Some(&params), tol, max_iter)?;
        gradient_norm = fit.gradient_norm;
        let next_sigma = sigma_mle(sample, &fit.params)?;
        let next_value = selection_log_likelihood(sample, &fit.params, next_sigma.as_sigma())?;
        let improvement = (next_value - value) / n;
        if next_value >= value {
            params = fit.params;
            sigma = next_sigma;
            value = next_value;
        }
        trace.push(value);
        if improvement < tol && gradient_norm < tol {
            return Ok(JointFit {
                params,
                sigma,
                log_likelihood: value,
                gradient_norm,
                iterations: iter,
                trace,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        gradient_norm,
        last: params.into_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: &[&[f64]]) -> FrequencySample {
        FrequencySample::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn uniform2() -> DirichletParams {
        DirichletParams::uniform(2).unwrap()
    }

    /// A two-point m = 2 sample with the given homozygosities.
    fn with_h(h1: f64, h2: f64) -> FrequencySample {
        let p = |h: f64| {
            let x = 0.5 + 0.5 * (2.0 * h - 1.0).sqrt();
            vec![x, 1.0 - x]
        };
        FrequencySample::from_rows(vec![p(h1), p(h2)]).unwrap()
    }

    #[test]
    fn sample_validation() {
        assert!(FrequencySample::new(vec![]).is_err());
        assert!(FrequencySample::from_rows(vec![vec![0.0, 1.0]]).is_err());
        assert!(FrequencySample::from_rows(vec![vec![0.5, 0.5], vec![0.2, 0.3, 0.5]]).is_err());
        let s = sample(&[&[0.2, 0.8], &[0.5, 0.5]]);
        assert_eq!(s.len(), 2);
        assert!((s.homozygosities()[0] - 0.68).abs() < 1e-15);
    }

    #[test]
    fn log_likelihood_examples() {
        let s = with_h(0.5, 0.5);
        let one = FrequencySample::new(vec![s.points()[0].clone()]).unwrap();
        assert!(selection_log_likelihood(&one, &uniform2(), 0.0).unwrap().abs() < 1e-15);
        let v = selection_log_likelihood(&one, &uniform2(), 1.0).unwrap();
        assert!((v - 0.9f64.ln()).abs() < 1e-14);
        let v = selection_log_likelihood(&one, &uniform2(), -1.0).unwrap();
        assert!((v - 1.5f64.ln()).abs() < 1e-14);
        assert!(selection_log_likelihood(&one, &uniform2(), -1.5).is_err());
        // The +∞ limit is approached from finite σ.
        let s = with_h(0.6, 0.95);
        let limit = selection_log_likelihood(&s, &uniform2(), f64::INFINITY).unwrap();
        let far = selection_log_likelihood(&s, &uniform2(), 1e9).unwrap();
        assert!((limit - far).abs() < 1e-7);
    }

    #[test]
    fn score_root_at_two() {
        let s = with_h(0.5, 0.9);
        let score = |x| sigma_score(&s, &uniform2(), x).unwrap();
        assert!(score(2.0).abs() < 1e-13);
        assert!(score(1.9) > 0.0 && score(2.1) < 0.0);
    }

    #[test]
    fn score_matches_finite_differences() {
        let s = sample(&[&[0.2, 0.3, 0.5], &[0.6, 0.3, 0.1], &[0.1, 0.1, 0.8]]);
        let a = DirichletParams::new(vec![1.5, 0.7, 2.2]).unwrap();
        for sigma in [-0.9, -0.2, 0.0, 0.8, 5.0, 40.0] {
            let h = 1e-6;
            let fd = (selection_log_likelihood(&s, &a, sigma + h).unwrap()
                - selection_log_likelihood(&s, &a, sigma - h).unwrap())
                / (2.0 * h);
            assert!((fd - sigma_score(&s, &a, sigma).unwrap()).abs() < 1e-5);
        }
    }

    #[test]
    fn sigma_mle_case_analysis() {
        assert_eq!(sigma_mle(&with_h(0.5, 0.5), &uniform2()).unwrap(), SigmaEstimate::LowerBoundary);
        match sigma_mle(&with_h(0.5, 0.9), &uniform2()).unwrap() {
            SigmaEstimate::Interior(s) => assert!((s - 2.0).abs() < 1e-8, "{s}"),
            other => panic!("expected interior, got {other:?}"),
        }
        assert_eq!(sigma_mle_from_homozygosity(&[1.0, 1.0], 2.0 / 3.0), SigmaEstimate::PlusInfinity);
        assert_eq!(sigma_mle(&with_h(0.95, 0.99), &uniform2()).unwrap(), SigmaEstimate::PlusInfinity);
    }

    #[test]
    fn dirichlet_mle_small_sample_is_stationary() {
        let s = sample(&[&[0.2, 0.8], &[0.4, 0.6], &[0.3, 0.7]]);
        let fit = dirichlet_mle(&s, 1e-10, 100).unwrap();
        assert!(fit.gradient_norm < 1e-10);
        assert!(!fit.clamped);
        let a = fit.params.as_slice();
        let total = a[0] + a[1];
        for i in 0..2 {
            let g = digamma(total) - digamma(a[i]) + s.mean_log()[i];
            assert!(g.abs() < 1e-10);
        }
    }

    #[test]
    fn identical_points_clamp_symmetrically() {
        let s = sample(&[&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5]]);
        let fit = dirichlet_mle(&s, 1e-8, 100).unwrap();
        assert!(fit.clamped);
        assert_eq!(fit.params[0], fit.params[1]);
        assert_eq!(fit.params[0], ALPHA_MAX);
    }

    #[test]
    fn partially_constant_coordinate_is_degenerate() {
        let s = sample(&[&[0.2, 0.3, 0.5], &[0.2, 0.5, 0.3], &[0.2, 0.1, 0.7]]);
        assert!(matches!(dirichlet_mle(&s, 1e-8, 100), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn fixed_sigma_zero_is_dirichlet_mle() {
        let s = sample(&[&[0.2, 0.3, 0.5], &[0.6, 0.3, 0.1], &[0.1, 0.1, 0.8], &[0.3, 0.3, 0.4]]);
        let a = dirichlet_mle(&s, 1e-10, 200).unwrap();
        let b = selection_mle_fixed_sigma(&s, SigmaEstimate::Interior(0.0), 1e-10, 200).unwrap();
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn weighted_gradient_matches_finite_differences() {
        let s = sample(&[&[0.2, 0.3, 0.5], &[0.6, 0.3, 0.1], &[0.1, 0.1, 0.8]]);
        let weights = [
            PolynomialWeight::selection(3, -0.7).unwrap(),
            PolynomialWeight::selection(3, 4.0).unwrap(),
            PolynomialWeight::homozygosity(3).unwrap(),
            PolynomialWeight::monomial_sum(&[2, 1, 3]).unwrap(),
        ];
        let alpha = [1.3, 0.8, 2.5];
        for w in &weights {
            let obj = AlphaObjective::new(&s, w);
            let (grad, hess) = obj.gradient_hessian(&alpha);
            let h = 1e-6;
            for i in 0..3 {
                let mut up = alpha;
                let mut dn = alpha;
                up[i] += h;
                dn[i] -= h;
                let fd = (obj.value(&up) - obj.value(&dn)) / (2.0 * h);
                assert!((fd - grad[i]).abs() < 1e-6, "grad {i}: {fd} vs {}", grad[i]);
                let (gu, _) = obj.gradient_hessian(&up);
                let (gd, _) = obj.gradient_hessian(&dn);
                for l in 0..3 {
                    let fd = (gu[l] - gd[l]) / (2.0 * h);
                    assert!((fd - hess[(l, i)]).abs() < 1e-5, "hess {l},{i}");
                }
            }
        }
    }
}
