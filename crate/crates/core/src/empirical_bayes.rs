//! Marginal likelihood of counts under `P_{α,1+σH}` and plug-in empirical
//! Bayes estimates.
//!
//! The marginal is the ordered-outcome probability
//! `F(n; α, σ) = E_{α,1+σH}[∏ p_i^{n_i}]` without the multinomial coefficient.

use crate::density::{log_moment, WeightedDirichletModel};
use crate::error::{Error, Result};
use crate::optimize::golden_section_max;
use crate::posterior::posterior_mean;
use crate::simplex::{CountVector, DirichletParams};

/// Scan range for θ and for each α_i in full mode.
const THETA_MIN: f64 = 1e-6;
const THETA_MAX: f64 = 1e6;
const SCAN_PER_DECADE: usize = 100;
/// Where boundary fits evaluate their limiting marginal.
const THETA_ZERO: f64 = 1e-150;
const THETA_INF: f64 = 1e150;

/// `ln(1 + σ E_α[H])`, written through the heterozygosity `1 - E_α[H]` for
/// negative σ so that `σ = -1` stays accurate when one α dominates.
fn log_selection_factor(alpha: &[f64], sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let total: f64 = alpha.iter().sum();
    if sigma > 0.0 {
        let eh: f64 = alpha
            .iter()
            .map(|a| (a / total) * ((a + 1.0) / (total + 1.0)))
            .sum();
        return (sigma * eh).ln_1p();
    }
    let het: f64 = alpha
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let rest: f64 = alpha.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, b)| b).sum();
            (a / total) * (rest / (total + 1.0))
        })
        .sum();
    ((1.0 + sigma) + (-sigma) * het).ln()
}

fn log_marginal_unchecked(n: &[u64], alpha: &[f64], sigma: f64) -> f64 {
    let shifted: Vec<f64> = alpha.iter().zip(n).map(|(a, k)| a + *k as f64).collect();
    log_moment(alpha, n) + log_selection_factor(&shifted, sigma) - log_selection_factor(alpha, sigma)
}

/// `ln F(n; α, σ) = ln E_α[p^n] + ln(1 + σE_{α+n}[H]) - ln(1 + σE_α[H])`.
pub fn log_marginal_likelihood(n: &CountVector, params: &DirichletParams, sigma: f64) -> Result<f64> {
    Error::check_dim(params.dim(), n.dim())?;
    if sigma.is_nan() || sigma < -1.0 || sigma.is_infinite() {
        return Err(Error::domain(format!("sigma must be finite and >= -1, got {sigma}")));
    }
    Ok(log_marginal_unchecked(n.as_slice(), params.as_slice(), sigma))
}

/// `F(n; α, σ)`, in `(0, 1]`.
pub fn marginal_likelihood(n: &CountVector, params: &DirichletParams, sigma: f64) -> Result<f64> {
    log_marginal_likelihood(n, params, sigma).map(f64::exp)
}

/// Marginal-likelihood estimate of θ on the compactified range `[0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaEstimate {
    ZeroBoundary,
    Interior(f64),
    Infinity,
}

impl ThetaEstimate {
    pub fn value(&self) -> Option<f64> {
        match *self {
            ThetaEstimate::Interior(t) => Some(t),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ThetaEstimate::ZeroBoundary => "zero_boundary",
            ThetaEstimate::Interior(_) => "interior",
            ThetaEstimate::Infinity => "infinity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalFit {
    pub theta_hat: ThetaEstimate,
    /// `ln F` at θ̂; the limiting value for boundary kinds.
    pub log_marginal: f64,
}

fn sub_family(theta: f64, m: usize) -> Vec<f64> {
    let mut alpha = vec![1.0; m];
    alpha[0] = theta;
    alpha
}

/// Maximizes `f(ln θ)` over θ in `[THETA_MIN, THETA_MAX]` with the boundary
/// rule: an end of the scan wins only if no interior grid point ties it.
fn maximize_log_scale<F: FnMut(f64) -> f64>(mut f: F) -> (ThetaEstimate, f64) {
    let (lo, hi) = (THETA_MIN.ln(), THETA_MAX.ln());
    let count = SCAN_PER_DECADE * ((THETA_MAX / THETA_MIN).log10().round() as usize) + 1;
    let step = (hi - lo) / (count - 1) as f64;
    let values: Vec<f64> = (0..count).map(|j| f(lo + step * j as f64)).collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let interior = (1..count - 1).find(|&j| values[j] == best);
    match interior {
        Some(j) => {
            let a = lo + step * (j - 1) as f64;
            let b = lo + step * (j + 1) as f64;
            let (x, v) = golden_section_max(&mut f, a, b, 1e-10, 200);
            if v >= best {
                (ThetaEstimate::Interior(x.exp()), v)
            } else {
                (ThetaEstimate::Interior((lo + step * j as f64).exp()), best)
            }
        }
        None if values[0] == best => (ThetaEstimate::ZeroBoundary, best),
        None => (ThetaEstimate::Infinity, best),
    }
}

fn fit_theta(n: &CountVector, sigma: f64) -> Result<MarginalFit> {
    if sigma.is_nan() || sigma < -1.0 || sigma.is_infinite() {
        return Err(Error::domain(format!("sigma must be finite and >= -1, got {sigma}")));
    }
    if n.total() == 0 {
        return Err(Error::InvalidSample("no counts: the marginal does not depend on theta".into()));
    }
    let m = n.dim();
    let counts = n.as_slice();
    let (theta_hat, _) = maximize_log_scale(|lt| log_marginal_unchecked(counts, &sub_family(lt.exp(), m), sigma));
    let at = match theta_hat {
        ThetaEstimate::ZeroBoundary => THETA_ZERO,
        ThetaEstimate::Interior(t) => t,
        ThetaEstimate::Infinity => THETA_INF,
    };
    Ok(MarginalFit {
        theta_hat,
        log_marginal: log_marginal_unchecked(counts, &sub_family(at, m), sigma),
    })
}

/// θ̂ for `α = (θ, 1)` given `n1` successes out of `n`.
pub fn eb_theta_hat(n1: u64, n: u64, sigma: f64) -> Result<MarginalFit> {
    if n1 > n {
        return Err(Error::InvalidSample(format!("n1 = {n1} exceeds n = {n}")));
    }
    fit_theta(&CountVector::new(vec![n1, n - n1]), sigma)
}

/// Empirical Bayes configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EbOptions {
    /// Maximize over every α_i instead of the `(θ, 1, …, 1)` sub-family.
    pub full_alpha: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EbEstimate {
    /// Plug-in posterior mean.
    pub estimate: Vec<f64>,
    /// Fitted hyperparameters (boundary fits report the evaluation point).
    pub alpha: Vec<f64>,
    /// Sub-family fit; `None` in full-α mode.
    pub fit: Option<MarginalFit>,
    pub log_marginal: f64,
    /// The fit sits on a boundary and the prior collapsed.
    pub degenerate: bool,
}

/// Plug-in empirical Bayes estimate of `p` from counts `n`.
pub fn eb_estimate(n: &CountVector, sigma: f64, options: EbOptions) -> Result<EbEstimate> {
    if options.full_alpha {
        return eb_estimate_full(n, sigma);
    }
    let fit = fit_theta(n, sigma)?;
    let m = n.dim();
    let mut degenerate = !matches!(fit.theta_hat, ThetaEstimate::Interior(_));
    let (estimate, alpha) = match fit.theta_hat {
        ThetaEstimate::Interior(t) => {
            let alpha = sub_family(t, m);
            let model = WeightedDirichletModel::selection(DirichletParams::new(alpha.clone())?, sigma)?;
            (posterior_mean(&model, n)?, alpha)
        }
        ThetaEstimate::ZeroBoundary => {
            let (mean, collapsed) = zero_limit_mean(n, sigma)?;
            degenerate = collapsed;
            (mean, sub_family(THETA_ZERO, m))
        }
        ThetaEstimate::Infinity => {
            let mut e = vec![0.0; m];
            e[0] = 1.0;
            (e, sub_family(THETA_INF, m))
        }
    };
    Ok(EbEstimate {
        estimate,
        alpha,
        degenerate,
        log_marginal: fit.log_marginal,
        fit: Some(fit),
    })
}

/// Posterior mean in the limit `θ → 0`, from evaluations at two small θ.
///
/// When the first coordinate's mean shrinks in proportion to θ the prior
/// collapses onto `p_1 = 0` and the limit is exact zero there. Otherwise (for
/// instance `m = 2`, `σ = -1`, where the limit prior is `Beta(1, 2)`) the
/// limit is extrapolated linearly in θ.
fn zero_limit_mean(n: &CountVector, sigma: f64) -> Result<(Vec<f64>, bool)> {
    let m = n.dim();
    let at = |theta: f64| -> Result<Vec<f64>> {
        let model = WeightedDirichletModel::selection(DirichletParams::new(sub_family(theta, m))?, sigma)?;
        posterior_mean(&model, n)
    };
    let (t1, t2) = (1e-6, 1e-7);
    let (m1, m2) = (at(t1)?, at(t2)?);
    if m2[0] < 0.5 * m1[0] {
        let mut mean = m2;
        mean[0] = 0.0;
        let rest: f64 = mean.iter().sum();
        mean.iter_mut().for_each(|x| *x /= rest);
        return Ok((mean, true));
    }
    let mut mean: Vec<f64> = m1.iter().zip(&m2).map(|(a, b)| (t1 * b - t2 * a) / (t1 - t2)).collect();
    let total: f64 = mean.iter().sum();
    mean.iter_mut().for_each(|x| *x /= total);
    Ok((mean, false))
}

/// Coordinate-wise golden-section cycles over `ln α_i`.
fn eb_estimate_full(n: &CountVector, sigma: f64) -> Result<EbEstimate> {
    if sigma.is_nan() || sigma < -1.0 || sigma.is_infinite() {
        return Err(Error::domain(format!("sigma must be finite and >= -1, got {sigma}")));
    }
    if n.total() == 0 {
        return Err(Error::InvalidSample("no counts: the marginal does not depend on alpha".into()));
    }
    let counts = n.as_slice();
    let mut alpha = vec![1.0; n.dim()];
    let mut value = log_marginal_unchecked(counts, &alpha, sigma);
    let mut degenerate = false;
    for _ in 0..200 {
        let before = value;
        degenerate = false;
        for i in 0..alpha.len() {
            let (est, v) = maximize_log_scale(|lt| {
                let mut trial = alpha.clone();
                trial[i] = lt.exp();
                log_marginal_unchecked(counts, &trial, sigma)
            });
            alpha[i] = match est {
                ThetaEstimate::Interior(t) => t,
                ThetaEstimate::ZeroBoundary => {
                    degenerate = true;
                    THETA_MIN
                }
                ThetaEstimate::Infinity => {
                    degenerate = true;
                    THETA_MAX
                }
            };
            value = v.max(value);
        }
        if value - before < 1e-12 {
            break;
        }
    }
    let model = WeightedDirichletModel::selection(DirichletParams::new(alpha.clone())?, sigma)?;
    Ok(EbEstimate {
        estimate: posterior_mean(&model, n)?,
        log_marginal: log_marginal_unchecked(counts, &alpha, sigma),
        alpha,
        fit: None,
        degenerate,
    })
}

/// Closed forms for `m = 2`, `α = (θ, 1)`, used as cross-checks.
pub mod closed_form {
    use crate::special::ln_gamma;

    /// Posterior mean of `p_1` at `σ = 0`, written as the shrinkage
    /// combination of `n_1/n` and the prior mean.
    pub fn bayes_estimator_sigma_zero(theta: f64, n1: u64, n: u64) -> f64 {
        let (n1, n) = (n1 as f64, n as f64);
        let w = n / (theta + 1.0 + n);
        let data = if n > 0.0 { n1 / n } else { 0.0 };
        w * data + (theta + 1.0) / (theta + 1.0 + n) * (theta / (theta + 1.0))
    }

    /// Posterior mean of `p_1` at `σ = -1`.
    pub fn bayes_estimator_sigma_minus_one(theta: f64, n1: u64, n: u64) -> f64 {
        let (n1, n) = (n1 as f64, n as f64);
        let a = theta + n1;
        let b = n - n1 + 1.0;
        let s = theta + n + 1.0;
        let upper = 1.0 - ((a + 1.0).powi(2) + b * b + (s + 1.0)) / ((s + 2.0) * (s + 1.0));
        let lower = 1.0 - (a * a + b * b + s) / ((s + 1.0) * s);
        a / s * upper / lower
    }

    /// Probability of `n1` successes in `n` trials (with the binomial
    /// coefficient) at `σ = 0`: `n! θ Γ(n1+θ) / (n1! Γ(n+θ+1))`.
    pub fn marginal_sigma_zero(theta: f64, n1: u64, n: u64) -> f64 {
        let (n1, n) = (n1 as f64, n as f64);
        (ln_gamma(n + 1.0) + theta.ln() + ln_gamma(n1 + theta) - ln_gamma(n1 + 1.0) - ln_gamma(n + theta + 1.0)).exp()
    }

    /// The `σ = -1` analogue: the `σ = 0` value times
    /// `(1 - E_{α+n}[H]) / (1 - E_α[H])`, with `1 - E_α[H] = 2θ/((θ+1)(θ+2))`.
    pub fn marginal_sigma_minus_one(theta: f64, n1: u64, n: u64) -> f64 {
        let base = marginal_sigma_zero(theta, n1, n);
        let (a, b) = (theta + n1 as f64, (n - n1) as f64 + 1.0);
        let s = a + b;
        let het_post = 2.0 * a * b / (s * (s + 1.0));
        let het_prior = 2.0 * theta / ((theta + 1.0) * (theta + 2.0));
        base * het_post / het_prior
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;

    fn ln_multinomial(n: &[u64]) -> f64 {
        let total: u64 = n.iter().sum();
        ln_gamma(total as f64 + 1.0) - n.iter().map(|&k| ln_gamma(k as f64 + 1.0)).sum::<f64>()
    }

    fn compositions(m: usize, total: u64) -> Vec<Vec<u64>> {
        if m == 1 {
            return vec![vec![total]];
        }
        (0..=total)
            .flat_map(|k| {
                compositions(m - 1, total - k).into_iter().map(move |mut rest| {
                    rest.insert(0, k);
                    rest
                })
            })
            .collect()
    }

    #[test]
    fn uniform_prior_gives_uniform_predictive() {
        let a = DirichletParams::uniform(2).unwrap();
        for n1 in 0..=7u64 {
            let n = CountVector::new(vec![n1, 7 - n1]);
            let v = marginal_likelihood(&n, &a, 0.0).unwrap() * ln_multinomial(n.as_slice()).exp();
            assert!((v - 0.125).abs() < 1e-14);
        }
        let v = marginal_likelihood(&CountVector::zeros(2), &a, -1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn predictive_sums_to_one() {
        let cases: [(&[f64], f64); 4] = [(&[0.7, 2.5], -1.0), (&[1.3, 0.4], 3.0), (&[2.0, 0.5, 1.5], -0.6), (&[0.3, 0.3, 4.0], 8.0)];
        for (alpha, sigma) in cases {
            let params = DirichletParams::new(alpha.to_vec()).unwrap();
            for total in 0..=8 {
                let s: f64 = compositions(alpha.len(), total)
                    .into_iter()
                    .map(|n| {
                        let w = ln_multinomial(&n).exp();
                        w * marginal_likelihood(&CountVector::new(n), &params, sigma).unwrap()
                    })
                    .sum();
                assert!((s - 1.0).abs() < 1e-12, "{alpha:?} {sigma} {total}: {s}");
            }
        }
    }

    #[test]
    fn closed_form_marginals_agree() {
        for &(theta, n1, n) in &[(2.0, 1, 3), (0.3, 0, 5), (7.5, 4, 4), (1.43, 2, 9)] {
            let a = DirichletParams::new(vec![theta, 1.0]).unwrap();
            let counts = CountVector::new(vec![n1, n - n1]);
            let coef = ln_multinomial(counts.as_slice()).exp();
            let g0 = coef * marginal_likelihood(&counts, &a, 0.0).unwrap();
            let g1 = coef * marginal_likelihood(&counts, &a, -1.0).unwrap();
            assert!((g0 / closed_form::marginal_sigma_zero(theta, n1, n) - 1.0).abs() < 1e-12);
            assert!((g1 / closed_form::marginal_sigma_minus_one(theta, n1, n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_boundaries() {
        assert_eq!(eb_theta_hat(0, 5, 0.0).unwrap().theta_hat, ThetaEstimate::ZeroBoundary);
        assert_eq!(eb_theta_hat(5, 5, 0.0).unwrap().theta_hat, ThetaEstimate::Infinity);
        assert!(eb_theta_hat(6, 5, 0.0).is_err());
        assert!(eb_theta_hat(0, 0, 0.0).is_err());
        let fit = eb_theta_hat(3, 10, 0.0).unwrap();
        assert!(matches!(fit.theta_hat, ThetaEstimate::Interior(_)));
        assert!(fit.log_marginal.is_finite());
        assert!(eb_theta_hat(0, 5, 0.0).unwrap().log_marginal.abs() < 1e-12);
    }

    #[test]
    fn interior_theta_is_stationary() {
        for sigma in [0.0, -1.0, 2.0] {
            let fit = eb_theta_hat(2, 7, sigma).unwrap();
            let t = fit.theta_hat.value().unwrap();
            let f = |x: f64| log_marginal_unchecked(&[2, 5], &[x, 1.0], sigma);
            let h = 1e-5 * t;
            let d = (f(t + h) - f(t - h)) / (2.0 * h);
            assert!(d.abs() * t < 1e-6, "sigma {sigma}: {d}");
        }
    }

    #[test]
    fn bayes_estimator_examples() {
        assert!((closed_form::bayes_estimator_sigma_zero(1.0, 3, 4) - 2.0 / 3.0).abs() < 1e-15);
        let v = closed_form::bayes_estimator_sigma_minus_one(1.0, 1, 1);
        assert!((v - 0.6).abs() < 1e-14);
        let model = WeightedDirichletModel::selection(DirichletParams::uniform(2).unwrap(), -1.0).unwrap();
        let mean = posterior_mean(&model, &CountVector::new(vec![1, 0])).unwrap();
        assert!((mean[0] - v).abs() < 1e-10);
        for &(theta, n1, n) in &[(0.4, 2, 6), (3.0, 0, 4), (12.0, 9, 9)] {
            let a = DirichletParams::new(vec![theta, 1.0]).unwrap();
            let c = CountVector::new(vec![n1, n - n1]);
            let m0 = posterior_mean(&WeightedDirichletModel::dirichlet(a.clone()).unwrap(), &c).unwrap();
            let m1 = posterior_mean(&WeightedDirichletModel::selection(a, -1.0).unwrap(), &c).unwrap();
            assert!((m0[0] - closed_form::bayes_estimator_sigma_zero(theta, n1, n)).abs() < 1e-12);
            assert!((m1[0] - closed_form::bayes_estimator_sigma_minus_one(theta, n1, n)).abs() < 1e-12);
        }
    }

    #[test]
    fn eb_estimate_degenerate_and_interior() {
        let e = eb_estimate(&CountVector::new(vec![0, 5]), 0.0, EbOptions::default()).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.estimate, vec![0.0, 1.0]);
        let e = eb_estimate(&CountVector::new(vec![5, 0]), 0.0, EbOptions::default()).unwrap();
        assert_eq!(e.estimate, vec![1.0, 0.0]);
        let e = eb_estimate(&CountVector::new(vec![5, 5]), 0.0, EbOptions::default()).unwrap();
        assert!(!e.degenerate);
        assert!((e.estimate.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let e = eb_estimate(&CountVector::new(vec![3, 1]), -1.0, EbOptions::default()).unwrap();
        let theta = e.fit.unwrap().theta_hat.value().unwrap();
        assert!((e.estimate[0] - closed_form::bayes_estimator_sigma_minus_one(theta, 3, 4)).abs() < 1e-10);
    }

    #[test]
    fn full_alpha_mode_improves_on_sub_family() {
        let n = CountVector::new(vec![4, 2, 7]);
        let sub = eb_estimate(&n, 0.5, EbOptions::default()).unwrap();
        let full = eb_estimate(&n, 0.5, EbOptions { full_alpha: true }).unwrap();
        assert!(full.log_marginal >= sub.log_marginal - 1e-12);
        assert!((full.estimate.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
