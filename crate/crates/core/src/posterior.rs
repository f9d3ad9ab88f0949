//! Conjugate updating and posterior moments for `P_{α,g}`.
//!
//! Posterior of `P_{α,g}` under multinomial counts `n` is `P_{α+n,g}`. Means
//! and covariances are evaluated generically as ratios of polynomial
//! expectations, `E_{α+n}[p_i g] / E_{α+n}[g]`. The model-specific closed forms
//! in [`closed_form`] are kept as independent cross-checks.

use crate::density::{expectation_unchecked, WeightedDirichletModel};
use crate::error::{Error, Result};
use crate::simplex::CountVector;

/// Posterior log-normalizers below this are treated as degenerate.
const MIN_LOG_NORMALIZER: f64 = -690.775_527_898_213_7; // ln(1e-300)

/// Mean, covariance and `ln E_{α+n}[g]` of a posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub log_normalizer: f64,
}

/// `P_{α,g}` and counts `n` give `P_{α+n,g}`.
pub fn posterior_update(model: &WeightedDirichletModel, n: &CountVector) -> Result<WeightedDirichletModel> {
    let params = model.params().add_counts(n)?;
    Ok(WeightedDirichletModel::from_parts_unchecked(
        params,
        model.weight().clone(),
    ))
}

fn checked_normalizer(post: &WeightedDirichletModel) -> Result<f64> {
    let z = expectation_unchecked(post.params().as_slice(), post.weight());
    if z.is_nan() || z <= 0.0 || z.ln() < MIN_LOG_NORMALIZER {
        return Err(Error::Numerical(format!(
            "posterior normalizer E[g] = {z:e} underflows"
        )));
    }
    Ok(z)
}

/// Posterior mean `E_{α+n,g}[p]`.
pub fn posterior_mean(model: &WeightedDirichletModel, n: &CountVector) -> Result<Vec<f64>> {
    let post = posterior_update(model, n)?;
    let z = checked_normalizer(&post)?;
    let alpha = post.params().as_slice();
    (0..post.dim())
        .map(|i| {
            let pg = post.weight().times_coordinate(i)?;
            Ok(expectation_unchecked(alpha, &pg) / z)
        })
        .collect()
}

/// Posterior covariance `E[p_k p_l g]/E[g] - mean_k mean_l`, symmetrized.
pub fn posterior_covariance(model: &WeightedDirichletModel, n: &CountVector) -> Result<Vec<Vec<f64>>> {
    Ok(posterior_summary(model, n)?.covariance)
}

/// Squared-error Bayes estimator: the posterior mean.
pub fn bayes_estimate(model: &WeightedDirichletModel, n: &CountVector) -> Result<Vec<f64>> {
    posterior_mean(model, n)
}

pub fn posterior_summary(model: &WeightedDirichletModel, n: &CountVector) -> Result<PosteriorSummary> {
    let post = posterior_update(model, n)?;
    let z = checked_normalizer(&post)?;
    let alpha = post.params().as_slice();
    let m = post.dim();
    let mean = posterior_mean(model, n)?;
    let mut second = vec![vec![0.0; m]; m];
    for k in 0..m {
        let pk = post.weight().times_coordinate(k)?;
        for l in k..m {
            let pkl = pk.times_coordinate(l)?;
            let v = expectation_unchecked(alpha, &pkl) / z;
            second[k][l] = v;
            second[l][k] = v;
        }
    }
    let covariance = (0..m)
        .map(|k| (0..m).map(|l| second[k][l] - mean[k] * mean[l]).collect())
        .collect();
    Ok(PosteriorSummary {
        mean,
        covariance,
        log_normalizer: z.ln(),
    })
}

/// Closed-form posterior moments for the Dirichlet, mixture and selection
/// models. These share no code with the generic path beyond `ln Γ`.
pub mod closed_form {
    use crate::error::{Error, Result};
    use crate::simplex::{CountVector, DirichletParams};
    use crate::special::ln_gamma;

    fn dirichlet_cov(beta: &[f64]) -> Vec<Vec<f64>> {
        let s: f64 = beta.iter().sum();
        let m = beta.len();
        (0..m)
            .map(|k| {
                (0..m)
                    .map(|l| {
                        let delta = if k == l { s } else { 0.0 };
                        beta[k] * (delta - beta[l]) / (s * s * (s + 1.0))
                    })
                    .collect()
            })
            .collect()
    }

    /// Covariance of a signed mixture of Dirichlets with the given weights:
    /// `Σ w_j (Cov_j + μ_j μ_jᵀ) - μ μᵀ`.
    fn mixture_moments(weights: &[f64], components: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let m = components[0].len();
        let mut mean = vec![0.0; m];
        let mut second = vec![vec![0.0; m]; m];
        for (w, beta) in weights.iter().zip(components) {
            let s: f64 = beta.iter().sum();
            let mu: Vec<f64> = beta.iter().map(|b| b / s).collect();
            let cov = dirichlet_cov(beta);
            for k in 0..m {
                mean[k] += w * mu[k];
                for l in 0..m {
                    second[k][l] += w * (cov[k][l] + mu[k] * mu[l]);
                }
            }
        }
        let cov = (0..m)
            .map(|k| (0..m).map(|l| second[k][l] - mean[k] * mean[l]).collect())
            .collect();
        (mean, cov)
    }

    fn posterior_alpha(params: &DirichletParams, n: &CountVector) -> Result<Vec<f64>> {
        Ok(params.add_counts(n)?.into_vec())
    }

    /// Dirichlet posterior: mean `(α_i+n_i)/(|α|+|n|)` and the usual covariance.
    pub fn dirichlet_posterior(params: &DirichletParams, n: &CountVector) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let beta = posterior_alpha(params, n)?;
        let s: f64 = beta.iter().sum();
        Ok((beta.iter().map(|b| b / s).collect(), dirichlet_cov(&beta)))
    }

    /// Mixture `g = Σ p_i^{r_i}`: component `i` is `Dir(α+n+r_i e_i)` with
    /// weight `∝ Γ(β_i+r_i) / (Γ(β_i) Γ(|β|+r_i))`.
    pub fn mixture_posterior(
        params: &DirichletParams,
        r: &[u64],
        n: &CountVector,
    ) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        Error::check_dim(params.dim(), r.len())?;
        let beta = posterior_alpha(params, n)?;
        let s: f64 = beta.iter().sum();
        let logw: Vec<f64> = beta
            .iter()
            .zip(r)
            .map(|(&b, &ri)| {
                let ri = ri as f64;
                ln_gamma(b + ri) - ln_gamma(b) - ln_gamma(s + ri)
            })
            .collect();
        let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let components: Vec<Vec<f64>> = (0..beta.len())
            .map(|i| {
                let mut c = beta.clone();
                c[i] += r[i] as f64;
                c
            })
            .collect();
        Ok(mixture_moments(&weights, &components))
    }

    /// Signed component weights `(w_0, w_1..w_m)` of the selection posterior
    /// `Dir(β)` and `Dir(β + 2e_i)`, normalized by `C(β)`.
    fn selection_weights(beta: &[f64], sigma: f64) -> Vec<f64> {
        let s: f64 = beta.iter().sum();
        let shift = ln_gamma(s) - ln_gamma(s + 2.0);
        let mut w = Vec::with_capacity(beta.len() + 1);
        w.push(1.0);
        for &b in beta {
            w.push(sigma * (shift + ln_gamma(b + 2.0) - ln_gamma(b)).exp());
        }
        let c: f64 = w.iter().sum();
        w.iter().map(|x| x / c).collect()
    }

    fn check_sigma(sigma: f64) -> Result<()> {
        if !sigma.is_finite() || sigma < -1.0 {
            return Err(Error::domain(format!("sigma must be finite and >= -1, got {sigma}")));
        }
        Ok(())
    }

    /// Posterior mean of the selection model `g = 1 + σH` written out as the
    /// normalized combination of `Dir(α+n)` and `Dir(α+n+2e_i)` means.
    pub fn selection_posterior_mean_closed_form(
        params: &DirichletParams,
        sigma: f64,
        n: &CountVector,
    ) -> Result<Vec<f64>> {
        check_sigma(sigma)?;
        let beta = posterior_alpha(params, n)?;
        let s: f64 = beta.iter().sum();
        let w = selection_weights(&beta, sigma);
        Ok((0..beta.len())
            .map(|k| {
                let mut v = w[0] * beta[k] / s;
                for (i, wi) in w[1..].iter().enumerate() {
                    let bump = if i == k { 2.0 } else { 0.0 };
                    v += wi * (beta[k] + bump) / (s + 2.0);
                }
                v
            })
            .collect())
    }

    /// Posterior covariance of the selection model, including the
    /// between-component spread of the signed mixture.
    pub fn selection_posterior_covariance_closed_form(
        params: &DirichletParams,
        sigma: f64,
        n: &CountVector,
    ) -> Result<Vec<Vec<f64>>> {
        check_sigma(sigma)?;
        let beta = posterior_alpha(params, n)?;
        let w = selection_weights(&beta, sigma);
        let mut components = vec![beta.clone()];
        for i in 0..beta.len() {
            let mut c = beta.clone();
            c[i] += 2.0;
            components.push(c);
        }
        Ok(mixture_moments(&w, &components).1)
    }
}
