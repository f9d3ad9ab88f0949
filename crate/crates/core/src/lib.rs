//! Conjugate priors on the unit simplex.
//!
//! The family `P_{α,g}` tilts a Dirichlet density `f_α` by a nonnegative
//! polynomial weight `g`: plain Dirichlet (`g ≡ 1`), mixtures of Dirichlets
//! (`g = Σ p_i^{r_i}`) and Dirichlet with selection (`g = 1 + σ H`, where
//! `H = Σ p_i²` is the homozygosity). The family is closed under multinomial
//! sampling: observing counts `n` maps `P_{α,g}` to `P_{α+n,g}`.
//!
//! Modules:
//! - [`special`]: `ln Γ`, `ψ`, `ψ′` and the regularized incomplete beta.
//! - [`density`]: densities, mixed moments, normalizers, mixture decompositions.
//! - [`posterior`]: conjugate updates, posterior means/covariances, Bayes estimates.
//! - [`mle`]: Dirichlet and selection-model maximum likelihood.
//! - [`empirical_bayes`]: marginal likelihoods and plug-in estimators.
//! - [`sampler`]: Gibbs and rejection samplers for the selection model.

pub mod density;
pub mod empirical_bayes;
pub mod error;
pub mod mle;
mod optimize;
pub mod posterior;
pub mod sampler;
pub mod simplex;
pub mod special;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;
pub mod weight;

pub use density::{
    dirichlet_log_density, dirichlet_moment, expected_homozygosity, mixture_decomposition,
    polynomial_expectation, weighted_log_density, MixtureDecomposition, WeightedDirichletModel,
};
pub use empirical_bayes::{
    eb_estimate, eb_theta_hat, log_marginal_likelihood, marginal_likelihood, EbEstimate, EbOptions,
    MarginalFit, ThetaEstimate,
};
pub use error::{Error, Result};
pub use mle::{
    dirichlet_mle, fit_alpha, selection_log_likelihood, selection_mle_fixed_sigma,
    selection_mle_joint, sigma_mle, sigma_score, AlphaFit, FrequencySample, JointFit,
    SigmaEstimate,
};
pub use posterior::{
    bayes_estimate, posterior_covariance, posterior_mean, posterior_summary, posterior_update,
    PosteriorSummary,
};
pub use sampler::{
    conditional_cdf, dirichlet_sample, gibbs_chain, rejection_sample, summarize, ChainConfig,
    ChainOutput, ChainSummary, RejectionOutput,
};
pub use simplex::{CountVector, DirichletParams, SimplexPoint};
pub use weight::{Monomial, PolynomialWeight};
