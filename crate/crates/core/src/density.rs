//! Densities, moments and normalizers for the weighted Dirichlet family
//! `P_{α,g}(dp) ∝ f_α(p) g(p) dp`.
//!
//! Every gamma ratio is formed as a sum of log-gamma terms and exponentiated
//! last, so nothing overflows for large `|α| + |n|`.

use crate::error::{Error, Result};
use crate::simplex::{CountVector, DirichletParams, SimplexPoint};
use crate::special::{ln_gamma, ln_rising};
use crate::weight::PolynomialWeight;

/// One member `P_{α,g}` of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDirichletModel {
    params: DirichletParams,
    weight: PolynomialWeight,
}

impl WeightedDirichletModel {
    pub fn new(params: DirichletParams, weight: PolynomialWeight) -> Result<Self> {
        Error::check_dim(params.dim(), weight.dim())?;
        // Fails when E_α[g] <= 0.
        polynomial_expectation(&params, &weight)?;
        Ok(WeightedDirichletModel { params, weight })
    }

    /// Plain Dirichlet, `g ≡ 1`.
    pub fn dirichlet(params: DirichletParams) -> Result<Self> {
        let weight = PolynomialWeight::constant(params.dim())?;
        Ok(WeightedDirichletModel { params, weight })
    }

    /// Dirichlet with selection, `g = 1 + σ H`.
    pub fn selection(params: DirichletParams, sigma: f64) -> Result<Self> {
        let weight = PolynomialWeight::selection(params.dim(), sigma)?;
        WeightedDirichletModel::new(params, weight)
    }

    /// Mixture of Dirichlets, `g = Σ p_i^{r_i}`.
    pub fn mixture(params: DirichletParams, r: &[u64]) -> Result<Self> {
        let weight = PolynomialWeight::monomial_sum(r)?;
        WeightedDirichletModel::new(params, weight)
    }

    pub fn params(&self) -> &DirichletParams {
        &self.params
    }

    pub fn weight(&self) -> &PolynomialWeight {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn log_density(&self, p: &SimplexPoint) -> Result<f64> {
        weighted_log_density(self, p)
    }

    /// `E_α[g]`.
    pub fn normalizer(&self) -> Result<f64> {
        polynomial_expectation(&self.params, &self.weight)
    }

    pub(crate) fn from_parts_unchecked(params: DirichletParams, weight: PolynomialWeight) -> Self {
        WeightedDirichletModel { params, weight }
    }
}

/// `ln f_α(p)`.
///
/// A coordinate with `p_i = 0` contributes nothing when `α_i = 1`, sends the
/// density to zero when `α_i > 1`, and is a domain error when `α_i < 1`
/// (the density is unbounded there).
pub fn dirichlet_log_density(params: &DirichletParams, p: &SimplexPoint) -> Result<f64> {
    Error::check_dim(params.dim(), p.dim())?;
    let alpha = params.as_slice();
    let mut kernel = 0.0;
    for (i, (&a, &x)) in alpha.iter().zip(p.as_slice()).enumerate() {
        if a == 1.0 {
            continue;
        }
        if x == 0.0 {
            if a > 1.0 {
                return Ok(f64::NEG_INFINITY);
            }
            return Err(Error::domain(format!(
                "density is unbounded at p[{i}] = 0 with alpha[{i}] = {a} < 1"
            )));
        }
        kernel += (a - 1.0) * x.ln();
    }
    Ok(log_normalizing_constant(alpha) + kernel)
}

/// `ln Γ(|α|) - Σ ln Γ(α_i)`.
pub(crate) fn log_normalizing_constant(alpha: &[f64]) -> f64 {
    let total: f64 = alpha.iter().sum();
    ln_gamma(total) - alpha.iter().map(|&a| ln_gamma(a)).sum::<f64>()
}

/// `ln E_α[∏ p_i^{k_i}]`.
pub(crate) fn log_moment(alpha: &[f64], exponents: &[u64]) -> f64 {
    let total: f64 = alpha.iter().sum();
    let k_total: u64 = exponents.iter().sum();
    if k_total == 0 {
        return 0.0;
    }
    let mut acc = -ln_rising(total, k_total);
    for (&a, &k) in alpha.iter().zip(exponents) {
        if k > 0 {
            acc += ln_rising(a, k);
        }
    }
    acc
}

/// Mixed moment `E_α[∏ p_i^{n_i}] = Γ(|α|)/Γ(|α|+|n|) · ∏ Γ(α_i+n_i)/Γ(α_i)`.
pub fn dirichlet_moment(params: &DirichletParams, exponents: &CountVector) -> Result<f64> {
    Error::check_dim(params.dim(), exponents.dim())?;
    Ok(log_moment(params.as_slice(), exponents.as_slice()).exp())
}

/// `E_α[g]`, by linearity over the monomial terms of `g`.
pub fn polynomial_expectation(params: &DirichletParams, weight: &PolynomialWeight) -> Result<f64> {
    Error::check_dim(params.dim(), weight.dim())?;
    let value = expectation_unchecked(params.as_slice(), weight);
    if value.is_nan() || value <= 0.0 {
        return Err(Error::InvalidWeight(format!(
            "E_alpha[g] = {value:e} is not positive"
        )));
    }
    Ok(value)
}

pub(crate) fn expectation_unchecked(alpha: &[f64], weight: &PolynomialWeight) -> f64 {
    weight
        .terms()
        .iter()
        .map(|t| t.coef * log_moment(alpha, t.powers.as_slice()).exp())
        .sum()
}

/// `E_α[H] = Σ α_i(α_i+1) / (|α|(|α|+1))`.
pub fn expected_homozygosity(params: &DirichletParams) -> f64 {
    let total = params.total();
    params.as_slice().iter().map(|a| a * (a + 1.0)).sum::<f64>() / (total * (total + 1.0))
}

/// `ln` of the `P_{α,g}` density `f_α(p) g(p) / E_α[g]`.
pub fn weighted_log_density(model: &WeightedDirichletModel, p: &SimplexPoint) -> Result<f64> {
    let base = dirichlet_log_density(&model.params, p)?;
    if model.weight.is_constant() {
        return Ok(base);
    }
    let g = model.weight.evaluate(p)?;
    if g < -1e-12 {
        return Err(Error::InvalidWeight(format!("g(p) = {g:e} < 0")));
    }
    if g <= 0.0 || base == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(base + g.ln() - model.normalizer()?.ln())
}

/// The density as a linear combination of Dirichlet densities.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDecomposition {
    /// `(weight, component)` pairs; weights sum to one.
    pub components: Vec<(f64, DirichletParams)>,
    /// Set when some weight is negative: a linear, not convex, combination.
    pub signed: bool,
}

impl MixtureDecomposition {
    /// Density of the combination at `p`, evaluated component by component.
    pub fn density(&self, p: &SimplexPoint) -> Result<f64> {
        let mut total = 0.0;
        for (w, params) in &self.components {
            total += w * dirichlet_log_density(params, p)?.exp();
        }
        Ok(total)
    }
}

/// Each term `c ∏ p_i^{k_i}` of `g` contributes `Dir(α + k)` with weight
/// `c · E_α[∏ p_i^{k_i}] / E_α[g]`.
pub fn mixture_decomposition(model: &WeightedDirichletModel) -> Result<MixtureDecomposition> {
    let alpha = model.params.as_slice();
    let raw: Vec<f64> = model
        .weight
        .terms()
        .iter()
        .map(|t| t.coef * log_moment(alpha, t.powers.as_slice()).exp())
        .collect();
    let mass: f64 = raw.iter().sum();
    if mass.is_nan() || mass <= 0.0 {
        return Err(Error::InvalidWeight(format!(
            "mixture mass {mass:e} is not positive"
        )));
    }
    let mut components = Vec::with_capacity(raw.len());
    for (t, w) in model.weight.terms().iter().zip(raw) {
        components.push((w / mass, model.params.add_counts(&t.powers)?));
    }
    let signed = components.iter().any(|(w, _)| *w < 0.0);
    Ok(MixtureDecomposition { components, signed })
}
