//! Polynomial weight functions `g(p) = Σ_j c_j ∏_i p_i^{k_ji}` on the simplex.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::simplex::{CountVector, SimplexPoint};

/// Number of quasi-random points used to vet raw polynomial weights.
const NONNEG_CHECK_POINTS: usize = 10_000;
const NONNEG_SLACK: f64 = 1e-12;

/// One term `coef · ∏ p_i^{powers_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub powers: CountVector,
}

impl Monomial {
    pub fn new(coef: f64, powers: Vec<u64>) -> Self {
        Monomial {
            coef,
            powers: CountVector::new(powers),
        }
    }

    pub fn evaluate(&self, p: &[f64]) -> f64 {
        self.coef
            * p.iter()
                .zip(self.powers.as_slice())
                .map(|(&x, &k)| x.powi(k as i32))
                .product::<f64>()
    }
}

/// A polynomial weight, kept in canonical form: like terms merged, zero
/// coefficients dropped, terms ordered by exponent vector.
///
/// Only nonnegative weights are constructible through the public API.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialWeight {
    m: usize,
    terms: Vec<Monomial>,
}

impl PolynomialWeight {
    /// `g ≡ 1`.
    pub fn constant(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(Self::canonical(m, vec![Monomial::new(1.0, vec![0; m])]))
    }

    /// `g = 1 + σ H(p)`; requires `σ >= -1` so that `g >= 0` on the simplex.
    pub fn selection(m: usize, sigma: f64) -> Result<Self> {
        check_m(m)?;
        if !sigma.is_finite() || sigma < -1.0 {
            return Err(Error::InvalidWeight(format!(
                "selection parameter must be finite and >= -1, got {sigma}"
            )));
        }
        let mut terms = vec![Monomial::new(1.0, vec![0; m])];
        terms.extend((0..m).map(|i| Monomial::new(sigma, CountVector::unit(m, i, 2).as_slice().to_vec())));
        Ok(Self::canonical(m, terms))
    }

    /// `g = H(p) = Σ p_i²`, the direction the selection weight takes as `σ → ∞`.
    pub fn homozygosity(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(Self::canonical(
            m,
            (0..m)
                .map(|i| Monomial::new(1.0, CountVector::unit(m, i, 2).as_slice().to_vec()))
                .collect(),
        ))
    }

    /// `g = Σ p_i^{r_i}`.
    pub fn monomial_sum(r: &[u64]) -> Result<Self> {
        let m = r.len();
        check_m(m)?;
        Ok(Self::canonical(
            m,
            r.iter()
                .enumerate()
                .map(|(i, &ri)| Monomial::new(1.0, CountVector::unit(m, i, ri).as_slice().to_vec()))
                .collect(),
        ))
    }

    /// Any polynomial whose coefficients are all nonnegative (and not all zero).
    pub fn from_nonnegative_terms(m: usize, terms: Vec<Monomial>) -> Result<Self> {
        check_m(m)?;
        check_shapes(m, &terms)?;
        if terms.iter().any(|t| !t.coef.is_finite() || t.coef < 0.0) {
            return Err(Error::InvalidWeight(
                "coefficients must be finite and nonnegative".into(),
            ));
        }
        let g = Self::canonical(m, terms);
        if g.terms.is_empty() {
            return Err(Error::InvalidWeight("weight is identically zero".into()));
        }
        Ok(g)
    }

    /// Arbitrary signed coefficients. The polynomial is evaluated at every
    /// vertex and at 10,000 quasi-random simplex points and rejected if it dips
    /// below `-1e-12` anywhere.
    pub fn from_terms(m: usize, terms: Vec<Monomial>) -> Result<Self> {
        check_m(m)?;
        check_shapes(m, &terms)?;
        if terms.iter().any(|t| !t.coef.is_finite()) {
            return Err(Error::InvalidWeight("non-finite coefficient".into()));
        }
        let g = Self::canonical(m, terms);
        if g.terms.is_empty() {
            return Err(Error::InvalidWeight("weight is identically zero".into()));
        }
        let mut point = vec![0.0; m];
        for i in 0..m {
            point.iter_mut().for_each(|v| *v = 0.0);
            point[i] = 1.0;
            g.check_nonnegative_at(&point)?;
        }
        let mut rs = QuasiRandomSimplex::new(m);
        for _ in 0..NONNEG_CHECK_POINTS {
            rs.next_into(&mut point);
            g.check_nonnegative_at(&point)?;
        }
        Ok(g)
    }

    fn check_nonnegative_at(&self, p: &[f64]) -> Result<()> {
        let v = self.evaluate_slice(p);
        if v < -NONNEG_SLACK {
            Err(Error::InvalidWeight(format!(
                "weight is negative ({v:.3e}) at {p:?}"
            )))
        } else {
            Ok(())
        }
    }

    pub(crate) fn canonical(m: usize, terms: Vec<Monomial>) -> Self {
        let mut merged: BTreeMap<CountVector, f64> = BTreeMap::new();
        for t in terms {
            *merged.entry(t.powers).or_insert(0.0) += t.coef;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(powers, coef)| Monomial { coef, powers })
            .collect();
        PolynomialWeight { m, terms }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> u64 {
        self.terms.iter().map(|t| t.powers.total()).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].powers.total() == 0
    }

    pub fn has_negative_coefficients(&self) -> bool {
        self.terms.iter().any(|t| t.coef < 0.0)
    }

    /// If this weight is exactly `1 + σ H`, returns `σ` (so `g ≡ 1` gives 0).
    pub fn selection_sigma(&self) -> Option<f64> {
        if self.is_constant() {
            return (self.terms[0].coef == 1.0).then_some(0.0);
        }
        if self.terms.len() != self.m + 1 {
            return None;
        }
        let mut sigma = None;
        let mut seen_constant = false;
        for t in &self.terms {
            let powers = t.powers.as_slice();
            if t.powers.total() == 0 {
                if t.coef != 1.0 {
                    return None;
                }
                seen_constant = true;
            } else if t.powers.total() == 2 && powers.iter().any(|&k| k == 2) {
                match sigma {
                    None => sigma = Some(t.coef),
                    Some(s) if s == t.coef => {}
                    Some(_) => return None,
                }
            } else {
                return None;
            }
        }
        if seen_constant {
            sigma
        } else {
            None
        }
    }

    pub fn evaluate(&self, p: &SimplexPoint) -> Result<f64> {
        Error::check_dim(self.m, p.dim())?;
        Ok(self.evaluate_slice(p.as_slice()))
    }

    pub(crate) fn evaluate_slice(&self, p: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.evaluate(p)).sum()
    }

    /// `g + other`.
    pub fn add(&self, other: &PolynomialWeight) -> Result<Self> {
        Error::check_dim(self.m, other.m)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        let sum = Self::canonical(self.m, terms);
        if sum.terms.is_empty() {
            return Err(Error::InvalidWeight("sum is identically zero".into()));
        }
        Ok(sum)
    }

    /// `g · ∏ p_i^{k_i}`. Multiplying a nonnegative weight by a monomial keeps
    /// it nonnegative on the simplex.
    pub fn times_monomial(&self, powers: &CountVector) -> Result<Self> {
        Error::check_dim(self.m, powers.dim())?;
        Ok(Self::canonical(
            self.m,
            self.terms
                .iter()
                .map(|t| Monomial {
                    coef: t.coef,
                    powers: t.powers.add(powers).expect("dimensions checked"),
                })
                .collect(),
        ))
    }

    /// `p_i · g`.
    pub fn times_coordinate(&self, i: usize) -> Result<Self> {
        if i >= self.m {
            return Err(Error::domain(format!("coordinate {i} out of range for m = {}", self.m)));
        }
        self.times_monomial(&CountVector::unit(self.m, i, 1))
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        Err(Error::domain(format!("simplex dimension must be >= 2, got {m}")))
    } else {
        Ok(())
    }
}

fn check_shapes(m: usize, terms: &[Monomial]) -> Result<()> {
    if terms.is_empty() {
        return Err(Error::InvalidWeight("weight needs at least one term".into()));
    }
    for t in terms {
        Error::check_dim(m, t.powers.dim())?;
    }
    Ok(())
}

/// Low-discrepancy points that are uniform on the simplex: an additive
/// recurrence in the unit cube pushed through `-ln u` and normalized.
pub(crate) struct QuasiRandomSimplex {
    step: Vec<f64>,
    state: Vec<f64>,
}

impl QuasiRandomSimplex {
    pub(crate) fn new(m: usize) -> Self {
        // Generalized golden ratio: the positive root of x^(m+1) = x + 1.
        let mut phi = 2.0_f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (m as f64 + 1.0));
        }
        let step = (1..=m).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect();
        QuasiRandomSimplex {
            step,
            state: vec![0.5; m],
        }
    }

    pub(crate) fn next_into(&mut self, out: &mut [f64]) {
        let mut total = 0.0;
        for ((s, step), o) in self.state.iter_mut().zip(&self.step).zip(out.iter_mut()) {
            *s = (*s + step).fract();
            let u = s.max(f64::MIN_POSITIVE);
            *o = -u.ln();
            total += *o;
        }
        out.iter_mut().for_each(|v| *v /= total);
    }
}
