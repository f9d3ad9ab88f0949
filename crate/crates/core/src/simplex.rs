//! Points on the unit simplex, Dirichlet parameters and count vectors.

use crate::error::{Error, Result};

/// Inputs whose coordinate sum is off by at most this much are renormalized.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A probability vector `p` with `p_i` in `[0, 1]` and `Σ p_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    /// Validates and renormalizes. Sums further than [`SUM_TOLERANCE`] from
    /// one are rejected rather than silently rescaled.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain(format!(
                "simplex point needs at least 2 coordinates, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0 || **v > 1.0)
        {
            return Err(Error::domain(format!("coordinate {i} = {v} is outside [0, 1]")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::domain(format!(
                "coordinates sum to {sum}, not 1"
            )));
        }
        let values = if sum == 1.0 {
            values
        } else {
            values.into_iter().map(|v| v / sum).collect()
        };
        Ok(SimplexPoint(values))
    }

    /// The barycenter `(1/m, …, 1/m)`.
    pub fn barycenter(m: usize) -> Result<Self> {
        SimplexPoint::new(vec![1.0 / m as f64; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0)
    }

    /// Homozygosity `H(p) = Σ p_i²`.
    pub fn homozygosity(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }
}

impl std::ops::Index<usize> for SimplexPoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Dirichlet concentration vector; every entry strictly positive and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams(Vec<f64>);

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::domain(format!(
                "Dirichlet needs at least 2 categories, got {}",
                alpha.len()
            )));
        }
        if let Some((i, a)) = alpha
            .iter()
            .enumerate()
            .find(|(_, a)| !a.is_finite() || **a <= 0.0)
        {
            return Err(Error::domain(format!("alpha[{i}] = {a} must be finite and > 0")));
        }
        Ok(DirichletParams(alpha))
    }

    /// `(1, …, 1)`: the uniform distribution on the simplex.
    pub fn uniform(m: usize) -> Result<Self> {
        DirichletParams::new(vec![1.0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `|α| = Σ α_i`.
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Mean `α / |α|`.
    pub fn mean(&self) -> Vec<f64> {
        let total = self.total();
        self.0.iter().map(|a| a / total).collect()
    }

    /// `α + n`, the conjugate update for multinomial counts.
    pub fn add_counts(&self, counts: &CountVector) -> Result<Self> {
        Error::check_dim(self.dim(), counts.dim())?;
        DirichletParams::new(
            self.0
                .iter()
                .zip(counts.as_slice())
                .map(|(a, &n)| a + n as f64)
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for DirichletParams {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Multinomial category counts `n = (n_1, …, n_m)`. Also used as an exponent
/// vector for mixed moments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountVector(Vec<u64>);

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Self {
        CountVector(counts)
    }

    pub fn zeros(m: usize) -> Self {
        CountVector(vec![0; m])
    }

    /// The unit vector `e_i` scaled by `k`.
    pub fn unit(m: usize, i: usize, k: u64) -> Self {
        let mut v = vec![0; m];
        v[i] = k;
        CountVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn add(&self, other: &CountVector) -> Result<CountVector> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(CountVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

impl std::ops::Index<usize> for CountVector {
    type Output = u64;
    fn index(&self, i: usize) -> &u64 {
        &self.0[i]
    }
}

impl From<Vec<u64>> for CountVector {
    fn from(v: Vec<u64>) -> Self {
        CountVector(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_point_renormalizes_small_drift() {
        let p = SimplexPoint::new(vec![0.3, 0.7 + 5e-10]).unwrap();
        assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.0]).is_err());
        assert!(SimplexPoint::new(vec![-0.1, 1.1]).is_err());
        assert!(SimplexPoint::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn params_reject_zero_and_negative() {
        assert!(DirichletParams::new(vec![1.0, 0.0]).is_err());
        assert!(DirichletParams::new(vec![1.0, -2.0]).is_err());
        assert!(DirichletParams::new(vec![1.0, f64::INFINITY]).is_err());
        let a = DirichletParams::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(a.total(), 5.0);
        let b = a.add_counts(&CountVector::new(vec![1, 4])).unwrap();
        assert_eq!(b.as_slice(), &[3.0, 7.0]);
        assert!(a.add_counts(&CountVector::zeros(3)).is_err());
    }

    #[test]
    fn homozygosity_bounds() {
        let p = SimplexPoint::barycenter(4).unwrap();
        assert!((p.homozygosity() - 0.25).abs() < 1e-15);
        let v = SimplexPoint::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(v.homozygosity(), 1.0);
        assert!(!v.is_interior());
    }
}
