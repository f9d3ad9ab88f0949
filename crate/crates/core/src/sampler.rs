//! Sampling from the selection model `P_{α,1+σH}`.
//!
//! [`gibbs_chain`] runs a systematic-scan Gibbs sampler over the free
//! coordinates `p_1, …, p_{m-1}` (with `p_m = 1 - Σ p_j`), drawing each full
//! conditional by inverse CDF. [`rejection_sample`] produces exact i.i.d.
//! draws by thinning Dirichlet proposals and serves as an oracle.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`; chain
//! `k` uses stream `k`, so chains sharing a seed are independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::density::WeightedDirichletModel;
use crate::error::{Error, Result};
use crate::simplex::{DirichletParams, SimplexPoint};
use crate::special::{beta_inc_reg, ln_beta};

/// Relative bisection tolerance on the scaled coordinate `t = p_i / u`.
const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub thin: usize,
    /// Stream index of the generator; give parallel chains distinct values.
    pub stream: u64,
}

impl ChainConfig {
    /// Burn-in of 10% of `iterations`, no thinning, stream 0.
    pub fn new(iterations: usize, seed: u64) -> Self {
        ChainConfig {
            iterations,
            burn_in: iterations / 10,
            seed,
            thin: 1,
            stream: 0,
        }
    }

    pub fn retained(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.thin == 0 {
            return Err(Error::InvalidConfig("iterations and thin must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.retained() == 0 {
            return Err(Error::InvalidConfig("configuration retains no draws".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub lag1_autocorrelation: Vec<f64>,
    /// Batch-means Monte Carlo standard error of each mean.
    pub mc_standard_error: Vec<f64>,
    pub retained: usize,
}

/// Per-coordinate moments, lag-1 autocorrelation and batch-means standard
/// errors (batches of `⌊√n⌋` draws).
pub fn summarize(draws: &[SimplexPoint]) -> Result<ChainSummary> {
    let first = draws
        .first()
        .ok_or_else(|| Error::InvalidSample("no draws to summarize".into()))?;
    let m = first.dim();
    let n = draws.len();
    let nf = n as f64;
    let batch = ((n as f64).sqrt() as usize).max(1);
    let batches = n / batch;
    let mut mean = vec![0.0; m];
    let mut variance = vec![0.0; m];
    let mut lag1 = vec![0.0; m];
    let mut se = vec![0.0; m];
    for i in 0..m {
        let mu = draws.iter().map(|p| p[i]).sum::<f64>() / nf;
        let var = draws.iter().map(|p| (p[i] - mu).powi(2)).sum::<f64>() / nf;
        let cov1 = draws.windows(2).map(|w| (w[0][i] - mu) * (w[1][i] - mu)).sum::<f64>() / nf;
        mean[i] = mu;
        variance[i] = if n > 1 { var * nf / (nf - 1.0) } else { 0.0 };
        lag1[i] = if var > 0.0 { cov1 / var } else { 0.0 };
        se[i] = if batches > 1 {
            let means: Vec<f64> = (0..batches)
                .map(|b| draws[b * batch..(b + 1) * batch].iter().map(|p| p[i]).sum::<f64>() / batch as f64)
                .collect();
            let bm = means.iter().sum::<f64>() / batches as f64;
            let bv = means.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (batches - 1) as f64;
            (bv / batches as f64).sqrt()
        } else {
            (variance[i] / nf).sqrt()
        };
    }
    Ok(ChainSummary {
        mean,
        variance,
        lag1_autocorrelation: lag1,
        mc_standard_error: se,
        retained: n,
    })
}

/// Full conditional of one free coordinate on its slice `(0, u)`.
///
/// With `p_m = u - p_i` substituted, the weight is `A₀ + A₁p_i + A₂p_i²` with
/// `A₀ = 1 + σc + σu²`, `A₁ = -2σu`, `A₂ = 2σ`. Writing `p_i = u t` turns
/// the conditional into a combination of `Beta(a + k, b)` laws, `k ≤ 2`,
/// `a = α_i`, `b = α_m`.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalSlice {
    a: f64,
    b: f64,
    u: f64,
    weights: [f64; 3],
    ln_beta_ab: f64,
}

impl ConditionalSlice {
    /// `c` is the sum of squares of the other free coordinates.
    pub fn new(alpha_i: f64, alpha_m: f64, sigma: f64, u: f64, c: f64) -> Result<Self> {
        if !(u > 0.0) {
            return Err(Error::Numerical(format!("degenerate slice: u = {u}")));
        }
        let (a, b) = (alpha_i, alpha_m);
        let s = a + b;
        let coef = [1.0 + sigma * c + sigma * u * u, -2.0 * sigma * u, 2.0 * sigma];
        let raw = [
            coef[0],
            coef[1] * u * a / s,
            coef[2] * u * u * a * (a + 1.0) / (s * (s + 1.0)),
        ];
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Numerical(format!("conditional has no mass on the slice (u = {u})")));
        }
        Ok(ConditionalSlice {
            a,
            b,
            u,
            weights: raw.map(|w| w / total),
            ln_beta_ab: ln_beta(a, b),
        })
    }

    pub fn width(&self) -> f64 {
        self.u
    }

    /// CDF at the scaled point `t = p_i / u`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let (a, b) = (self.a, self.b);
        let i0 = beta_inc_reg(a, b, t);
        if self.weights[1] == 0.0 && self.weights[2] == 0.0 {
            return i0;
        }
        // I_t(a+1, b) = I_t(a, b) - t^a (1-t)^b / (a B(a, b)), and once more for a+2.
        let front = (a * t.ln() + b * (-t).ln_1p() - self.ln_beta_ab).exp();
        let i1 = i0 - front / a;
        let i2 = i1 - front * t * (a + b) / (a * (a + 1.0));
        let f = self.weights[0] * i0 + self.weights[1] * i1 + self.weights[2] * i2;
        f.clamp(0.0, 1.0)
    }

    /// Scaled point `t` with `cdf(t) = q`, by bisection. The bracket is
    /// narrowed to `INVERSE_TOL` relative to the distance from the nearer
    /// endpoint, so quantiles in steep tails keep their accuracy.
    pub fn inverse(&self, q: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..INVERSE_MAX_ITER {
            if hi - lo <= INVERSE_TOL * hi.min(1.0 - lo) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn model_sigma(model: &WeightedDirichletModel) -> Result<f64> {
    model.weight().selection_sigma().ok_or_else(|| {
        Error::InvalidWeight("sampling requires a weight of the form 1 + sigma H".into())
    })
}

/// CDF of the full conditional of free coordinate `i` (`i < m - 1`) at the
/// scaled point `t = p_i / u`, where `others` holds the remaining free
/// coordinates in index order and `u = 1 - Σ others`.
pub fn conditional_cdf(model: &WeightedDirichletModel, i: usize, others: &[f64], t: f64) -> Result<f64> {
    let m = model.dim();
    if i + 1 >= m {
        return Err(Error::domain(format!("coordinate {i} is not free in dimension {m}")));
    }
    Error::check_dim(m - 2, others.len())?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t must lie in [0, 1], got {t}")));
    }
    let sigma = model_sigma(model)?;
    let alpha = model.params().as_slice();
    let u = 1.0 - others.iter().sum::<f64>();
    let c = others.iter().map(|x| x * x).sum();
    let slice = ConditionalSlice::new(alpha[i], alpha[m - 1], sigma, u, c)?;
    Ok(slice.cdf(t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub draws: Vec<SimplexPoint>,
    pub summary: ChainSummary,
    /// Times a slice collapsed and the state was reset to the barycenter.
    pub degenerate_restarts: usize,
}

fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Systematic-scan Gibbs sampler started at the barycenter.
pub fn gibbs_chain(model: &WeightedDirichletModel, config: &ChainConfig) -> Result<ChainOutput> {
    config.validate()?;
    let sigma = model_sigma(model)?;
    let m = model.dim();
    let alpha = model.params().as_slice();
    let last = m - 1;
    let mut rng = chain_rng(config.seed, config.stream);
    let mut p = vec![1.0 / m as f64; m];
    let mut draws = Vec::with_capacity(config.retained());
    let mut restarts = 0;
    for iter in 0..config.iterations {
        for i in 0..last {
            let u = p[i] + p[last];
            let c: f64 = (0..last).filter(|&j| j != i).map(|j| p[j] * p[j]).sum();
            let q: f64 = rng.random();
            match ConditionalSlice::new(alpha[i], alpha[last], sigma, u, c) {
                Ok(slice) => {
                    let t = slice.inverse(q);
                    p[i] = u * t;
                    p[last] = u - p[i];
                }
                Err(_) => {
                    restarts += 1;
                    p.iter_mut().for_each(|x| *x = 1.0 / m as f64);
                }
            }
        }
        let free: f64 = p[..last].iter().sum();
        p[last] = (1.0 - free).max(0.0);
        if iter >= config.burn_in && (iter - config.burn_in).is_multiple_of(config.thin) {
            draws.push(SimplexPoint::new(p.clone())?);
        }
    }
    let summary = summarize(&draws)?;
    Ok(ChainOutput {
        draws,
        summary,
        degenerate_restarts: restarts,
    })
}

/// Gamma-ratio Dirichlet draw.
fn dirichlet_draw<R: Rng>(gammas: &[Gamma<f64>], rng: &mut R) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
        let total: f64 = x.iter().sum();
        if total > 0.0 && total.is_finite() {
            x.iter_mut().for_each(|v| *v /= total);
            return x;
        }
    }
}

fn gamma_laws(params: &DirichletParams) -> Result<Vec<Gamma<f64>>> {
    params
        .as_slice()
        .iter()
        .map(|&a| Gamma::new(a, 1.0).map_err(|e| Error::Numerical(e.to_string())))
        .collect()
}

/// `count` i.i.d. Dirichlet draws.
pub fn dirichlet_sample(params: &DirichletParams, count: usize, seed: u64) -> Result<Vec<SimplexPoint>> {
    let gammas = gamma_laws(params)?;
    let mut rng = chain_rng(seed, 0);
    (0..count).map(|_| SimplexPoint::new(dirichlet_draw(&gammas, &mut rng))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectionOutput {
    pub draws: Vec<SimplexPoint>,
    pub proposals: u64,
    pub acceptance_rate: f64,
}

/// Exact draws: Dirichlet proposals accepted with probability `g(p)/M`,
/// `M = max g = 1 + σ` for `σ ≥ 0` and `1 + σ/m` for `σ < 0`.
pub fn rejection_sample(model: &WeightedDirichletModel, count: usize, seed: u64) -> Result<RejectionOutput> {
    let sigma = model_sigma(model)?;
    let m = model.dim();
    let bound = if sigma >= 0.0 { 1.0 + sigma } else { 1.0 + sigma / m as f64 };
    let gammas = gamma_laws(model.params())?;
    let mut rng = chain_rng(seed, 0);
    let mut draws = Vec::with_capacity(count);
    let mut proposals: u64 = 0;
    while draws.len() < count {
        let p = dirichlet_draw(&gammas, &mut rng);
        proposals += 1;
        let h: f64 = p.iter().map(|x| x * x).sum();
        let accept = sigma == 0.0 || rng.random::<f64>() * bound < 1.0 + sigma * h;
        if accept {
            draws.push(SimplexPoint::new(p)?);
        }
        if proposals == 100_000 {
            let rate = draws.len() as f64 / proposals as f64;
            if rate < 1e-4 {
                return Err(Error::LowAcceptance { rate, proposals });
            }
        }
    }
    Ok(RejectionOutput {
        acceptance_rate: draws.len() as f64 / proposals.max(1) as f64,
        draws,
        proposals,
    })
}
