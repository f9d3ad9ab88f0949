//! Independent oracles for tests: tanh-sinh quadrature on `[0, 1]` and on
//! the 2-simplex, brute-force grids, and the two-point σ rule.
//!
//! Enabled by the `testkit` feature.

use std::f64::consts::FRAC_PI_2;

use crate::mle::SigmaEstimate;

/// Tanh-sinh rule on `[0, 1]`: nodes `(x, 1 - x, w)` with both endpoints'
/// distances computed directly, so integrands singular at 0 or 1 keep full
/// relative accuracy.
pub fn tanh_sinh_rule(level: u32) -> Vec<(f64, f64, f64)> {
    let h = 0.5_f64.powi(level as i32);
    let limit = 5.0;
    let count = (limit / h) as i64;
    (-count..=count)
        .filter_map(|k| {
            let t = k as f64 * h;
            let s = FRAC_PI_2 * t.sinh();
            let x = 1.0 / (1.0 + (-2.0 * s).exp());
            let y = 1.0 / (1.0 + (2.0 * s).exp());
            let w = h * FRAC_PI_2 * t.cosh() * 2.0 * x * y;
            (x > 0.0 && y > 0.0 && w > 0.0).then_some((x, y, w))
        })
        .collect()
}

/// `∫₀¹ f(x, 1 - x) dx`.
pub fn integrate_unit<F: FnMut(f64, f64) -> f64>(mut f: F, level: u32) -> f64 {
    tanh_sinh_rule(level).into_iter().map(|(x, y, w)| w * f(x, y)).sum()
}

/// `∫₀^b f(t) dt` for `0 < b ≤ 1`.
pub fn integrate_to<F: FnMut(f64) -> f64>(mut f: F, b: f64, level: u32) -> f64 {
    b * integrate_unit(|x, _| f(b * x), level)
}

/// `∫_{△₃} f(p) dp₁ dp₂` through `p = (x, (1-x)y, (1-x)(1-y))`, Jacobian `1 - x`.
pub fn integrate_simplex3<F: FnMut(&[f64; 3]) -> f64>(mut f: F, level: u32) -> f64 {
    let rule = tanh_sinh_rule(level);
    let mut total = 0.0;
    for &(x, xc, wx) in &rule {
        let mut inner = 0.0;
        for &(y, yc, wy) in &rule {
            let p = [x, xc * y, xc * yc];
            if p[1] > 0.0 && p[2] > 0.0 {
                inner += wy * f(&p);
            }
        }
        total += wx * xc * inner;
    }
    total
}

/// `count` log-spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|j| (a + (b - a) * j as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Grid point with the largest value (first one on ties).
pub fn grid_argmax<F: FnMut(f64) -> f64>(mut f: F, xs: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v > best.1 {
            best = (j, v);
        }
    }
    best
}

/// Ternary search for the maximum of a unimodal `f` on `[a, b]`.
pub fn ternary_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    while b - a > tol {
        let c = a + (b - a) / 3.0;
        let d = b - (b - a) / 3.0;
        if f(c) < f(d) {
            a = c;
        } else {
            b = d;
        }
    }
    0.5 * (a + b)
}

/// σ-likelihood for `α = (1, 1)` (so `E[H] = 2/3`) in closed rational
/// form, independent of the library's implementation.
pub fn two_point_loglik(h1: f64, h2: f64, sigma: f64) -> f64 {
    if sigma == f64::INFINITY {
        return (1.5 * h1).ln() + (1.5 * h2).ln();
    }
    let e = 1.0 + 2.0 * sigma / 3.0;
    ((1.0 + sigma * h1) / e * ((1.0 + sigma * h2) / e)).ln()
}

/// Case analysis for two points with `α = (1, 1)`: the score has the sign of
/// `A + Bσ`, `A = H₁ + H₂ - 4/3`, `B = H₁(H₂ - 2/3) + H₂(H₁ - 2/3)`.
pub fn two_point_sigma_rule(h1: f64, h2: f64) -> SigmaEstimate {
    let a = h1 + h2 - 4.0 / 3.0;
    let b = h1 * (h2 - 2.0 / 3.0) + h2 * (h1 - 2.0 / 3.0);
    if b >= 0.0 {
        // B ≥ 0 forces A ≥ 0, so the likelihood is nondecreasing in σ.
        return SigmaEstimate::PlusInfinity;
    }
    let sigma0 = -a / b;
    if sigma0 <= -1.0 {
        SigmaEstimate::LowerBoundary
    } else {
        SigmaEstimate::Interior(sigma0)
    }
}

/// Grid search for the two-point σ-maximizer on `[-1, hi]` with step
/// `step`, widened while the best point sits at the upper end, then refined
/// by ternary search and compared against the `+∞` limit.
pub fn two_point_sigma_grid(h1: f64, h2: f64, step: f64) -> SigmaEstimate {
    let f = |s: f64| two_point_loglik(h1, h2, s);
    let mut hi = 100.0;
    let mut step = step;
    let (mut best_s, mut best_v);
    loop {
        let count = ((hi + 1.0) / step).round() as usize;
        let xs: Vec<f64> = (0..=count).map(|j| -1.0 + j as f64 * step).collect();
        let (j, v) = grid_argmax(f, &xs);
        best_s = xs[j];
        best_v = v;
        if j < count || hi >= 1e8 {
            break;
        }
        hi *= 100.0;
        step *= 100.0;
    }
    let limit = f(f64::INFINITY);
    let refined = ternary_max(f, (best_s - step).max(-1.0), best_s + step, 1e-12 * best_s.abs().max(1.0));
    if f(refined) >= best_v {
        best_s = refined;
        best_v = f(refined);
    }
    if limit > best_v {
        SigmaEstimate::PlusInfinity
    } else if f(-1.0) >= best_v {
        SigmaEstimate::LowerBoundary
    } else {
        SigmaEstimate::Interior(best_s)
    }
}
