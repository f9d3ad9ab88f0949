//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the report is
//! always printed.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplex_priors::empirical_bayes::closed_form::{marginal_sigma_minus_one, marginal_sigma_zero};
use simplex_priors::mle::sigma_mle_from_homozygosity;
use simplex_priors::posterior::closed_form::selection_posterior_mean_closed_form;
use simplex_priors::special::ln_gamma;
use simplex_priors::testkit::{
    grid_argmax, integrate_simplex3, integrate_unit, log_grid, two_point_sigma_grid, two_point_sigma_rule,
};
use simplex_priors::{
    dirichlet_log_density, dirichlet_mle, dirichlet_moment, dirichlet_sample, eb_theta_hat, gibbs_chain,
    marginal_likelihood, posterior_mean, posterior_update, rejection_sample, selection_mle_fixed_sigma,
    selection_mle_joint, sigma_mle, summarize, weighted_log_density, ChainConfig, CountVector, DirichletParams,
    FrequencySample, PolynomialWeight, SigmaEstimate, SimplexPoint, ThetaEstimate, WeightedDirichletModel,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within_budget(start: Instant, budget: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    ensure!(took < budget, "{detail}; took {took:.2?}, budget {budget:?}");
    Ok(format!("{detail}; {took:.2?}"))
}

fn random_weight(rng: &mut ChaCha8Rng, m: usize) -> PolynomialWeight {
    match rng.random_range(0..3) {
        0 => PolynomialWeight::constant(m).unwrap(),
        1 => PolynomialWeight::selection(m, rng.random_range(-1.0..20.0)).unwrap(),
        _ => {
            let r: Vec<u64> = (0..m).map(|_| rng.random_range(0..4)).collect();
            PolynomialWeight::monomial_sum(&r).unwrap()
        }
    }
}

fn random_counts(rng: &mut ChaCha8Rng, m: usize, max_total: u64) -> CountVector {
    let total = rng.random_range(0..=max_total);
    let mut n = vec![0u64; m];
    for _ in 0..total {
        n[rng.random_range(0..m)] += 1;
    }
    CountVector::new(n)
}

fn interior_point(rng: &mut ChaCha8Rng, m: usize) -> SimplexPoint {
    let raw: Vec<f64> = (0..m).map(|_| -rng.random_range(1e-12f64..1.0).ln()).collect();
    let s: f64 = raw.iter().sum();
    SimplexPoint::new(raw.iter().map(|x| x / s).collect()).unwrap()
}

fn conjugacy() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = [2, 3, 5][rng.random_range(0..3)];
        let alpha: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..10.0)).collect();
        let params = DirichletParams::new(alpha).unwrap();
        let weight = random_weight(&mut rng, m);
        let model = WeightedDirichletModel::new(params.clone(), weight.clone()).unwrap();
        let n = random_counts(&mut rng, m, 20);
        let post = posterior_update(&model, &n).unwrap();
        let prior_z: f64 = weight.terms().iter().map(|t| t.coef * dirichlet_moment(&params, &t.powers).unwrap()).sum();
        let evidence: f64 = weight
            .terms()
            .iter()
            .map(|t| t.coef * dirichlet_moment(&params, &t.powers.add(&n).unwrap()).unwrap())
            .sum::<f64>()
            / prior_z;
        let mut checked = 0;
        while checked < 200 {
            let p = interior_point(&mut rng, m);
            let g = weight.evaluate(&p).unwrap();
            if g <= 0.0 {
                continue;
            }
            let prior = dirichlet_log_density(&params, &p).unwrap() + g.ln() - prior_z.ln();
            let like: f64 = p.as_slice().iter().zip(n.as_slice()).map(|(x, &k)| k as f64 * x.ln()).sum();
            let bayes = prior + like - evidence.ln();
            let got = weighted_log_density(&post, &p).unwrap();
            // Log-scale difference is the relative error of the density.
            let rel = (got - bayes).abs();
            worst = worst.max(rel);
            ensure!(rel < 1e-10, "model {model:?}, n {n:?}, p {p:?}: relative error {rel:e}");
            checked += 1;
        }
    }
    within_budget(start, Duration::from_secs(10), format!("50 models x 200 points, worst relative error {worst:.1e}"))
}

fn normalization() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst2, mut worst3) = (0.0f64, 0.0f64);
    for m in [2usize, 3] {
        for _ in 0..20 {
            let alpha: Vec<f64> = (0..m).map(|_| rng.random_range(0.3..8.0)).collect();
            let weight = random_weight(&mut rng, m);
            let model = WeightedDirichletModel::new(DirichletParams::new(alpha).unwrap(), weight).unwrap();
            let density = |p: Vec<f64>| weighted_log_density(&model, &SimplexPoint::new(p).unwrap()).unwrap().exp();
            if m == 2 {
                let err = (integrate_unit(|x, y| density(vec![x, y]), 7) - 1.0).abs();
                worst2 = worst2.max(err);
                ensure!(err < 1e-8, "m=2 {model:?}: error {err:e}");
            } else {
                let err = (integrate_simplex3(|p| density(p.to_vec()), 5) - 1.0).abs();
                worst3 = worst3.max(err);
                ensure!(err < 1e-6, "m=3 {model:?}: error {err:e}");
            }
        }
    }
    within_budget(
        start,
        Duration::from_secs(30),
        format!("worst error m=2 {worst2:.1e}, m=3 {worst3:.1e}"),
    )
}

fn beta22_identity() -> Outcome {
    let model = WeightedDirichletModel::selection(DirichletParams::uniform(2).unwrap(), -1.0).unwrap();
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let p = (k as f64 + 0.5) / 1000.0;
        let got = weighted_log_density(&model, &SimplexPoint::new(vec![p, 1.0 - p]).unwrap()).unwrap().exp();
        let want = 6.0 * p * (1.0 - p);
        let rel = (got / want - 1.0).abs();
        worst = worst.max(rel);
        ensure!(rel < 1e-12, "p={p}: {got} vs {want}");
    }
    let mean = posterior_mean(&model, &CountVector::new(vec![1, 0])).unwrap();
    ensure!(
        (mean[0] - 0.6).abs() < 1e-12 && (mean[1] - 0.4).abs() < 1e-12,
        "posterior mean {mean:?}"
    );
    Ok(format!("worst density error {worst:.1e}, posterior mean ({:.15}, {:.15})", mean[0], mean[1]))
}

fn sigma_zero_reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let m = rng.random_range(2..6);
        let params = DirichletParams::new((0..m).map(|_| rng.random_range(0.2..10.0)).collect()).unwrap();
        let n = random_counts(&mut rng, m, 20);
        let s = params.total() + n.total() as f64;
        let generic = posterior_mean(&WeightedDirichletModel::selection(params.clone(), 0.0).unwrap(), &n).unwrap();
        let closed = selection_posterior_mean_closed_form(&params, 0.0, &n).unwrap();
        for i in 0..m {
            let want = (params[i] + n.as_slice()[i] as f64) / s;
            ensure!(
                (generic[i] - want).abs() < 1e-12 && (closed[i] - want).abs() < 1e-12,
                "alpha {params:?}, n {n:?}: {generic:?} / {closed:?}"
            );
        }
    }

    let truth = DirichletParams::new(vec![2.0, 5.0, 3.0]).unwrap();
    let sample = FrequencySample::new(dirichlet_sample(&truth, 500, 41).unwrap()).unwrap();
    let plain = dirichlet_mle(&sample, 1e-10, 200).unwrap();
    let fixed = selection_mle_fixed_sigma(&sample, SigmaEstimate::Interior(0.0), 1e-10, 200).unwrap();
    ensure!(plain == fixed, "sigma=0 fit {fixed:?} differs from {plain:?}");

    let params = DirichletParams::new(vec![2.0, 3.0, 4.0]).unwrap();
    let model = WeightedDirichletModel::selection(params.clone(), 0.0).unwrap();
    let config = ChainConfig { iterations: 55_000, burn_in: 5_000, seed: 44, thin: 1, stream: 0 };
    let gibbs = gibbs_chain(&model, &config).unwrap().summary;
    let direct = summarize(&dirichlet_sample(&params, 50_000, 45).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for i in 0..3 {
        let se = (gibbs.mc_standard_error[i].powi(2) + direct.variance[i] / direct.retained as f64).sqrt();
        let z = (gibbs.mean[i] - direct.mean[i]).abs() / se;
        worst = worst.max(z);
        ensure!(z < 3.0, "coordinate {i}: gibbs {} vs direct {} ({z:.2} s.e.)", gibbs.mean[i], direct.mean[i]);
        let vr = gibbs.variance[i] / direct.variance[i];
        ensure!((vr - 1.0).abs() < 0.05, "coordinate {i}: variance ratio {vr}");
    }
    Ok(format!("means exact to 1e-12, sigma=0 fit identical, Gibbs vs direct within {worst:.2} s.e."))
}

fn case_analysis() -> Outcome {
    let start = Instant::now();
    let eh = 2.0 / 3.0;
    let a = sigma_mle_from_homozygosity(&[0.5, 0.5], eh);
    ensure!(a == SigmaEstimate::LowerBoundary, "H=(0.5,0.5): {a:?}");
    let b = sigma_mle_from_homozygosity(&[1.0, 1.0], eh);
    ensure!(b == SigmaEstimate::PlusInfinity, "H=(1,1): {b:?}");
    let c = sigma_mle_from_homozygosity(&[0.5, 0.9], eh);
    ensure!(matches!(c, SigmaEstimate::Interior(s) if (s - 2.0).abs() < 1e-8), "H=(0.5,0.9): {c:?}");

    let q = (1.0 + 0.8f64.sqrt()) / 2.0;
    let uniform = DirichletParams::uniform(2).unwrap();
    let sample = FrequencySample::from_rows(vec![vec![0.5, 0.5], vec![q, 1.0 - q]]).unwrap();
    let via_sample = sigma_mle(&sample, &uniform).unwrap();
    ensure!(
        matches!(via_sample, SigmaEstimate::Interior(s) if (s - 2.0).abs() < 1e-8),
        "frequency sample with H=(0.5,0.9): {via_sample:?}"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut kinds = [0usize; 3];
    for _ in 0..1000 {
        let (h1, h2): (f64, f64) = (rng.random_range(1e-3..1.0), rng.random_range(1e-3..1.0));
        let got = sigma_mle_from_homozygosity(&[h1, h2], eh);
        let rule = two_point_sigma_rule(h1, h2);
        let grid = two_point_sigma_grid(h1, h2, 1e-3);
        ensure!(got.kind() == rule.kind(), "H=({h1},{h2}): {got:?} vs closed form {rule:?}");
        ensure!(got.kind() == grid.kind(), "H=({h1},{h2}): {got:?} vs grid {grid:?}");
        match got {
            SigmaEstimate::Interior(s) => {
                let r = rule.value().unwrap();
                let g = grid.value().unwrap();
                ensure!((s - r).abs() <= 1e-6 * r.abs().max(1.0), "H=({h1},{h2}): {s} vs closed form {r}");
                ensure!((s - g).abs() <= 1e-6 * g.abs().max(1.0), "H=({h1},{h2}): {s} vs grid {g}");
                kinds[0] += 1;
            }
            SigmaEstimate::LowerBoundary => kinds[1] += 1,
            SigmaEstimate::PlusInfinity => kinds[2] += 1,
        }
    }
    within_budget(
        start,
        Duration::from_secs(20),
        format!(
            "boundary cases exact; 1000 pairs agree ({} interior, {} lower_boundary, {} plus_infinity)",
            kinds[0], kinds[1], kinds[2]
        ),
    )
}

fn mle_recovery() -> Outcome {
    let start = Instant::now();
    let truth = [2.0, 5.0, 3.0];
    let draws = dirichlet_sample(&DirichletParams::new(truth.to_vec()).unwrap(), 5000, 2024).unwrap();
    let fit = dirichlet_mle(&FrequencySample::new(draws).unwrap(), 1e-10, 200).unwrap();
    for i in 0..3 {
        let rel = (fit.params[i] / truth[i] - 1.0).abs();
        ensure!(rel < 0.10, "alpha_{i} = {} vs {}", fit.params[i], truth[i]);
    }
    ensure!(fit.gradient_norm < 1e-8, "gradient max-norm {:e}", fit.gradient_norm);
    within_budget(
        start,
        Duration::from_secs(5),
        format!("alpha = {:.4?}, gradient {:.1e}", fit.params.as_slice(), fit.gradient_norm),
    )
}

fn gibbs_closed_form() -> Outcome {
    let start = Instant::now();
    let params = DirichletParams::new(vec![2.0, 3.0, 4.0]).unwrap();
    let model = WeightedDirichletModel::selection(params.clone(), -1.0).unwrap();
    let config = ChainConfig { iterations: 220_000, burn_in: 20_000, seed: 7, thin: 1, stream: 0 };
    let out = gibbs_chain(&model, &config).unwrap();
    let s = &out.summary;
    ensure!(s.retained == 200_000, "retained {}", s.retained);
    let target = selection_posterior_mean_closed_form(&params, -1.0, &CountVector::zeros(3)).unwrap();
    let exact = rejection_sample(&model, 200_000, 8).unwrap();
    let oracle = summarize(&exact.draws).unwrap();
    let (mut z_closed, mut z_oracle) = (0.0f64, 0.0f64);
    for i in 0..3 {
        let se = s.mc_standard_error[i];
        let d = (s.mean[i] - target[i]).abs();
        ensure!(d < 3.0 * se && d < 0.01, "coordinate {i}: {} vs closed form {} (s.e. {se:e})", s.mean[i], target[i]);
        let combined = (se.powi(2) + oracle.variance[i] / oracle.retained as f64).sqrt();
        let e = (s.mean[i] - oracle.mean[i]).abs();
        ensure!(e < 4.0 * combined, "coordinate {i}: {} vs rejection {}", s.mean[i], oracle.mean[i]);
        z_closed = z_closed.max(d / se);
        z_oracle = z_oracle.max(e / combined);
    }
    within_budget(
        start,
        Duration::from_secs(60),
        format!(
            "mean {:.5?} vs {:.5?}; {z_closed:.2} s.e. from closed form, {z_oracle:.2} combined s.e. from rejection",
            s.mean, target
        ),
    )
}

fn empirical_bayes() -> Outcome {
    for sigma in [0.0, -1.0] {
        for n in [1u64, 4, 9] {
            let zero = eb_theta_hat(0, n, sigma).unwrap().theta_hat;
            ensure!(zero == ThetaEstimate::ZeroBoundary, "n1=0, n={n}, sigma={sigma}: {zero:?}");
            let inf = eb_theta_hat(n, n, sigma).unwrap().theta_hat;
            ensure!(inf == ThetaEstimate::Infinity, "n1=n={n}, sigma={sigma}: {inf:?}");
        }
    }
    let grid = log_grid(1e-4, 1e4, 1_000_000);
    let mut worst = 0.0f64;
    let cases: [(f64, &[(u64, u64)]); 2] = [
        (0.0, &[(1, 2), (3, 10), (7, 9), (1, 30), (5, 6), (1, 12), (11, 12)]),
        (-1.0, &[(1, 2), (1, 3), (3, 10), (7, 9), (5, 6), (11, 12)]),
    ];
    for (sigma, pairs) in cases {
        for &(n1, n) in pairs {
            let oracle = |t: f64| {
                if sigma == 0.0 {
                    marginal_sigma_zero(t, n1, n).ln()
                } else {
                    marginal_sigma_minus_one(t, n1, n).ln()
                }
            };
            let (j, _) = grid_argmax(oracle, &grid);
            ensure!(j > 0 && j + 1 < grid.len(), "({n1},{n}) sigma={sigma}: grid maximum on the edge");
            let theta = match eb_theta_hat(n1, n, sigma).unwrap().theta_hat {
                ThetaEstimate::Interior(t) => t,
                other => return Err(format!("({n1},{n}) sigma={sigma}: {other:?}")),
            };
            let rel = (theta / grid[j] - 1.0).abs();
            worst = worst.max(rel);
            ensure!(rel < 1e-4, "({n1},{n}) sigma={sigma}: theta {theta} vs grid {}", grid[j]);
        }
    }
    // At sigma = -1 the prior tends to Beta(1, 2) as theta -> 0, and for
    // small n1/n the marginal keeps rising toward that limit.
    for &(n1, n) in &[(1u64, 5u64), (1, 30), (2, 30)] {
        let (j, _) = grid_argmax(|t| marginal_sigma_minus_one(t, n1, n).ln(), &grid);
        let kind = eb_theta_hat(n1, n, -1.0).unwrap().theta_hat;
        ensure!(j == 0 && kind == ThetaEstimate::ZeroBoundary, "({n1},{n}) sigma=-1: {kind:?}, grid index {j}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_norm = 0.0f64;
    for m in [2usize, 3] {
        for _ in 0..6 {
            let params = DirichletParams::new((0..m).map(|_| rng.random_range(0.3..6.0)).collect()).unwrap();
            let sigma = rng.random_range(-1.0..10.0);
            for total in 0..=8u64 {
                let mut sum = 0.0;
                for n in compositions(total, m) {
                    let coef = ln_gamma(total as f64 + 1.0)
                        - n.iter().map(|&k| ln_gamma(k as f64 + 1.0)).sum::<f64>();
                    sum += coef.exp() * marginal_likelihood(&CountVector::new(n), &params, sigma).unwrap();
                }
                worst_norm = worst_norm.max((sum - 1.0).abs());
                ensure!((sum - 1.0).abs() < 1e-10, "m={m}, |n|={total}, sigma={sigma}: total {sum}");
            }
        }
    }
    Ok(format!(
        "boundary kinds correct; interior theta within {worst:.1e} of grid (sigma=0 for every 1<=n1<n; sigma=-1 small n1/n sits at zero_boundary); predictive sums within {worst_norm:.1e}"
    ))
}

fn compositions(total: u64, m: usize) -> Vec<Vec<u64>> {
    if m == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|k| {
            compositions(total - k, m - 1).into_iter().map(move |mut rest| {
                rest.insert(0, k);
                rest
            })
        })
        .collect()
}

fn refit_round_trip() -> Outcome {
    let start = Instant::now();
    let truth = [6.6725, 3.7305, 20.1206];
    let draws = dirichlet_sample(&DirichletParams::new(truth.to_vec()).unwrap(), 2000, 2).unwrap();
    let sample = FrequencySample::new(draws).unwrap();
    let fit = dirichlet_mle(&sample, 1e-10, 200).unwrap();
    for i in 0..3 {
        ensure!((fit.params[i] / truth[i] - 1.0).abs() < 0.15, "alpha_{i} = {} vs {}", fit.params[i], truth[i]);
    }
    let joint = selection_mle_joint(&sample, 1e-9, 500).unwrap();
    let sigma = match joint.sigma.value() {
        Some(v) => format!("{} {v:.4}", joint.sigma.kind()),
        None => joint.sigma.kind().to_string(),
    };
    within_budget(
        start,
        Duration::from_secs(10),
        format!(
            "alpha = {:.4?}; selection fit sigma: {sigma} (log-likelihood gain over sigma=0: {:.3})",
            fit.params.as_slice(),
            joint.log_likelihood - fit.log_likelihood
        ),
    )
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_simplex-priors")).args(args).env("NO_COLOR", "1").output().unwrap()
}

fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |f: &str| dir.path().join(f).to_string_lossy().into_owned();
    let freq = fixture("frequencies.csv").to_string_lossy().into_owned();
    let counts = fixture("counts.csv").to_string_lossy().into_owned();
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("fit", vec!["fit".into(), "--input".into(), freq.clone(), "--model".into(), "dirichlet".into()]),
        ("fit selection", vec!["fit".into(), "--input".into(), freq.clone(), "--model".into(), "selection".into()]),
        ("posterior", vec!["posterior".into(), "--input".into(), counts.clone(), "--alpha".into(), "1,1".into()]),
        ("eb", vec!["eb".into(), "--input".into(), counts.clone(), "--sigma".into(), "-1".into()]),
        (
            "curve",
            vec!["curve".into(), "--input".into(), freq.clone(), "--grid".into(), "-1:5:0.5".into()],
        ),
    ];
    for (name, args) in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = cli(&args);
        ensure!(out.status.code() == Some(0), "{name}: exit {:?}, {}", out.status, String::from_utf8_lossy(&out.stderr));
        ensure!(!out.stdout.is_empty(), "{name}: no output");
    }
    let fit: serde_json::Value = serde_json::from_slice(&cli(&["fit", "--input", &freq]).stdout).unwrap();
    ensure!(fit["schema"] == "simplex-priors/1" && fit["n_observations"] == 22, "fit report {fit}");

    let sample = |out: &str| {
        cli(&[
            "sample", "--model", "selection", "--alpha", "2,3,4", "--sigma", "-1", "--seed", "42", "--iterations",
            "3000", "--output", out,
        ])
    };
    let (a, b) = (path("a.csv"), path("b.csv"));
    for p in [&a, &b] {
        let out = sample(p);
        ensure!(out.status.code() == Some(0), "sample: {}", String::from_utf8_lossy(&out.stderr));
    }
    let (da, db) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ensure!(da == db, "sample files differ for the same seed");
    let refit = cli(&["fit", "--input", &a]);
    ensure!(refit.status.code() == Some(0), "draws file does not re-ingest");

    let bad = cli(&["fit", "--input", &fixture("malformed.csv").to_string_lossy()]);
    let err = String::from_utf8_lossy(&bad.stderr);
    ensure!(bad.status.code() == Some(3), "malformed rows: exit {:?}", bad.status.code());
    ensure!(err.contains("row 3") && err.lines().count() == 1, "malformed rows: stderr {err:?}");
    let bad_counts = cli(&["eb", "--input", &fixture("counts_bad.csv").to_string_lossy()]);
    ensure!(
        bad_counts.status.code() == Some(3) && String::from_utf8_lossy(&bad_counts.stderr).contains("row 1"),
        "bad counts: exit {:?}",
        bad_counts.status.code()
    );
    Ok(format!(
        "5 subcommands ran, sample files bit-identical ({} bytes), malformed rows exit 3: {}",
        da.len(),
        err.trim()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("conjugacy", conjugacy),
        ("normalization", normalization),
        ("Beta(2,2) identity", beta22_identity),
        ("sigma=0 reductions", sigma_zero_reductions),
        ("two-point sigma case analysis", case_analysis),
        ("Dirichlet MLE recovery", mle_recovery),
        ("Gibbs vs closed form", gibbs_closed_form),
        ("empirical Bayes boundaries", empirical_bayes),
        ("Dirichlet refit round trip", refit_round_trip),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
