//! Command-line front-end for `simplex-priors`: ingestion, fitting,
//! posterior and empirical Bayes reports, sampling and likelihood curves.

pub mod error;
pub mod ingest;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use simplex_priors::{
    dirichlet_mle, eb_estimate, fit_alpha, gibbs_chain, posterior_summary, rejection_sample, selection_log_likelihood,
    selection_mle_fixed_sigma, selection_mle_joint, sigma_mle, sigma_score, summarize, ChainConfig, CountVector,
    DirichletParams, EbOptions, FrequencySample, PolynomialWeight, SigmaEstimate, SimplexPoint,
    WeightedDirichletModel,
};

pub use error::{CliError, CliResult, EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
pub use ingest::{ingest, Dataset, DatasetKind};
use report::{fixed_sigma, EbReport, FitReport, PosteriorReport, SampleReport, TaggedValue, SCHEMA};

const FIT_TOL: f64 = 1e-10;
const FIT_MAX_ITER: usize = 500;

#[derive(Debug, Parser)]
#[command(name = "simplex-priors", version, about = "Conjugate priors on the unit simplex")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum-likelihood fit of a frequency sample.
    Fit(FitArgs),
    /// Posterior mean, covariance and log-normalizer given counts.
    Posterior(PosteriorArgs),
    /// Empirical Bayes estimate from counts.
    Eb(EbArgs),
    /// Draw from a Dirichlet or selection model.
    Sample(SampleArgs),
    /// Selection log-likelihood and score over a σ grid.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Dirichlet,
    Selection,
    Mixture,
}

impl ModelKind {
    fn name(self) -> &'static str {
        match self {
            ModelKind::Dirichlet => "dirichlet",
            ModelKind::Selection => "selection",
            ModelKind::Mixture => "mixture",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Gibbs,
    Rejection,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "dirichlet")]
    pub model: ModelKind,
    /// Comma-separated α.
    #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
    pub alpha: Option<List<f64>>,
    /// Selection parameter, a real ≥ -1 or `inf`.
    #[arg(long, value_parser = parse_sigma, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Comma-separated mixture exponents.
    #[arg(long, value_parser = parse_counts)]
    pub r: Option<List<u64>>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = FIT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = FIT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CountsArgs {
    /// Comma-separated counts.
    #[arg(long, value_parser = parse_counts, conflicts_with = "input")]
    pub counts: Option<List<u64>>,
    /// Counts file holding one line of integers.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PosteriorArgs {
    #[command(flatten)]
    pub data: CountsArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EbArgs {
    #[command(flatten)]
    pub data: CountsArgs,
    #[arg(long, value_parser = parse_sigma, allow_hyphen_values = true, default_value = "0")]
    pub sigma: f64,
    /// Maximize the marginal over every α_i instead of (θ, 1, …, 1).
    #[arg(long)]
    pub full_alpha: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "gibbs")]
    pub method: Method,
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    /// Defaults to a tenth of the iterations.
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draws CSV; the JSON summary goes to stdout.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// α held fixed; defaults to the Dirichlet MLE.
    #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
    pub alpha: Option<List<f64>>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-1:10:0.1")]
    pub grid: Grid,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A comma-separated flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

/// `MIN:MAX:STEP` with `MIN ≥ -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.min + k as f64 * self.step).collect()
    }
}

fn parse_reals(s: &str) -> Result<List<f64>, String> {
    s.split(',')
        .map(|x| {
            let v: f64 = x.trim().parse().map_err(|_| format!("'{x}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{x}' is not finite"))
            }
        })
        .collect::<Result<_, _>>()
        .map(List)
}

fn parse_counts(s: &str) -> Result<List<u64>, String> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("'{x}' is not a nonnegative integer")))
        .collect::<Result<_, _>>()
        .map(List)
}

fn parse_sigma(s: &str) -> Result<f64, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number or 'inf'"))?;
    if !v.is_finite() || v < -1.0 {
        return Err(format!("sigma must be >= -1, got {s}"));
    }
    Ok(v)
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, step] = parts.as_slice() else {
        return Err(format!("grid '{s}' is not MIN:MAX:STEP"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
    let grid = Grid { min: num(min)?, max: num(max)?, step: num(step)? };
    if !(grid.min >= -1.0) || !grid.max.is_finite() || grid.max < grid.min {
        return Err(format!("grid needs -1 <= MIN <= MAX, got {s}"));
    }
    if !(grid.step > 0.0) {
        return Err(format!("grid step must be positive, got {}", grid.step));
    }
    if (grid.max - grid.min) / grid.step > 1e7 {
        return Err("grid has more than 1e7 points".into());
    }
    Ok(grid)
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing primary output to `out` unless `--output` redirects it.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            write!(out, "{}", e.render())?;
            return Ok(());
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            return Err(CliError::usage(first));
        }
    };
    execute(&cli.command, out)
}

pub fn execute(command: &Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Fit(a) => {
            let report = cmd_fit(&ingest(&a.input, DatasetKind::Frequencies)?, &a.model, a.tol, a.max_iter)?;
            emit_json(&report, a.output.as_deref(), out)
        }
        Command::Posterior(a) => {
            let report = cmd_posterior(&load_counts(&a.data)?, &a.model)?;
            emit_json(&report, a.output.as_deref(), out)
        }
        Command::Eb(a) => {
            let report = cmd_eb(&load_counts(&a.data)?, a.sigma, a.full_alpha)?;
            emit_json(&report, a.output.as_deref(), out)
        }
        Command::Sample(a) => {
            let (draws, mut report) = cmd_sample(a)?;
            std::fs::write(&a.output, draws)?;
            report.draws_path = Some(a.output.display().to_string());
            emit_json(&report, None, out)
        }
        Command::Curve(a) => {
            let csv = cmd_curve(&ingest(&a.input, DatasetKind::Frequencies)?, a.alpha.as_ref().map(|l| l.0.as_slice()), a.grid)?;
            emit_text(&csv, a.output.as_deref(), out)
        }
    }
}

fn emit_text(text: &str, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: serde::Serialize>(value: &T, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    emit_text(&text, path, out)
}

fn load_counts(args: &CountsArgs) -> CliResult<CountVector> {
    match (&args.counts, &args.input) {
        (Some(List(c)), _) => {
            if c.len() < 2 {
                return Err(CliError::usage("--counts needs at least 2 entries"));
            }
            Ok(CountVector::new(c.clone()))
        }
        (None, Some(path)) => Ok(ingest(path, DatasetKind::Counts)?.counts.expect("counts dataset")),
        (None, None) => Err(CliError::usage("one of --counts or --input is required")),
    }
}

fn require_alpha(model: &ModelArgs, m: Option<usize>) -> CliResult<DirichletParams> {
    let alpha = model.alpha.clone().map(|l| l.0).ok_or_else(|| CliError::usage("--alpha is required"))?;
    if let Some(m) = m {
        if alpha.len() != m {
            return Err(CliError::usage(format!("--alpha has {} entries, data has {m} categories", alpha.len())));
        }
    }
    DirichletParams::new(alpha).map_err(|e| CliError::usage(e.to_string()))
}

fn check_r(r: &[u64], m: usize) -> CliResult<()> {
    if r.len() != m {
        return Err(CliError::usage(format!("--r has {} entries, data has {m} categories", r.len())));
    }
    Ok(())
}

/// The weight described by `--model`, `--sigma` and `--r` for a finite model.
fn fixed_weight(model: &ModelArgs, m: usize) -> CliResult<PolynomialWeight> {
    let weight = match model.model {
        ModelKind::Dirichlet => PolynomialWeight::constant(m),
        ModelKind::Selection => {
            let sigma = model.sigma.ok_or_else(|| CliError::usage("--sigma is required for the selection model"))?;
            if sigma.is_infinite() {
                return Err(CliError::usage("sigma = inf is only accepted by fit"));
            }
            PolynomialWeight::selection(m, sigma)
        }
        ModelKind::Mixture => {
            let r = model.r.as_ref().map(|l| &l.0).ok_or_else(|| CliError::usage("--r is required for the mixture model"))?;
            check_r(r, m)?;
            PolynomialWeight::monomial_sum(r)
        }
    };
    weight.map_err(|e| CliError::usage(e.to_string()))
}

fn model_sigma_tag(model: &ModelArgs) -> Option<TaggedValue> {
    match model.model {
        ModelKind::Selection => model.sigma.map(fixed_sigma),
        _ => None,
    }
}

fn model_r(model: &ModelArgs) -> Option<Vec<u64>> {
    match model.model {
        ModelKind::Mixture => model.r.clone().map(|l| l.0),
        _ => None,
    }
}

fn alpha_diagnostics(d: &mut BTreeMap<String, f64>, gradient_norm: f64, iterations: usize, clamped: bool) {
    d.insert("gradient_norm".into(), gradient_norm);
    d.insert("iterations".into(), iterations as f64);
    d.insert("alpha_clamped".into(), if clamped { 1.0 } else { 0.0 });
}

fn frequencies(dataset: &Dataset) -> CliResult<&FrequencySample> {
    dataset
        .frequencies
        .as_ref()
        .ok_or_else(|| CliError::usage("this command needs a frequency dataset"))
}

/// Fits the requested model. For the selection model `--alpha` holds α fixed
/// and fits σ alone, `--sigma` holds σ fixed and fits α, and omitting both
/// fits jointly.
pub fn cmd_fit(dataset: &Dataset, model: &ModelArgs, tol: f64, max_iter: usize) -> CliResult<FitReport> {
    let sample = frequencies(dataset)?;
    let m = sample.dim();
    if sample.len() < 2 {
        return Err(CliError::data("fitting needs at least 2 observations"));
    }
    let mut diagnostics = BTreeMap::new();
    let mut report = FitReport {
        schema: SCHEMA,
        model_kind: model.model.name().into(),
        alpha: Vec::new(),
        sigma: None,
        r: None,
        log_likelihood: f64::NAN,
        n_observations: sample.len(),
        diagnostics: BTreeMap::new(),
        degenerate: false,
    };
    match model.model {
        ModelKind::Dirichlet => {
            let fit = dirichlet_mle(sample, tol, max_iter)?;
            alpha_diagnostics(&mut diagnostics, fit.gradient_norm, fit.iterations, fit.clamped);
            report.alpha = fit.params.into_vec();
            report.log_likelihood = fit.log_likelihood;
            report.degenerate = fit.clamped;
        }
        ModelKind::Mixture => {
            let r = model.r.as_ref().map(|l| &l.0).ok_or_else(|| CliError::usage("--r is required for the mixture model"))?;
            check_r(r, m)?;
            let weight = PolynomialWeight::monomial_sum(r).map_err(|e| CliError::usage(e.to_string()))?;
            let fit = fit_alpha(sample, &weight, None, tol, max_iter)?;
            alpha_diagnostics(&mut diagnostics, fit.gradient_norm, fit.iterations, fit.clamped);
            report.alpha = fit.params.into_vec();
            report.log_likelihood = fit.log_likelihood;
            report.degenerate = fit.clamped;
            report.r = Some(r.clone());
        }
        ModelKind::Selection => {
            let (params, sigma, ll) = match (&model.alpha, model.sigma) {
                (Some(_), Some(_)) => {
                    return Err(CliError::usage("fit takes at most one of --alpha and --sigma"));
                }
                (Some(_), None) => {
                    let params = require_alpha(model, Some(m))?;
                    let sigma = sigma_mle(sample, &params)?;
                    let ll = selection_log_likelihood(sample, &params, sigma.value().unwrap_or(f64::INFINITY))?;
                    (params, sigma, ll)
                }
                (None, Some(s)) => {
                    let est = if s.is_infinite() {
                        SigmaEstimate::PlusInfinity
                    } else if s == -1.0 {
                        SigmaEstimate::LowerBoundary
                    } else {
                        SigmaEstimate::Interior(s)
                    };
                    let fit = selection_mle_fixed_sigma(sample, est, tol, max_iter)?;
                    alpha_diagnostics(&mut diagnostics, fit.gradient_norm, fit.iterations, fit.clamped);
                    report.degenerate = fit.clamped;
                    (fit.params, est, fit.log_likelihood)
                }
                (None, None) => {
                    let fit = selection_mle_joint(sample, tol, max_iter)?;
                    diagnostics.insert("gradient_norm".into(), fit.gradient_norm);
                    diagnostics.insert("iterations".into(), fit.iterations as f64);
                    (fit.params, fit.sigma, fit.log_likelihood)
                }
            };
            if let Some(s) = sigma.value() {
                diagnostics.insert("sigma_score".into(), sigma_score(sample, &params, s)?);
            }
            let limit = sigma == SigmaEstimate::PlusInfinity;
            diagnostics.insert("log_likelihood_is_limit".into(), if limit { 1.0 } else { 0.0 });
            report.degenerate |= limit;
            report.alpha = params.into_vec();
            report.sigma = Some(if model.sigma.is_some() && !limit {
                fixed_sigma(sigma.value().unwrap_or(f64::INFINITY))
            } else {
                sigma.into()
            });
            report.log_likelihood = ll;
        }
    }
    report.diagnostics = diagnostics;
    Ok(report)
}

pub fn cmd_posterior(counts: &CountVector, model: &ModelArgs) -> CliResult<PosteriorReport> {
    let m = counts.dim();
    let params = require_alpha(model, Some(m))?;
    let weight = fixed_weight(model, m)?;
    let prior = WeightedDirichletModel::new(params.clone(), weight)?;
    let summary = posterior_summary(&prior, counts)?;
    Ok(PosteriorReport {
        schema: SCHEMA,
        model_kind: model.model.name().into(),
        posterior_alpha: params.add_counts(counts)?.into_vec(),
        alpha: params.into_vec(),
        sigma: model_sigma_tag(model),
        r: model_r(model),
        counts: counts.as_slice().to_vec(),
        mean: summary.mean,
        covariance: summary.covariance,
        log_normalizer: summary.log_normalizer,
    })
}

pub fn cmd_eb(counts: &CountVector, sigma: f64, full_alpha: bool) -> CliResult<EbReport> {
    if sigma.is_infinite() {
        return Err(CliError::usage("sigma = inf is only accepted by fit"));
    }
    let e = eb_estimate(counts, sigma, EbOptions { full_alpha })?;
    Ok(EbReport {
        schema: SCHEMA,
        counts: counts.as_slice().to_vec(),
        sigma,
        full_alpha,
        theta: e.fit.map(|f| f.theta_hat.into()),
        alpha: e.alpha,
        log_marginal: e.log_marginal,
        estimate: e.estimate,
        degenerate: e.degenerate,
    })
}

/// One draw per line, 17 significant digits.
pub fn draws_csv(draws: &[SimplexPoint], m: usize) -> String {
    let mut s = (1..=m).map(|i| format!("p{i}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for d in draws {
        let row: Vec<String> = d.as_slice().iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Returns the draws CSV and the summary; Gibbs and rejection both produce
/// `(iterations - burn_in) / thin` draws.
pub fn cmd_sample(args: &SampleArgs) -> CliResult<(String, SampleReport)> {
    let model = &args.model;
    let params = require_alpha(model, None)?;
    let m = params.dim();
    if model.model == ModelKind::Mixture {
        return Err(CliError::usage("sampling supports the dirichlet and selection models"));
    }
    let sigma = match model.model {
        ModelKind::Selection => {
            let s = model.sigma.ok_or_else(|| CliError::usage("--sigma is required for the selection model"))?;
            if s.is_infinite() {
                return Err(CliError::usage("sigma = inf is only accepted by fit"));
            }
            s
        }
        _ => 0.0,
    };
    let config = ChainConfig {
        iterations: args.iterations,
        burn_in: args.burn_in.unwrap_or(args.iterations / 10),
        seed: args.seed,
        thin: args.thin,
        stream: 0,
    };
    config.validate()?;
    let prior = WeightedDirichletModel::selection(params.clone(), sigma)?;
    let mut report = SampleReport {
        schema: SCHEMA,
        model_kind: model.model.name().into(),
        method: match args.method {
            Method::Gibbs => "gibbs".into(),
            Method::Rejection => "rejection".into(),
        },
        alpha: params.into_vec(),
        sigma: fixed_sigma(sigma),
        seed: args.seed,
        iterations: config.iterations,
        burn_in: config.burn_in,
        thin: config.thin,
        retained: 0,
        mean: Vec::new(),
        variance: Vec::new(),
        lag1_autocorrelation: Vec::new(),
        mc_standard_error: Vec::new(),
        degenerate_restarts: None,
        acceptance_rate: None,
        proposals: None,
        draws_path: None,
    };
    let draws = match args.method {
        Method::Gibbs => {
            let out = gibbs_chain(&prior, &config)?;
            report.fill_summary(&out.summary);
            report.degenerate_restarts = Some(out.degenerate_restarts);
            out.draws
        }
        Method::Rejection => {
            let out = rejection_sample(&prior, config.retained(), args.seed)?;
            report.fill_summary(&summarize(&out.draws)?);
            report.acceptance_rate = Some(out.acceptance_rate);
            report.proposals = Some(out.proposals);
            out.draws
        }
    };
    Ok((draws_csv(&draws, m), report))
}

/// CSV of `sigma,log_likelihood,score` over the grid, closed by an `inf` row
/// holding the limiting log-likelihood (the score tends to 0).
pub fn cmd_curve(dataset: &Dataset, alpha: Option<&[f64]>, grid: Grid) -> CliResult<String> {
    let sample = frequencies(dataset)?;
    let m = sample.dim();
    let params = match alpha {
        Some(a) => {
            if a.len() != m {
                return Err(CliError::usage(format!("--alpha has {} entries, data has {m} categories", a.len())));
            }
            DirichletParams::new(a.to_vec()).map_err(|e| CliError::usage(e.to_string()))?
        }
        None => dirichlet_mle(sample, FIT_TOL, FIT_MAX_ITER)?.params,
    };
    let mut s = String::from("sigma,log_likelihood,score\n");
    for sigma in grid.points() {
        let ll = selection_log_likelihood(sample, &params, sigma)?;
        let score = sigma_score(sample, &params, sigma)?;
        writeln!(s, "{sigma},{ll},{score}").expect("write to string");
    }
    let limit = selection_log_likelihood(sample, &params, f64::INFINITY)?;
    writeln!(s, "inf,{limit},0").expect("write to string");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_include_both_ends() {
        let g = parse_grid("-1:5:0.1").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 61);
        assert!((pts[60] - 5.0).abs() < 1e-12);
        assert!(parse_grid("-1.5:2:0.1").is_err());
        assert!(parse_grid("0:2:0").is_err());
        assert!(parse_grid("0:2").is_err());
    }

    #[test]
    fn sigma_flag() {
        assert_eq!(parse_sigma("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_sigma("-1").unwrap(), -1.0);
        assert!(parse_sigma("-1.01").is_err());
        assert!(parse_sigma("nan").is_err());
    }

    #[test]
    fn draws_use_seventeen_digits() {
        let p = SimplexPoint::new(vec![0.1, 0.9]).unwrap();
        let csv = draws_csv(&[p], 2);
        assert_eq!(csv, "p1,p2\n1.0000000000000001e-1,9.0000000000000002e-1\n");
    }

    #[test]
    fn run_writes_help_to_stdout() {
        let mut out = Vec::new();
        run(["simplex-priors", "--help"], &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().contains("curve"));
        let err = run(["simplex-priors", "eb"], &mut Vec::new()).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
    }
}
