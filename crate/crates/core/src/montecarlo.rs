//! Monte Carlo bias studies for the covariance-route estimators.
//!
//! Replication `i` draws all of its randomness from
//! `GaussianStream::new(seed, i)`, and the per-replication estimates are
//! reduced in replication order, so a report depends only on
//! `(scenario, reps, seed)` and not on how many threads evaluated it.

use ndarray::Array2;
use rayon::prelude::*;

use crate::covariance::Dataset;
use crate::error::{Error, Result};
use crate::regression::fit_unbiased;
use crate::rng::GaussianStream;
use crate::summation::compensated_sum;
use crate::timeseries::{fit_ar_unbiased, min_series_len, simulate_ar_with, ArModel, ArSimulation};

pub const MIN_REPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum SimulationScenario {
    /// `Y = b₀ + X·b + ε` with independent `X_i ~ N(mean_i, sd_i²)` and
    /// `ε ~ N(0, noise_sd²)`. Each row draws its predictors in order, then
    /// the noise.
    Additive {
        intercept: f64,
        slopes: Vec<f64>,
        predictor_means: Vec<f64>,
        predictor_sds: Vec<f64>,
        noise_sd: f64,
        n: usize,
    },
    /// `Y = b₁X₁ + b₂X₂ + b₃|X₁ − X₂|·Z` with `X₁, X₂, Z` independent
    /// standard normals (drawn in that order per row). The conditional mean
    /// is linear but the error is not independent of the predictors.
    Heteroscedastic { b1: f64, b2: f64, b3: f64, n: usize },
    /// AR(p) series of length `n` fitted at the true order.
    Autoregressive {
        model: ArModel,
        n: usize,
        burn_in: usize,
    },
}

impl SimulationScenario {
    pub fn label(&self) -> &'static str {
        match self {
            SimulationScenario::Additive { .. } => "additive",
            SimulationScenario::Heteroscedastic { .. } => "heteroscedastic",
            SimulationScenario::Autoregressive { .. } => "autoregressive",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidScenario(msg));
        match self {
            SimulationScenario::Additive {
                intercept,
                slopes,
                predictor_means,
                predictor_sds,
                noise_sd,
                n,
            } => {
                let p = slopes.len();
                if p == 0 {
                    return invalid("at least one slope is required".into());
                }
                if predictor_means.len() != p || predictor_sds.len() != p {
                    return invalid(format!(
                        "{p} slopes but {} predictor means and {} predictor sds",
                        predictor_means.len(),
                        predictor_sds.len()
                    ));
                }
                let all = std::iter::once(intercept)
                    .chain(slopes)
                    .chain(predictor_means)
                    .chain(predictor_sds)
                    .chain(std::iter::once(noise_sd));
                if all.clone().any(|v| !v.is_finite()) {
                    return invalid("parameters must be finite".into());
                }
                if predictor_sds.iter().any(|s| *s < 0.0) || *noise_sd < 0.0 {
                    return invalid("standard deviations must be non-negative".into());
                }
                if *n < p + 2 {
                    return invalid(format!(
                        "n = {n} leaves no residual degrees of freedom for p = {p}"
                    ));
                }
            }
            SimulationScenario::Heteroscedastic { b1, b2, b3, n } => {
                if [b1, b2, b3].iter().any(|v| !v.is_finite()) {
                    return invalid("parameters must be finite".into());
                }
                if *n < 4 {
                    return invalid(format!("n = {n} is below the minimum of 4"));
                }
            }
            SimulationScenario::Autoregressive { model, n, .. } => {
                if !model.is_stationary() {
                    return invalid("AR model is not stationary".into());
                }
                let needed = min_series_len(model.p());
                if *n < needed {
                    return invalid(format!(
                        "n = {n} is below the minimum of {needed} for p = {}",
                        model.p()
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn parameter_names(&self) -> Vec<String> {
        let (prefix, p) = match self {
            SimulationScenario::Additive { slopes, .. } => ("b", slopes.len()),
            SimulationScenario::Heteroscedastic { .. } => ("b", 2),
            SimulationScenario::Autoregressive { model, .. } => ("phi", model.p()),
        };
        (0..=p).map(|i| format!("{prefix}{i}")).collect()
    }

    /// `(b₀, b₁, …, b_p)`.
    pub fn truth(&self) -> Vec<f64> {
        match self {
            SimulationScenario::Additive {
                intercept, slopes, ..
            } => std::iter::once(*intercept)
                .chain(slopes.iter().copied())
                .collect(),
            SimulationScenario::Heteroscedastic { b1, b2, .. } => vec![0.0, *b1, *b2],
            SimulationScenario::Autoregressive { model, .. } => std::iter::once(model.phi0)
                .chain(model.phi.iter().copied())
                .collect(),
        }
    }

    /// Target of `σ̂²`: the error variance, averaged over the predictor
    /// distribution when it depends on the predictors
    /// (`E[b₃²(X₁ − X₂)²] = 2b₃²`).
    pub fn true_sigma2(&self) -> Option<f64> {
        match self {
            SimulationScenario::Additive { noise_sd, .. } => Some(noise_sd * noise_sd),
            SimulationScenario::Heteroscedastic { b3, .. } => Some(2.0 * b3 * b3),
            SimulationScenario::Autoregressive { model, .. } => Some(model.sigma * model.sigma),
        }
    }

    fn draw_dataset(&self, stream: &mut GaussianStream) -> Result<Dataset> {
        match self {
            SimulationScenario::Additive {
                intercept,
                slopes,
                predictor_means,
                predictor_sds,
                noise_sd,
                n,
            } => {
                let p = slopes.len();
                let mut x = Array2::zeros((*n, p));
                let mut y = Vec::with_capacity(*n);
                for j in 0..*n {
                    let mut mean = *intercept;
                    for i in 0..p {
                        let v = stream.next_normal(predictor_means[i], predictor_sds[i]);
                        x[[j, i]] = v;
                        mean += slopes[i] * v;
                    }
                    y.push(mean + noise_sd * stream.next_standard_normal());
                }
                Dataset::new(y.into(), x)
            }
            SimulationScenario::Heteroscedastic { b1, b2, b3, n } => {
                let mut x = Array2::zeros((*n, 2));
                let mut y = Vec::with_capacity(*n);
                for j in 0..*n {
                    let x1 = stream.next_standard_normal();
                    let x2 = stream.next_standard_normal();
                    let z = stream.next_standard_normal();
                    x[[j, 0]] = x1;
                    x[[j, 1]] = x2;
                    y.push(b1 * x1 + b2 * x2 + b3 * (x1 - x2).abs() * z);
                }
                Dataset::new(y.into(), x)
            }
            SimulationScenario::Autoregressive { .. } => unreachable!("AR scenarios fit a series"),
        }
    }

    /// One replication: `(coefficients, σ̂²)`.
    fn replicate(&self, stream: &mut GaussianStream) -> Result<Replicate> {
        match self {
            SimulationScenario::Autoregressive { model, n, burn_in } => {
                let opts = ArSimulation {
                    burn_in: *burn_in,
                    allow_nonstationary: false,
                };
                let series = simulate_ar_with(model, *n, &opts, stream)?;
                let fit = fit_ar_unbiased(&series, model.p())?;
                Ok(Replicate {
                    coefficients: std::iter::once(fit.model.phi0)
                        .chain(fit.model.phi.iter().copied())
                        .collect(),
                    sigma2_hat: fit.model.sigma * fit.model.sigma,
                })
            }
            _ => {
                let fit = fit_unbiased(&self.draw_dataset(stream)?)?;
                Ok(Replicate {
                    coefficients: fit.coefficients().to_vec(),
                    sigma2_hat: fit.sigma2_hat,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub coefficients: Vec<f64>,
    pub sigma2_hat: f64,
}

/// Runs `reps` independent replications, in parallel, returned in
/// replication order.
pub fn run_replications(
    scenario: &SimulationScenario,
    reps: usize,
    seed: u64,
) -> Result<Vec<Replicate>> {
    scenario.validate()?;
    (0..reps)
        .into_par_iter()
        .map(|i| scenario.replicate(&mut GaussianStream::new(seed, i as u64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSummary {
    pub name: String,
    pub truth: f64,
    pub mean: f64,
    /// Monte Carlo standard error of `mean`.
    pub std_error: f64,
    /// `|mean − truth| / std_error`.
    pub z_score: f64,
}

impl EstimateSummary {
    pub fn from_draws(name: impl Into<String>, truth: f64, draws: &[f64]) -> Self {
        let reps = draws.len() as f64;
        let mean = compensated_sum(draws.iter().copied()) / reps;
        let var = compensated_sum(draws.iter().map(|v| (v - mean) * (v - mean))) / (reps - 1.0);
        let std_error = (var / reps).sqrt();
        let gap = (mean - truth).abs();
        let z_score = if std_error > 0.0 {
            gap / std_error
        } else if gap <= 1e-12 * truth.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        };
        EstimateSummary {
            name: name.into(),
            truth,
            mean,
            std_error,
            z_score,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasReport {
    pub scenario: &'static str,
    pub reps: usize,
    pub seed: u64,
    pub coefficients: Vec<EstimateSummary>,
    /// Present when the scenario defines a target for `σ̂²`.
    pub sigma2: Option<EstimateSummary>,
    pub mean_sigma2_hat: f64,
}

impl BiasReport {
    pub fn max_coefficient_z(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.z_score)
            .fold(0.0, f64::max)
    }
}

/// Mean estimate, Monte Carlo standard error and z-score for every
/// coefficient (and for `σ̂²` when the scenario defines a true variance).
pub fn monte_carlo_bias(
    scenario: &SimulationScenario,
    reps: usize,
    seed: u64,
) -> Result<BiasReport> {
    if reps < MIN_REPS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_REPS} replications are required, got {reps}"
        )));
    }
    let draws = run_replications(scenario, reps, seed)?;
    let truth = scenario.truth();
    let coefficients = scenario
        .parameter_names()
        .into_iter()
        .enumerate()
        .map(|(k, name)| {
            let column: Vec<f64> = draws.iter().map(|r| r.coefficients[k]).collect();
            EstimateSummary::from_draws(name, truth[k], &column)
        })
        .collect();
    let sigma2_draws: Vec<f64> = draws.iter().map(|r| r.sigma2_hat).collect();
    let mean_sigma2_hat = compensated_sum(sigma2_draws.iter().copied()) / reps as f64;
    let sigma2 = scenario
        .true_sigma2()
        .map(|s2| EstimateSummary::from_draws("sigma2", s2, &sigma2_draws));
    Ok(BiasReport {
        scenario: scenario.label(),
        reps,
        seed,
        coefficients,
        sigma2,
        mean_sigma2_hat,
    })
}
