//! AR(p) estimation by the windowed-covariance route, by least squares on
//! the lagged design and by Yule–Walker, plus seeded AR simulation.

use std::fmt;

use ndarray::{Array1, Array2};

use crate::covariance::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{solve_symmetric, SymMatrix};
use crate::regression::{fit_ols, fit_unbiased, RegressionFit};
use crate::rng::GaussianStream;
use crate::summation::{compensated_mean, compensated_sum};

/// Default number of simulated values discarded before the retained series.
pub const DEFAULT_BURN_IN: usize = 500;

/// `Y_t = φ₀ + φ₁Y_{t−1} + … + φ_pY_{t−p} + ε_t`, `Var(ε_t) = σ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    pub phi0: f64,
    /// `phi[i]` multiplies lag `i + 1`.
    pub phi: Vec<f64>,
    pub sigma: f64,
}

impl ArModel {
    pub fn new(phi0: f64, phi: Vec<f64>, sigma: f64) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::InvalidArgument("AR order must be at least 1".into()));
        }
        if !phi0.is_finite() || phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "AR coefficients must be finite".into(),
            ));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "innovation standard deviation must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(ArModel { phi0, phi, sigma })
    }

    pub fn p(&self) -> usize {
        self.phi.len()
    }

    /// True when every root of `1 − φ₁z − … − φ_pz^p` lies outside the unit
    /// circle, checked through the reflection coefficients of the
    /// step-down recursion.
    pub fn is_stationary(&self) -> bool {
        let mut a = self.phi.clone();
        while let Some(&k) = a.last() {
            if !(k.abs() < 1.0) {
                return false;
            }
            let m = a.len();
            let denom = 1.0 - k * k;
            a = (0..m - 1)
                .map(|j| (a[j] + k * a[m - 2 - j]) / denom)
                .collect();
        }
        true
    }

    /// Process mean `φ₀ / (1 − Σφ)`, when defined.
    pub fn mean(&self) -> Option<f64> {
        let denom = 1.0 - self.phi.iter().sum::<f64>();
        (denom != 0.0).then(|| self.phi0 / denom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArMethod {
    Unbiased,
    LeastSquares,
    YuleWalker,
}

impl ArMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ArMethod::Unbiased => "unbiased",
            ArMethod::LeastSquares => "least_squares",
            ArMethod::YuleWalker => "yule_walker",
        }
    }
}

impl fmt::Display for ArMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    /// Fitted coefficients; `sigma` is the residual standard deviation.
    pub model: ArModel,
    pub method: ArMethod,
    /// Rows of the lagged design (`n − p`), or `n` for Yule–Walker.
    pub n_effective: usize,
    pub used_pseudo_inverse: bool,
}

/// Regression form of an AR(p) series: the response is `(Y_{p+1}, …, Y_n)`
/// and column `i` holds lag `i + 1`, so row `j` is
/// `(Y_{p+j−1}, Y_{p+j−2}, …, Y_j)` in one-based time.
pub fn lagged_design(series: &[f64], p: usize) -> Result<Dataset> {
    if p == 0 {
        return Err(Error::InvalidArgument("AR order must be at least 1".into()));
    }
    let n = series.len();
    if n < p + 2 {
        return Err(Error::TooFewObservations {
            needed: p + 2,
            found: n,
        });
    }
    let rows = n - p;
    let y = Array1::from_iter(series[p..].iter().copied());
    let x = Array2::from_shape_fn((rows, p), |(j, i)| series[p + j - 1 - i]);
    Dataset::new(y, x)
}

/// Smallest series length accepted by the regression-based AR fits: the
/// lagged design must keep at least one residual degree of freedom.
pub fn min_series_len(p: usize) -> usize {
    (p + 3).max(2 * p + 2)
}

fn require_regression_len(series: &[f64], p: usize) -> Result<()> {
    let needed = min_series_len(p);
    if series.len() < needed {
        return Err(Error::TooFewObservations {
            needed,
            found: series.len(),
        });
    }
    Ok(())
}

fn from_regression(fit: RegressionFit, method: ArMethod) -> Result<ArFit> {
    Ok(ArFit {
        model: ArModel::new(fit.b0, fit.b.to_vec(), fit.sigma2_hat.sqrt())?,
        method,
        n_effective: fit.n,
        used_pseudo_inverse: fit.used_pseudo_inverse,
    })
}

/// Windowed-covariance estimator: `S_xx·φ̂ = S_yx` on the lagged design,
/// with the intercept recovered from the window means.
pub fn fit_ar_unbiased(series: &[f64], p: usize) -> Result<ArFit> {
    require_regression_len(series, p)?;
    let design = lagged_design(series, p)?;
    from_regression(fit_unbiased(&design)?, ArMethod::Unbiased)
}

/// Least squares on the lagged design.
pub fn fit_ar_ols(series: &[f64], p: usize) -> Result<ArFit> {
    require_regression_len(series, p)?;
    let design = lagged_design(series, p)?;
    from_regression(fit_ols(&design)?, ArMethod::LeastSquares)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutocovarianceSequence {
    pub mean: f64,
    pub gamma: Vec<f64>,
    pub rho: Vec<f64>,
}

/// `γ(k) = (1/n)·Σ_{t=1}^{n−k}(Y_t − Ȳ)(Y_{t+k} − Ȳ)` for `k = 0..=max_lag`,
/// centred on the overall mean, and `ρ(k) = γ(k)/γ(0)`.
pub fn autocovariances(series: &[f64], max_lag: usize) -> Result<AutocovarianceSequence> {
    let n = series.len();
    if max_lag >= n {
        return Err(Error::TooFewObservations {
            needed: max_lag + 1,
            found: n,
        });
    }
    let constant = series.windows(2).all(|w| w[0] == w[1]);
    let mean = compensated_mean(series.iter().copied());
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let gamma: Vec<f64> = (0..=max_lag)
        .map(|k| {
            compensated_sum(
                centered[..n - k]
                    .iter()
                    .zip(&centered[k..])
                    .map(|(a, b)| a * b),
            ) / n as f64
        })
        .collect();
    if constant || !(gamma[0] > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let rho = gamma.iter().map(|g| g / gamma[0]).collect();
    Ok(AutocovarianceSequence { mean, gamma, rho })
}

/// Solves the Yule–Walker system `R·φ = (ρ(1), …, ρ(p))` with
/// `R[i][j] = ρ(|i − j|)`. `rho` must hold at least `ρ(0..=p)`.
pub fn yule_walker_solve(rho: &[f64], p: usize) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::InvalidArgument("AR order must be at least 1".into()));
    }
    if rho.len() < p + 1 {
        return Err(Error::DimensionMismatch {
            expected: p + 1,
            found: rho.len(),
        });
    }
    let r = SymMatrix::from_fn(p, |i, j| rho[i - j]);
    let rhs = Array1::from_iter(rho[1..=p].iter().copied());
    Ok(solve_symmetric(&r, &rhs)?.to_vec())
}

/// Yule–Walker estimate with intercept `φ₀ = Ȳ·(1 − Σφ)` and innovation
/// variance `γ(0)·(1 − Σφᵢρ(i))`.
pub fn fit_ar_yule_walker(series: &[f64], p: usize) -> Result<ArFit> {
    if p == 0 {
        return Err(Error::InvalidArgument("AR order must be at least 1".into()));
    }
    if series.len() < p + 2 {
        return Err(Error::TooFewObservations {
            needed: p + 2,
            found: series.len(),
        });
    }
    let acov = autocovariances(series, p)?;
    let phi = yule_walker_solve(&acov.rho, p)?;
    let phi0 = acov.mean * (1.0 - compensated_sum(phi.iter().copied()));
    let explained = compensated_sum(phi.iter().zip(&acov.rho[1..]).map(|(f, r)| f * r));
    let sigma2 = (acov.gamma[0] * (1.0 - explained)).max(0.0);
    Ok(ArFit {
        model: ArModel::new(phi0, phi, sigma2.sqrt())?,
        method: ArMethod::YuleWalker,
        n_effective: series.len(),
        used_pseudo_inverse: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArSimulation {
    pub burn_in: usize,
    /// Permit non-stationary models; their pre-sample values start at zero.
    pub allow_nonstationary: bool,
}

impl Default for ArSimulation {
    fn default() -> Self {
        ArSimulation {
            burn_in: DEFAULT_BURN_IN,
            allow_nonstationary: false,
        }
    }
}

/// Simulates `n` values of `model` after discarding `burn_in` values,
/// drawing innovations from stream 0 of [`GaussianStream`] keyed by `seed`.
pub fn simulate_ar(model: &ArModel, n: usize, burn_in: usize, seed: u64) -> Result<Vec<f64>> {
    let opts = ArSimulation {
        burn_in,
        ..ArSimulation::default()
    };
    simulate_ar_with(model, n, &opts, &mut GaussianStream::new(seed, 0))
}

/// Simulation on a caller-supplied stream. Pre-sample values start at the
/// process mean (zero for non-stationary models), then one innovation is
/// drawn per generated value, burn-in included.
pub fn simulate_ar_with(
    model: &ArModel,
    n: usize,
    opts: &ArSimulation,
    stream: &mut GaussianStream,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "series length must be at least 1".into(),
        ));
    }
    let stationary = model.is_stationary();
    if !stationary && !opts.allow_nonstationary {
        return Err(Error::NonStationaryModel);
    }
    let p = model.p();
    let start = if stationary {
        model.mean().unwrap_or(0.0)
    } else {
        0.0
    };
    let total = opts.burn_in + n;
    let mut values = vec![start; p + total];
    for t in p..p + total {
        let mut v = model.phi0;
        for (i, phi) in model.phi.iter().enumerate() {
            v += phi * values[t - 1 - i];
        }
        values[t] = v + model.sigma * stream.next_standard_normal();
    }
    values.drain(..p + opts.burn_in);
    Ok(values)
}
