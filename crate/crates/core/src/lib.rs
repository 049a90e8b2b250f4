//! Covariance-based ("unbiased") estimation of linear regression and AR(p)
//! models.
//!
//! The slope vector is obtained by solving `S_xx·b = S_yx` on the sample
//! covariance matrix of the predictors, and the intercept from the sample
//! means. For a nonsingular `S_xx` this coincides with ordinary least
//! squares; the crate computes both routes so the agreement can be
//! checked, along with the residual, dispersion and ANOVA quantities and
//! Monte Carlo bias studies.
//!
//! ```
//! use covreg::{fit_ols, fit_unbiased, Dataset};
//!
//! let d = Dataset::from_rows(&[0.0, 1.0, 4.0, 9.0], &[vec![0.0], vec![1.0], vec![2.0], vec![3.0]])?;
//! let cov = fit_unbiased(&d)?;
//! let ols = fit_ols(&d)?;
//! assert!((cov.b[0] - ols.b[0]).abs() < 1e-12);
//! assert!((cov.b[0] - 3.0).abs() < 1e-12);
//! # Ok::<(), covreg::Error>(())
//! ```

pub mod covariance;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod montecarlo;
pub mod regression;
pub mod rng;
pub mod summation;
pub mod timeseries;

pub use covariance::{
    coefficients_from_covariances, coefficients_p2, summarize, CovarianceCoefficients,
    CovarianceSummary, Dataset,
};
pub use error::{Error, Result};
pub use linalg::{
    invert_partitioned, pseudo_inverse_symmetric, solve_symmetric, spectral_decomposition,
    SpectralDecomposition, SymMatrix,
};
pub use montecarlo::{monte_carlo_bias, BiasReport, EstimateSummary, SimulationScenario};
pub use regression::{
    annihilator_checks, anova, dispersion_estimate, fit_ols, fit_unbiased, predict,
    residual_analysis, AnnihilatorDiagnostics, Anova, Method, Prediction, PredictionForm,
    RegressionFit, Residuals,
};
pub use rng::GaussianStream;
pub use timeseries::{
    autocovariances, fit_ar_ols, fit_ar_unbiased, fit_ar_yule_walker, lagged_design, simulate_ar,
    ArFit, ArMethod, ArModel, AutocovarianceSequence,
};
