//! Linear regression by the covariance route (`b̂ = S_xx⁻¹·S_yx`) and by
//! ordinary least squares on `X₁ = [1 | X]`, together with the residual,
//! dispersion and ANOVA quantities both fits share.

use std::fmt;

use ndarray::{Array1, Array2, ArrayView1};

use crate::covariance::{coefficients_from_covariances, summarize, CovarianceSummary, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{
    inverse_symmetric, invert_partitioned, pseudo_inverse_symmetric, solve_symmetric,
    HouseholderQr, SymMatrix, PINV_TOL,
};
use crate::summation::{compensated_mean, compensated_sum};

/// Largest sample for which [`annihilator_checks`] materializes `M`.
pub const MAX_ANNIHILATOR_N: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Unbiased,
    Ols,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Unbiased => "unbiased",
            Method::Ols => "ols",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sums of squares about the response mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anova {
    pub ss_t: f64,
    pub ss_r: f64,
    pub ss_e: f64,
    /// `ss_r / ss_t`, or 0 for a constant response.
    pub r0_squared: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub fitted: Array1<f64>,
    pub residuals: Array1<f64>,
    pub ss_e: f64,
    pub sigma2_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub method: Method,
    pub n: usize,
    pub p: usize,
    pub b0: f64,
    pub b: Array1<f64>,
    pub fitted: Array1<f64>,
    pub residuals: Array1<f64>,
    pub sigma2_hat: f64,
    /// Estimated covariance matrix of `(b̂₀, b̂)`.
    pub dispersion: SymMatrix,
    pub anova: Anova,
    pub used_pseudo_inverse: bool,
}

impl RegressionFit {
    /// `(b̂₀, b̂₁, …, b̂_p)`.
    pub fn coefficients(&self) -> Array1<f64> {
        std::iter::once(self.b0)
            .chain(self.b.iter().copied())
            .collect()
    }

    pub fn ss_t(&self) -> f64 {
        self.anova.ss_t
    }

    pub fn ss_r(&self) -> f64 {
        self.anova.ss_r
    }

    pub fn ss_e(&self) -> f64 {
        self.anova.ss_e
    }

    pub fn r0_squared(&self) -> f64 {
        self.anova.r0_squared
    }
}

fn require_residual_dof(d: &Dataset) -> Result<()> {
    let needed = d.p() + 2;
    if d.n() < needed {
        return Err(Error::TooFewObservations {
            needed,
            found: d.n(),
        });
    }
    Ok(())
}

/// Covariance-route estimator: `b̂ = S_xx⁻¹·S_yx`, `b̂₀ = Ȳ − X̄·b̂`.
///
/// A singular `S_xx` falls back to the spectral g-inverse and is reported
/// through `used_pseudo_inverse`.
pub fn fit_unbiased(d: &Dataset) -> Result<RegressionFit> {
    require_residual_dof(d)?;
    let summary = summarize(d);
    let coef =
        coefficients_from_covariances(&summary.s_xx, &summary.s_yx, summary.ybar, &summary.xbar)?;
    let res = residual_analysis(d, coef.b0, &coef.b)?;

    let sxx_inv = if coef.used_pseudo_inverse {
        pseudo_inverse_symmetric(&summary.s_xx, PINV_TOL)
    } else {
        inverse_symmetric(&summary.s_xx)?
    };
    let dispersion = invert_partitioned(summary.n, &summary.xbar, &sxx_inv)?.scaled(res.sigma2_hat);

    Ok(assemble(
        d,
        Method::Unbiased,
        coef.b0,
        coef.b,
        res,
        dispersion,
        coef.used_pseudo_inverse,
    ))
}

/// Least squares `b̂ = (X₁ᵗX₁)⁻¹X₁ᵗY`, solved through a Householder QR of
/// `X₁` so the normal equations are never squared.
pub fn fit_ols(d: &Dataset) -> Result<RegressionFit> {
    require_residual_dof(d)?;
    let qr = HouseholderQr::new(&d.design_with_intercept())?;
    let coef = qr.solve_least_squares(d.y())?;
    let b0 = coef[0];
    let b = coef.slice(ndarray::s![1..]).to_owned();
    let res = residual_analysis(d, b0, &b)?;
    let dispersion = qr.gram_inverse()?.scaled(res.sigma2_hat);
    Ok(assemble(d, Method::Ols, b0, b, res, dispersion, false))
}

fn assemble(
    d: &Dataset,
    method: Method,
    b0: f64,
    b: Array1<f64>,
    res: Residuals,
    dispersion: SymMatrix,
    used_pseudo_inverse: bool,
) -> RegressionFit {
    let anova = anova_of(d.y(), &res.fitted, &res.residuals);
    RegressionFit {
        method,
        n: d.n(),
        p: d.p(),
        b0,
        b,
        fitted: res.fitted,
        residuals: res.residuals,
        sigma2_hat: res.sigma2_hat,
        dispersion,
        anova,
        used_pseudo_inverse,
    }
}

/// Residuals `e = y − b₀ − X·b`, `SS_E = eᵗe` and `σ̂² = SS_E/(n − p − 1)`.
pub fn residual_analysis(d: &Dataset, b0: f64, b: &Array1<f64>) -> Result<Residuals> {
    if b.len() != d.p() {
        return Err(Error::DimensionMismatch {
            expected: d.p(),
            found: b.len(),
        });
    }
    require_residual_dof(d)?;
    let (fitted, residuals) = fitted_and_residuals(d, b0, b);
    let ss_e = compensated_sum(residuals.iter().map(|e| e * e));
    let sigma2_hat = ss_e / (d.n() - d.p() - 1) as f64;
    Ok(Residuals {
        fitted,
        residuals,
        ss_e,
        sigma2_hat,
    })
}

fn fitted_and_residuals(d: &Dataset, b0: f64, b: &Array1<f64>) -> (Array1<f64>, Array1<f64>) {
    let x = d.x();
    let fitted: Array1<f64> = x
        .rows()
        .into_iter()
        .map(|row| b0 + compensated_sum(row.iter().zip(b).map(|(xi, bi)| xi * bi)))
        .collect();
    let residuals = &d.y() - &fitted;
    (fitted, residuals)
}

fn anova_of(y: ArrayView1<'_, f64>, fitted: &Array1<f64>, residuals: &Array1<f64>) -> Anova {
    let ybar = compensated_mean(y.iter().copied());
    let ss_t = compensated_sum(y.iter().map(|v| (v - ybar) * (v - ybar)));
    let ss_r = compensated_sum(fitted.iter().map(|v| (v - ybar) * (v - ybar)));
    let ss_e = compensated_sum(residuals.iter().map(|e| e * e));
    let r0_squared = if ss_t > 0.0 { ss_r / ss_t } else { 0.0 };
    Anova {
        ss_t,
        ss_r,
        ss_e,
        r0_squared,
    }
}

/// `SS_T = Σ(yⱼ − Ȳ)²`, `SS_R = Σ(ŷⱼ − Ȳ)²`, `SS_E = Σeⱼ²` and
/// `R₀² = SS_R/SS_T` (0 when the response is constant).
pub fn anova(d: &Dataset, fit: &RegressionFit) -> Result<Anova> {
    if fit.fitted.len() != d.n() || fit.residuals.len() != d.n() {
        return Err(Error::DimensionMismatch {
            expected: d.n(),
            found: fit.fitted.len(),
        });
    }
    Ok(anova_of(d.y(), &fit.fitted, &fit.residuals))
}

/// Numerical checks of the annihilator `M = I − X₁(X₁ᵗX₁)⁻¹X₁ᵗ` and of the
/// residual orthogonality it implies. Every field is a deviation that
/// should be zero up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnihilatorDiagnostics {
    /// `max|M − Mᵗ|`
    pub symmetry: f64,
    /// `max|M² − M|`
    pub idempotence: f64,
    /// `|tr(M) − (n − p − 1)|`
    pub trace_error: f64,
    /// `max|M·X₁|`
    pub annihilation: f64,
    /// `max|X₁ᵗe|` with `e` the covariance-route residuals
    pub orthogonality: f64,
    /// `|Ȳ − mean(ŷ)|`
    pub mean_gap: f64,
}

/// Materializes `M` (only for `n ≤ 2000`) and measures its defining
/// identities. `M` is formed as `I − Q·Qᵗ` from the thin QR factor of `X₁`,
/// which equals `I − X₁(X₁ᵗX₁)⁻¹X₁ᵗ` without squaring the condition number.
pub fn annihilator_checks(d: &Dataset) -> Result<AnnihilatorDiagnostics> {
    let (n, p) = (d.n(), d.p());
    if n > MAX_ANNIHILATOR_N {
        return Err(Error::InvalidArgument(format!(
            "annihilator diagnostics are limited to n <= {MAX_ANNIHILATOR_N}, got {n}"
        )));
    }
    if n < p + 1 {
        return Err(Error::TooFewObservations {
            needed: p + 1,
            found: n,
        });
    }
    let x1 = d.design_with_intercept();
    let qr = HouseholderQr::new(&x1)?;
    if !qr.is_full_rank() {
        return Err(Error::SingularMatrix);
    }
    let q = qr.thin_q();
    let m: Array2<f64> = Array2::eye(n) - q.dot(&q.t());

    let max_abs = |a: &Array2<f64>| a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let symmetry = max_abs(&(&m - &m.t()));
    let idempotence = max_abs(&(m.dot(&m) - &m));
    let trace = compensated_sum(m.diag().iter().copied());
    let trace_error = (trace - (n - p - 1) as f64).abs();
    let annihilation = max_abs(&m.dot(&x1));

    let summary = summarize(d);
    let coef =
        coefficients_from_covariances(&summary.s_xx, &summary.s_yx, summary.ybar, &summary.xbar)?;
    if coef.used_pseudo_inverse {
        return Err(Error::SingularMatrix);
    }
    let (fitted, residuals) = fitted_and_residuals(d, coef.b0, &coef.b);
    let orthogonality = (0..=p)
        .map(|c| compensated_sum(x1.column(c).iter().zip(&residuals).map(|(a, e)| a * e)).abs())
        .fold(0.0_f64, f64::max);
    let mean_gap = (summary.ybar - compensated_mean(fitted.iter().copied())).abs();

    Ok(AnnihilatorDiagnostics {
        symmetry,
        idempotence,
        trace_error,
        annihilation,
        orthogonality,
        mean_gap,
    })
}

/// `D̂(b̂) = σ̂²·(X₁ᵗX₁)⁻¹`, with the inverse assembled blockwise from
/// `S_xx⁻¹` and the predictor means.
pub fn dispersion_estimate(d: &Dataset, sigma2_hat: f64) -> Result<SymMatrix> {
    if !(sigma2_hat >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma2_hat must be non-negative, got {sigma2_hat}"
        )));
    }
    let summary = summarize(d);
    let sxx_inv = inverse_symmetric(&summary.s_xx)?;
    Ok(invert_partitioned(summary.n, &summary.xbar, &sxx_inv)?.scaled(sigma2_hat))
}

/// Whether the point prediction carries the fitted intercept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PredictionForm {
    /// `ŷ₀ = b̂₀ + x₀·b̂`
    #[default]
    WithIntercept,
    /// `ŷ₀ = x₀·b̂`, the literal slopes-only form.
    SlopesOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub x0: Array1<f64>,
    pub y_hat: f64,
    pub var_hat: f64,
}

/// Point prediction at `x0` and its estimated variance
/// `σ̂²·x₀·S_xx⁻¹·x₀ᵗ/(n − 1)`.
pub fn predict(
    fit: &RegressionFit,
    summary: &CovarianceSummary,
    x0: &Array1<f64>,
    form: PredictionForm,
) -> Result<Prediction> {
    let p = fit.b.len();
    for len in [x0.len(), summary.p()] {
        if len != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: len,
            });
        }
    }
    let slopes = compensated_sum(x0.iter().zip(&fit.b).map(|(a, b)| a * b));
    let y_hat = match form {
        PredictionForm::WithIntercept => fit.b0 + slopes,
        PredictionForm::SlopesOnly => slopes,
    };
    let w = solve_symmetric(&summary.s_xx, x0)?;
    let quad = compensated_sum(x0.iter().zip(&w).map(|(a, b)| a * b));
    let var_hat = (fit.sigma2_hat * quad / (summary.n - 1) as f64).max(0.0);
    Ok(Prediction {
        x0: x0.clone(),
        y_hat,
        var_hat,
    })
}
