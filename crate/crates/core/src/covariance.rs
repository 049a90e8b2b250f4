//! Sample moments with the `n − 1` denominator and the population-level
//! map from covariances to regression coefficients.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::{pseudo_inverse_symmetric, solve_symmetric, SymMatrix, PINV_TOL, PIVOT_TOL};
use crate::summation::{compensated_mean, compensated_sum};

/// A sample on `(Y, X₁, …, X_p)`: `y` holds the `n` responses, row `j` of `x`
/// holds the `p` predictor values of observation `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: Array1<f64>,
    x: Array2<f64>,
}

impl Dataset {
    /// Requires `n ≥ 2`, `p ≥ 1`, matching row counts and finite entries.
    pub fn new(y: Array1<f64>, x: Array2<f64>) -> Result<Self> {
        let n = y.len();
        if x.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.nrows(),
            });
        }
        if x.ncols() == 0 {
            return Err(Error::InvalidArgument("dataset has no predictors".into()));
        }
        if n < 2 {
            return Err(Error::TooFewObservations {
                needed: 2,
                found: n,
            });
        }
        if let Some(row) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, column: 0 });
        }
        for ((row, col), v) in x.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row,
                    column: col + 1,
                });
            }
        }
        Ok(Dataset { y, x })
    }

    /// Convenience constructor from row slices.
    pub fn from_rows(y: &[f64], rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: bad.len(),
            });
        }
        let x = Array2::from_shape_fn((rows.len(), p), |(i, j)| rows[i][j]);
        Dataset::new(Array1::from(y.to_vec()), x)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    /// The design `X₁ = [1ₙ | X]`.
    pub fn design_with_intercept(&self) -> Array2<f64> {
        let (n, p) = self.x.dim();
        Array2::from_shape_fn(
            (n, p + 1),
            |(i, j)| if j == 0 { 1.0 } else { self.x[[i, j - 1]] },
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSummary {
    pub n: usize,
    pub ybar: f64,
    pub xbar: Array1<f64>,
    pub s_yx: Array1<f64>,
    pub s_xx: SymMatrix,
}

impl CovarianceSummary {
    pub fn p(&self) -> usize {
        self.xbar.len()
    }
}

/// Sample means, `S_yx` and `S_xx`, all with denominator `n − 1`.
///
/// Moments are accumulated in two passes (means first, then centered
/// cross-products) with compensated summation.
pub fn summarize(d: &Dataset) -> CovarianceSummary {
    let n = d.n();
    let p = d.p();
    let dof = (n - 1) as f64;
    let x = d.x();

    let ybar = compensated_mean(d.y().iter().copied());
    let xbar: Array1<f64> = (0..p)
        .map(|i| compensated_mean(x.column(i).iter().copied()))
        .collect();

    let yc: Vec<f64> = d.y().iter().map(|v| v - ybar).collect();
    let xc: Vec<Vec<f64>> = (0..p)
        .map(|i| x.column(i).iter().map(|v| v - xbar[i]).collect())
        .collect();

    let cross = |a: &[f64], b: &[f64]| compensated_sum(a.iter().zip(b).map(|(u, v)| u * v)) / dof;
    let s_yx = xc.iter().map(|col| cross(col, &yc)).collect();
    let s_xx = SymMatrix::from_fn(p, |l, m| cross(&xc[l], &xc[m]));

    CovarianceSummary {
        n,
        ybar,
        xbar,
        s_yx,
        s_xx,
    }
}

/// Coefficients implied by a covariance structure.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceCoefficients {
    pub b0: f64,
    pub b: Array1<f64>,
    /// Set when `c_xx` failed the pivot gate and a g-inverse was used.
    pub used_pseudo_inverse: bool,
}

/// Solves `C_xx·b = C_yx` and sets `b₀ = μ_y − μ_x·b`.
///
/// A singular `c_xx` is not an error: the solution then comes from the
/// spectral g-inverse and `used_pseudo_inverse` is raised.
pub fn coefficients_from_covariances(
    c_xx: &SymMatrix,
    c_yx: &Array1<f64>,
    mu_y: f64,
    mu_x: &Array1<f64>,
) -> Result<CovarianceCoefficients> {
    let p = c_xx.dim();
    for len in [c_yx.len(), mu_x.len()] {
        if len != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: len,
            });
        }
    }
    let (b, used_pseudo_inverse) = match solve_symmetric(c_xx, c_yx) {
        Ok(b) => (b, false),
        Err(Error::SingularMatrix) => {
            let ginv = pseudo_inverse_symmetric(c_xx, PINV_TOL);
            (ginv.mul_vec(c_yx.view()), true)
        }
        Err(e) => return Err(e),
    };
    let b0 = mu_y - compensated_sum(mu_x.iter().zip(&b).map(|(m, c)| m * c));
    Ok(CovarianceCoefficients {
        b0,
        b,
        used_pseudo_inverse,
    })
}

/// Closed-form slopes for two predictors:
/// `b₁ = (C₂₂C_y1 − C₁₂C_y2)/Δ`, `b₂ = (C₁₁C_y2 − C₁₂C_y1)/Δ`,
/// `Δ = C₁₁C₂₂ − C₁₂²`.
pub fn coefficients_p2(c11: f64, c22: f64, c12: f64, cy1: f64, cy2: f64) -> Result<(f64, f64)> {
    let det = c11 * c22 - c12 * c12;
    if !(det.abs() > PIVOT_TOL * (c11 * c22).abs()) {
        return Err(Error::SingularMatrix);
    }
    Ok(((c22 * cy1 - c12 * cy2) / det, (c11 * cy2 - c12 * cy1) / det))
}
