//! Small dense linear algebra for symmetric systems.
//!
//! Everything here works on matrices of modest size (predictor counts in
//! the tens), so the routines favour accuracy and simplicity over blocking.

mod eigen;
mod qr;

pub use eigen::{pseudo_inverse_symmetric, spectral_decomposition, SpectralDecomposition};
pub use qr::HouseholderQr;

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

/// Relative pivot tolerance shared by every factorization gate.
pub const PIVOT_TOL: f64 = 1e-12;

/// Default relative eigenvalue cut-off for [`pseudo_inverse_symmetric`].
pub const PINV_TOL: f64 = 1e-10;

/// Dense symmetric matrix. Symmetry holds exactly because every constructor
/// either mirrors one triangle or rejects asymmetric input.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: Array2<f64>,
}

impl SymMatrix {
    /// Builds a matrix from `f(i, j)` evaluated on the lower triangle only.
    ///
    /// Panics if `dim == 0`.
    pub fn from_fn<F>(dim: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> f64,
    {
        assert!(dim >= 1, "SymMatrix dimension must be at least 1");
        let mut data = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                data[[i, j]] = v;
                data[[j, i]] = v;
            }
        }
        SymMatrix { data }
    }

    /// Accepts `a` only if it is square, non-empty and exactly symmetric.
    pub fn from_array(a: Array2<f64>) -> Result<Self> {
        let (rows, cols) = a.dim();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: cols,
            });
        }
        if rows == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        for i in 0..rows {
            for j in 0..i {
                if a[[i, j]] != a[[j, i]] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymMatrix { data: a })
    }

    /// Symmetric part `(a + aᵗ) / 2` of a square matrix.
    pub fn symmetrize(a: &Array2<f64>) -> Self {
        let (rows, cols) = a.dim();
        assert_eq!(rows, cols, "symmetrize needs a square matrix");
        Self::from_fn(rows, |i, j| 0.5 * (a[[i, j]] + a[[j, i]]))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| 0.0)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[[i, j]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    pub fn diagonal(&self) -> Array1<f64> {
        self.data.diag().to_owned()
    }

    pub fn mul_vec(&self, v: ArrayView1<'_, f64>) -> Array1<f64> {
        self.data.dot(&v)
    }

    /// `vᵗ·A·v`.
    pub fn quadratic_form(&self, v: ArrayView1<'_, f64>) -> f64 {
        v.dot(&self.data.dot(&v))
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymMatrix {
            data: &self.data * c,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        self.data.diag().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A reusable factorization of a nonsingular symmetric matrix.
///
/// Cholesky is tried first. Its pivot gate is relative to each column's own
/// diagonal, so it is unaffected by rescaling rows and columns. Input that
/// fails it (indefinite or singular) falls back to Gaussian elimination
/// with partial pivoting, gated against the largest entry.
#[derive(Debug, Clone)]
pub enum SymmetricFactor {
    Cholesky { lower: Array2<f64> },
    Lu { lu: Array2<f64>, perm: Vec<usize> },
}

impl SymmetricFactor {
    pub fn new(a: &SymMatrix) -> Result<Self> {
        if let Some(lower) = cholesky(a) {
            return Ok(SymmetricFactor::Cholesky { lower });
        }
        let (lu, perm) = lu_partial_pivot(a)?;
        Ok(SymmetricFactor::Lu { lu, perm })
    }

    pub fn dim(&self) -> usize {
        match self {
            SymmetricFactor::Cholesky { lower } => lower.nrows(),
            SymmetricFactor::Lu { lu, .. } => lu.nrows(),
        }
    }

    pub fn solve(&self, b: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let x = match self {
            SymmetricFactor::Cholesky { lower } => {
                // L·z = b, then Lᵗ·x = z
                let mut z = b.to_owned();
                for i in 0..n {
                    let mut s = z[i];
                    for k in 0..i {
                        s -= lower[[i, k]] * z[k];
                    }
                    z[i] = s / lower[[i, i]];
                }
                for i in (0..n).rev() {
                    let mut s = z[i];
                    for k in i + 1..n {
                        s -= lower[[k, i]] * z[k];
                    }
                    z[i] = s / lower[[i, i]];
                }
                z
            }
            SymmetricFactor::Lu { lu, perm } => {
                let mut z: Array1<f64> = perm.iter().map(|&p| b[p]).collect();
                for i in 0..n {
                    let mut s = z[i];
                    for k in 0..i {
                        s -= lu[[i, k]] * z[k];
                    }
                    z[i] = s;
                }
                for i in (0..n).rev() {
                    let mut s = z[i];
                    for k in i + 1..n {
                        s -= lu[[i, k]] * z[k];
                    }
                    z[i] = s / lu[[i, i]];
                }
                z
            }
        };
        Ok(x)
    }

    /// Inverse of the factored matrix, symmetrized.
    pub fn inverse(&self) -> SymMatrix {
        let n = self.dim();
        let mut inv = Array2::zeros((n, n));
        let mut e = Array1::zeros(n);
        for j in 0..n {
            e.fill(0.0);
            e[j] = 1.0;
            let col = self.solve(e.view()).expect("dimension checked");
            inv.column_mut(j).assign(&col);
        }
        SymMatrix::symmetrize(&inv)
    }
}

fn cholesky(a: &SymMatrix) -> Option<Array2<f64>> {
    let n = a.dim();
    let mut lower = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let ajj = a.get(j, j);
        let mut d = ajj;
        for k in 0..j {
            d -= lower[[j, k]] * lower[[j, k]];
        }
        if !(d > PIVOT_TOL * ajj) || !d.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        lower[[j, j]] = ljj;
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= lower[[i, k]] * lower[[j, k]];
            }
            lower[[i, j]] = s / ljj;
        }
    }
    Some(lower)
}

fn lu_partial_pivot(a: &SymMatrix) -> Result<(Array2<f64>, Vec<usize>)> {
    let n = a.dim();
    let mut lu = a.as_array().clone();
    let scale = lu.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::SingularMatrix);
    }
    let gate = PIVOT_TOL * scale;
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (pivot_row, pivot_abs) =
            (k..n)
                .map(|i| (i, lu[[i, k]].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if !(pivot_abs > gate) {
            return Err(Error::SingularMatrix);
        }
        if pivot_row != k {
            for c in 0..n {
                lu.swap([k, c], [pivot_row, c]);
            }
            perm.swap(k, pivot_row);
        }
        let pivot = lu[[k, k]];
        for i in k + 1..n {
            let factor = lu[[i, k]] / pivot;
            lu[[i, k]] = factor;
            for c in k + 1..n {
                lu[[i, c]] -= factor * lu[[k, c]];
            }
        }
    }
    Ok((lu, perm))
}

/// Solves `a·x = b` for a nonsingular symmetric `a`.
///
/// Fails with [`Error::SingularMatrix`] when a Cholesky pivot drops below
/// `PIVOT_TOL` times its own diagonal entry (the column is then a linear
/// combination of the earlier ones to working precision) and pivoted
/// elimination fails too. Callers that can live with a generalized
/// solution should switch to [`pseudo_inverse_symmetric`].
pub fn solve_symmetric(a: &SymMatrix, b: &Array1<f64>) -> Result<Array1<f64>> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.len(),
        });
    }
    SymmetricFactor::new(a)?.solve(b.view())
}

pub fn inverse_symmetric(a: &SymMatrix) -> Result<SymMatrix> {
    Ok(SymmetricFactor::new(a)?.inverse())
}

/// Assembles `(X₁ᵗX₁)⁻¹` for `X₁ = [1 | X]` from the sample size, the
/// predictor means and the inverse of the predictor covariance matrix,
/// using the block form of the partitioned inverse:
///
/// ```text
/// [ 1/n + x̄·S⁻¹·x̄ᵗ/(n-1)   -x̄·S⁻¹/(n-1) ]
/// [ -S⁻¹·x̄ᵗ/(n-1)           S⁻¹/(n-1)    ]
/// ```
pub fn invert_partitioned(n: usize, xbar: &Array1<f64>, sxx_inv: &SymMatrix) -> Result<SymMatrix> {
    if n < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            found: n,
        });
    }
    let p = sxx_inv.dim();
    if xbar.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: xbar.len(),
        });
    }
    let nf = n as f64;
    let dof = (n - 1) as f64;
    let w = sxx_inv.mul_vec(xbar.view());
    let corner = 1.0 / nf + xbar.dot(&w) / dof;
    Ok(SymMatrix::from_fn(p + 1, |i, j| match (i, j) {
        (0, 0) => corner,
        (i, 0) => -w[i - 1] / dof,
        (i, j) => sxx_inv.get(i - 1, j - 1) / dof,
    }))
}
