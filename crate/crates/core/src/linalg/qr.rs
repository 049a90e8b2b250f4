use ndarray::{s, Array1, Array2, ArrayView1};

use super::{SymMatrix, PIVOT_TOL};
use crate::error::{Error, Result};

/// Householder QR of a tall matrix `A = Q·R` (`rows ≥ cols`).
///
/// The rank gate mirrors the Cholesky pivot gate on `AᵗA`: column `j` is
/// accepted when `r_jj² > PIVOT_TOL·‖a_j‖²`.
#[derive(Debug, Clone)]
pub struct HouseholderQr {
    reflectors: Vec<(Array1<f64>, f64)>,
    r: Array2<f64>,
    rows: usize,
    column_norms: Vec<f64>,
}

impl HouseholderQr {
    pub fn new(a: &Array2<f64>) -> Result<Self> {
        let (rows, cols) = a.dim();
        if cols == 0 || rows < cols {
            return Err(Error::TooFewObservations {
                needed: cols.max(1),
                found: rows,
            });
        }
        let column_norms: Vec<f64> = a.columns().into_iter().map(|c| c.dot(&c).sqrt()).collect();

        let mut w = a.clone();
        let mut reflectors = Vec::with_capacity(cols);
        for j in 0..cols {
            let x = w.slice(s![j.., j]);
            let norm = x.dot(&x).sqrt();
            if norm == 0.0 {
                reflectors.push((Array1::zeros(rows - j), 0.0));
                continue;
            }
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = x.to_owned();
            v[0] -= alpha;
            let beta = 2.0 / v.dot(&v);
            for c in j..cols {
                let mut col = w.slice_mut(s![j.., c]);
                let d = beta * v.dot(&col);
                col.scaled_add(-d, &v);
            }
            reflectors.push((v, beta));
        }
        let mut r = w.slice(s![..cols, ..]).to_owned();
        for i in 0..cols {
            for j in 0..i {
                r[[i, j]] = 0.0;
            }
        }
        Ok(HouseholderQr {
            reflectors,
            r,
            rows,
            column_norms,
        })
    }

    pub fn cols(&self) -> usize {
        self.r.ncols()
    }

    pub fn r(&self) -> &Array2<f64> {
        &self.r
    }

    pub fn is_full_rank(&self) -> bool {
        self.r
            .diag()
            .iter()
            .zip(&self.column_norms)
            .all(|(&d, &norm)| d * d > PIVOT_TOL * norm * norm && norm > 0.0)
    }

    fn ensure_full_rank(&self) -> Result<()> {
        if self.is_full_rank() {
            Ok(())
        } else {
            Err(Error::SingularMatrix)
        }
    }

    /// Applies `Qᵗ` to `y` in place.
    fn apply_qt(&self, y: &mut Array1<f64>) {
        for (j, (v, beta)) in self.reflectors.iter().enumerate() {
            let mut tail = y.slice_mut(s![j..]);
            let d = beta * v.dot(&tail);
            tail.scaled_add(-d, v);
        }
    }

    /// Least-squares solution of `A·x ≈ y`.
    pub fn solve_least_squares(&self, y: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: y.len(),
            });
        }
        self.ensure_full_rank()?;
        let mut qty = y.to_owned();
        self.apply_qt(&mut qty);
        let k = self.cols();
        let mut x = Array1::zeros(k);
        for i in (0..k).rev() {
            let mut acc = qty[i];
            for c in i + 1..k {
                acc -= self.r[[i, c]] * x[c];
            }
            x[i] = acc / self.r[[i, i]];
        }
        Ok(x)
    }

    /// The first `cols` columns of `Q`.
    pub fn thin_q(&self) -> Array2<f64> {
        let k = self.cols();
        let mut q = Array2::zeros((self.rows, k));
        for j in 0..k {
            q[[j, j]] = 1.0;
        }
        for (j, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            for c in 0..k {
                let mut tail = q.slice_mut(s![j.., c]);
                let d = beta * v.dot(&tail);
                tail.scaled_add(-d, v);
            }
        }
        q
    }

    /// `(AᵗA)⁻¹ = R⁻¹·R⁻ᵗ`.
    pub fn gram_inverse(&self) -> Result<SymMatrix> {
        self.ensure_full_rank()?;
        let k = self.cols();
        // upper-triangular inverse of R, column by column
        let mut rinv = Array2::<f64>::zeros((k, k));
        for j in 0..k {
            rinv[[j, j]] = 1.0 / self.r[[j, j]];
            for i in (0..j).rev() {
                let mut acc = 0.0;
                for m in i + 1..=j {
                    acc += self.r[[i, m]] * rinv[[m, j]];
                }
                rinv[[i, j]] = -acc / self.r[[i, i]];
            }
        }
        let gram_inv = rinv.dot(&rinv.t());
        Ok(SymMatrix::symmetrize(&gram_inv))
    }
}
