use ndarray::{Array1, Array2};

use super::{frobenius, SymMatrix};

const MAX_SWEEPS: usize = 100;
const CONVERGENCE_TOL: f64 = 1e-12;

/// `A = Q·diag(λ)·Qᵗ` with eigenvalues sorted in descending order and the
/// matching eigenvectors stored as the columns of `Q`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

impl SpectralDecomposition {
    /// `Q·diag(λ)·Qᵗ`.
    pub fn reconstruct(&self) -> SymMatrix {
        self.weighted_outer(|l| l)
    }

    /// `Σ f(λᵢ)·qᵢqᵢᵗ`.
    pub(crate) fn weighted_outer<F: Fn(f64) -> f64>(&self, f: F) -> SymMatrix {
        let n = self.eigenvalues.len();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let q = &self.eigenvectors;
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .filter(|&k| weights[k] != 0.0)
                .map(|k| q[[i, k]] * weights[k] * q[[j, k]])
                .sum()
        })
    }
}

/// Cyclic Jacobi eigenvalue iteration.
///
/// Sweeps until the off-diagonal Frobenius norm falls below
/// `1e-12·‖A‖_F`.
pub fn spectral_decomposition(a: &SymMatrix) -> SpectralDecomposition {
    let n = a.dim();
    let mut m = a.as_array().clone();
    let mut v = Array2::<f64>::eye(n);
    let norm = frobenius(&m);

    if norm > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&m) <= CONVERGENCE_TOL * norm {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].total_cmp(&m[[i, i]]));
    let eigenvalues = order.iter().map(|&k| m[[k, k]]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.column_mut(dst).assign(&v.column(src));
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

fn off_diagonal_norm(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[[i, j]] * m[[i, j]];
            }
        }
    }
    s.sqrt()
}

/// Zeroes `m[p][q]` with the rotation `m ← JᵗmJ`, accumulating `v ← vJ`.
fn rotate(m: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, q: usize) {
    let apq = m[[p, q]];
    if apq == 0.0 {
        return;
    }
    let n = m.nrows();
    let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let mkp = m[[k, p]];
        let mkq = m[[k, q]];
        m[[k, p]] = c * mkp - s * mkq;
        m[[k, q]] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[[p, k]];
        let mqk = m[[q, k]];
        m[[p, k]] = c * mpk - s * mqk;
        m[[q, k]] = s * mpk + c * mqk;
    }
    m[[p, q]] = 0.0;
    m[[q, p]] = 0.0;
    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = c * vkp - s * vkq;
        v[[k, q]] = s * vkp + c * vkq;
    }
}

/// Generalized inverse `P·D̄·Pᵗ`, where `D̄` inverts every eigenvalue above
/// `tol_rel·max|λ|` and zeroes the rest (including all non-positive ones).
///
/// Panics if `tol_rel` is outside `(0, 1)`.
pub fn pseudo_inverse_symmetric(a: &SymMatrix, tol_rel: f64) -> SymMatrix {
    assert!(
        tol_rel > 0.0 && tol_rel < 1.0,
        "tol_rel must lie in (0, 1), got {tol_rel}"
    );
    let decomposition = spectral_decomposition(a);
    let largest = decomposition
        .eigenvalues
        .iter()
        .fold(0.0_f64, |m, l| m.max(l.abs()));
    let cutoff = tol_rel * largest;
    decomposition.weighted_outer(|l| if l > cutoff && l > 0.0 { 1.0 / l } else { 0.0 })
}
