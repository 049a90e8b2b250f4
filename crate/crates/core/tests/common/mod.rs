#![allow(dead_code)]

use covreg::{Dataset, GaussianStream};

/// Gauss–Jordan inverse with full pivoting on plain nested vectors.
pub fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let pv = m[col][col];
        assert!(pv != 0.0, "oracle hit a singular matrix");
        for v in m[col].iter_mut() {
            *v /= pv;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    let pivot = m[col].clone();
                    for (dst, src) in m[r].iter_mut().zip(&pivot) {
                        *dst -= f * src;
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `X₁ᵗX₁` for `X₁ = [1 | X]`, summed naively.
pub fn gram_with_intercept(d: &Dataset) -> Vec<Vec<f64>> {
    let x1 = d.design_with_intercept();
    let k = x1.ncols();
    (0..k)
        .map(|i| (0..k).map(|j| x1.column(i).dot(&x1.column(j))).collect())
        .collect()
}

/// `|a − b| ≤ tol·scale` with `scale ≥ max(|a|, |b|)`.
pub fn rel_close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.max(a.abs()).max(b.abs())
}

#[derive(Debug, Clone)]
pub struct RandomRegression {
    pub data: Dataset,
    /// Natural magnitude of each coefficient `(b₀, b₁, …)`, used as the
    /// floor of relative comparisons.
    pub coefficient_scale: Vec<f64>,
}

/// Random correlated design with predictor scales spread over four orders
/// of magnitude, offsets of a few standard deviations and a noisy linear
/// response.
pub fn random_regression(stream: &mut GaussianStream, n: usize, p: usize) -> RandomRegression {
    let scales: Vec<f64> = (0..p)
        .map(|_| 10f64.powf(4.0 * stream.next_uniform() - 2.0))
        .collect();
    let offsets: Vec<f64> = scales
        .iter()
        .map(|s| s * (10.0 * stream.next_uniform() - 5.0))
        .collect();
    let slopes: Vec<f64> = scales
        .iter()
        .map(|s| (4.0 * stream.next_uniform() - 2.0) / s)
        .collect();
    let intercept = 20.0 * stream.next_uniform() - 10.0;
    let noise = 10f64.powf(2.0 * stream.next_uniform() - 1.0);

    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut latent = 0.0;
        let mut row = Vec::with_capacity(p);
        for i in 0..p {
            latent = 0.5 * latent + stream.next_standard_normal();
            row.push(offsets[i] + scales[i] * latent);
        }
        let mean: f64 = intercept + row.iter().zip(&slopes).map(|(x, b)| x * b).sum::<f64>();
        y.push(mean + noise * stream.next_standard_normal());
        rows.push(row);
    }
    let data = Dataset::from_rows(&y, &rows).unwrap();

    let sd = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let y_sd = sd(&y).max(f64::MIN_POSITIVE);
    let ybar = y.iter().sum::<f64>() / n as f64;
    let col_sd: Vec<f64> = (0..p)
        .map(|i| sd(&rows.iter().map(|r| r[i]).collect::<Vec<_>>()))
        .collect();
    let col_mean: Vec<f64> = (0..p)
        .map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / n as f64)
        .collect();
    let slope_scale: Vec<f64> = col_sd.iter().map(|s| y_sd / s).collect();
    let intercept_scale = ybar.abs()
        + y_sd
        + col_mean
            .iter()
            .zip(&slope_scale)
            .map(|(m, s)| m.abs() * s)
            .sum::<f64>();
    let mut coefficient_scale = vec![intercept_scale];
    coefficient_scale.extend(slope_scale);
    RandomRegression {
        data,
        coefficient_scale,
    }
}
