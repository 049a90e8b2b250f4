//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use covreg::fixtures::{LAKE_HURON_AR3_LEAST_SQUARES, LAKE_HURON_AR3_YULE_WALKER};
use covreg::linalg::inverse_symmetric;
use covreg::timeseries::yule_walker_solve;
use covreg::{
    annihilator_checks, fit_ols, fit_unbiased, invert_partitioned, monte_carlo_bias,
    pseudo_inverse_symmetric, summarize, ArModel, BiasReport, Dataset, GaussianStream,
    SimulationScenario, SymMatrix,
};
use serde_json::Value;

type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn covreg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_covreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn covreg_env(args: &[&str], key: &str, value: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_covreg"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn ms(d: Duration) -> String {
    format!("{:.0} ms", d.as_secs_f64() * 1e3)
}

/// A randomized regression problem with its natural coefficient scales.
struct Case {
    data: Dataset,
    coefficient_scale: Vec<f64>,
}

/// Correlated predictors whose scales spread over four orders of
/// magnitude, offsets of a few standard deviations, noisy linear response.
fn random_case(g: &mut GaussianStream, n: usize, p: usize) -> Case {
    let scales: Vec<f64> = (0..p)
        .map(|_| 10f64.powf(4.0 * g.next_uniform() - 2.0))
        .collect();
    let offsets: Vec<f64> = scales
        .iter()
        .map(|s| s * (10.0 * g.next_uniform() - 5.0))
        .collect();
    let slopes: Vec<f64> = scales
        .iter()
        .map(|s| (4.0 * g.next_uniform() - 2.0) / s)
        .collect();
    let intercept = 20.0 * g.next_uniform() - 10.0;
    let noise = 10f64.powf(2.0 * g.next_uniform() - 1.0);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut latent = 0.0;
        let row: Vec<f64> = (0..p)
            .map(|i| {
                latent = 0.5 * latent + g.next_standard_normal();
                offsets[i] + scales[i] * latent
            })
            .collect();
        let mean = intercept + row.iter().zip(&slopes).map(|(x, b)| x * b).sum::<f64>();
        y.push(mean + noise * g.next_standard_normal());
        rows.push(row);
    }
    let data = Dataset::from_rows(&y, &rows).unwrap();

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let sd = |v: &[f64]| {
        let m = mean(v);
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let y_sd = sd(&y).max(f64::MIN_POSITIVE);
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|i| rows.iter().map(|r| r[i]).collect())
        .collect();
    let slope_scale: Vec<f64> = cols.iter().map(|c| y_sd / sd(c)).collect();
    let intercept_scale = mean(&y).abs()
        + y_sd
        + cols
            .iter()
            .zip(&slope_scale)
            .map(|(c, s)| mean(c).abs() * s)
            .sum::<f64>();
    let mut coefficient_scale = vec![intercept_scale];
    coefficient_scale.extend(slope_scale);
    Case {
        data,
        coefficient_scale,
    }
}

/// The randomized suite shared by criteria 2 to 4: n ∈ [p+2, 500],
/// p ∈ [1, 12].
fn suite() -> Vec<Case> {
    let mut g = GaussianStream::new(0xACCE, 0);
    (0..1000)
        .map(|_| {
            let p = 1 + (g.next_uniform() * 12.0) as usize;
            let n = p + 2 + (g.next_uniform() * (499 - p) as f64) as usize;
            random_case(&mut g, n, p)
        })
        .collect()
}

fn lake_huron_table() -> Outcome {
    let fixture = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/fixtures/lake_huron.csv"
    );
    let start = Instant::now();
    let o = covreg(&["ar-fit", "--input", fixture, "--p", "3", "--format", "json"]);
    let elapsed = start.elapsed();
    if !o.status.success() {
        return outcome(false, String::from_utf8_lossy(&o.stderr).trim().to_string());
    }
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let column = |m: &str| -> Vec<f64> {
        let f = &v["methods"][m];
        std::iter::once(f["phi0"].as_f64().unwrap())
            .chain(
                f["phi"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_f64().unwrap()),
            )
            .collect()
    };
    let mut worst: f64 = 0.0;
    for m in ["least_squares", "unbiased"] {
        for (a, b) in column(m).iter().zip(LAKE_HURON_AR3_LEAST_SQUARES) {
            worst = worst.max((a - b).abs());
        }
    }
    for (a, b) in column("yule_walker")[1..]
        .iter()
        .zip(LAKE_HURON_AR3_YULE_WALKER)
    {
        worst = worst.max((a - b).abs());
    }
    let pass = worst <= 1e-3 && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!("max |Δ| = {worst:.1e} (≤ 1e-3), {}", ms(elapsed)),
    )
}

fn equivalence(cases: &[Case], built: Duration) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for c in cases {
        let (u, o) = match (fit_unbiased(&c.data), fit_ols(&c.data)) {
            (Ok(u), Ok(o)) => (u, o),
            _ => {
                failures += 1;
                continue;
            }
        };
        for ((a, b), s) in u
            .coefficients()
            .iter()
            .zip(o.coefficients().iter())
            .zip(&c.coefficient_scale)
        {
            let rel = (a - b).abs() / s.max(a.abs()).max(b.abs());
            worst = worst.max(rel);
        }
    }
    let elapsed = start.elapsed() + built;
    let pass = failures == 0 && worst <= 1e-10 && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "{} datasets, max relative gap {worst:.1e} (≤ 1e-10), {failures} fit errors, {}",
            cases.len(),
            ms(elapsed)
        ),
    )
}

fn residual_identities(cases: &[Case]) -> Outcome {
    let mut orth: f64 = 0.0;
    let mut trace: f64 = 0.0;
    let mut idem: f64 = 0.0;
    let mut sym: f64 = 0.0;
    let mut anova: f64 = 0.0;
    let mut errors = 0;
    for c in cases {
        let (Ok(diag), Ok(fit)) = (annihilator_checks(&c.data), fit_unbiased(&c.data)) else {
            errors += 1;
            continue;
        };
        let y_inf = c.data.y().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        orth = orth.max(diag.orthogonality / y_inf);
        trace = trace.max(diag.trace_error);
        idem = idem.max(diag.idempotence);
        sym = sym.max(diag.symmetry);
        let split = (fit.ss_t() - fit.ss_r() - fit.ss_e()).abs() / fit.ss_t();
        anova = anova.max(split);
    }
    let pass = errors == 0
        && orth <= 1e-8
        && trace <= 1e-8
        && idem <= 1e-8
        && sym <= 1e-8
        && anova <= 1e-9;
    outcome(
        pass,
        format!(
            "|X₁ᵗe|/‖y‖∞ {orth:.1e}, tr(M) {trace:.1e}, M²−M {idem:.1e}, M−Mᵗ {sym:.1e} (≤ 1e-8), SS split {anova:.1e} (≤ 1e-9), {errors} errors"
        ),
    )
}

/// Gauss–Jordan inverse with full pivoting.
fn gauss_jordan(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .copied()
                .chain((0..n).map(|j| f64::from(u8::from(i == j))))
                .collect()
        })
        .collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, -1.0);
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().take(n).skip(k) {
                if v.abs() > best {
                    (pr, pc, best) = (i, j, v.abs());
                }
            }
        }
        m.swap(k, pr);
        for row in m.iter_mut() {
            row.swap(k, pc);
        }
        col_perm.swap(k, pc);
        let pv = m[k][k];
        for v in m[k].iter_mut() {
            *v /= pv;
        }
        for r in 0..n {
            if r != k {
                let f = m[r][k];
                if f != 0.0 {
                    let pivot = m[k].clone();
                    for (dst, src) in m[r].iter_mut().zip(&pivot) {
                        *dst -= f * src;
                    }
                }
            }
        }
    }
    // undo the column permutation: row k of the result belongs to variable col_perm[k]
    let mut inv = vec![vec![0.0; n]; n];
    for (k, &var) in col_perm.iter().enumerate() {
        inv[var] = m[k][n..].to_vec();
    }
    inv
}

fn partitioned_inverse(cases: &[Case]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for c in cases {
        let s = summarize(&c.data);
        let Ok(sxx_inv) = inverse_symmetric(&s.s_xx) else {
            errors += 1;
            continue;
        };
        let block = invert_partitioned(s.n, &s.xbar, &sxx_inv).unwrap();
        let x1 = c.data.design_with_intercept();
        let k = x1.ncols();
        let gram: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| x1.column(i).dot(&x1.column(j))).collect())
            .collect();
        let direct = gauss_jordan(&gram);
        for i in 0..k {
            for j in 0..k {
                let scale = (direct[i][i] * direct[j][j]).sqrt();
                worst = worst.max((block.get(i, j) - direct[i][j]).abs() / scale);
            }
        }
    }
    outcome(
        errors == 0 && worst <= 1e-9,
        format!(
            "{} designs, max entry gap {worst:.1e} relative to √(dᵢᵢdⱼⱼ) (≤ 1e-9), {errors} errors",
            cases.len()
        ),
    )
}

fn z_line(r: &BiasReport) -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for e in r.coefficients.iter().chain(r.sigma2.as_ref()) {
        pass &= e.z_score < 3.0;
        parts.push(format!("{} z={:.2}", e.name, e.z_score));
    }
    (pass, parts.join(", "))
}

fn bias_leg(name: &str, scenario: SimulationScenario, seed: u64) -> Outcome {
    let start = Instant::now();
    let r = monte_carlo_bias(&scenario, 10_000, seed).unwrap();
    let elapsed = start.elapsed();
    let (pass, detail) = z_line(&r);
    outcome(
        pass && elapsed < Duration::from_secs(120),
        format!("{name}, 10⁴ reps: {detail} (< 3), {}", ms(elapsed)),
    )
}

fn table_shape() -> Outcome {
    let model = ArModel::new(0.0, vec![0.4, 0.1, 0.3], 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let s = covreg::simulate_ar(&model, 100, 500, seed).unwrap();
        let u = covreg::fit_ar_unbiased(&s, 3).unwrap().model;
        let o = covreg::fit_ar_ols(&s, 3).unwrap().model;
        let a = std::iter::once(u.phi0).chain(u.phi);
        let b = std::iter::once(o.phi0).chain(o.phi);
        for (x, y) in a.zip(b) {
            worst = worst.max((x - y).abs() / x.abs().max(y.abs()).max(1.0));
        }
    }
    outcome(
        worst <= 1e-10,
        format!(
            "Unbiased vs Least-squares columns on 50 series, n=100: max gap {worst:.1e} (≤ 1e-10)"
        ),
    )
}

fn pseudo_inverse() -> Outcome {
    let mut g = GaussianStream::new(0x61, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dim = 2 + (g.next_uniform() * 9.0) as usize;
        let rank = 1 + (g.next_uniform() * (dim - 1) as f64) as usize;
        let b: Vec<f64> = (0..dim * rank).map(|_| g.next_standard_normal()).collect();
        let a = SymMatrix::from_fn(dim, |i, j| {
            (0..rank).map(|k| b[i * rank + k] * b[j * rank + k]).sum()
        });
        let ginv = pseudo_inverse_symmetric(&a, covreg::linalg::PINV_TOL);
        let aga = a.as_array().dot(ginv.as_array()).dot(a.as_array());
        let gap = (&aga - a.as_array())
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
            / a.frobenius_norm();
        worst = worst.max(gap);
    }
    outcome(
        worst <= 1e-8,
        format!("100 rank-deficient PSD matrices, max ‖AA⁻A − A‖/‖A‖ {worst:.1e} (≤ 1e-8)"),
    )
}

/// Autocorrelations of a stationary AR(p) from its ψ-weights.
fn true_rho(phi: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let terms = 5000;
    let mut psi = vec![0.0; terms + p];
    psi[0] = 1.0;
    for j in 1..psi.len() {
        psi[j] = (0..p.min(j)).map(|i| phi[i] * psi[j - 1 - i]).sum();
    }
    let gamma: Vec<f64> = (0..=p)
        .map(|k| (0..terms).map(|j| psi[j] * psi[j + k]).sum())
        .collect();
    gamma.iter().map(|v| v / gamma[0]).collect()
}

/// AR coefficients from reflection coefficients in (−1, 1), which are
/// always stationary.
fn from_reflections(kappa: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::new();
    for &k in kappa {
        let prev = phi.clone();
        phi = prev
            .iter()
            .zip(prev.iter().rev())
            .map(|(a, b)| a - k * b)
            .collect();
        phi.push(k);
    }
    phi
}

fn yule_walker_identity() -> Outcome {
    let mut g = GaussianStream::new(0x77, 0);
    let mut models = vec![vec![0.4, 0.1, 0.3]];
    for _ in 0..60 {
        let p = 1 + (g.next_uniform() * 5.0) as usize;
        let kappa: Vec<f64> = (0..p).map(|_| 1.6 * g.next_uniform() - 0.8).collect();
        models.push(from_reflections(&kappa));
    }
    let mut worst: f64 = 0.0;
    let mut nonstationary = 0;
    for phi in &models {
        if !ArModel::new(0.0, phi.clone(), 1.0).unwrap().is_stationary() {
            nonstationary += 1;
        }
        let got = yule_walker_solve(&true_rho(phi), phi.len()).unwrap();
        for (a, b) in got.iter().zip(phi) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(
        worst <= 1e-10 && nonstationary == 0,
        format!(
            "{} models with p ≤ 5, max |φ̂ − φ| {worst:.1e} (≤ 1e-10)",
            models.len()
        ),
    )
}

fn determinism() -> Outcome {
    let sim = [
        "simulate",
        "--phi",
        "0.4,0.1,0.3",
        "--n",
        "100",
        "--seed",
        "7",
    ];
    let a = covreg(&sim);
    let b = covreg(&sim);
    let sim_ok = a.status.success() && a.stdout == b.stdout;

    let mc = [
        "mc-bias",
        "--scenario",
        "ar",
        "--reps",
        "2000",
        "--seed",
        "5",
        "--format",
        "json",
    ];
    let base = covreg(&mc);
    let mut variants = vec![covreg(&mc)];
    for t in ["1", "2", "4", "8"] {
        let mut args = mc.to_vec();
        args.extend(["--threads", t]);
        variants.push(covreg(&args));
        variants.push(covreg_env(&mc, "RAYON_NUM_THREADS", t));
    }
    let mc_ok = base.status.success() && variants.iter().all(|v| v.stdout == base.stdout);

    let table = [
        "mc-bias",
        "--scenario",
        "heteroscedastic",
        "--reps",
        "1000",
        "--seed",
        "9",
    ];
    let t1 = covreg(&[&table[..], &["--threads", "1"]].concat());
    let t4 = covreg(&[&table[..], &["--threads", "4"]].concat());
    let table_ok = t1.status.success() && t1.stdout == t4.stdout;

    outcome(
        sim_ok && mc_ok && table_ok,
        format!(
            "simulate repeated: {}, mc-bias json over 1/2/4/8 threads: {}, mc-bias table 1 vs 4 threads: {}",
            if sim_ok { "identical" } else { "DIFFERENT" },
            if mc_ok { "identical" } else { "DIFFERENT" },
            if table_ok { "identical" } else { "DIFFERENT" },
        ),
    )
}

fn main() {
    let start = Instant::now();
    let cases = suite();
    let built = start.elapsed();

    let additive = SimulationScenario::Additive {
        intercept: 1.0,
        slopes: vec![2.0],
        predictor_means: vec![0.0],
        predictor_sds: vec![1.0],
        noise_sd: 1.0,
        n: 100,
    };
    let class_c = SimulationScenario::Heteroscedastic {
        b1: 1.0,
        b2: -1.0,
        b3: 1.0,
        n: 100,
    };
    let ar3 = SimulationScenario::Autoregressive {
        model: ArModel::new(0.0, vec![0.4, 0.1, 0.3], 1.0).unwrap(),
        n: 100,
        burn_in: 500,
    };

    let criteria: Vec<(&str, &str, Check)> = vec![
        ("1", "Lake Huron AR(3) table", Box::new(lake_huron_table)),
        (
            "2",
            "covariance route equals least squares",
            Box::new(|| equivalence(&cases, built)),
        ),
        (
            "3",
            "residual identities",
            Box::new(|| residual_identities(&cases)),
        ),
        (
            "4",
            "partitioned inverse",
            Box::new(|| partitioned_inverse(&cases)),
        ),
        (
            "5a",
            "unbiasedness, additive-error model",
            Box::new(move || bias_leg("b=(1, 2), n=100", additive, 1)),
        ),
        (
            "5b",
            "unbiasedness, heteroscedastic model",
            Box::new(move || bias_leg("b=(0, 1, -1), b3=1, n=100", class_c, 2)),
        ),
        (
            "5c",
            "unbiasedness, AR(3)",
            Box::new(move || bias_leg("φ=(0.4, 0.1, 0.3), n=100", ar3, 3)),
        ),
        ("5d", "AR table shape", Box::new(table_shape)),
        ("6", "generalized inverse", Box::new(pseudo_inverse)),
        ("7", "Yule-Walker identity", Box::new(yule_walker_identity)),
        ("8", "determinism", Box::new(determinism)),
    ];

    let total = criteria.len();
    let mut passed = 0;
    for (id, name, check) in criteria {
        let o = check();
        passed += usize::from(o.pass);
        println!(
            "criterion {id:<3} {}  {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {passed}/{total} passed");
    if passed != total {
        std::process::exit(1);
    }
}
