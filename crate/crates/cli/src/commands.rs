use std::io::Write;

use covreg::fixtures::{lake_huron, LAKE_HURON_AR3_LEAST_SQUARES, LAKE_HURON_AR3_YULE_WALKER};
use covreg::timeseries::{simulate_ar_with, ArSimulation};
use covreg::{
    fit_ar_ols, fit_ar_unbiased, fit_ar_yule_walker, fit_ols, fit_unbiased, monte_carlo_bias,
    ArFit, ArModel, BiasReport, EstimateSummary, RegressionFit, SimulationScenario,
};
use serde::Serialize;

use crate::error::CliError;
use crate::format::{number, render};
use crate::input::{load_csv, load_series};
use crate::{
    ArFitArgs, FitArgs, FitMethod, Format, McBiasArgs, ScenarioKind, SimulateArgs, TablesArgs,
};

type Out<'a> = &'a mut dyn Write;

fn write_json<T: Serialize>(out: Out<'_>, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct Coefficients {
    b0: f64,
    b: Vec<f64>,
}

#[derive(Serialize)]
struct InputEcho {
    response: String,
    predictors: Vec<String>,
    y: Vec<f64>,
    x: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct FitJson {
    method: &'static str,
    coefficients: Coefficients,
    sigma2_hat: f64,
    dispersion: Vec<Vec<f64>>,
    r0_squared: f64,
    ss_t: f64,
    ss_r: f64,
    ss_e: f64,
    n: usize,
    p: usize,
    used_pseudo_inverse: bool,
    input: InputEcho,
}

pub fn fit(args: &FitArgs, out: Out<'_>) -> Result<(), CliError> {
    let loaded = load_csv(&args.input, &args.response, &args.predictors)?;
    let d = &loaded.data;
    let fit: RegressionFit = match args.method {
        FitMethod::Unbiased => fit_unbiased(d)?,
        FitMethod::Ols => fit_ols(d)?,
    };
    match args.output.format {
        Format::Json => {
            let body = FitJson {
                method: fit.method.as_str(),
                coefficients: Coefficients {
                    b0: fit.b0,
                    b: fit.b.to_vec(),
                },
                sigma2_hat: fit.sigma2_hat,
                dispersion: fit
                    .dispersion
                    .as_array()
                    .rows()
                    .into_iter()
                    .map(|r| r.to_vec())
                    .collect(),
                r0_squared: fit.r0_squared(),
                ss_t: fit.ss_t(),
                ss_r: fit.ss_r(),
                ss_e: fit.ss_e(),
                n: fit.n,
                p: fit.p,
                used_pseudo_inverse: fit.used_pseudo_inverse,
                input: InputEcho {
                    response: loaded.response.clone(),
                    predictors: loaded.predictors.clone(),
                    y: d.y().to_vec(),
                    x: d.x().rows().into_iter().map(|r| r.to_vec()).collect(),
                },
            };
            write_json(out, &body)
        }
        Format::Table => {
            let digits = args.output.digits();
            let num = |v: f64| number(v, digits);
            let disp = fit.dispersion.diagonal();
            let mut rows = vec![vec![
                "b0".into(),
                "(intercept)".into(),
                num(fit.b0),
                num(disp[0]),
            ]];
            for (i, name) in loaded.predictors.iter().enumerate() {
                rows.push(vec![
                    format!("b{}", i + 1),
                    name.clone(),
                    num(fit.b[i]),
                    num(disp[i + 1]),
                ]);
            }
            writeln!(out, "method: {}  n = {}  p = {}", fit.method, fit.n, fit.p)?;
            if fit.used_pseudo_inverse {
                writeln!(
                    out,
                    "note: predictor covariance is singular; a generalized inverse was used"
                )?;
            }
            write!(
                out,
                "{}",
                render(&["term", "column", "estimate", "dispersion"], &rows)
            )?;
            let summary = vec![
                vec!["sigma2_hat".into(), num(fit.sigma2_hat)],
                vec!["r0_squared".into(), num(fit.r0_squared())],
                vec!["ss_t".into(), num(fit.ss_t())],
                vec!["ss_r".into(), num(fit.ss_r())],
                vec!["ss_e".into(), num(fit.ss_e())],
            ];
            writeln!(out)?;
            write!(out, "{}", render(&["statistic", "value"], &summary))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ArFitJson {
    phi0: f64,
    phi: Vec<f64>,
    sigma2_hat: f64,
    n_effective: usize,
    used_pseudo_inverse: bool,
}

impl From<&ArFit> for ArFitJson {
    fn from(f: &ArFit) -> Self {
        ArFitJson {
            phi0: f.model.phi0,
            phi: f.model.phi.clone(),
            sigma2_hat: f.model.sigma * f.model.sigma,
            n_effective: f.n_effective,
            used_pseudo_inverse: f.used_pseudo_inverse,
        }
    }
}

#[derive(Serialize)]
struct ArMethodsJson {
    least_squares: ArFitJson,
    yule_walker: ArFitJson,
    unbiased: ArFitJson,
}

#[derive(Serialize)]
struct ArTableJson {
    n: usize,
    p: usize,
    methods: ArMethodsJson,
    series: Vec<f64>,
}

struct ThreeFits {
    least_squares: ArFit,
    yule_walker: ArFit,
    unbiased: ArFit,
}

fn fit_three(series: &[f64], p: usize) -> Result<ThreeFits, CliError> {
    Ok(ThreeFits {
        least_squares: fit_ar_ols(series, p)?,
        yule_walker: fit_ar_yule_walker(series, p)?,
        unbiased: fit_ar_unbiased(series, p)?,
    })
}

fn coefficient_column(f: &ArFit) -> Vec<f64> {
    std::iter::once(f.model.phi0)
        .chain(f.model.phi.iter().copied())
        .collect()
}

fn three_method_table(fits: &ThreeFits, digits: Option<usize>) -> String {
    let cols = [&fits.least_squares, &fits.yule_walker, &fits.unbiased].map(coefficient_column);
    let rows: Vec<Vec<String>> = (0..cols[0].len())
        .map(|k| {
            let mut r = vec![format!("φ{k}")];
            r.extend(cols.iter().map(|c| number(c[k], digits)));
            r
        })
        .collect();
    render(&["", "Least-squares", "Yule-Walker", "Unbiased"], &rows)
}

pub fn ar_fit(args: &ArFitArgs, out: Out<'_>) -> Result<(), CliError> {
    let series = load_series(&args.input, args.response.as_deref())?;
    let p = args.p as usize;
    let fits = fit_three(&series, p)?;
    match args.output.format {
        Format::Json => write_json(
            out,
            &ArTableJson {
                n: series.len(),
                p,
                methods: ArMethodsJson {
                    least_squares: (&fits.least_squares).into(),
                    yule_walker: (&fits.yule_walker).into(),
                    unbiased: (&fits.unbiased).into(),
                },
                series,
            },
        ),
        Format::Table => {
            writeln!(out, "AR({p}) fit, n = {}", series.len())?;
            write!(out, "{}", three_method_table(&fits, args.output.digits()))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SimulateJson<'a> {
    phi0: f64,
    phi: &'a [f64],
    sigma: f64,
    n: usize,
    burn_in: usize,
    seed: u64,
    series: &'a [f64],
}

pub fn simulate(args: &SimulateArgs, out: Out<'_>) -> Result<(), CliError> {
    let model = ArModel::new(args.phi0, args.phi.clone(), args.sigma)?;
    let opts = ArSimulation {
        burn_in: args.burn_in,
        allow_nonstationary: args.allow_nonstationary,
    };
    let series = simulate_ar_with(
        &model,
        args.n,
        &opts,
        &mut covreg::GaussianStream::new(args.seed, 0),
    )?;
    match args.format {
        Format::Json => write_json(
            out,
            &SimulateJson {
                phi0: args.phi0,
                phi: &args.phi,
                sigma: args.sigma,
                n: args.n,
                burn_in: args.burn_in,
                seed: args.seed,
                series: &series,
            },
        ),
        Format::Table => {
            for v in &series {
                writeln!(out, "{v}")?;
            }
            Ok(())
        }
    }
}

fn scenario(args: &McBiasArgs) -> Result<SimulationScenario, CliError> {
    Ok(match args.scenario {
        ScenarioKind::Additive => {
            let p = args.slopes.len();
            SimulationScenario::Additive {
                intercept: args.intercept,
                slopes: args.slopes.clone(),
                predictor_means: vec![args.predictor_mean; p],
                predictor_sds: vec![args.predictor_sd; p],
                noise_sd: args.noise_sd,
                n: args.n,
            }
        }
        ScenarioKind::Heteroscedastic => SimulationScenario::Heteroscedastic {
            b1: args.b1,
            b2: args.b2,
            b3: args.b3,
            n: args.n,
        },
        ScenarioKind::Ar => SimulationScenario::Autoregressive {
            model: ArModel::new(args.phi0, args.phi.clone(), args.sigma)?,
            n: args.n,
            burn_in: args.burn_in,
        },
    })
}

#[derive(Serialize)]
struct EstimateJson<'a> {
    name: &'a str,
    truth: f64,
    mean: f64,
    bias: f64,
    std_error: f64,
    z_score: f64,
}

impl<'a> From<&'a EstimateSummary> for EstimateJson<'a> {
    fn from(e: &'a EstimateSummary) -> Self {
        EstimateJson {
            name: &e.name,
            truth: e.truth,
            mean: e.mean,
            bias: e.mean - e.truth,
            std_error: e.std_error,
            z_score: e.z_score,
        }
    }
}

#[derive(Serialize)]
struct BiasJson<'a> {
    scenario: &'static str,
    reps: usize,
    seed: u64,
    coefficients: Vec<EstimateJson<'a>>,
    sigma2: Option<EstimateJson<'a>>,
    mean_sigma2_hat: f64,
    max_coefficient_z: f64,
}

pub fn mc_bias(args: &McBiasArgs, out: Out<'_>) -> Result<(), CliError> {
    let s = scenario(args)?;
    let report: BiasReport = match args.threads {
        Some(t) => {
            if t == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Output(e.to_string()))?;
            pool.install(|| monte_carlo_bias(&s, args.reps, args.seed))?
        }
        None => monte_carlo_bias(&s, args.reps, args.seed)?,
    };
    match args.output.format {
        Format::Json => write_json(
            out,
            &BiasJson {
                scenario: report.scenario,
                reps: report.reps,
                seed: report.seed,
                coefficients: report.coefficients.iter().map(Into::into).collect(),
                sigma2: report.sigma2.as_ref().map(Into::into),
                mean_sigma2_hat: report.mean_sigma2_hat,
                max_coefficient_z: report.max_coefficient_z(),
            },
        ),
        Format::Table => {
            let digits = args.output.digits();
            writeln!(
                out,
                "scenario: {}  reps = {}  seed = {}",
                report.scenario, report.reps, report.seed
            )?;
            let rows: Vec<Vec<String>> = report
                .coefficients
                .iter()
                .chain(report.sigma2.as_ref())
                .map(|e| {
                    vec![
                        e.name.clone(),
                        number(e.truth, digits),
                        number(e.mean, digits),
                        number(e.mean - e.truth, digits),
                        number(e.std_error, digits),
                        number(e.z_score, digits),
                    ]
                })
                .collect();
            write!(
                out,
                "{}",
                render(
                    &["parameter", "truth", "mean", "bias", "std_error", "z"],
                    &rows
                )
            )?;
            writeln!(
                out,
                "mean sigma2_hat: {}",
                number(report.mean_sigma2_hat, digits)
            )?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DeviationJson {
    method: &'static str,
    parameter: String,
    computed: f64,
    published: f64,
    deviation: f64,
    within_tolerance: bool,
}

#[derive(Serialize)]
struct TablesJson {
    tolerance: f64,
    max_deviation: f64,
    within_tolerance: bool,
    unbiased_matches_least_squares: bool,
    rows: Vec<DeviationJson>,
}

pub fn tables(args: &TablesArgs, out: Out<'_>) -> Result<(), CliError> {
    if !(args.tolerance >= 0.0) {
        return Err(CliError::Usage("--tolerance must be non-negative".into()));
    }
    let series = lake_huron();
    let fits = fit_three(&series, 3)?;
    let ls = coefficient_column(&fits.least_squares);
    let ub = coefficient_column(&fits.unbiased);
    let yw = &fits.yule_walker.model.phi;

    let mut rows = Vec::new();
    let mut push = |method: &'static str, k: usize, computed: f64, published: f64| {
        let deviation = (computed - published).abs();
        rows.push(DeviationJson {
            method,
            parameter: format!("φ{k}"),
            computed,
            published,
            deviation,
            within_tolerance: deviation <= args.tolerance,
        });
    };
    for k in 0..4 {
        push("Least-squares", k, ls[k], LAKE_HURON_AR3_LEAST_SQUARES[k]);
    }
    for k in 0..3 {
        push("Yule-Walker", k + 1, yw[k], LAKE_HURON_AR3_YULE_WALKER[k]);
    }
    for k in 0..4 {
        push("Unbiased", k, ub[k], LAKE_HURON_AR3_LEAST_SQUARES[k]);
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let within = rows.iter().all(|r| r.within_tolerance);
    let identical = ls
        .iter()
        .zip(&ub)
        .all(|(a, b)| (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0));

    match args.output.format {
        Format::Json => write_json(
            &mut *out,
            &TablesJson {
                tolerance: args.tolerance,
                max_deviation,
                within_tolerance: within,
                unbiased_matches_least_squares: identical,
                rows,
            },
        )?,
        Format::Table => {
            let digits = args.output.digits();
            writeln!(
                out,
                "Lake Huron, level − 570 ft, 1875–1972 (n = {}), AR(3)",
                series.len()
            )?;
            write!(out, "{}", three_method_table(&fits, digits))?;
            writeln!(out)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.method.to_string(),
                        r.parameter.clone(),
                        number(r.computed, digits),
                        number(r.published, digits),
                        number(r.deviation, Some(2)),
                        if r.within_tolerance {
                            "ok"
                        } else {
                            "DEVIATION"
                        }
                        .to_string(),
                    ]
                })
                .collect();
            write!(
                out,
                "{}",
                render(
                    &[
                        "method",
                        "parameter",
                        "computed",
                        "published",
                        "deviation",
                        "status"
                    ],
                    &table
                )
            )?;
            writeln!(
                out,
                "max deviation {} (tolerance {}); Unbiased column {} Least-squares",
                number(max_deviation, Some(2)),
                args.tolerance,
                if identical { "matches" } else { "differs from" }
            )?;
        }
    }
    if !within {
        return Err(CliError::Deviation(format!(
            "Lake Huron fit deviates from the published values by {max_deviation:e} (tolerance {})",
            args.tolerance
        )));
    }
    if !identical {
        return Err(CliError::Deviation(
            "Unbiased and Least-squares columns differ".into(),
        ));
    }
    Ok(())
}
