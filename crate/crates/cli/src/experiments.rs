//! Data generators for the numerical experiments. Every generator writes CSV
//! files into the output directory and prints a short summary.

use std::fs;
use std::path::{Path, PathBuf};

use contour_eig::contour::convergence_rate_estimate;
use contour_eig::problems::{self, discrete_laplace_eigs, perf_model_total_time, PerfModelInput};
use contour_eig::{Complex64, Contour, Method, SolverConfig};
use serde::Serialize;

use crate::{output_err, write_csv, CliError, Overrides, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    /// Laplace: discretize-then-solve error curve and the contour solution.
    Exp1,
    /// Laplace: residual histories under subspace iteration.
    Exp2,
    /// All benchmark problems with every method.
    Exp3,
    /// Modelled strong scaling.
    Exp4,
    /// Filter magnitude along the real axis.
    Filterfig,
}

#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub out: PathBuf,
    pub overrides: Overrides,
    /// Restricts exp3 and exp4 to one case.
    pub case: Option<String>,
}

/// Sweep counts of the residual-history runs.
pub const EXP2_SWEEPS: usize = 6;
/// Largest process count of the scaling curves.
pub const MAX_PROCESSES: usize = 1024;
pub const FILTER_ORDERS: [usize; 3] = [16, 32, 64];
pub const FILTER_GRID: usize = 601;

const BENCHMARK_CASES: [&str; 6] = ["mathieu", "schrodinger", "bessel", "sturm_liouville", "orr_sommerfeld_1000", "orr_sommerfeld_2000"];

pub fn run_experiment(id: Experiment, opts: &ExperimentOptions) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&opts.out).map_err(|e| output_err(&opts.out, e))?;
    match id {
        Experiment::Exp1 => exp1(opts),
        Experiment::Exp2 => exp2(opts),
        Experiment::Exp3 => exp3(opts),
        Experiment::Exp4 => exp4(opts),
        Experiment::Filterfig => filterfig(&opts.out),
    }
}

fn target(case: &str, method: Method, ov: &Overrides) -> Result<Target, CliError> {
    let mut t = Target::resolve(case, method)?;
    t.apply(ov);
    Ok(t)
}

#[derive(Serialize)]
struct DiscreteRow {
    n: usize,
    err1: f64,
    err2: f64,
    err3: f64,
    err4: f64,
}

#[derive(Serialize)]
struct LaplaceRow {
    i: usize,
    exact: f64,
    re: f64,
    im: f64,
    abs_error: f64,
    residual: f64,
}

fn exp1(opts: &ExperimentOptions) -> Result<Vec<PathBuf>, CliError> {
    let mut sizes: Vec<usize> = (4..=24).map(|k| 10f64.powf(k as f64 / 4.0).round() as usize).collect();
    sizes.dedup();
    let rows: Vec<DiscreteRow> = sizes
        .iter()
        .map(|&n| {
            let e = discrete_laplace_eigs(n);
            let err = |i: usize| (e[i - 1] - (i * i) as f64).abs();
            DiscreteRow { n, err1: err(1), err2: err(2), err3: err(3), err4: err(4) }
        })
        .collect();
    let discrete = opts.out.join("exp1_discrete.csv");
    write_csv(&discrete, &rows)?;

    let t = target("laplace", Method::SsRr, &opts.overrides)?;
    let res = t.solve(Method::SsRr)?;
    let inside: Vec<_> = res.in_region().collect();
    let rows: Vec<LaplaceRow> = inside
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let exact = ((k + 1) * (k + 1)) as f64;
            LaplaceRow { i: k + 1, exact, re: p.lambda.re, im: p.lambda.im, abs_error: (p.lambda - exact).norm(), residual: p.residual }
        })
        .collect();
    let contour = opts.out.join("exp1_contour.csv");
    write_csv(&contour, &rows)?;

    let e4 = discrete_laplace_eigs(1000)[3] - 16.0;
    println!("discretized Laplacian, n = 1000: lambda_4 error {:.3e}", e4.abs());
    println!("{:>3}  {:>6}  {:>24}  {:>10}", "i", "exact", "computed", "|error|");
    for r in &rows {
        println!("{:>3}  {:>6}  {:>24.16e}  {:>10.3e}", r.i, r.exact, r.re, r.abs_error);
    }
    Ok(vec![discrete, contour])
}

#[derive(Serialize)]
struct HistoryPoint {
    method: String,
    l: usize,
    m: usize,
    iteration: usize,
    max_residual: f64,
}

#[derive(Serialize)]
struct RateRow {
    method: String,
    l: usize,
    m: usize,
    observed: f64,
    predicted: f64,
}

/// Below this the residual history is at its floor and no longer contracts.
const RESIDUAL_FLOOR: f64 = 1e-11;

fn exp2(opts: &ExperimentOptions) -> Result<Vec<PathBuf>, CliError> {
    let runs = [
        (Method::Feast, 4, 1),
        (Method::Feast, 8, 1),
        (Method::Feast, 16, 1),
        (Method::SsRr, 4, 1),
        (Method::SsRr, 8, 1),
        (Method::SsRr, 4, 2),
        (Method::SsRr, 8, 2),
    ];
    let n = 4;
    let contour = Contour::ellipse(Complex64::new(10.0, 0.0), 10.0, 1.0, n)?;
    let spectrum: Vec<Complex64> = (1..=200).map(|k| Complex64::new((k * k) as f64, 0.0)).collect();
    let problem = problems::laplace().problem()?;
    let mut history = Vec::new();
    let mut rates = Vec::new();
    for (method, l, m) in runs {
        let ov = &opts.overrides;
        let config = SolverConfig {
            seed: ov.seed.unwrap_or(0),
            threads: ov.threads,
            tol_ode: ov.tol_ode.unwrap_or(1e-12),
            ..SolverConfig::new(l, m, n).with_ell(ov.ell.unwrap_or(EXP2_SWEEPS))
        };
        let res = contour_eig::solvers::solve(method, &problem, &contour, &config, None)?;
        let worst: Vec<f64> = res.history.iter().map(|h| h.max_in_region_residual().unwrap_or(f64::NAN)).collect();
        for (i, w) in worst.iter().enumerate() {
            history.push(HistoryPoint { method: method.name().into(), l, m, iteration: i + 1, max_residual: *w });
        }
        let ratios: Vec<f64> = worst.windows(2).filter(|w| w[1] > RESIDUAL_FLOOR && w[0] > 0.0).map(|w| w[1] / w[0]).collect();
        let observed = if ratios.is_empty() {
            f64::NAN
        } else {
            (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp()
        };
        let predicted = convergence_rate_estimate(&contour, &spectrum, l, m)?;
        rates.push(RateRow { method: method.name().into(), l, m, observed, predicted });
    }
    let hpath = opts.out.join("exp2_history.csv");
    write_csv(&hpath, &history)?;
    let rpath = opts.out.join("exp2_rates.csv");
    write_csv(&rpath, &rates)?;
    println!("{:>8}  {:>3}  {:>3}  {:>10}  {:>10}", "method", "L", "M", "observed", "predicted");
    for r in &rates {
        println!("{:>8}  {:>3}  {:>3}  {:>10.3e}  {:>10.3e}", r.method, r.l, r.m, r.observed, r.predicted);
    }
    Ok(vec![hpath, rpath])
}

#[derive(Serialize)]
struct PairRow {
    case: String,
    method: String,
    iteration: usize,
    re: f64,
    im: f64,
    residual: f64,
    in_region: bool,
}

#[derive(Serialize)]
struct CaseTiming {
    case: String,
    method: String,
    ell: usize,
    in_region: usize,
    expected: Option<usize>,
    max_in_region_residual: f64,
    solve_odes: f64,
    orthonormalization: f64,
    matrix_eig: f64,
    misc: f64,
    total: f64,
    ode_solves: usize,
}

fn selected_cases(opts: &ExperimentOptions, default: &[&str]) -> Vec<String> {
    match &opts.case {
        Some(c) => vec![c.clone()],
        None => default.iter().map(|s| s.to_string()).collect(),
    }
}

fn exp3(opts: &ExperimentOptions) -> Result<Vec<PathBuf>, CliError> {
    let mut pairs = Vec::new();
    let mut timings = Vec::new();
    for case in selected_cases(opts, &BENCHMARK_CASES) {
        for method in Method::ALL {
            let t = target(&case, method, &opts.overrides)?;
            let res = t.solve(method)?;
            for h in &res.history {
                for i in 0..h.lambdas.len() {
                    pairs.push(PairRow {
                        case: t.name.clone(),
                        method: method.name().into(),
                        iteration: h.iteration,
                        re: h.lambdas[i].re,
                        im: h.lambdas[i].im,
                        residual: h.residuals[i],
                        in_region: h.in_region[i],
                    });
                }
            }
            let tm = &res.timings;
            let row = CaseTiming {
                case: t.name.clone(),
                method: method.name().into(),
                ell: t.config.ell,
                in_region: res.in_region().count(),
                expected: t.expected,
                max_in_region_residual: res.in_region().map(|p| p.residual).fold(0.0, f64::max),
                solve_odes: tm.solve_odes,
                orthonormalization: tm.orthonormalization,
                matrix_eig: tm.matrix_eig,
                misc: tm.misc(),
                total: tm.total,
                ode_solves: res.ode_solves(),
            };
            println!(
                "{:<20} {:<9} ell={} inside {:>3} (expected {:>3})  max residual {:.2e}  {:.2} s",
                row.case,
                row.method,
                row.ell,
                row.in_region,
                row.expected.map_or("-".into(), |m| m.to_string()),
                row.max_in_region_residual,
                row.total
            );
            timings.push(row);
        }
    }
    let ppath = opts.out.join("exp3_pairs.csv");
    write_csv(&ppath, &pairs)?;
    let tpath = opts.out.join("exp3_timings.csv");
    write_csv(&tpath, &timings)?;
    Ok(vec![ppath, tpath])
}

#[derive(Serialize)]
struct ScalingRow {
    method: String,
    processes: usize,
    total_time: f64,
    speedup: f64,
}

#[derive(Serialize)]
struct ModelInput {
    method: String,
    input: PerfModelInput,
}

fn exp4(opts: &ExperimentOptions) -> Result<Vec<PathBuf>, CliError> {
    let case = opts.case.clone().unwrap_or_else(|| "orr_sommerfeld_2000".into());
    let mut rows = Vec::new();
    let mut inputs = Vec::new();
    for method in Method::ALL {
        let t = target(&case, method, &opts.overrides)?;
        let res = t.solve(method)?;
        let l = t.config.l;
        let npts = res.moments[0].point_seconds.len();
        let mut t_ode = vec![0.0; npts];
        for d in &res.moments {
            for (acc, s) in t_ode.iter_mut().zip(&d.point_seconds) {
                *acc += s / (l * res.moments.len()) as f64;
            }
        }
        let input = PerfModelInput {
            t_ode,
            t_qp: 0.0,
            t_other: (res.timings.total - res.timings.solve_odes).max(0.0),
            l,
            ell: t.config.ell,
        };
        let serial = perf_model_total_time(&input, 1)?;
        for p in 1..=MAX_PROCESSES {
            let total = perf_model_total_time(&input, p)?;
            rows.push(ScalingRow { method: method.name().into(), processes: p, total_time: total, speedup: serial / total });
        }
        let last = perf_model_total_time(&input, MAX_PROCESSES)?;
        println!(
            "{:<9} ell={}  T(1) = {:.3} s  T({MAX_PROCESSES}) = {:.3} s  speedup {:.1}",
            method.name(),
            input.ell,
            serial,
            last,
            serial / last
        );
        inputs.push(ModelInput { method: method.name().into(), input });
    }
    let spath = opts.out.join("exp4_scaling.csv");
    write_csv(&spath, &rows)?;
    let ipath = opts.out.join("exp4_inputs.json");
    let text = serde_json::to_string_pretty(&inputs).map_err(|e| output_err(&ipath, e))?;
    fs::write(&ipath, text + "\n").map_err(|e| output_err(&ipath, e))?;
    Ok(vec![spath, ipath])
}

#[derive(Serialize)]
struct FilterRow {
    n: usize,
    re: f64,
    im: f64,
    abs_f: f64,
}

fn filterfig(out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut rows = Vec::new();
    for n in FILTER_ORDERS {
        let ct = Contour::ellipse(Complex64::new(0.0, 0.0), 1.0, 1.0, n)?;
        for k in 0..FILTER_GRID {
            let x = -3.0 + 6.0 * k as f64 / (FILTER_GRID - 1) as f64;
            let f = ct.filter(Complex64::new(x, 0.0))?;
            rows.push(FilterRow { n, re: x, im: 0.0, abs_f: f.norm() });
        }
    }
    let path = out.join("filterfig.csv");
    write_csv(&path, &rows)?;
    for n in FILTER_ORDERS {
        let at = |x: f64| rows.iter().find(|r| r.n == n && r.re == x).map_or(f64::NAN, |r| r.abs_f);
        println!("N = {n:>2}: |f(0)| = {:.6}  |f(1.5)| = {:.3e}  |f(3)| = {:.3e}", at(0.0), at(1.5), at(3.0));
    }
    Ok(vec![path])
}
