use std::fmt;

use contour_eig::diffop::ContourSpec;
use contour_eig::{EigResult, Fun, SolverConfig};
use serde::Serialize;

use crate::{reference_error, Target};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigRow {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub in_region: bool,
    /// `|f_N(λ)|`.
    pub filter_abs: f64,
    /// Distance to the nearest reference eigenvalue.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub in_region: bool,
}

/// Seconds per category; `misc` is whatever the others leave of `total`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub solve_odes: f64,
    pub orthonormalization: f64,
    pub matrix_eig: f64,
    pub misc: f64,
    pub total: f64,
    pub ode_solves: usize,
}

#[derive(Debug, Clone, Serialize)]
pub(crate) struct SingularRow {
    pub index: usize,
    pub sigma: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub case: String,
    pub method: String,
    pub config: SolverConfig,
    pub contour: ContourSpec,
    pub rank: usize,
    pub in_region: usize,
    pub expected_in_region: Option<usize>,
    pub eigenvalues: Vec<EigRow>,
    pub singular_values: Vec<f64>,
    pub history: Vec<HistoryRow>,
    pub timings: TimingRow,
    /// Same order as `eigenvalues`.
    pub eigenfunctions: Vec<Fun>,
}

impl RunReport {
    pub fn new(target: &Target, result: &EigResult) -> Self {
        let eigenvalues = result
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| EigRow {
                index: i + 1,
                re: p.lambda.re,
                im: p.lambda.im,
                residual: p.residual,
                in_region: p.in_region,
                filter_abs: p.filter_abs,
                error: if p.in_region { reference_error(&target.reference, p.lambda) } else { None },
            })
            .collect();
        let history = result
            .history
            .iter()
            .flat_map(|h| {
                (0..h.lambdas.len()).map(move |i| HistoryRow {
                    iteration: h.iteration,
                    index: i + 1,
                    re: h.lambdas[i].re,
                    im: h.lambdas[i].im,
                    residual: h.residuals[i],
                    in_region: h.in_region[i],
                })
            })
            .collect();
        let t = &result.timings;
        RunReport {
            case: target.name.clone(),
            method: result.method.name().to_string(),
            config: target.config.clone(),
            contour: target.contour.clone(),
            rank: result.rank,
            in_region: result.in_region().count(),
            expected_in_region: target.expected,
            eigenvalues,
            singular_values: result.singular_values.clone(),
            history,
            timings: TimingRow {
                solve_odes: t.solve_odes,
                orthonormalization: t.orthonormalization,
                matrix_eig: t.matrix_eig,
                misc: t.misc(),
                total: t.total,
                ode_solves: result.ode_solves(),
            },
            eigenfunctions: result.pairs.iter().map(|p| p.u.clone()).collect(),
        }
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "{} / {}   L={} M={} N={} ell={} seed={}   rank {}",
            self.case, self.method, c.l, c.m, c.n, c.ell, c.seed, self.rank
        )?;
        writeln!(f, "{:>4}  {:>24}  {:>24}  {:>10}  {:>6}  {:>10}", "#", "Re(lambda)", "Im(lambda)", "residual", "inside", "|error|")?;
        for r in &self.eigenvalues {
            let err = r.error.map_or_else(|| "-".to_string(), |e| format!("{e:.3e}"));
            writeln!(
                f,
                "{:>4}  {:>24.16e}  {:>24.16e}  {:>10.3e}  {:>6}  {:>10}",
                r.index,
                r.re,
                r.im,
                r.residual,
                if r.in_region { "yes" } else { "no" },
                err
            )?;
        }
        match self.expected_in_region {
            Some(m) => writeln!(f, "inside the contour: {} (expected {m})", self.in_region)?,
            None => writeln!(f, "inside the contour: {}", self.in_region)?,
        }
        let t = &self.timings;
        writeln!(
            f,
            "time [s]: solve ODEs {:.3}  orthonormalization {:.3}  matrix eig {:.3}  misc {:.3}  total {:.3}  ({} ODE solves)",
            t.solve_odes, t.orthonormalization, t.matrix_eig, t.misc, t.total, t.ode_solves
        )?;
        let sv: Vec<String> = self.singular_values.iter().map(|s| format!("{s:.3e}")).collect();
        write!(f, "singular values: {}", sv.join(" "))
    }
}
