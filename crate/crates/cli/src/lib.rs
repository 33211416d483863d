//! Single solver runs and the experiment suite behind the `contour-eig` binary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use contour_eig::diffop::{ContourSpec, ProblemFile};
use contour_eig::{problems, solvers, Complex64, Contour, DiffEigProblem, EigResult, Error, Method, SolverConfig};

pub mod experiments;
mod report;

pub use report::{EigRow, HistoryRow, RunReport, TimingRow};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unknown case, malformed problem file.
    Config(String),
    Solver(Error),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(e) => solver_exit_code(e),
            CliError::Output(_) => 1,
        }
    }
}

fn solver_exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergent { .. } | Error::IllConditioned { .. } => 3,
        Error::PointSolve { source, .. } => solver_exit_code(source),
        Error::InvalidArgument(_) | Error::InvalidProblem(_) | Error::Expression(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "{s}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Output(s) => write!(f, "cannot write output: {s}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Solver(e)
    }
}

pub(crate) fn output_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Command-line settings layered over a case's presets.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub l: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub ell: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub tol_ode: Option<f64>,
    pub threads: Option<usize>,
}

/// A problem ready to hand to a solver.
#[derive(Debug, Clone)]
pub struct Target {
    pub name: String,
    pub problem: DiffEigProblem,
    pub contour: ContourSpec,
    pub config: SolverConfig,
    pub reference: Vec<Complex64>,
    /// Eigenvalue count inside the contour, when known.
    pub expected: Option<usize>,
}

impl Target {
    /// A built-in case name or the path of a problem file.
    pub fn resolve(case: &str, method: Method) -> Result<Target, CliError> {
        if let Some(bc) = problems::builtin_case(case) {
            return Ok(Target {
                name: bc.name().to_string(),
                problem: bc.problem()?,
                contour: bc.contour(method)?.to_spec(),
                config: SolverConfig { ell: if method == Method::Feast { bc.ell_max } else { 1 }, ..bc.config(method) },
                reference: bc.reference().to_vec(),
                expected: Some(bc.m),
            });
        }
        let path = Path::new(case);
        if !path.is_file() {
            let names: Vec<String> = problems::builtin_cases().iter().map(|c| c.name().to_string()).collect();
            return Err(CliError::Config(format!(
                "unknown case `{case}`: not a built-in ({}) and not a readable file",
                names.join(", ")
            )));
        }
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let file = ProblemFile::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let contour = file
            .contour
            .clone()
            .ok_or_else(|| CliError::Config(format!("{}: no contour given", path.display())))?;
        let problem = file.build().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(Target {
            name: file.name.clone(),
            problem,
            config: SolverConfig { n: contour.n, ..SolverConfig::default() },
            contour,
            reference: file.reference_eigenvalues.clone(),
            expected: None,
        })
    }

    pub fn apply(&mut self, ov: &Overrides) {
        let c = &mut self.config;
        c.l = ov.l.unwrap_or(c.l);
        c.m = ov.m.unwrap_or(c.m);
        c.ell = ov.ell.unwrap_or(c.ell);
        c.delta = ov.delta.unwrap_or(c.delta);
        c.seed = ov.seed.unwrap_or(c.seed);
        c.tol_ode = ov.tol_ode.unwrap_or(c.tol_ode);
        c.threads = ov.threads.or(c.threads);
        if let Some(n) = ov.n {
            self.contour.n = n;
        }
        c.n = self.contour.n;
    }

    pub fn build_contour(&self) -> Result<Contour, CliError> {
        Contour::from_spec(&self.contour).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn solve(&self, method: Method) -> Result<EigResult, CliError> {
        self.config.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let contour = self.build_contour()?;
        Ok(solvers::solve(method, &self.problem, &contour, &self.config, None)?)
    }
}

/// Distance from `lambda` to the closest reference value.
pub fn reference_error(reference: &[Complex64], lambda: Complex64) -> Option<f64> {
    reference.iter().map(|r| (r - lambda).norm()).min_by(f64::total_cmp)
}

/// Solves `case` with `method`.
pub fn run(case: &str, method: Method, ov: &Overrides) -> Result<RunReport, CliError> {
    let mut target = Target::resolve(case, method)?;
    target.apply(ov);
    let result = target.solve(method)?;
    Ok(RunReport::new(&target, &result))
}

/// Writes the report files for `report` under `dir`.
pub fn write_report(report: &RunReport, dir: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| output_err(dir, e))?;
    let stem = format!("{}_{}", report.case, report.method);
    match format {
        Format::Json => {
            let path = dir.join(format!("{stem}.json"));
            let text = serde_json::to_string_pretty(report).map_err(|e| output_err(&path, e))?;
            fs::write(&path, text + "\n").map_err(|e| output_err(&path, e))?;
            Ok(vec![path])
        }
        Format::Csv => {
            let eig = dir.join(format!("{stem}_eigenvalues.csv"));
            write_csv(&eig, &report.eigenvalues)?;
            let sv = dir.join(format!("{stem}_singular_values.csv"));
            let rows: Vec<_> = report.singular_values.iter().enumerate().map(|(i, s)| report::SingularRow { index: i + 1, sigma: *s }).collect();
            write_csv(&sv, &rows)?;
            let hist = dir.join(format!("{stem}_history.csv"));
            write_csv(&hist, &report.history)?;
            let tim = dir.join(format!("{stem}_timings.csv"));
            write_csv(&tim, std::slice::from_ref(&report.timings))?;
            Ok(vec![eig, sv, hist, tim])
        }
    }
}

pub(crate) fn write_csv<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| output_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| output_err(path, e))?;
    }
    w.flush().map_err(|e| output_err(path, e))
}
