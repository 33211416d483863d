//! JSON problem files.
//!
//! ```json
//! {
//!   "name": "laplace",
//!   "domain": [0.0, 3.141592653589793],
//!   "a": ["0", "0", "-1"],
//!   "b": ["1"],
//!   "bc": [{"left": [1.0]}, {"right": [1.0]}],
//!   "contour": {"kind": "ellipse", "gamma_re": 10.0, "gamma_im": 0.0,
//!               "rho": 10.0, "alpha": 1.0, "N": 16, "symmetry": true}
//! }
//! ```
//!
//! `a` and `b` list the coefficients `c_0, c_1, ...` of each operator as
//! expressions in `x`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::{BoundaryCondition, BoundaryConditions, DiffEigProblem, DiffOp};
use crate::error::{Error, Result};
use crate::funspace::{Fun, Interval};

pub type BcSpec = BoundaryCondition;

const COEFF_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourShape {
    Ellipse,
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub kind: ContourShape,
    pub gamma_re: f64,
    #[serde(default)]
    pub gamma_im: f64,
    pub rho: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "yes")]
    pub symmetry: bool,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub name: String,
    pub domain: [f64; 2],
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub bc: Vec<BcSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour: Option<ContourSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference_eigenvalues: Vec<Complex64>,
}

fn coefficient(domain: Interval, src: &str) -> Result<Fun> {
    let e = Expr::parse(src)?;
    if !e.depends_on_x() {
        return Ok(Fun::constant(domain, e.eval(0.0)));
    }
    Fun::from_fn(domain, COEFF_TOL, |x| e.eval(x))
}

fn operator(domain: Interval, coeffs: &[String]) -> Result<DiffOp> {
    if coeffs.is_empty() {
        return Err(Error::InvalidProblem("operator needs at least one coefficient".into()));
    }
    let funs = coeffs.iter().map(|s| coefficient(domain, s)).collect::<Result<Vec<_>>>()?;
    DiffOp::new(domain, funs)
}

impl ProblemFile {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn interval(&self) -> Result<Interval> {
        Interval::new(self.domain[0], self.domain[1])
    }

    pub fn build(&self) -> Result<DiffEigProblem> {
        let domain = self.interval()?;
        let a = operator(domain, &self.a)?;
        let b = operator(domain, &self.b)?;
        DiffEigProblem::new(a, b, BoundaryConditions(self.bc.clone()))
    }
}
