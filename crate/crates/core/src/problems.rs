//! Built-in benchmark problems, the discrete Laplacian comparison and the
//! parallel performance model.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::Contour;
use crate::diffop::{BcSpec, ContourShape, ContourSpec, DiffEigProblem, ProblemFile};
use crate::error::{Error, Result};
use crate::solvers::{Method, SolverConfig};

/// Half-width of the smoothed potential steps in the Schrödinger case.
pub const SCHRODINGER_WIDTH: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsPreset {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeastPreset {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCase {
    /// Operators, boundary conditions, contour and reference values.
    pub file: ProblemFile,
    /// Number of eigenvalues inside the contour.
    pub m: usize,
    pub ss: SsPreset,
    pub feast: FeastPreset,
    /// Largest number of filter sweeps used with this case.
    pub ell_max: usize,
}

impl BenchmarkCase {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn problem(&self) -> Result<DiffEigProblem> {
        self.file.build()
    }

    /// Contour with the point count preset for `method`.
    pub fn contour(&self, method: Method) -> Result<Contour> {
        let mut spec = self.file.contour.clone().expect("builtin cases carry a contour");
        spec.n = self.config(method).n;
        Contour::from_spec(&spec)
    }

    pub fn config(&self, method: Method) -> SolverConfig {
        match method {
            Method::Feast => SolverConfig::new(self.feast.l, 1, self.feast.n),
            _ => SolverConfig::new(self.ss.l, self.ss.m, self.ss.n),
        }
    }

    pub fn reference(&self) -> &[Complex64] {
        &self.file.reference_eigenvalues
    }
}

fn real(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn ellipse(gamma_re: f64, gamma_im: f64, rho: f64, alpha: f64, n: usize) -> Option<ContourSpec> {
    Some(ContourSpec { kind: ContourShape::Ellipse, gamma_re, gamma_im, rho, alpha, n, symmetry: true })
}

fn dirichlet() -> Vec<BcSpec> {
    vec![BcSpec::left(&[1.0]), BcSpec::right(&[1.0])]
}

fn clamped() -> Vec<BcSpec> {
    vec![BcSpec::left(&[1.0]), BcSpec::left(&[0.0, 1.0]), BcSpec::right(&[1.0]), BcSpec::right(&[0.0, 1.0])]
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// `−u'' = λu` on `[0, π]`.
pub fn laplace() -> BenchmarkCase {
    BenchmarkCase {
        file: ProblemFile {
            name: "laplace".into(),
            domain: [0.0, std::f64::consts::PI],
            a: strings(&["0", "0", "-1"]),
            b: strings(&["1"]),
            bc: dirichlet(),
            contour: ellipse(10.0, 0.0, 10.0, 1.0, 16),
            reference_eigenvalues: real(&[1.0, 4.0, 9.0, 16.0]),
        },
        m: 4,
        ss: SsPreset { l: 3, m: 2, n: 16 },
        feast: FeastPreset { l: 8, n: 16 },
        ell_max: 3,
    }
}

/// `−u'' + 4 cos(2x) u = λu` on `[0, π/2]`.
pub fn mathieu() -> BenchmarkCase {
    BenchmarkCase {
        file: ProblemFile {
            name: "mathieu".into(),
            domain: [0.0, std::f64::consts::FRAC_PI_2],
            a: strings(&["4*cos(2*x)", "0", "-1"]),
            b: strings(&["1"]),
            bc: dirichlet(),
            contour: ellipse(500.0, 0.0, 500.0, 0.1, 16),
            // characteristic values b_2, b_4, ..., b_30 at q = 2
            reference_eigenvalues: real(&[
                3.6722327064971907,
                16.127687952522628,
                36.057207000293964,
                64.0317569415056,
                100.02020474281116,
                144.01398690206722,
                196.01025675693444,
                256.00784329126634,
                324.00619202590684,
                400.0050125712229,
                484.0041408091865,
                576.0034782741442,
                676.0029629711571,
                784.0025542836603,
                900.0022246975661,
            ]),
        },
        m: 15,
        ss: SsPreset { l: 5, m: 8, n: 16 },
        feast: FeastPreset { l: 20, n: 16 },
        ell_max: 3,
    }
}

/// `−0.01 u'' + V u = λu` on `[−1, 1]`, with `V` a smoothed step of
/// height 1.5 on `[−0.2, 0.3]`.
pub fn schrodinger() -> BenchmarkCase {
    let w = SCHRODINGER_WIDTH;
    BenchmarkCase {
        file: ProblemFile {
            name: "schrodinger".into(),
            domain: [-1.0, 1.0],
            a: vec![format!("0.75*(tanh((x + 0.2)/{w}) - tanh((x - 0.3)/{w}))"), "0".into(), "-0.01".into()],
            b: strings(&["1"]),
            bc: dirichlet(),
            contour: ellipse(5.0, 0.0, 5.0, 0.1, 16),
            reference_eigenvalues: Vec::new(),
        },
        m: 19,
        ss: SsPreset { l: 5, m: 8, n: 16 },
        feast: FeastPreset { l: 20, n: 16 },
        ell_max: 3,
    }
}

/// `x²u'' + xu' − u = −λx²u` on `[0, 1]`.
pub fn bessel() -> BenchmarkCase {
    BenchmarkCase {
        file: ProblemFile {
            name: "bessel".into(),
            domain: [0.0, 1.0],
            a: strings(&["-1", "x", "x^2"]),
            b: strings(&["-x^2"]),
            bc: dirichlet(),
            contour: ellipse(1750.0, 0.0, 1250.0, 0.1, 16),
            // squares of the zeros j_{1,7}, ..., j_{1,17}
            reference_eigenvalues: real(&[
                518.021441011703,
                671.0002276228597,
                843.71824793686,
                1036.1754927709891,
                1248.3719568137133,
                1480.307636820322,
                1731.9825307182741,
                2003.3966371336448,
                2294.549955126557,
                2605.4424840365026,
                2936.074223388334,
            ]),
        },
        m: 11,
        ss: SsPreset { l: 5, m: 8, n: 16 },
        feast: FeastPreset { l: 15, n: 16 },
        ell_max: 3,
    }
}

/// `−u'' + x²u = λ cosh(x) u` on `[−1, 1]`.
pub fn sturm_liouville() -> BenchmarkCase {
    BenchmarkCase {
        file: ProblemFile {
            name: "sturm_liouville".into(),
            domain: [-1.0, 1.0],
            a: strings(&["x^2", "0", "-1"]),
            b: strings(&["cosh(x)"]),
            bc: dirichlet(),
            contour: ellipse(600.0, 0.0, 400.0, 0.1, 16),
            reference_eigenvalues: Vec::new(),
        },
        m: 12,
        ss: SsPreset { l: 5, m: 8, n: 16 },
        feast: FeastPreset { l: 15, n: 16 },
        ell_max: 3,
    }
}

/// Orr–Sommerfeld operator for plane Poiseuille flow, `α = 1`, clamped walls.
pub fn orr_sommerfeld(re: u32) -> BenchmarkCase {
    let (m, ss, feast) = if re >= 2000 {
        (28, SsPreset { l: 20, m: 8, n: 32 }, FeastPreset { l: 40, n: 32 })
    } else {
        (18, SsPreset { l: 10, m: 8, n: 32 }, FeastPreset { l: 20, n: 32 })
    };
    BenchmarkCase {
        file: ProblemFile {
            name: format!("orr_sommerfeld_{re}"),
            domain: [-1.0, 1.0],
            a: vec![
                format!("1/{re} - 2*i + i*(1 - x^2)"),
                "0".into(),
                format!("-2/{re} - i*(1 - x^2)"),
                "0".into(),
                format!("1/{re}"),
            ],
            b: strings(&["-1", "0", "1"]),
            bc: clamped(),
            contour: ellipse(-0.4, -0.6, 0.5, 1.0, ss.n),
            reference_eigenvalues: Vec::new(),
        },
        m,
        ss,
        feast,
        ell_max: 2,
    }
}

pub fn builtin_cases() -> Vec<BenchmarkCase> {
    vec![
        laplace(),
        mathieu(),
        schrodinger(),
        bessel(),
        sturm_liouville(),
        orr_sommerfeld(1000),
        orr_sommerfeld(2000),
    ]
}

pub fn builtin_case(name: &str) -> Option<BenchmarkCase> {
    builtin_cases().into_iter().find(|c| c.name() == name)
}

/// Eigenvalues of the `n`-point second-difference Laplacian on `[0, π]`,
/// ascending.
pub fn discrete_laplace_eigs(n: usize) -> Vec<f64> {
    let h = std::f64::consts::PI / (n + 1) as f64;
    (1..=n).map(|i| (2.0 - 2.0 * (i as f64 * h).cos()) / (h * h)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfModelInput {
    /// Time of one ODE solve at each quadrature point.
    pub t_ode: Vec<f64>,
    pub t_qp: f64,
    pub t_other: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub ell: usize,
}

impl PerfModelInput {
    pub fn n(&self) -> usize {
        self.t_ode.len()
    }
}

/// Modelled wall time on `p` processes. Points are dealt round-robin in
/// order of decreasing cost.
pub fn perf_model_total_time(input: &PerfModelInput, p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidArgument("process count must be at least 1".into()));
    }
    let times = &input.t_ode;
    if times.is_empty() || input.l == 0 || input.ell == 0 {
        return Err(Error::InvalidArgument("performance model needs N, L, ell ≥ 1".into()));
    }
    if times.iter().chain([&input.t_qp, &input.t_other]).any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument("times must be finite and nonnegative".into()));
    }
    let (l, n, ell) = (input.l as f64, times.len(), input.ell as f64);
    if p <= n {
        let mut sorted = times.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut loads = vec![0.0; p];
        for (k, t) in sorted.iter().enumerate() {
            loads[k % p] += l * t;
        }
        let worst = loads.into_iter().fold(0.0, f64::max);
        Ok(ell * (worst + input.t_qp) + input.t_other)
    } else {
        let per = (input.l * n).div_ceil(p) as f64;
        let tmax = times.iter().copied().fold(0.0, f64::max);
        Ok(ell * per * tmax + input.t_qp + input.t_other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(p: usize) -> f64 {
        let input = PerfModelInput { t_ode: vec![1.0; 8], t_qp: 0.0, t_other: 0.0, l: 1, ell: 1 };
        perf_model_total_time(&input, p).unwrap()
    }

    #[test]
    fn perf_model_hand_values() {
        assert_eq!(uniform(8), 1.0);
        assert_eq!(uniform(1), 8.0);
        assert_eq!(uniform(16), 1.0);
    }

    #[test]
    fn cases_build() {
        for c in builtin_cases() {
            let p = c.problem().unwrap();
            assert_eq!(p.order(), c.file.bc.len(), "{}", c.name());
            assert_eq!(c.contour(Method::SsRr).unwrap().n(), c.ss.n);
        }
        assert_eq!(builtin_case("bessel").unwrap().m, 11);
        assert!(builtin_case("nope").is_none());
    }

    #[test]
    fn discrete_laplace_is_monotone() {
        let e = discrete_laplace_eigs(50);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
    }
}
