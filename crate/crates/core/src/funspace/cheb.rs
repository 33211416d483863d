//! Chebyshev-grid kernels: points, value/coefficient transforms, chopping and
//! Clenshaw–Curtis weights on the reference interval [-1, 1].
//!
//! Grids are Chebyshev points of the second kind in ascending order,
//! `x_k = -cos(k π / n)` for `k = 0..=n`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Chebyshev points of the second kind on [-1, 1], ascending.
pub fn points(n_pts: usize) -> Vec<f64> {
    match n_pts {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let n = (n_pts - 1) as f64;
            // symmetric sine form keeps the grid exactly antisymmetric
            (0..n_pts)
                .map(|k| (PI * (2.0 * k as f64 - n) / (2.0 * n)).sin())
                .collect()
        }
    }
}

fn fft_in_place(data: &mut [Complex64]) {
    let len = data.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len));
    fft.process(data);
}

/// Values at `points(len)` to Chebyshev coefficients.
pub fn vals2coeffs(vals: &[Complex64]) -> Vec<Complex64> {
    let n_pts = vals.len();
    if n_pts <= 1 {
        return vals.to_vec();
    }
    let n = n_pts - 1;
    // even extension of the descending-ordered samples
    let mut ext = vec![Complex64::new(0.0, 0.0); 2 * n];
    for k in 0..=n {
        ext[k] = vals[n - k];
    }
    for k in 1..n {
        ext[2 * n - k] = vals[n - k];
    }
    fft_in_place(&mut ext);
    let scale = 1.0 / n as f64;
    let mut c: Vec<Complex64> = ext[..=n].iter().map(|v| v * scale).collect();
    c[0] *= 0.5;
    c[n] *= 0.5;
    c
}

/// Chebyshev coefficients to values at `points(coeffs.len())`.
pub fn coeffs2vals(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n_pts = coeffs.len();
    if n_pts <= 1 {
        return coeffs.to_vec();
    }
    let n = n_pts - 1;
    let mut ext = vec![Complex64::new(0.0, 0.0); 2 * n];
    ext[0] = coeffs[0];
    ext[n] = coeffs[n];
    for j in 1..n {
        let half = coeffs[j] * 0.5;
        ext[j] = half;
        ext[2 * n - j] = half;
    }
    fft_in_place(&mut ext);
    (0..=n).map(|k| ext[n - k]).collect()
}

/// Values of the Chebyshev series `coeffs` on a grid of `n_pts` points. The
/// series is padded when shorter than the grid and evaluated directly when
/// longer.
pub fn values_on_grid(coeffs: &[Complex64], n_pts: usize) -> Vec<Complex64> {
    if coeffs.len() <= n_pts {
        let mut padded = coeffs.to_vec();
        padded.resize(n_pts, Complex64::new(0.0, 0.0));
        coeffs2vals(&padded)
    } else {
        points(n_pts).iter().map(|&t| clenshaw(coeffs, t)).collect()
    }
}

/// Clenshaw evaluation of a Chebyshev series at `t` in [-1, 1].
pub fn clenshaw(coeffs: &[Complex64], t: f64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    match coeffs.len() {
        0 => zero,
        1 => coeffs[0],
        _ => {
            let (mut b1, mut b2) = (zero, zero);
            for c in coeffs[1..].iter().rev() {
                let b0 = c + b1 * (2.0 * t) - b2;
                b2 = b1;
                b1 = b0;
            }
            coeffs[0] + b1 * t - b2
        }
    }
}

thread_local! {
    static CC_CACHE: RefCell<HashMap<usize, Rc<Vec<f64>>>> = RefCell::new(HashMap::new());
}

/// Cached Clenshaw–Curtis weights for `points(n_pts)` on [-1, 1].
pub fn cc_weights(n_pts: usize) -> Rc<Vec<f64>> {
    CC_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry(n_pts)
            .or_insert_with(|| Rc::new(clenshaw_curtis_weights(n_pts)))
            .clone()
    })
}

/// Clenshaw–Curtis weights for `points(n_pts)` on [-1, 1].
pub fn clenshaw_curtis_weights(n_pts: usize) -> Vec<f64> {
    match n_pts {
        0 => return Vec::new(),
        1 => return vec![2.0],
        _ => {}
    }
    let n = n_pts - 1;
    let mut w = vec![0.0; n_pts];
    let theta: Vec<f64> = (0..=n).map(|k| PI * k as f64 / n as f64).collect();
    let inner: Vec<usize> = (1..n).collect();
    let mut v = vec![1.0; inner.len()];
    if n.is_multiple_of(2) {
        w[0] = 1.0 / ((n * n - 1) as f64);
        w[n] = w[0];
        for k in 1..n / 2 {
            let kf = k as f64;
            for (vi, &idx) in v.iter_mut().zip(&inner) {
                *vi -= 2.0 * (2.0 * kf * theta[idx]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        let nf = n as f64;
        for (vi, &idx) in v.iter_mut().zip(&inner) {
            *vi -= (nf * theta[idx]).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / ((n * n) as f64);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (vi, &idx) in v.iter_mut().zip(&inner) {
                *vi -= 2.0 * (2.0 * kf * theta[idx]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (vi, &idx) in v.iter().zip(&inner) {
        w[idx] = 2.0 * vi / n as f64;
    }
    w
}

/// Integral over [-1, 1] of a Chebyshev series.
pub fn integral(coeffs: &[Complex64]) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .step_by(2)
        .map(|(k, c)| c * (2.0 / (1.0 - (k * k) as f64)))
        .sum()
}

/// Coefficients of the derivative (with respect to the reference variable).
pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let mut d = vec![Complex64::new(0.0, 0.0); n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + coeffs[k] * (2.0 * k as f64);
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// Length to keep from a Chebyshev coefficient sequence (plateau-detecting
/// chop of Aurentz and Trefethen). Returns `coeffs.len()` when no plateau
/// below `tol` is found, which callers treat as "not resolved".
pub fn standard_chop(coeffs: &[Complex64], tol: f64) -> usize {
    let n = coeffs.len();
    if tol >= 1.0 {
        return 1;
    }
    if n < 17 {
        return n;
    }
    // monotone envelope, normalised
    let mut env: Vec<f64> = coeffs.iter().map(|c| c.norm()).collect();
    for j in (0..n - 1).rev() {
        env[j] = env[j].max(env[j + 1]);
    }
    if env[0] == 0.0 {
        return 1;
    }
    let top = env[0];
    for e in env.iter_mut() {
        *e /= top;
    }

    let log_tol = tol.ln();
    let mut plateau_point = 0;
    let mut j2 = 0;
    let mut found = false;
    // 1-based j as in the reference formulation
    for j in 2..=n {
        j2 = (1.25 * j as f64 + 5.0).round() as usize;
        if j2 > n {
            return n;
        }
        let e1 = env[j - 1];
        let e2 = env[j2 - 1];
        let r = 3.0 * (1.0 - e1.ln() / log_tol);
        if e1 == 0.0 || e2 / e1 > r {
            plateau_point = j - 1;
            found = true;
            break;
        }
    }
    if !found {
        return n;
    }
    if env[plateau_point - 1] == 0.0 {
        return plateau_point;
    }
    let floor = tol.powf(7.0 / 6.0);
    let j3 = env.iter().filter(|&&e| e >= floor).count();
    if j3 < j2 {
        j2 = j3 + 1;
        env[j2 - 1] = floor;
    }
    let ramp = -(1.0 / 3.0) * tol.log10();
    let mut best = f64::INFINITY;
    let mut d = 1;
    for (idx, e) in env[..j2].iter().enumerate() {
        let slope = if j2 > 1 { ramp * idx as f64 / (j2 - 1) as f64 } else { 0.0 };
        let cc = e.log10() + slope;
        if cc < best {
            best = cc;
            d = idx + 1;
        }
    }
    (d - 1).max(1)
}
