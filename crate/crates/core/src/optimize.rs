//! One-dimensional search helpers shared by the constant and norm modules.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Stops when the bracket is narrower than `tol`; returns `(x, f(x))`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 500 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_min(|x| -f(x), a, b, tol);
    (x, -v)
}

/// Bisection for a root of an increasing function `g` with `g(lo) < 0 <= g(hi)`.
/// Returns the final bracket.
pub fn bisect_increasing<F: FnMut(f64) -> f64>(
    mut g: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(g(lo) < 0.0 && g(hi) >= 0.0) {
        return Err(Error::NoConvergence(format!("[{lo}, {hi}] does not bracket a root")));
    }
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}


/// Outcome of [`lbfgs_maximize`].
#[derive(Debug, Clone)]
pub struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Limited-memory BFGS ascent with Armijo backtracking.
///
/// `objective` returns the value and writes the gradient into its second
/// argument; it may return `-inf` for points outside the domain. Stops when
/// the relative gain of an iteration stays below `tol` three times in a row,
/// when the line search fails, or after `max_iter` iterations.
pub fn lbfgs_maximize<F>(mut objective: F, x0: Vec<f64>, tol: f64, max_iter: usize) -> AscentResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    const MEMORY: usize = 8;
    let n = x0.len();
    let mut x = x0;
    let mut grad = vec![0.0; n];
    let mut value = objective(&x, &mut grad);
    let mut hist_s: Vec<Vec<f64>> = Vec::new();
    let mut hist_y: Vec<Vec<f64>> = Vec::new();
    let mut stalls = 0;
    let mut converged = false;
    let mut iterations = 0;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    if !value.is_finite() {
        return AscentResult { x, value, iterations, converged };
    }
    let mut trial = vec![0.0; n];
    let mut trial_grad = vec![0.0; n];
    while iterations < max_iter {
        iterations += 1;
        // two-loop recursion on the ascent direction
        let mut dir = grad.clone();
        let mut alphas = Vec::with_capacity(hist_s.len());
        for (s, y) in hist_s.iter().zip(&hist_y).rev() {
            let rho = 1.0 / dot(y, s);
            let a = rho * dot(s, &dir);
            dir.iter_mut().zip(y).for_each(|(d, yi)| *d -= a * yi);
            alphas.push((a, rho));
        }
        if let (Some(s), Some(y)) = (hist_s.last(), hist_y.last()) {
            let gamma = dot(s, y) / dot(y, y);
            dir.iter_mut().for_each(|d| *d *= gamma);
        } else {
            let gn = dot(&grad, &grad).sqrt();
            let xn = dot(&x, &x).sqrt().max(1.0);
            if gn == 0.0 {
                converged = true;
                break;
            }
            let scale = 0.1 * xn / gn;
            dir.iter_mut().for_each(|d| *d *= scale);
        }
        for ((s, y), (a, rho)) in hist_s.iter().zip(&hist_y).zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &dir);
            dir.iter_mut().zip(s).for_each(|(d, si)| *d += (a - b) * si);
        }
        let mut slope = dot(&dir, &grad);
        if !(slope > 0.0) {
            // not an ascent direction: restart from the gradient
            hist_s.clear();
            hist_y.clear();
            let gn = dot(&grad, &grad).sqrt();
            if gn == 0.0 {
                converged = true;
                break;
            }
            let scale = 0.1 * dot(&x, &x).sqrt().max(1.0) / gn;
            dir = grad.iter().map(|g| g * scale).collect();
            slope = dot(&dir, &grad);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            trial.iter_mut().zip(&x).zip(&dir).for_each(|((t, xi), d)| *t = xi + step * d);
            let v = objective(&trial, &mut trial_grad);
            if v.is_finite() && v >= value + 1e-4 * step * slope {
                accepted = Some(v);
                break;
            }
            step *= 0.5;
        }
        let Some(new_value) = accepted else {
            converged = true;
            break;
        };
        let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        // curvature pairs for a maximization: y = g_old - g_new
        let y: Vec<f64> = grad.iter().zip(&trial_grad).map(|(a, b)| a - b).collect();
        if dot(&s, &y) > 1e-300 {
            hist_s.push(s);
            hist_y.push(y);
            if hist_s.len() > MEMORY {
                hist_s.remove(0);
                hist_y.remove(0);
            }
        }
        let gain = (new_value - value).abs() / value.abs().max(1e-300);
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut grad, &mut trial_grad);
        value = new_value;
        if gain < tol {
            stalls += 1;
            if stalls >= 3 {
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    AscentResult { x, value, iterations, converged }
}
