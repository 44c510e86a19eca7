//! Outer functions with prescribed boundary modulus.
//!
//! For a positive weight `w` the outer function is `W = exp(u + i ũ)` with
//! `u = log w` and `ũ` its harmonic conjugate. Multiplication by `W` maps
//! analytic functions to analytic functions and `|W f| = w |f|` on the
//! circle, which is what [`isometry_check`] measures.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{analyze, CircleGrid, FourierCoeffs, SampledFunction};
use crate::spaces::SpaceSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    grid: CircleGrid,
    samples: Vec<f64>,
    mean_abs_log: f64,
}

impl WeightSpec {
    pub fn new(grid: &CircleGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(Error::InvalidWeight(format!(
                "{} samples on a grid of {} points",
                samples.len(),
                grid.n_points()
            )));
        }
        if let Some(bad) = samples.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeight(format!("sample {bad} is not a finite positive number")));
        }
        let mean_abs_log = samples.iter().map(|w| w.ln().abs()).sum::<f64>() / samples.len() as f64;
        Ok(Self {
            grid: grid.clone(),
            samples,
            mean_abs_log,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &CircleGrid, f: F) -> Result<Self> {
        Self::new(grid, grid.thetas().into_iter().map(f).collect())
    }

    /// `|1 − (1 − ε) e^{iθ}|`, a smooth stand-in for `|1 − e^{iθ}|`.
    pub fn regularized_arc(grid: &CircleGrid, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("ε = {eps} outside (0, 1]")));
        }
        let rho = 1.0 - eps;
        Self::from_fn(grid, |t| (Complex64::new(1.0, 0.0) - Complex64::from_polar(rho, t)).norm())
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Discrete `‖log w‖_{L^1}`.
    pub fn mean_abs_log(&self) -> f64 {
        self.mean_abs_log
    }
}

fn check_degree(grid: &CircleGrid, d: Option<usize>) -> Result<usize> {
    let n = grid.n_points();
    let d = d.unwrap_or(n / 2 - 1);
    if 2 * d + 1 > n {
        return Err(Error::DegreeExceedsGrid { degree: d, n_points: n });
    }
    Ok(d)
}

/// Harmonic conjugate through the multiplier `−i sign(k)` on `|k| ≤ d`
/// (default `d = N/2 − 1`). Input must be real up to `1e−12` relative.
pub fn conjugate_function(u: &SampledFunction, d: Option<usize>) -> Result<SampledFunction> {
    let grid = u.grid();
    let d = check_degree(grid, d)?;
    if u.max_imag() > 1e-12 * u.max_abs().max(1.0) {
        return Err(Error::InvalidArgument("conjugate function needs real input".into()));
    }
    let n = grid.n_points();
    let mut buf: Vec<Complex64> = u.values().iter().map(|z| Complex64::new(z.re, 0.0)).collect();
    grid.fft_forward(&mut buf);
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    let minus_i = Complex64::new(0.0, -1.0);
    for k in 1..=d {
        spec[k] = buf[k] * minus_i;
        spec[n - k] = -buf[n - k] * minus_i;
    }
    grid.fft_inverse(&mut spec);
    let scale = 1.0 / n as f64;
    let values = spec.iter().map(|z| Complex64::new(z.re * scale, 0.0)).collect();
    SampledFunction::new(grid, values)
}

/// Boundary values of the outer function of `w`, with `log w` truncated to
/// degree `d` (default `N/2 − 1`).
pub fn outer_function(w: &WeightSpec, d: Option<usize>) -> Result<SampledFunction> {
    let grid = w.grid();
    let d = check_degree(grid, d)?;
    let log_w = SampledFunction::from_real(grid, &w.samples().iter().map(|v| v.ln()).collect::<Vec<_>>())?;
    let c = analyze(&log_w, d)?;
    // u + i ũ = c_0 + 2 Σ_{k ≥ 1} c_k e^{ikθ} for real u
    let mut analytic = vec![Complex64::new(0.0, 0.0); d + 1];
    analytic[0] = Complex64::new(c.get(0).re, 0.0);
    for (k, a) in analytic.iter_mut().enumerate().skip(1) {
        *a = c.get(k as i64) * 2.0;
    }
    let exponent = crate::grid::synthesize_analytic(&analytic, grid);
    SampledFunction::new(grid, exponent.into_iter().map(|z| z.exp()).collect())
}

/// The three norms that the multiplication isometry identifies, with their
/// relative deviations and the negative-frequency content of `W f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub outer_times_f: f64,
    pub weight_times_f: f64,
    pub weighted_norm: f64,
    pub dev_outer_weight: f64,
    pub dev_outer_weighted: f64,
    pub dev_weight_weighted: f64,
    /// `max_{k<0} |(W f)^(k)| / ‖W f‖_X`.
    pub negative_leakage: f64,
}

impl IsometryReport {
    pub fn max_deviation(&self) -> f64 {
        self.dev_outer_weight.max(self.dev_outer_weighted).max(self.dev_weight_weighted)
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Compares `‖W f‖_X`, `‖w f‖_X` and `‖f‖_{X(w)}` for an analytic `f`.
/// `space` must be an unweighted evaluator.
pub fn isometry_check(
    f: &FourierCoeffs,
    w: &WeightSpec,
    space: &SpaceSpec,
    d: Option<usize>,
) -> Result<IsometryReport> {
    if space.weight().is_some() {
        return Err(Error::InvalidArgument("isometry check takes an unweighted space".into()));
    }
    if f.max_negative() > 0.0 {
        return Err(Error::InvalidArgument("f has negative frequencies".into()));
    }
    let grid = w.grid();
    if f.degree() > grid.max_degree() {
        return Err(Error::DegreeExceedsGrid {
            degree: f.degree(),
            n_points: grid.n_points(),
        });
    }
    let fv = crate::grid::synthesize(f, grid);
    let outer = outer_function(w, d)?;
    let wf_outer = fv.mul(&outer)?;
    let wf_mod: Vec<Complex64> = fv.values().iter().zip(w.samples()).map(|(z, w)| z * w).collect();

    let outer_times_f = space.norm(wf_outer.values())?;
    let weight_times_f = space.norm(&wf_mod)?;
    let weighted_norm = match space {
        SpaceSpec::Lp(p) => SpaceSpec::WeightedLp(*p, w.samples().to_vec()).norm(fv.values())?,
        // the weighted space is defined through the product
        other => other.norm(&wf_mod)?,
    };
    let coeffs = analyze(&wf_outer, grid.max_degree())?;
    let negative_leakage = if outer_times_f > 0.0 {
        coeffs.max_negative() / outer_times_f
    } else {
        0.0
    };
    Ok(IsometryReport {
        outer_times_f,
        weight_times_f,
        weighted_norm,
        dev_outer_weight: rel_dev(outer_times_f, weight_times_f),
        dev_outer_weighted: rel_dev(outer_times_f, weighted_norm),
        dev_weight_weighted: rel_dev(weight_times_f, weighted_norm),
        negative_leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::spaces::Exponent;

    #[test]
    fn weight_validation() {
        let g = make_grid(8).unwrap();
        assert!(matches!(WeightSpec::new(&g, vec![1.0; 7]), Err(Error::InvalidWeight(_))));
        let mut w = vec![1.0; 8];
        w[3] = 0.0;
        assert!(matches!(WeightSpec::new(&g, w), Err(Error::InvalidWeight(_))));
        let w = WeightSpec::new(&g, vec![std::f64::consts::E; 8]).unwrap();
        assert!((w.mean_abs_log() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conjugates_of_simple_functions() {
        let g = make_grid(64).unwrap();
        let c = SampledFunction::constant(&g, Complex64::new(3.0, 0.0));
        assert!(conjugate_function(&c, None).unwrap().max_abs() < 1e-14);
        let cos = g.sample_real(f64::cos);
        let sin = g.sample_real(f64::sin);
        let h = conjugate_function(&cos, None).unwrap();
        assert!(h.sub(&sin).unwrap().max_abs() < 1e-12);
        let u = g.sample_real(|t| (3.0 * t).cos() - 0.5 * (7.0 * t).sin() + 0.2 * t.sin());
        let twice = conjugate_function(&conjugate_function(&u, None).unwrap(), None).unwrap();
        let back = twice.map(|z| -z);
        assert!(back.sub(&u).unwrap().max_abs() < 1e-10);
        let complex = g.sample(|t| Complex64::new(t.cos(), 1.0));
        assert!(conjugate_function(&complex, None).is_err());
    }

    #[test]
    fn outer_of_unit_weight_is_one() {
        let g = make_grid(128).unwrap();
        let w = WeightSpec::new(&g, vec![1.0; 128]).unwrap();
        let o = outer_function(&w, None).unwrap();
        assert!(o.values().iter().all(|z| (z - 1.0).norm() < 1e-15));
    }

    #[test]
    fn outer_of_regularized_arc() {
        let g = make_grid(4096).unwrap();
        let eps = 1e-2;
        let w = WeightSpec::regularized_arc(&g, eps).unwrap();
        let o = outer_function(&w, None).unwrap();
        let expected = g.sample(|t| Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0 - eps, t));
        assert!(o.sub(&expected).unwrap().max_abs() < 1e-6);
    }

    #[test]
    fn modulus_of_exp_cos_outer() {
        let g = make_grid(1024).unwrap();
        let w = WeightSpec::from_fn(&g, |t| t.cos().exp()).unwrap();
        let o = outer_function(&w, Some(256)).unwrap();
        let err = o
            .values()
            .iter()
            .zip(w.samples())
            .map(|(z, w)| (z.norm() - w).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8);
    }

    #[test]
    fn unit_weight_isometry_is_exact() {
        let g = make_grid(64).unwrap();
        let w = WeightSpec::new(&g, vec![1.0; 64]).unwrap();
        let f = FourierCoeffs::analytic(&[Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.0), Complex64::new(0.0, 2.0)]);
        for space in [SpaceSpec::Lp(Exponent::Finite(1.5)), SpaceSpec::lorentz(3.0, 2.0).unwrap()] {
            let r = isometry_check(&f, &w, &space, None).unwrap();
            let direct = space.norm(crate::grid::synthesize(&f, &g).values()).unwrap();
            assert_eq!(r.outer_times_f, direct);
            assert_eq!(r.weight_times_f, direct);
            assert_eq!(r.weighted_norm, direct);
        }
    }

    #[test]
    fn isometry_rejects_weighted_space_and_nonanalytic_f() {
        let g = make_grid(32).unwrap();
        let w = WeightSpec::new(&g, vec![2.0; 32]).unwrap();
        let f = FourierCoeffs::analytic(&[Complex64::new(1.0, 0.0)]);
        let ws = SpaceSpec::weighted(Exponent::Finite(2.0), vec![1.0; 32]).unwrap();
        assert!(isometry_check(&f, &w, &ws, None).is_err());
        let mut h = FourierCoeffs::zeros(2);
        h.set(-1, Complex64::new(1.0, 0.0));
        assert!(isometry_check(&h, &w, &SpaceSpec::Lp(Exponent::Finite(2.0)), None).is_err());
    }
}
