//! Uniform discretization of the unit circle.
//!
//! A [`CircleGrid`] with `N` points carries the nodes `θ_j = 2πj/N` and the
//! normalized quadrature weight `1/N`, so that the rectangle rule integrates
//! against the normalized Lebesgue measure (total mass one). Sampled
//! functions and trigonometric coefficient vectors are converted into each
//! other with FFTs; on band-limited data both directions are exact up to
//! roundoff.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform grid on the circle with `n_points` equispaced angles.
#[derive(Clone)]
pub struct CircleGrid {
    n_points: usize,
    plans: Arc<Plans>,
}

impl fmt::Debug for CircleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleGrid")
            .field("n_points", &self.n_points)
            .finish()
    }
}

impl PartialEq for CircleGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points
    }
}

impl Eq for CircleGrid {}

/// Build a grid with `n` points. Requires `n >= 2`.
pub fn make_grid(n: usize) -> Result<CircleGrid> {
    CircleGrid::new(n)
}

impl CircleGrid {
    pub const DEFAULT_POINTS: usize = 4096;

    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n_points),
            inverse: planner.plan_fft_inverse(n_points),
        };
        Ok(Self {
            n_points,
            plans: Arc::new(plans),
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Quadrature weight of every node, `1/N`.
    pub fn quad_weight(&self) -> f64 {
        1.0 / self.n_points as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_points as f64
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.theta(j)).collect()
    }

    /// Largest degree `d` with `2d + 1 <= N`.
    pub fn max_degree(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// FFT bin holding frequency `k`.
    pub fn bin(&self, k: i64) -> usize {
        k.rem_euclid(self.n_points as i64) as usize
    }

    /// Unnormalized forward DFT, `X_k = Σ_j x_j e^{-2πijk/N}`, in place.
    pub fn fft_forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n_points);
        self.plans.forward.process(buf);
    }

    /// Unnormalized inverse DFT, `x_j = Σ_k X_k e^{2πijk/N}`, in place.
    pub fn fft_inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n_points);
        self.plans.inverse.process(buf);
    }

    /// Sample a function of the angle at every node.
    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> SampledFunction {
        let values = (0..self.n_points).map(|j| f(self.theta(j))).collect();
        SampledFunction {
            grid: self.clone(),
            values,
        }
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> SampledFunction {
        self.sample(|t| Complex64::new(f(t), 0.0))
    }
}

/// Point samples of a complex function on a [`CircleGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: CircleGrid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: &CircleGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.n_points(),
                values.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_real(grid: &CircleGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(grid: &CircleGrid, c: Complex64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.n_points()],
        }
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise product with another function on the same grid.
    pub fn mul(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(
        &self,
        other: &SampledFunction,
        f: F,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("functions live on different grids".into()));
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

/// Trigonometric coefficients `c_k`, `k = -d..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1],
        }
    }

    /// Coefficients listed from `k = -d` up to `k = d`.
    pub fn new(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(Error::InvalidArgument(format!(
                "degree {degree} needs {} coefficients, got {}",
                2 * degree + 1,
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    /// Analytic polynomial `Σ_{k=0}^{d} a_k e^{ikθ}`.
    pub fn analytic(a: &[Complex64]) -> Self {
        let degree = a.len().saturating_sub(1);
        let mut out = Self::zeros(degree);
        for (k, &v) in a.iter().enumerate() {
            out.set(k as i64, v);
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.degree as i64) as usize]
        }
    }

    /// Panics when `|k| > degree`.
    pub fn set(&mut self, k: i64, v: Complex64) {
        assert!(k.unsigned_abs() as usize <= self.degree, "frequency {k} out of range");
        self.coeffs[(k + self.degree as i64) as usize] = v;
    }

    /// Nonnegative-frequency part `c_0..=c_d`.
    pub fn analytic_part(&self) -> Vec<Complex64> {
        (0..=self.degree as i64).map(|k| self.get(k)).collect()
    }

    /// Largest `|c_k|` over negative frequencies.
    pub fn max_negative(&self) -> f64 {
        (1..=self.degree as i64)
            .map(|k| self.get(-k).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &FourierCoeffs) -> f64 {
        let d = self.degree.max(other.degree) as i64;
        (-d..=d)
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }
}

/// `c_k = (1/N) Σ_j f(θ_j) e^{-ikθ_j}` for `|k| <= d`.
pub fn analyze(f: &SampledFunction, degree: usize) -> Result<FourierCoeffs> {
    let grid = f.grid();
    let n = grid.n_points();
    if 2 * degree + 1 > n {
        return Err(Error::DegreeExceedsGrid {
            degree,
            n_points: n,
        });
    }
    let mut buf = f.values().to_vec();
    grid.fft_forward(&mut buf);
    let scale = grid.quad_weight();
    let d = degree as i64;
    let coeffs = (-d..=d).map(|k| buf[grid.bin(k)] * scale).collect();
    Ok(FourierCoeffs { degree, coeffs })
}

/// `f(θ_j) = Σ_k c_k e^{ikθ_j}`. Frequencies beyond the grid alias.
pub fn synthesize(c: &FourierCoeffs, grid: &CircleGrid) -> SampledFunction {
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    let d = c.degree() as i64;
    for k in -d..=d {
        buf[grid.bin(k)] += c.get(k);
    }
    grid.fft_inverse(&mut buf);
    SampledFunction {
        grid: grid.clone(),
        values: buf,
    }
}

/// Synthesize the analytic polynomial `Σ_{k=0}^{d} a_k e^{ikθ}` directly.
pub fn synthesize_analytic(a: &[Complex64], grid: &CircleGrid) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    for (k, &v) in a.iter().enumerate() {
        buf[k % grid.n_points()] += v;
    }
    grid.fft_inverse(&mut buf);
    buf
}

/// Translation `(τ_ϑ f)(θ) = f(θ - ϑ)`, applied as the phase factor
/// `e^{-ikϑ}` on every frequency of the trigonometric interpolant.
///
/// For even `N` the Nyquist bin is read as `cos(Nθ/2)`, which keeps
/// the result consistent with [`rotate_samples`] at grid multiples.
pub fn translate(f: &SampledFunction, vartheta: f64) -> SampledFunction {
    let grid = f.grid();
    let n = grid.n_points();
    let mut buf = f.values().to_vec();
    grid.fft_forward(&mut buf);
    let half = (n - 1) / 2;
    for k in 1..=half {
        let phase = Complex64::from_polar(1.0, -(k as f64) * vartheta);
        buf[k] *= phase;
        buf[n - k] *= phase.conj();
    }
    if n.is_multiple_of(2) {
        buf[n / 2] *= (n as f64 * vartheta / 2.0).cos();
    }
    grid.fft_inverse(&mut buf);
    let scale = grid.quad_weight();
    SampledFunction {
        grid: grid.clone(),
        values: buf.into_iter().map(|v| v * scale).collect(),
    }
}

/// Index rotation by `m` grid steps, `f(θ_j - 2πm/N)`.
pub fn rotate_samples(f: &SampledFunction, m: i64) -> SampledFunction {
    let n = f.len() as i64;
    let values = (0..n)
        .map(|j| f.values()[(j - m).rem_euclid(n) as usize])
        .collect();
    SampledFunction {
        grid: f.grid().clone(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_grids() {
        let g = make_grid(4).unwrap();
        let th = g.thetas();
        let expected = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for (a, b) in th.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(g.quad_weight(), 0.25);
        let g2 = make_grid(2).unwrap();
        assert_eq!(g2.thetas(), vec![0.0, PI]);
        assert!(matches!(make_grid(1), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn weights_sum_to_one() {
        let g = make_grid(4096).unwrap();
        let s: f64 = (0..g.n_points()).map(|_| g.quad_weight()).sum();
        assert!((s - 1.0).abs() < 1e-15);
        let th = g.thetas();
        assert!(th.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn analyze_simple_functions() {
        let g = make_grid(16).unwrap();
        let one = SampledFunction::constant(&g, c(1.0, 0.0));
        let co = analyze(&one, 3).unwrap();
        assert!((co.get(0) - c(1.0, 0.0)).norm() < 1e-15);
        for k in [-3, -2, -1, 1, 2, 3] {
            assert!(co.get(k).norm() < 1e-15);
        }
        let e1 = g.sample(|t| Complex64::from_polar(1.0, t));
        let co = analyze(&e1, 3).unwrap();
        assert!((co.get(1) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(co.get(0).norm() < 1e-14 && co.get(-1).norm() < 1e-14);
    }

    #[test]
    fn analyze_rejects_large_degree() {
        let g = make_grid(8).unwrap();
        let f = SampledFunction::constant(&g, c(1.0, 0.0));
        assert!(analyze(&f, 3).is_ok());
        assert_eq!(
            analyze(&f, 4),
            Err(Error::DegreeExceedsGrid {
                degree: 4,
                n_points: 8
            })
        );
    }

    #[test]
    fn synthesize_simple_coefficients() {
        let g = make_grid(32).unwrap();
        let mut co = FourierCoeffs::zeros(2);
        co.set(0, c(1.0, 0.0));
        let f = synthesize(&co, &g);
        assert!(f.values().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
        let mut co = FourierCoeffs::zeros(2);
        co.set(1, c(1.0, 0.0));
        let f = synthesize(&co, &g);
        for (j, v) in f.values().iter().enumerate() {
            assert!((v - Complex64::from_polar(1.0, g.theta(j))).norm() < 1e-14);
        }
    }

    #[test]
    fn translate_identity_and_group_law() {
        let g = make_grid(64).unwrap();
        let mut co = FourierCoeffs::zeros(5);
        for k in -5..=5i64 {
            co.set(k, c(0.3 * k as f64, 1.0 / (1.0 + k.abs() as f64)));
        }
        let f = synthesize(&co, &g);
        let same = translate(&f, 0.0);
        for (a, b) in same.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-13);
        }
        let twice = translate(&translate(&f, PI), PI);
        for (a, b) in twice.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn translate_matches_rotation_on_grid_multiples() {
        let g = make_grid(32).unwrap();
        let f = g.sample(|t| c((3.0 * t).cos() + 0.5, (2.0 * t).sin()));
        for m in [1i64, 5, -3, 16] {
            let spectral = translate(&f, 2.0 * PI * m as f64 / 32.0);
            let rotated = rotate_samples(&f, m);
            for (a, b) in spectral.values().iter().zip(rotated.values()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        // an odd-length grid has no Nyquist bin to worry about
        let g = make_grid(31).unwrap();
        let f = g.sample(|t| c((4.0 * t).sin(), t.cos()));
        let spectral = translate(&f, 2.0 * PI * 7.0 / 31.0);
        let rotated = rotate_samples(&f, 7);
        for (a, b) in spectral.values().iter().zip(rotated.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn translate_exact_for_band_limited_off_grid() {
        let g = make_grid(40).unwrap();
        let f = g.sample(|t| c((3.0 * t).cos(), (5.0 * t).sin()));
        let shift = 0.123_456;
        let tf = translate(&f, shift);
        for (j, v) in tf.values().iter().enumerate() {
            let t = g.theta(j) - shift;
            let expected = c((3.0 * t).cos(), (5.0 * t).sin());
            assert!((v - expected).norm() < 1e-13);
        }
    }
}
