//! Summability kernels on the circle: Fejér `K_n`, Poisson `P_r`, and
//! user-supplied samples.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{CircleGrid, SampledFunction};

/// Tolerance used when verifying asserted sign flags of custom kernels.
pub const FLAG_TOLERANCE: f64 = 1e-12;

const SINGULARITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    Fejer(usize),
    Poisson(f64),
    Custom(SampledFunction),
}

/// A convolution kernel together with its sign flags.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    kind: KernelKind,
    nonneg: bool,
    hat_nonneg: bool,
}

impl KernelSpec {
    pub fn fejer(n: usize) -> Self {
        Self {
            kind: KernelKind::Fejer(n),
            nonneg: true,
            hat_nonneg: true,
        }
    }

    pub fn poisson(r: f64) -> Result<Self> {
        check_radius(r)?;
        Ok(Self {
            kind: KernelKind::Poisson(r),
            nonneg: true,
            hat_nonneg: true,
        })
    }

    /// Custom samples with asserted flags. Each asserted flag is checked
    /// numerically against [`FLAG_TOLERANCE`].
    pub fn custom(samples: SampledFunction, nonneg: bool, hat_nonneg: bool) -> Result<Self> {
        if nonneg {
            let min = samples
                .values()
                .iter()
                .map(|v| if v.im.abs() > FLAG_TOLERANCE { f64::NEG_INFINITY } else { v.re })
                .fold(f64::INFINITY, f64::min);
            if min < -FLAG_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "kernel asserted nonnegative but has sample {min:e}"
                )));
            }
        }
        if hat_nonneg {
            let grid = samples.grid();
            let mut buf = samples.values().to_vec();
            grid.fft_forward(&mut buf);
            let w = grid.quad_weight();
            let worst = buf
                .iter()
                .map(|c| {
                    let c = c * w;
                    if c.im.abs() > FLAG_TOLERANCE {
                        f64::NEG_INFINITY
                    } else {
                        c.re
                    }
                })
                .fold(f64::INFINITY, f64::min);
            if worst < -FLAG_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "kernel asserted to have nonnegative Fourier coefficients but has {worst:e}"
                )));
            }
        }
        Ok(Self {
            kind: KernelKind::Custom(samples),
            nonneg,
            hat_nonneg,
        })
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn hat_nonneg(&self) -> bool {
        self.hat_nonneg
    }

    /// Samples of the kernel on `grid`.
    pub fn samples(&self, grid: &CircleGrid) -> Result<SampledFunction> {
        match &self.kind {
            KernelKind::Fejer(n) => Ok(fejer_kernel(*n, grid)),
            KernelKind::Poisson(r) => poisson_kernel(*r, grid),
            KernelKind::Custom(s) => {
                if s.grid() != grid {
                    return Err(Error::InvalidArgument(format!(
                        "custom kernel sampled on {} points, requested {}",
                        s.grid().n_points(),
                        grid.n_points()
                    )));
                }
                Ok(s.clone())
            }
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            KernelKind::Fejer(n) => format!("fejer:{n}"),
            KernelKind::Poisson(r) => format!("poisson:{r}"),
            KernelKind::Custom(_) => "custom".to_string(),
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "Poisson radius must lie in [0, 1), got {r}"
        )));
    }
    Ok(())
}

/// Closed form `K_n(θ) = (1/(n+1)) (sin((n+1)θ/2) / sin(θ/2))²`.
pub fn fejer_value(n: usize, theta: f64) -> f64 {
    let m = (n + 1) as f64;
    let s = (theta / 2.0).sin();
    if s.abs() < SINGULARITY_EPS {
        return m;
    }
    let q = (m * theta / 2.0).sin() / s;
    q * q / m
}

pub fn fejer_kernel(n: usize, grid: &CircleGrid) -> SampledFunction {
    grid.sample_real(|t| fejer_value(n, t))
}

/// `K_n` as the coefficient sum `Σ_{|k|<=n} (1 - |k|/(n+1)) e^{ikθ}`,
/// evaluated directly without FFTs.
pub fn fejer_kernel_from_sum(n: usize, grid: &CircleGrid) -> SampledFunction {
    let m = (n + 1) as f64;
    grid.sample_real(|t| {
        1.0 + 2.0
            * (1..=n)
                .map(|k| (1.0 - k as f64 / m) * (k as f64 * t).cos())
                .sum::<f64>()
    })
}

pub fn poisson_value(r: f64, theta: f64) -> f64 {
    (1.0 - r * r) / (1.0 + r * r - 2.0 * r * theta.cos())
}

pub fn poisson_kernel(r: f64, grid: &CircleGrid) -> Result<SampledFunction> {
    check_radius(r)?;
    Ok(grid.sample_real(|t| poisson_value(r, t)))
}

/// Fejér multipliers `max(0, 1 - |k|/(n+1))` for `k = -d..=d`.
pub fn fejer_multipliers(n: usize, d: usize) -> Vec<f64> {
    let m = (n + 1) as f64;
    let d = d as i64;
    (-d..=d)
        .map(|k| (1.0 - k.unsigned_abs() as f64 / m).max(0.0))
        .collect()
}

/// Poisson multipliers `r^{|k|}` for `k = -d..=d`.
pub fn poisson_multipliers(r: f64, d: usize) -> Vec<f64> {
    let d = d as i64;
    (-d..=d).map(|k| r.powi(k.unsigned_abs() as i32)).collect()
}

/// Bound on `Σ_{|k|>d} r^{|k|}`, the sup-norm error of truncating `P_r` at degree `d`.
pub fn poisson_tail_bound(r: f64, d: usize) -> f64 {
    2.0 * r.powi(d as i32 + 1) / (1.0 - r)
}

/// `(1/N) Σ_j |K(θ_j)|`.
pub fn kernel_l1_norm(kernel: &KernelSpec, grid: &CircleGrid) -> Result<f64> {
    let s = kernel.samples(grid)?;
    Ok(s.values().iter().map(|v| v.norm()).sum::<f64>() * grid.quad_weight())
}

/// Discrete Fourier coefficients of the sampled kernel, `k = -d..=d`.
pub fn kernel_coefficients(kernel: &KernelSpec, grid: &CircleGrid, d: usize) -> Result<Vec<Complex64>> {
    let s = kernel.samples(grid)?;
    Ok(crate::grid::analyze(&s, d)?.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{analyze, make_grid, synthesize, FourierCoeffs};

    #[test]
    fn fejer_zero_is_constant_one() {
        let g = make_grid(64).unwrap();
        let k = fejer_kernel(0, &g);
        assert!(k.values().iter().all(|v| (v.re - 1.0).abs() < 1e-15 && v.im == 0.0));
    }

    #[test]
    fn fejer_peak_value() {
        for n in [0usize, 1, 3, 10, 50] {
            assert_eq!(fejer_value(n, 0.0), (n + 1) as f64);
            assert_eq!(fejer_value(n, 2.0 * std::f64::consts::PI), (n + 1) as f64);
        }
    }

    #[test]
    fn fejer_unit_mass() {
        let g = make_grid(256).unwrap();
        for n in [0usize, 1, 2, 7, 60, 127] {
            let l1 = kernel_l1_norm(&KernelSpec::fejer(n), &g).unwrap();
            assert!((l1 - 1.0).abs() < 1e-12, "n={n}: {l1}");
        }
    }

    #[test]
    fn fejer_closed_form_matches_coefficient_sum() {
        let g = make_grid(512).unwrap();
        for n in [0usize, 1, 2, 5, 17, 40] {
            let a = fejer_kernel(n, &g);
            let b = fejer_kernel_from_sum(n, &g);
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn fejer_synthesis_matches_closed_form() {
        let g = make_grid(64).unwrap();
        let m = fejer_multipliers(2, 2);
        let co = FourierCoeffs::new(2, m.iter().map(|&v| Complex64::new(v, 0.0)).collect()).unwrap();
        let f = synthesize(&co, &g);
        let k = fejer_kernel(2, &g);
        for (a, b) in f.values().iter().zip(k.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fejer_multiplier_values() {
        let m0 = fejer_multipliers(0, 3);
        assert_eq!(m0, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let m2 = fejer_multipliers(2, 4);
        assert!((m2[4 + 1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m2[4 - 1] - 2.0 / 3.0).abs() < 1e-15);
        for n in 0..12usize {
            let m = fejer_multipliers(n, 20);
            for (i, &v) in m.iter().enumerate() {
                let k = i as i64 - 20;
                assert!((0.0..=1.0).contains(&v));
                if k.unsigned_abs() as usize > n {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn poisson_basics() {
        let g = make_grid(4096).unwrap();
        let p0 = poisson_kernel(0.0, &g).unwrap();
        assert!(p0.values().iter().all(|v| (v.re - 1.0).abs() < 1e-15));
        for r in [0.1, 0.5, 0.9] {
            assert!((poisson_value(r, 0.0) - (1.0 + r) / (1.0 - r)).abs() < 1e-12);
            let mass = kernel_l1_norm(&KernelSpec::poisson(r).unwrap(), &g).unwrap();
            assert!((mass - 1.0).abs() < 1e-10);
        }
        assert!(poisson_kernel(1.0, &g).is_err());
        assert!(KernelSpec::poisson(1.2).is_err());
        assert!(KernelSpec::poisson(-0.1).is_err());
    }

    #[test]
    fn poisson_coefficients_are_powers() {
        let g = make_grid(4096).unwrap();
        for r in [0.2, 0.6, 0.9] {
            let p = poisson_kernel(r, &g).unwrap();
            let co = analyze(&p, 32).unwrap();
            let m = poisson_multipliers(r, 32);
            for k in -32..=32i64 {
                let c = co.get(k);
                assert!((c.re - m[(k + 32) as usize]).abs() < 1e-10, "r={r} k={k}");
                assert!(c.im.abs() < 1e-10);
            }
        }
        assert!((poisson_tail_bound(0.5, 3) - 2.0 * 0.0625 / 0.5).abs() < 1e-15);
    }

    #[test]
    fn custom_kernels() {
        let g = make_grid(32).unwrap();
        let two = SampledFunction::constant(&g, Complex64::new(2.0, 0.0));
        let k = KernelSpec::custom(two, true, true).unwrap();
        assert!((kernel_l1_norm(&k, &g).unwrap() - 2.0).abs() < 1e-14);

        let neg = g.sample_real(|t| t.cos());
        assert!(KernelSpec::custom(neg.clone(), true, false).is_err());
        // cos has coefficients 1/2 at k = ±1, so the spectral flag holds
        assert!(KernelSpec::custom(neg, false, true).is_ok());
        let sin = g.sample_real(|t| 1.0 + t.sin());
        assert!(KernelSpec::custom(sin.clone(), true, false).is_ok());
        assert!(KernelSpec::custom(sin, false, true).is_err());

        let other = make_grid(16).unwrap();
        let k = KernelSpec::custom(SampledFunction::constant(&g, Complex64::new(1.0, 0.0)), true, true).unwrap();
        assert!(k.samples(&other).is_err());
    }
}
