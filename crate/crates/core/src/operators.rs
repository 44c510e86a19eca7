//! Finite-dimensional operators acting on grid samples or on the
//! coefficients of analytic polynomials.
//!
//! Operators that commute with grid rotations are stored as circulants: the
//! first column plus its DFT (the multipliers), so that applying them costs
//! two FFTs. Dense entries are still available through [`OperatorRep::entry`]
//! and [`OperatorRep::apply_dense`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{CircleGrid, FourierCoeffs};
use crate::kernels::KernelSpec;
use crate::spaces::{Exponent, SpaceSpec};

const CIRCULANT_TOL: f64 = 1e-10;
const INVARIANCE_TOL: f64 = 1e-10;

/// Coordinates an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Samples at the `N` grid nodes.
    Grid,
    /// Coefficients `c_0..=c_d` of `Σ c_k e^{ikθ}`.
    Analytic(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Dense(Vec<Complex64>),
    Circulant {
        column: Vec<Complex64>,
        multipliers: Vec<Complex64>,
    },
}

/// A linear operator on grid samples or analytic coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorRep {
    dim: usize,
    repr: Repr,
    basis: Basis,
    grid: CircleGrid,
    domain: SpaceSpec,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn default_domain() -> SpaceSpec {
    SpaceSpec::Lp(Exponent::Finite(2.0))
}

impl OperatorRep {
    /// Wrap a row-major dense matrix. On the grid basis the operator is
    /// tested once against a random vector for commutation with the
    /// one-step rotation and stored as a circulant when it passes.
    pub fn from_dense(matrix: Vec<Complex64>, basis: Basis, grid: &CircleGrid) -> Result<Self> {
        let dim = match basis {
            Basis::Grid => grid.n_points(),
            Basis::Analytic(d) => d + 1,
        };
        if matrix.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected a {dim}x{dim} matrix, got {} entries",
                matrix.len()
            )));
        }
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidOperator("matrix has non-finite entries".into()));
        }
        let mut op = Self {
            dim,
            repr: Repr::Dense(matrix),
            basis,
            grid: grid.clone(),
            domain: default_domain(),
        };
        if basis == Basis::Grid && op.commutes_with_rotation() {
            let column: Vec<Complex64> = (0..dim).map(|j| op.entry(j, 0)).collect();
            op = Self::circulant(column, grid);
        }
        Ok(op)
    }

    /// Circulant with the given first column, `A[j][l] = column[(j - l) mod N]`.
    pub fn circulant(column: Vec<Complex64>, grid: &CircleGrid) -> Self {
        let mut multipliers = column.clone();
        grid.fft_forward(&mut multipliers);
        Self {
            dim: grid.n_points(),
            repr: Repr::Circulant { column, multipliers },
            basis: Basis::Grid,
            grid: grid.clone(),
            domain: default_domain(),
        }
    }

    pub fn identity(basis: Basis, grid: &CircleGrid) -> Self {
        match basis {
            Basis::Grid => {
                let mut column = vec![zero(); grid.n_points()];
                column[0] = Complex64::new(1.0, 0.0);
                Self::circulant(column, grid)
            }
            Basis::Analytic(d) => Self::diagonal(&vec![Complex64::new(1.0, 0.0); d + 1], grid),
        }
    }

    /// Diagonal operator on the analytic basis.
    pub fn diagonal(entries: &[Complex64], grid: &CircleGrid) -> Self {
        let dim = entries.len();
        let mut m = vec![zero(); dim * dim];
        for (k, &v) in entries.iter().enumerate() {
            m[k * dim + k] = v;
        }
        Self {
            dim,
            repr: Repr::Dense(m),
            basis: Basis::Analytic(dim - 1),
            grid: grid.clone(),
            domain: default_domain(),
        }
    }

    pub fn with_domain(mut self, domain: SpaceSpec) -> Self {
        self.domain = domain;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn domain(&self) -> &SpaceSpec {
        &self.domain
    }

    pub fn is_circulant(&self) -> bool {
        matches!(self.repr, Repr::Circulant { .. })
    }

    /// Eigenvalues of a circulant on `e^{ikθ}`, indexed by FFT bin.
    pub fn multipliers(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Circulant { multipliers, .. } => Some(multipliers),
            Repr::Dense(_) => None,
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match &self.repr {
            Repr::Dense(m) => m[row * self.dim + col],
            Repr::Circulant { column, .. } => column[(row + self.dim - col) % self.dim],
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for l in 0..n {
                out.push(self.entry(j, l));
            }
        }
        out
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        match &self.repr {
            Repr::Dense(m) => matvec(m, self.dim, x),
            Repr::Circulant { multipliers, .. } => self.apply_spectral(multipliers, x, false),
        }
    }

    /// Conjugate transpose applied to `y`.
    pub fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        match &self.repr {
            Repr::Dense(m) => {
                let n = self.dim;
                let mut out = vec![zero(); n];
                for (j, &yj) in y.iter().enumerate() {
                    if yj == zero() {
                        continue;
                    }
                    let row = &m[j * n..(j + 1) * n];
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += a.conj() * yj;
                    }
                }
                out
            }
            Repr::Circulant { multipliers, .. } => self.apply_spectral(multipliers, y, true),
        }
    }

    /// Product computed entry by entry, bypassing the FFT path.
    pub fn apply_dense(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|l| self.entry(j, l) * x[l]).sum())
            .collect()
    }

    fn apply_spectral(&self, multipliers: &[Complex64], x: &[Complex64], adjoint: bool) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.grid.fft_forward(&mut buf);
        for (b, m) in buf.iter_mut().zip(multipliers) {
            *b *= if adjoint { m.conj() } else { *m };
        }
        self.grid.fft_inverse(&mut buf);
        let s = self.grid.quad_weight();
        buf.iter_mut().for_each(|v| *v *= s);
        buf
    }

    /// `α A`.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        let repr = match &self.repr {
            Repr::Dense(m) => Repr::Dense(m.iter().map(|v| v * alpha).collect()),
            Repr::Circulant { column, multipliers } => Repr::Circulant {
                column: column.iter().map(|v| v * alpha).collect(),
                multipliers: multipliers.iter().map(|v| v * alpha).collect(),
            },
        };
        Self { repr, ..self.clone() }
    }

    /// Largest absolute entry; non-finite entries propagate.
    pub fn max_abs_entry(&self) -> f64 {
        match &self.repr {
            Repr::Dense(m) => m.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Repr::Circulant { column, .. } => column.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    pub fn is_finite(&self) -> bool {
        let ok = |v: &Complex64| v.re.is_finite() && v.im.is_finite();
        match &self.repr {
            Repr::Dense(m) => m.iter().all(ok),
            Repr::Circulant { column, .. } => column.iter().all(ok),
        }
    }

    fn commutes_with_rotation(&self) -> bool {
        let n = self.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(0x05EE_DC1C);
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let rot = |v: &[Complex64]| -> Vec<Complex64> { (0..n).map(|j| v[(j + n - 1) % n]).collect() };
        let a = self.apply(&rot(&x));
        let b = rot(&self.apply(&x));
        let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        a.iter().zip(&b).all(|(u, v)| (u - v).norm() <= CIRCULANT_TOL * scale)
    }
}

fn matvec(m: &[Complex64], n: usize, x: &[Complex64]) -> Vec<Complex64> {
    m.chunks_exact(n)
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Convolution `C_K g = K * g` on the grid: `A[j][l] = K(θ_j - θ_l)/N`.
pub fn convolution_operator(kernel: &KernelSpec, grid: &CircleGrid) -> Result<OperatorRep> {
    let samples = kernel.samples(grid)?;
    let w = grid.quad_weight();
    let column = samples.values().iter().map(|v| v * w).collect();
    Ok(OperatorRep::circulant(column, grid))
}

/// `I - A` on the same basis.
pub fn identity_minus(a: &OperatorRep) -> OperatorRep {
    let one = Complex64::new(1.0, 0.0);
    let repr = match &a.repr {
        Repr::Dense(m) => {
            let n = a.dim;
            let mut out: Vec<Complex64> = m.iter().map(|v| -v).collect();
            for k in 0..n {
                out[k * n + k] += one;
            }
            Repr::Dense(out)
        }
        Repr::Circulant { column, multipliers } => {
            let mut col: Vec<Complex64> = column.iter().map(|v| -v).collect();
            col[0] += one;
            Repr::Circulant {
                column: col,
                multipliers: multipliers.iter().map(|m| one - m).collect(),
            }
        }
    };
    OperatorRep { repr, ..a.clone() }
}

/// Matrix of a grid operator on `span{e^{ikθ} : 0 <= k <= d}`. Fails when
/// the image of some basis vector leaves the span by more than `1e-10`.
pub fn analytic_restriction(a: &OperatorRep, d: usize) -> Result<OperatorRep> {
    if a.basis != Basis::Grid {
        return Err(Error::InvalidArgument("restriction needs a grid-basis operator".into()));
    }
    let grid = &a.grid;
    let n = grid.n_points();
    if 2 * d + 1 > n {
        return Err(Error::DegreeExceedsGrid { degree: d, n_points: n });
    }
    let dim = d + 1;
    let mut m = vec![zero(); dim * dim];
    let mut leakage = 0.0f64;
    let w = grid.quad_weight();
    for k in 0..dim {
        let ek = grid.sample(|t| Complex64::from_polar(1.0, k as f64 * t));
        let mut img = a.apply(ek.values());
        grid.fft_forward(&mut img);
        for (bin, v) in img.iter().enumerate() {
            let c = v * w;
            if bin < dim {
                m[bin * dim + k] = c;
            } else {
                leakage = leakage.max(c.norm());
            }
        }
    }
    if leakage > INVARIANCE_TOL {
        return Err(Error::NotInvariant { leakage });
    }
    Ok(OperatorRep {
        dim,
        repr: Repr::Dense(m),
        basis: Basis::Analytic(d),
        grid: grid.clone(),
        domain: a.domain.clone(),
    })
}

/// Backward shift `(c_0, c_1, ..., c_d) ↦ (c_1, ..., c_d, 0)`.
pub fn backward_shift(d: usize, grid: &CircleGrid) -> Result<OperatorRep> {
    if d < 1 {
        return Err(Error::InvalidArgument("backward shift needs degree >= 1".into()));
    }
    if 2 * d + 1 > grid.n_points() {
        return Err(Error::DegreeExceedsGrid { degree: d, n_points: grid.n_points() });
    }
    let dim = d + 1;
    let mut m = vec![zero(); dim * dim];
    for k in 0..d {
        m[k * dim + k + 1] = Complex64::new(1.0, 0.0);
    }
    Ok(OperatorRep {
        dim,
        repr: Repr::Dense(m),
        basis: Basis::Analytic(d),
        grid: grid.clone(),
        domain: default_domain(),
    })
}

/// `f_m(e^{iθ}) = f(e^{imθ})`: coefficient `k` moves to `mk`.
pub fn substitute_fm(f: &FourierCoeffs, m: usize, grid: &CircleGrid) -> Result<FourierCoeffs> {
    if m == 0 {
        return Err(Error::InvalidArgument("substitution needs m >= 1".into()));
    }
    if f.max_negative() != 0.0 {
        return Err(Error::InvalidArgument("substitution expects an analytic polynomial".into()));
    }
    let deg = f.degree() * m;
    if deg > grid.max_degree() {
        return Err(Error::DegreeExceedsGrid { degree: deg, n_points: grid.n_points() });
    }
    let a = f.analytic_part();
    let mut out = vec![zero(); deg + 1];
    for (k, v) in a.into_iter().enumerate() {
        out[k * m] = v;
    }
    Ok(FourierCoeffs::analytic(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{analyze, make_grid, synthesize_analytic};
    use crate::kernels::{fejer_multipliers, poisson_multipliers};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    #[test]
    fn constant_kernel_averages() {
        let g = make_grid(16).unwrap();
        let one = crate::grid::SampledFunction::constant(&g, c(1.0, 0.0));
        let k = KernelSpec::custom(one, true, true).unwrap();
        let a = convolution_operator(&k, &g).unwrap();
        let x = random_vec(16, 1);
        let mean: Complex64 = x.iter().sum::<Complex64>() / 16.0;
        for v in a.apply(&x) {
            assert!((v - mean).norm() < 1e-14);
        }
        let k0 = convolution_operator(&KernelSpec::fejer(0), &g).unwrap();
        let y = identity_minus(&k0).apply(&x);
        for (yi, xi) in y.iter().zip(&x) {
            assert!((yi - (xi - mean)).norm() < 1e-14);
        }
    }

    #[test]
    fn fejer_acts_by_multipliers() {
        let g = make_grid(64).unwrap();
        let n = 5;
        let a = convolution_operator(&KernelSpec::fejer(n), &g).unwrap();
        let m = fejer_multipliers(n, 8);
        for k in -8i64..=8 {
            let e = g.sample(|t| Complex64::from_polar(1.0, k as f64 * t));
            let out = a.apply(e.values());
            let mk = m[(k + 8) as usize];
            for (o, v) in out.iter().zip(e.values()) {
                assert!((o - v * mk).norm() < 1e-10, "k={k}");
            }
        }
    }

    #[test]
    fn dense_and_fast_paths_agree() {
        let g = make_grid(48).unwrap();
        for kernel in [KernelSpec::fejer(3), KernelSpec::poisson(0.6).unwrap()] {
            let a = identity_minus(&convolution_operator(&kernel, &g).unwrap());
            let x = random_vec(48, 7);
            let fast = a.apply(&x);
            let dense = a.apply_dense(&x);
            for (u, v) in fast.iter().zip(&dense) {
                assert!((u - v).norm() < 1e-12);
            }
            let rebuilt = OperatorRep::from_dense(a.to_dense(), Basis::Grid, &g).unwrap();
            assert!(rebuilt.is_circulant());
            let adj_fast = a.apply_adjoint(&x);
            let dense_only = OperatorRep {
                repr: Repr::Dense(a.to_dense()),
                ..a.clone()
            };
            for (u, v) in adj_fast.iter().zip(dense_only.apply_adjoint(&x)) {
                assert!((u - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_circulant_matrix_stays_dense() {
        let g = make_grid(8).unwrap();
        let mut m = vec![zero(); 64];
        m[0] = c(1.0, 0.0);
        let op = OperatorRep::from_dense(m, Basis::Grid, &g).unwrap();
        assert!(!op.is_circulant());
        let mut bad = vec![zero(); 64];
        bad[3] = c(f64::NAN, 0.0);
        assert!(matches!(
            OperatorRep::from_dense(bad, Basis::Grid, &g),
            Err(Error::InvalidOperator(_))
        ));
    }

    #[test]
    fn identity_minus_basics() {
        let g = make_grid(16).unwrap();
        let id = OperatorRep::identity(Basis::Grid, &g);
        let z = identity_minus(&id);
        assert!(z.max_abs_entry() == 0.0);
        let zero_op = OperatorRep::circulant(vec![zero(); 16], &g);
        let back = identity_minus(&zero_op);
        let x = random_vec(16, 3);
        for (u, v) in back.apply(&x).iter().zip(&x) {
            assert!((u - v).norm() < 1e-14);
        }
        let a = identity_minus(&convolution_operator(&KernelSpec::fejer(2), &g).unwrap());
        let mult = a.multipliers().unwrap();
        let fm = fejer_multipliers(2, 7);
        for k in -7i64..=7 {
            let expected = 1.0 - fm[(k + 7) as usize];
            assert!((mult[g.bin(k)] - c(expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn restrictions_are_diagonal() {
        let g = make_grid(128).unwrap();
        let id = analytic_restriction(&OperatorRep::identity(Basis::Grid, &g), 6).unwrap();
        for j in 0..7 {
            for k in 0..7 {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((id.entry(j, k) - c(expected, 0.0)).norm() < 1e-12);
            }
        }
        let n = 3;
        let fe = analytic_restriction(&convolution_operator(&KernelSpec::fejer(n), &g).unwrap(), 10).unwrap();
        for k in 0..=10usize {
            let expected = (1.0 - k as f64 / (n + 1) as f64).max(0.0);
            assert!((fe.entry(k, k) - c(expected, 0.0)).norm() < 1e-12);
        }
        let r = 0.7;
        let po = analytic_restriction(&convolution_operator(&KernelSpec::poisson(r).unwrap(), &g).unwrap(), 10).unwrap();
        let pm = poisson_multipliers(r, 10);
        for k in 0..=10usize {
            assert!((po.entry(k, k).re - pm[k + 10]).abs() < 1e-10);
            for j in 0..=10usize {
                if j != k {
                    assert!(po.entry(j, k).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn restriction_detects_leakage() {
        let g = make_grid(32).unwrap();
        // multiplication by e^{-iθ} moves the constant to frequency -1
        let mut m = vec![zero(); 32 * 32];
        for j in 0..32 {
            m[j * 32 + j] = Complex64::from_polar(1.0, -g.theta(j));
        }
        let op = OperatorRep::from_dense(m, Basis::Grid, &g).unwrap();
        assert!(matches!(analytic_restriction(&op, 4), Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn backward_shift_action() {
        let g = make_grid(64).unwrap();
        let b = backward_shift(5, &g).unwrap();
        let mut constant = vec![zero(); 6];
        constant[0] = c(2.0, -1.0);
        assert!(b.apply(&constant).iter().all(|v| v.norm() == 0.0));
        let mut e1 = vec![zero(); 6];
        e1[1] = c(1.0, 0.0);
        let out = b.apply(&e1);
        assert_eq!(out[0], c(1.0, 0.0));
        assert!(out[1..].iter().all(|v| v.norm() == 0.0));
        assert!(backward_shift(0, &g).is_err());
    }

    #[test]
    fn backward_shift_matches_mean_removal_in_modulus() {
        let g = make_grid(64).unwrap();
        let d = 9;
        let b = backward_shift(d, &g).unwrap();
        let a = random_vec(d + 1, 11);
        let bf = synthesize_analytic(&b.apply(&a), &g);
        let f = synthesize_analytic(&a, &g);
        for (u, v) in bf.iter().zip(&f) {
            assert!((u.norm() - (v - a[0]).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn substitution_moves_coefficients() {
        let g = make_grid(64).unwrap();
        let f = FourierCoeffs::analytic(&[c(1.0, 0.0), c(0.5, -0.5), c(0.0, 2.0)]);
        assert_eq!(substitute_fm(&f, 1, &g).unwrap(), f);
        let e1 = FourierCoeffs::analytic(&[zero(), c(1.0, 0.0)]);
        let e3 = substitute_fm(&e1, 3, &g).unwrap();
        assert_eq!(e3.get(3), c(1.0, 0.0));
        assert_eq!(e3.get(1), zero());
        assert!(matches!(substitute_fm(&f, 20, &g), Err(Error::DegreeExceedsGrid { .. })));
        let sf = crate::grid::synthesize(&substitute_fm(&f, 2, &g).unwrap(), &g);
        let back = analyze(&sf, 4).unwrap();
        assert!((back.get(4) - c(0.0, 2.0)).norm() < 1e-13);
    }
}
