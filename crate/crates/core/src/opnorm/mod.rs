//! Operator-norm estimation on discretized `L^p` spaces and on analytic
//! subspaces.
//!
//! Exact values are available at `p = 1` and `p = ∞` (column and row sums)
//! and at `p = 2` (largest singular value). For other exponents the
//! estimators return certified lower bounds: every [`NormEstimate`] carries
//! a witness vector whose norm ratio reproduces the reported value.

mod oracle;
mod subspace;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::synthesize_analytic;
use crate::operators::{Basis, OperatorRep};
use crate::spaces::{lp_norm_abs, Exponent, SpaceSpec};

pub use oracle::{brute_force_oracle, default_resolution};
pub use subspace::subspace_norm;

/// Default seed for random starts, the ASCII bytes of "HARDY".
pub const DEFAULT_SEED: u64 = 0x48_41_52_44_59;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Power,
    ExactP1,
    ExactPinf,
    ExactP2,
    Brute,
    Certificate,
    /// Barrier ascent for `p = ∞` on an analytic subspace.
    Exchange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Maximizing vector in the operator's own coordinates.
    #[serde(skip)]
    pub witness: Vec<Complex64>,
    pub method: Method,
    pub p: Exponent,
    pub n_starts: usize,
    pub n_iters: usize,
    /// False only for the exact endpoint and `p = 2` methods.
    pub is_certified_lower_bound: bool,
    pub converged: bool,
}

/// Settings shared by the iterative estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Number of random starts on top of the deterministic ones.
    pub starts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Additional caller-provided starting vectors.
    pub extra_starts: Vec<Vec<Complex64>>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            tol: 1e-10,
            max_iter: 10_000,
            seed: DEFAULT_SEED,
            extra_starts: Vec::new(),
        }
    }
}

impl SearchOptions {
    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_extra_start(mut self, x: Vec<Complex64>) -> Self {
        self.extra_starts.push(x);
        self
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// SplitMix64 step; gives every start its own seed independent of scheduling.
pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn gaussian_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// Values of a vector in the domain space: grid samples as they are,
/// analytic coefficients synthesized on the grid.
pub(crate) fn function_values(op: &OperatorRep, x: &[Complex64]) -> Vec<Complex64> {
    match op.basis() {
        Basis::Grid => x.to_vec(),
        Basis::Analytic(_) => synthesize_analytic(x, op.grid()),
    }
}

pub(crate) fn space_for(op: &OperatorRep, p: Exponent) -> SpaceSpec {
    match op.domain().weight() {
        Some(w) if op.basis() == Basis::Grid || w.len() == op.grid().n_points() => {
            SpaceSpec::WeightedLp(p, w.to_vec())
        }
        _ => SpaceSpec::Lp(p),
    }
}

/// `‖A x‖ / ‖x‖` in the given space.
pub fn norm_ratio_in(op: &OperatorRep, x: &[Complex64], space: &SpaceSpec) -> Result<f64> {
    if x.len() != op.dim() {
        return Err(Error::InvalidArgument(format!(
            "vector of length {} for an operator of dimension {}",
            x.len(),
            op.dim()
        )));
    }
    let den = space.norm(&function_values(op, x))?;
    if den == 0.0 {
        return Err(Error::InvalidWitness);
    }
    let num = space.norm(&function_values(op, &op.apply(x)))?;
    Ok(num / den)
}

/// `‖A x‖_p / ‖x‖_p`, using the domain weight of the operator if any.
pub fn norm_ratio(op: &OperatorRep, x: &[Complex64], p: Exponent) -> Result<f64> {
    norm_ratio_in(op, x, &space_for(op, p))
}

/// Ratio certificate `‖A f‖ / ‖f‖`, always a valid lower bound of `‖A‖`.
pub fn lower_bound_certificate(op: &OperatorRep, f: &[Complex64], p: Exponent) -> Result<NormEstimate> {
    let value = norm_ratio(op, f, p)?;
    Ok(NormEstimate {
        value,
        witness: f.to_vec(),
        method: Method::Certificate,
        p,
        n_starts: 1,
        n_iters: 0,
        is_certified_lower_bound: true,
        converged: true,
    })
}

/// Exact `ℓ^1` (max column sum) or `ℓ^∞` (max row sum) norm of an
/// unweighted grid operator. The quadrature weights cancel in both.
pub fn exact_norm_endpoint(op: &OperatorRep, p: Exponent) -> Result<NormEstimate> {
    if op.basis() != Basis::Grid {
        return Err(Error::UnsupportedExact("analytic subspace".into()));
    }
    if op.domain().weight().is_some() {
        return Err(Error::UnsupportedExact("weighted domain".into()));
    }
    let n = op.dim();
    let sums = |col_major: bool| -> Vec<f64> {
        if op.multipliers().is_some() {
            let s: f64 = (0..n).map(|j| op.entry(j, 0).norm()).sum();
            return vec![s; n];
        }
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| if col_major { op.entry(b, a) } else { op.entry(a, b) }.norm())
                    .sum()
            })
            .collect()
    };
    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &x)| if x > b.1 { (i, x) } else { b })
    };
    match p {
        Exponent::Finite(1.0) => {
            let (l, value) = argmax(&sums(true));
            let mut witness = vec![zero(); n];
            witness[l] = Complex64::new(1.0, 0.0);
            Ok(NormEstimate {
                value,
                witness,
                method: Method::ExactP1,
                p,
                n_starts: 1,
                n_iters: 0,
                is_certified_lower_bound: false,
                converged: true,
            })
        }
        Exponent::Infinity => {
            let (j, value) = argmax(&sums(false));
            let witness = (0..n)
                .map(|l| {
                    let a = op.entry(j, l);
                    if a.norm() == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        a.conj() / a.norm()
                    }
                })
                .collect();
            Ok(NormEstimate {
                value,
                witness,
                method: Method::ExactPinf,
                p,
                n_starts: 1,
                n_iters: 0,
                is_certified_lower_bound: false,
                converged: true,
            })
        }
        Exponent::Finite(other) => Err(Error::UnsupportedExact(format!("p = {other}"))),
    }
}

/// Coordinates in which the weighted problem becomes a plain `ℓ^p` one:
/// `z = w x`, operator `W A W^{-1}`.
struct Scaled<'a> {
    op: &'a OperatorRep,
    weight: Option<Vec<f64>>,
}

impl<'a> Scaled<'a> {
    fn new(op: &'a OperatorRep) -> Result<Self> {
        let weight = match op.basis() {
            Basis::Grid => op.domain().weight().map(|w| w.to_vec()),
            Basis::Analytic(_) => {
                if op.domain().weight().is_some() {
                    return Err(Error::UnsupportedExact(
                        "weighted norms on analytic coefficients".into(),
                    ));
                }
                None
            }
        };
        if let Some(w) = &weight {
            if w.len() != op.dim() {
                return Err(Error::InvalidArgument("weight length differs from grid size".into()));
            }
        }
        Ok(Self { op, weight })
    }

    fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        match &self.weight {
            None => self.op.apply(z),
            Some(w) => {
                let x: Vec<Complex64> = z.iter().zip(w).map(|(v, w)| v / w).collect();
                self.op.apply(&x).into_iter().zip(w).map(|(v, w)| v * w).collect()
            }
        }
    }

    fn adjoint(&self, u: &[Complex64]) -> Vec<Complex64> {
        match &self.weight {
            None => self.op.apply_adjoint(u),
            Some(w) => {
                let x: Vec<Complex64> = u.iter().zip(w).map(|(v, w)| v * w).collect();
                self.op.apply_adjoint(&x).into_iter().zip(w).map(|(v, w)| v / w).collect()
            }
        }
    }

    fn unscale(&self, z: &[Complex64]) -> Vec<Complex64> {
        match &self.weight {
            None => z.to_vec(),
            Some(w) => z.iter().zip(w).map(|(v, w)| v / w).collect(),
        }
    }

    fn scale(&self, x: &[Complex64]) -> Vec<Complex64> {
        match &self.weight {
            None => x.to_vec(),
            Some(w) => x.iter().zip(w).map(|(v, w)| v * w).collect(),
        }
    }
}

fn l2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn check_finite(op: &OperatorRep) -> Result<()> {
    if !op.is_finite() {
        return Err(Error::InvalidOperator("non-finite entries".into()));
    }
    Ok(())
}

/// Largest singular value by power iteration on `AᴴA`, from the all-ones
/// vector and four random restarts. Exact up to the iteration tolerance.
pub fn exact_norm_p2(op: &OperatorRep) -> Result<NormEstimate> {
    exact_norm_p2_with(op, DEFAULT_SEED)
}

pub fn exact_norm_p2_with(op: &OperatorRep, seed: u64) -> Result<NormEstimate> {
    check_finite(op)?;
    let scaled = Scaled::new(op)?;
    let n = op.dim();
    let mut starts = vec![vec![Complex64::new(1.0, 0.0); n]];
    for i in 0..4 {
        starts.push(gaussian_vector(n, derive_seed(seed, i)));
    }
    let runs: Vec<(f64, Vec<Complex64>, usize, bool)> = starts
        .into_par_iter()
        .map(|x0| singular_power(&scaled, x0, 1e-12, 10_000))
        .collect();
    let mut best = (0.0, vec![zero(); n], 0, true);
    let mut iters = 0;
    for r in runs {
        iters += r.2;
        if r.0 > best.0 {
            best = r;
        }
    }
    let witness = if best.0 > 0.0 {
        scaled.unscale(&best.1)
    } else {
        vec![Complex64::new(1.0, 0.0); n]
    };
    Ok(NormEstimate {
        value: best.0,
        witness,
        method: Method::ExactP2,
        p: Exponent::Finite(2.0),
        n_starts: 5,
        n_iters: iters,
        is_certified_lower_bound: false,
        converged: best.3,
    })
}

fn singular_power(a: &Scaled<'_>, x0: Vec<Complex64>, tol: f64, max_iter: usize) -> (f64, Vec<Complex64>, usize, bool) {
    let mut x = x0;
    let mut best = (0.0, x.clone());
    let mut prev = 0.0;
    for it in 0..max_iter {
        let nx = l2(&x);
        if nx == 0.0 {
            return (best.0, best.1, it, true);
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = a.apply(&x);
        let sigma = l2(&y);
        if sigma > best.0 {
            best = (sigma, x.clone());
        }
        if sigma == 0.0 || (it > 0 && (sigma - prev).abs() <= tol * sigma) {
            return (best.0, best.1, it + 1, true);
        }
        prev = sigma;
        x = a.adjoint(&y);
    }
    (best.0, best.1, max_iter, false)
}

/// `sign(v) |v|^{e}`, with `0 ↦ 0`; inputs are rescaled by their maximum first.
fn dual_map(v: &[Complex64], e: f64) -> Vec<Complex64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return vec![zero(); v.len()];
    }
    v.iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                zero()
            } else {
                z / r * (r / max).powf(e)
            }
        })
        .collect()
}

fn lp_abs(v: &[Complex64], p: f64) -> f64 {
    let abs: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    lp_norm_abs(&abs, Exponent::Finite(p))
}

const SCREEN_ITERS: usize = 30;
const FINALISTS: usize = 8;

struct Run {
    value: f64,
    witness: Vec<Complex64>,
    iters: usize,
    converged: bool,
}

/// Dual-vector iteration for `max ‖Ax‖_p / ‖x‖_p` from one start.
fn boyd_iteration(a: &Scaled<'_>, x0: &[Complex64], p: f64, tol: f64, max_iter: usize) -> Run {
    let pc = p / (p - 1.0);
    let mut x = x0.to_vec();
    let mut best = Run {
        value: 0.0,
        witness: x.clone(),
        iters: 0,
        converged: false,
    };
    let mut prev = 0.0;
    for it in 0..max_iter {
        let nx = lp_abs(&x, p);
        if nx == 0.0 || !nx.is_finite() {
            best.iters = it;
            best.converged = true;
            return best;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = a.apply(&x);
        let est = lp_abs(&y, p);
        if est > best.value {
            best.value = est;
            best.witness = x.clone();
        }
        if est == 0.0 || (it > 0 && est <= prev * (1.0 + tol)) {
            best.iters = it + 1;
            best.converged = true;
            return best;
        }
        prev = est;
        let z = a.adjoint(&dual_map(&y, p - 1.0));
        x = dual_map(&z, pc - 1.0);
    }
    best.iters = max_iter;
    best
}

/// Indicators of `m` equally spaced arcs of total measure `α`, for
/// `m ∈ {1, 2, 4, 8, 16}` and `α = i/64`. Compressing a profile `m` times
/// moves its spectrum to multiples of `m`, where low-pass kernels act as
/// mean removal.
fn arc_starts(n: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for m in [1usize, 2, 4, 8, 16] {
        let period = n / m;
        if period < 2 {
            break;
        }
        let mut seen = std::collections::BTreeSet::new();
        for i in 1..64 {
            let len = i * period / 64;
            if len == 0 || len >= period || !seen.insert(len) {
                continue;
            }
            let e = (0..n)
                .map(|j| {
                    if j < m * period && j % period < len {
                        Complex64::new(1.0, 0.0)
                    } else {
                        zero()
                    }
                })
                .collect();
            out.push(e);
        }
    }
    out
}

/// Lower bound of `‖A‖_{L^p → L^p}` for `1 < p < ∞` on the grid basis by
/// the dual-vector power method with multiple starts: the all-ones vector,
/// up to eight coordinate spikes, periodized arc indicators, the top right
/// singular vector,
/// `opts.starts` random vectors and any caller-supplied starts.
pub fn power_method_pnorm(op: &OperatorRep, p: Exponent, opts: &SearchOptions) -> Result<NormEstimate> {
    let p = match p {
        Exponent::Finite(v) if v > 1.0 => v,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "power method needs 1 < p < ∞, got {p}; use exact_norm_endpoint"
            )))
        }
    };
    if op.basis() != Basis::Grid {
        return Err(Error::InvalidArgument(
            "power method works on the grid basis; use subspace_norm".into(),
        ));
    }
    check_finite(op)?;
    let scaled = Scaled::new(op)?;
    let n = op.dim();

    let mut starts: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0); n]];
    let spikes = n.min(8);
    for s in 0..spikes {
        let mut e = vec![zero(); n];
        e[s * n / spikes] = Complex64::new(1.0, 0.0);
        starts.push(e);
    }
    starts.extend(arc_starts(n));
    let top = exact_norm_p2_with(op, opts.seed)?;
    starts.push(scaled.scale(&top.witness));
    for i in 0..opts.starts {
        starts.push(gaussian_vector(n, derive_seed(opts.seed, 100 + i as u64)));
    }
    for x in &opts.extra_starts {
        if x.len() != n {
            return Err(Error::InvalidArgument("extra start has the wrong length".into()));
        }
        starts.push(scaled.scale(x));
    }

    // screen every start briefly, then run the most promising to convergence
    let screen = opts.max_iter.min(SCREEN_ITERS);
    let screened: Vec<Run> = starts
        .par_iter()
        .map(|x0| boyd_iteration(&scaled, x0, p, opts.tol, screen))
        .collect();
    let n_starts = screened.len();
    let mut n_iters: usize = screened.iter().map(|r| r.iters).sum();
    let mut order: Vec<usize> = (0..n_starts).collect();
    order.sort_by(|&a, &b| screened[b].value.total_cmp(&screened[a].value).then(a.cmp(&b)));
    order.truncate(FINALISTS);
    let finals: Vec<Run> = order
        .par_iter()
        .map(|&i| {
            let r = &screened[i];
            if r.converged {
                Run { witness: r.witness.clone(), ..*r }
            } else {
                let mut f = boyd_iteration(&scaled, &r.witness, p, opts.tol, opts.max_iter - screen);
                if f.value < r.value {
                    f.value = r.value;
                    f.witness = r.witness.clone();
                }
                f
            }
        })
        .collect();
    n_iters += finals.iter().map(|r| r.iters).sum::<usize>();
    let converged = finals.iter().all(|r| r.converged);
    let best = finals
        .into_iter()
        .fold(None::<Run>, |b, r| match b {
            Some(b) if b.value >= r.value => Some(b),
            _ => Some(r),
        })
        .expect("at least one start");
    let witness = scaled.unscale(&best.witness);
    let value = norm_ratio(op, &witness, Exponent::Finite(p))?;
    Ok(NormEstimate {
        value,
        witness,
        method: Method::Power,
        p: Exponent::Finite(p),
        n_starts,
        n_iters,
        is_certified_lower_bound: true,
        converged,
    })
}

/// Norm estimate for any exponent on the grid basis: exact at `1`, `2`, `∞`
/// for unweighted domains, power method otherwise.
pub fn grid_norm(op: &OperatorRep, p: Exponent, opts: &SearchOptions) -> Result<NormEstimate> {
    let weighted = op.domain().weight().is_some();
    match p {
        Exponent::Infinity if !weighted => exact_norm_endpoint(op, p),
        Exponent::Finite(v) if v == 1.0 && !weighted => exact_norm_endpoint(op, p),
        Exponent::Finite(2.0) => exact_norm_p2_with(op, opts.seed),
        _ => power_method_pnorm(op, p, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::kernels::KernelSpec;
    use crate::operators::{backward_shift, convolution_operator, identity_minus};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_norm_one() {
        let g = make_grid(32).unwrap();
        let id = OperatorRep::identity(Basis::Grid, &g);
        for p in [Exponent::Finite(1.0), Exponent::Infinity] {
            assert!((exact_norm_endpoint(&id, p).unwrap().value - 1.0).abs() < 1e-15);
        }
        assert!((exact_norm_p2(&id).unwrap().value - 1.0).abs() < 1e-12);
        for p in [1.3, 2.5, 5.0] {
            let e = power_method_pnorm(&id, Exponent::Finite(p), &SearchOptions::default()).unwrap();
            assert!((e.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_removal_endpoint_norm() {
        for n in [8usize, 33, 100] {
            let g = make_grid(n).unwrap();
            let a = identity_minus(&convolution_operator(&KernelSpec::fejer(0), &g).unwrap());
            let e = exact_norm_endpoint(&a, Exponent::Finite(1.0)).unwrap();
            assert!((e.value - (2.0 - 2.0 / n as f64)).abs() < 1e-13);
            let r = norm_ratio(&a, &e.witness, Exponent::Finite(1.0)).unwrap();
            assert!((r - e.value).abs() < 1e-12);
            let e = exact_norm_endpoint(&a, Exponent::Infinity).unwrap();
            let r = norm_ratio(&a, &e.witness, Exponent::Infinity).unwrap();
            assert!((r - e.value).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_rejects_subspaces_and_weights() {
        let g = make_grid(16).unwrap();
        let b = backward_shift(3, &g).unwrap();
        assert!(matches!(exact_norm_endpoint(&b, Exponent::Infinity), Err(Error::UnsupportedExact(_))));
        let w = SpaceSpec::weighted(Exponent::Finite(1.0), vec![2.0; 16]).unwrap();
        let a = OperatorRep::identity(Basis::Grid, &g).with_domain(w);
        assert!(matches!(exact_norm_endpoint(&a, Exponent::Finite(1.0)), Err(Error::UnsupportedExact(_))));
        let id = OperatorRep::identity(Basis::Grid, &g);
        assert!(matches!(exact_norm_endpoint(&id, Exponent::Finite(3.0)), Err(Error::UnsupportedExact(_))));
    }

    #[test]
    fn p2_of_zero_and_diagonals() {
        let g = make_grid(16).unwrap();
        let z = OperatorRep::circulant(vec![zero(); 16], &g);
        assert_eq!(exact_norm_p2(&z).unwrap().value, 0.0);
        let r: f64 = 0.6;
        let d: Vec<Complex64> = (0..6).map(|k| c(r.powi(k), 0.0)).collect();
        let op = OperatorRep::diagonal(&d, &g);
        assert!((exact_norm_p2(&op).unwrap().value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn power_method_rejects_endpoints() {
        let g = make_grid(8).unwrap();
        let id = OperatorRep::identity(Basis::Grid, &g);
        let o = SearchOptions::default();
        assert!(power_method_pnorm(&id, Exponent::Finite(1.0), &o).is_err());
        assert!(power_method_pnorm(&id, Exponent::Infinity, &o).is_err());
    }

    #[test]
    fn diag_two_one() {
        let g = make_grid(2).unwrap();
        let m = vec![c(2.0, 0.0), zero(), zero(), c(1.0, 0.0)];
        let op = OperatorRep::from_dense(m, Basis::Grid, &g).unwrap();
        let e = power_method_pnorm(&op, Exponent::Finite(2.5), &SearchOptions::default()).unwrap();
        assert!((e.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn weighted_identity_and_similarity() {
        // ‖A‖ on L^p(w) equals ‖W A W^{-1}‖ on L^p
        let g = make_grid(3).unwrap();
        let m = vec![
            c(1.0, 0.0), c(0.5, 0.0), zero(),
            zero(), c(1.0, 0.2), c(0.1, 0.0),
            c(0.3, 0.0), zero(), c(-0.7, 0.0),
        ];
        let w = vec![1.0, 2.0, 0.5];
        let a = OperatorRep::from_dense(m.clone(), Basis::Grid, &g)
            .unwrap()
            .with_domain(SpaceSpec::weighted(Exponent::Finite(3.0), w.clone()).unwrap());
        let mut sim = m;
        for j in 0..3 {
            for l in 0..3 {
                sim[j * 3 + l] *= w[j] / w[l];
            }
        }
        let b = OperatorRep::from_dense(sim, Basis::Grid, &g).unwrap();
        let o = SearchOptions::default();
        let ea = power_method_pnorm(&a, Exponent::Finite(3.0), &o).unwrap();
        let eb = power_method_pnorm(&b, Exponent::Finite(3.0), &o).unwrap();
        assert!((ea.value - eb.value).abs() < 1e-9, "{} vs {}", ea.value, eb.value);
    }

    #[test]
    fn certificate_basics() {
        let g = make_grid(64).unwrap();
        let k = convolution_operator(&KernelSpec::fejer(3), &g).unwrap();
        let ones = vec![c(1.0, 0.0); 64];
        assert!((lower_bound_certificate(&k, &ones, Exponent::Finite(1.7)).unwrap().value - 1.0).abs() < 1e-12);
        let a = identity_minus(&convolution_operator(&KernelSpec::fejer(0), &g).unwrap());
        let e1: Vec<Complex64> = g.thetas().iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        assert!((lower_bound_certificate(&a, &e1, Exponent::Finite(3.0)).unwrap().value - 1.0).abs() < 1e-12);
        assert_eq!(
            lower_bound_certificate(&a, &vec![zero(); 64], Exponent::Finite(3.0)),
            Err(Error::InvalidWitness)
        );
    }

    #[test]
    fn seeds_are_distinct() {
        let s: std::collections::BTreeSet<u64> = (0..100).map(|i| derive_seed(DEFAULT_SEED, i)).collect();
        assert_eq!(s.len(), 100);
    }
}
