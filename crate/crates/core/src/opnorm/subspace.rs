//! Norms on the analytic-polynomial subspace.
//!
//! For finite `p` the ratio `‖S A c‖_p / ‖S c‖_p` (with `S` the synthesis
//! map onto grid values) is maximized by L-BFGS on its logarithm. For
//! `p = ∞` the problem is linearized at a grid point `j0`:
//! `max Re (S A c)_{j0}` subject to `|(S c)_j| ≤ 1` is a convex problem,
//! solved by a log-barrier Newton method, and `j0` is exchanged for the
//! argmax of the resulting `|S A c|` until it stops moving.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    check_finite, derive_seed, exact_norm_p2_with, gaussian_vector, norm_ratio_in, Method,
    NormEstimate, SearchOptions,
};
use crate::error::{Error, Result};
use crate::grid::{synthesize_analytic, CircleGrid};
use crate::operators::{Basis, OperatorRep};
use crate::optimize::lbfgs_maximize;
use crate::spaces::{Exponent, SpaceSpec};

/// Lower bound of the norm of `op` on its analytic subspace with the
/// induced (possibly weighted) `L^p` norm, `1 ≤ p ≤ ∞`.
pub fn subspace_norm(op: &OperatorRep, p: Exponent, opts: &SearchOptions) -> Result<NormEstimate> {
    let Basis::Analytic(d) = op.basis() else {
        return Err(Error::InvalidArgument("subspace_norm needs an analytic-basis operator".into()));
    };
    check_finite(op)?;
    let n = op.grid().n_points();
    let weight = match op.domain().weight() {
        Some(w) if w.len() == n => Some(w.to_vec()),
        Some(_) => return Err(Error::InvalidArgument("weight length differs from grid size".into())),
        None => None,
    };
    let space = match &weight {
        Some(w) => SpaceSpec::WeightedLp(p, w.clone()),
        None => SpaceSpec::Lp(p),
    };
    for x in &opts.extra_starts {
        if x.len() > d + 1 {
            return Err(Error::InvalidArgument("extra start has degree above the subspace".into()));
        }
    }
    match p {
        Exponent::Finite(v) if v < 1.0 => Err(Error::InvalidArgument(format!("p = {v} < 1"))),
        Exponent::Finite(v) if v == 2.0 && weight.is_none() => {
            // the synthesis map is an isometry from coefficients to L^2
            exact_norm_p2_with(op, opts.seed)
        }
        Exponent::Finite(v) => ascent(op, d, v, weight.as_deref(), &space, opts),
        Exponent::Infinity => exchange(op, d, weight.as_deref(), &space, opts),
    }
}

fn pad(x: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut v = x.to_vec();
    v.resize(len, Complex64::new(0.0, 0.0));
    v
}

struct Ratio<'a> {
    op: &'a OperatorRep,
    grid: &'a CircleGrid,
    weight: Option<&'a [f64]>,
    m: usize,
    p: f64,
}

impl Ratio<'_> {
    fn values(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut v = synthesize_analytic(c, self.grid);
        if let Some(w) = self.weight {
            v.iter_mut().zip(w).for_each(|(z, w)| *z *= w);
        }
        v
    }

    /// `ln ‖v‖_p` and the gradient direction `Sᴴ W (|v|^{p-2} v) / Σ|v|^p`.
    fn log_norm_and_dual(&self, v: &[Complex64]) -> (f64, Vec<Complex64>) {
        let n = v.len();
        let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 || !max.is_finite() {
            return (f64::NEG_INFINITY, vec![Complex64::new(0.0, 0.0); self.m]);
        }
        let h: f64 = v.iter().map(|z| (z.norm() / max).powf(self.p)).sum();
        let mut dual: Vec<Complex64> = v
            .iter()
            .enumerate()
            .map(|(j, z)| {
                let r = z.norm();
                if r == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let w = self.weight.map_or(1.0, |w| w[j]);
                z / r * ((r / max).powf(self.p - 1.0) * w / (h * max))
            })
            .collect();
        self.grid.fft_forward(&mut dual);
        dual.truncate(self.m);
        (max.ln() + (h / n as f64).ln() / self.p, dual)
    }

    fn objective(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let m = self.m;
        let c: Vec<Complex64> = (0..m).map(|k| Complex64::new(x[k], x[m + k])).collect();
        let (ln_g, zg) = self.log_norm_and_dual(&self.values(&c));
        let (ln_y, zy) = self.log_norm_and_dual(&self.values(&self.op.apply(&c)));
        if !ln_g.is_finite() || !ln_y.is_finite() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            return f64::NEG_INFINITY;
        }
        let gy = self.op.apply_adjoint(&zy);
        for k in 0..m {
            let diff = gy[k] - zg[k];
            grad[k] = diff.re;
            grad[m + k] = diff.im;
        }
        ln_y - ln_g
    }
}

fn ascent(
    op: &OperatorRep,
    d: usize,
    p: f64,
    weight: Option<&[f64]>,
    space: &SpaceSpec,
    opts: &SearchOptions,
) -> Result<NormEstimate> {
    let m = d + 1;
    let one = Complex64::new(1.0, 0.0);
    let mut starts: Vec<Vec<Complex64>> = vec![vec![one; m]];
    let spikes = m.min(8);
    for s in 0..spikes {
        let mut e = vec![Complex64::new(0.0, 0.0); m];
        e[s * m / spikes] = one;
        // a small constant term keeps spikes off the null space of mean removal
        e[0] += 0.5;
        starts.push(e);
    }
    if weight.is_none() {
        starts.push(exact_norm_p2_with(op, opts.seed)?.witness);
    }
    for i in 0..opts.starts {
        starts.push(gaussian_vector(m, derive_seed(opts.seed, 100 + i as u64)));
    }
    for x in &opts.extra_starts {
        starts.push(pad(x, m));
    }
    let ratio = Ratio {
        op,
        grid: op.grid(),
        weight,
        m,
        p,
    };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|c| {
            let x0: Vec<f64> = c.iter().map(|z| z.re).chain(c.iter().map(|z| z.im)).collect();
            lbfgs_maximize(|x, g| ratio.objective(x, g), x0, opts.tol, opts.max_iter)
        })
        .collect();
    let n_starts = runs.len();
    let n_iters = runs.iter().map(|r| r.iterations).sum();
    // starts in the kernel of the operator never leave -inf; they carry no information
    let converged = runs.iter().filter(|r| r.value.is_finite()).all(|r| r.converged);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for r in runs {
        let c: Vec<Complex64> = (0..m).map(|k| Complex64::new(r.x[k], r.x[m + k])).collect();
        let Ok(v) = norm_ratio_in(op, &c, space) else { continue };
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, c));
        }
    }
    let (value, witness) = best.ok_or_else(|| Error::NoConvergence("every start degenerated".into()))?;
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

/// Real rows of the weighted synthesis: `Re g_j = a_j · x`, `Im g_j = b_j · x`
/// for `x = (Re c, Im c)`.
fn synthesis_rows(grid: &CircleGrid, m: usize, weight: Option<&[f64]>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = grid.n_points();
    let mut a = DMatrix::zeros(n, 2 * m);
    let mut b = DMatrix::zeros(n, 2 * m);
    for j in 0..n {
        let w = weight.map_or(1.0, |w| w[j]);
        for k in 0..m {
            let phase = (((j * k) % n) as f64) * std::f64::consts::TAU / n as f64;
            let (s, c) = phase.sin_cos();
            a[(j, k)] = w * c;
            a[(j, m + k)] = -w * s;
            b[(j, k)] = w * s;
            b[(j, m + k)] = w * c;
        }
    }
    (a, b)
}

struct Barrier<'a> {
    a: &'a DMatrix<f64>,
    b: &'a DMatrix<f64>,
}

impl Barrier<'_> {
    /// Slacks `1 − |g_j|²`, or `None` outside the feasible set.
    fn slacks(&self, x: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        let u = self.a * x;
        let v = self.b * x;
        let s = DVector::from_iterator(u.len(), u.iter().zip(v.iter()).map(|(u, v)| 1.0 - u * u - v * v));
        if s.iter().all(|&s| s > 0.0) {
            Some((u, v, s))
        } else {
            None
        }
    }

    fn value(&self, t: f64, r: &DVector<f64>, x: &DVector<f64>) -> Option<f64> {
        let (_, _, s) = self.slacks(x)?;
        Some(t * r.dot(x) + s.iter().map(|s| s.ln()).sum::<f64>())
    }

    /// Maximizes `t rᵀx + Σ ln s_j` by damped Newton steps from a feasible `x`.
    fn center(&self, t: f64, r: &DVector<f64>, x: &mut DVector<f64>) -> Result<usize> {
        let n = self.a.nrows();
        let nv = self.a.ncols();
        for it in 0..100 {
            let (u, v, s) = self
                .slacks(x)
                .ok_or_else(|| Error::InternalInconsistency("barrier iterate left the feasible set".into()))?;
            let mut grad = r * t;
            let mut m = DMatrix::zeros(3 * n, nv);
            for j in 0..n {
                let q = 2.0 / s[j];
                let sq = q.sqrt();
                let aj = self.a.row(j);
                let bj = self.b.row(j);
                let mix = (aj * u[j] + bj * v[j]) * q;
                grad -= mix.transpose();
                m.row_mut(3 * j).copy_from(&(aj * sq));
                m.row_mut(3 * j + 1).copy_from(&(bj * sq));
                m.row_mut(3 * j + 2).copy_from(&mix);
            }
            let h = m.tr_mul(&m);
            let chol = h
                .cholesky()
                .ok_or_else(|| Error::NoConvergence("barrier Hessian is not positive definite".into()))?;
            let step = chol.solve(&grad);
            let decrement = grad.dot(&step);
            if decrement / 2.0 < 1e-10 {
                return Ok(it);
            }
            let f0 = self.value(t, r, x).unwrap_or(f64::NEG_INFINITY);
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let trial = &*x + &step * alpha;
                if let Some(f) = self.value(t, r, &trial) {
                    if f >= f0 + 0.25 * alpha * decrement {
                        *x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                return Ok(it);
            }
        }
        Ok(100)
    }
}

fn objective_row(op: &OperatorRep, m: usize, j0: usize, weight: Option<&[f64]>) -> DVector<f64> {
    let grid = op.grid();
    let n = grid.n_points();
    let w = weight.map_or(1.0, |w| w[j0]);
    let mut r = DVector::zeros(2 * m);
    for k in 0..m {
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..m {
            let a = op.entry(l, k);
            if a != Complex64::new(0.0, 0.0) {
                let phase = (((l * j0) % n) as f64) * std::f64::consts::TAU / n as f64;
                acc += Complex64::from_polar(1.0, phase) * a;
            }
        }
        acc *= w;
        r[k] = acc.re;
        r[m + k] = -acc.im;
    }
    r
}

fn solve_at(
    op: &OperatorRep,
    barrier: &Barrier<'_>,
    m: usize,
    j0: usize,
    weight: Option<&[f64]>,
) -> Result<(Vec<Complex64>, usize, bool)> {
    let n = op.grid().n_points() as f64;
    let r = objective_row(op, m, j0, weight);
    let mut x = DVector::zeros(2 * m);
    if r.norm() == 0.0 {
        return Ok((vec![Complex64::new(1.0, 0.0); m], 0, true));
    }
    let mut t = 1.0;
    let mut iters = 0;
    loop {
        iters += barrier.center(t, &r, &mut x)?;
        let obj = r.dot(&x);
        // duality gap of the centered point is at most 2N/t
        if 2.0 * n / t <= 1e-10 * obj.abs().max(1e-300) {
            break;
        }
        if t > 1e16 {
            let c = (0..m).map(|k| Complex64::new(x[k], x[m + k])).collect();
            return Ok((c, iters, false));
        }
        t *= 8.0;
    }
    let c = (0..m).map(|k| Complex64::new(x[k], x[m + k])).collect();
    Ok((c, iters, true))
}

fn weighted_image(op: &OperatorRep, c: &[Complex64], weight: Option<&[f64]>) -> Vec<f64> {
    let y = synthesize_analytic(&op.apply(c), op.grid());
    y.iter()
        .enumerate()
        .map(|(j, z)| z.norm() * weight.map_or(1.0, |w| w[j]))
        .collect()
}

fn exchange(
    op: &OperatorRep,
    d: usize,
    weight: Option<&[f64]>,
    space: &SpaceSpec,
    opts: &SearchOptions,
) -> Result<NormEstimate> {
    let m = d + 1;
    let grid = op.grid();
    let (a, b) = synthesis_rows(grid, m, weight);
    let barrier = Barrier { a: &a, b: &b };
    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (j, &x)| if x > acc.1 { (j, x) } else { acc })
            .0
    };

    // candidate pivots: point 0, and where the images of the starts peak
    let mut pivots = vec![0usize];
    let mut candidates: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0); m]];
    for x in &opts.extra_starts {
        candidates.push(pad(x, m));
    }
    for c in &candidates {
        let j = argmax(&weighted_image(op, c, weight));
        if !pivots.contains(&j) {
            pivots.push(j);
        }
    }

    let mut tried = Vec::new();
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut n_iters = 0;
    let mut converged = true;
    let mut queue = pivots;
    while let Some(j0) = queue.first().copied() {
        queue.remove(0);
        if tried.contains(&j0) || tried.len() >= 16 {
            continue;
        }
        tried.push(j0);
        let (c, it, ok) = solve_at(op, &barrier, m, j0, weight)?;
        n_iters += it;
        converged &= ok;
        let Ok(v) = norm_ratio_in(op, &c, space) else { continue };
        let next = argmax(&weighted_image(op, &c, weight));
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, c));
            if !tried.contains(&next) {
                queue.push(next);
            }
        }
    }
    for x in &candidates {
        if let Ok(v) = norm_ratio_in(op, x, space) {
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, x.clone()));
            }
        }
    }
    let (value, witness) = best.ok_or_else(|| Error::NoConvergence("no feasible pivot".into()))?;
    Ok(NormEstimate {
        value,
        witness,
        method: Method::Exchange,
        p: Exponent::Infinity,
        n_starts: tried.len(),
        n_iters,
        is_certified_lower_bound: true,
        converged,
    })
}
