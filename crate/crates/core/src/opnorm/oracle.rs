//! Brute-force norm oracle for operators of dimension at most 3.
//!
//! The ratio `‖Ax‖ / ‖x‖` is scale- and phase-invariant, so it suffices to
//! sample unit magnitude profiles `(|x_l|)` on the positive orthant and the
//! relative phases of the nonleading coordinates. Dimension 2 uses two
//! angles, dimension 3 uses four. The best samples are polished by a compass
//! search on the same angles, which needs no derivative information.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};

use super::{norm_ratio_in, space_for, Method, NormEstimate};
use crate::error::{Error, Result};
use crate::operators::OperatorRep;
use crate::spaces::Exponent;

/// Default number of sampled directions per dimension.
pub fn default_resolution(dim: usize) -> usize {
    if dim <= 2 {
        10_000
    } else {
        100_000
    }
}

fn point(dim: usize, angles: &[f64]) -> Vec<Complex64> {
    match dim {
        1 => vec![Complex64::new(1.0, 0.0)],
        2 => vec![
            Complex64::new(angles[0].cos(), 0.0),
            Complex64::from_polar(angles[0].sin(), angles[1]),
        ],
        _ => {
            let (a, b) = (angles[0], angles[1]);
            vec![
                Complex64::new(a.cos(), 0.0),
                Complex64::from_polar(a.sin() * b.cos(), angles[2]),
                Complex64::from_polar(a.sin() * b.sin(), angles[3]),
            ]
        }
    }
}

/// Sampled maximum of `‖Ax‖_p / ‖x‖_p` with at least `resolution`
/// directions, followed by local polishing of the 16 best samples.
pub fn brute_force_oracle(op: &OperatorRep, p: Exponent, resolution: usize) -> Result<NormEstimate> {
    let dim = op.dim();
    if dim > 3 {
        return Err(Error::OracleTooLarge(dim));
    }
    let space = space_for(op, p);
    let ratio = |angles: &[f64]| norm_ratio_in(op, &point(dim, angles), &space).unwrap_or(0.0);
    if dim == 1 {
        let x = point(1, &[]);
        return Ok(NormEstimate {
            value: ratio(&[]),
            witness: x,
            method: Method::Brute,
            p,
            n_starts: 1,
            n_iters: 1,
            is_certified_lower_bound: true,
            converged: true,
        });
    }
    // magnitude angles span [0, π/2] inclusive, phases [0, 2π)
    let is_magnitude = |axis: usize| axis < dim - 1;
    let axes = 2 * (dim - 1);
    let per_axis = (resolution.max(1) as f64).powf(1.0 / axes as f64).ceil() as usize;
    let per_axis = per_axis.max(2);
    let coord = |axis: usize, i: usize| {
        if is_magnitude(axis) {
            FRAC_PI_2 * i as f64 / (per_axis - 1) as f64
        } else {
            TAU * i as f64 / per_axis as f64
        }
    };
    let total = per_axis.pow(axes as u32);
    let mut samples: Vec<(f64, Vec<f64>)> = Vec::with_capacity(total);
    let mut angles = vec![0.0; axes];
    for idx in 0..total {
        let mut rest = idx;
        for (axis, a) in angles.iter_mut().enumerate() {
            *a = coord(axis, rest % per_axis);
            rest /= per_axis;
        }
        samples.push((ratio(&angles), angles.clone()));
    }
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut n_iters = total;
    let mut best = samples[0].clone();
    for (v0, a0) in samples.into_iter().take(16) {
        let (v, a, evals) = compass(&ratio, v0, a0, std::f64::consts::PI / per_axis as f64);
        n_iters += evals;
        if v > best.0 {
            best = (v, a);
        }
    }
    let witness = point(dim, &best.1);
    let value = norm_ratio_in(op, &witness, &space)?;
    Ok(NormEstimate {
        value,
        witness,
        method: Method::Brute,
        p,
        n_starts: total,
        n_iters,
        is_certified_lower_bound: true,
        converged: true,
    })
}

/// Pattern search over the coordinate axes and the pairwise diagonals, so
/// that ridges of the nonsmooth ratio (small `p`) can still be climbed.
fn compass<F: Fn(&[f64]) -> f64>(f: &F, mut value: f64, mut x: Vec<f64>, mut step: f64) -> (f64, Vec<f64>, usize) {
    let dim = x.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for a in 0..dim {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[a] = s;
            dirs.push(d);
        }
        for b in a + 1..dim {
            for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut d = vec![0.0; dim];
                d[a] = sa;
                d[b] = sb;
                dirs.push(d);
            }
        }
    }
    let mut evals = 0;
    while step > 1e-10 && evals < 50_000 {
        let mut improved = false;
        for d in &dirs {
            let y: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + step * di).collect();
            let v = f(&y);
            evals += 1;
            if v > value {
                value = v;
                x = y;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (value, x, evals)
}
