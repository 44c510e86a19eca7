//! Norm evaluators on sampled functions: Lebesgue `L^p`, weighted
//! `L^p(w)`, Lorentz `L^{p,q}` and Orlicz `L^φ`.
//!
//! All integrals are rectangle-rule sums against the normalized measure of
//! the grid. The zero function has norm zero in every family.

mod orlicz;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SampledFunction;

pub use orlicz::{
    luxemburg_norm, orlicz_amemiya_norm, orlicz_modular, phi_from_rho, phi_from_rho_table,
    OrliczFlavor, PhiSpec, Rho, PHI_TABLE_NODES,
};

/// Lebesgue exponent in `[1, ∞]`, with `∞` kept distinct from large floats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Exponent::Infinity);
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("exponent must lie in [1, ∞], got {p}")));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }

    /// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(&self) -> Exponent {
        match *self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(1.0) => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(crate::constants::conjugate_exponent(p)),
        }
    }

    /// `1/p`, zero at infinity.
    pub fn reciprocal(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Exponent::Infinity => Ok(()),
            Exponent::Finite(p) => Exponent::new(p).map(|_| ()),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse exponent '{s}'")))?;
                Exponent::new(p)
            }
        }
    }
}

/// Which norm to evaluate on sampled functions.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSpec {
    Lp(Exponent),
    WeightedLp(Exponent, Vec<f64>),
    Lorentz { p: f64, q: f64 },
    Orlicz(PhiSpec, OrliczFlavor),
}

impl SpaceSpec {
    pub fn lp(p: Exponent) -> Self {
        SpaceSpec::Lp(p)
    }

    pub fn weighted(p: Exponent, w: Vec<f64>) -> Result<Self> {
        check_weight(&w)?;
        Ok(SpaceSpec::WeightedLp(p, w))
    }

    pub fn lorentz(p: f64, q: f64) -> Result<Self> {
        check_lorentz(p, q)?;
        Ok(SpaceSpec::Lorentz { p, q })
    }

    /// Exponent of the Lebesgue families.
    pub fn exponent(&self) -> Option<Exponent> {
        match self {
            SpaceSpec::Lp(p) | SpaceSpec::WeightedLp(p, _) => Some(*p),
            _ => None,
        }
    }

    pub fn weight(&self) -> Option<&[f64]> {
        match self {
            SpaceSpec::WeightedLp(_, w) => Some(w),
            _ => None,
        }
    }

    /// Same family with the weight dropped.
    pub fn unweighted(&self) -> SpaceSpec {
        match self {
            SpaceSpec::WeightedLp(p, _) => SpaceSpec::Lp(*p),
            other => other.clone(),
        }
    }

    pub fn norm(&self, values: &[Complex64]) -> Result<f64> {
        match self {
            SpaceSpec::Lp(p) => lp_norm_values(values, *p, None),
            SpaceSpec::WeightedLp(p, w) => lp_norm_values(values, *p, Some(w)),
            SpaceSpec::Lorentz { p, q } => lorentz_norm_values(values, *p, *q),
            SpaceSpec::Orlicz(phi, OrliczFlavor::Luxemburg) => orlicz::luxemburg_values(values, phi),
            SpaceSpec::Orlicz(phi, OrliczFlavor::Amemiya) => orlicz::amemiya_values(values, phi),
        }
    }

    pub fn norm_of(&self, f: &SampledFunction) -> Result<f64> {
        self.norm(f.values())
    }
}

pub(crate) fn check_weight(w: &[f64]) -> Result<()> {
    if let Some((j, &v)) = w.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidWeight(format!("weight at node {j} is {v}, must be positive")));
    }
    Ok(())
}

fn check_lorentz(p: f64, q: f64) -> Result<()> {
    if !(1.0 <= q && q <= p && p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Lorentz parameters need 1 <= q <= p < ∞, got p={p}, q={q}"
        )));
    }
    Ok(())
}

/// `‖f‖_{L^p(w)} = ‖f w‖_{L^p}` with the normalized counting measure.
pub fn lp_norm(f: &SampledFunction, p: Exponent, w: Option<&[f64]>) -> Result<f64> {
    lp_norm_values(f.values(), p, w)
}

pub fn lp_norm_values(values: &[Complex64], p: Exponent, w: Option<&[f64]>) -> Result<f64> {
    p.validate()?;
    if let Some(w) = w {
        if w.len() != values.len() {
            return Err(Error::InvalidArgument("weight length differs from sample count".into()));
        }
        check_weight(w)?;
        let scaled: Vec<f64> = values.iter().zip(w).map(|(v, w)| v.norm() * w).collect();
        Ok(lp_norm_abs(&scaled, p))
    } else {
        let abs: Vec<f64> = values.iter().map(|v| v.norm()).collect();
        Ok(lp_norm_abs(&abs, p))
    }
}

/// Normalized `L^p` norm of nonnegative magnitudes; no validation.
pub(crate) fn lp_norm_abs(abs: &[f64], p: Exponent) -> f64 {
    let max = abs.iter().copied().fold(0.0, f64::max);
    match p {
        Exponent::Infinity => max,
        Exponent::Finite(p) => {
            if max == 0.0 || abs.is_empty() {
                return 0.0;
            }
            let mean = abs.iter().map(|&a| (a / max).powf(p)).sum::<f64>() / abs.len() as f64;
            max * mean.powf(1.0 / p)
        }
    }
}

/// Non-increasing rearrangement of `|f|` on `[0, 1]`, a step function with
/// `N` steps of mass `1/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    values: Vec<f64>,
}

impl Rearrangement {
    /// Step heights in order.
    pub fn steps(&self) -> &[f64] {
        &self.values
    }

    /// `f*(t)`, right-continuous; zero for `t >= 1`.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        let i = (t * self.values.len() as f64).floor() as usize;
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// `‖f*‖_{L^p[0,1]}`.
    pub fn lp_norm(&self, p: Exponent) -> f64 {
        lp_norm_abs(&self.values, p)
    }
}

pub fn decreasing_rearrangement(f: &SampledFunction) -> Rearrangement {
    rearrange(f.values())
}

fn rearrange(values: &[Complex64]) -> Rearrangement {
    let mut idx: Vec<(usize, f64)> = values.iter().map(|v| v.norm()).enumerate().collect();
    // stable sort keeps original index order among ties
    idx.sort_by(|a, b| b.1.total_cmp(&a.1));
    Rearrangement {
        values: idx.into_iter().map(|(_, v)| v).collect(),
    }
}

/// `‖f‖_{p,q} = (∫_0^1 [t^{1/p} f*(t)]^q dt/t)^{1/q}`, integrated exactly
/// on every step of `f*`.
pub fn lorentz_norm(f: &SampledFunction, p: f64, q: f64) -> Result<f64> {
    lorentz_norm_values(f.values(), p, q)
}

fn lorentz_norm_values(values: &[Complex64], p: f64, q: f64) -> Result<f64> {
    check_lorentz(p, q)?;
    let r = rearrange(values);
    let max = r.values.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return Ok(0.0);
    }
    let n = r.values.len() as f64;
    let e = q / p;
    let mut prev = 0.0f64;
    let mut acc = 0.0;
    for (i, &v) in r.values.iter().enumerate() {
        let t = ((i + 1) as f64 / n).powf(e);
        acc += (t - prev) * (v / max).powf(q);
        prev = t;
    }
    Ok(max * ((p / q) * acc).powf(1.0 / q))
}
