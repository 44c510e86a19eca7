//! Orlicz spaces generated by `φ^{-1}(x) = x^{1/p} ρ(x^{1/q - 1/p})`.
//!
//! `φ` is only known through its inverse, so [`PhiSpec`] tabulates
//! `φ^{-1}` on log-spaced nodes and evaluates `φ` by binary search plus
//! linear interpolation in log-log coordinates. The interpolation is exact
//! on power laws, which covers every `ρ(t) = t^θ`.

use std::borrow::Cow;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::optimize::golden_section_min;

/// Number of nodes in every `φ` table.
pub const PHI_TABLE_NODES: usize = 1 << 12;

const DEFAULT_LN_X_MIN: f64 = -46.0; // ~1e-20
const DEFAULT_LN_X_MAX: f64 = 46.0;
const MAX_LN_X: f64 = 700.0;
const CONVEXITY_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 200;

/// Quasi-concave generator `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Rho {
    /// `ρ(t) = t^θ`, `θ ∈ [0, 1]`.
    Power(f64),
    /// Monotone samples `(t, ρ(t))`, interpolated log-log.
    Table(Vec<(f64, f64)>),
}

impl Rho {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Rho::Power(theta) => t.powf(*theta),
            Rho::Table(nodes) => {
                let lt = t.ln();
                let ln_node = |i: usize| (nodes[i].0.ln(), nodes[i].1.ln());
                let last = nodes.len() - 1;
                let seg = match nodes.iter().position(|&(x, _)| x >= t) {
                    Some(0) => 0,
                    Some(i) => i - 1,
                    None => last - 1,
                };
                let (x0, y0) = ln_node(seg);
                let (x1, y1) = ln_node(seg + 1);
                (y0 + (y1 - y0) * (lt - x0) / (x1 - x0)).exp()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Rho::Power(theta) => {
                if !(0.0..=1.0).contains(theta) {
                    return Err(Error::InvalidArgument(format!(
                        "ρ(t) = t^θ needs θ in [0, 1], got {theta}"
                    )));
                }
            }
            Rho::Table(nodes) => {
                if nodes.len() < 2 {
                    return Err(Error::InvalidArgument("ρ table needs at least two nodes".into()));
                }
                let ok = nodes.iter().all(|&(t, r)| t > 0.0 && r > 0.0 && t.is_finite() && r.is_finite())
                    && nodes.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1);
                if !ok {
                    return Err(Error::InvalidArgument(
                        "ρ table must be positive with increasing abscissae and nondecreasing values".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Which of the two equivalent Orlicz norms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrliczFlavor {
    Luxemburg,
    Amemiya,
}

/// Tabulated Young function `φ` together with its generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSpec {
    p: f64,
    q: f64,
    rho: Rho,
    ln_x: Vec<f64>,
    ln_y: Vec<f64>,
}

/// `φ` for the power generator `ρ(t) = t^θ`.
pub fn phi_from_rho(p: f64, q: f64, theta: f64) -> Result<PhiSpec> {
    PhiSpec::build(p, q, Rho::Power(theta), DEFAULT_LN_X_MIN, DEFAULT_LN_X_MAX)
}

/// `φ` for a tabulated generator.
pub fn phi_from_rho_table(p: f64, q: f64, table: Vec<(f64, f64)>) -> Result<PhiSpec> {
    PhiSpec::build(p, q, Rho::Table(table), DEFAULT_LN_X_MIN, DEFAULT_LN_X_MAX)
}

impl PhiSpec {
    fn build(p: f64, q: f64, rho: Rho, ln_x_min: f64, ln_x_max: f64) -> Result<Self> {
        if !(1.0 < p && p < q && q.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Orlicz generator needs 1 < p < q < ∞, got p={p}, q={q}"
            )));
        }
        rho.validate()?;
        let step = (ln_x_max - ln_x_min) / (PHI_TABLE_NODES - 1) as f64;
        let ln_x: Vec<f64> = (0..PHI_TABLE_NODES).map(|i| ln_x_min + step * i as f64).collect();
        let e = 1.0 / q - 1.0 / p;
        let ln_y: Vec<f64> = ln_x
            .iter()
            .map(|&lx| lx / p + rho.eval((e * lx).exp()).ln())
            .collect();
        let spec = Self { p, q, rho, ln_x, ln_y };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if let Some(i) = self.ln_y.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGenerator(format!(
                "φ^{{-1}} is not strictly increasing near x = {:e}",
                self.ln_x[i].exp()
            )));
        }
        // chord slopes of φ must be nondecreasing
        let slope = |i: usize| {
            let (x0, x1) = (self.ln_x[i].exp(), self.ln_x[i + 1].exp());
            let (y0, y1) = (self.ln_y[i].exp(), self.ln_y[i + 1].exp());
            (x1 - x0) / (y1 - y0)
        };
        for i in 0..PHI_TABLE_NODES - 2 {
            let (a, b) = (slope(i), slope(i + 1));
            if b - a < -CONVEXITY_TOL * a.abs().max(b.abs()) {
                return Err(Error::InvalidGenerator(format!(
                    "φ is not convex near y = {:e}",
                    self.ln_y[i + 1].exp()
                )));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn rho(&self) -> &Rho {
        &self.rho
    }

    /// `φ^{-1}(x)` from the defining formula.
    pub fn phi_inverse(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        x.powf(1.0 / self.p) * self.rho.eval(x.powf(1.0 / self.q - 1.0 / self.p))
    }

    /// Largest argument `φ` can be evaluated at without extending the table.
    pub fn max_argument(&self) -> f64 {
        self.ln_y[PHI_TABLE_NODES - 1].exp()
    }

    /// Tabulated `(x, φ^{-1}(x))` pairs.
    pub fn table(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ln_x.iter().zip(&self.ln_y).map(|(a, b)| (a.exp(), b.exp()))
    }

    pub fn phi(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let ly = y.ln();
        let last = PHI_TABLE_NODES - 1;
        if ly > self.ln_y[last] {
            return Err(Error::RangeExceeded {
                value: y,
                max: self.max_argument(),
            });
        }
        let i = self.ln_y.partition_point(|&v| v < ly);
        let seg = i.saturating_sub(1).min(last - 1);
        let t = (ly - self.ln_y[seg]) / (self.ln_y[seg + 1] - self.ln_y[seg]);
        Ok((self.ln_x[seg] + t * (self.ln_x[seg + 1] - self.ln_x[seg])).exp())
    }

    /// New table covering arguments up to `y`; `self` is left untouched.
    pub fn extended_to(&self, y: f64) -> Result<PhiSpec> {
        let lo = self.ln_x[0];
        let mut hi = self.ln_x[PHI_TABLE_NODES - 1];
        for _ in 0..64 {
            if self.phi_inverse(hi.exp()) >= y {
                return PhiSpec::build(self.p, self.q, self.rho.clone(), lo, hi);
            }
            if hi >= MAX_LN_X {
                break;
            }
            hi = (2.0 * hi).min(MAX_LN_X);
        }
        Err(Error::RangeExceeded {
            value: y,
            max: self.phi_inverse(hi.exp()),
        })
    }
}

/// `I_φ(f) = (1/N) Σ_j φ(|f_j|)`.
pub fn orlicz_modular(f: &SampledFunction, phi: &PhiSpec) -> Result<f64> {
    let mut acc = 0.0;
    for v in f.values() {
        acc += phi.phi(v.norm())?;
    }
    Ok(acc / f.len() as f64)
}

/// Modular evaluation that swaps in a wider table when needed.
struct Modular<'a> {
    phi: Cow<'a, PhiSpec>,
    abs: Vec<f64>,
    max: f64,
}

impl<'a> Modular<'a> {
    fn new(values: &[Complex64], phi: &'a PhiSpec) -> Self {
        let abs: Vec<f64> = values.iter().map(|v| v.norm()).collect();
        let max = abs.iter().copied().fold(0.0, f64::max);
        Self {
            phi: Cow::Borrowed(phi),
            abs,
            max,
        }
    }

    /// `I_φ(k f)`.
    fn at(&mut self, k: f64) -> Result<f64> {
        let top = self.max * k;
        if top > self.phi.max_argument() {
            self.phi = Cow::Owned(self.phi.extended_to(top)?);
        }
        let mut acc = 0.0;
        for &a in &self.abs {
            acc += self.phi.phi(a * k)?;
        }
        Ok(acc / self.abs.len() as f64)
    }
}

/// Luxemburg norm `inf{λ > 0 : I_φ(f/λ) <= 1}` by bracketing and bisection.
pub fn luxemburg_norm(f: &SampledFunction, phi: &PhiSpec) -> Result<f64> {
    luxemburg_values(f.values(), phi)
}

pub(crate) fn luxemburg_values(values: &[Complex64], phi: &PhiSpec) -> Result<f64> {
    let mut m = Modular::new(values, phi);
    if m.max == 0.0 {
        return Ok(0.0);
    }
    let mut hi = m.max;
    let mut expansions = 0;
    while m.at(1.0 / hi)? > 1.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > MAX_DOUBLINGS {
            return Err(Error::NoConvergence("Luxemburg bracket expansion (upper)".into()));
        }
    }
    let mut lo = hi / 2.0;
    expansions = 0;
    while m.at(1.0 / lo)? <= 1.0 {
        hi = lo;
        lo /= 2.0;
        expansions += 1;
        if expansions > MAX_DOUBLINGS {
            return Err(Error::NoConvergence("Luxemburg bracket expansion (lower)".into()));
        }
    }
    while (hi - lo) > 1e-10 * hi {
        let mid = (lo * hi).sqrt();
        if m.at(1.0 / mid)? <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Amemiya form of the Orlicz norm, `inf_{k>0} (1 + I_φ(k f))/k`, by
/// golden-section search over `log k`.
pub fn orlicz_amemiya_norm(f: &SampledFunction, phi: &PhiSpec) -> Result<f64> {
    amemiya_values(f.values(), phi)
}

pub(crate) fn amemiya_values(values: &[Complex64], phi: &PhiSpec) -> Result<f64> {
    let lux = luxemburg_values(values, phi)?;
    if lux == 0.0 {
        return Ok(0.0);
    }
    let mut m = Modular::new(values, phi);
    let mut err = None;
    let mut h = |s: f64| -> f64 {
        let k = s.exp();
        match m.at(k) {
            Ok(v) => (1.0 + v) / k,
            Err(e) => {
                err.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let s0 = -lux.ln();
    let h0 = h(s0);
    let mut step = 0.5;
    let mut left = s0 - step;
    let mut right = s0 + step;
    let mut expansions = 0;
    while h(left) < h0 || h(right) < h0 {
        step *= 2.0;
        left = s0 - step;
        right = s0 + step;
        expansions += 1;
        if expansions > MAX_DOUBLINGS {
            return Err(Error::NoConvergence("Amemiya bracket expansion".into()));
        }
    }
    let (_, best) = golden_section_min(&mut h, left, right, 1e-9);
    if let Some(e) = err {
        return Err(e);
    }
    if !best.is_finite() {
        return Err(Error::NoConvergence("Amemiya objective has no finite minimum".into()));
    }
    Ok(best)
}
