//! Parsing of list-valued flags such as `--p 1.1:4:0.1` or `--kernel fejer:0,1,2`.

use std::fmt;
use std::str::FromStr;

use hardy_core::kernels::KernelSpec;
use hardy_core::spaces::Exponent;
use serde::Serialize;

/// A usage error: bad syntax or a value outside its admissible range.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

/// Comma-separated items, each either a single value or an inclusive range
/// `start:stop:step`. The steps are generated as `start + i*step` and
/// rounded to 12 significant digits so that `1.1:4:0.1` ends exactly at 4.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>, UsageError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_real(v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_real(a)?, parse_real(b)?, parse_real(step)?);
                if !(step > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
                    return usage(format!("bad range '{item}': need start <= stop and step > 0"));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                if count > 100_000 {
                    return usage(format!("range '{item}' has more than 100000 points"));
                }
                out.extend((0..=count).map(|i| round12(a + i as f64 * step)));
            }
            _ => return usage(format!("cannot parse '{item}' as a value or start:stop:step")),
        }
    }
    if out.is_empty() {
        return usage("empty list");
    }
    Ok(out)
}

fn round12(x: f64) -> f64 {
    format!("{x:.12e}").parse().unwrap_or(x)
}

fn parse_real(s: &str) -> Result<f64, UsageError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| UsageError(format!("cannot parse '{s}' as a number"))),
    }
}

/// Exponents in `[1, ∞]`; `inf` denotes the endpoint.
pub fn parse_exponents(s: &str) -> Result<Vec<Exponent>, UsageError> {
    parse_real_list(s)?
        .into_iter()
        .map(|p| {
            if p == f64::INFINITY {
                Ok(Exponent::Infinity)
            } else if p >= 1.0 {
                Ok(Exponent::Finite(p))
            } else {
                usage(format!("exponent {p} is below 1"))
            }
        })
        .collect()
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, UsageError> {
    parse_real_list(s)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 && v < 1e9 {
                Ok(v as usize)
            } else {
                usage(format!("{v} is not a nonnegative integer"))
            }
        })
        .collect()
}

/// One kernel family member, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelArg {
    Fejer { n: usize },
    Poisson { r: f64 },
}

impl KernelArg {
    pub fn spec(&self) -> KernelSpec {
        match *self {
            KernelArg::Fejer { n } => KernelSpec::fejer(n),
            KernelArg::Poisson { r } => KernelSpec::poisson(r).expect("radius validated at parse time"),
        }
    }

    /// The index `n` for Fejér kernels, used as a table column.
    pub fn n(&self) -> Option<usize> {
        match *self {
            KernelArg::Fejer { n } => Some(n),
            KernelArg::Poisson { .. } => None,
        }
    }

    pub fn r(&self) -> Option<f64> {
        match *self {
            KernelArg::Fejer { .. } => None,
            KernelArg::Poisson { r } => Some(r),
        }
    }
}

impl fmt::Display for KernelArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelArg::Fejer { n } => write!(f, "fejer:{n}"),
            KernelArg::Poisson { r } => write!(f, "poisson:{r}"),
        }
    }
}

/// `fejer:<n-list>` or `poisson:<r-list>`.
pub fn parse_kernels(s: &str) -> Result<Vec<KernelArg>, UsageError> {
    let Some((family, rest)) = s.split_once(':') else {
        return usage(format!("kernel '{s}' must look like fejer:<n> or poisson:<r>"));
    };
    match family.trim().to_ascii_lowercase().as_str() {
        "fejer" => Ok(parse_usize_list(rest)?.into_iter().map(|n| KernelArg::Fejer { n }).collect()),
        "poisson" => parse_real_list(rest)?
            .into_iter()
            .map(|r| {
                if (0.0..1.0).contains(&r) {
                    Ok(KernelArg::Poisson { r })
                } else {
                    usage(format!("Poisson radius {r} outside [0, 1)"))
                }
            })
            .collect(),
        other => usage(format!("unknown kernel family '{other}'")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SpaceArg {
    /// The whole grid space.
    Lp,
    /// Analytic polynomials of degree at most `d`.
    Hp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Weight families for `outer-check`: `exp-cos` is `e^{cos θ}`, `arc:<ε>` is
/// `|1 − (1 − ε) e^{iθ}|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightArg {
    ExpCos,
    Arc { eps: f64 },
}

impl FromStr for WeightArg {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s.trim() {
            "exp-cos" => Ok(WeightArg::ExpCos),
            t => match t.strip_prefix("arc:") {
                Some(eps) => {
                    let eps = parse_real(eps)?;
                    if eps > 0.0 && eps <= 1.0 {
                        Ok(WeightArg::Arc { eps })
                    } else {
                        usage(format!("arc regularization {eps} outside (0, 1]"))
                    }
                }
                None => usage(format!("unknown weight '{t}'; use exp-cos or arc:<eps>")),
            },
        }
    }
}
