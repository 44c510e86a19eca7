use hardy_core::constants::{cpq, cpq_upper_bound, franchetti_cp, gamma_pq, interpolation_upper, lambda_pq};
use hardy_core::grid::{make_grid, CircleGrid, FourierCoeffs};
use hardy_core::operators::{analytic_restriction, backward_shift, convolution_operator, identity_minus, OperatorRep};
use hardy_core::opnorm::{grid_norm, subspace_norm, NormEstimate, SearchOptions};
use hardy_core::outer::{isometry_check, WeightSpec};
use hardy_core::spaces::{Exponent, SpaceSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::output::{Cell, Check, Report};
use crate::params::{
    parse_exponents, parse_kernels, parse_real_list, parse_usize_list, KernelArg, SpaceArg, UsageError, WeightArg,
};
use crate::{Common, Failure, Problem};

/// Slack on the upper bracket before an estimate counts as inconsistent.
pub const UPPER_SLACK: f64 = 1e-6;

/// Echoed config: the command, its own parameters, then the shared ones.
pub fn config(command: &str, params: Value, common: &Common) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("program".into(), json!(concat!("hardy ", env!("CARGO_PKG_VERSION"))));
    map.insert("command".into(), json!(command));
    if let Value::Object(extra) = params {
        map.extend(extra);
    }
    map.insert("starts".into(), json!(common.starts));
    map.insert("seed".into(), json!(common.seed));
    map.insert("format".into(), json!(common.format));
    Value::Object(map)
}

pub fn search_options(common: &Common) -> SearchOptions {
    SearchOptions::default().with_starts(common.starts).with_seed(common.seed)
}

/// First 16 hex digits of the SHA-256 of the witness, little-endian `re, im`.
pub fn witness_hash(w: &[Complex64]) -> String {
    let mut h = Sha256::new();
    for z in w {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn exponent_cell(p: Exponent) -> Cell {
    match p {
        Exponent::Finite(v) => Cell::Real(v),
        Exponent::Infinity => Cell::Real(f64::INFINITY),
    }
}

fn exponent_key(p: Exponent) -> f64 {
    p.finite().unwrap_or(f64::INFINITY)
}

fn exponents_json(ps: &[Exponent]) -> Value {
    json!(ps.iter().map(|p| exponent_cell(*p)).collect::<Vec<_>>())
}

/// `C_p` for `p ∈ [1, ∞]`.
pub fn franchetti_lower(p: Exponent) -> Result<f64, Failure> {
    Ok(match p {
        Exponent::Infinity => 2.0,
        Exponent::Finite(v) => franchetti_cp(v)?.value,
    })
}

fn grid(n_points: usize) -> Result<CircleGrid, Failure> {
    Ok(make_grid(n_points)?)
}

fn single<T: Copy>(list: Vec<T>, flag: &str) -> Result<T, Failure> {
    match list.as_slice() {
        [x] => Ok(*x),
        _ => Err(UsageError(format!("{flag} takes a single value here; use `sweep` for lists")).into()),
    }
}

fn check_degree(d: usize, n_points: usize) -> Result<(), Failure> {
    if 2 * d + 1 > n_points {
        return Err(UsageError(format!("degree {d} needs a grid of at least {} points", 2 * d + 1)).into());
    }
    Ok(())
}

pub fn constants(p: &str, q: Option<&str>, common: &Common) -> Result<Report, Failure> {
    let ps = parse_real_list(p)?;
    if let Some(bad) = ps.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
        return Err(UsageError(format!("p = {bad} outside [1, ∞)")).into());
    }
    let qs = q.map(parse_real_list).transpose()?;
    if let Some(bad) = qs.iter().flatten().find(|q| !(**q > 1.0 && q.is_finite())) {
        return Err(UsageError(format!("q = {bad} outside (1, ∞)")).into());
    }
    let cfg = config("constants", json!({ "p": ps, "q": qs }), common);
    let mut report = Report::new(
        cfg,
        &["p", "q", "C_p", "alpha_star", "upper_p", "gamma_pq", "C_pq", "C_pq_upper", "Lambda_pq", "min_two_Lambda"],
    );
    let mut pairs: Vec<(f64, Option<f64>)> = match &qs {
        Some(qs) => ps.iter().flat_map(|&p| qs.iter().map(move |&q| (p, Some(q)))).collect(),
        None => ps.iter().map(|&p| (p, None)).collect(),
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.unwrap_or(0.0).total_cmp(&b.1.unwrap_or(0.0))));
    pairs.dedup();
    let mut cp_violation: f64 = 0.0;
    let mut cpq_violation: f64 = 0.0;
    for (p, q) in pairs {
        let c = franchetti_cp(p)?;
        let upper = interpolation_upper(Exponent::Finite(p));
        cp_violation = cp_violation.max(1.0 - c.value).max(c.value - upper);
        let (mut gamma, mut c_pq, mut c_pq_upper, mut lambda, mut min_two) = (None, None, None, None, None);
        if let Some(q) = q {
            if p > 1.0 {
                gamma = Some(gamma_pq(p, q)?.value);
            }
            if p > 1.0 && p < q {
                let v = cpq(p, q)?.value;
                let ub = cpq_upper_bound(p, q);
                cpq_violation = cpq_violation.max(1.0 - v).max(v - ub);
                let l = lambda_pq(p, q)?.value;
                (c_pq, c_pq_upper, lambda, min_two) = (Some(v), Some(ub), Some(l), Some(l.min(2.0)));
            }
        }
        report.push(vec![
            p.into(),
            q.into(),
            c.value.into(),
            c.maximizer_or_root.into(),
            upper.into(),
            gamma.into(),
            c_pq.into(),
            c_pq_upper.into(),
            lambda.into(),
            min_two.into(),
        ]);
    }
    report
        .checks
        .push(Check::at_most("C_p within [1, 2^|1-2/p|]", cp_violation.max(0.0), 1e-12, ""));
    if qs.is_some() {
        report
            .checks
            .push(Check::at_most("C_pq within [1, upper bound]", cpq_violation.max(0.0), 1e-12, ""));
    }
    Ok(report)
}

/// `max_k |1 − K^(k)|` over the frequencies the operator acts on; each
/// exponential is an eigenvector, so this bounds every rotation-invariant norm.
fn spectral_lower(a: &OperatorRep, g: &CircleGrid, degree: Option<usize>) -> f64 {
    let m = a.multipliers().expect("convolution operators are circulant");
    match degree {
        None => m.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Some(d) => (0..=d as i64).map(|k| m[g.bin(k)].norm()).fold(0.0, f64::max),
    }
}

struct Bracketed {
    estimate: NormEstimate,
    spectral: f64,
    analytic_lower: f64,
    upper: f64,
}

fn bracket_checks(report: &mut Report, rows: &[(String, &Bracketed, f64)]) {
    let mut upper_excess: f64 = 0.0;
    let mut lower_deficit: f64 = 0.0;
    let mut upper_bad = Vec::new();
    let mut lower_bad = Vec::new();
    for (label, b, slack) in rows {
        let v = b.estimate.value;
        let excess = v - b.upper;
        if excess > UPPER_SLACK {
            upper_bad.push(label.clone());
        }
        upper_excess = upper_excess.max(excess);
        let deficit = (b.spectral - v).max(b.analytic_lower - slack - v);
        if deficit > 1e-9 {
            lower_bad.push(label.clone());
        }
        lower_deficit = lower_deficit.max(deficit);
    }
    report.checks.push(Check::at_most(
        "internal consistency: estimate <= analytic upper bound",
        upper_excess.max(0.0),
        UPPER_SLACK,
        upper_bad.join("; "),
    ));
    report.checks.push(Check::at_most(
        "estimate >= lower bounds",
        lower_deficit.max(0.0),
        1e-9,
        lower_bad.join("; "),
    ));
}

pub fn opnorm(
    kernel: &str,
    space: SpaceArg,
    p: &str,
    n_points: usize,
    degree: usize,
    common: &Common,
) -> Result<Report, Failure> {
    let kernel = single(parse_kernels(kernel)?, "--kernel")?;
    let p = single(parse_exponents(p)?, "--p")?;
    let g = grid(n_points)?;
    if space == SpaceArg::Hp {
        check_degree(degree, n_points)?;
    }
    let spec = kernel.spec();
    let a = identity_minus(&convolution_operator(&spec, &g)?);
    let opts = search_options(common);
    let (estimate, spectral) = match space {
        SpaceArg::Lp => (grid_norm(&a, p, &opts)?, spectral_lower(&a, &g, None)),
        SpaceArg::Hp => (
            subspace_norm(&analytic_restriction(&a, degree)?, p, &opts)?,
            spectral_lower(&a, &g, Some(degree)),
        ),
    };
    let c_p = franchetti_lower(p)?;
    let upper = interpolation_upper(p);
    let slack = lp_slack(&spec, &g)?;
    let b = Bracketed {
        estimate,
        spectral,
        // the L^p lower bound does not transfer to the analytic subspace
        analytic_lower: if space == SpaceArg::Lp { c_p } else { 0.0 },
        upper,
    };
    let cfg = config(
        "opnorm",
        json!({
            "kernel": kernel,
            "space": space,
            "p": exponent_cell(p),
            "grid_size": n_points,
            "degree": if space == SpaceArg::Hp { Some(degree) } else { None },
        }),
        common,
    );
    let mut report = Report::new(
        cfg,
        &[
            "kernel", "space", "p", "N", "d", "estimate", "method", "converged", "certified_lower_bound", "n_starts",
            "n_iters", "spectral_lower", "C_p", "upper", "bracket_width", "witness_hash",
        ],
    );
    let e = &b.estimate;
    report.push(vec![
        kernel.to_string().into(),
        label(space).into(),
        exponent_cell(p),
        n_points.into(),
        (space == SpaceArg::Hp).then_some(degree).into(),
        e.value.into(),
        method_name(e).into(),
        e.converged.into(),
        e.is_certified_lower_bound.into(),
        e.n_starts.into(),
        e.n_iters.into(),
        spectral.into(),
        c_p.into(),
        upper.into(),
        (upper - e.value).into(),
        witness_hash(&e.witness).into(),
    ]);
    bracket_checks(&mut report, &[(format!("{kernel} p={p}"), &b, slack)]);
    Ok(report)
}

/// How far below `C_p` a grid estimate may sit: the bracket is for the
/// continuous operator, and the grid loses `2K(0)/N` at the endpoints plus
/// the usual search tolerance in between.
fn lp_slack(spec: &hardy_core::kernels::KernelSpec, g: &CircleGrid) -> Result<f64, Failure> {
    let k0 = spec.samples(g)?.values()[0].re;
    Ok(5e-3 + 2.0 * k0 / g.n_points() as f64)
}

fn label(space: SpaceArg) -> &'static str {
    match space {
        SpaceArg::Lp => "lp",
        SpaceArg::Hp => "hp",
    }
}

fn method_name(e: &NormEstimate) -> String {
    serde_json::to_value(e.method)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

#[derive(Clone, Copy)]
struct Job {
    kernel: Option<KernelArg>,
    p: Exponent,
    d: Option<usize>,
}

struct SweepRow {
    job: Job,
    at_d: Bracketed,
    at_2d: Option<f64>,
    slack: f64,
}

fn sweep_job(problem: Problem, job: Job, g: &CircleGrid, opts: &SearchOptions) -> Result<SweepRow, Failure> {
    let upper = interpolation_upper(job.p);
    let operator = |d: usize| -> Result<OperatorRep, Failure> {
        Ok(match job.kernel {
            Some(k) => analytic_restriction(&identity_minus(&convolution_operator(&k.spec(), g)?), d)?,
            None => backward_shift(d, g)?,
        })
    };
    match (problem, job.d) {
        (Problem::Problem1, None) => {
            let k = job.kernel.expect("problem1 has a kernel");
            let a = identity_minus(&convolution_operator(&k.spec(), g)?);
            Ok(SweepRow {
                job,
                at_d: Bracketed {
                    estimate: grid_norm(&a, job.p, opts)?,
                    spectral: spectral_lower(&a, g, None),
                    analytic_lower: franchetti_lower(job.p)?,
                    upper,
                },
                at_2d: None,
                slack: lp_slack(&k.spec(), g)?,
            })
        }
        (_, Some(d)) => {
            let estimate = subspace_norm(&operator(d)?, job.p, opts)?;
            let doubled = opts.clone().with_extra_start(estimate.witness.clone());
            let at_2d = subspace_norm(&operator(2 * d)?, job.p, &doubled)?.value;
            let spectral = match job.kernel {
                Some(k) => spectral_lower(&identity_minus(&convolution_operator(&k.spec(), g)?), g, Some(d)),
                // B maps z to 1
                None => 1.0,
            };
            Ok(SweepRow {
                job,
                at_d: Bracketed {
                    estimate,
                    spectral,
                    analytic_lower: 0.0,
                    upper,
                },
                at_2d: Some(at_2d),
                slack: 0.0,
            })
        }
        (Problem::Problem2, None) => unreachable!("problem2 always has a degree"),
    }
}

pub fn sweep(
    problem: Problem,
    kernel: &str,
    space: SpaceArg,
    p: &str,
    n_points: usize,
    degree: &str,
    common: &Common,
) -> Result<Report, Failure> {
    let ps = parse_exponents(p)?;
    let g = grid(n_points)?;
    let kernels = match problem {
        Problem::Problem1 => parse_kernels(kernel)?.into_iter().map(Some).collect(),
        Problem::Problem2 => vec![None],
    };
    let on_subspace = problem == Problem::Problem2 || space == SpaceArg::Hp;
    let degrees: Vec<Option<usize>> = if on_subspace {
        let ds = parse_usize_list(degree)?;
        for &d in &ds {
            if d == 0 {
                return Err(UsageError("degree must be at least 1".into()).into());
            }
            check_degree(2 * d, n_points)?;
        }
        ds.into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let mut jobs = Vec::new();
    for &kernel in &kernels {
        for &p in &ps {
            for &d in &degrees {
                jobs.push(Job { kernel, p, d });
            }
        }
    }
    jobs.sort_by(|a, b| {
        let key = |j: &Job| (j.kernel.and_then(|k| k.n()).unwrap_or(0), j.kernel.and_then(|k| k.r()).unwrap_or(0.0));
        let (ka, kb) = (key(a), key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(exponent_key(a.p).total_cmp(&exponent_key(b.p)))
            .then(a.d.cmp(&b.d))
    });
    jobs.dedup_by(|a, b| a.kernel == b.kernel && a.p == b.p && a.d == b.d);
    let opts = search_options(common);
    let results: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&job| sweep_job(problem, job, &g, &opts))
        .collect::<Result<_, _>>()?;

    let cfg = config(
        "sweep",
        json!({
            "problem": problem,
            "kernel": if problem == Problem::Problem1 { Some(kernels.iter().flatten().collect::<Vec<_>>()) } else { None },
            "space": if problem == Problem::Problem1 { space } else { SpaceArg::Hp },
            "p": exponents_json(&ps),
            "grid_size": n_points,
            "degree": degrees,
        }),
        common,
    );
    let mut report = Report::new(
        cfg,
        &[
            "problem", "kernel", "n", "p", "d", "N", "estimate", "estimate_2d", "change_d_to_2d", "lower", "upper",
            "bracket_width", "converged", "witness_hash",
        ],
    );
    let mut labelled = Vec::new();
    for row in &results {
        let e = &row.at_d.estimate;
        let lower = row.at_d.spectral.max(row.at_d.analytic_lower - row.slack);
        report.push(vec![
            serde_json::to_value(problem).unwrap().as_str().unwrap_or_default().into(),
            row.job.kernel.map(|k| k.to_string()).into(),
            row.job.kernel.and_then(|k| k.n()).into(),
            exponent_cell(row.job.p),
            row.job.d.into(),
            n_points.into(),
            e.value.into(),
            row.at_2d.into(),
            row.at_2d.map(|v| v - e.value).into(),
            lower.into(),
            row.at_d.upper.into(),
            (row.at_d.upper - e.value).into(),
            e.converged.into(),
            witness_hash(&e.witness).into(),
        ]);
        let name = format!(
            "{} p={} d={}",
            row.job.kernel.map_or("B".to_string(), |k| k.to_string()),
            row.job.p,
            row.job.d.map_or("-".to_string(), |d| d.to_string())
        );
        labelled.push((name, &row.at_d, row.slack));
    }
    bracket_checks(&mut report, &labelled);
    Ok(report)
}

fn weight_spec(weight: WeightArg, g: &CircleGrid) -> Result<WeightSpec, Failure> {
    Ok(match weight {
        WeightArg::ExpCos => WeightSpec::from_fn(g, |t| t.cos().exp())?,
        WeightArg::Arc { eps } => WeightSpec::regularized_arc(g, eps)?,
    })
}

pub fn random_analytic(rng: &mut ChaCha8Rng, degree: usize) -> FourierCoeffs {
    let n = rand_distr::StandardNormal;
    let a: Vec<Complex64> = (0..=degree).map(|_| Complex64::new(rng.sample(n), rng.sample(n))).collect();
    FourierCoeffs::analytic(&a)
}

/// Tolerance on the pairwise deviations and the negative-frequency leakage.
pub const ISOMETRY_TOL: f64 = 1e-8;

pub fn outer_check(
    weight: WeightArg,
    p: &str,
    n_points: usize,
    degree: usize,
    trials: usize,
    common: &Common,
) -> Result<Report, Failure> {
    let ps = parse_exponents(p)?;
    let g = grid(n_points)?;
    check_degree(degree, n_points)?;
    if trials == 0 {
        return Err(UsageError("need at least one trial".into()).into());
    }
    let w = weight_spec(weight, &g)?;
    let cfg = config(
        "outer-check",
        json!({
            "weight": weight,
            "p": exponents_json(&ps),
            "grid_size": n_points,
            "degree": degree,
            "trials": trials,
        }),
        common,
    );
    let mut report = Report::new(
        cfg,
        &["trial", "p", "outer_times_f", "weight_times_f", "weighted_norm", "max_deviation", "negative_leakage"],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let (mut worst_dev, mut worst_leak): (f64, f64) = (0.0, 0.0);
    for trial in 0..trials {
        let f = random_analytic(&mut rng, degree);
        for &p in &ps {
            let r = isometry_check(&f, &w, &SpaceSpec::Lp(p), None)?;
            worst_dev = worst_dev.max(r.max_deviation());
            worst_leak = worst_leak.max(r.negative_leakage);
            report.push(vec![
                trial.into(),
                exponent_cell(p),
                r.outer_times_f.into(),
                r.weight_times_f.into(),
                r.weighted_norm.into(),
                r.max_deviation().into(),
                r.negative_leakage.into(),
            ]);
        }
    }
    report.checks.push(Check::at_most("|W f| = w |f| in norm", worst_dev, ISOMETRY_TOL, ""));
    report
        .checks
        .push(Check::at_most("W f is analytic", worst_leak, ISOMETRY_TOL, ""));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let w = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0)];
        let h = witness_hash(&w);
        assert_eq!(h.len(), 16);
        assert_eq!(h, witness_hash(&w.clone()));
        let mut v = w.clone();
        v[1].im = -2.0 + 1e-15;
        assert_ne!(h, witness_hash(&v));
    }
}
