//! Worked examples and invariants that span several modules.

use hardy_core::constants::{
    conjugate_exponent, cpq, franchetti_cp, gamma_pq, interpolation_upper, lambda_pq,
};
use hardy_core::grid::{analyze, make_grid, synthesize, translate, FourierCoeffs, SampledFunction};
use hardy_core::kernels::{
    fejer_multipliers, kernel_l1_norm, poisson_kernel, KernelSpec,
};
use hardy_core::operators::{
    analytic_restriction, backward_shift, convolution_operator, identity_minus, Basis, OperatorRep,
};
use hardy_core::opnorm::{
    brute_force_oracle, exact_norm_endpoint, exact_norm_p2, lower_bound_certificate, norm_ratio, power_method_pnorm,
    subspace_norm, NormEstimate, SearchOptions,
};
use hardy_core::spaces::{lp_norm, Exponent};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
}

fn replay_ok(op: &OperatorRep, e: &NormEstimate) -> bool {
    let r = norm_ratio(op, &e.witness, e.p).unwrap();
    (r - e.value).abs() <= 1e-10 * e.value.max(1e-300)
}

#[test]
fn translation_continuity() {
    let g = make_grid(512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c: Vec<Complex64> = (0..17).map(|_| normal(&mut rng)).collect();
    let f = synthesize(&FourierCoeffs::new(8, c).unwrap(), &g);
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.5), Exponent::Infinity] {
        let gaps: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&t| lp_norm(&translate(&f, t).sub(&f).unwrap(), p, None).unwrap())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        // smooth f: the gap is linear in the shift for small shifts
        assert!(gaps[2] < 0.2 * gaps[1], "{gaps:?}");
    }
}

#[test]
fn kernel_masses() {
    let g = make_grid(4096).unwrap();
    for r in [0.0, 0.3, 0.5, 0.9] {
        let mean = poisson_kernel(r, &g).unwrap().values().iter().map(|z| z.re).sum::<f64>() / 4096.0;
        assert!((mean - 1.0).abs() < 1e-10);
    }
    assert!((kernel_l1_norm(&KernelSpec::poisson(0.5).unwrap(), &g).unwrap() - 1.0).abs() < 1e-10);
    let two = KernelSpec::custom(SampledFunction::constant(&g, Complex64::new(2.0, 0.0)), true, true).unwrap();
    assert!((kernel_l1_norm(&two, &g).unwrap() - 2.0).abs() < 1e-15);
}

#[test]
fn convolution_bound_and_equality_for_nonnegative_kernels() {
    let g = make_grid(128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..4 {
        // a random nonnegative kernel: squared modulus of a random polynomial
        let c: Vec<Complex64> = (0..9).map(|_| normal(&mut rng)).collect();
        let h = synthesize(&FourierCoeffs::new(4, c).unwrap(), &g);
        let k = h.map(|z| Complex64::new(z.norm_sqr(), 0.0));
        let kernel = KernelSpec::custom(k, true, false).unwrap();
        let l1 = kernel_l1_norm(&kernel, &g).unwrap();
        let a = convolution_operator(&kernel, &g).unwrap();
        for p in [1.0, 1.7, 4.0] {
            for _ in 0..10 {
                let x: Vec<Complex64> = (0..128).map(|_| normal(&mut rng)).collect();
                assert!(norm_ratio(&a, &x, Exponent::Finite(p)).unwrap() <= l1 * (1.0 + 1e-12));
            }
        }
        let p = [1.5, 3.0, 2.5, 6.0][trial];
        let e = power_method_pnorm(&a, Exponent::Finite(p), &SearchOptions::default()).unwrap();
        assert!((e.value - l1).abs() <= 1e-6 * l1);
        let ones = vec![Complex64::new(1.0, 0.0); 128];
        assert!((lower_bound_certificate(&a, &ones, Exponent::Finite(p)).unwrap().value - l1).abs() < 1e-12);
    }
}

#[test]
fn fejer_convolution_spectrum() {
    let g = make_grid(256).unwrap();
    let n = 5;
    let a = identity_minus(&convolution_operator(&KernelSpec::fejer(n), &g).unwrap());
    let mult = fejer_multipliers(n, 127);
    let eig = a.multipliers().expect("circulant");
    for k in -127i64..=127 {
        let expected = 1.0 - mult[(k + 127) as usize];
        assert!((eig[g.bin(k)] - expected).norm() < 1e-10);
    }
    let c = convolution_operator(&KernelSpec::fejer(n), &g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let coeffs: Vec<Complex64> = (0..20).map(|_| normal(&mut rng)).collect();
    let f = synthesize(&FourierCoeffs::analytic(&coeffs), &g);
    let image = SampledFunction::new(&g, c.apply(f.values())).unwrap();
    assert!(analyze(&image, 127).unwrap().max_negative() < 1e-12);
}

#[test]
fn power_method_brackets_mean_removal() {
    let g = make_grid(512).unwrap();
    let a = identity_minus(&convolution_operator(&KernelSpec::fejer(0), &g).unwrap());
    let e = power_method_pnorm(&a, Exponent::Finite(3.0), &SearchOptions::default()).unwrap();
    let c3 = franchetti_cp(3.0).unwrap().value;
    assert!(e.value >= c3 - 1e-3 && e.value <= 2f64.powf(1.0 / 3.0) + 1e-3);
    assert!(e.is_certified_lower_bound);
    let replay = lower_bound_certificate(&a, &e.witness, Exponent::Finite(3.0)).unwrap();
    assert!((replay.value - e.value).abs() <= 1e-10 * e.value);
}

#[test]
fn endpoint_norms_approach_two() {
    let mut last = 0.0;
    for n_points in [512, 2048, 8192] {
        let g = make_grid(n_points).unwrap();
        let a = identity_minus(&convolution_operator(&KernelSpec::fejer(3), &g).unwrap());
        let v = exact_norm_endpoint(&a, Exponent::Finite(1.0)).unwrap().value;
        let w = exact_norm_endpoint(&a, Exponent::Infinity).unwrap().value;
        assert!((v - w).abs() < 1e-12);
        // column sum of I - C_{K_n} is 2 - 2(n+1)/N
        assert!((v - (2.0 - 8.0 / n_points as f64)).abs() < 1e-10);
        assert!(v > last && v < 2.0);
        last = v;
    }
}

#[test]
fn exact_two_norms() {
    let g = make_grid(64).unwrap();
    for n in [0, 3, 10] {
        let a = identity_minus(&convolution_operator(&KernelSpec::fejer(n), &g).unwrap());
        assert!((exact_norm_p2(&a).unwrap().value - 1.0).abs() < 1e-10);
    }
    let pr = analytic_restriction(&convolution_operator(&KernelSpec::poisson(0.4).unwrap(), &g).unwrap(), 6).unwrap();
    assert!((exact_norm_p2(&pr).unwrap().value - 1.0).abs() < 1e-10);
}

#[test]
fn oracle_cross_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for dim in [2usize, 3] {
        let g = make_grid(dim).unwrap();
        for _ in 0..3 {
            let m: Vec<Complex64> = (0..dim * dim).map(|_| normal(&mut rng)).collect();
            let a = OperatorRep::from_dense(m, Basis::Grid, &g).unwrap();
            let res = if dim == 2 { 10_000 } else { 100_000 };
            let exact2 = exact_norm_p2(&a).unwrap().value;
            assert!((brute_force_oracle(&a, Exponent::Finite(2.0), res).unwrap().value - exact2).abs() < 5e-3);
            // estimates never exceed the exact values where those exist
            for p in [Exponent::Finite(1.0), Exponent::Infinity] {
                let exact = exact_norm_endpoint(&a, p).unwrap().value;
                assert!(brute_force_oracle(&a, p, res).unwrap().value <= exact + 1e-8);
            }
            let power2 = power_method_pnorm(&a, Exponent::Finite(2.0), &SearchOptions::default()).unwrap();
            assert!(power2.value <= exact2 + 1e-8);
            assert!(replay_ok(&a, &power2));
        }
    }
}

#[test]
fn scale_equivariance() {
    let g = make_grid(128).unwrap();
    let a = identity_minus(&convolution_operator(&KernelSpec::fejer(2), &g).unwrap());
    let alpha = Complex64::new(-1.5, 2.0);
    let scaled = a.scaled(alpha);
    let opts = SearchOptions::default();
    let e = power_method_pnorm(&a, Exponent::Finite(1.7), &opts).unwrap();
    let es = power_method_pnorm(&scaled, Exponent::Finite(1.7), &opts).unwrap();
    assert!((es.value - alpha.norm() * e.value).abs() <= 1e-9 * es.value);
    let h = analytic_restriction(&a, 12).unwrap();
    let hs = analytic_restriction(&scaled, 12).unwrap();
    let e = subspace_norm(&h, Exponent::Finite(3.0), &opts).unwrap();
    let es = subspace_norm(&hs, Exponent::Finite(3.0), &opts).unwrap();
    assert!((es.value - alpha.norm() * e.value).abs() <= 1e-9 * es.value);
}

#[test]
fn subspace_estimates_grow_with_degree() {
    let g = make_grid(512).unwrap();
    let a = identity_minus(&convolution_operator(&KernelSpec::fejer(1), &g).unwrap());
    let mut warm: Option<Vec<Complex64>> = None;
    let mut last = 0.0;
    for d in [8usize, 16, 24, 32] {
        let h = analytic_restriction(&a, d).unwrap();
        let mut opts = SearchOptions::default();
        if let Some(w) = warm.take() {
            opts = opts.with_extra_start(w);
        }
        let e = subspace_norm(&h, Exponent::Finite(3.0), &opts).unwrap();
        assert!(e.value >= last - 1e-8, "d={d}: {} < {last}", e.value);
        assert!(replay_ok(&h, &e));
        last = e.value;
        warm = Some(e.witness);
    }
}

#[test]
fn subspace_examples() {
    let g = make_grid(256).unwrap();
    let b = backward_shift(16, &g).unwrap();
    let e = subspace_norm(&b, Exponent::Finite(2.0), &SearchOptions::default()).unwrap();
    assert!((e.value - 1.0).abs() < 1e-10);
    let a = identity_minus(&convolution_operator(&KernelSpec::fejer(3), &g).unwrap());
    let h = analytic_restriction(&a, 10).unwrap();
    assert!((subspace_norm(&h, Exponent::Finite(2.0), &SearchOptions::default()).unwrap().value - 1.0).abs() < 1e-8);
    let e = subspace_norm(&b, Exponent::Infinity, &SearchOptions::default()).unwrap();
    assert!(e.value <= 2.0 + 1e-9 && replay_ok(&b, &e));
}

#[test]
fn constants_shape() {
    let mut cps = Vec::new();
    for i in 0..=40 {
        let p = 1.0 + 0.1 * i as f64;
        let c = franchetti_cp(p).unwrap().value;
        assert!((1.0 - 1e-12..=2.0).contains(&c));
        assert!(c <= interpolation_upper(Exponent::Finite(p)) + 1e-12);
        if p > 1.0 {
            assert!(c < 2.0);
        }
        cps.push((p, c));
    }
    let min = cps.iter().cloned().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    assert!((min.0 - 2.0).abs() < 1e-9);
    for p in [1.2, 1.5, 3.0, 7.0] {
        let a = franchetti_cp(p).unwrap().value;
        let b = franchetti_cp(conjugate_exponent(p)).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn gamma_increases_in_both_exponents() {
    let ps = [1.2, 1.6, 2.0, 2.8, 4.0];
    for (i, &p) in ps.iter().enumerate() {
        for (j, &q) in ps.iter().enumerate() {
            let g = gamma_pq(p, q).unwrap().value;
            if i + 1 < ps.len() {
                assert!(gamma_pq(ps[i + 1], q).unwrap().value > g);
            }
            if j + 1 < ps.len() {
                assert!(gamma_pq(p, ps[j + 1]).unwrap().value > g);
            }
        }
    }
}

/// `γ_{p,q}` from scratch: the inner minimizer solves `p x^{p-1} = q (γ-x)^{q-1}`,
/// found by bisection on the derivative, and the outer equation by bisection.
fn gamma_oracle(p: f64, q: f64) -> f64 {
    let inner = |gamma: f64| {
        let (mut lo, mut hi) = (0.0, gamma);
        for _ in 0..200 {
            let x = 0.5 * (lo + hi);
            if p * x.powf(p - 1.0) - q * (gamma - x).powf(q - 1.0) < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
        }
        let x = 0.5 * (lo + hi);
        x.powf(p) + (gamma - x).powf(q)
    };
    let (mut lo, mut hi) = (0.0, 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inner(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn cpq_recomputed_independently() {
    let (p, q) = (2.0, 4.0);
    let qc = conjugate_exponent(q);
    let pc = conjugate_exponent(p);
    let expected = (2.0 * gamma_oracle(p, q)).powf(1.0 / p).min((2.0 * gamma_oracle(qc, pc)).powf(1.0 / qc));
    assert!((cpq(p, q).unwrap().value - expected).abs() < 1e-9);
}

#[test]
fn lambda_properties() {
    let mut prev: Option<f64> = None;
    let mut q = 2.5;
    while q < 3.5 {
        let l = lambda_pq(1.5, q).unwrap();
        let rt = interpolation_upper(Exponent::Finite(1.5)).max(interpolation_upper(Exponent::Finite(q)));
        assert!(l.value >= rt - 1e-12);
        if let Some(prev) = prev {
            assert!((l.value - prev).abs() < 0.05);
        }
        prev = Some(l.value);
        q += 0.01;
    }
    assert!(lambda_pq(1.9, 2.1).unwrap().value.min(2.0) < 2.0);
}
