use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use nmm_core::orthopoly::{
    derivative_relation_residual, general_poly_sequence, gram_matrix, hermite_argument_scale,
    hermite_closed_form, hermite_derivative, poly_sequence, recurrence_coeff, reduce_general,
    shift_center, zero_bound,
};
use nmm_core::quadrature::Quadrature;
use nmm_core::{CanonicalModel, Complex64, Error, GeneralPotential, ScaledComplex};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn model(n: usize, t: f64) -> CanonicalModel {
    CanonicalModel::new(n, t).unwrap()
}

fn rel(a: ScaledComplex, b: ScaledComplex) -> f64 {
    (a - b).abs_ratio(&b)
}

/// `ln m!` by summing logs.
fn ln_fact(m: usize) -> f64 {
    (1..=m).map(|k| (k as f64).ln()).sum()
}

/// `p_m(z)` from the explicit Hermite expansion
/// `H_m(x) = m! sum_k (-1)^k (2x)^{m-2k} / (k! (m-2k)!)`, for small `m`.
fn hermite_explicit(n: usize, t: f64, z: Complex64, m: usize) -> Complex64 {
    let s = (n as f64 * (1.0 - t * t) / (2.0 * t)).sqrt();
    let x = z * s;
    let mut h = c(0.0, 0.0);
    for k in 0..=m / 2 {
        let coef = (ln_fact(m) - ln_fact(k) - ln_fact(m - 2 * k)).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        h += (x * 2.0).powu((m - 2 * k) as u32) * (sign * coef);
    }
    let p0 = (n as f64 * (1.0 - t * t).sqrt() / PI).sqrt();
    h * (t.powf(m as f64 / 2.0) * p0 / (2f64.powf(m as f64 / 2.0) * (0.5 * ln_fact(m)).exp()))
}

/// Derivative by the Cauchy integral on a circle of radius `r`; exact for
/// polynomials of degree below `nodes` up to rounding.
fn cauchy_derivative(model: &CanonicalModel, z: Complex64, m: usize, r: f64, nodes: usize) -> ScaledComplex {
    let mut acc = ScaledComplex::ZERO;
    for k in 0..nodes {
        let th = 2.0 * PI * k as f64 / nodes as f64;
        let e = Complex64::from_polar(1.0, th);
        let p = poly_sequence(model, z + e * r, m).get(m);
        acc += p.scale_complex(e.conj() / (r * nodes as f64));
    }
    acc
}

#[test]
fn recurrence_coeff_examples() {
    assert_eq!(recurrence_coeff(0, 7, 0.4), 0.0);
    assert_eq!(recurrence_coeff(9, 9, 0.0), 1.0);
    assert!((recurrence_coeff(10, 100, 0.3) - (10.0f64 / 91.0).sqrt()).abs() < 1e-16);
    assert!((recurrence_coeff(10, 100, 0.3) - 0.331_497).abs() < 1e-6);
}

#[test]
fn p0_example() {
    let m = model(4, 0.2);
    let p = poly_sequence(&m, c(0.3, 0.1), 3);
    let expected = (4.0 * 0.96f64.sqrt() / PI).sqrt();
    assert!((p.get(0).to_complex().re - expected).abs() < 1e-15);
    assert!((expected - 1.116_922_057).abs() < 1e-9);
    assert_eq!(p.len(), 4);
}

#[test]
fn monomials_at_zero_t() {
    let n = 5;
    let m = model(n, 0.0);
    let z = c(1.0, 1.0);
    let seq = poly_sequence(&m, z, 20);
    for k in 0..=20 {
        let expected = ((n as f64).powi(k as i32 + 1) / (PI * ln_fact(k).exp())).sqrt() * z.powu(k as u32);
        assert!((seq.get(k).to_complex() - expected).norm() <= 1e-13 * expected.norm(), "k = {k}");
    }
}

#[test]
fn values_at_zero() {
    for &(n, t) in &[(10usize, 0.3), (40, 0.6), (7, 0.1)] {
        let m = model(n, t);
        let seq = poly_sequence(&m, c(0.0, 0.0), 30);
        for k in 0..=30 {
            let v = seq.get(k);
            if k % 2 == 1 {
                assert!(v.is_zero(), "k = {k}");
            } else {
                let l = k / 2;
                let ln = 0.5 * (1.0 - t * t).ln() + (n as f64).ln() + ln_fact(2 * l)
                    + (2 * l) as f64 * t.ln()
                    - PI.ln()
                    - 2.0 * ln_fact(l)
                    - (2 * l) as f64 * 2f64.ln();
                assert!((2.0 * v.ln_abs() - ln).abs() < 1e-12 * ln.abs().max(1.0), "k = {k}");
            }
        }
    }
}

#[test]
fn recurrence_matches_explicit_hermite() {
    for &t in &[0.1, 0.3, 0.5, 0.7] {
        let m = model(12, t);
        for &z in &[c(0.4, -0.3), c(1.5, 0.8), c(-2.2, 0.1)] {
            let seq = poly_sequence(&m, z, 14);
            for k in 0..=14 {
                let e = hermite_explicit(12, t, z, k);
                assert!((seq.get(k).to_complex() - e).norm() <= 1e-12 * e.norm(), "t={t} z={z} k={k}");
            }
        }
    }
}

#[test]
fn closed_form_matches_recurrence() {
    for &t in &[0.1, 0.3, 0.5, 0.7] {
        for &n in &[20usize, 150] {
            let m = model(n, t);
            for &z in &[c(0.1, 2.9), c(-2.0, -1.5), c(2.95, 0.0), c(0.0, 0.3)] {
                let seq = poly_sequence(&m, z, 200);
                for k in [0usize, 1, 2, 17, 64, 128, 199, 200] {
                    assert!(rel(seq.get(k), hermite_closed_form(&m, z, k)) <= 1e-9, "t={t} n={n} z={z} k={k}");
                }
            }
        }
    }
}

#[test]
fn derivative_examples() {
    let m = model(30, 0.4);
    let r = derivative_relation_residual(&m, c(0.7, -0.2), 1).unwrap();
    assert!(r.value <= 1e-14 && !r.absolute);
    assert!(matches!(derivative_relation_residual(&m, c(0.7, -0.2), 0), Err(Error::Domain(_))));
    // p_1 vanishes at 0, so the m = 2 check there falls back to the envelope.
    let r = derivative_relation_residual(&m, c(0.0, 0.0), 2).unwrap();
    assert!(r.absolute && r.value <= 1e-14);
    // Near a real zero of p_{m-1}.
    let s = hermite_argument_scale(&m).unwrap();
    let z0 = hermite_zeros(5)[3] / s;
    let r = derivative_relation_residual(&m, c(z0, 0.0), 6).unwrap();
    assert!(r.absolute && r.value <= 1e-10);
}

#[test]
fn derivative_matches_cauchy_integral() {
    for &(n, t) in &[(16usize, 0.0), (16, 0.3), (50, 0.7)] {
        let m = model(n, t);
        for &z in &[c(0.5, 0.5), c(-1.2, 0.3), c(0.0, -0.9)] {
            for k in [1usize, 5, 20, 40] {
                let d = hermite_derivative(&m, z, k);
                let oracle = cauchy_derivative(&m, z, k, 0.1, 96);
                assert!(rel(d, oracle) <= 1e-9, "n={n} t={t} z={z} k={k}: {}", rel(d, oracle));
            }
        }
    }
}

/// Zeros of `H_m` from the Jacobi matrix of the Hermite recurrence.
fn hermite_zeros(m: usize) -> Vec<f64> {
    let mut j = DMatrix::<f64>::zeros(m, m);
    for i in 1..m {
        let b = (i as f64 / 2.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let mut z: Vec<f64> = SymmetricEigen::new(j).eigenvalues.iter().copied().collect();
    z.sort_by(|a, b| a.partial_cmp(b).unwrap());
    z
}

#[test]
fn zeros_inside_bound() {
    let m = model(6, 0.3);
    let s = hermite_argument_scale(&m).unwrap();
    let zeros = hermite_zeros(6);
    assert!(zeros.iter().all(|x| (x / s).abs() < zero_bound(&m, 6)));
    // the rescaled zeros are zeros of p_6
    let seq = poly_sequence(&m, c(zeros[5] / s, 0.0), 6);
    let envelope = poly_sequence(&m, c(0.0, zeros[5] / s), 6).get(6);
    assert!(seq.get(6).abs_ratio(&envelope) < 1e-12);
    for mm in 1..=30usize {
        for &(n, t) in &[(10usize, 0.2), (30, 0.5), (100, 0.8)] {
            let md = model(n, t);
            let s = hermite_argument_scale(&md).unwrap();
            let z = hermite_zeros(mm);
            assert!(z.iter().all(|x| (x / s).abs() < zero_bound(&md, mm)));
        }
    }
    assert_eq!(hermite_zeros(1), vec![0.0]);
    let f = nmm_core::geometry::focus_distance(0.3).unwrap();
    let fb: Vec<f64> = [10usize, 100, 1000].iter().map(|&n| zero_bound(&model(n, 0.3), n)).collect();
    assert!(fb[0] > fb[1] && fb[1] > fb[2] && fb[2] > f);
    assert!(fb[2] - f < 1e-3);
}

#[test]
fn small_t_approaches_monomials() {
    let tiny = model(6, 1e-8);
    let zero = model(6, 0.0);
    for &z in &[c(0.3, 0.4), c(-1.0, 0.2)] {
        let a = poly_sequence(&tiny, z, 12);
        let b = poly_sequence(&zero, z, 12);
        for k in 0..=12 {
            assert!(rel(a.get(k), b.get(k)) <= 1e-6);
        }
    }
}

#[test]
fn reduction_examples() {
    let r = reduce_general(&GeneralPotential::new(1.5, c(0.0, 0.0), c(0.2, 0.0)).unwrap()).unwrap();
    assert_eq!((r.shift, r.rotation), (c(0.0, 0.0), 0.0));
    let t1 = c(0.4, -0.25);
    for &t2 in &[0.1, -0.3, 0.45] {
        let v = shift_center(t1, c(t2, 0.0));
        assert!((v.re - t1.re / (1.0 - 2.0 * t2)).abs() < 1e-15);
        assert!((v.im + t1.im / (1.0 + 2.0 * t2)).abs() < 1e-15);
    }
    let r = reduce_general(&GeneralPotential::new(4.0, c(0.0, 0.0), c(0.0, 0.1)).unwrap()).unwrap();
    assert!((r.rotation - PI / 2.0).abs() < 1e-15);
    assert_eq!(r.scale, 2.0);
    assert_eq!(r.shift, c(0.0, 0.0));
    assert!((r.canonical_t - 0.2).abs() < 1e-16);
    assert!(GeneralPotential::new(1.0, c(0.0, 0.0), c(0.5, 0.0)).is_err());
    assert!(GeneralPotential::new(0.0, c(0.0, 0.0), c(0.1, 0.0)).is_err());
}

#[test]
fn gram_examples() {
    let q = Quadrature::default();
    let g = gram_matrix(&model(2, 0.3), 6, &q).unwrap();
    assert!((g.get(0, 0) - c(1.0, 0.0)).norm() <= 1e-8);
    for k in 0..=6 {
        for l in 0..=6 {
            if (k + l) % 2 == 1 {
                assert!(g.get(k, l).norm() <= 1e-10);
            }
        }
    }
    assert!(gram_matrix(&model(9, 0.3), 4, &q).is_err());
    assert!(gram_matrix(&model(3, 0.3), 9, &q).is_err());
}

/// `∫ |z|^{2m} e^{-n|z|^2} d^2 z` by Gauss-Laguerre-free substitution: radial
/// Gauss-Legendre on `[0, R]`.
fn monomial_norm(n: usize, m: usize) -> f64 {
    let k = 200;
    let mut j = DMatrix::<f64>::zeros(k, k);
    for i in 1..k {
        let b = i as f64 / ((4 * i * i) as f64 - 1.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let e = SymmetricEigen::new(j);
    let r_max = 12.0;
    let mut acc = 0.0;
    for i in 0..k {
        let x = e.eigenvalues[i];
        let w = 2.0 * e.eigenvectors[(0, i)].powi(2);
        let r = 0.5 * r_max * (x + 1.0);
        acc += 0.5 * r_max * w * 2.0 * PI * r * r.powi(2 * m as i32) * (-(n as f64) * r * r).exp();
    }
    acc
}

#[test]
fn monomial_norms_at_zero_t() {
    for n in 1..=4usize {
        for m in 0..=6usize {
            let h = monomial_norm(n, m);
            let expected = PI * ln_fact(m).exp() / (n as f64).powi(m as i32 + 1);
            assert!((h / expected - 1.0).abs() < 1e-10, "n={n} m={m}");
            let p = poly_sequence(&model(n, 0.0), c(1.0, 0.0), m).get(m).to_complex().re;
            assert!((p * p * h - 1.0).abs() < 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn parity_and_conjugation(t in 0.0f64..0.9, n in 1usize..100, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let m = model(n, t);
        let z = c(re, im);
        let a = poly_sequence(&m, z, 60);
        let b = poly_sequence(&m, -z, 60);
        let cj = poly_sequence(&m, z.conj(), 60);
        for k in 0..=60 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let v = a.get(k);
            if v.is_zero() { continue; }
            prop_assert!((b.get(k) - v.scale_real(sign)).abs_ratio(&v) <= 1e-13);
            prop_assert!((cj.get(k) - v.conj()).abs_ratio(&v) <= 1e-13);
        }
    }

    #[test]
    fn derivative_relation_holds(t in 0.0f64..0.9, n in 1usize..200, m in 1usize..50, re in -2.5f64..2.5, im in -2.5f64..2.5) {
        let r = derivative_relation_residual(&model(n, t), c(re, im), m).unwrap();
        prop_assert!(r.value <= 1e-10);
    }

    #[test]
    fn general_polys_transform(t0 in 0.3f64..3.0, a in -1.0f64..1.0, b in -1.0f64..1.0, r2 in 0.0f64..0.45, th in -3.1f64..3.1, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let p = GeneralPotential::new(t0, c(a, b), Complex64::from_polar(r2, th)).unwrap();
        let red = reduce_general(&p).unwrap();
        let z = c(re, im);
        // completed square in the original coordinates
        let w = z - red.shift;
        let lhs = t0 * p.potential(z) + red.constant;
        let rhs = w.norm_sqr() - 2.0 * (p.t2 * w * w).re;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + z.norm_sqr()));
        prop_assert!((red.from_canonical(red.to_canonical(z)) - z).norm() <= 1e-13 * (1.0 + z.norm()));
        // canonical potential at the mapped point
        let cm = model(3, red.canonical_t);
        prop_assert!((cm.potential(red.to_canonical(z)) * t0 - rhs).abs() <= 1e-12 * (1.0 + z.norm_sqr()));
        let seq = general_poly_sequence(&p, 5, z, 4).unwrap();
        let base = poly_sequence(&model(5, red.canonical_t), red.to_canonical(z), 4);
        for k in 0..=4 {
            let expected = base.get(k).scale_complex(Complex64::from_polar(1.0 / t0.sqrt(), -0.5 * k as f64 * red.rotation));
            if expected.is_zero() { continue; }
            prop_assert!(rel(seq.get(k), expected) <= 1e-14);
        }
    }
}
