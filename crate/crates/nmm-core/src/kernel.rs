//! Finite-n kernels, density, correlation determinants and the exact kernel
//! identities as residual diagnostics.
//!
//! * `K~_n(w, z) = e^{-n(V(w) + V(z))/2} sum_{k<n} conj(p_k(w)) p_k(z)`
//! * `H_n(w, z) = (1/n) e^{n(-w z + t w^2/2 + t z^2/2)} sum_{k<n} p_k(w) p_k(z)`
//! * `rho_n(z) = K~_n(z, z) / n`
//!
//! All sums run in [`ScaledComplex`] and the exponential weight is folded in
//! before converting back to `f64`.
//!
//! Identity residuals are measured against the total magnitude of the terms
//! entering each side, i.e. they are relative to the size of what was summed.
//! A plain `|lhs - rhs| / |rhs|` is meaningless where the right-hand side is
//! exponentially smaller than the individual terms of the left-hand side.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Determinant};
use crate::orthopoly::{
    general_poly_sequence, poly_sequence, reduce_general, CanonicalModel, GeneralPotential,
    PolySequence,
};
use crate::quadrature::{self, Quadrature};
use crate::scaledcx::ScaledComplex;

/// A kernel value with the largest binary exponent met in its sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEval {
    pub value: Complex64,
    pub max_exponent: i32,
}

fn finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("non-finite point"))
    }
}

fn sum_products(
    pw: &PolySequence,
    pz: &PolySequence,
    count: usize,
    conj_w: bool,
) -> (ScaledComplex, i32) {
    let mut acc = ScaledComplex::ZERO;
    let mut max_exp = i32::MIN;
    for k in 0..count {
        let a = if conj_w { pw.get(k).conj() } else { pw.get(k) };
        let term = a * pz.get(k);
        if !term.is_zero() {
            max_exp = max_exp.max(term.exponent());
        }
        acc += term;
    }
    (acc, max_exp)
}

/// `H_n(w, z)`.
pub fn pre_kernel(model: &CanonicalModel, w: Complex64, z: Complex64) -> Result<KernelEval> {
    finite(w)?;
    finite(z)?;
    let n = model.n;
    let pw = poly_sequence(model, w, n - 1);
    let pz = poly_sequence(model, z, n - 1);
    let (sum, max_exponent) = sum_products(&pw, &pz, n, false);
    let nf = n as f64;
    let expo = (-w * z + (w * w + z * z) * (0.5 * model.t)) * nf;
    let value = (sum * ScaledComplex::from_exp(expo)).scale_real(1.0 / nf);
    Ok(KernelEval {
        value: value.to_complex_checked()?,
        max_exponent,
    })
}

/// `K~_n(w, z) / n`.
pub fn normalized_kernel(model: &CanonicalModel, w: Complex64, z: Complex64) -> Result<KernelEval> {
    finite(w)?;
    finite(z)?;
    let n = model.n;
    let pw = poly_sequence(model, w, n - 1);
    let pz = poly_sequence(model, z, n - 1);
    Ok(weighted_kernel(model, &pw, &pz, w, z))
}

fn weighted_kernel(
    model: &CanonicalModel,
    pw: &PolySequence,
    pz: &PolySequence,
    w: Complex64,
    z: Complex64,
) -> KernelEval {
    let n = model.n;
    let nf = n as f64;
    let (sum, max_exponent) = sum_products(pw, pz, n, true);
    let weight = -0.5 * nf * (model.potential(w) + model.potential(z));
    let value = (sum * ScaledComplex::from_exp_real(weight)).scale_real(1.0 / nf);
    KernelEval {
        value: value.to_complex(),
        max_exponent,
    }
}

/// `rho_n(z) = K~_n(z, z) / n`.
pub fn density(model: &CanonicalModel, z: Complex64) -> Result<f64> {
    Ok(normalized_kernel(model, z, z)?.value.re)
}

/// `rho_n(0)` from the series over even degrees:
/// `sqrt(1 - t^2)/pi * sum_{2l < n} binom(2l, l) (t/2)^{2l}`.
pub fn density_series_at_zero(model: &CanonicalModel) -> f64 {
    let t = model.t;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut l = 0usize;
    while 2 * l < model.n {
        sum += term;
        let lf = l as f64;
        term *= (2.0 * lf + 1.0) * (2.0 * lf + 2.0) / ((lf + 1.0) * (lf + 1.0)) * 0.25 * t * t;
        l += 1;
    }
    libm::sqrt(1.0 - t * t) / core::f64::consts::PI * sum
}

pub const MAX_CORRELATION_POINTS: usize = 64;

/// `M_kl = K~_n(z_k, z_l) / n` and its determinant.
///
/// The correlation function itself is `R_n^m = det(K~_n(z_k, z_l)) = n^m det M`;
/// the universality limits are stated for `R_n^m / n^m = det M`, which is what
/// `det` holds. Use [`CorrelationMatrix::raw_log_abs_det`] for `R_n^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub points: Vec<Complex64>,
    pub n: usize,
    pub entries: ComplexMatrix,
    /// `Re det M`.
    pub det: f64,
    /// `Im det M`, rounding leakage.
    pub det_imag: f64,
    pub factorization: Determinant,
}

impl CorrelationMatrix {
    /// `ln |R_n^m|`.
    pub fn raw_log_abs_det(&self) -> f64 {
        self.factorization.log_abs + self.points.len() as f64 * libm::log(self.n as f64)
    }

    /// `R_n^m` when representable.
    pub fn raw_det(&self) -> f64 {
        self.det * libm::pow(self.n as f64, self.points.len() as f64)
    }
}

pub fn correlation(model: &CanonicalModel, points: &[Complex64]) -> Result<CorrelationMatrix> {
    let m = points.len();
    if m == 0 || m > MAX_CORRELATION_POINTS {
        return Err(Error::InvalidArgument("between 1 and 64 points are required"));
    }
    for &p in points {
        finite(p)?;
    }
    let n = model.n;
    let seqs: Vec<PolySequence> = points.iter().map(|&p| poly_sequence(model, p, n - 1)).collect();
    let mut entries = ComplexMatrix::zeros(m);
    for k in 0..m {
        for l in k..m {
            let v = weighted_kernel(model, &seqs[k], &seqs[l], points[k], points[l]).value;
            if k == l {
                entries.set(k, k, Complex64::new(v.re, 0.0));
            } else {
                entries.set(k, l, v);
                entries.set(l, k, v.conj());
            }
        }
    }
    let factorization = entries.determinant();
    let d = factorization.value();
    Ok(CorrelationMatrix {
        points: points.to_vec(),
        n,
        entries,
        det: d.re,
        det_imag: d.im,
        factorization,
    })
}

/// Both sides of the kernel identities with the common factor
/// `E = e^{n(-w z + t(w^2 + z^2)/2)}` removed.
#[derive(Clone, Copy, Debug)]
pub struct IdentitySides {
    /// `dH/dw / E`.
    pub dw: ScaledComplex,
    /// `dH/dz / E`.
    pub dz: ScaledComplex,
    /// `KM = (1/n) sum p_m(w) p_m(z)`.
    pub km: ScaledComplex,
    /// `p_n(w) p_{n-1}(z)`.
    pub a: ScaledComplex,
    /// `p_{n-1}(w) p_n(z)`.
    pub b: ScaledComplex,
    /// Sum of the magnitudes of all terms that went into `dw`, `dz`.
    pub scale: ScaledComplex,
}

impl IdentitySides {
    /// Right side of the plus identity: `-sqrt((1-t)/(1+t)) (a + b)`.
    pub fn rhs_sum(&self, t: f64) -> ScaledComplex {
        -(self.a + self.b).scale_real(libm::sqrt((1.0 - t) / (1.0 + t)))
    }

    /// Right side of the minus identity: `sqrt((1+t)/(1-t)) (a - b)`.
    pub fn rhs_diff(&self, t: f64) -> ScaledComplex {
        (self.a - self.b).scale_real(libm::sqrt((1.0 + t) / (1.0 - t)))
    }

    /// `(t a - b) / sqrt(1 - t^2)`.
    pub fn rhs_w(&self, t: f64) -> ScaledComplex {
        (self.a.scale_real(t) - self.b).scale_real(1.0 / libm::sqrt(1.0 - t * t))
    }

    /// `(t b - a) / sqrt(1 - t^2)`.
    pub fn rhs_z(&self, t: f64) -> ScaledComplex {
        (self.b.scale_real(t) - self.a).scale_real(1.0 / libm::sqrt(1.0 - t * t))
    }
}

fn sc_abs(x: ScaledComplex) -> ScaledComplex {
    if x.is_zero() {
        return x;
    }
    ScaledComplex::new(Complex64::new(x.mantissa().norm(), 0.0), x.exponent())
}

/// `p_m'(z) = sqrt(n m (1 - t^2)) p_{m-1}(z)`.
fn derivative(model: &CanonicalModel, p: &PolySequence, m: usize) -> ScaledComplex {
    if m == 0 {
        return ScaledComplex::ZERO;
    }
    p.get(m - 1)
        .scale_real(libm::sqrt(model.n as f64 * m as f64 * (1.0 - model.t * model.t)))
}

/// Differentiates `H_n` term by term.
pub fn identity_sides(model: &CanonicalModel, w: Complex64, z: Complex64) -> IdentitySides {
    let n = model.n;
    let nf = n as f64;
    let t = model.t;
    let pw = poly_sequence(model, w, n);
    let pz = poly_sequence(model, z, n);
    let cw = (w * t - z) * nf;
    let cz = (z * t - w) * nf;
    let mut s = ScaledComplex::ZERO;
    let mut sw = ScaledComplex::ZERO;
    let mut sz = ScaledComplex::ZERO;
    let mut scale = ScaledComplex::ZERO;
    for m in 0..n {
        let prod = pw.get(m) * pz.get(m);
        let dwm = derivative(model, &pw, m) * pz.get(m);
        let dzm = pw.get(m) * derivative(model, &pz, m);
        s += prod;
        sw += dwm;
        sz += dzm;
        scale += sc_abs(prod).scale_real(cw.norm() + cz.norm()) + sc_abs(dwm) + sc_abs(dzm);
    }
    let dw = (s.scale_complex(cw) + sw).scale_real(1.0 / nf);
    let dz = (s.scale_complex(cz) + sz).scale_real(1.0 / nf);
    let a = pw.get(n) * pz.get(n - 1);
    let b = pw.get(n - 1) * pz.get(n);
    scale = scale.scale_real(1.0 / nf) + sc_abs(a) + sc_abs(b);
    IdentitySides {
        dw,
        dz,
        km: s.scale_real(1.0 / nf),
        a,
        b,
        scale,
    }
}

fn residual(lhs: ScaledComplex, rhs: ScaledComplex, scale: ScaledComplex) -> f64 {
    (lhs - rhs).abs_ratio(&scale)
}

/// Residuals of `dH/dw ± dH/dz = ∓sqrt((1∓t)/(1±t)) (p_n(w)p_{n-1}(z) ± p_{n-1}(w)p_n(z)) E`.
pub fn identity_residual_sym(model: &CanonicalModel, w: Complex64, z: Complex64) -> (f64, f64) {
    let s = identity_sides(model, w, z);
    let t = model.t;
    (
        residual(s.dw + s.dz, s.rhs_sum(t), s.scale),
        residual(s.dw - s.dz, s.rhs_diff(t), s.scale),
    )
}

/// Residuals of the separate `dH/dw` and `dH/dz` identities.
pub fn identity_residual_wz(model: &CanonicalModel, w: Complex64, z: Complex64) -> (f64, f64) {
    let s = identity_sides(model, w, z);
    let t = model.t;
    (
        residual(s.dw, s.rhs_w(t), s.scale),
        residual(s.dz, s.rhs_z(t), s.scale),
    )
}

/// Residuals of `dKM/dw ± dKM/dz ∓ n(1∓t)(w±z) KM = ∓sqrt((1∓t)/(1±t)) (...)`.
pub fn km_identity_residual(model: &CanonicalModel, w: Complex64, z: Complex64) -> (f64, f64) {
    let n = model.n;
    let nf = n as f64;
    let t = model.t;
    let pw = poly_sequence(model, w, n);
    let pz = poly_sequence(model, z, n);
    let mut km = ScaledComplex::ZERO;
    let mut sw = ScaledComplex::ZERO;
    let mut sz = ScaledComplex::ZERO;
    let mut mag = ScaledComplex::ZERO;
    for m in 0..n {
        let prod = pw.get(m) * pz.get(m);
        let dwm = derivative(model, &pw, m) * pz.get(m);
        let dzm = pw.get(m) * derivative(model, &pz, m);
        km += prod;
        sw += dwm;
        sz += dzm;
        mag += sc_abs(prod).scale_real(nf * (w.norm() + z.norm())) + sc_abs(dwm) + sc_abs(dzm);
    }
    let inv = 1.0 / nf;
    let (km, sw, sz) = (km.scale_real(inv), sw.scale_real(inv), sz.scale_real(inv));
    let a = pw.get(n) * pz.get(n - 1);
    let b = pw.get(n - 1) * pz.get(n);
    let scale = mag.scale_real(inv) + sc_abs(a) + sc_abs(b);
    let mut out = [0.0; 2];
    for (slot, sigma) in [1.0f64, -1.0].iter().enumerate() {
        let c = libm::sqrt((1.0 - sigma * t) / (1.0 + sigma * t));
        let lhs = sw + sz.scale_real(*sigma)
            - km.scale_complex((w + z * *sigma) * (sigma * nf * (1.0 - sigma * t)));
        let rhs = (a + b.scale_real(*sigma)).scale_real(-sigma * c);
        out[slot] = residual(lhs, rhs, scale);
    }
    (out[0], out[1])
}

/// Residual of the telescoping step at level `k` (both sign choices, the
/// larger is returned):
///
/// ```text
/// ∓sqrt(k/n) c (p_k(w)p_{k-1}(z) ± p_{k-1}(w)p_k(z))
///   = ∓sqrt((k-1)/n) c (p_{k-1}(w)p_{k-2}(z) ± p_{k-2}(w)p_{k-1}(z))
///     ∓ (1∓t)(w±z) p_{k-1}(w)p_{k-1}(z)
///     + (1/n)(p'_{k-1}(w)p_{k-1}(z) ± p_{k-1}(w)p'_{k-1}(z)),
/// ```
/// `c = sqrt((1∓t)/(1±t))`, `p_{-1} = 0`.
pub fn cd_recursion_residual(
    model: &CanonicalModel,
    w: Complex64,
    z: Complex64,
    k: usize,
) -> Result<f64> {
    let n = model.n;
    if k == 0 || k > n {
        return Err(Error::Domain("level k must satisfy 1 <= k <= n"));
    }
    let nf = n as f64;
    let t = model.t;
    let pw = poly_sequence(model, w, k);
    let pz = poly_sequence(model, z, k);
    let p = |s: &PolySequence, j: isize| {
        if j < 0 {
            ScaledComplex::ZERO
        } else {
            s.get(j as usize)
        }
    };
    let ki = k as isize;
    let mut worst: f64 = 0.0;
    for sigma in [1.0f64, -1.0] {
        let c = libm::sqrt((1.0 - sigma * t) / (1.0 + sigma * t));
        let lhs = (p(&pw, ki) * p(&pz, ki - 1) + (p(&pw, ki - 1) * p(&pz, ki)).scale_real(sigma))
            .scale_real(-sigma * libm::sqrt(k as f64 / nf) * c);
        let r1 = (p(&pw, ki - 1) * p(&pz, ki - 2)
            + (p(&pw, ki - 2) * p(&pz, ki - 1)).scale_real(sigma))
        .scale_real(-sigma * libm::sqrt((k as f64 - 1.0) / nf) * c);
        let r2 = (p(&pw, ki - 1) * p(&pz, ki - 1))
            .scale_complex((w + z * sigma) * (-sigma * (1.0 - sigma * t)));
        let d1 = derivative(model, &pw, k - 1) * pz.get(k - 1);
        let d2 = pw.get(k - 1) * derivative(model, &pz, k - 1);
        let r3 = (d1 + d2.scale_real(sigma)).scale_real(1.0 / nf);
        let scale = sc_abs(lhs) + sc_abs(r1) + sc_abs(r2) + (sc_abs(d1) + sc_abs(d2)).scale_real(1.0 / nf);
        if scale.is_zero() {
            continue;
        }
        worst = worst.max(residual(lhs, r1 + r2 + r3, scale));
    }
    Ok(worst)
}

/// `∫ K~_n(z, z) d^2 z` by polar quadrature; equals `n` exactly.
pub fn normalization_integral(model: &CanonicalModel, q: &Quadrature) -> Result<f64> {
    if model.n > 16 {
        return Err(Error::Domain("normalization_integral is limited to n <= 16"));
    }
    let r = q
        .radius
        .unwrap_or_else(|| crate::orthopoly::weight_radius(model, model.n - 1));
    let nf = model.n as f64;
    let v = quadrature::refine(q, r, |nodes| {
        let mut acc = 0.0;
        for &(x, y, w) in nodes {
            let z = Complex64::new(x, y);
            let pz = poly_sequence(model, z, model.n - 1);
            acc += w * weighted_kernel(model, &pz, &pz, z, z).value.re * nf;
        }
        alloc::vec![acc]
    })?;
    Ok(v[0])
}

/// `K~_n(w, z) / n` for a general potential, summed from the general
/// orthonormal polynomials and the general weight.
pub fn general_normalized_kernel(
    p: &GeneralPotential,
    n: usize,
    w: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1"));
    }
    finite(w)?;
    finite(z)?;
    let red = reduce_general(p)?;
    let pw = general_poly_sequence(p, n, w, n - 1)?;
    let pz = general_poly_sequence(p, n, z, n - 1)?;
    let (sum, _) = sum_products(&pw, &pz, n, true);
    let nf = n as f64;
    let c = red.constant / p.t0;
    let weight = -0.5 * nf * (p.potential(w) + p.potential(z) + 2.0 * c);
    Ok((sum * ScaledComplex::from_exp_real(weight))
        .scale_real(1.0 / nf)
        .to_complex())
}

/// `(1/t0) K~_n^{can}(w~, z~) / n` with `w~ = e^{i theta/2}(w - v)/sqrt(t0)`.
pub fn transformed_canonical_kernel(
    p: &GeneralPotential,
    n: usize,
    w: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    let red = reduce_general(p)?;
    let model = CanonicalModel::new(n, red.canonical_t)?;
    let k = normalized_kernel(&model, red.to_canonical(w), red.to_canonical(z))?;
    Ok(k.value / p.t0)
}
