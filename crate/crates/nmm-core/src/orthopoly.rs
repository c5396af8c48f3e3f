//! Orthonormal polynomials of the Gaussian potentials.
//!
//! The canonical model is `V(z) = |z|^2 - t Re(z^2)` with `0 <= t < 1`; its
//! orthonormal polynomials with respect to `e^{-n V} d^2 z` satisfy
//!
//! ```text
//! z p_m = r_{m+1} p_{m+1} + t r_m p_{m-1},   r_m = sqrt(m / (n (1 - t^2))),
//! p_0 = sqrt(n sqrt(1 - t^2) / pi),
//! ```
//!
//! and `p_m(z) = H_m(s z) t^{m/2} p_0 / (2^{m/2} sqrt(m!))` with
//! `s = sqrt(n (1 - t^2) / (2 t))`.
//!
//! A general potential `(1/t0)(|z|^2 - 2 Re(t1 z + t2 z^2))` is reduced to the
//! canonical one with `t = 2|t2|` by a shift, a scaling by `sqrt(t0)` and a
//! rotation by `arg(t2)/2`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry;
use crate::linalg::ComplexMatrix;
use crate::quadrature::{self, Quadrature};
use crate::scaledcx::{log_factorial, ScaledComplex};

/// `(n, t)` for `V(z) = |z|^2 - t Re(z^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalModel {
    pub n: usize,
    pub t: f64,
}

impl CanonicalModel {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1"));
        }
        geometry::check_t(t)?;
        Ok(Self { n, t })
    }

    pub fn potential(&self, z: Complex64) -> f64 {
        z.norm_sqr() - self.t * (z.re * z.re - z.im * z.im)
    }

    pub fn p0(&self) -> f64 {
        libm::sqrt(self.n as f64 * libm::sqrt(1.0 - self.t * self.t) / PI)
    }

    /// `<1, 1> = pi / (n sqrt(1 - t^2))`.
    pub fn constant_norm(&self) -> f64 {
        PI / (self.n as f64 * libm::sqrt(1.0 - self.t * self.t))
    }

    pub fn geometry(&self) -> geometry::EllipseGeometry {
        geometry::EllipseGeometry::new(self.t).expect("validated t")
    }
}

/// `r_m = sqrt(m / (n (1 - t^2)))`.
pub fn recurrence_coeff(m: usize, n: usize, t: f64) -> f64 {
    libm::sqrt(m as f64 / (n as f64 * (1.0 - t * t)))
}

/// `p_0(z), ..., p_m(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySequence {
    pub values: Vec<ScaledComplex>,
}

impl PolySequence {
    pub fn get(&self, k: usize) -> ScaledComplex {
        self.values[k]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub const MAX_DEGREE: usize = 1_000_000;

/// Three-term recurrence in scaled arithmetic.
pub fn poly_sequence(model: &CanonicalModel, z: Complex64, m: usize) -> PolySequence {
    assert!(m <= MAX_DEGREE, "degree too large");
    let (n, t) = (model.n, model.t);
    let mut values = Vec::with_capacity(m + 1);
    values.push(ScaledComplex::from_real(model.p0()));
    if m == 0 {
        return PolySequence { values };
    }
    let mut prev = ScaledComplex::ZERO;
    let mut cur = values[0];
    let mut r_cur = 0.0;
    for k in 0..m {
        let r_next = recurrence_coeff(k + 1, n, t);
        let mut next = cur.scale_complex(z);
        if k > 0 && t != 0.0 {
            next -= prev.scale_real(t * r_cur);
        }
        let next = next.scale_real(1.0 / r_next);
        values.push(next);
        prev = cur;
        cur = next;
        r_cur = r_next;
    }
    PolySequence { values }
}

/// Physicists' Hermite polynomials `H_0(x), ..., H_m(x)` in scaled arithmetic.
pub fn hermite_sequence(x: Complex64, m: usize) -> Vec<ScaledComplex> {
    let mut h = Vec::with_capacity(m + 1);
    h.push(ScaledComplex::ONE);
    if m == 0 {
        return h;
    }
    h.push(ScaledComplex::from_complex(x * 2.0));
    for k in 1..m {
        let next = h[k].scale_complex(x * 2.0) - h[k - 1].scale_real(2.0 * k as f64);
        h.push(next);
    }
    h
}

/// `ln s` with `s = sqrt(n (1 - t^2) / (2 t))`, for `t > 0`.
fn ln_hermite_scale(n: usize, t: f64) -> f64 {
    0.5 * (libm::log(n as f64) + libm::log1p(-t * t) - core::f64::consts::LN_2 - libm::log(t))
}

/// `ln` of the factor `t^{m/2} p_0 / (2^{m/2} sqrt(m!))` multiplying `H_m(s z)`.
fn ln_hermite_prefactor(model: &CanonicalModel, m: usize) -> f64 {
    let mf = m as f64;
    0.5 * mf * (libm::log(model.t) - core::f64::consts::LN_2) - 0.5 * log_factorial(m as u64)
        + libm::log(model.p0())
}

/// `p_m(z)` from the Hermite closed form (monomials when `t = 0`).
pub fn hermite_closed_form(model: &CanonicalModel, z: Complex64, m: usize) -> ScaledComplex {
    if model.t == 0.0 {
        return monomial_closed_form(model.n, z, m);
    }
    let s = libm::exp(ln_hermite_scale(model.n, model.t));
    let h = hermite_sequence(z * s, m);
    h[m] * ScaledComplex::from_exp_real(ln_hermite_prefactor(model, m))
}

/// `sqrt(n^{m+1} / (pi m!)) z^m`.
pub fn monomial_closed_form(n: usize, z: Complex64, m: usize) -> ScaledComplex {
    let ln_c = 0.5 * ((m as f64 + 1.0) * libm::log(n as f64) - libm::log(PI) - log_factorial(m as u64));
    let mut acc = ScaledComplex::from_exp_real(ln_c);
    let zs = ScaledComplex::from_complex(z);
    for _ in 0..m {
        acc = acc * zs;
    }
    acc
}

/// `p_m'(z)` from `H_m' = 2 m H_{m-1}` (or the monomial derivative at `t = 0`).
pub fn hermite_derivative(model: &CanonicalModel, z: Complex64, m: usize) -> ScaledComplex {
    if m == 0 {
        return ScaledComplex::ZERO;
    }
    if model.t == 0.0 {
        return monomial_closed_form(model.n, z, m - 1)
            .scale_real(m as f64 * libm::sqrt(model.n as f64 / m as f64));
    }
    let ln_s = ln_hermite_scale(model.n, model.t);
    let h = hermite_sequence(z * libm::exp(ln_s), m - 1);
    h[m - 1].scale_real(2.0 * m as f64)
        * ScaledComplex::from_exp_real(ln_hermite_prefactor(model, m) + ln_s)
}

/// Result of the derivative check; `absolute` marks the near-zero fallback
/// where the residual is measured against the coefficient envelope instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeResidual {
    pub value: f64,
    pub absolute: bool,
}

/// Residual of `p_m' = sqrt(n m (1 - t^2)) p_{m-1}`, with `p_m'` taken from the
/// Hermite derivative and `p_{m-1}` from the recurrence.
///
/// The residual is relative unless `|p_{m-1}(z)|` is below `1e-6` of the
/// envelope `|p_{m-1}(i |z|)|` (the sum of absolute coefficient contributions),
/// in which case it is measured against that envelope.
pub fn derivative_relation_residual(
    model: &CanonicalModel,
    z: Complex64,
    m: usize,
) -> Result<DerivativeResidual> {
    if m == 0 {
        return Err(Error::Domain("derivative relation needs m >= 1"));
    }
    let lhs = hermite_derivative(model, z, m);
    let c = libm::sqrt(model.n as f64 * m as f64 * (1.0 - model.t * model.t));
    let rhs = poly_sequence(model, z, m - 1).get(m - 1).scale_real(c);
    let diff = lhs - rhs;
    let envelope = poly_sequence(model, Complex64::new(0.0, z.norm()), m - 1)
        .get(m - 1)
        .scale_real(c);
    if rhs.is_zero() || rhs.abs_ratio(&envelope) < 1e-6 {
        Ok(DerivativeResidual {
            value: diff.abs_ratio(&envelope),
            absolute: true,
        })
    } else {
        Ok(DerivativeResidual {
            value: diff.abs_ratio(&rhs),
            absolute: false,
        })
    }
}

/// `F_m = F sqrt((m + 1/2) / n)`; the zeros of `p_m` lie in `[-F_m, F_m]`.
pub fn zero_bound(model: &CanonicalModel, m: usize) -> f64 {
    let f = geometry::focus_distance(model.t).expect("validated t");
    f * libm::sqrt((m as f64 + 0.5) / model.n as f64)
}

/// `s` such that the zeros of `p_m` are the zeros of `H_m` divided by `s`.
pub fn hermite_argument_scale(model: &CanonicalModel) -> Option<f64> {
    if model.t == 0.0 {
        None
    } else {
        Some(libm::exp(ln_hermite_scale(model.n, model.t)))
    }
}

/// `(t0, t1, t2)` for `V(z) = (1/t0)(|z|^2 - 2 Re(t1 z + t2 z^2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralPotential {
    pub t0: f64,
    pub t1: Complex64,
    pub t2: Complex64,
}

impl GeneralPotential {
    pub fn new(t0: f64, t1: Complex64, t2: Complex64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::Domain("t0 must be positive"));
        }
        if !(2.0 * t2.norm() < 1.0) {
            return Err(Error::Domain("2|t2| must be below 1"));
        }
        if !(t1.re.is_finite() && t1.im.is_finite()) {
            return Err(Error::Domain("t1 must be finite"));
        }
        Ok(Self { t0, t1, t2 })
    }

    pub fn potential(&self, z: Complex64) -> f64 {
        (z.norm_sqr() - 2.0 * (self.t1 * z + self.t2 * z * z).re) / self.t0
    }
}

/// Data mapping a general potential onto the canonical one.
///
/// `shift` is the centre `v` in the original `z` coordinates, so that
/// `|z|^2 - 2 Re(t1 z + t2 z^2) + constant = |z - v|^2 - 2 Re(t2 (z - v)^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalReduction {
    pub scale: f64,
    pub shift: Complex64,
    pub rotation: f64,
    pub canonical_t: f64,
    pub constant: f64,
}

impl CanonicalReduction {
    /// `e^{i theta/2} (z - v) / sqrt(t0)`.
    pub fn to_canonical(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, 0.5 * self.rotation) * (z - self.shift) / self.scale
    }

    pub fn from_canonical(&self, w: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, -0.5 * self.rotation) * w * self.scale + self.shift
    }
}

/// `v = (conj(t1) + 2 t1 conj(t2)) / (1 - 4 |t2|^2)`.
pub fn shift_center(t1: Complex64, t2: Complex64) -> Complex64 {
    (t1.conj() + t1 * t2.conj() * 2.0) / (1.0 - 4.0 * t2.norm_sqr())
}

pub fn reduce_general(p: &GeneralPotential) -> Result<CanonicalReduction> {
    let p = GeneralPotential::new(p.t0, p.t1, p.t2)?;
    let scale = libm::sqrt(p.t0);
    let v = shift_center(p.t1, p.t2);
    let rotation = if p.t2.norm() == 0.0 { 0.0 } else { p.t2.arg() };
    Ok(CanonicalReduction {
        scale,
        shift: v,
        rotation,
        canonical_t: 2.0 * p.t2.norm(),
        constant: v.norm_sqr() - 2.0 * (p.t2 * v * v).re,
    })
}

/// `p_0, ..., p_m` orthonormal for `e^{-n (V(z) + constant/t0)}`:
/// `p_k(z) = t0^{-1/2} e^{-i k theta/2} p_k^{can}(e^{i theta/2}(z - v)/sqrt(t0))`.
pub fn general_poly_sequence(
    p: &GeneralPotential,
    n: usize,
    z: Complex64,
    m: usize,
) -> Result<PolySequence> {
    let red = reduce_general(p)?;
    let model = CanonicalModel::new(n, red.canonical_t)?;
    let base = poly_sequence(&model, red.to_canonical(z), m);
    let values = base
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            v.scale_complex(Complex64::from_polar(
                1.0 / red.scale,
                -0.5 * k as f64 * red.rotation,
            ))
        })
        .collect();
    Ok(PolySequence { values })
}

/// Radius beyond which `|p_k p_l| e^{-n V}` (k, l <= mmax) is below about
/// `e^{-70}`.
pub fn weight_radius(model: &CanonicalModel, mmax: usize) -> f64 {
    let nf = model.n as f64;
    let decay = nf * (1.0 - model.t);
    let mut r: f64 = libm::sqrt(75.0 / decay).max(1.0);
    for _ in 0..4 {
        let growth = (mmax as f64 + 1.0) * libm::log(nf.max(1.0)) + 2.0 * mmax as f64 * libm::log(r);
        r = libm::sqrt((75.0 + growth.max(0.0)) / decay).max(1.0);
    }
    r
}

/// `G_kl = ∫ conj(p_k) p_l e^{-n V} d^2 z` for `k, l <= mmax`.
pub fn gram_matrix(model: &CanonicalModel, mmax: usize, q: &Quadrature) -> Result<ComplexMatrix> {
    if mmax > 8 || model.n > 8 {
        return Err(Error::Domain("gram_matrix is limited to n <= 8 and mmax <= 8"));
    }
    let r = q.radius.unwrap_or_else(|| weight_radius(model, mmax));
    let dim = mmax + 1;
    let flat = quadrature::refine(q, r, |nodes| {
        let mut acc = alloc::vec![Complex64::new(0.0, 0.0); dim * dim];
        for &(x, y, w) in nodes {
            let z = Complex64::new(x, y);
            let weight = w * libm::exp(-(model.n as f64) * model.potential(z));
            if weight == 0.0 {
                continue;
            }
            let p: Vec<Complex64> = poly_sequence(model, z, mmax)
                .values
                .iter()
                .map(|v| v.to_complex())
                .collect();
            for k in 0..dim {
                let ck = p[k].conj() * weight;
                for l in 0..dim {
                    acc[k * dim + l] += ck * p[l];
                }
            }
        }
        acc.iter().flat_map(|c| [c.re, c.im]).collect()
    })?;
    let data = flat
        .chunks(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect();
    Ok(ComplexMatrix { dim, data })
}
