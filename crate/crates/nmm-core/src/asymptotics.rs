//! Large-n machinery: the exponent `f`, the prefactors `g±`, the kernel
//! coefficients `h1`, `h2`, `g_w`, `g_z`, Plancherel-Rotach approximants of
//! the rescaled Hermite polynomials, edge coordinates and the universal limits
//! of density, kernel and correlation functions.
//!
//! `t = 0` (the circle) uses its own closed forms rather than a `t -> 0+`
//! evaluation, since `log t` in `f` cancels only analytically.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{self, normal_angle, u_map, w_map, t_map, EllipseGeometry};
use crate::linalg::ComplexMatrix;
use crate::scaledcx::{complex_erfc, ScaledComplex};

fn nonzero(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        Err(Error::Cut)
    } else {
        Ok(())
    }
}

/// `f(z) = t Re(z^2) - |z|^2 + Re(U^2) - 2 log|U| + log t + 1`, `U = U_F(z)`;
/// `log|z|^2 - |z|^2 + 1` when `t = 0`.
pub fn f_value(t: f64, z: Complex64) -> Result<f64> {
    geometry::check_t(t)?;
    if t == 0.0 {
        nonzero(z)?;
        let r2 = z.norm_sqr();
        return Ok(libm::log(r2) - r2 + 1.0);
    }
    let f = geometry::focus_distance(t)?;
    let u = u_map(z, f)?;
    Ok(t * (z * z).re - z.norm_sqr() + (u * u).re - 2.0 * libm::log(u.norm()) + libm::log(t) + 1.0)
}

/// `f` on the real line. On the cut `|x| < F` the boundary values of `U`
/// have modulus one and `f = (t - 1) x^2 + 2 x^2/F^2 + log t`.
pub fn f_real(t: f64, x: f64) -> Result<f64> {
    geometry::check_t(t)?;
    if t > 0.0 {
        let f = geometry::focus_distance(t)?;
        if libm::fabs(x) <= f {
            return Ok((t - 1.0) * x * x + 2.0 * x * x / (f * f) + libm::log(t));
        }
    }
    f_value(t, Complex64::new(x, 0.0))
}

/// `(df/dx, df/dy)`.
pub fn f_gradient(t: f64, z: Complex64) -> Result<(f64, f64)> {
    geometry::check_t(t)?;
    let (x, y) = (z.re, z.im);
    if t == 0.0 {
        nonzero(z)?;
        let r2 = z.norm_sqr();
        return Ok((2.0 * x / r2 - 2.0 * x, 2.0 * y / r2 - 2.0 * y));
    }
    let f = geometry::focus_distance(t)?;
    let u = u_map(z, f)?;
    Ok((
        2.0 * x * (t - 1.0) + 4.0 / f * u.re,
        -2.0 * y * (t + 1.0) - 4.0 / f * u.im,
    ))
}

/// `(d^2f/dx^2, d^2f/dy^2)`.
pub fn f_hessian_diag(t: f64, z: Complex64) -> Result<(f64, f64)> {
    geometry::check_t(t)?;
    if t == 0.0 {
        nonzero(z)?;
        let q = (z * z).inv().re;
        return Ok((-2.0 - 2.0 * q, -2.0 + 2.0 * q));
    }
    let f = geometry::focus_distance(t)?;
    let u = u_map(z, f)?;
    let tt = t_map(z, f)?;
    let q = (u / tt).re;
    Ok((2.0 * (t - 1.0) - 4.0 / f * q, -2.0 * (t + 1.0) + 4.0 / f * q))
}

/// `(g+, g-)` with `g+ = -(1-t)/(2 sqrt t) Re U |W|^2` and
/// `g- = -(1+t)/(2 sqrt t) Im U |W|^2`; `(-2 Re(1/z), -2 Im(1/z))` at `t = 0`.
pub fn g_pm(t: f64, z: Complex64) -> Result<(f64, f64)> {
    geometry::check_t(t)?;
    if t == 0.0 {
        nonzero(z)?;
        let r = z.inv();
        return Ok((-2.0 * r.re, -2.0 * r.im));
    }
    let f = geometry::focus_distance(t)?;
    let u = u_map(z, f)?;
    let w2 = w_map(z, f)?.norm_sqr();
    let st = libm::sqrt(t);
    Ok((
        -(1.0 - t) / (2.0 * st) * u.re * w2,
        -(1.0 + t) / (2.0 * st) * u.im * w2,
    ))
}

/// `f` written in the variable `u = U_F(z)`.
pub fn f_u_value(t: f64, u: Complex64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain("f_U needs 0 < t < 1"));
    }
    let r = u.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain("|u| must lie in (0, 1)"));
    }
    let s = u + u.inv();
    let d = 1.0 - t * t;
    Ok(t * t / d * (s * s).re - t / d * s.norm_sqr() + (u * u).re - 2.0 * libm::log(r)
        + libm::log(t)
        + 1.0)
}

/// Coefficients of the kernel expansion around `(conj z0, z0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HCoeffs {
    pub h1: Complex64,
    pub h1bar: Complex64,
    pub h2: Complex64,
    pub h2bar: Complex64,
    pub gw: Complex64,
    pub gz: Complex64,
}

/// `h1(z) = 2U/F + t z - conj z`, `h2(z) = t/2 - U/(F T)`,
/// `g_w = |W|^2 (sqrt t U(z0) - U(conj z0)/sqrt t) / 4`, `g_z = conj g_w`.
pub fn h_coeffs(t: f64, z0: Complex64) -> Result<HCoeffs> {
    geometry::check_t(t)?;
    if t == 0.0 {
        nonzero(z0)?;
        let h1 = |z: Complex64| z.inv() - z.conj();
        let h2 = |z: Complex64| -(z * z * 2.0).inv();
        let gw = -z0.conj().inv();
        return Ok(HCoeffs {
            h1: h1(z0),
            h1bar: h1(z0.conj()),
            h2: h2(z0),
            h2bar: h2(z0.conj()),
            gw,
            gz: gw.conj(),
        });
    }
    let f = geometry::focus_distance(t)?;
    let h1 = |z: Complex64| -> Result<Complex64> { Ok(u_map(z, f)? * (2.0 / f) + z * t - z.conj()) };
    let h2 = |z: Complex64| -> Result<Complex64> {
        Ok(Complex64::new(0.5 * t, 0.0) - u_map(z, f)? / (t_map(z, f)? * f))
    };
    let st = libm::sqrt(t);
    let gw = (u_map(z0, f)? * st - u_map(z0.conj(), f)? / st) * (0.25 * w_map(z0, f)?.norm_sqr());
    Ok(HCoeffs {
        h1: h1(z0)?,
        h1bar: h1(z0.conj())?,
        h2: h2(z0)?,
        h2bar: h2(z0.conj())?,
        gw,
        gz: gw.conj(),
    })
}

/// `Q_m(z) = 2^{-m} m^{-m/2} H_m(sqrt(m) z)` via the monic recurrence
/// `h_{k+1} = x h_k - (k/2) h_{k-1}`, `x = sqrt(m) z`.
pub fn pr_q(m: usize, z: Complex64) -> ScaledComplex {
    if m == 0 {
        return ScaledComplex::ONE;
    }
    let x = z * libm::sqrt(m as f64);
    let mut prev = ScaledComplex::ONE;
    let mut cur = ScaledComplex::from_complex(x);
    for k in 1..m {
        let next = cur.scale_complex(x) - prev.scale_real(0.5 * k as f64);
        prev = cur;
        cur = next;
    }
    cur * ScaledComplex::from_exp_real(-0.5 * m as f64 * libm::log(m as f64))
}

/// `pi_m(z) = W(z)/2 e^{(m/2) U(z)^2} (sqrt2 U(z))^{-m}` with `F = sqrt 2`.
pub fn pr_outside(m: usize, z: Complex64) -> Result<ScaledComplex> {
    let u = u_map(z, SQRT_2)?;
    let w = w_map(z, SQRT_2)?;
    let mf = m as f64;
    let expo = u * u * (0.5 * mf) - (u * SQRT_2).ln() * mf;
    Ok(ScaledComplex::from_exp(expo).scale_complex(w * 0.5))
}

pub const DEFAULT_OSCILLATORY_MARGIN: f64 = 0.1;

/// The oscillatory approximant on `|x| <= sqrt2 - delta`.
pub fn pr_oscillatory(m: usize, x: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain("delta must be positive"));
    }
    if !(libm::fabs(x) <= SQRT_2 - delta) {
        return Err(Error::Validity("|x| must not exceed sqrt(2) - delta"));
    }
    Ok(pr_oscillatory_bracket(m, x) * libm::exp(pr_oscillatory_log_envelope(m, x)))
}

/// `(m/2)(x^2 - 1 - log 2)`, the exponent of the oscillatory envelope.
pub fn pr_oscillatory_log_envelope(m: usize, x: f64) -> f64 {
    0.5 * m as f64 * (x * x - 1.0 - core::f64::consts::LN_2)
}

fn pr_oscillatory_bracket(m: usize, x: f64) -> f64 {
    let ratio = libm::sqrt(libm::sqrt((SQRT_2 - x) / (SQRT_2 + x)));
    let arg = 0.5 * m as f64 * (x * libm::sqrt(2.0 - x * x) + 2.0 * libm::asin(x / SQRT_2) - PI);
    ratio * libm::cos(arg - PI / 4.0) + libm::cos(arg + PI / 4.0) / ratio
}

fn edge_norm(t: f64, phi: f64) -> f64 {
    let c = libm::cos(phi);
    libm::sqrt((1.0 + t) * (1.0 + t) - 4.0 * t * c * c)
}

/// Real edge coordinate
/// `sqrt2 ((1-t) cos phi Re a + (1+t) sin phi Im a) / sqrt((1+t)^2 - 4t cos^2 phi)`.
pub fn zeta(t: f64, a: Complex64, phi: f64) -> f64 {
    let (s, c) = libm::sincos(phi);
    SQRT_2 * ((1.0 - t) * c * a.re + (1.0 + t) * s * a.im) / edge_norm(t, phi)
}

/// Complex edge coordinate of the pre-kernel
/// `(abar/sqrt2) ((1-t) cos phi + i (1+t) sin phi) / sqrt(...)`.
pub fn zeta_edge(t: f64, abar: Complex64, phi: f64) -> Complex64 {
    let (s, c) = libm::sincos(phi);
    abar / SQRT_2 * Complex64::new((1.0 - t) * c, (1.0 + t) * s) / edge_norm(t, phi)
}

/// A boundary point `z0 = a cos phi + i b sin phi` with its normal angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeFrame {
    pub z0: Complex64,
    pub phi: f64,
    pub psi: f64,
}

impl EdgeFrame {
    pub fn new(t: f64, phi: f64) -> Result<Self> {
        let g = EllipseGeometry::new(t)?;
        Ok(Self {
            z0: g.boundary_point(phi),
            phi,
            psi: normal_angle(t, phi),
        })
    }

    /// `z0 + a e^{i psi} / sqrt n`.
    pub fn point(&self, a: Complex64, n: usize) -> Complex64 {
        self.z0 + a * Complex64::from_polar(1.0, self.psi) / libm::sqrt(n as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Inside,
    Outside,
    Edge,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityRegime {
    Inside,
    Outside,
    Edge(EdgeFrame),
}

/// `1/pi` inside, `0` outside, `erfc(sqrt2 Re a)/(2 pi)` in the rotated edge
/// frame.
pub fn limit_density(regime: DensityRegime, a: Complex64) -> f64 {
    match regime {
        DensityRegime::Inside => 1.0 / PI,
        DensityRegime::Outside => 0.0,
        DensityRegime::Edge(_) => {
            let e = complex_erfc(Complex64::new(SQRT_2 * a.re, 0.0)).expect("finite");
            e.re / (2.0 * PI)
        }
    }
}

/// Parameters of the limit kernel at `(z0 + a e^{i psi}/sqrt n, z0 + b e^{i psi}/sqrt n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitKernelParams {
    pub regime: Regime,
    pub t: f64,
    pub z0: Complex64,
    pub psi: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub n: usize,
}

impl LimitKernelParams {
    /// `sqrt n Im(e^{-i psi} (conj a - conj b)(z0 - t conj z0))`.
    pub fn oscillatory_phase(&self) -> f64 {
        let rot = Complex64::from_polar(1.0, -self.psi);
        libm::sqrt(self.n as f64)
            * (rot * (self.a.conj() - self.b.conj()) * (self.z0 - self.z0.conj() * self.t)).im
    }

    /// `Im(conj a b + (t/2) e^{2 i psi} (a^2 - b^2))`.
    pub fn local_phase(&self) -> f64 {
        let rot2 = Complex64::from_polar(1.0, 2.0 * self.psi);
        (self.a.conj() * self.b + rot2 * (self.a * self.a - self.b * self.b) * (0.5 * self.t)).im
    }

    pub fn phase(&self) -> f64 {
        self.oscillatory_phase() + self.local_phase()
    }
}

/// `e^{i theta} e^{-|a-b|^2/2} {1/pi | erfc((conj a + b)/sqrt2)/(2 pi) | 0}`.
pub fn limit_kernel(p: &LimitKernelParams) -> Complex64 {
    let envelope = libm::exp(-0.5 * (p.a - p.b).norm_sqr());
    let shape = match p.regime {
        Regime::Inside => Complex64::new(1.0 / PI, 0.0),
        Regime::Outside => return Complex64::new(0.0, 0.0),
        Regime::Edge => {
            complex_erfc((p.a.conj() + p.b) / SQRT_2).expect("finite") / (2.0 * PI)
        }
    };
    Complex64::from_polar(envelope, p.phase()) * shape
}

fn limit_matrix(regime: Regime, offsets: &[Complex64], renormalized: bool) -> ComplexMatrix {
    ComplexMatrix::from_fn(offsets.len(), |k, l| {
        let (ak, al) = (offsets[k], offsets[l]);
        let d2 = (ak - al).norm_sqr();
        let im = (ak.conj() * al).im;
        match (regime, renormalized) {
            (Regime::Outside, _) => Complex64::new(0.0, 0.0),
            (Regime::Inside, false) => Complex64::from_polar(libm::exp(-0.5 * d2) / PI, im),
            (Regime::Inside, true) => Complex64::from_polar(libm::exp(-0.5 * PI * d2), PI * im),
            (Regime::Edge, false) => {
                complex_erfc((ak.conj() + al) / SQRT_2).expect("finite")
                    * Complex64::from_polar(libm::exp(-0.5 * d2) / (2.0 * PI), im)
            }
            (Regime::Edge, true) => {
                complex_erfc((ak.conj() + al) * libm::sqrt(PI)).expect("finite")
                    * Complex64::from_polar(libm::exp(-PI * d2), 2.0 * PI * im)
            }
        }
    })
}

fn check_offsets(offsets: &[Complex64]) -> Result<()> {
    if offsets.is_empty() || offsets.len() > crate::kernel::MAX_CORRELATION_POINTS {
        return Err(Error::InvalidArgument("between 1 and 64 offsets are required"));
    }
    if offsets.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
        return Err(Error::InvalidArgument("non-finite offset"));
    }
    Ok(())
}

/// Limit of `R_n^m / n^m` at `z0 + a_k/sqrt n` (edge: `z0 + a_k e^{i psi}/sqrt n`).
pub fn limit_correlation(regime: Regime, offsets: &[Complex64]) -> Result<f64> {
    check_offsets(offsets)?;
    Ok(limit_matrix(regime, offsets, false).determinant().value().re)
}

/// Limit of `R_n^m / K~_n(z0,z0)^m` at offsets rescaled by `sqrt(K~_n(z0, z0))`.
pub fn limit_correlation_renormalized(regime: Regime, offsets: &[Complex64]) -> Result<f64> {
    check_offsets(offsets)?;
    Ok(limit_matrix(regime, offsets, true).determinant().value().re)
}

/// The limit matrix entries, for callers that need more than the determinant.
pub fn limit_correlation_matrix(regime: Regime, offsets: &[Complex64]) -> Result<Vec<Complex64>> {
    check_offsets(offsets)?;
    Ok(limit_matrix(regime, offsets, false).data)
}
