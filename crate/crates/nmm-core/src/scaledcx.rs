//! Complex numbers with a separated power-of-two exponent, plus the complex
//! complementary error function and `ln n!`.
//!
//! Orthonormal polynomials of degree `m` at weight parameter `n` grow like
//! `e^{Θ(n)}`, far past the range of `f64`. A [`ScaledComplex`] keeps the
//! mantissa in `[1, 2)` and carries the scale in an `i32`.

use core::cmp::Ordering;
use core::f64::consts::{LN_2, PI};
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gap (in binary orders of magnitude) beyond which the smaller addend is
/// absorbed without effect.
const ABSORB_GAP: i32 = 53;

// Cody-Waite split of ln 2 for exponent extraction in `from_exp`.
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// `mantissa · 2^exponent`, normalized so that `1 <= |mantissa| < 2`
/// (or `mantissa == 0` and `exponent == 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    mantissa: Complex64,
    exponent: i32,
}

impl Default for ScaledComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl ScaledComplex {
    pub const ZERO: Self = Self {
        mantissa: Complex64::new(0.0, 0.0),
        exponent: 0,
    };
    pub const ONE: Self = Self {
        mantissa: Complex64::new(1.0, 0.0),
        exponent: 0,
    };

    /// Builds `m · 2^e` and normalizes. Panics if `m` is not finite or the
    /// exponent leaves the `i32` range.
    pub fn new(m: Complex64, e: i32) -> Self {
        assert!(
            m.re.is_finite() && m.im.is_finite(),
            "non-finite mantissa in ScaledComplex"
        );
        if m.re == 0.0 && m.im == 0.0 {
            return Self::ZERO;
        }
        let r = libm::hypot(m.re, m.im);
        let (_, k) = libm::frexp(r);
        let shift = k - 1;
        let mut mant = Complex64::new(libm::ldexp(m.re, -shift), libm::ldexp(m.im, -shift));
        let mut exp = e.checked_add(shift).expect("ScaledComplex exponent overflow");
        let r = libm::hypot(mant.re, mant.im);
        if r >= 2.0 {
            mant = mant * 0.5;
            exp = exp.checked_add(1).expect("ScaledComplex exponent overflow");
        } else if r < 1.0 {
            mant = mant * 2.0;
            exp = exp.checked_sub(1).expect("ScaledComplex exponent overflow");
        }
        Self {
            mantissa: mant,
            exponent: exp,
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0)
    }

    /// `e^c` without ever forming the native exponential of `Re c`.
    pub fn from_exp(c: Complex64) -> Self {
        assert!(c.re.is_finite() && c.im.is_finite(), "non-finite exponent");
        let k = libm::floor(c.re / LN_2);
        assert!(k.abs() < i32::MAX as f64, "ScaledComplex exponent overflow");
        let frac = (c.re - k * LN2_HI) - k * LN2_LO;
        let (s, co) = libm::sincos(c.im);
        Self::new(Complex64::new(co, s) * libm::exp(frac), k as i32)
    }

    /// `e^x · u` for real `x`, a common pattern for weighted polynomials.
    pub fn from_exp_real(x: f64) -> Self {
        Self::from_exp(Complex64::new(x, 0.0))
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn conj(&self) -> Self {
        Self {
            mantissa: self.mantissa.conj(),
            exponent: self.exponent,
        }
    }

    /// Native value. Overflows to infinity / underflows to zero like `ldexp`.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            libm::ldexp(self.mantissa.re, self.exponent),
            libm::ldexp(self.mantissa.im, self.exponent),
        )
    }

    /// Native value, or an overflow error if it does not fit.
    pub fn to_complex_checked(&self) -> Result<Complex64> {
        let z = self.to_complex();
        if z.re.is_finite() && z.im.is_finite() {
            Ok(z)
        } else {
            Err(Error::Overflow)
        }
    }

    /// `ln |self|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        libm::log(libm::hypot(self.mantissa.re, self.mantissa.im)) + self.exponent as f64 * LN_2
    }

    pub fn arg(&self) -> f64 {
        libm::atan2(self.mantissa.im, self.mantissa.re)
    }

    /// `|self|` as a native float (may overflow to infinity).
    pub fn abs(&self) -> f64 {
        libm::ldexp(libm::hypot(self.mantissa.re, self.mantissa.im), self.exponent)
    }

    pub fn scale_real(&self, x: f64) -> Self {
        Self::new(self.mantissa * x, self.exponent)
    }

    pub fn scale_complex(&self, z: Complex64) -> Self {
        Self::new(self.mantissa * z, self.exponent)
    }

    /// Compares magnitudes.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => match self.exponent.cmp(&other.exponent) {
                Ordering::Equal => {
                    let a = self.mantissa.norm_sqr();
                    let b = other.mantissa.norm_sqr();
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
                o => o,
            },
        }
    }

    /// `|self / other|` as a native float; `other` must be nonzero.
    pub fn abs_ratio(&self, other: &Self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = libm::hypot(self.mantissa.re, self.mantissa.im)
            / libm::hypot(other.mantissa.re, other.mantissa.im);
        let d = self.exponent as i64 - other.exponent as i64;
        libm::ldexp(r, d.clamp(-4000, 4000) as i32)
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::new(self.mantissa.inv(), -self.exponent)
    }
}

/// Product with one rounding on the mantissas.
pub fn sc_mul(a: ScaledComplex, b: ScaledComplex) -> ScaledComplex {
    if a.is_zero() || b.is_zero() {
        return ScaledComplex::ZERO;
    }
    let e = a
        .exponent
        .checked_add(b.exponent)
        .expect("ScaledComplex exponent overflow");
    ScaledComplex::new(a.mantissa * b.mantissa, e)
}

/// Sum; the operand with the smaller exponent is shifted down, and dropped if
/// the gap exceeds the mantissa precision.
pub fn sc_add(a: ScaledComplex, b: ScaledComplex) -> ScaledComplex {
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    let (hi, lo) = if a.exponent >= b.exponent { (a, b) } else { (b, a) };
    let gap = hi.exponent - lo.exponent;
    if gap > ABSORB_GAP {
        return hi;
    }
    let shifted = Complex64::new(
        libm::ldexp(lo.mantissa.re, -gap),
        libm::ldexp(lo.mantissa.im, -gap),
    );
    ScaledComplex::new(hi.mantissa + shifted, hi.exponent)
}

impl Mul for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        sc_mul(self, rhs)
    }
}

impl MulAssign for ScaledComplex {
    fn mul_assign(&mut self, rhs: Self) {
        *self = sc_mul(*self, rhs);
    }
}

impl Mul<f64> for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale_real(rhs)
    }
}

impl Mul<Complex64> for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        self.scale_complex(rhs)
    }
}

impl Div for ScaledComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        sc_mul(self, rhs.recip())
    }
}

impl Add for ScaledComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        sc_add(self, rhs)
    }
}

impl AddAssign for ScaledComplex {
    fn add_assign(&mut self, rhs: Self) {
        *self = sc_add(*self, rhs);
    }
}

impl Neg for ScaledComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Sub for ScaledComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        sc_add(self, -rhs)
    }
}

impl SubAssign for ScaledComplex {
    fn sub_assign(&mut self, rhs: Self) {
        *self = sc_add(*self, -rhs);
    }
}

impl From<Complex64> for ScaledComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;

/// Beyond this real part the continued fraction is used instead of the
/// Maclaurin series (whose cancellation grows like `e^{2 (Re z)^2}`).
const CF_SWITCH_RE: f64 = 1.0;
const CF_LEVELS: usize = 300;
const SERIES_MAX_TERMS: usize = 2000;

/// Complementary error function `erfc(z) = 1 - erf(z)` on the complex plane.
///
/// Maclaurin series of `erf` for `0 <= Re z < 1`, Laplace continued fraction
/// (300 levels, evaluated backwards) for `Re z >= 1`, and
/// `erfc(z) = 2 - erfc(-z)` for `Re z < 0`.
pub fn complex_erfc(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument("erfc argument must be finite"));
    }
    if z.re < 0.0 {
        return Ok(Complex64::new(2.0, 0.0) - erfc_right(-z));
    }
    Ok(erfc_right(z))
}

fn erfc_right(z: Complex64) -> Complex64 {
    if z.re >= CF_SWITCH_RE {
        erfc_continued_fraction(z)
    } else {
        Complex64::new(1.0, 0.0) - erf_series(z)
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    // erf z = 2/sqrt(pi) * sum (-1)^k z^{2k+1} / (k! (2k+1))
    let z2 = z * z;
    let mut power = z;
    let mut sum = z;
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        power = -power * z2 / kf;
        let term = power / (2.0 * kf + 1.0);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && kf > z2.norm() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

fn erfc_continued_fraction(z: Complex64) -> Complex64 {
    // erfc z = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    let mut tail = z;
    for k in (1..=CF_LEVELS).rev() {
        tail = z + (k as f64 * 0.5) / tail;
    }
    (-z * z).exp() / (libm::sqrt(PI) * tail)
}

/// `ln(n!)`.
pub fn log_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 170 {
        let mut p = 1.0f64;
        for k in 2..=n {
            p *= k as f64;
        }
        return libm::log(p);
    }
    libm::lgamma(n as f64 + 1.0)
}

/// Stirling remainder `ln(n!) - ln(sqrt(2 pi n) n^n e^{-n})` for `n >= 1`.
pub fn stirling_correction(n: u64) -> f64 {
    assert!(n >= 1);
    let x = n as f64;
    if n > 170 {
        // Asymptotic series; ample at this size.
        let x2 = x * x;
        return 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2);
    }
    log_factorial(n) - (0.5 * libm::log(2.0 * PI * x) + x * libm::log(x) - x)
}
