//! Conformal and elliptic geometry of the droplet `E_t`.
//!
//! For `0 <= t < 1` the eigenvalues of the canonical model fill the ellipse
//! with semi-axes `a = sqrt((1+t)/(1-t))` and `b = sqrt((1-t)/(1+t))` and foci
//! `±F`, `F = 2 sqrt(t/(1-t^2))`. The maps `U_F`, `T_F`, `W_F` are defined on
//! `C \ [-F, F]`.
//!
//! `C+` is `{Re z > 0} ∪ {Re z = 0, Im z >= 0}`, so the negative imaginary
//! axis is *not* in `C+`. `T_F` is evaluated as `sqrt(z - F) sqrt(z + F)`,
//! which agrees with the case split of the definition on the whole domain
//! (including the negative imaginary axis) and is insensitive to the sign of
//! a zero imaginary part.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points closer than this to `[-F, F]` are rejected.
pub const CUT_TOLERANCE: f64 = 1e-14;

pub fn check_t(t: f64) -> Result<()> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain("t must lie in [0, 1)"))
    }
}

/// `F = 2 sqrt(t / (1 - t^2))`.
pub fn focus_distance(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(2.0 * libm::sqrt(t / (1.0 - t * t)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseGeometry {
    pub t: f64,
    pub f: f64,
    /// Major semi-axis.
    pub a: f64,
    /// Minor semi-axis.
    pub b: f64,
}

impl EllipseGeometry {
    pub fn new(t: f64) -> Result<Self> {
        let f = focus_distance(t)?;
        Ok(Self {
            t,
            f,
            a: libm::sqrt((1.0 + t) / (1.0 - t)),
            b: libm::sqrt((1.0 - t) / (1.0 + t)),
        })
    }

    /// Boundary point at ellipse parameter `phi`.
    pub fn boundary_point(&self, phi: f64) -> Complex64 {
        Complex64::new(self.a * libm::cos(phi), self.b * libm::sin(phi))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let u = z.re / self.a;
        let v = z.im / self.b;
        u * u + v * v < 1.0
    }
}

/// Distance from `z` to the segment `[-F, F]`.
pub fn cut_distance(z: Complex64, f: f64) -> f64 {
    let x = libm::fabs(z.re);
    if x <= f {
        libm::fabs(z.im)
    } else {
        libm::hypot(x - f, z.im)
    }
}

pub fn in_c_plus(z: Complex64) -> bool {
    z.re > 0.0 || (z.re == 0.0 && z.im >= 0.0)
}

fn check_cut(z: Complex64, f: f64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite point"));
    }
    if cut_distance(z, f) < CUT_TOLERANCE {
        Err(Error::Cut)
    } else {
        Ok(())
    }
}

/// `T_F(z)`, the branch of `sqrt(z^2 - F^2)` that behaves like `z` at infinity.
pub fn t_map(z: Complex64, f: f64) -> Result<Complex64> {
    if f < 0.0 {
        return Err(Error::Domain("F must be nonnegative"));
    }
    check_cut(z, f)?;
    Ok((z - f).sqrt() * (z + f).sqrt())
}

/// `U_F(z) = (z - T_F(z)) / F`, evaluated as `F / (z + T_F(z))`.
pub fn u_map(z: Complex64, f: f64) -> Result<Complex64> {
    if f <= 0.0 {
        return Err(Error::Domain("U_F needs F > 0"));
    }
    let t = t_map(z, f)?;
    Ok(f / (z + t))
}

/// Inverse of `U_F`: `(F/2)(u + 1/u)` for `0 < |u| < 1`.
pub fn u_inverse(u: Complex64, f: f64) -> Result<Complex64> {
    let r = u.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain("|u| must lie in (0, 1)"));
    }
    if f <= 0.0 {
        return Err(Error::Domain("U_F needs F > 0"));
    }
    Ok((u + u.inv()) * (0.5 * f))
}

/// `W_F(z) = q + 1/q` with `q = ((z+F)/(z-F))^{1/4}` (principal quarter power).
pub fn w_map(z: Complex64, f: f64) -> Result<Complex64> {
    if f < 0.0 {
        return Err(Error::Domain("F must be nonnegative"));
    }
    if f == 0.0 {
        if z.re == 0.0 && z.im == 0.0 {
            return Err(Error::Cut);
        }
        return Ok(Complex64::new(2.0, 0.0));
    }
    check_cut(z, f)?;
    let q = ((z + f) / (z - f)).sqrt().sqrt();
    Ok(q + q.inv())
}

/// Confocal elliptic coordinates: `z = sqrt(b^2 + F^2) cos(phi) + i b sin(phi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticCoords {
    pub bcoord: f64,
    pub phi: f64,
}

impl EllipticCoords {
    pub fn major(&self, f: f64) -> f64 {
        libm::sqrt(self.bcoord * self.bcoord + f * f)
    }

    pub fn point(&self, f: f64) -> Complex64 {
        Complex64::new(
            self.major(f) * libm::cos(self.phi),
            self.bcoord * libm::sin(self.phi),
        )
    }
}

pub fn elliptic_coords(z: Complex64, f: f64) -> Result<EllipticCoords> {
    if f < 0.0 {
        return Err(Error::Domain("F must be nonnegative"));
    }
    check_cut(z, f)?;
    let (x, y) = (z.re, z.im);
    let r2 = x * x + y * y;
    let f2 = f * f;
    let disc = libm::sqrt(4.0 * y * y * f2 + (f2 - r2) * (f2 - r2));
    let b2 = if r2 - f2 >= 0.0 {
        0.5 * (r2 - f2 + disc)
    } else {
        // r2 - f2 + disc suffers cancellation here; use the product form.
        2.0 * y * y * f2 / (disc - (r2 - f2))
    };
    let b = libm::sqrt(b2);
    let a = libm::sqrt(b2 + f2);
    let mut phi = libm::atan2(y / b, x / a);
    if phi == -PI {
        phi = PI;
    }
    Ok(EllipticCoords { bcoord: b, phi })
}

/// Angle `psi` of the outward normal of the ellipse `∂E_t` at parameter `phi`.
pub fn normal_angle(t: f64, phi: f64) -> f64 {
    // atan2 reproduces arctan(((1+t)/(1-t)) tan phi) with the ±pi correction
    // for |phi| > pi/2 and psi = phi at ±pi/2.
    let (s, c) = libm::sincos(phi);
    if c == 0.0 || libm::fabs(libm::fabs(phi) - PI / 2.0) == 0.0 {
        return phi;
    }
    libm::atan2((1.0 + t) * s, (1.0 - t) * c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionLabel {
    InsideBulk(f64),
    OutsideBulk(f64),
    BoundaryBand(f64),
    OnCut,
}

/// Region of `z` relative to the offset ellipses `E_{t,±delta}` (semi-axes
/// `a ± delta`, `b ± delta`).
pub fn classify(z: Complex64, t: f64, delta: f64) -> Result<RegionLabel> {
    if !(delta > 0.0) {
        return Err(Error::Domain("delta must be positive"));
    }
    let g = EllipseGeometry::new(t)?;
    if g.f > 0.0 && cut_distance(z, g.f) < CUT_TOLERANCE {
        return Ok(RegionLabel::OnCut);
    }
    let level = |da: f64, db: f64| {
        let u = z.re / da;
        let v = z.im / db;
        u * u + v * v
    };
    let (ai, bi) = (g.a - delta, g.b - delta);
    if ai > 0.0 && bi > 0.0 && level(ai, bi) < 1.0 {
        return Ok(RegionLabel::InsideBulk(delta));
    }
    if level(g.a + delta, g.b + delta) > 1.0 {
        return Ok(RegionLabel::OutsideBulk(delta));
    }
    Ok(RegionLabel::BoundaryBand(delta))
}
