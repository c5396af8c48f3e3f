//! Polar product quadrature: trapezoid rule in the angle, Gauss-Legendre in
//! the radius.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on `P_k`).
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; k];
    let mut weights = alloc::vec![0.0; k];
    let kf = k as f64;
    for i in 0..(k + 1) / 2 {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (kf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let p = if k == 0 { 1.0 } else if k == 1 { x } else { p1 };
            let pm = if k == 1 { 1.0 } else { p0 };
            dp = kf * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if libm::fabs(dx) < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    (nodes, weights)
}

/// Settings for integrals over a disk `|z| <= radius` centred at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub angular: usize,
    pub radial: usize,
    /// Disk radius; `None` picks one from the weight's decay.
    pub radius: Option<f64>,
    /// Maximum allowed difference between successive refinements.
    pub tol: f64,
    pub max_refinements: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            angular: 64,
            radial: 48,
            radius: None,
            tol: 1e-10,
            max_refinements: 4,
        }
    }
}

/// Polar nodes `(x, y, weight)` for a disk of radius `r`, including the
/// Jacobian `r dr`.
pub fn polar_nodes(angular: usize, radial: usize, r: f64) -> Vec<(f64, f64, f64)> {
    let (gx, gw) = gauss_legendre(radial);
    let mut out = Vec::with_capacity(angular * radial);
    let dtheta = 2.0 * PI / angular as f64;
    for (x, w) in gx.iter().zip(gw.iter()) {
        let rho = 0.5 * r * (x + 1.0);
        let wr = 0.5 * r * w * rho * dtheta;
        for j in 0..angular {
            let (s, c) = libm::sincos(j as f64 * dtheta);
            out.push((rho * c, rho * s, wr));
        }
    }
    out
}

/// Runs `eval` on successively doubled grids until two consecutive results
/// agree (max-norm over the returned vector) to `q.tol`.
pub fn refine<F>(q: &Quadrature, r: f64, mut eval: F) -> Result<Vec<f64>>
where
    F: FnMut(&[(f64, f64, f64)]) -> Vec<f64>,
{
    let (mut na, mut nr) = (q.angular, q.radial);
    let mut prev = eval(&polar_nodes(na, nr, r));
    let mut diff = f64::INFINITY;
    for _ in 0..q.max_refinements {
        na *= 2;
        nr *= 2;
        let next = eval(&polar_nodes(na, nr, r));
        diff = prev
            .iter()
            .zip(next.iter())
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max);
        prev = next;
        if diff <= q.tol {
            return Ok(prev);
        }
    }
    Err(Error::Convergence { difference: diff })
}
