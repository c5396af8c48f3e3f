//! Reference computations written independently of the library paths they
//! check.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use nmm_core::{Complex64, ScaledComplex};
use statrs::function::factorial::ln_factorial;

/// A complex number as `value * e^{log_scale}`.
#[derive(Clone, Copy, Debug)]
pub struct LogScaled {
    pub value: Complex64,
    pub log_scale: f64,
}

impl LogScaled {
    pub fn ratio_to(&self, s: &ScaledComplex) -> Complex64 {
        let lib = s.mantissa();
        let shift = s.exponent() as f64 * std::f64::consts::LN_2 - self.log_scale;
        lib / self.value * shift.exp()
    }

    pub fn rel_err(&self, s: &ScaledComplex) -> f64 {
        (self.ratio_to(s) - 1.0).norm()
    }
}

/// Physicists' `H_m(x)`, renormalized on the fly.
pub fn hermite_h(x: Complex64, m: usize) -> LogScaled {
    let mut prev = Complex64::new(1.0, 0.0);
    if m == 0 {
        return LogScaled { value: prev, log_scale: 0.0 };
    }
    let mut cur = x * 2.0;
    let mut log_scale = 0.0;
    for k in 1..m {
        let next = x * 2.0 * cur - prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
        let s = cur.norm();
        if s > 1e100 || (s < 1e-100 && s > 0.0) {
            cur /= s;
            prev /= s;
            log_scale += s.ln();
        }
    }
    LogScaled { value: cur, log_scale }
}

/// `p_m(z) = H_m(s z) t^{m/2} p_0 / (2^{m/2} sqrt(m!))` for `t > 0`.
pub fn closed_form_poly(n: usize, t: f64, z: Complex64, m: usize) -> LogScaled {
    let nf = n as f64;
    let s = (nf * (1.0 - t * t) / (2.0 * t)).sqrt();
    let h = hermite_h(z * s, m);
    let p0 = (nf * (1.0 - t * t).sqrt() / std::f64::consts::PI).sqrt();
    let mf = m as f64;
    let ln_c = 0.5 * mf * t.ln() - 0.5 * mf * 2f64.ln() - 0.5 * ln_factorial(m as u64) + p0.ln();
    LogScaled {
        value: h.value,
        log_scale: h.log_scale + ln_c,
    }
}

/// `sqrt(n^{m+1}/(pi m!)) z^m`.
pub fn monomial_poly(n: usize, z: Complex64, m: usize) -> LogScaled {
    let nf = n as f64;
    let ln_c = 0.5 * ((m as f64 + 1.0) * nf.ln() - std::f64::consts::PI.ln() - ln_factorial(m as u64));
    let r = z.norm();
    let arg = z.arg() * m as f64;
    LogScaled {
        value: Complex64::from_polar(1.0, arg),
        log_scale: ln_c + m as f64 * r.ln(),
    }
}

/// `Q_m(x) = 2^{-m} m^{-m/2} H_m(sqrt(m) x)` as a log-scaled value.
pub fn rescaled_hermite(m: usize, z: Complex64) -> LogScaled {
    let mf = m as f64;
    let h = hermite_h(z * mf.sqrt(), m);
    LogScaled {
        value: h.value,
        log_scale: h.log_scale - mf * 2f64.ln() - 0.5 * mf * mf.ln(),
    }
}

/// Gauss-Legendre rule on `[-1, 1]` by Golub-Welsch.
pub fn golub_welsch(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(k, k);
    for i in 1..k {
        let b = i as f64 / ((4.0 * (i * i) as f64) - 1.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Eigenvalues of the Jacobi matrix of the physicists' Hermite recurrence,
/// i.e. the zeros of `H_m`.
pub fn hermite_zeros(m: usize) -> Vec<f64> {
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

/// Orthonormal polynomials for `e^{-n V}` built by Gram-Schmidt (Cholesky of
/// the monomial Gram matrix) on a tensor Gauss-Legendre grid over
/// `[cx - half, cx + half] x [cy - half, cy + half]`.
pub struct GramSchmidtBasis {
    /// Row `k` holds the monomial coefficients of `q_k`.
    pub coeffs: Vec<Vec<Complex64>>,
}

impl GramSchmidtBasis {
    pub fn build<V: Fn(Complex64) -> f64>(
        n: usize,
        degree_count: usize,
        potential: V,
        center: Complex64,
        half: f64,
        nodes: usize,
    ) -> Self {
        let (gx, gw) = golub_welsch(nodes);
        let d = degree_count;
        let mut gram = vec![Complex64::new(0.0, 0.0); d * d];
        let mut pow = vec![Complex64::new(0.0, 0.0); d];
        for (xi, wi) in gx.iter().zip(&gw) {
            for (yj, wj) in gx.iter().zip(&gw) {
                let z = center + Complex64::new(xi * half, yj * half);
                let w = wi * wj * half * half * (-(n as f64) * potential(z)).exp();
                if w == 0.0 {
                    continue;
                }
                pow[0] = Complex64::new(1.0, 0.0);
                for k in 1..d {
                    pow[k] = pow[k - 1] * z;
                }
                for a in 0..d {
                    let ca = pow[a].conj() * w;
                    for b in 0..d {
                        gram[a * d + b] += ca * pow[b];
                    }
                }
            }
        }
        // Classical Gram-Schmidt in coefficient space with the Gram matrix as
        // inner product, done twice for stability.
        let inner = |u: &[Complex64], v: &[Complex64]| {
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..d {
                for b in 0..d {
                    s += u[a].conj() * gram[a * d + b] * v[b];
                }
            }
            s
        };
        let mut coeffs: Vec<Vec<Complex64>> = Vec::new();
        for k in 0..d {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[k] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for q in &coeffs {
                    let c = inner(q, &v);
                    for a in 0..d {
                        v[a] -= q[a] * c;
                    }
                }
            }
            let norm = inner(&v, &v).re.sqrt();
            for a in v.iter_mut() {
                *a /= norm;
            }
            coeffs.push(v);
        }
        Self { coeffs }
    }

    pub fn eval(&self, k: usize, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs[k].iter().rev() {
            acc = acc * z + c;
        }
        acc
    }
}

/// Real `erfc` reference.
pub fn erfc_real(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}
