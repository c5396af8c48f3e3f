//! Small dense complex matrices.

use alloc::vec::Vec;

use num_complex::Complex64;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

/// Determinant as `sign · e^{log_abs}` with a complex unit `sign`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Determinant {
    pub sign: Complex64,
    pub log_abs: f64,
}

impl Determinant {
    pub fn value(&self) -> Complex64 {
        if self.log_abs == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        self.sign * libm::exp(self.log_abs)
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: alloc::vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(dim: usize, mut f: F) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// `max |A_ij - delta_ij|`.
    pub fn identity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.get(i, j) - d).norm());
            }
        }
        worst
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// LU factorization with partial pivoting.
    pub fn determinant(&self) -> Determinant {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut sign = Complex64::new(1.0, 0.0);
        let mut log_abs = 0.0;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for row in col + 1..n {
                let v = a[row * n + col].norm();
                if v > best {
                    best = v;
                    piv = row;
                }
            }
            if best == 0.0 {
                return Determinant {
                    sign: Complex64::new(0.0, 0.0),
                    log_abs: f64::NEG_INFINITY,
                };
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                }
                sign = -sign;
            }
            let d = a[col * n + col];
            sign *= d / best;
            log_abs += libm::log(best);
            for row in col + 1..n {
                let factor = a[row * n + col] / d;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for k in col + 1..n {
                    let sub = factor * a[col * n + k];
                    a[row * n + k] -= sub;
                }
            }
        }
        Determinant { sign, log_abs }
    }
}
