//! Metropolis sampling of the eigenvalue gas with joint density
//! `prod_{i<j} |z_i - z_j|^2 e^{-n sum V(z_i)}`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::orthopoly::CanonicalModel;

/// Name of the generator, recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha)";

pub const MAX_PARTICLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasConfig {
    pub n: usize,
    pub t: f64,
    /// Standard deviation of each coordinate of the Gaussian proposal.
    pub step: f64,
    pub sweeps: usize,
    pub burnin: usize,
    /// A snapshot is kept every `thin` sweeps after burn-in.
    pub thin: usize,
    pub seed: u64,
}

impl GasConfig {
    /// Step `1/sqrt(n)`, a tenth of the sweeps as burn-in, every sweep kept.
    pub fn new(n: usize, t: f64, sweeps: usize, seed: u64) -> Self {
        Self {
            n,
            t,
            step: 1.0 / libm::sqrt(n as f64),
            sweeps,
            burnin: sweeps / 10,
            thin: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<CanonicalModel> {
        if self.n == 0 || self.n > MAX_PARTICLES {
            return Err(Error::Domain("the gas needs 1 <= n <= 64 particles"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Domain("step must be positive"));
        }
        if self.sweeps <= self.burnin {
            return Err(Error::Domain("sweeps must exceed burnin"));
        }
        if self.thin == 0 {
            return Err(Error::Domain("thin must be at least 1"));
        }
        CanonicalModel::new(self.n, self.t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GasState {
    pub positions: Vec<Complex64>,
    pub log_weight: f64,
}

/// `sum_{i<j} 2 log|z_i - z_j| - n sum_i V(z_i)`; `-inf` for coincident points.
pub fn log_weight(positions: &[Complex64], model: &CanonicalModel) -> f64 {
    let nf = model.n as f64;
    let mut acc = 0.0;
    for (i, &zi) in positions.iter().enumerate() {
        acc -= nf * model.potential(zi);
        for &zj in &positions[i + 1..] {
            let d = (zi - zj).norm();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += 2.0 * libm::log(d);
        }
    }
    acc
}

/// Log-weight change from moving particle `i` to `z`.
fn delta_log_weight(positions: &[Complex64], i: usize, z: Complex64, model: &CanonicalModel) -> f64 {
    let old = positions[i];
    let mut acc = -(model.n as f64) * (model.potential(z) - model.potential(old));
    for (j, &zj) in positions.iter().enumerate() {
        if j == i {
            continue;
        }
        let dn = (z - zj).norm_sqr();
        if dn == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += libm::log(dn / (old - zj).norm_sqr());
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainOutput {
    pub snapshots: Vec<GasState>,
    pub proposals: u64,
    pub accepted: u64,
    /// Set when the post-burn-in acceptance rate is outside `[0.05, 0.95]`.
    pub tuning_warning: bool,
    /// Final state with its log-weight recomputed from scratch.
    pub final_state: GasState,
    /// Difference between the incrementally tracked and recomputed log-weight.
    pub drift: f64,
}

impl ChainOutput {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

/// Single-particle Metropolis; one sweep is `n` proposals.
pub fn run_chain(cfg: &GasConfig) -> Result<ChainOutput> {
    run_chain_with(cfg, |_, _, _| {})
}

/// As [`run_chain`], reporting every proposal as `(delta_log_weight, uniform, accepted)`.
pub fn run_chain_with<F>(cfg: &GasConfig, mut observe: F) -> Result<ChainOutput>
where
    F: FnMut(f64, f64, bool),
{
    let model = cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = model.geometry();
    // Start on a small lattice inside the droplet.
    let mut positions: Vec<Complex64> = (0..cfg.n)
        .map(|k| {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / cfg.n as f64;
            let r = 0.5 * libm::sqrt((k as f64 + 0.5) / cfg.n as f64);
            Complex64::new(g.a * r * libm::cos(theta), g.b * r * libm::sin(theta))
        })
        .collect();
    let mut lw = log_weight(&positions, &model);
    let mut snapshots = Vec::new();
    let (mut proposals, mut accepted) = (0u64, 0u64);
    for sweep in 0..cfg.sweeps {
        for i in 0..cfg.n {
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            let cand = positions[i] + Complex64::new(dx, dy) * cfg.step;
            let d = delta_log_weight(&positions, i, cand, &model);
            let u: f64 = rng.random();
            let accept = d >= 0.0 || u < libm::exp(d);
            if sweep >= cfg.burnin {
                proposals += 1;
                observe(d, u, accept);
            }
            if accept {
                positions[i] = cand;
                lw += d;
                if sweep >= cfg.burnin {
                    accepted += 1;
                }
            }
        }
        if sweep >= cfg.burnin && (sweep - cfg.burnin) % cfg.thin == 0 {
            snapshots.push(GasState {
                positions: positions.clone(),
                log_weight: lw,
            });
        }
    }
    let exact = log_weight(&positions, &model);
    let rate = if proposals == 0 {
        0.0
    } else {
        accepted as f64 / proposals as f64
    };
    Ok(ChainOutput {
        snapshots,
        proposals,
        accepted,
        tuning_warning: !(0.05..=0.95).contains(&rate),
        drift: libm::fabs(exact - lw),
        final_state: GasState {
            positions,
            log_weight: exact,
        },
    })
}

/// Rectangular grid of `nx * ny` cells, row-major with `x` fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2 {
    pub xmin: f64,
    pub xmax: f64,
    pub nx: usize,
    pub ymin: f64,
    pub ymax: f64,
    pub ny: usize,
}

impl Grid2 {
    pub fn new(xmin: f64, xmax: f64, nx: usize, ymin: f64, ymax: f64, ny: usize) -> Result<Self> {
        if !(xmin < xmax && ymin < ymax) || nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("grid bounds must be increasing with at least one cell"));
        }
        Ok(Self {
            xmin,
            xmax,
            nx,
            ymin,
            ymax,
            ny,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.ymax - self.ymin) / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Cell index of `z`, if inside the grid.
    pub fn locate(&self, z: Complex64) -> Option<usize> {
        let i = libm::floor((z.re - self.xmin) / self.dx());
        let j = libm::floor((z.im - self.ymin) / self.dy());
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            return None;
        }
        Some(j as usize * self.nx + i as usize)
    }

    pub fn cell_center(&self, idx: usize) -> Complex64 {
        let (i, j) = (idx % self.nx, idx / self.nx);
        Complex64::new(
            self.xmin + (i as f64 + 0.5) * self.dx(),
            self.ymin + (j as f64 + 0.5) * self.dy(),
        )
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Density estimate per cell: the fraction of all sampled particles landing in
/// the cell, divided by the cell area. Comparable to `rho_n`.
pub fn histogram_density(snapshots: &[GasState], grid: &Grid2) -> Result<Vec<f64>> {
    if snapshots.is_empty() {
        return Err(Error::InvalidArgument("no snapshots"));
    }
    let mut counts = alloc::vec![0u64; grid.len()];
    let mut total = 0u64;
    for s in snapshots {
        for &z in &s.positions {
            total += 1;
            if let Some(k) = grid.locate(z) {
                counts[k] += 1;
            }
        }
    }
    let norm = 1.0 / (total as f64 * grid.cell_area());
    Ok(counts.iter().map(|&c| c as f64 * norm).collect())
}
