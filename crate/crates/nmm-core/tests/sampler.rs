use std::f64::consts::PI;
use std::sync::OnceLock;

use nmm_core::geometry::{classify, RegionLabel};
use nmm_core::kernel::density;
use nmm_core::quadrature::gauss_legendre;
use nmm_core::sampler::{
    histogram_density, log_weight, run_chain, run_chain_with, GasConfig, Grid2, MAX_PARTICLES,
};
use nmm_core::{CanonicalModel, Complex64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn particles<'a>(out: &'a nmm_core::sampler::ChainOutput) -> impl Iterator<Item = Complex64> + 'a {
    out.snapshots.iter().flat_map(|s| s.positions.iter().copied())
}

/// `∫ rho_n` over the ellipse with semi-axes `(s a, s b)`, tensor Gauss-Legendre in
/// elliptic polar coordinates.
fn ellipse_mass(model: &CanonicalModel, s: f64) -> f64 {
    let g = model.geometry();
    let (x, w) = gauss_legendre(40);
    let (xt, wt) = gauss_legendre(80);
    let mut acc = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let r = 0.5 * s * (xi + 1.0);
        for (xj, wj) in xt.iter().zip(&wt) {
            let th = PI * (xj + 1.0);
            let z = c(g.a * r * th.cos(), g.b * r * th.sin());
            acc += wi * wj * 0.5 * s * PI * g.a * g.b * r * density(model, z).unwrap();
        }
    }
    acc
}

/// n = 16, t = 0.3, 2e5 sweeps, shared by the tests below.
fn reference_chain() -> &'static nmm_core::sampler::ChainOutput {
    static OUT: OnceLock<nmm_core::sampler::ChainOutput> = OnceLock::new();
    OUT.get_or_init(|| {
        let mut cfg = GasConfig::new(16, 0.3, 200_000, 2024);
        cfg.burnin = 10_000;
        cfg.thin = 5;
        run_chain(&cfg).unwrap()
    })
}

fn label_fraction(delta: f64, want: fn(&RegionLabel) -> bool) -> f64 {
    let out = reference_chain();
    let (mut hit, mut total) = (0usize, 0usize);
    for z in particles(out) {
        total += 1;
        hit += want(&classify(z, 0.3, delta).unwrap()) as usize;
    }
    hit as f64 / total as f64
}

#[test]
fn fraction_inside_shrunken_ellipse() {
    let g = CanonicalModel::new(16, 0.3).unwrap().geometry();
    let ratio = (g.a - 0.2) * (g.b - 0.2) / (g.a * g.b);
    let frac = label_fraction(0.2, |l| matches!(l, RegionLabel::InsideBulk(_)));
    assert!((frac - ratio).abs() <= 0.03, "{frac} vs {ratio}");
}

#[test]
fn mass_beyond_grown_ellipse() {
    let frac = label_fraction(0.3, |l| matches!(l, RegionLabel::OutsideBulk(_)));
    assert!(frac <= 0.02, "{frac}");
}

#[test]
fn disk_density_near_origin() {
    let out = reference_chain();
    let (mut hit, mut total) = (0usize, 0usize);
    for z in particles(out) {
        total += 1;
        hit += (z.norm() <= 0.3) as usize;
    }
    let rho = hit as f64 / total as f64 / (PI * 0.09);
    assert!((rho * PI - 1.0).abs() <= 0.1, "{rho}");
}

#[test]
fn log_weight_examples() {
    let m = CanonicalModel::new(1, 0.3).unwrap();
    let z = c(0.4, -0.7);
    assert!((log_weight(&[z], &m) + m.potential(z)).abs() < 1e-16);
    let m = CanonicalModel::new(2, 0.0).unwrap();
    let (a, b) = (c(1.0, 0.0), c(-1.0, 0.0));
    assert!((log_weight(&[a, b], &m) - (2.0 * 2f64.ln() - 4.0)).abs() < 1e-15);
    assert_eq!(log_weight(&[a, a], &m), f64::NEG_INFINITY);
}

#[test]
fn config_validation() {
    assert!(GasConfig::new(0, 0.3, 100, 1).validate().is_err());
    assert!(GasConfig::new(MAX_PARTICLES + 1, 0.3, 100, 1).validate().is_err());
    assert!(GasConfig::new(8, 1.0, 100, 1).validate().is_err());
    assert!(GasConfig::new(8, 0.3, 100, 1).validate().is_ok());
    let mut cfg = GasConfig::new(8, 0.3, 100, 1);
    cfg.burnin = 100;
    assert!(cfg.validate().is_err());
    let mut cfg = GasConfig::new(8, 0.3, 100, 1);
    cfg.thin = 0;
    assert!(run_chain(&cfg).is_err());
    let mut cfg = GasConfig::new(8, 0.3, 100, 1);
    cfg.step = 0.0;
    assert!(cfg.validate().is_err());
}

#[test]
fn chain_is_deterministic() {
    let cfg = GasConfig::new(10, 0.4, 300, 77);
    let a = run_chain(&cfg).unwrap();
    let b = run_chain(&cfg).unwrap();
    assert_eq!(a, b);
    let c2 = run_chain(&GasConfig { seed: 78, ..cfg }).unwrap();
    assert_ne!(a.final_state, c2.final_state);
    assert_eq!(a.snapshots.len(), 270);
    let thinned = run_chain(&GasConfig { thin: 7, ..cfg }).unwrap();
    assert_eq!(thinned.snapshots.len(), 39);
}

#[test]
fn tracked_weight_does_not_drift() {
    let out = run_chain(&GasConfig::new(20, 0.5, 2000, 5)).unwrap();
    assert!(out.drift <= 1e-8, "{}", out.drift);
    assert!(!out.tuning_warning);
    for s in out.snapshots.iter().step_by(97) {
        let m = CanonicalModel::new(20, 0.5).unwrap();
        assert!((s.log_weight - log_weight(&s.positions, &m)).abs() <= 1e-8);
    }
}

#[test]
fn metropolis_rule() {
    let cfg = GasConfig::new(6, 0.2, 4000, 11);
    // acceptance frequency per bin of the log-ratio against min(1, e^d)
    let mut bins = vec![(0u64, 0u64, 0.0f64); 8];
    let out = run_chain_with(&cfg, |d, u, acc| {
        assert_eq!(acc, d >= 0.0 || u < d.exp());
        if (-4.0..0.0).contains(&d) {
            let k = ((d + 4.0) * 2.0) as usize;
            bins[k].0 += 1;
            bins[k].1 += acc as u64;
            bins[k].2 += d.exp();
        }
    })
    .unwrap();
    assert_eq!(out.proposals, 6 * 3600);
    for (total, acc, sum) in bins {
        if total > 500 {
            let rate = acc as f64 / total as f64;
            let expected = sum / total as f64;
            let sd = (expected * (1.0 - expected) / total as f64).sqrt();
            assert!((rate - expected).abs() <= 5.0 * sd + 1e-3, "{rate} vs {expected}");
        }
    }
}

#[test]
fn circle_second_moment() {
    // t = 0: E|z|^2 = (1/n) sum_{m<n} (m+1)/n = (n+1)/(2n)
    let n = 6;
    let out = run_chain(&GasConfig::new(n, 0.0, 120_000, 2024)).unwrap();
    let (mut sum, mut count) = (0.0, 0usize);
    for z in particles(&out) {
        sum += z.norm_sqr();
        count += 1;
    }
    let expected = (n + 1) as f64 / (2 * n) as f64;
    assert!((sum / count as f64 - expected).abs() <= 0.01, "{}", sum / count as f64);
}

#[test]
fn mass_inside_scaled_ellipses() {
    let (n, t) = (8, 0.5);
    let model = CanonicalModel::new(n, t).unwrap();
    let out = run_chain(&GasConfig::new(n, t, 100_000, 9)).unwrap();
    let g = model.geometry();
    for &s in &[0.5, 0.9, 1.0, 1.2] {
        let inside = |z: Complex64| (z.re / (s * g.a)).powi(2) + (z.im / (s * g.b)).powi(2) <= 1.0;
        let (mut hit, mut total) = (0usize, 0usize);
        for z in particles(&out) {
            total += 1;
            hit += inside(z) as usize;
        }
        let frac = hit as f64 / total as f64;
        let exact = ellipse_mass(&model, s);
        assert!((frac - exact).abs() <= 0.02, "s={s}: {frac} vs {exact}");
    }
}

#[test]
fn histogram_follows_density() {
    let (n, t) = (5, 0.0);
    let model = CanonicalModel::new(n, t).unwrap();
    let out = run_chain(&GasConfig::new(n, t, 100_000, 3)).unwrap();
    let grid = Grid2::new(-0.6, 0.6, 3, -0.6, 0.6, 3).unwrap();
    let h = histogram_density(&out.snapshots, &grid).unwrap();
    for (k, &v) in h.iter().enumerate() {
        let r = density(&model, grid.cell_center(k)).unwrap();
        assert!((v - r).abs() <= 0.1 * r, "cell {k}: {v} vs {r}");
    }
    assert!((density(&model, c(0.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-15);
}

#[test]
fn histogram_mass_is_one() {
    let out = run_chain(&GasConfig::new(12, 0.3, 500, 1)).unwrap();
    let grid = Grid2::new(-10.0, 10.0, 40, -10.0, 10.0, 25).unwrap();
    let h = histogram_density(&out.snapshots, &grid).unwrap();
    let mass: f64 = h.iter().sum::<f64>() * grid.cell_area();
    assert!((mass - 1.0).abs() <= 1e-12);
    assert!(histogram_density(&[], &grid).is_err());
    assert!(Grid2::new(1.0, 0.0, 4, 0.0, 1.0, 4).is_err());
    assert!(Grid2::new(0.0, 1.0, 0, 0.0, 1.0, 4).is_err());
}

#[test]
fn grid_cells() {
    let g = Grid2::new(-1.0, 1.0, 4, 0.0, 1.0, 2).unwrap();
    assert_eq!(g.len(), 8);
    assert_eq!(g.locate(c(-0.9, 0.1)), Some(0));
    assert_eq!(g.locate(c(0.9, 0.9)), Some(7));
    assert_eq!(g.locate(c(1.0, 0.5)), None);
    assert_eq!(g.cell_center(5), c(-0.25, 0.75));
}

proptest! {
    #[test]
    fn log_weight_exchangeable(pts in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..10), t in 0.0f64..0.9, k in 0usize..100) {
        let pts: Vec<Complex64> = pts.into_iter().map(|(x, y)| c(x, y)).collect();
        let m = CanonicalModel::new(pts.len(), t).unwrap();
        let mut perm = pts.clone();
        perm.rotate_left(k % pts.len());
        perm.swap(0, pts.len() - 1);
        let (a, b) = (log_weight(&pts, &m), log_weight(&perm, &m));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn chain_stays_finite(seed in any::<u64>(), n in 1usize..12, t in 0.0f64..0.9) {
        let out = run_chain(&GasConfig::new(n, t, 60, seed)).unwrap();
        prop_assert!(out.drift <= 1e-8);
        prop_assert!(out.final_state.log_weight.is_finite());
        prop_assert_eq!(out.proposals, (n * 54) as u64);
    }
}
