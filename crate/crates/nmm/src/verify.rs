//! Residual suites behind `nmm verify`.

use nmm_core::kernel::{
    cd_recursion_residual, identity_residual_sym, identity_residual_wz, km_identity_residual,
    normalization_integral,
};
use nmm_core::orthopoly::{derivative_relation_residual, hermite_closed_form, poly_sequence};
use nmm_core::quadrature::Quadrature;
use nmm_core::{CanonicalModel, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cli::Tolerances;
use crate::output::complex_json;
use crate::Failure;

/// Worst residual of a suite and where it occurred.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub evaluations: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub at: Value,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.worst <= self.tolerance
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "evaluations": self.evaluations,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "pass": self.pass(),
            "worst_at": self.at,
        })
    }
}

/// `count` points uniform in the disk `|z| <= radius`.
pub fn disk_points(seed: u64, count: usize, radius: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let th: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(radius * u.sqrt(), th)
        })
        .collect()
}

fn worst_of<I>(name: &'static str, tolerance: f64, items: I) -> SuiteResult
where
    I: IntoIterator<Item = (f64, Value)>,
{
    let mut res = SuiteResult { name, evaluations: 0, worst: 0.0, tolerance, at: Value::Null };
    for (r, at) in items {
        res.evaluations += 1;
        // NaN counts as a failure
        if !(r <= res.worst) {
            res.worst = if r.is_nan() { f64::INFINITY } else { r };
            res.at = at;
        }
    }
    res
}

fn pair_json(w: Complex64, z: Complex64) -> Value {
    json!({ "w": complex_json(w), "z": complex_json(z) })
}

/// Recurrence against the Hermite closed form, relative unless `|p_m(z)|` is
/// below `1e-6` of `|p_m(i|z|)|`, where it is measured against the latter.
pub fn closed_form_residual(model: &CanonicalModel, z: Complex64, m: usize) -> f64 {
    let rec = poly_sequence(model, z, m).get(m);
    let cf = hermite_closed_form(model, z, m);
    let envelope = poly_sequence(model, Complex64::new(0.0, z.norm()), m).get(m);
    let diff = rec - cf;
    if cf.is_zero() || cf.abs_ratio(&envelope) < 1e-6 {
        diff.abs_ratio(&envelope)
    } else {
        diff.abs_ratio(&cf)
    }
}

pub fn run_suites(model: &CanonicalModel, samples: usize, seed: u64, tol: &Tolerances) -> Vec<SuiteResult> {
    let ws = disk_points(seed, samples, 2.0);
    let zs = disk_points(seed.wrapping_add(1), samples, 2.0);
    let pairs: Vec<(Complex64, Complex64)> = ws.into_iter().zip(zs).collect();
    let n = model.n;

    let sym: Vec<_> = pairs.par_iter().map(|&(w, z)| identity_residual_sym(model, w, z)).collect();
    let wz: Vec<_> = pairs.par_iter().map(|&(w, z)| identity_residual_wz(model, w, z)).collect();
    let km: Vec<_> = pairs.par_iter().map(|&(w, z)| km_identity_residual(model, w, z)).collect();
    let cd: Vec<(f64, usize)> = pairs
        .par_iter()
        .map(|&(w, z)| {
            (1..=n)
                .map(|k| (cd_recursion_residual(model, w, z, k).unwrap_or(f64::INFINITY), k))
                .fold((0.0, 0), |a, b| if !(b.0 <= a.0) { b } else { a })
        })
        .collect();
    let cf: Vec<(f64, usize)> = pairs
        .par_iter()
        .map(|&(_, z)| {
            (0..=n)
                .map(|m| (closed_form_residual(model, z, m), m))
                .fold((0.0, 0), |a, b| if !(b.0 <= a.0) { b } else { a })
        })
        .collect();
    let der: Vec<(f64, usize)> = pairs
        .par_iter()
        .map(|&(w, _)| {
            (1..=n)
                .map(|m| {
                    let r = derivative_relation_residual(model, w, m).map_or(f64::INFINITY, |r| r.value);
                    (r, m)
                })
                .fold((0.0, 0), |a, b| if !(b.0 <= a.0) { b } else { a })
        })
        .collect();

    let at = |i: usize| pair_json(pairs[i].0, pairs[i].1);
    let mut out = vec![
        worst_of("identity_sum", tol.tol_identity, sym.iter().enumerate().map(|(i, r)| (r.0, at(i)))),
        worst_of("identity_difference", tol.tol_identity, sym.iter().enumerate().map(|(i, r)| (r.1, at(i)))),
        worst_of("identity_dw", tol.tol_identity, wz.iter().enumerate().map(|(i, r)| (r.0, at(i)))),
        worst_of("identity_dz", tol.tol_identity, wz.iter().enumerate().map(|(i, r)| (r.1, at(i)))),
        worst_of(
            "telescoped_sum",
            tol.tol_identity,
            km.iter().enumerate().map(|(i, r)| (r.0.max(r.1), at(i))),
        ),
        worst_of(
            "christoffel_darboux_step",
            tol.tol_recursion,
            cd.iter().enumerate().map(|(i, &(r, k))| {
                let mut v = at(i);
                v["k"] = json!(k);
                (r, v)
            }),
        ),
        worst_of(
            "closed_form",
            tol.tol_closed_form,
            cf.iter().enumerate().map(|(i, &(r, m))| (r, json!({ "z": complex_json(pairs[i].1), "m": m }))),
        ),
        worst_of(
            "derivative_relation",
            tol.tol_derivative,
            der.iter().enumerate().map(|(i, &(r, m))| (r, json!({ "z": complex_json(pairs[i].0), "m": m }))),
        ),
    ];
    if n <= 16 {
        let r = normalization_integral(model, &Quadrature::default())
            .map_or(f64::INFINITY, |v| (v / n as f64 - 1.0).abs());
        out.push(worst_of("normalization", tol.tol_normalization, [(r, Value::Null)]));
    }
    out
}

pub fn check_tolerances(tol: &Tolerances) -> Result<(), Failure> {
    for (name, v) in [
        ("--tol-identity", tol.tol_identity),
        ("--tol-recursion", tol.tol_recursion),
        ("--tol-closed-form", tol.tol_closed_form),
        ("--tol-derivative", tol.tol_derivative),
        ("--tol-normalization", tol.tol_normalization),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::usage(format!("{name} must be a positive number")));
        }
    }
    Ok(())
}
