//! Command implementations, each producing a [`Report`].

use std::f64::consts::{PI, SQRT_2};

use nmm_core::asymptotics::{
    f_real, g_pm, h_coeffs, limit_density, DensityRegime, EdgeFrame,
};
use nmm_core::geometry::EllipseGeometry;
use nmm_core::kernel::{correlation, density, general_normalized_kernel, normalized_kernel};
use nmm_core::linalg::ComplexMatrix;
use nmm_core::sampler::{histogram_density, run_chain, GasConfig, Grid2};
use nmm_core::scaledcx::complex_erfc;
use nmm_core::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cli::{RegimeArg, Tolerances};
use crate::output::{complex_json, Column, Report, ROW_MAJOR};
use crate::spec::{parse_point, GridSpec, Model, RangeSpec};
use crate::verify;
use crate::Failure;

fn grid_report(command: &str, model: &Model, grid: &GridSpec) -> Report {
    let mut r = Report::new(command);
    r.param("model", model.to_json()).param("grid", grid.to_json());
    r.axes = vec![("x".into(), grid.x.values()), ("y".into(), grid.y.values())];
    r.layout = Some(ROW_MAJOR.into());
    r
}

fn coords(points: &[Complex64]) -> [Column; 2] {
    [
        Column::real("x", "1", points.iter().map(|z| z.re).collect()),
        Column::real("y", "1", points.iter().map(|z| z.im).collect()),
    ]
}

fn kernel_value(model: &Model, w: Complex64, z: Complex64) -> Result<Complex64, Failure> {
    Ok(match model {
        Model::Canonical(m) => normalized_kernel(m, w, z)?.value,
        Model::General { potential, n } => general_normalized_kernel(potential, *n, w, z)?,
    })
}

pub fn density_grid(model: &Model, grid: &GridSpec) -> Result<Report, Failure> {
    let points = grid.points();
    let rho: Vec<f64> = points
        .par_iter()
        .map(|&z| kernel_value(model, z, z).map(|k| k.re))
        .collect::<Result<_, _>>()?;
    let mut r = grid_report("density", model, grid);
    r.columns.extend(coords(&points));
    r.columns.push(Column::real("rho", "1/area", rho));
    Ok(r)
}

pub fn kernel_grid(model: &Model, w: Complex64, grid: &GridSpec) -> Result<Report, Failure> {
    let points = grid.points();
    let k: Vec<Complex64> = points
        .par_iter()
        .map(|&z| kernel_value(model, w, z))
        .collect::<Result<_, _>>()?;
    let mut r = grid_report("kernel", model, grid);
    r.param("w", complex_json(w));
    r.columns.extend(coords(&points));
    r.columns.push(Column::complex("K", "1/area", k));
    Ok(r)
}

pub fn correlation_points(model: &Model, raw: &[String]) -> Result<Report, Failure> {
    let points: Vec<Complex64> = raw.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?;
    let entries = match model {
        Model::Canonical(m) => correlation(m, &points)?.entries,
        Model::General { .. } => {
            if points.len() > nmm_core::kernel::MAX_CORRELATION_POINTS {
                return Err(Failure::usage("at most 64 points are supported"));
            }
            let mut e = ComplexMatrix::zeros(points.len());
            for (k, &zk) in points.iter().enumerate() {
                for (l, &zl) in points.iter().enumerate().skip(k) {
                    let v = kernel_value(model, zk, zl)?;
                    if k == l {
                        e.set(k, k, Complex64::new(v.re, 0.0));
                    } else {
                        e.set(k, l, v);
                        e.set(l, k, v.conj());
                    }
                }
            }
            e
        }
    };
    let nf = model.n() as f64;
    let m = points.len();
    let (mut det, mut det_im, mut raw_log) = (Vec::new(), Vec::new(), Vec::new());
    for k in 1..=m {
        let d = ComplexMatrix::from_fn(k, |i, j| entries.get(i, j)).determinant();
        let v = d.value();
        det.push(v.re);
        det_im.push(v.im);
        raw_log.push(d.log_abs + k as f64 * nf.ln());
    }
    let mut r = Report::new("correlation");
    r.param("model", model.to_json())
        .param("points", Value::Array(points.iter().map(|&z| complex_json(z)).collect()));
    r.columns = vec![
        Column::int("k", (1..=m as u64).collect()),
        Column::real("x", "1", points.iter().map(|z| z.re).collect()),
        Column::real("y", "1", points.iter().map(|z| z.im).collect()),
        Column::real("det", "1/area^k", det.clone()),
        Column::real("det_imag", "1/area^k", det_im),
        Column::real("log_abs_correlation", "log(1/area^k)", raw_log.clone()),
    ];
    r.summarize("correlation_over_n_pow_m", json!(det[m - 1]))
        .summarize("log_abs_correlation", json!(raw_log[m - 1]))
        .summarize(
            "matrix",
            Value::Array(
                (0..m)
                    .map(|i| Value::Array((0..m).map(|j| complex_json(entries.get(i, j))).collect()))
                    .collect(),
            ),
        );
    Ok(r)
}

pub fn limits(
    model: &Model,
    regime: RegimeArg,
    phi: f64,
    z0: Complex64,
    grid: &GridSpec,
) -> Result<Report, Failure> {
    let m = model.canonical()?;
    let (dregime, base, rot) = match regime {
        RegimeArg::Inside => (DensityRegime::Inside, z0, Complex64::new(1.0, 0.0)),
        RegimeArg::Outside => (DensityRegime::Outside, z0, Complex64::new(1.0, 0.0)),
        RegimeArg::Edge => {
            let frame = EdgeFrame::new(m.t, phi)?;
            (DensityRegime::Edge(frame), frame.z0, Complex64::from_polar(1.0, frame.psi))
        }
    };
    let sn = (m.n as f64).sqrt();
    let offsets = grid.points();
    let zs: Vec<Complex64> = offsets.iter().map(|&a| base + a * rot / sn).collect();
    let rho: Vec<f64> = zs.par_iter().map(|&z| density(&m, z)).collect::<Result<_, _>>()?;
    let lim: Vec<f64> = offsets.iter().map(|&a| limit_density(dregime, a)).collect();
    let err = rho.iter().zip(&lim).fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
    let mut r = grid_report("limits", model, grid);
    r.axes = vec![("a_re".into(), grid.x.values()), ("a_im".into(), grid.y.values())];
    r.param("regime", json!(format!("{regime:?}").to_lowercase()))
        .param("base_point", complex_json(base))
        .param("normal_angle", json!(rot.arg()));
    if regime != RegimeArg::Edge {
        r.param("z0", complex_json(z0));
    } else {
        r.param("phi", json!(phi));
    }
    r.columns = vec![
        Column::real("a_re", "sqrt(n) length", offsets.iter().map(|a| a.re).collect()),
        Column::real("a_im", "sqrt(n) length", offsets.iter().map(|a| a.im).collect()),
        Column::real("x", "1", zs.iter().map(|z| z.re).collect()),
        Column::real("y", "1", zs.iter().map(|z| z.im).collect()),
        Column::real("rho_n", "1/area", rho),
        Column::real("rho_limit", "1/area", lim),
    ];
    r.summarize("max_abs_difference", json!(err));
    Ok(r)
}

/// The verify report and whether every suite passed.
pub fn verify(model: &Model, samples: usize, seed: u64, tol: &Tolerances) -> Result<(Report, bool), Failure> {
    let m = model.canonical()?;
    verify::check_tolerances(tol)?;
    if samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let suites = verify::run_suites(&m, samples, seed, tol);
    let pass = suites.iter().all(|s| s.pass());
    let mut r = Report::new("verify");
    r.rng_seed = Some(seed);
    r.param("model", model.to_json()).param("samples", json!(samples));
    r.columns = vec![
        Column::text("suite", suites.iter().map(|s| s.name.to_string()).collect()),
        Column::int("evaluations", suites.iter().map(|s| s.evaluations as u64).collect()),
        Column::real("worst", "relative", suites.iter().map(|s| s.worst).collect()),
        Column::real("tolerance", "relative", suites.iter().map(|s| s.tolerance).collect()),
        Column::text("pass", suites.iter().map(|s| s.pass().to_string()).collect()),
    ];
    r.summarize("pass", json!(pass)).summarize(
        "failures",
        Value::Array(suites.iter().filter(|s| !s.pass()).map(|s| s.to_json()).collect()),
    );
    r.summarize("suites", Value::Array(suites.iter().map(|s| s.to_json()).collect()));
    Ok((r, pass))
}

pub struct SampleJob {
    pub sweeps: usize,
    pub burnin: Option<usize>,
    pub thin: usize,
    pub step: Option<f64>,
    pub seed: u64,
}

/// The histogram report and the snapshot report.
pub fn sample(model: &Model, job: &SampleJob, grid: &GridSpec) -> Result<(Report, Report), Failure> {
    let m = model.canonical()?;
    let mut cfg = GasConfig::new(m.n, m.t, job.sweeps, job.seed);
    if let Some(b) = job.burnin {
        cfg.burnin = b;
    }
    if let Some(s) = job.step {
        cfg.step = s;
    }
    cfg.thin = job.thin;
    let out = run_chain(&cfg)?;
    if out.tuning_warning {
        eprintln!(
            "warning: acceptance rate {:.3} is outside [0.05, 0.95]; consider changing --step",
            out.acceptance_rate()
        );
    }
    // histogram cells are centred on the grid samples
    let hx = if grid.x.count > 1 { (grid.x.max - grid.x.min) / (grid.x.count - 1) as f64 } else { 1.0 };
    let hy = if grid.y.count > 1 { (grid.y.max - grid.y.min) / (grid.y.count - 1) as f64 } else { 1.0 };
    let cells = Grid2::new(
        grid.x.min - 0.5 * hx,
        grid.x.max + 0.5 * hx,
        grid.x.count,
        grid.y.min - 0.5 * hy,
        grid.y.max + 0.5 * hy,
        grid.y.count,
    )?;
    let hist = histogram_density(&out.snapshots, &cells)?;
    let points = grid.points();
    let rho: Vec<f64> = points.par_iter().map(|&z| density(&m, z)).collect::<Result<_, _>>()?;
    let l1: f64 = hist.iter().zip(&rho).map(|(a, b)| (a - b).abs()).sum::<f64>() * cells.cell_area();

    let params = |r: &mut Report| {
        r.rng_seed = Some(job.seed);
        r.param("model", model.to_json())
            .param("sweeps", json!(cfg.sweeps))
            .param("burnin", json!(cfg.burnin))
            .param("thin", json!(cfg.thin))
            .param("step", json!(cfg.step));
    };
    let mut r = grid_report("sample", model, grid);
    params(&mut r);
    r.columns.extend(coords(&points));
    r.columns.push(Column::real("histogram", "1/area", hist));
    r.columns.push(Column::real("rho_n", "1/area", rho));
    r.summarize("snapshots", json!(out.snapshots.len()))
        .summarize("acceptance_rate", json!(out.acceptance_rate()))
        .summarize("tuning_warning", json!(out.tuning_warning))
        .summarize("log_weight_drift", json!(out.drift))
        .summarize("l1_histogram_vs_rho_n", json!(l1));

    let mut s = Report::new("sample-snapshots");
    params(&mut s);
    let (mut snap, mut particle, mut pos, mut lw) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, st) in out.snapshots.iter().enumerate() {
        for (i, &z) in st.positions.iter().enumerate() {
            snap.push(k as u64);
            particle.push(i as u64);
            pos.push(z);
            lw.push(st.log_weight);
        }
    }
    s.columns = vec![
        Column::int("snapshot", snap),
        Column::int("particle", particle),
        Column::complex("z", "1", pos),
        Column::real("log_weight", "1", lw),
    ];
    Ok((r, s))
}

fn boundary_phis(count: usize) -> Result<Vec<f64>, Failure> {
    if count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    // phi in (-pi, pi]
    Ok((1..=count).map(|k| -PI + 2.0 * PI * k as f64 / count as f64).collect())
}

pub fn figure_f_real(t: f64, range: &RangeSpec) -> Result<Report, Failure> {
    let xs = range.values();
    let f: Vec<f64> = xs.iter().map(|&x| f_real(t, x)).collect::<Result<_, _>>()?;
    let g = EllipseGeometry::new(t)?;
    let mut r = Report::new("figure f-real");
    r.param("t", json!(t)).param("range", range.to_json());
    r.columns = vec![Column::real("x", "1", xs), Column::real("f", "1", f)];
    r.summarize("focus", json!(g.f)).summarize("semi_major", json!(g.a));
    Ok(r)
}

pub fn figure_gpm(t: f64, count: usize) -> Result<Report, Failure> {
    let g = EllipseGeometry::new(t)?;
    let phis = boundary_phis(count)?;
    let (mut gp, mut gm) = (Vec::new(), Vec::new());
    for &phi in &phis {
        let (a, b) = g_pm(t, g.boundary_point(phi))?;
        gp.push(a);
        gm.push(b);
    }
    let mut r = Report::new("figure gpm");
    r.param("t", json!(t)).param("count", json!(count));
    r.columns = vec![
        Column::real("phi", "rad", phis),
        Column::real("g_plus", "1", gp),
        Column::real("g_minus", "1", gm),
    ];
    Ok(r)
}

pub fn figure_erfc_profile(t: f64, n: usize, phi: f64, range: &RangeSpec) -> Result<Report, Failure> {
    let m = nmm_core::CanonicalModel::new(n, t)?;
    let frame = EdgeFrame::new(t, phi)?;
    let xs = range.values();
    let scaled: Vec<f64> = xs
        .par_iter()
        .map(|&a| density(&m, frame.point(Complex64::new(a, 0.0), n)).map(|rho| 2.0 * PI * rho))
        .collect::<Result<_, _>>()?;
    let limit: Vec<f64> = xs
        .iter()
        .map(|&a| complex_erfc(Complex64::new(SQRT_2 * a, 0.0)).map(|e| e.re))
        .collect::<Result<_, _>>()?;
    let err = scaled.iter().zip(&limit).fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
    let mut r = Report::new("figure erfc-profile");
    r.param("t", json!(t))
        .param("n", json!(n))
        .param("phi", json!(phi))
        .param("range", range.to_json())
        .param("edge_point", complex_json(frame.z0))
        .param("normal_angle", json!(frame.psi));
    r.columns = vec![
        Column::real("a", "sqrt(n) length", xs),
        Column::real("two_pi_rho_n", "1", scaled),
        Column::real("erfc_sqrt2_a", "1", limit),
    ];
    r.summarize("max_abs_difference", json!(err));
    Ok(r)
}

pub fn figure_gw_phase(t: f64, count: usize) -> Result<Report, Failure> {
    let g = EllipseGeometry::new(t)?;
    let phis = boundary_phis(count)?;
    let mut vals = Vec::new();
    for &phi in &phis {
        vals.push(-h_coeffs(t, g.boundary_point(phi))?.gw);
    }
    let mut r = Report::new("figure gw-phase");
    r.param("t", json!(t)).param("count", json!(count));
    r.columns = vec![
        Column::real("phi", "rad", phis),
        Column::real("phase", "rad", vals.iter().map(|z| z.arg()).collect()),
        Column::complex("minus_g_w", "1", vals),
    ];
    Ok(r)
}
