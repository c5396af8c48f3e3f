//! Parsed job parameters: grids, ranges and the potential.

use std::fmt;
use std::str::FromStr;

use nmm_core::{CanonicalModel, Complex64, GeneralPotential};
use serde_json::{json, Value};

use crate::cli::ModelArgs;
use crate::Failure;

pub const MAX_GRID_POINTS: usize = 4_000_000;

/// `xmin:xmax:nx:ymin:ymax:ny`, or `min:max:count` for the same axis in both
/// directions. Points are cell-free samples including both end points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x: RangeSpec,
    pub y: RangeSpec,
}

/// `min:max:count`, `count` equally spaced samples including both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError(String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

fn parse_range(parts: &[&str]) -> Result<RangeSpec, SpecError> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| SpecError(format!("`{s}` is not a finite number")))
    };
    let min = num(parts[0])?;
    let max = num(parts[1])?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| SpecError(format!("`{}` is not a count", parts[2])))?;
    if count == 0 {
        return Err(SpecError("a range needs at least one point".into()));
    }
    if count > 1 && !(min < max) {
        return Err(SpecError("range bounds must be increasing".into()));
    }
    Ok(RangeSpec { min, max, count })
}

impl FromStr for RangeSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(SpecError(format!("expected min:max:count, got `{s}`")));
        }
        parse_range(&parts)
    }
}

impl FromStr for GridSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.len() {
            3 => {
                let r = parse_range(&parts)?;
                GridSpec { x: r, y: r }
            }
            6 => GridSpec {
                x: parse_range(&parts[..3])?,
                y: parse_range(&parts[3..])?,
            },
            _ => {
                return Err(SpecError(format!(
                    "expected xmin:xmax:nx:ymin:ymax:ny or min:max:count, got `{s}`"
                )))
            }
        };
        if grid.x.count.saturating_mul(grid.y.count) > MAX_GRID_POINTS {
            return Err(SpecError(format!("grid exceeds {MAX_GRID_POINTS} points")));
        }
        Ok(grid)
    }
}

impl RangeSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.max } else { self.min + h * k as f64 })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({ "min": self.min, "max": self.max, "count": self.count })
    }
}

impl GridSpec {
    /// Points in row-major order, `x` fastest.
    pub fn points(&self) -> Vec<Complex64> {
        let xs = self.x.values();
        let ys = self.y.values();
        ys.iter()
            .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({ "x": self.x.to_json(), "y": self.y.to_json() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Canonical(CanonicalModel),
    General { potential: GeneralPotential, n: usize },
}

impl Model {
    pub fn n(&self) -> usize {
        match self {
            Model::Canonical(m) => m.n,
            Model::General { n, .. } => *n,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Model::Canonical(m) => json!({ "potential": "canonical", "n": m.n, "t": m.t }),
            Model::General { potential: p, n } => json!({
                "potential": "general",
                "n": n,
                "t0": p.t0,
                "t1": { "re": p.t1.re, "im": p.t1.im },
                "t2": { "re": p.t2.re, "im": p.t2.im },
            }),
        }
    }

    pub fn canonical(&self) -> Result<CanonicalModel, Failure> {
        match self {
            Model::Canonical(m) => Ok(*m),
            Model::General { .. } => Err(Failure::usage(
                "this command supports only the canonical potential (--t)",
            )),
        }
    }
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<Model, Failure> {
        let n = self.n.ok_or_else(|| Failure::usage("--n is required"))?;
        let general = [self.t0, self.t1_re, self.t1_im, self.t2_re, self.t2_im]
            .iter()
            .any(Option::is_some);
        match (self.t, general) {
            (Some(_), true) => Err(Failure::usage(
                "give either --t or the general potential (--t0, --t1-*, --t2-*), not both",
            )),
            (None, false) => Err(Failure::usage(
                "a potential is required: --t or --t0/--t1-re/--t1-im/--t2-re/--t2-im",
            )),
            (Some(t), false) => Ok(Model::Canonical(CanonicalModel::new(n, t)?)),
            (None, true) => {
                let potential = GeneralPotential::new(
                    self.t0.unwrap_or(1.0),
                    Complex64::new(self.t1_re.unwrap_or(0.0), self.t1_im.unwrap_or(0.0)),
                    Complex64::new(self.t2_re.unwrap_or(0.0), self.t2_im.unwrap_or(0.0)),
                )?;
                if n == 0 {
                    return Err(Failure::usage("n must be at least 1"));
                }
                Ok(Model::General { potential, n })
            }
        }
    }
}

/// `re,im`.
pub fn parse_point(s: &str) -> Result<Complex64, Failure> {
    let mut it = s.split(',');
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(Failure::usage(format!("expected a point `re,im`, got `{s}`")));
    };
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Failure::usage(format!("`{v}` is not a finite number")))
    };
    Ok(Complex64::new(num(a)?, num(b)?))
}
