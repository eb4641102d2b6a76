//! Named boundary data used by experiments and the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{sample, Grid, SampledField};
use crate::io::load_field;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldFamily {
    Zero,
    /// `1 / (1 + |x|^2)`
    Lorentzian,
    /// `exp(-lambda <x>)` with `<x> = sqrt(1 + |x|^2)`
    ExpSmooth {
        lambda: f64,
    },
    /// `cos(k x_1)`
    Cos {
        k: f64,
    },
    /// `exp(-|x|^2 / (2 sigma^2))`
    Gaussian {
        sigma: f64,
    },
    /// Boundary trace `Re exp(-(-i x_1)^alpha)` of the sharpness family.
    Sharpness {
        alpha: f64,
    },
    /// Samples stored on disk; zero outside the stored box.
    File {
        path: PathBuf,
    },
}

fn japanese(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

impl FieldFamily {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::Config(format!("{what} = {v} is out of range")));
        match *self {
            FieldFamily::ExpSmooth { lambda } if !(lambda.is_finite() && lambda >= 0.0) => {
                bad("lambda", lambda)
            }
            FieldFamily::Cos { k } if !k.is_finite() => bad("k", k),
            FieldFamily::Gaussian { sigma } if !(sigma.is_finite() && sigma > 0.0) => {
                bad("sigma", sigma)
            }
            FieldFamily::Sharpness { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                bad("alpha", alpha)
            }
            _ => Ok(()),
        }
    }

    /// Pointwise value, or `None` for data that only exists as samples.
    pub fn evaluate(&self, x: &[f64]) -> Option<f64> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Some(match *self {
            FieldFamily::Zero => 0.0,
            FieldFamily::Lorentzian => 1.0 / (1.0 + r2),
            FieldFamily::ExpSmooth { lambda } => (-lambda * japanese(x)).exp(),
            FieldFamily::Cos { k } => (k * x[0]).cos(),
            FieldFamily::Gaussian { sigma } => (-r2 / (2.0 * sigma * sigma)).exp(),
            FieldFamily::Sharpness { alpha } => (-Complex64::new(0.0, -x[0]).powf(alpha)).exp().re,
            FieldFamily::File { .. } => return None,
        })
    }

    /// Sample on `grid`. Stored data must live on `grid` or on a box it
    /// pads with the same spacing.
    pub fn sample(&self, grid: &Grid) -> Result<SampledField> {
        self.validate()?;
        match self {
            FieldFamily::File { path } => {
                let f = load_field(path)?;
                if f.grid() == grid {
                    return Ok(f);
                }
                let inner = *f.grid();
                let factor = grid.points() / inner.points();
                let same = factor >= 1
                    && grid.points() == factor * inner.points()
                    && inner.padded(factor).map(|p| p == *grid).unwrap_or(false);
                if !same {
                    return Err(Error::GridMismatch);
                }
                f.zero_padded(factor)
            }
            family => sample(|x| family.evaluate(x).unwrap_or(0.0), grid),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FieldFamily::Zero)
    }
}

impl fmt::Display for FieldFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldFamily::Zero => write!(f, "zero"),
            FieldFamily::Lorentzian => write!(f, "lorentzian"),
            FieldFamily::ExpSmooth { lambda } => write!(f, "exp_smooth:{lambda}"),
            FieldFamily::Cos { k } => write!(f, "cos:{k}"),
            FieldFamily::Gaussian { sigma } => write!(f, "gaussian:{sigma}"),
            FieldFamily::Sharpness { alpha } => write!(f, "sharpness:{alpha}"),
            FieldFamily::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

/// `name` or `name:parameter`, e.g. `exp_smooth:1.5` or `file:data.csv`.
impl FromStr for FieldFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |default: Option<f64>| -> Result<f64> {
            match arg {
                Some(a) => a
                    .parse()
                    .map_err(|_| Error::Config(format!("bad parameter {a:?} in field {s:?}"))),
                None => default
                    .ok_or_else(|| Error::Config(format!("field {name:?} needs a parameter"))),
            }
        };
        let family = match name {
            "zero" => FieldFamily::Zero,
            "lorentzian" => FieldFamily::Lorentzian,
            "exp_smooth" => FieldFamily::ExpSmooth {
                lambda: num(Some(1.0))?,
            },
            "cos" => FieldFamily::Cos { k: num(Some(1.0))? },
            "gaussian" => FieldFamily::Gaussian {
                sigma: num(Some(1.0))?,
            },
            "sharpness" => FieldFamily::Sharpness {
                alpha: num(Some(0.5))?,
            },
            "file" => FieldFamily::File {
                path: arg
                    .ok_or_else(|| Error::Config("file field needs a path".into()))?
                    .into(),
            },
            other => return Err(Error::Config(format!("unknown field family {other:?}"))),
        };
        family.validate()?;
        Ok(family)
    }
}
