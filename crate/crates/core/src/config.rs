//! Experiment configuration: one JSON document, unknown keys rejected.
//! Command-line flags are applied on top of the file, which is applied on
//! top of the defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decay::VerdictPolicy;
use crate::error::{Error, Result};
use crate::extension::BulkOptions;
use crate::family::FieldFamily;
use crate::field::Grid;
use crate::fractional::OperatorBackend;
use crate::landis::{BlowupSpec, DEFAULT_MASK_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub half_extent: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.n, self.points, self.half_extent).map_err(|e| Error::Config(e.to_string()))
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: 1,
            points: 4096,
            half_extent: 40.0,
        }
    }
}

/// Heights for the `extend` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeightsSpec {
    /// First height; the boundary spacing when absent.
    pub first: Option<f64>,
    pub ratio: f64,
    /// Largest height; `L / 2` when absent.
    pub top: Option<f64>,
}

impl Default for HeightsSpec {
    fn default() -> Self {
        Self {
            first: None,
            ratio: 1.2,
            top: None,
        }
    }
}

impl HeightsSpec {
    pub fn build(&self, grid: &Grid) -> Result<Vec<f64>> {
        crate::extension::geometric_heights(
            self.first.unwrap_or(grid.spacing()),
            self.ratio,
            self.top.unwrap_or(0.5 * grid.half_extent()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SharpnessSpec {
    pub alpha: f64,
    pub r_min: f64,
    pub r_max_fraction: f64,
}

impl Default for SharpnessSpec {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            r_min: 5.0,
            r_max_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub field: FieldFamily,
    pub grid: GridSpec,
    pub heights: HeightsSpec,
    /// Decay rate tested by certificates and weighted norms.
    pub lambda: f64,
    pub p: u32,
    pub backend: OperatorBackend,
    pub mask_floor: f64,
    /// Drift applied along every axis; none means `b = 0`.
    pub drift: Option<FieldFamily>,
    pub lambda_budget: Option<f64>,
    pub epsilon: Option<f64>,
    pub verdict: VerdictPolicy,
    pub bulk: BulkOptions,
    pub blowup: BlowupSpec,
    pub sharpness: SharpnessSpec,
    /// Seed for randomized point sets.
    pub seed: u64,
    /// Output directory. Never serialized, so reports do not depend on where
    /// they are written.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            field: FieldFamily::ExpSmooth { lambda: 1.0 },
            grid: GridSpec::default(),
            heights: HeightsSpec::default(),
            lambda: 1.0,
            p: 3,
            backend: OperatorBackend::Spectral,
            mask_floor: DEFAULT_MASK_FLOOR,
            drift: None,
            lambda_budget: None,
            epsilon: None,
            verdict: VerdictPolicy::default(),
            bulk: BulkOptions::default(),
            blowup: BlowupSpec::default(),
            sharpness: SharpnessSpec::default(),
            seed: 0,
            out: None,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid.build()?;
        self.field.validate()?;
        if let Some(d) = &self.drift {
            d.validate()?;
        }
        if (self.p as usize) <= grid.dim() {
            return Err(Error::Config(format!(
                "p must be an integer > n = {}, got {}",
                grid.dim(),
                self.p
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Config(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if !(self.mask_floor > 0.0 && self.mask_floor < 1.0) {
            return Err(Error::Config(format!(
                "mask_floor must lie in (0, 1), got {}",
                self.mask_floor
            )));
        }
        if !(self.sharpness.alpha > 0.0 && self.sharpness.alpha < 1.0) {
            return Err(Error::Config(format!(
                "sharpness alpha must lie in (0, 1), got {}",
                self.sharpness.alpha
            )));
        }
        if self.bulk.pad_factor == 0 || !(self.bulk.height_ratio > 1.0) {
            return Err(Error::Config(
                "bulk options need pad_factor >= 1 and height_ratio > 1".into(),
            ));
        }
        self.heights
            .build(&grid)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}
