//! The equation `(-Delta)^{1/2} u + b . grad u + q u = 0` on samples:
//! residuals, the potential forced by a given `u`, decay certificates, and
//! the blow-up of that potential for exponentially decaying `u`.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::decay::{liouville_verdict, Verdict, VerdictReport};
use crate::error::{Error, Result};
use crate::extension::{boundary_to_bulk, BulkDecay};
use crate::family::FieldFamily;
use crate::field::{weighted_integral, Grid, SampledField};
use crate::fractional::{
    gradient, spectral_half_laplacian, weighted_decay_report, WeightedDecayReport,
};

/// Relative mask floor for [`inverse_potential`].
pub const DEFAULT_MASK_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialNorms {
    pub q_sup: f64,
    pub grad_q_sup: f64,
    pub grad_b_sup: f64,
    pub b_sup: f64,
}

/// Drift `b`, potential `q`, and how they compare with the budgets
/// `||q|| + ||grad q|| + ||grad b|| <= Lambda` and `||b|| <= epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    pub drift: Vec<SampledField>,
    pub potential: SampledField,
    pub lambda_budget: Option<f64>,
    pub epsilon_budget: Option<f64>,
    pub norms: PotentialNorms,
}

fn sup_of_gradient(f: &SampledField) -> f64 {
    let g = gradient(f);
    (0..f.grid().len())
        .map(|i| g.iter().map(|c| c.values()[i].powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

impl PotentialProfile {
    pub fn new(
        drift: Vec<SampledField>,
        potential: SampledField,
        lambda_budget: Option<f64>,
        epsilon_budget: Option<f64>,
    ) -> Result<Self> {
        check_drift(&potential, &drift)?;
        let norms = PotentialNorms {
            q_sup: potential.max_abs(),
            grad_q_sup: sup_of_gradient(&potential),
            grad_b_sup: drift.iter().map(sup_of_gradient).fold(0.0, f64::max),
            b_sup: drift.iter().map(SampledField::max_abs).fold(0.0, f64::max),
        };
        Ok(Self {
            drift,
            potential,
            lambda_budget,
            epsilon_budget,
            norms,
        })
    }

    /// Potential only, no drift.
    pub fn scalar(potential: SampledField) -> Result<Self> {
        Self::new(Vec::new(), potential, None, None)
    }

    pub fn within_lambda(&self) -> Option<bool> {
        let n = &self.norms;
        self.lambda_budget
            .map(|l| n.q_sup + n.grad_q_sup + n.grad_b_sup <= l)
    }

    pub fn within_epsilon(&self) -> Option<bool> {
        self.epsilon_budget.map(|e| self.norms.b_sup <= e)
    }
}

/// An empty drift means `b = 0`; otherwise one component per axis.
fn check_drift(u: &SampledField, drift: &[SampledField]) -> Result<()> {
    if !drift.is_empty() && drift.len() != u.grid().dim() {
        return Err(Error::SizeMismatch {
            expected: u.grid().dim(),
            actual: drift.len(),
        });
    }
    drift.iter().try_for_each(|b| u.check_same_grid(b))
}

fn drift_term(u: &SampledField, drift: &[SampledField]) -> Vec<f64> {
    let mut out = vec![0.0; u.grid().len()];
    if drift.is_empty() {
        return out;
    }
    for (b, du) in drift.iter().zip(gradient(u)) {
        for ((o, bv), dv) in out.iter_mut().zip(b.values()).zip(du.values()) {
            *o += bv * dv;
        }
    }
    out
}

/// `(-Delta)^{1/2} u + b . grad u + q u` with the spectral operator.
pub fn residual_field(
    u: &SampledField,
    drift: &[SampledField],
    q: &SampledField,
) -> Result<SampledField> {
    u.check_same_grid(q)?;
    check_drift(u, drift)?;
    let hu = spectral_half_laplacian(u);
    let bd = drift_term(u, drift);
    let values = (0..u.grid().len())
        .map(|i| hu.values()[i] + bd[i] + q.values()[i] * u.values()[i])
        .collect();
    SampledField::new(*u.grid(), values)
}

/// Sup-norm of [`residual_field`].
pub fn residual(u: &SampledField, profile: &PotentialProfile) -> Result<f64> {
    Ok(residual_field(u, &profile.drift, &profile.potential)?.max_abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DominantTerm {
    HalfLaplacian,
    Drift,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InversePotential {
    /// `-((-Delta)^{1/2} u + b . grad u) / u` on unmasked nodes, 0 elsewhere.
    pub q: SampledField,
    /// `true` where `|u| >= floor * ||u||_inf`.
    pub mask: Vec<bool>,
    pub floor: f64,
    pub halflap_sup: f64,
    pub drift_sup: f64,
    pub dominant: DominantTerm,
}

impl InversePotential {
    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| !**m).count()
    }

    /// Largest `|q|` over unmasked nodes lying in `region`.
    pub fn sup_where(&self, region: impl Fn(usize) -> bool) -> f64 {
        self.q
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.mask[*i] && region(*i))
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }
}

/// Solve the equation for `q` given `u` and `b`.
pub fn inverse_potential(
    u: &SampledField,
    drift: &[SampledField],
    floor: f64,
) -> Result<InversePotential> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mask floor must lie in (0, 1), got {floor}"
        )));
    }
    check_drift(u, drift)?;
    if u.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    let hu = spectral_half_laplacian(u);
    let bd = drift_term(u, drift);
    let cut = floor * u.max_abs();
    let mask: Vec<bool> = u.values().iter().map(|v| v.abs() >= cut).collect();
    let q = (0..u.grid().len())
        .map(|i| {
            if mask[i] {
                -(hu.values()[i] + bd[i]) / u.values()[i]
            } else {
                0.0
            }
        })
        .collect();
    let halflap_sup = hu.max_abs();
    let drift_sup = bd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(InversePotential {
        q: SampledField::new(*u.grid(), q)?,
        mask,
        floor,
        halflap_sup,
        drift_sup,
        dominant: if drift_sup > halflap_sup {
            DominantTerm::Drift
        } else {
            DominantTerm::HalfLaplacian
        },
    })
}

fn log_certificate(u: &SampledField, lambda: f64) -> f64 {
    let g = u.grid();
    u.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| lambda * g.radius(i) + v.abs().ln())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `Lambda_min = max |u| e^(lambda |x|)` on the box and on the box of twice
/// the half-extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub lambda: f64,
    pub lambda_min: f64,
    pub lambda_min_doubled: f64,
    /// Changes by less than 5% when the box doubles.
    pub stable: bool,
    #[serde(rename = "L_used")]
    pub l_used: f64,
}

impl DecayCertificate {
    pub fn passes(&self) -> bool {
        self.stable
    }
}

pub fn decay_certificate(
    family: &FieldFamily,
    grid: &Grid,
    lambda: f64,
) -> Result<DecayCertificate> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be > 0, got {lambda}"
        )));
    }
    let here = log_certificate(&family.sample(grid)?, lambda).exp();
    let wide = log_certificate(&family.sample(&grid.padded(2)?)?, lambda).exp();
    let stable = if here == 0.0 && wide == 0.0 {
        true
    } else {
        here.is_finite() && wide.is_finite() && (wide - here).abs() < 0.05 * here.max(wide)
    };
    Ok(DecayCertificate {
        lambda,
        lambda_min: here,
        lambda_min_doubled: wide,
        stable,
        l_used: grid.half_extent(),
    })
}

/// `int e^{|x|} |u|^2` on the box, with stability under box doubling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNormCheck {
    pub value: f64,
    pub value_doubled: f64,
    pub converged: bool,
    pub overflow: bool,
    #[serde(rename = "L_used")]
    pub l_used: f64,
}

pub fn weighted_norm_condition(family: &FieldFamily, grid: &Grid) -> Result<WeightedNormCheck> {
    let here = weighted_integral(&family.sample(grid)?, 1.0, 2.0)?;
    let wide = weighted_integral(&family.sample(&grid.padded(2)?)?, 1.0, 2.0)?;
    let overflow = here.overflow || wide.overflow;
    let stable = here.value == wide.value
        || (wide.value - here.value).abs() < 0.05 * here.value.max(wide.value);
    Ok(WeightedNormCheck {
        value: here.value,
        value_doubled: wide.value,
        converged: !overflow && stable,
        overflow,
        l_used: grid.half_extent(),
    })
}

/// Parameters of [`landis_blowup_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlowupSpec {
    pub lambdas: Vec<f64>,
    pub lengths: Vec<f64>,
    /// Grid spacing, held fixed across box sizes.
    pub spacing: f64,
    /// The closed-form data are evaluated on a box this many times wider,
    /// so periodic images do not reach the measurement box.
    pub pad_factor: usize,
    pub mask_floor: f64,
}

impl Default for BlowupSpec {
    fn default() -> Self {
        Self {
            lambdas: vec![0.5, 1.0, 2.0],
            lengths: vec![10.0, 20.0, 40.0],
            spacing: 80.0 / 4096.0,
            pad_factor: 32,
            mask_floor: 1e-300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupRow {
    pub lambda: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub sup_q: f64,
    /// Least-squares slope of `log sup_q` against `L` for this `lambda`.
    pub growth_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlRow {
    #[serde(rename = "L")]
    pub l: f64,
    pub sup_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupTable {
    pub rows: Vec<BlowupRow>,
    /// Same measurement for the Lorentzian, whose potential stays bounded.
    pub control: Vec<ControlRow>,
}

impl BlowupTable {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lambda", "L", "sup_q", "growth_rate"])?;
        for r in &self.rows {
            w.write_record([
                r.lambda.to_string(),
                r.l.to_string(),
                r.sup_q.to_string(),
                r.growth_rate.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_control_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["L", "sup_q"])?;
        for r in &self.control {
            w.write_record([r.l.to_string(), r.sup_q.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn growth_rate(&self, lambda: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.lambda == lambda)
            .map(|r| r.growth_rate)
    }
}

/// `sup |q|` over the box `[-L, L)` for data evaluated on the padded box.
fn box_sup_q(family: &FieldFamily, l: f64, spec: &BlowupSpec) -> Result<f64> {
    let points = (2.0 * l / spec.spacing).round() as usize;
    let inner = Grid::new(1, points, l)?;
    let wide = inner.padded(spec.pad_factor)?;
    let u = family.sample(&wide)?;
    if u.is_zero() {
        return Ok(0.0);
    }
    let ip = inverse_potential(&u, &[], spec.mask_floor)?;
    let edge = l * (1.0 + 1e-12);
    Ok(ip.sup_where(|i| wide.coordinate(i).abs() < edge))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    sxy / sxx
}

/// `sup |q|` for `u = exp(-lambda <x>)`, `b = 0`, on growing boxes, with
/// the growth rate of `log sup |q|` in `L`.
pub fn landis_blowup_experiment(spec: &BlowupSpec) -> Result<BlowupTable> {
    if spec.lengths.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: spec.lengths.len(),
        });
    }
    if spec.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) || !(spec.spacing > 0.0) {
        return Err(Error::InvalidArgument(
            "box sizes and spacing must be positive".into(),
        ));
    }
    let mut rows = Vec::new();
    for &lambda in &spec.lambdas {
        // lambda = 0 is the constant function, whose potential vanishes
        let family = FieldFamily::ExpSmooth { lambda };
        family.validate()?;
        let sups = spec
            .lengths
            .par_iter()
            .map(|&l| {
                if lambda == 0.0 {
                    Ok(0.0)
                } else {
                    box_sup_q(&family, l, spec)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let g = if sups.iter().all(|s| *s > 0.0) {
            slope(
                &spec.lengths,
                &sups.iter().map(|s| s.ln()).collect::<Vec<_>>(),
            )
        } else {
            0.0
        };
        rows.extend(spec.lengths.iter().zip(&sups).map(|(&l, &s)| BlowupRow {
            lambda,
            l,
            sup_q: s,
            growth_rate: g,
        }));
    }
    let control = spec
        .lengths
        .par_iter()
        .map(|&l| box_sup_q(&FieldFamily::Lorentzian, l, spec).map(|s| ControlRow { l, sup_q: s }))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlowupTable { rows, control })
}

/// Outcome of one pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageStatus {
    pub stage: &'static str,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialSummary {
    pub norms: Option<PotentialNorms>,
    pub masked_nodes: usize,
    pub mask_floor: f64,
    pub halflap_sup: f64,
    pub drift_sup: f64,
    pub dominant: Option<DominantTerm>,
    /// Residual of the equation on unmasked nodes, relative to
    /// `||(-Delta)^{1/2} u||_inf`.
    pub consistency: f64,
    pub within_lambda: Option<bool>,
    pub within_epsilon: Option<bool>,
}

pub const REPORT_SCHEMA: &str = "halflap-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: &'static str,
    pub config: Config,
    pub stages: Vec<StageStatus>,
    pub certificate: Option<DecayCertificate>,
    pub weighted_norm: Option<WeightedNormCheck>,
    pub weighted_decay: Option<WeightedDecayReport>,
    pub bulk: Option<BulkDecay>,
    pub verdict: Option<VerdictReport>,
    pub potential: Option<PotentialSummary>,
    /// Wall-clock seconds per stage; only filled on request because it makes
    /// reports differ between runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtimes: Option<BTreeMap<&'static str, f64>>,
}

impl ExperimentReport {
    pub fn stage(&self, name: &str) -> Option<&str> {
        self.stages
            .iter()
            .find(|s| s.stage == name)
            .map(|s| s.status.as_str())
    }
}

fn potential_summary(
    u: &SampledField,
    drift: &[SampledField],
    cfg: &Config,
) -> Result<PotentialSummary> {
    if u.is_zero() {
        let zero = PotentialNorms {
            q_sup: 0.0,
            grad_q_sup: 0.0,
            grad_b_sup: 0.0,
            b_sup: 0.0,
        };
        return Ok(PotentialSummary {
            norms: Some(zero),
            masked_nodes: 0,
            mask_floor: cfg.mask_floor,
            halflap_sup: 0.0,
            drift_sup: 0.0,
            dominant: None,
            consistency: 0.0,
            within_lambda: cfg.lambda_budget.map(|_| true),
            within_epsilon: cfg.epsilon.map(|_| true),
        });
    }
    let ip = inverse_potential(u, drift, cfg.mask_floor)?;
    let res = residual_field(u, drift, &ip.q)?;
    let worst = res
        .values()
        .iter()
        .zip(&ip.mask)
        .filter(|(_, m)| **m)
        .fold(0.0f64, |a, (v, _)| a.max(v.abs()));
    let profile =
        PotentialProfile::new(drift.to_vec(), ip.q.clone(), cfg.lambda_budget, cfg.epsilon)?;
    Ok(PotentialSummary {
        norms: Some(profile.norms),
        masked_nodes: ip.masked_count(),
        mask_floor: ip.floor,
        halflap_sup: ip.halflap_sup,
        drift_sup: ip.drift_sup,
        dominant: Some(ip.dominant),
        consistency: if ip.halflap_sup > 0.0 {
            worst / ip.halflap_sup
        } else {
            worst
        },
        within_lambda: profile.within_lambda(),
        within_epsilon: profile.within_epsilon(),
    })
}

/// Certificate, weighted decay, bulk decay, verdict and potential for the
/// configured data. A failing stage is recorded and the stages that depend
/// on it are skipped.
pub fn run_pipeline(cfg: &Config, timings: bool) -> Result<ExperimentReport> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let mut report = ExperimentReport {
        schema: REPORT_SCHEMA,
        config: cfg.clone(),
        stages: Vec::new(),
        certificate: None,
        weighted_norm: None,
        weighted_decay: None,
        bulk: None,
        verdict: None,
        potential: None,
        runtimes: timings.then(BTreeMap::new),
    };
    let mut clock = Instant::now();
    let mut record = |report: &mut ExperimentReport,
                      stage: &'static str,
                      outcome: std::result::Result<(), String>| {
        let status = match outcome {
            Ok(()) => "ok".to_string(),
            Err(e) => format!("error: {e}"),
        };
        report.stages.push(StageStatus { stage, status });
        if let Some(rt) = report.runtimes.as_mut() {
            rt.insert(stage, clock.elapsed().as_secs_f64());
        }
        clock = Instant::now();
    };
    let skip = |report: &mut ExperimentReport, stage: &'static str| {
        report.stages.push(StageStatus {
            stage,
            status: "skipped".into(),
        });
    };

    let u = match cfg.field.sample(&grid) {
        Ok(u) => u,
        Err(e) => {
            record(&mut report, "sample", Err(e.to_string()));
            for s in [
                "certificate",
                "weighted_norm",
                "weighted_decay",
                "bulk",
                "verdict",
                "potential",
            ] {
                skip(&mut report, s);
            }
            return Ok(report);
        }
    };
    let drift = match &cfg.drift {
        Some(f) => {
            let b = f.sample(&grid)?;
            vec![b; grid.dim()]
        }
        None => Vec::new(),
    };
    record(&mut report, "sample", Ok(()));

    match decay_certificate(&cfg.field, &grid, cfg.lambda) {
        Ok(c) => {
            report.certificate = Some(c);
            record(&mut report, "certificate", Ok(()));
        }
        Err(e) => record(&mut report, "certificate", Err(e.to_string())),
    }
    match weighted_norm_condition(&cfg.field, &grid) {
        Ok(c) => {
            report.weighted_norm = Some(c);
            record(&mut report, "weighted_norm", Ok(()));
        }
        Err(e) => record(&mut report, "weighted_norm", Err(e.to_string())),
    }
    match weighted_decay_report(&u, &drift, cfg.lambda, cfg.p) {
        Ok(w) => {
            report.weighted_decay = Some(w);
            record(&mut report, "weighted_decay", Ok(()));
        }
        Err(e) => record(&mut report, "weighted_decay", Err(e.to_string())),
    }
    match boundary_to_bulk(&u, cfg.lambda, &cfg.bulk) {
        Ok((bulk, _)) => {
            let verdict = liouville_verdict(&bulk.shell, &cfg.verdict);
            report.bulk = Some(bulk);
            record(&mut report, "bulk", Ok(()));
            match verdict {
                Ok(v) => {
                    report.verdict = Some(v);
                    record(&mut report, "verdict", Ok(()));
                }
                Err(e) => record(&mut report, "verdict", Err(e.to_string())),
            }
        }
        Err(e) => {
            record(&mut report, "bulk", Err(e.to_string()));
            skip(&mut report, "verdict");
        }
    }
    match potential_summary(&u, &drift, cfg) {
        Ok(p) => {
            report.potential = Some(p);
            record(&mut report, "potential", Ok(()));
        }
        Err(e) => record(&mut report, "potential", Err(e.to_string())),
    }
    Ok(report)
}

impl ExperimentReport {
    pub fn verdict(&self) -> Option<Verdict> {
        self.verdict.map(|v| v.verdict)
    }
}
