//! Shell decay profiles, the stretched-exponential fit
//! `log S = log C - c R^alpha`, and the Liouville verdict drawn from it.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnosed, Warning};
use crate::error::{Error, Result};

pub const MIN_SHELLS: usize = 6;
pub const ALPHA_RANGE: (f64, f64) = (0.05, 2.0);
const COARSE_STEPS: usize = 400;
const LOW_R_SQUARED: f64 = 0.9;

/// Fitted model `S(R) ~ C exp(-c R^alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(rename = "C")]
    pub prefactor: f64,
    #[serde(rename = "c")]
    pub rate: f64,
    pub alpha: f64,
    pub r_squared: f64,
    pub shells_used: usize,
}

/// Fallback model `S(R) ~ A R^-power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    #[serde(rename = "A")]
    pub prefactor: f64,
    pub power: f64,
    pub r_squared: f64,
}

/// Least-squares line `y = a + b t`; returns `(a, b, sse, sst)`.
fn line_fit(t: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|v| (v - tm).powi(2)).sum();
    let sty: f64 = t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let b = if stt > 0.0 { sty / stt } else { 0.0 };
    let a = ym - b * tm;
    let sse = t
        .iter()
        .zip(y)
        .map(|(ti, yi)| (yi - a - b * ti).powi(2))
        .sum();
    let sst = y.iter().map(|v| (v - ym).powi(2)).sum();
    (a, b, sse, sst)
}

fn r_squared(sse: f64, sst: f64) -> f64 {
    if sst > 0.0 {
        1.0 - sse / sst
    } else if sse <= f64::EPSILON {
        1.0
    } else {
        0.0
    }
}

fn positive_samples(radii: &[f64], sups: &[f64]) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    if radii.len() != sups.len() {
        return Err(Error::SizeMismatch {
            expected: radii.len(),
            actual: sups.len(),
        });
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|r| !(r.is_finite() && *r > 0.0))
    {
        return Err(Error::InvalidArgument(
            "shell radii must be positive and increasing".into(),
        ));
    }
    if sups.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidArgument(
            "shell sups must be finite and non-negative".into(),
        ));
    }
    if sups.iter().all(|&s| s == 0.0) {
        return Err(Error::IdenticallyZero);
    }
    let (r, s): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(sups)
        .filter(|(_, &s)| s > 0.0)
        .map(|(r, s)| (*r, *s))
        .unzip();
    let dropped = radii.len() - r.len();
    if r.len() < MIN_SHELLS {
        return Err(Error::TooFewSamples {
            needed: MIN_SHELLS,
            got: r.len(),
        });
    }
    Ok((r, s, dropped))
}

/// Fit `log S = log C - c R^alpha` by a search over `alpha` in
/// [`ALPHA_RANGE`], solving for `(log C, c)` in closed form at each trial.
pub fn fit_decay_exponent(radii: &[f64], sups: &[f64]) -> Result<Diagnosed<DecayFit>> {
    let (r, s, dropped) = positive_samples(radii, sups)?;
    let logs: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let solve = |alpha: f64| {
        let t: Vec<f64> = r.iter().map(|v| v.powf(alpha)).collect();
        line_fit(&t, &logs)
    };
    let sse = |alpha: f64| solve(alpha).2;

    let (lo, hi) = ALPHA_RANGE;
    let step = (hi - lo) / COARSE_STEPS as f64;
    let best = (0..=COARSE_STEPS)
        .map(|i| (i, sse(lo + step * i as f64)))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b })
        .0;
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = (lo + step * (best + 1) as f64).min(hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    while b - a > 1e-12 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sse(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sse(x2);
        }
    }
    let alpha = 0.5 * (a + b);
    let (log_c, slope, err, tot) = solve(alpha);
    let fit = DecayFit {
        prefactor: log_c.exp(),
        rate: -slope,
        alpha,
        r_squared: r_squared(err, tot),
        shells_used: r.len(),
    };
    let mut warnings = Vec::new();
    if dropped > 0 {
        warnings.push(Warning::DroppedShells { count: dropped });
    }
    if fit.r_squared < LOW_R_SQUARED {
        warnings.push(Warning::LowFitQuality {
            r_squared: fit.r_squared,
        });
    }
    Ok(Diagnosed {
        value: fit,
        warnings,
    })
}

/// Fit `log S = log A - power * log R`.
pub fn fit_power_law(radii: &[f64], sups: &[f64]) -> Result<PowerLawFit> {
    let (r, s, _) = positive_samples(radii, sups)?;
    let t: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let (a, b, sse, sst) = line_fit(&t, &y);
    Ok(PowerLawFit {
        prefactor: a.exp(),
        power: -b,
        r_squared: r_squared(sse, sst),
    })
}

/// Measured sup-norms on shells of increasing radius, with both fits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayProfile {
    pub radii: Vec<f64>,
    pub sups: Vec<f64>,
    pub identically_zero: bool,
    pub fit: Option<DecayFit>,
    pub power_law: Option<PowerLawFit>,
    pub warnings: Vec<Warning>,
}

impl DecayProfile {
    /// Fit both models. A profile of zeros is flagged rather than fitted.
    pub fn from_shells(radii: Vec<f64>, sups: Vec<f64>) -> Result<Self> {
        match fit_decay_exponent(&radii, &sups) {
            Err(Error::IdenticallyZero) => Ok(Self {
                radii,
                sups,
                identically_zero: true,
                fit: None,
                power_law: None,
                warnings: Vec::new(),
            }),
            Err(e) => Err(e),
            Ok(d) => {
                let power_law = Some(fit_power_law(&radii, &sups)?);
                Ok(Self {
                    radii,
                    sups,
                    identically_zero: false,
                    fit: Some(d.value),
                    power_law,
                    warnings: d.warnings,
                })
            }
        }
    }

    /// Rows `R,sup,log_sup`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["R", "sup", "log_sup"])?;
        for (r, s) in self.radii.iter().zip(&self.sups) {
            w.write_record([r.to_string(), s.to_string(), s.ln().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    ExponentialDecayHenceTrivial,
    NoContradiction,
    TrivialField,
}

/// Thresholds for calling a fitted profile genuinely exponential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerdictPolicy {
    pub alpha_min: f64,
    pub r_squared_min: f64,
    pub c_threshold: f64,
}

impl Default for VerdictPolicy {
    fn default() -> Self {
        Self {
            alpha_min: 0.95,
            r_squared_min: 0.99,
            c_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub r_squared: Option<f64>,
}

pub fn liouville_verdict(profile: &DecayProfile, policy: &VerdictPolicy) -> Result<VerdictReport> {
    if profile.identically_zero {
        return Ok(VerdictReport {
            verdict: Verdict::TrivialField,
            c: None,
            alpha: None,
            r_squared: None,
        });
    }
    let fit = profile.fit.ok_or(Error::TooFewSamples {
        needed: MIN_SHELLS,
        got: 0,
    })?;
    let exponential = fit.alpha >= policy.alpha_min
        && fit.rate >= policy.c_threshold
        && fit.r_squared >= policy.r_squared_min;
    Ok(VerdictReport {
        verdict: if exponential {
            Verdict::ExponentialDecayHenceTrivial
        } else {
            Verdict::NoContradiction
        },
        c: Some(fit.rate),
        alpha: Some(fit.alpha),
        r_squared: Some(fit.r_squared),
    })
}
