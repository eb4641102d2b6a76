//! Harmonic extension of boundary data into the upper half-space and the
//! estimates built on it: the Dirichlet-to-Neumann map, L2 contraction,
//! three-ball interpolation, the sup bound, and boundary-to-bulk decay.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decay::DecayProfile;
use crate::diagnostics::{Diagnosed, Warning};
use crate::error::{Error, Result};
use crate::field::{forward_transform, inverse_transform, lp_norm, Grid, SampledField};

/// Harmonic function on `grid x {y_1 < ... < y_M}` together with its
/// boundary trace at `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceField {
    trace: SampledField,
    heights: Vec<f64>,
    slices: Vec<Vec<f64>>,
}

pub fn validate_heights(heights: &[f64]) -> Result<()> {
    if heights.is_empty() {
        return Err(Error::InvalidHeights(
            "at least one height is required".into(),
        ));
    }
    if heights.iter().any(|y| !(y.is_finite() && *y > 0.0)) {
        return Err(Error::InvalidHeights(
            "heights must be finite and positive".into(),
        ));
    }
    if heights.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidHeights(
            "heights must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `y_m = first * ratio^(m-1)` for all `y_m <= top`.
pub fn geometric_heights(first: f64, ratio: f64, top: f64) -> Result<Vec<f64>> {
    if !(first > 0.0 && ratio > 1.0 && top >= first && top.is_finite()) {
        return Err(Error::InvalidHeights(format!(
            "geometric heights need 0 < first <= top and ratio > 1 (first={first}, ratio={ratio}, top={top})"
        )));
    }
    let mut out = vec![first];
    loop {
        let next = out[out.len() - 1] * ratio;
        if next > top * (1.0 + 1e-12) {
            break;
        }
        out.push(next);
    }
    Ok(out)
}

/// `y_m = m * step`, `m = 1..=count`.
pub fn uniform_heights(step: f64, count: usize) -> Result<Vec<f64>> {
    let out: Vec<f64> = (1..=count).map(|m| m as f64 * step).collect();
    validate_heights(&out)?;
    Ok(out)
}

impl HalfSpaceField {
    /// Tabulate a function `f(x, y)` given in closed form. The trace is
    /// `f(x, 0)`.
    pub fn from_fn(
        grid: Grid,
        heights: Vec<f64>,
        f: impl Fn(&[f64], f64) -> f64 + Sync,
    ) -> Result<Self> {
        validate_heights(&heights)?;
        let trace = crate::field::sample(|x| f(x, 0.0), &grid)?;
        let slices = heights
            .iter()
            .map(|&y| crate::field::sample(|x| f(x, y), &grid).map(SampledField::into_values))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            trace,
            heights,
            slices,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.trace.grid()
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn trace(&self) -> &SampledField {
        &self.trace
    }

    /// Values at height index `m` (0-based into [`heights`](Self::heights)).
    pub fn slice(&self, m: usize) -> SampledField {
        SampledField::from_trusted(*self.grid(), self.slices[m].clone())
    }

    /// Row `r` of the stacked table where row 0 is the trace and row `m + 1`
    /// is height `m`.
    fn row(&self, r: usize) -> &[f64] {
        if r == 0 {
            self.trace.values()
        } else {
            &self.slices[r - 1]
        }
    }

    /// Height of row `r` (row 0 is `y = 0`).
    fn row_height(&self, r: usize) -> f64 {
        if r == 0 {
            0.0
        } else {
            self.heights[r - 1]
        }
    }

    fn rows(&self) -> usize {
        self.heights.len() + 1
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.rows()).fold(0.0f64, |m, r| {
            self.row(r).iter().fold(m, |a, v| a.max(v.abs()))
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            trace: self.trace.scaled(factor),
            heights: self.heights.clone(),
            slices: self
                .slices
                .iter()
                .map(|s| s.iter().map(|v| v * factor).collect())
                .collect(),
        }
    }

    /// Trapezoid weights in `y` over rows `0..=M`.
    fn height_weights(&self) -> Vec<f64> {
        let m = self.rows();
        (0..m)
            .map(|r| {
                let lo = if r == 0 { 0.0 } else { self.row_height(r - 1) };
                let hi = if r + 1 == m {
                    self.row_height(r)
                } else {
                    self.row_height(r + 1)
                };
                0.5 * (hi - lo)
            })
            .collect()
    }
}

/// Harmonic extension: each slice has coefficients `exp(-|xi| y) u_hat(xi)`.
pub fn extend(u: &SampledField, heights: &[f64]) -> Result<HalfSpaceField> {
    validate_heights(heights)?;
    let spectrum = forward_transform(u);
    let slices = heights
        .par_iter()
        .map(|&y| {
            let s =
                spectrum.map_modes(|xi, _| Complex64::new((-xi[0].hypot(xi[1]) * y).exp(), 0.0));
            inverse_transform(&s).into_values()
        })
        .collect();
    Ok(HalfSpaceField {
        trace: u.clone(),
        heights: heights.to_vec(),
        slices,
    })
}

/// `-lim_{y -> 0} d/dy u~`, taken by differentiating the extension
/// multiplier `exp(-|xi| y)` in closed form at `y = 0`.
pub fn dtn_map(u: &SampledField) -> SampledField {
    let spectrum = forward_transform(u).map_modes(|xi, _| {
        let rate = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let d_dy_at_zero = -rate * (-rate * 0.0).exp();
        Complex64::new(-d_dy_at_zero, 0.0)
    });
    inverse_transform(&spectrum)
}

/// One-sided Neumann trace `-(u~(., y_1) - u) / y_1`. Warns when `y_1`
/// exceeds the boundary spacing.
pub fn finite_difference_dtn(hf: &HalfSpaceField) -> Diagnosed<SampledField> {
    let y1 = hf.heights[0];
    let h = hf.grid().spacing();
    let values = hf.slices[0]
        .iter()
        .zip(hf.trace.values())
        .map(|(a, b)| -(a - b) / y1)
        .collect();
    let warnings = if y1 > h {
        vec![Warning::CoarseFirstHeight {
            first_height: y1,
            spacing: h,
        }]
    } else {
        Vec::new()
    };
    Diagnosed {
        value: SampledField::from_trusted(*hf.grid(), values),
        warnings,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    /// Heights including the trace at `y = 0`.
    pub heights: Vec<f64>,
    /// `||u~(., y)||_2 / ||u||_2` per height.
    pub ratios: Vec<f64>,
    /// `||u||_2 = 0`, so every ratio is defined as 1.
    pub trivially_passes: bool,
}

impl ContractionReport {
    /// All ratios at most `1 + tol` and non-increasing up to `tol`.
    pub fn is_contractive(&self, tol: f64) -> bool {
        self.ratios.iter().all(|r| *r <= 1.0 + tol)
            && self.ratios.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

pub fn check_l2_contraction(u: &SampledField, hf: &HalfSpaceField) -> Result<ContractionReport> {
    u.check_same_grid(&hf.trace)?;
    let base = lp_norm(u, 2.0)?;
    let mut heights = vec![0.0];
    heights.extend_from_slice(&hf.heights);
    if base == 0.0 {
        return Ok(ContractionReport {
            ratios: vec![1.0; heights.len()],
            heights,
            trivially_passes: true,
        });
    }
    let mut ratios = vec![1.0];
    for m in 0..hf.heights.len() {
        ratios.push(lp_norm(&hf.slice(m), 2.0)? / base);
    }
    Ok(ContractionReport {
        heights,
        ratios,
        trivially_passes: false,
    })
}

/// Largest discrete Laplacian of `u~` over interior rows, relative to
/// `||u~||_inf`. The `x` directions use the periodic 3-point stencil; the
/// `y` direction uses the 3-point stencil on the (possibly non-uniform)
/// heights with the trace as the bottom row.
pub fn harmonic_residual(hf: &HalfSpaceField) -> Result<f64> {
    if hf.heights.len() < 3 {
        return Err(Error::InvalidHeights(format!(
            "need at least 3 heights, got {}",
            hf.heights.len()
        )));
    }
    let g = *hf.grid();
    let n = g.points();
    let h2 = g.spacing().powi(2);
    let scale = hf.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let worst = (1..hf.rows() - 1)
        .into_par_iter()
        .map(|r| {
            let (below, here, above) = (hf.row(r - 1), hf.row(r), hf.row(r + 1));
            let dm = hf.row_height(r) - hf.row_height(r - 1);
            let dp = hf.row_height(r + 1) - hf.row_height(r);
            let mut worst = 0.0f64;
            for flat in 0..g.len() {
                let [i0, i1] = g.multi_index(flat);
                let u = here[flat];
                let uyy = 2.0 * ((above[flat] - u) / dp - (u - below[flat]) / dm) / (dp + dm);
                let mut lap = uyy;
                let wrap = |i: usize, d: isize| (i as isize + d).rem_euclid(n as isize) as usize;
                if g.dim() == 1 {
                    lap += (here[wrap(i0, 1)] - 2.0 * u + here[wrap(i0, -1)]) / h2;
                } else {
                    lap +=
                        (here[wrap(i0, 1) * n + i1] - 2.0 * u + here[wrap(i0, -1) * n + i1]) / h2;
                    lap +=
                        (here[i0 * n + wrap(i1, 1)] - 2.0 * u + here[i0 * n + wrap(i1, -1)]) / h2;
                }
                worst = worst.max(lap.abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst / scale)
}

/// Ball centred on the boundary hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

impl BallSpec {
    pub fn new(center: &[f64], radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || center.is_empty() || center.len() > 2 {
            return Err(Error::InvalidArgument(format!(
                "invalid ball: center {center:?}, radius {radius}"
            )));
        }
        let mut c = [0.0; 2];
        c[..center.len()].copy_from_slice(center);
        Ok(Self { center: c, radius })
    }

    fn boundary_distance(&self, g: &Grid, flat: usize) -> f64 {
        let x = g.node(flat);
        let d0 = x[0] - self.center[0];
        let d1 = if g.dim() == 2 {
            x[1] - self.center[1]
        } else {
            0.0
        };
        d0.hypot(d1)
    }

    fn fits(&self, hf: &HalfSpaceField, radius: f64) -> Result<()> {
        let g = hf.grid();
        let reach = self.center[..g.dim()]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()))
            + radius;
        if reach > g.half_extent() || radius > *hf.heights.last().unwrap() {
            return Err(Error::BallOutsideDomain {
                center: self.center[..g.dim()].to_vec(),
                radius,
            });
        }
        Ok(())
    }
}

/// `||u~||_{L2(B+_r)}` by the indicator-weighted rectangle rule in `x` and
/// trapezoid weights in `y`.
fn half_ball_l2(hf: &HalfSpaceField, ball: &BallSpec, r: f64) -> f64 {
    let g = hf.grid();
    let weights = hf.height_weights();
    let cell = g.cell_volume();
    let mut sum = 0.0;
    for (row, w) in weights.iter().enumerate() {
        let y = hf.row_height(row);
        if y >= r {
            break;
        }
        let vals = hf.row(row);
        for (flat, v) in vals.iter().enumerate() {
            let d = ball.boundary_distance(g, flat);
            if d * d + y * y < r * r {
                sum += v * v * w * cell;
            }
        }
    }
    sum.sqrt()
}

fn half_ball_sup(hf: &HalfSpaceField, ball: &BallSpec, r: f64) -> f64 {
    let g = hf.grid();
    let mut sup = 0.0f64;
    for row in 0..hf.rows() {
        let y = hf.row_height(row);
        if y >= r {
            break;
        }
        for (flat, v) in hf.row(row).iter().enumerate() {
            let d = ball.boundary_distance(g, flat);
            if d * d + y * y < r * r {
                sup = sup.max(v.abs());
            }
        }
    }
    sup
}

/// `||f||_{Lp(B'_r)}` on the boundary grid.
fn boundary_ball_norm(f: &SampledField, ball: &BallSpec, r: f64, p: f64) -> f64 {
    let g = f.grid();
    let s: f64 = f
        .values()
        .iter()
        .enumerate()
        .filter(|(flat, _)| ball.boundary_distance(g, *flat) < r)
        .map(|(_, v)| v.abs().powf(p))
        .sum();
    (s * g.cell_volume()).powf(1.0 / p)
}

/// Quantities of the three-ball interpolation inequality
/// `lhs <= C A^alpha B^(1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeBall {
    /// `||u~||_{L2(B+_{cR})}`
    pub lhs: f64,
    /// `||u~||_{L2(B+_{16R})} + R^(1/2) ||u||_{L2(B'_{16R})}`
    pub bracket_a: f64,
    /// `R^(3/2) ||dtn||_{L2(B'_{16R})} + R^(1/2) ||u||_{L2(B'_{16R})}`
    pub bracket_b: f64,
    /// `log(lhs / B) / log(A / B)`; `None` when the brackets are degenerate.
    pub alpha_star: Option<f64>,
    pub degenerate: bool,
    /// `lhs <= A^alpha B^(1 - alpha)` for some `alpha` in `[0, 1]`.
    pub holds_with_unit_constant: bool,
    pub c: f64,
}

pub const DEFAULT_INNER_FRACTION: f64 = 0.25;

pub fn three_ball_check(
    hf: &HalfSpaceField,
    ball: &BallSpec,
    dtn: &SampledField,
    c: f64,
) -> Result<ThreeBall> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "inner fraction c must lie in (0, 1), got {c}"
        )));
    }
    hf.trace.check_same_grid(dtn)?;
    let r = ball.radius;
    let big = 16.0 * r;
    ball.fits(hf, big)?;
    let lhs = half_ball_l2(hf, ball, c * r);
    let bulk = half_ball_l2(hf, ball, big);
    let trace = boundary_ball_norm(&hf.trace, ball, big, 2.0);
    let neumann = boundary_ball_norm(dtn, ball, big, 2.0);
    let a = bulk + r.sqrt() * trace;
    let b = r.powf(1.5) * neumann + r.sqrt() * trace;
    let degenerate = lhs == 0.0 || a == 0.0 || b == 0.0 || (a - b).abs() <= 1e-14 * a.max(b);
    let alpha_star = if degenerate {
        None
    } else {
        Some((lhs / b).ln() / (a / b).ln())
    };
    Ok(ThreeBall {
        lhs,
        bracket_a: a,
        bracket_b: b,
        alpha_star,
        degenerate,
        holds_with_unit_constant: lhs <= a.max(b) * (1.0 + 1e-12),
        c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupBound {
    /// `||u~||_{L_inf(B+_{cR})}`
    pub lhs_sup: f64,
    /// `A^alpha B^(1 - alpha) + R^(3/2) ||dtn||_{Lp(B'_R)}`
    pub rhs_core: f64,
    pub alpha_used: f64,
    /// `lhs_sup / rhs_core`; `None` when `rhs_core = 0`.
    pub c_emp: Option<f64>,
}

/// Sup bound of the bulk by boundary data, with the interpolation exponent
/// taken from [`three_ball_check`] (clamped to `[0, 1]`; `1/2` when undefined).
pub fn sup_bound_check(
    hf: &HalfSpaceField,
    ball: &BallSpec,
    dtn: &SampledField,
    p: f64,
    c: f64,
) -> Result<SupBound> {
    let n = hf.grid().dim() as f64;
    if ball.radius < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "radius must be >= 1, got {}",
            ball.radius
        )));
    }
    if !(p > n) {
        return Err(Error::InvalidArgument(format!(
            "p must exceed n = {n}, got {p}"
        )));
    }
    let tb = three_ball_check(hf, ball, dtn, c)?;
    let alpha = tb.alpha_star.map_or(0.5, |a| a.clamp(0.0, 1.0));
    let r = ball.radius;
    let rhs_core = tb.bracket_a.powf(alpha) * tb.bracket_b.powf(1.0 - alpha)
        + r.powf(1.5) * boundary_ball_norm(dtn, ball, r, p);
    let lhs_sup = half_ball_sup(hf, ball, c * r);
    Ok(SupBound {
        lhs_sup,
        rhs_core,
        alpha_used: alpha,
        c_emp: (rhs_core > 0.0).then(|| lhs_sup / rhs_core),
    })
}

/// Options for [`boundary_to_bulk`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BulkOptions {
    /// Zero-padding factor applied to `u` before extending.
    pub pad_factor: usize,
    /// First height; the boundary spacing when absent.
    pub first_height: Option<f64>,
    pub height_ratio: f64,
    pub r_min: f64,
    /// Shells run up to this fraction of `min(L, y_M)`.
    pub r_max_fraction: f64,
}

impl Default for BulkOptions {
    fn default() -> Self {
        Self {
            pad_factor: 4,
            first_height: None,
            height_ratio: 1.2,
            r_min: 5.0,
            r_max_fraction: 0.8,
        }
    }
}

/// Shell and axis decay of a half-space field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BulkDecay {
    /// `S(R) = sup |u~|` over `|(x, y)| in [R, R + h)`, `y >= 0`.
    pub shell: DecayProfile,
    /// `|u~(0, y)|` at the tabulated heights.
    pub axis: DecayProfile,
}

/// Shell sups on `[r_min, r_max]` with width equal to the boundary
/// spacing, plus the profile along the axis `x = 0`.
pub fn bulk_profile(hf: &HalfSpaceField, r_min: f64, r_max: f64) -> Result<BulkDecay> {
    let g = *hf.grid();
    let h = g.spacing();
    if !(r_max > r_min && r_min > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "empty shell window [{r_min}, {r_max}]"
        )));
    }
    let count = ((r_max - r_min) / h).floor() as usize;
    let mut sups = vec![0.0f64; count];
    for row in 0..hf.rows() {
        let y = hf.row_height(row);
        for (flat, v) in hf.row(row).iter().enumerate() {
            let rho = g.radius(flat).hypot(y);
            if rho < r_min {
                continue;
            }
            let k = ((rho - r_min) / h) as usize;
            if k < count {
                sups[k] = sups[k].max(v.abs());
            }
        }
    }
    let radii: Vec<f64> = (0..count).map(|k| r_min + k as f64 * h).collect();
    let shell = DecayProfile::from_shells(radii, sups)?;

    let origin = match g.dim() {
        1 => g.points() / 2,
        _ => (g.points() / 2) * g.points() + g.points() / 2,
    };
    let (ar, av): (Vec<f64>, Vec<f64>) = hf
        .heights
        .iter()
        .zip(&hf.slices)
        .filter(|(y, _)| **y >= r_min && **y <= r_max)
        .map(|(y, s)| (*y, s[origin].abs()))
        .unzip();
    let axis = DecayProfile::from_shells(ar, av)?;
    Ok(BulkDecay { shell, axis })
}

/// Extend `u` (zero-padded) and measure how fast the extension decays in the
/// bulk. `lambda` is the boundary decay rate being tested; it only enters
/// through the reported certificate `max |u| e^(lambda |x|)`.
pub fn boundary_to_bulk(
    u: &SampledField,
    lambda: f64,
    opts: &BulkOptions,
) -> Result<(BulkDecay, f64)> {
    let g = *u.grid();
    let l = g.half_extent();
    let certificate = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.abs() * (lambda * g.radius(i)).exp())
        .fold(0.0f64, f64::max);
    let first = opts.first_height.unwrap_or(g.spacing());
    let heights = geometric_heights(first, opts.height_ratio, l)?;
    let y_top = *heights.last().unwrap();
    let wide = u.zero_padded(opts.pad_factor)?;
    let hf = extend(&wide, &heights)?;
    let decay = bulk_profile(&hf, opts.r_min, opts.r_max_fraction * l.min(y_top))?;
    Ok((decay, certificate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use std::f64::consts::PI;

    fn grid1(n: usize, l: f64) -> Grid {
        Grid::new(1, n, l).unwrap()
    }

    fn max_err(f: &SampledField, exact: impl Fn(f64) -> f64) -> f64 {
        let g = f.grid();
        f.values().iter().enumerate().fold(0.0f64, |m, (i, v)| {
            m.max((v - exact(g.coordinate(i))).abs())
        })
    }

    #[test]
    fn heights_validation() {
        assert!(validate_heights(&[]).is_err());
        assert!(validate_heights(&[1.0, 1.0]).is_err());
        assert!(validate_heights(&[-1.0, 1.0]).is_err());
        let g = geometric_heights(0.5, 2.0, 4.0).unwrap();
        assert_eq!(g, vec![0.5, 1.0, 2.0, 4.0]);
        assert_eq!(uniform_heights(0.25, 3).unwrap(), vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn cosine_mode_extends_exponentially() {
        let k = 3.0;
        let u = sample(|x| (k * x[0]).cos(), &grid1(64, PI)).unwrap();
        let hf = extend(&u, &[0.1, 0.5, 1.0]).unwrap();
        for (m, y) in hf.heights().iter().enumerate() {
            assert!(max_err(&hf.slice(m), |x| (-k * y).exp() * (k * x).cos()) < 1e-13);
        }
        let c = check_l2_contraction(&u, &hf).unwrap();
        assert_eq!(c.ratios[0], 1.0);
        for (r, y) in c.ratios.iter().zip(&c.heights) {
            assert!((r - (-k * y).exp()).abs() < 1e-13);
        }
        assert!(c.is_contractive(1e-10));
    }

    #[test]
    fn gaussian_slice_approaches_poisson_kernel() {
        let sigma = 0.05;
        let g = grid1(4096, 40.0);
        let u = sample(
            |x| (-x[0] * x[0] / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt()),
            &g,
        )
        .unwrap();
        let hf = extend(&u, &[1.0]).unwrap();
        let poisson = |x: f64| 1.0 / (PI * (x * x + 1.0));
        assert!(max_err(&hf.slice(0), poisson) < 0.01 * poisson(0.0));
    }

    #[test]
    fn dtn_examples() {
        let u = sample(|x| (2.0 * x[0]).cos(), &grid1(64, PI)).unwrap();
        assert!(max_err(&dtn_map(&u), |x| 2.0 * (2.0 * x).cos()) < 1e-12);
        let c = sample(|_| 1.5, &grid1(32, 1.0)).unwrap();
        assert!(dtn_map(&c).max_abs() < 1e-14);
    }

    #[test]
    fn one_sided_neumann_trace() {
        let u = sample(|x| x[0].cos(), &grid1(64, PI)).unwrap();
        let exact = dtn_map(&u);
        let err = |y1: f64| {
            let d = finite_difference_dtn(&extend(&u, &[y1]).unwrap());
            assert!(d.warnings.is_empty());
            d.value
                .values()
                .iter()
                .zip(exact.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        let e1 = err(1e-3);
        assert!(e1 < 1e-3, "{e1}");
        let ratio = e1 / err(5e-4);
        assert!((1.6..=2.4).contains(&ratio), "{ratio}");
        let coarse = finite_difference_dtn(&extend(&u, &[1.0]).unwrap());
        assert!(matches!(
            coarse.warnings[0],
            Warning::CoarseFirstHeight { .. }
        ));
        let c = sample(|_| 2.0, &grid1(32, 1.0)).unwrap();
        assert!(
            finite_difference_dtn(&extend(&c, &[1e-3]).unwrap())
                .value
                .max_abs()
                < 1e-10
        );
    }

    #[test]
    fn zero_data_contracts_trivially() {
        let u = SampledField::zeros(grid1(32, 1.0));
        let hf = extend(&u, &[0.5, 1.0]).unwrap();
        let c = check_l2_contraction(&u, &hf).unwrap();
        assert!(c.trivially_passes && c.is_contractive(0.0));
    }

    #[test]
    fn residual_of_polynomials() {
        let g = grid1(32, 2.0);
        let hs = uniform_heights(0.25, 4).unwrap();
        let linear = HalfSpaceField::from_fn(g, hs.clone(), |_, y| y).unwrap();
        assert!(harmonic_residual(&linear).unwrap() < 1e-12);
        let quad = HalfSpaceField::from_fn(g, hs.clone(), |_, y| y * y).unwrap();
        assert!((harmonic_residual(&quad).unwrap() - 2.0).abs() < 1e-10);
        let few = HalfSpaceField::from_fn(g, hs[..2].to_vec(), |_, y| y).unwrap();
        assert!(harmonic_residual(&few).is_err());
        // non-uniform heights are still exact on quadratics in y
        let geo = geometric_heights(0.1, 1.3, 1.0).unwrap();
        let quad = HalfSpaceField::from_fn(g, geo, |_, y| y * y).unwrap();
        assert!((harmonic_residual(&quad).unwrap() - 2.0 / quad.max_abs()).abs() < 1e-9);
    }

    #[test]
    fn residual_converges_at_second_order() {
        let mut prev = None;
        for n in [32usize, 64, 128] {
            let g = grid1(n, PI);
            let u = sample(|x| x[0].cos(), &g).unwrap();
            let hf = extend(&u, &uniform_heights(g.spacing(), n / 4).unwrap()).unwrap();
            let r = harmonic_residual(&hf).unwrap();
            if let Some(p) = prev {
                let ratio: f64 = p / r;
                assert!((3.2..=4.8).contains(&ratio), "{ratio}");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn three_ball_guards_and_scaling() {
        let g = grid1(512, 40.0);
        let u = sample(|x| x[0].cos(), &g).unwrap();
        let hf = extend(&u, &geometric_heights(g.spacing(), 1.1, 20.0).unwrap()).unwrap();
        let dtn = dtn_map(&u);
        let ball = BallSpec::new(&[0.0], 1.0).unwrap();
        let tb = three_ball_check(&hf, &ball, &dtn, DEFAULT_INNER_FRACTION).unwrap();
        assert!(tb.lhs > 0.0 && tb.bracket_a > tb.lhs && tb.bracket_b > 0.0);
        assert!(tb.holds_with_unit_constant);
        let tb2 = three_ball_check(
            &hf.scaled(2.0),
            &ball,
            &dtn.scaled(2.0),
            DEFAULT_INNER_FRACTION,
        )
        .unwrap();
        assert!((tb.alpha_star.unwrap() - tb2.alpha_star.unwrap()).abs() < 1e-12);

        let z = SampledField::zeros(g);
        let zf = extend(&z, hf.heights()).unwrap();
        let tz = three_ball_check(&zf, &ball, &z, DEFAULT_INNER_FRACTION).unwrap();
        assert!(tz.degenerate && tz.alpha_star.is_none());

        let far = BallSpec::new(&[30.0], 1.0).unwrap();
        assert!(matches!(
            three_ball_check(&hf, &far, &dtn, 0.25),
            Err(Error::BallOutsideDomain { .. })
        ));
    }

    #[test]
    fn sup_bound_is_homogeneous() {
        let g = grid1(512, 40.0);
        let u = sample(|x| x[0].cos(), &g).unwrap();
        let hf = extend(&u, &geometric_heights(g.spacing(), 1.1, 20.0).unwrap()).unwrap();
        let dtn = dtn_map(&u);
        let ball = BallSpec::new(&[0.0], 1.0).unwrap();
        let s = sup_bound_check(&hf, &ball, &dtn, 2.0, 0.25).unwrap();
        assert!(s.lhs_sup <= 1.0 && s.rhs_core.is_finite());
        let s2 = sup_bound_check(&hf.scaled(2.0), &ball, &dtn.scaled(2.0), 2.0, 0.25).unwrap();
        assert!((s2.lhs_sup - 2.0 * s.lhs_sup).abs() < 1e-12);
        assert!((s2.rhs_core - 2.0 * s.rhs_core).abs() < 1e-10 * s.rhs_core);
        assert!((s2.c_emp.unwrap() - s.c_emp.unwrap()).abs() < 1e-12);
        let z = SampledField::zeros(g);
        let sz = sup_bound_check(&extend(&z, hf.heights()).unwrap(), &ball, &z, 2.0, 0.25).unwrap();
        assert_eq!(sz.lhs_sup, 0.0);
        assert!(sup_bound_check(&hf, &ball, &dtn, 1.0, 0.25).is_err());
        assert!(
            sup_bound_check(&hf, &BallSpec::new(&[0.0], 0.5).unwrap(), &dtn, 2.0, 0.25).is_err()
        );
    }

    #[test]
    fn zero_data_has_trivial_bulk_profile() {
        let u = SampledField::zeros(grid1(1024, 40.0));
        let (b, cert) = boundary_to_bulk(&u, 1.0, &BulkOptions::default()).unwrap();
        assert!(b.shell.identically_zero && b.axis.identically_zero);
        assert_eq!(cert, 0.0);
    }

    #[test]
    fn manual_exponential_field_decays_along_the_axis() {
        let k = 0.5;
        let g = grid1(512, 40.0);
        let hs = geometric_heights(g.spacing(), 1.1, 40.0).unwrap();
        let hf = HalfSpaceField::from_fn(g, hs, |x, y| (-k * y).exp() * (k * x[0]).cos()).unwrap();
        let b = bulk_profile(&hf, 5.0, 32.0).unwrap();
        let fit = b.axis.fit.unwrap();
        assert!(
            (fit.alpha - 1.0).abs() < 1e-6 && (fit.rate - k).abs() < 1e-6,
            "{fit:?}"
        );
    }
}
