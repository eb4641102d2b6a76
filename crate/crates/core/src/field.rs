//! Uniform periodic grids and the sampled/spectral field representations
//! every other module computes on.
//!
//! The computational box is `[-L, L)^n` with `N` nodes per axis at
//! `x_i = -L + i*h`, `h = 2L/N`. Two-dimensional values are stored
//! row-major: flat index `i0 * N + i1` holds the node `(x_{i0}, x_{i1})`.
//! Spectral coefficients are kept in FFT order; the integer wavenumber of
//! slot `i` is `i` for `i < N/2` and `i - N` otherwise, and the physical
//! frequency is `xi = pi * k / L`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Fraction of the half-extent beyond which nodes count as the "tail" of a
/// weighted integral.
const TAIL_SHELL: f64 = 0.9;

/// Tail contribution above which a weighted integral is reported as not
/// converged on the current box.
pub const TAIL_CONVERGENCE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: usize,
    half_extent: f64,
}

impl Grid {
    pub fn new(dim: usize, points: usize, half_extent: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if points < 16 || !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 16, got {points}"
            )));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half extent must be positive and finite, got {half_extent}"
            )));
        }
        Ok(Self {
            dim,
            points,
            half_extent,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.points as f64
    }

    /// Total number of nodes, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of a single node, `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Coordinate of the `i`-th node along one axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_extent + i as f64 * self.spacing()
    }

    /// Per-axis node indices of a flat index; unused axes are zero.
    pub fn multi_index(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.points, flat % self.points],
        }
    }

    /// Node coordinates of a flat index; only the first `dim` entries are
    /// meaningful, the rest are zero.
    pub fn node(&self, flat: usize) -> [f64; 2] {
        let [i0, i1] = self.multi_index(flat);
        match self.dim {
            1 => [self.coordinate(i0), 0.0],
            _ => [self.coordinate(i0), self.coordinate(i1)],
        }
    }

    /// Euclidean distance of a node from the origin, measured in the
    /// fundamental domain (no wrap-around).
    pub fn radius(&self, flat: usize) -> f64 {
        let [a, b] = self.node(flat);
        a.hypot(b)
    }

    /// Largest coordinate magnitude of a node (distance in the max norm).
    pub fn max_coordinate(&self, flat: usize) -> f64 {
        let [a, b] = self.node(flat);
        a.abs().max(b.abs())
    }

    /// Integer wavenumber of FFT slot `i` along one axis, in `[-N/2, N/2)`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Physical frequency `pi k / L` of FFT slot `i` along one axis.
    pub fn frequency(&self, i: usize) -> f64 {
        PI * self.wavenumber(i) as f64 / self.half_extent
    }

    /// Per-axis integer wavevector of a flat spectral index.
    pub fn wavevector(&self, flat: usize) -> [i64; 2] {
        let [i0, i1] = self.multi_index(flat);
        match self.dim {
            1 => [self.wavenumber(i0), 0],
            _ => [self.wavenumber(i0), self.wavenumber(i1)],
        }
    }

    /// True when the slot holds the Nyquist wavenumber `-N/2` on any axis.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let nyq = -(self.points as i64) / 2;
        let k = self.wavevector(flat);
        k[..self.dim].contains(&nyq)
    }

    /// Grid with the same spacing covering `factor` times the half-extent.
    pub fn padded(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("padding factor must be >= 1".into()));
        }
        Grid::new(
            self.dim,
            self.points * factor,
            self.half_extent * factor as f64,
        )
    }

    /// Flat index in `self` of the node with per-axis indices `idx` in
    /// `inner`, where `self` is a padded version of `inner`.
    fn embed_index(&self, inner: &Grid, idx: [usize; 2]) -> usize {
        let offset = (self.points - inner.points) / 2;
        match self.dim {
            1 => idx[0] + offset,
            _ => (idx[0] + offset) * self.points + idx[1] + offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                node: grid.node(i)[..grid.dim()].to_vec(),
                value: v,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub(crate) fn from_trusted(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Mean over the box, i.e. the normalized zero-frequency coefficient.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Quadrature inner product `sum f g h^n`.
    pub fn inner(&self, other: &SampledField) -> Result<f64> {
        self.check_same_grid(other)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn check_same_grid(&self, other: &SampledField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SampledField {
        Self::from_trusted(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, factor: f64) -> SampledField {
        self.map(|v| v * factor)
    }

    /// Nodewise combination of two fields on the same grid.
    pub fn zip_with(
        &self,
        other: &SampledField,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<SampledField> {
        self.check_same_grid(other)?;
        Ok(Self::from_trusted(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// Copy onto a grid `factor` times wider with the same spacing, filling
    /// the new region with zeros.
    pub fn zero_padded(&self, factor: usize) -> Result<SampledField> {
        let wide = self.grid.padded(factor)?;
        let mut values = vec![0.0; wide.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            values[wide.embed_index(&self.grid, self.grid.multi_index(flat))] = v;
        }
        Ok(Self::from_trusted(wide, values))
    }

    /// Restrict a field on a padded grid back to `inner`.
    pub fn restrict_to(&self, inner: &Grid) -> Result<SampledField> {
        let ok = inner.dim == self.grid.dim
            && self.grid.points >= inner.points
            && (self.grid.points - inner.points).is_multiple_of(2)
            && (self.grid.spacing() - inner.spacing()).abs() <= 1e-12 * inner.spacing();
        if !ok {
            return Err(Error::GridMismatch);
        }
        let values = (0..inner.len())
            .map(|flat| self.values[self.grid.embed_index(inner, inner.multi_index(flat))])
            .collect();
        Ok(Self::from_trusted(*inner, values))
    }
}

/// Complex Fourier coefficients of a sampled field, in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                actual: coefficients.len(),
            });
        }
        Ok(Self { grid, coefficients })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient of the integer wavevector `k` (one entry per axis).
    pub fn coefficient(&self, k: &[i64]) -> Result<Complex64> {
        if k.len() != self.grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "wavevector has {} components, grid dimension is {}",
                k.len(),
                self.grid.dim()
            )));
        }
        let n = self.grid.points() as i64;
        let mut flat = 0usize;
        for &ki in k {
            if ki < -n / 2 || ki >= n / 2 {
                return Err(Error::InvalidArgument(format!(
                    "wavenumber {ki} outside [-N/2, N/2)"
                )));
            }
            flat = flat * n as usize + ki.rem_euclid(n) as usize;
        }
        Ok(self.coefficients[flat])
    }

    /// Physical frequency vector of a flat slot.
    pub fn frequency(&self, flat: usize) -> [f64; 2] {
        let [i0, i1] = self.grid.multi_index(flat);
        match self.grid.dim() {
            1 => [self.grid.frequency(i0), 0.0],
            _ => [self.grid.frequency(i0), self.grid.frequency(i1)],
        }
    }

    /// L2 norm of the represented field through Parseval,
    /// `sqrt(h^n / N^n * sum |F_k|^2)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coefficients.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.cell_volume() / self.grid.len() as f64).sqrt()
    }

    /// Largest violation of `F(-k) = conj(F(k))`, relative to the largest
    /// coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.points();
        let neg = |i: usize| (n - i) % n;
        let peak = self
            .coefficients
            .iter()
            .fold(0.0f64, |m, c| m.max(c.norm()));
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for flat in 0..self.coefficients.len() {
            let [i0, i1] = self.grid.multi_index(flat);
            let mirror = match self.grid.dim() {
                1 => neg(i0),
                _ => neg(i0) * n + neg(i1),
            };
            let d = (self.coefficients[flat] - self.coefficients[mirror].conj()).norm();
            worst = worst.max(d);
        }
        worst / peak
    }

    /// Multiply every coefficient by `m(xi, k)`.
    pub fn map_modes(&self, m: impl Fn([f64; 2], [i64; 2]) -> Complex64) -> SpectralField {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(flat, &c)| c * m(self.frequency(flat), self.grid.wavevector(flat)))
            .collect();
        SpectralField {
            grid: self.grid,
            coefficients,
        }
    }

    /// Ratio of the largest coefficient in the outer quarter of the band
    /// (`|k|_inf >= 3N/8`) to the largest coefficient overall.
    pub fn tail_ratio(&self) -> f64 {
        let cut = (3 * self.grid.points() / 8) as i64;
        let mut peak = 0.0f64;
        let mut tail = 0.0f64;
        for (flat, c) in self.coefficients.iter().enumerate() {
            let a = c.norm();
            peak = peak.max(a);
            let k = self.grid.wavevector(flat);
            if k[..self.grid.dim()].iter().any(|ki| ki.abs() >= cut) {
                tail = tail.max(a);
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            tail / peak
        }
    }
}

/// Evaluate `f` at every node. Non-finite evaluations are rejected with the
/// offending node.
pub fn sample(f: impl Fn(&[f64]) -> f64, grid: &Grid) -> Result<SampledField> {
    let dim = grid.dim();
    let mut values = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        let node = grid.node(flat);
        let v = f(&node[..dim]);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                node: node[..dim].to_vec(),
                value: v,
            });
        }
        values.push(v);
    }
    Ok(SampledField::from_trusted(*grid, values))
}

pub fn forward_transform(f: &SampledField) -> SpectralField {
    let grid = *f.grid();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut data, grid.dim(), grid.points());
    SpectralField {
        grid,
        coefficients: data,
    }
}

/// Inverse transform; the imaginary part (round-off for Hermitian input)
/// is discarded.
pub fn inverse_transform(spectrum: &SpectralField) -> SampledField {
    let grid = *spectrum.grid();
    let mut data = spectrum.coefficients().to_vec();
    fft::inverse(&mut data, grid.dim(), grid.points());
    SampledField::from_trusted(grid, data.into_iter().map(|c| c.re).collect())
}

/// Apply a Fourier multiplier to a real field.
pub fn apply_multiplier(
    f: &SampledField,
    m: impl Fn([f64; 2], [i64; 2]) -> Complex64,
) -> SampledField {
    inverse_transform(&forward_transform(f).map_modes(m))
}

/// Exponent of an Lp norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p == f64::INFINITY {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        }
    }
}

impl Exponent {
    fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) if !(p >= 1.0 && p.is_finite()) => Err(Error::InvalidArgument(
                format!("Lp exponent must be >= 1, got {p}"),
            )),
            e => Ok(e),
        }
    }
}

fn lp_of_values(values: &[f64], cell: f64, p: Exponent) -> f64 {
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match p {
        Exponent::Infinity => m,
        Exponent::Finite(_) if m == 0.0 => 0.0,
        Exponent::Finite(p) => {
            // scale by the max to keep large p from overflowing
            let s: f64 = values.iter().map(|v| (v.abs() / m).powf(p)).sum();
            m * (s * cell).powf(1.0 / p)
        }
    }
}

/// `(sum |f|^p h^n)^(1/p)`, or `max |f|` for `p = inf`.
pub fn lp_norm(f: &SampledField, p: impl Into<Exponent>) -> Result<f64> {
    let p = p.into().validate()?;
    Ok(lp_of_values(f.values(), f.grid().cell_volume(), p))
}

/// Lp norm of a vector field with pointwise Euclidean magnitude.
pub fn vector_lp_norm(components: &[SampledField], p: impl Into<Exponent>) -> Result<f64> {
    let p = p.into().validate()?;
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty vector field".into()))?;
    for c in components {
        first.check_same_grid(c)?;
    }
    let mags: Vec<f64> = (0..first.grid().len())
        .map(|i| {
            components
                .iter()
                .map(|c| c.values()[i].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(lp_of_values(&mags, first.grid().cell_volume(), p))
}

/// Result of an exponentially weighted integral on the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedIntegral {
    /// `sum exp(mu |x|) |f|^p h^n`; `+inf` on overflow.
    pub value: f64,
    /// Share of the integral carried by nodes with `|x|_inf >= 0.9 L`.
    pub tail_fraction: f64,
    /// Tail share below `TAIL_CONVERGENCE_THRESHOLD` and no overflow.
    pub converged: bool,
    pub overflow: bool,
}

/// `sum exp(mu |x_i|) |f_i|^p h^n`, accumulated in log space so that a
/// growing integrand overflows to `+inf` instead of poisoning the sum.
pub fn weighted_integral(f: &SampledField, mu: f64, p: f64) -> Result<WeightedIntegral> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "exponent must be >= 1, got {p}"
        )));
    }
    if !mu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "weight rate must be finite, got {mu}"
        )));
    }
    let grid = f.grid();
    let tail_edge = TAIL_SHELL * grid.half_extent();
    let logs: Vec<(f64, bool)> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| {
            (
                mu * grid.radius(i) + p * v.abs().ln(),
                grid.max_coordinate(i) >= tail_edge,
            )
        })
        .collect();
    if logs.is_empty() {
        return Ok(WeightedIntegral {
            value: 0.0,
            tail_fraction: 0.0,
            converged: true,
            overflow: false,
        });
    }
    let top = logs.iter().fold(f64::NEG_INFINITY, |m, (l, _)| m.max(*l));
    let (mut total, mut tail) = (0.0, 0.0);
    for &(l, in_tail) in &logs {
        let t = (l - top).exp();
        total += t;
        if in_tail {
            tail += t;
        }
    }
    let log_value = top + total.ln() + grid.cell_volume().ln();
    let value = log_value.exp();
    let overflow = value.is_infinite();
    let tail_fraction = tail / total;
    Ok(WeightedIntegral {
        value,
        tail_fraction,
        converged: !overflow && tail_fraction < TAIL_CONVERGENCE_THRESHOLD,
        overflow,
    })
}

/// `(sum exp(mu |x_i|) |f_i|^p h^n)^(1/p)` with its convergence diagnostics.
/// With `mu = 0` the value is exactly `lp_norm(f, p)`.
pub fn weighted_norm(f: &SampledField, mu: f64, p: f64) -> Result<WeightedIntegral> {
    let mut w = weighted_integral(f, mu, p)?;
    w.value = if mu == 0.0 {
        lp_norm(f, p)?
    } else {
        w.value.powf(1.0 / p)
    };
    Ok(w)
}
