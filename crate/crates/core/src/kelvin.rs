//! Inversion, the ball-to-half-space map `Phi`, the Kelvin transform, and
//! the sub-exponentially decaying harmonic family `h_alpha` on the upper
//! half-plane.

use num_complex::Complex64;
use serde::Serialize;

use crate::decay::DecayProfile;
use crate::error::{Error, Result};

/// Points closer than this to a singular point are rejected.
pub const EXCLUSION_RADIUS: f64 = 1e-14;

/// A point of `R^{n+1}`, `n` in {1, 2}; the last coordinate is the height.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&coords.len()) {
            return Err(Error::InvalidArgument(format!(
                "points live in R^2 or R^3, got {} coordinates",
                coords.len()
            )));
        }
        if let Some(v) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                node: coords.clone(),
                value: *v,
            });
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Boundary dimension `n`.
    pub fn boundary_dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn height(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    fn horizontal_norm2(&self) -> f64 {
        self.0[..self.0.len() - 1].iter().map(|v| v * v).sum()
    }

    fn distance(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// `s = (0, ..., 0, -1)` in `R^{n+1}`.
pub fn south_pole(n: usize) -> Point {
    let mut c = vec![0.0; n + 1];
    c[n] = -1.0;
    Point(c)
}

fn guard_pole(z: &Point) -> Result<f64> {
    let d = z.distance(&south_pole(z.boundary_dim()));
    if d <= EXCLUSION_RADIUS {
        return Err(Error::NearSingularPoint(d));
    }
    Ok(d)
}

/// `x* = x / |x|^2`.
pub fn inversion_star(x: &Point) -> Result<Point> {
    let r2 = x.norm().powi(2);
    if x.norm() <= EXCLUSION_RADIUS {
        return Err(Error::NearSingularPoint(x.norm()));
    }
    Ok(Point(x.0.iter().map(|v| v / r2).collect()))
}

/// `Phi(z) = (2 z', 1 - |z|^2) / (|z'|^2 + (1 + z_{n+1})^2)`, exchanging the
/// unit ball and the upper half-space.
pub fn phi_map(z: &Point) -> Result<Point> {
    guard_pole(z)?;
    let h2 = z.horizontal_norm2();
    let t = z.height();
    let den = h2 + (1.0 + t).powi(2);
    let n = z.boundary_dim();
    let mut out: Vec<f64> = z.0[..n].iter().map(|v| 2.0 * v / den).collect();
    out.push((1.0 - h2 - t * t) / den);
    Ok(Point(out))
}

/// `|Phi(z)| = |((1 - z_{n+1}) + i|z'|) / ((-z_{n+1} - 1) + i|z'|)|`.
pub fn abs_phi(z: &Point) -> Result<f64> {
    guard_pole(z)?;
    let rho = z.horizontal_norm2().sqrt();
    let t = z.height();
    Ok((Complex64::new(1.0 - t, rho) / Complex64::new(-t - 1.0, rho)).norm())
}

/// `K[w](z) = 2^{(n-1)/2} |z - s|^{1-n} w(Phi(z))`.
pub fn kelvin_transform(w: impl Fn(&[f64]) -> f64, z: &Point) -> Result<f64> {
    let d = guard_pole(z)?;
    let n = z.boundary_dim() as i32;
    let image = phi_map(z)?;
    let value = w(image.coords());
    if !value.is_finite() {
        return Err(Error::NonFinite {
            node: image.0,
            value,
        });
    }
    Ok(2f64.powf(0.5 * (n - 1) as f64) * d.powi(1 - n) * value)
}

/// Axis-aligned cube `center +- half_width` in `R^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub center: Vec<f64>,
    pub half_width: f64,
}

/// Largest 5-point (n = 1) or 7-point (n = 2) Laplacian of `z -> K[w](z)` over
/// the nodes `center + h * i` of the region. The region must stay `10 h`
/// away from the south pole.
pub fn kelvin_harmonicity_check(w: impl Fn(&[f64]) -> f64, region: &Region, h: f64) -> Result<f64> {
    let dim = region.center.len();
    let c = Point::new(region.center.clone())?;
    if !(h > 0.0 && region.half_width >= h) {
        return Err(Error::InvalidArgument(format!(
            "step {h} does not fit half-width {}",
            region.half_width
        )));
    }
    let s = south_pole(dim - 1);
    // distance from the pole to the closed cube
    let gap =
        c.0.iter()
            .zip(&s.0)
            .map(|(a, b)| ((a - b).abs() - region.half_width).max(0.0).powi(2))
            .sum::<f64>()
            .sqrt();
    if gap < 10.0 * h {
        return Err(Error::NearSingularPoint(gap));
    }
    let m = (region.half_width / h).round() as i64;
    let k = |p: &[f64]| kelvin_transform(&w, &Point(p.to_vec()));
    let mut worst = 0.0f64;
    let mut idx = vec![-m; dim];
    loop {
        let p: Vec<f64> = idx
            .iter()
            .zip(&c.0)
            .map(|(i, x)| x + *i as f64 * h)
            .collect();
        let centre = k(&p)?;
        let mut lap = 0.0;
        for a in 0..dim {
            let mut q = p.clone();
            q[a] = p[a] + h;
            let plus = k(&q)?;
            q[a] = p[a] - h;
            lap += plus + k(&q)? - 2.0 * centre;
        }
        worst = worst.max((lap / (h * h)).abs());
        // odometer over the cube
        let mut a = 0;
        while a < dim {
            idx[a] += 1;
            if idx[a] <= m {
                break;
            }
            idx[a] = -m;
            a += 1;
        }
        if a == dim {
            break;
        }
    }
    Ok(worst)
}

/// `h_alpha(x, y) = Re exp(-(-i(x + iy))^alpha)` with the principal branch;
/// harmonic on `y > 0` and bounded by `exp(-cos(alpha pi / 2) |z|^alpha)`.
pub fn sharpness_counterexample(alpha: f64, x: f64, y: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need a point with y > 0, got ({x}, {y})"
        )));
    }
    let w = Complex64::new(y, -x).powf(alpha);
    Ok((-w).exp().re)
}

/// `exp(-cos(alpha pi / 2) r^alpha)`.
pub fn sharpness_envelope(alpha: f64, r: f64) -> f64 {
    (-(alpha * std::f64::consts::FRAC_PI_2).cos() * r.powf(alpha)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub alpha: f64,
    /// `h_alpha(0, R) = exp(-R^alpha)` on `R in [r_min, r_max]`.
    pub axis: DecayProfile,
    /// `sup |h_alpha|` over shells `|z| in [R, R + h)` of the sampled upper
    /// half-box.
    pub shell: DecayProfile,
    /// Largest `|h_alpha(z)| / envelope(|z|)` over evaluated points; at most 1.
    pub envelope_ratio: f64,
    /// Every shell sup lies between `exp(-(R + h)^alpha)` and the envelope.
    pub shells_within_envelope: bool,
}

/// Evaluate `h_alpha` on `[-L, L) x (0, L]` with spacing `h = 2L / points`
/// and tabulate its decay on `[r_min, r_max]`.
pub fn sharpness_profiles(
    alpha: f64,
    half_extent: f64,
    points: usize,
    r_min: f64,
    r_max: f64,
) -> Result<SharpnessReport> {
    sharpness_counterexample(alpha, 0.0, 1.0)?;
    let grid = crate::field::Grid::new(1, points, half_extent)?;
    let h = grid.spacing();
    if !(r_min > 0.0 && r_max > r_min && r_max <= half_extent) {
        return Err(Error::InvalidArgument(format!(
            "invalid shell window [{r_min}, {r_max}]"
        )));
    }
    let count = ((r_max - r_min) / h).floor() as usize;
    let radii: Vec<f64> = (0..count).map(|k| r_min + k as f64 * h).collect();
    let mut sups = vec![0.0f64; count];
    let mut envelope_ratio = 0.0f64;
    for j in 1..=points / 2 {
        let y = j as f64 * h;
        for i in 0..points {
            let x = grid.coordinate(i);
            let v = sharpness_counterexample(alpha, x, y)?.abs();
            let r = x.hypot(y);
            envelope_ratio = envelope_ratio.max(v / sharpness_envelope(alpha, r));
            if r >= r_min {
                let k = ((r - r_min) / h) as usize;
                if k < count {
                    sups[k] = sups[k].max(v);
                }
            }
        }
    }
    let shells_within_envelope = radii.iter().zip(&sups).all(|(&r, &s)| {
        s >= (-(r + h).powf(alpha)).exp() * (1.0 - 1e-12)
            && s <= sharpness_envelope(alpha, r) * (1.0 + 1e-12)
    });
    let axis_vals = radii
        .iter()
        .map(|&r| sharpness_counterexample(alpha, 0.0, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(SharpnessReport {
        alpha,
        axis: DecayProfile::from_shells(radii.clone(), axis_vals)?,
        shell: DecayProfile::from_shells(radii, sups)?,
        envelope_ratio,
        shells_within_envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
        loop {
            let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let z = p(&c);
            if z.distance(&south_pole(dim - 1)) > 0.01 {
                return z;
            }
        }
    }

    #[test]
    fn inversion_examples() {
        assert!(
            inversion_star(&p(&[0.6, 0.8]))
                .unwrap()
                .distance(&p(&[0.6, 0.8]))
                < 1e-15
        );
        assert_eq!(inversion_star(&p(&[2.0, 0.0])).unwrap(), p(&[0.5, 0.0]));
        assert!(matches!(
            inversion_star(&p(&[0.0, 0.0, 0.0])),
            Err(Error::NearSingularPoint(_))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = random_point(&mut rng, 3);
            let back = inversion_star(&inversion_star(&x).unwrap()).unwrap();
            assert!(back.distance(&x) < 1e-13);
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_map(&p(&[0.0, 0.0])).unwrap(), p(&[0.0, 1.0]));
        assert_eq!(phi_map(&p(&[0.0, 0.0, 1.0])).unwrap(), p(&[0.0, 0.0, 0.0]));
        assert!(matches!(
            phi_map(&south_pole(1)),
            Err(Error::NearSingularPoint(_))
        ));
        assert_eq!(abs_phi(&p(&[0.0, 0.0])).unwrap(), 1.0);
        assert!((abs_phi(&p(&[0.0, -0.9])).unwrap() - 19.0).abs() < 1e-12);
    }

    #[test]
    fn phi_matches_its_geometric_definition() {
        // Phi(z) = 2 (z - s)* + s
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in [2, 3] {
            let s = south_pole(dim - 1);
            for _ in 0..200 {
                let z = random_point(&mut rng, dim);
                let shifted = Point(z.0.iter().zip(&s.0).map(|(a, b)| a - b).collect());
                let star = inversion_star(&shifted).unwrap();
                let geo: Vec<f64> = star.0.iter().zip(&s.0).map(|(a, b)| 2.0 * a + b).collect();
                assert!(phi_map(&z).unwrap().distance(&Point(geo)) < 1e-12);
            }
        }
    }

    #[test]
    fn phi_is_an_involution_and_swaps_ball_and_half_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..1000 {
            let z = random_point(&mut rng, 2 + i % 2);
            let w = phi_map(&z).unwrap();
            assert!(phi_map(&w).unwrap().distance(&z) < 1e-12 * (1.0 + z.norm()));
            assert!((w.norm() - abs_phi(&z).unwrap()).abs() < 1e-12 * (1.0 + w.norm()));
            let inside = 1.0 - z.norm().powi(2);
            assert_eq!(inside.signum(), w.height().signum());
        }
    }

    #[test]
    fn kelvin_prefactors() {
        let z = p(&[0.3, 0.4]);
        let w = |x: &[f64]| x[0] + 2.0 * x[1];
        let image = phi_map(&z).unwrap();
        assert_eq!(kelvin_transform(w, &z).unwrap(), w(image.coords()));
        assert_eq!(kelvin_transform(|_| 1.0, &z).unwrap(), 1.0);
        let z3 = p(&[0.3, 0.1, 0.2]);
        let d = z3.distance(&south_pole(2));
        assert!((kelvin_transform(|_| 1.0, &z3).unwrap() - 2f64.sqrt() / d).abs() < 1e-14);
        assert!(kelvin_transform(|_| f64::NAN, &z3).is_err());
    }

    #[test]
    fn kelvin_of_exponentially_decaying_data_vanishes_at_the_pole() {
        let w = |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>().sqrt()).exp();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let d: f64 = rng.gen_range(0.01..0.2);
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = p(&[d * theta.cos(), -1.0 + d * theta.sin()]);
            let k = kelvin_transform(w, &z).unwrap();
            assert!(k <= std::f64::consts::E * (-2.0 / d).exp());
        }
    }

    fn ratios(w: impl Fn(&[f64]) -> f64 + Copy, region: &Region) -> Vec<f64> {
        let r: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&h| kelvin_harmonicity_check(w, region, h).unwrap())
            .collect();
        vec![r[0] / r[1], r[1] / r[2]]
    }

    #[test]
    fn kelvin_preserves_harmonicity_at_second_order() {
        let r1 = Region {
            center: vec![0.2, 0.1],
            half_width: 0.2,
        };
        let r2 = Region {
            center: vec![0.2, -0.1, 0.1],
            half_width: 0.2,
        };
        let cases: Vec<Vec<f64>> = vec![
            ratios(|x: &[f64]| x[0], &r1),
            ratios(|x: &[f64]| x[0] * x[1], &r1),
            ratios(|_: &[f64]| 1.0, &r2),
            ratios(|x: &[f64]| x[2], &r2),
        ];
        for r in cases.iter().flatten() {
            assert!((3.2..=4.8).contains(r), "{cases:?}");
        }
        assert_eq!(kelvin_harmonicity_check(|_| 1.0, &r1, 0.02).unwrap(), 0.0);
    }

    #[test]
    fn kelvin_detects_non_harmonic_input() {
        let region = Region {
            center: vec![0.2, 0.1],
            half_width: 0.2,
        };
        let r: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&h| kelvin_harmonicity_check(|x: &[f64]| x[0] * x[0], &region, h).unwrap())
            .collect();
        assert!(r.iter().all(|v| *v > 0.1), "{r:?}");
        assert!((r[2] / r[0] - 1.0).abs() < 0.1);
        let near = Region {
            center: vec![0.0, -0.8],
            half_width: 0.1,
        };
        assert!(matches!(
            kelvin_harmonicity_check(|x: &[f64]| x[0], &near, 0.02),
            Err(Error::NearSingularPoint(_))
        ));
    }

    #[test]
    fn sharpness_values() {
        assert!((sharpness_counterexample(0.5, 0.0, 4.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        for y in [0.5, 3.0, 10.0] {
            let a = 0.3;
            assert!(
                (sharpness_counterexample(a, 0.0, y).unwrap() - (-y.powf(a)).exp()).abs() < 1e-15
            );
        }
        assert!(sharpness_counterexample(1.5, 0.0, 1.0).is_err());
        assert!(sharpness_counterexample(0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn sharpness_is_harmonic() {
        let h = 1e-3;
        for (x, y) in [(0.5, 1.0), (-3.0, 2.0), (10.0, 0.5)] {
            let f = |x: f64, y: f64| sharpness_counterexample(0.5, x, y).unwrap();
            let lap =
                (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h);
            assert!(lap.abs() < 1e-5, "{lap}");
        }
    }

    #[test]
    fn sharpness_profiles_recover_alpha() {
        for alpha in [0.3, 0.5, 0.7] {
            let r = sharpness_profiles(alpha, 40.0, 256, 5.0, 32.0).unwrap();
            let fit = r.axis.fit.unwrap();
            assert!((fit.alpha - alpha).abs() < 1e-6, "{fit:?}");
            assert!(r.envelope_ratio <= 1.0 + 1e-12);
            assert!(r.shells_within_envelope);
        }
    }
}
