//! Thin n-dimensional wrapper over `rustfft` for square periodic grids.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

fn transpose(data: &[Complex64], out: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = data[i * n + j];
        }
    }
}

fn process(data: &mut [Complex64], dim: usize, points: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(points, direction);
    match dim {
        1 => fft.process(data),
        2 => {
            // rows, then columns through a transpose
            fft.process(data);
            let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
            transpose(data, &mut scratch, points);
            fft.process(&mut scratch);
            transpose(&scratch, data, points);
        }
        _ => unreachable!("grid dimension is validated to be 1 or 2"),
    }
}

/// Unnormalized forward DFT, `F_k = sum_j f_j exp(-2 pi i j k / N)` per axis.
pub(crate) fn forward(data: &mut [Complex64], dim: usize, points: usize) {
    process(data, dim, points, FftDirection::Forward);
}

/// Inverse DFT including the `1/N^n` normalization.
pub(crate) fn inverse(data: &mut [Complex64], dim: usize, points: usize) {
    process(data, dim, points, FftDirection::Inverse);
    let scale = 1.0 / data.len() as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}
