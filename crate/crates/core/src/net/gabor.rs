use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaborParams {
    pub size: usize,
    pub wavelength: f64,
    pub sigma: f64,
    pub aspect: f64,
}

impl Default for GaborParams {
    fn default() -> Self {
        GaborParams {
            size: 5,
            wavelength: 5.0,
            sigma: 2.0,
            aspect: 0.5,
        }
    }
}

/// Four oriented kernels (0, 45, 90, 135 degrees), each min-max normalized
/// to `[0, 1]`, row-major `size x size`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborBank {
    pub size: usize,
    pub kernels: [Vec<f64>; 4],
}

pub const ORIENTATIONS_DEG: [u32; 4] = [0, 45, 90, 135];

/// Exact (cos, sin) pairs so the 90 degree kernel is bit-for-bit the
/// transpose of the 0 degree one.
const ROTATIONS: [(f64, f64); 4] = [
    (1.0, 0.0),
    (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (0.0, 1.0),
    (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
];

pub fn gabor_bank(params: &GaborParams) -> Result<GaborBank> {
    let n = params.size;
    if n % 2 == 0 {
        return Err(Error::Config(format!("Gabor kernel size must be odd, got {n}")));
    }
    if !(params.wavelength > 0.0 && params.sigma > 0.0 && params.aspect > 0.0) {
        return Err(Error::Config("Gabor wavelength, sigma and aspect must be positive".into()));
    }
    let c = (n / 2) as f64;
    let kernels = ROTATIONS.map(|(cos, sin)| {
        let mut k = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                let (x, y) = (col as f64 - c, row as f64 - c);
                let xr = x * cos + y * sin;
                let yr = -x * sin + y * cos;
                let envelope = (-(xr * xr + params.aspect * params.aspect * yr * yr)
                    / (2.0 * params.sigma * params.sigma))
                    .exp();
                k.push((2.0 * PI * xr / params.wavelength).cos() * envelope);
            }
        }
        let lo = k.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = k.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        k.iter().map(|v| (v - lo) / (hi - lo)).collect()
    });
    Ok(GaborBank { size: n, kernels })
}

impl GaborBank {
    /// All four kernels concatenated, matching a `(4, 1, size, size)`
    /// weight tensor.
    pub fn flattened(&self) -> Vec<f64> {
        self.kernels.iter().flatten().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn transpose(k: &[f64], n: usize) -> Vec<f64> {
        (0..n * n).map(|i| k[(i % n) * n + i / n]).collect()
    }

    #[test]
    fn rotation_symmetries() {
        let bank = gabor_bank(&GaborParams::default()).unwrap();
        assert_eq!(bank.kernels[2], transpose(&bank.kernels[0], 5));
        assert_eq!(bank.kernels[1], transpose(&bank.kernels[1], 5));
        // 135 degrees mirrors 45 degrees left-right
        let mirrored: Vec<f64> = bank.kernels[1]
            .chunks(5)
            .flat_map(|r| r.iter().rev().copied())
            .collect();
        assert_eq!(bank.kernels[3], mirrored);
    }

    #[test]
    fn normalized_range_and_pair_sums() {
        let bank = gabor_bank(&GaborParams::default()).unwrap();
        for k in &bank.kernels {
            assert!(k.iter().all(|v| (0.0..=1.0).contains(v)));
            assert_eq!(k.iter().cloned().fold(0.0, f64::max), 1.0);
            assert!(k.iter().sum::<f64>() > 0.0);
        }
        let sum = |i: usize| bank.kernels[i].iter().sum::<f64>();
        assert!((sum(0) - sum(2)).abs() < 1e-12);
        assert!((sum(1) - sum(3)).abs() < 1e-12);
    }

    #[test]
    fn even_size_rejected() {
        let p = GaborParams {
            size: 4,
            ..GaborParams::default()
        };
        assert!(matches!(gabor_bank(&p), Err(Error::Config(_))));
    }
}
