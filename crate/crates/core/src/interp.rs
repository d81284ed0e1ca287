//! Interpolation and resampling along kx for residual ghost suppression.
//!
//! Each ky line is linearly upsampled by an integer factor `f` and then
//! brought back to its original length. Taking every `f`-th sample
//! ([`ResampleMode::Literal`]) lands exactly on the original samples, so that
//! mode is the identity. [`ResampleMode::CenteredAverage`] instead averages the
//! `f` upsampled samples centered on each original position, which acts as a
//! short nonnegative smoothing kernel of roughly `[1/8, 3/4, 1/8]` along kx.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, Domain, KSpaceData};

pub const DEFAULT_FACTOR: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResampleMode {
    Literal,
    CenteredAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrConfig {
    /// Interpolation factor f = N_interp / N.
    pub interp_factor: usize,
    pub mode: ResampleMode,
    pub passes: usize,
}

impl Default for IrConfig {
    fn default() -> Self {
        Self {
            interp_factor: DEFAULT_FACTOR,
            mode: ResampleMode::CenteredAverage,
            passes: 1,
        }
    }
}

impl IrConfig {
    /// Config from a target point count, which must be a positive multiple
    /// of the line length.
    pub fn from_interp_points(interp_points: usize, n_cols: usize) -> Result<Self> {
        if n_cols == 0 || interp_points == 0 || !interp_points.is_multiple_of(n_cols) {
            return Err(Error::Config(format!(
                "{interp_points} interpolation points is not a positive multiple of {n_cols}"
            )));
        }
        Ok(Self {
            interp_factor: interp_points / n_cols,
            ..Self::default()
        })
    }

    pub fn interp_points(&self, n_cols: usize) -> usize {
        self.interp_factor * n_cols
    }

    pub fn validate(&self) -> Result<()> {
        if self.interp_factor == 0 {
            return Err(Error::Config("interpolation factor must be >= 1".into()));
        }
        if self.passes == 0 {
            return Err(Error::Config("IR passes must be >= 1".into()));
        }
        Ok(())
    }
}

/// Linear interpolation to `f · N` points; the neighbor past the last sample
/// is clamped to the last sample.
pub fn linear_upsample_line(v: &[Complex64], factor: usize) -> Vec<Complex64> {
    assert!(factor >= 1, "interpolation factor must be >= 1");
    let n = v.len();
    let mut out = Vec::with_capacity(n * factor);
    for i in 0..n {
        let next = v[(i + 1).min(n - 1)];
        out.push(v[i]);
        for r in 1..factor {
            let alpha = r as f64 / factor as f64;
            out.push(v[i] * (1.0 - alpha) + next * alpha);
        }
    }
    out
}

/// Decimates an upsampled line of length `f · N` back to `N` samples.
pub fn resample_line(v: &[Complex64], factor: usize, mode: ResampleMode) -> Result<Vec<Complex64>> {
    if factor == 0 || !v.len().is_multiple_of(factor) {
        return Err(Error::Config(format!(
            "line length {} is not divisible by factor {factor}",
            v.len()
        )));
    }
    let n = v.len() / factor;
    Ok(match mode {
        ResampleMode::Literal => (0..n).map(|i| v[i * factor]).collect(),
        ResampleMode::CenteredAverage => {
            let last = v.len() as i64 - 1;
            let lo_off = (factor / 2) as i64;
            let hi_off = factor.div_ceil(2) as i64 - 1;
            let scale = 1.0 / factor as f64;
            (0..n)
                .map(|i| {
                    let center = (i * factor) as i64;
                    let sum: Complex64 = (center - lo_off..=center + hi_off)
                        .map(|p| v[p.clamp(0, last) as usize])
                        .sum();
                    sum * scale
                })
                .collect()
        }
    })
}

/// One or more upsample/resample passes on a single line.
pub fn ir_line(line: &[Complex64], cfg: &IrConfig) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    let mut cur = line.to_vec();
    for _ in 0..cfg.passes {
        let up = linear_upsample_line(&cur, cfg.interp_factor);
        cur = resample_line(&up, cfg.interp_factor, cfg.mode)?;
    }
    Ok(cur)
}

/// Applies interpolation and resampling to every ky line of k-space data.
pub fn apply_ir(k: &KSpaceData, cfg: &IrConfig) -> Result<KSpaceData> {
    k.require_domain(Domain::KxKy)?;
    cfg.validate()?;
    let mut data = Vec::with_capacity(k.n_cols() * k.n_rows());
    for m in 0..k.n_rows() {
        data.extend(ir_line(k.matrix().row(m), cfg)?);
    }
    let matrix = ComplexMatrix::new(k.n_cols(), k.n_rows(), data)?;
    Ok(k.with_matrix(matrix))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn upsample_by_hand() {
        let up = linear_upsample_line(&re(&[0.0, 1.0]), 2);
        assert_eq!(up, re(&[0.0, 0.5, 1.0, 1.0]));
    }

    #[test]
    fn factor_one_is_identity() {
        let v = re(&[1.0, -2.0, 3.5]);
        assert_eq!(linear_upsample_line(&v, 1), v);
        for mode in [ResampleMode::Literal, ResampleMode::CenteredAverage] {
            assert_eq!(resample_line(&v, 1, mode).unwrap(), v);
        }
    }

    #[test]
    fn constants_survive() {
        let v = vec![Complex64::new(2.5, -1.0); 8];
        for f in [1, 2, 3, 8, 64] {
            let up = linear_upsample_line(&v, f);
            assert!(up.iter().all(|&z| z == v[0]));
            for mode in [ResampleMode::Literal, ResampleMode::CenteredAverage] {
                let out = resample_line(&up, f, mode).unwrap();
                for z in out {
                    assert!((z - v[0]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn literal_round_trip_is_exact() {
        let v: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        for f in [2, 3, 8, 64] {
            let up = linear_upsample_line(&v, f);
            assert_eq!(resample_line(&up, f, ResampleMode::Literal).unwrap(), v);
        }
    }

    #[test]
    fn indivisible_length_rejected() {
        assert!(resample_line(&re(&[1.0, 2.0, 3.0]), 2, ResampleMode::Literal).is_err());
    }

    /// Brute-force weights: response of the centered average to each unit
    /// impulse, summed directly over the triangle the impulse upsamples to.
    fn brute_weights(f: usize, k: usize, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let lo = (i * f) as i64 - (f / 2) as i64;
                let hi = (i * f) as i64 + f.div_ceil(2) as i64 - 1;
                let mut s = 0.0;
                for p in lo..=hi {
                    let p = p.clamp(0, (n * f - 1) as i64) as f64;
                    // value of the interpolated impulse e_k at upsampled index p
                    let t = p / f as f64 - k as f64;
                    s += (1.0 - t.abs()).max(0.0);
                }
                s / f as f64
            })
            .collect()
    }

    #[test]
    fn centered_average_kernel_on_impulse() {
        let (n, k) = (16, 7);
        for f in [8usize, 64, 256] {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[k] = Complex64::new(1.0, 0.0);
            let out = resample_line(
                &linear_upsample_line(&v, f),
                f,
                ResampleMode::CenteredAverage,
            )
            .unwrap();
            let oracle = brute_weights(f, k, n);
            for (a, b) in out.iter().zip(&oracle) {
                assert!((a.re - b).abs() < 1e-12 && a.im == 0.0);
            }
            // closed form: (f+2)/(8f) on k+1, 3/4 on k, (f-2)/(8f) on k-1
            let ff = f as f64;
            assert!((out[k - 1].re - (ff - 2.0) / (8.0 * ff)).abs() < 1e-12);
            assert!((out[k].re - 0.75).abs() < 1e-12);
            assert!((out[k + 1].re - (ff + 2.0) / (8.0 * ff)).abs() < 1e-12);
            for (w, target) in [
                (out[k - 1].re, 0.125),
                (out[k].re, 0.75),
                (out[k + 1].re, 0.125),
            ] {
                assert!((w - target).abs() <= 1.0 / ff);
            }
            let others: f64 = out
                .iter()
                .enumerate()
                .filter(|(i, _)| i.abs_diff(k) > 1)
                .map(|(_, z)| z.norm())
                .sum();
            assert_eq!(others, 0.0);
        }
    }

    #[test]
    fn config_validation() {
        assert!(IrConfig {
            interp_factor: 0,
            ..IrConfig::default()
        }
        .validate()
        .is_err());
        assert!(IrConfig {
            passes: 0,
            ..IrConfig::default()
        }
        .validate()
        .is_err());
        let cfg = IrConfig::from_interp_points(4096, 64).unwrap();
        assert_eq!(cfg.interp_factor, 64);
        assert_eq!(cfg.interp_points(64), 4096);
        assert!(IrConfig::from_interp_points(100, 64).is_err());
    }

    #[test]
    fn ir_requires_kspace() {
        let k = KSpaceData::reversed(ComplexMatrix::zeros(4, 4).unwrap())
            .ifft_kx_to_x()
            .unwrap();
        assert!(apply_ir(&k, &IrConfig::default()).is_err());
    }
}
