//! Reference-scan phase correction.
//!
//! A blip-off reference scan samples the same central ky line on every echo,
//! so any phase difference between its adjacent center odd and even lines is
//! a pure odd/even error. That difference, taken in hybrid space, is added to
//! the phase of every even line of the imaging scan.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{phase, Domain, KSpaceData, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseSign {
    /// odd − even, added to even lines.
    AsEstimated,
    /// Flips the estimated profile before applying it.
    Negated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefCorrectionConfig {
    /// 1-indexed row number of the even center line.
    pub even_center_row: usize,
    /// 1-indexed row number of the odd center line.
    pub odd_center_row: usize,
    pub sign: PhaseSign,
}

impl RefCorrectionConfig {
    /// Rows M/2 and M/2 + 1, i.e. 32 and 33 for M = 64.
    pub fn centered(n_rows: usize) -> Self {
        Self {
            even_center_row: n_rows / 2,
            odd_center_row: n_rows / 2 + 1,
            sign: PhaseSign::AsEstimated,
        }
    }

    pub fn validate(&self, n_rows: usize) -> Result<()> {
        let (e, o) = (self.even_center_row, self.odd_center_row);
        if e < 1 || o < 1 || e > n_rows || o > n_rows {
            return Err(Error::Config(format!(
                "center rows {e}/{o} outside 1..={n_rows}"
            )));
        }
        if e.abs_diff(o) != 1 {
            return Err(Error::Config(format!(
                "center rows {e}/{o} are not adjacent"
            )));
        }
        if Parity::of_row_number(e) != Parity::Even || Parity::of_row_number(o) != Parity::Odd {
            return Err(Error::Config(format!(
                "row {e} must be even and row {o} odd"
            )));
        }
        Ok(())
    }
}

/// Odd-minus-even phase profile over x from one center line pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePhaseMap {
    pub dphi: Vec<f64>,
    /// (even, odd) 1-indexed rows the profile was taken from.
    pub source_rows: (usize, usize),
}

/// Estimates Δφ(x) = φ_odd(x) − φ_even(x) from a reference scan in hybrid
/// space.
pub fn estimate_parity_phase(
    k_ref: &KSpaceData,
    cfg: &RefCorrectionConfig,
) -> Result<ReferencePhaseMap> {
    k_ref.require_domain(Domain::KxKy)?;
    k_ref.require_reversed()?;
    cfg.validate(k_ref.n_rows())?;
    let hybrid = k_ref.ifft_kx_to_x()?;
    let odd = hybrid.matrix().row(cfg.odd_center_row - 1);
    let even = hybrid.matrix().row(cfg.even_center_row - 1);
    let flip = match cfg.sign {
        PhaseSign::AsEstimated => 1.0,
        PhaseSign::Negated => -1.0,
    };
    let dphi = odd
        .iter()
        .zip(even)
        .map(|(&o, &e)| flip * (phase(o) - phase(e)))
        .collect();
    Ok(ReferencePhaseMap {
        dphi,
        source_rows: (cfg.even_center_row, cfg.odd_center_row),
    })
}

/// Applies the phase profile in hybrid space; returns the hybrid-space data
/// before the final transform back to k-space.
pub fn correct_hybrid(k_formal: &KSpaceData, pm: &ReferencePhaseMap) -> Result<KSpaceData> {
    k_formal.require_domain(Domain::KxKy)?;
    k_formal.require_reversed()?;
    if pm.dphi.len() != k_formal.n_cols() {
        return Err(Error::ShapeMismatch(format!(
            "phase map has {} samples, data has {} columns",
            pm.dphi.len(),
            k_formal.n_cols()
        )));
    }
    let mut split = k_formal.ifft_kx_to_x()?.split_parity();
    for row in &mut split.even.rows {
        for (z, &d) in row.iter_mut().zip(&pm.dphi) {
            *z = Complex64::from_polar(z.norm(), phase(*z) + d);
        }
    }
    split.merge()
}

/// Corrects the imaging scan's even lines with a reference phase map and
/// returns corrected k-space. Odd lines pass through unchanged and even-line
/// magnitudes in hybrid space are preserved per sample.
pub fn apply_ref_correction(k_formal: &KSpaceData, pm: &ReferencePhaseMap) -> Result<KSpaceData> {
    correct_hybrid(k_formal, pm)?.fft_x_to_kx()
}
