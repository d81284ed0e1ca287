//! Reference-free peak alignment.
//!
//! The kx position of the magnitude peak of the center odd and even lines is
//! compared directly in k-space, and every even line is circularly shifted so
//! the two peaks coincide.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{Domain, KSpaceData};
use crate::reference::RefCorrectionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakShiftEstimate {
    /// 0-indexed peak column of the even center line.
    pub p_even: usize,
    /// 0-indexed peak column of the odd center line.
    pub p_odd: usize,
    /// `p_odd − p_even`.
    pub delta_p: i64,
}

/// Argmax of `|row|`, lowest index on ties. `None` for an empty or
/// all-zero row.
pub fn row_peak_index(row: &[Complex64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, z) in row.iter().enumerate() {
        let mag = z.norm();
        match best {
            Some((_, b)) if mag <= b => {}
            _ => best = Some((i, mag)),
        }
    }
    match best {
        Some((i, mag)) if mag > 0.0 => Some(i),
        _ => None,
    }
}

/// Peak positions of the center odd/even lines on raw k-space magnitudes.
pub fn estimate_peak_shift(k: &KSpaceData, cfg: &RefCorrectionConfig) -> Result<PeakShiftEstimate> {
    k.require_domain(Domain::KxKy)?;
    k.require_reversed()?;
    cfg.validate(k.n_rows())?;
    let peak = |row_number: usize| {
        row_peak_index(k.matrix().row(row_number - 1))
            .ok_or(Error::PeakUndefined { row: row_number })
    };
    let p_even = peak(cfg.even_center_row)?;
    let p_odd = peak(cfg.odd_center_row)?;
    Ok(PeakShiftEstimate {
        p_even,
        p_odd,
        delta_p: p_odd as i64 - p_even as i64,
    })
}

/// `out[n] = line[(n − shift) mod N]`.
pub fn circular_shift(line: &mut [Complex64], shift: i64) {
    let n = line.len();
    if n == 0 {
        return;
    }
    let s = shift.rem_euclid(n as i64) as usize;
    line.rotate_right(s);
}

/// Shifts every even line by `delta_p` so a peak at `p_even` lands on
/// `p_odd`. Odd lines are left bit-identical.
pub fn apply_peak_alignment(k: &KSpaceData, est: &PeakShiftEstimate) -> Result<KSpaceData> {
    k.require_domain(Domain::KxKy)?;
    if est.delta_p.unsigned_abs() as usize >= k.n_cols() {
        return Err(Error::Config(format!(
            "peak shift {} not smaller than line length {}",
            est.delta_p,
            k.n_cols()
        )));
    }
    if est.delta_p == 0 {
        return Ok(k.clone());
    }
    let mut split = k.split_parity();
    for row in &mut split.even.rows {
        circular_shift(row, est.delta_p);
    }
    split.merge()
}

/// Estimate and apply in one step.
pub fn correct_peak_alignment(
    k: &KSpaceData,
    cfg: &RefCorrectionConfig,
) -> Result<(KSpaceData, PeakShiftEstimate)> {
    let est = estimate_peak_shift(k, cfg)?;
    Ok((apply_peak_alignment(k, &est)?, est))
}

/// True when the center odd and even peaks coincide (or either is
/// undefined).
pub fn center_peaks_coincide(k: &KSpaceData, cfg: &RefCorrectionConfig) -> bool {
    let row = |r: usize| row_peak_index(k.matrix().row(r - 1));
    match (row(cfg.even_center_row), row(cfg.odd_center_row)) {
        (Some(e), Some(o)) => e == o,
        _ => true,
    }
}
