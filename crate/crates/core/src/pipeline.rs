//! Correction pipelines: a preliminary odd/even correction (reference-scan
//! phase or peak alignment) optionally followed by interpolation and
//! resampling, then reconstruction and before/after quality metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{apply_ir, IrConfig};
use crate::metrics::{QualityReport, RoiSpec};
use crate::numerics::{Domain, KSpaceData, Parity, RealImage};
use crate::peak_align::{correct_peak_alignment, PeakShiftEstimate};
use crate::reference::{
    apply_ref_correction, estimate_parity_phase, RefCorrectionConfig, ReferencePhaseMap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    None,
    Ref,
    Pa,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub method: Method,
    pub ir_enabled: bool,
    pub ir: IrConfig,
    /// Center rows; `None` uses rows M/2 and M/2 + 1.
    pub ref_cfg: Option<RefCorrectionConfig>,
    /// `None` uses [`RoiSpec::default_for`].
    pub roi: Option<RoiSpec>,
}

impl PipelineConfig {
    pub fn new(method: Method, ir_enabled: bool) -> Self {
        Self {
            method,
            ir_enabled,
            ir: IrConfig::default(),
            ref_cfg: None,
            roi: None,
        }
    }

    /// Pipeline I: reference-scan correction then IR.
    pub fn reference_ir() -> Self {
        Self::new(Method::Ref, true)
    }

    /// Pipeline II: peak alignment then IR.
    pub fn peak_ir() -> Self {
        Self::new(Method::Pa, true)
    }

    pub fn ref_cfg_for(&self, n_rows: usize) -> RefCorrectionConfig {
        self.ref_cfg
            .unwrap_or_else(|| RefCorrectionConfig::centered(n_rows))
    }

    pub fn roi_for(&self, n_cols: usize, n_rows: usize) -> RoiSpec {
        self.roi
            .unwrap_or_else(|| RoiSpec::default_for(n_cols, n_rows))
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub corrected: KSpaceData,
    pub original_image: RealImage,
    pub corrected_image: RealImage,
    pub original: QualityReport,
    /// Carries `residual_percent` against `original` when that GSR is
    /// nonzero.
    pub corrected_report: QualityReport,
    pub roi: RoiSpec,
    pub peak_shift: Option<PeakShiftEstimate>,
    pub phase_map: Option<ReferencePhaseMap>,
}

fn prepared(k: &KSpaceData) -> Result<KSpaceData> {
    k.require_domain(Domain::KxKy)?;
    if k.reversal_applied() {
        Ok(k.clone())
    } else {
        k.reverse_alternate_rows(Parity::Even)
    }
}

/// Magnitude image of k-space data.
pub fn reconstruct_magnitude(k: &KSpaceData) -> Result<RealImage> {
    Ok(k.reconstruct()?.magnitude())
}

/// Runs the preliminary correction and optional IR on k-space only.
pub fn correct_kspace(
    cfg: &PipelineConfig,
    formal: &KSpaceData,
    reference: Option<&KSpaceData>,
) -> Result<(
    KSpaceData,
    Option<PeakShiftEstimate>,
    Option<ReferencePhaseMap>,
)> {
    let formal = prepared(formal)?;
    let ref_cfg = cfg.ref_cfg_for(formal.n_rows());
    let (mut corrected, shift, map) = match cfg.method {
        Method::None => (formal, None, None),
        Method::Ref => {
            let reference = reference.ok_or_else(|| {
                Error::Config("reference-scan correction needs a reference scan".into())
            })?;
            let reference = prepared(reference)?;
            if reference.n_cols() != formal.n_cols() || reference.n_rows() != formal.n_rows() {
                return Err(Error::ShapeMismatch(format!(
                    "reference {}x{} vs imaging {}x{}",
                    reference.n_cols(),
                    reference.n_rows(),
                    formal.n_cols(),
                    formal.n_rows()
                )));
            }
            let map = estimate_parity_phase(&reference, &ref_cfg)?;
            (apply_ref_correction(&formal, &map)?, None, Some(map))
        }
        Method::Pa => {
            let (k, est) = correct_peak_alignment(&formal, &ref_cfg)?;
            (k, Some(est), None)
        }
    };
    if cfg.ir_enabled {
        corrected = apply_ir(&corrected, &cfg.ir)?;
    }
    Ok((corrected, shift, map))
}

/// Full pipeline: correction, reconstruction, before/after metrics.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    formal: &KSpaceData,
    reference: Option<&KSpaceData>,
) -> Result<PipelineOutcome> {
    let roi = cfg.roi_for(formal.n_cols(), formal.n_rows());
    roi.validate(formal.n_cols(), formal.n_rows())?;
    let original_image = reconstruct_magnitude(&prepared(formal)?)?;
    let (corrected, peak_shift, phase_map) = correct_kspace(cfg, formal, reference)?;
    let corrected_image = reconstruct_magnitude(&corrected)?;
    let original = QualityReport::measure(&original_image, &roi)?;
    let mut corrected_report = QualityReport::measure(&corrected_image, &roi)?;
    if original.gsr != 0.0 {
        corrected_report = corrected_report.against(&original)?;
    }
    Ok(PipelineOutcome {
        corrected,
        original_image,
        corrected_image,
        original,
        corrected_report,
        roi,
        peak_shift,
        phase_map,
    })
}
