use std::io;

use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, Serializer};

use crate::error::{Error, FormatError, Result};
use crate::interp::IrConfig;
use crate::metrics::{QualityReport, RoiSpec};
use crate::pipeline::{Method, PipelineConfig, PipelineOutcome};
use crate::reference::PhaseSign;

/// Compact JSON with every float printed at 17 significant digits.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Deterministic JSON: struct field order, fixed float precision, and a
/// trailing newline. Non-finite floats become `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FixedDigits);
    value
        .serialize(&mut ser)
        .map_err(|e| FormatError::Json(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct MeasureJson {
    pub gsr: f64,
    /// `null` when the noise ROI is exactly zero.
    pub snr: Option<f64>,
    pub snr_noise_free: bool,
}

impl From<&QualityReport> for MeasureJson {
    fn from(q: &QualityReport) -> Self {
        Self {
            gsr: q.gsr,
            snr: q.snr.is_finite().then_some(q.snr),
            snr_noise_free: q.noise_free(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct ConfigJson {
    pub method: Method,
    pub ir_enabled: bool,
    pub ir: IrConfig,
    pub even_center_row: usize,
    pub odd_center_row: usize,
    pub sign: PhaseSign,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct PipelineReportJson {
    pub original: MeasureJson,
    pub corrected: MeasureJson,
    pub residual_percent: Option<f64>,
    pub roi: RoiSpec,
    pub config: ConfigJson,
    /// `p_odd − p_even` when peak alignment ran.
    pub peak_shift: Option<i64>,
}

pub fn pipeline_report_json(cfg: &PipelineConfig, out: &PipelineOutcome) -> PipelineReportJson {
    let ref_cfg = cfg.ref_cfg_for(out.corrected.n_rows());
    PipelineReportJson {
        original: (&out.original).into(),
        corrected: (&out.corrected_report).into(),
        residual_percent: out.corrected_report.residual_percent,
        roi: out.roi,
        config: ConfigJson {
            method: cfg.method,
            ir_enabled: cfg.ir_enabled,
            ir: cfg.ir,
            even_center_row: ref_cfg.even_center_row,
            odd_center_row: ref_cfg.odd_center_row,
            sign: ref_cfg.sign,
        },
        peak_shift: out.peak_shift.map(|e| e.delta_p),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct QualityReportJson {
    pub gsr: f64,
    pub snr: Option<f64>,
    pub snr_noise_free: bool,
    pub residual_percent: Option<f64>,
    pub roi: RoiSpec,
}

pub fn quality_report_json(q: &QualityReport) -> QualityReportJson {
    QualityReportJson {
        gsr: q.gsr,
        snr: q.snr.is_finite().then_some(q.snr),
        snr_noise_free: q.noise_free(),
        residual_percent: q.residual_percent,
        roi: q.roi,
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct SweepEntryJson {
    pub interp_factor: usize,
    pub interp_points: usize,
    pub gsr: f64,
    pub snr: Option<f64>,
    pub snr_noise_free: bool,
    pub residual_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct SweepReportJson {
    pub method: Method,
    pub original: MeasureJson,
    /// Preliminary correction alone, without IR.
    pub preliminary: MeasureJson,
    pub entries: Vec<SweepEntryJson>,
    pub roi: RoiSpec,
}

/// Extracts the baseline GSR (and ROI, when recorded) from either a single
/// quality report or a before/after pipeline report, whose `original` entry
/// is used.
pub fn baseline_from_json(text: &str) -> Result<(f64, Option<RoiSpec>)> {
    let bad = |msg: String| Error::Format(FormatError::Json(msg));
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let gsr = v
        .get("gsr")
        .or_else(|| v.get("original").and_then(|o| o.get("gsr")))
        .and_then(|g| g.as_f64())
        .ok_or_else(|| bad("baseline report has no gsr".into()))?;
    let roi = match v.get("roi") {
        Some(r) => Some(serde_json::from_value(r.clone()).map_err(|e| bad(e.to_string()))?),
        None => None,
    };
    Ok((gsr, roi))
}
