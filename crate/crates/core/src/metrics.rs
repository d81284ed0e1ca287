//! Ghost-to-signal ratio, signal-to-noise ratio, residual-artifact
//! percentage and line magnitude profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, RealImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseCorner {
    Tl,
    Tr,
    Bl,
    Br,
}

/// Signal ROI centered in the image, its ghost copy half a field of view
/// away along y, and a corner noise ROI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiSpec {
    /// (row, col) of the signal ROI center.
    pub signal_center: (usize, usize),
    /// (height, width).
    pub signal_size: (usize, usize),
    pub noise_corner: NoiseCorner,
    pub noise_size: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rect {
    row0: usize,
    col0: usize,
    h: usize,
    w: usize,
}

impl RoiSpec {
    /// Centered signal ROI of a quarter of each dimension and an eighth-size
    /// top-left noise ROI: 16×16 and 8×8 for a 64×64 image.
    pub fn default_for(n_cols: usize, n_rows: usize) -> Self {
        Self {
            signal_center: (n_rows / 2, n_cols / 2),
            signal_size: ((n_rows / 4).max(1), (n_cols / 4).max(1)),
            noise_corner: NoiseCorner::Tl,
            noise_size: ((n_rows / 8).max(1), (n_cols / 8).max(1)),
        }
    }

    fn signal_rect(&self, n_cols: usize, n_rows: usize) -> Result<Rect> {
        let (h, w) = self.signal_size;
        let (cr, cc) = self.signal_center;
        if h == 0 || w == 0 || cr < h / 2 || cc < w / 2 {
            return Err(Error::Config(format!(
                "signal ROI {self:?} is empty or leaves the image"
            )));
        }
        let r = Rect {
            row0: cr - h / 2,
            col0: cc - w / 2,
            h,
            w,
        };
        if r.row0 + h > n_rows || r.col0 + w > n_cols {
            return Err(Error::Config(format!(
                "signal ROI {self:?} leaves the image"
            )));
        }
        Ok(r)
    }

    fn noise_rect(&self, n_cols: usize, n_rows: usize) -> Result<Rect> {
        let (h, w) = self.noise_size;
        if h == 0 || w == 0 || h > n_rows || w > n_cols {
            return Err(Error::Config(format!("noise ROI {self:?} does not fit")));
        }
        let (row0, col0) = match self.noise_corner {
            NoiseCorner::Tl => (0, 0),
            NoiseCorner::Tr => (0, n_cols - w),
            NoiseCorner::Bl => (n_rows - h, 0),
            NoiseCorner::Br => (n_rows - h, n_cols - w),
        };
        Ok(Rect { row0, col0, h, w })
    }

    /// Checks that both ROIs fit a `n_cols × n_rows` image and that the
    /// signal ROI does not overlap its half-FOV ghost copy.
    pub fn validate(&self, n_cols: usize, n_rows: usize) -> Result<()> {
        if !n_rows.is_multiple_of(2) {
            return Err(Error::Config(format!("image has odd row count {n_rows}")));
        }
        let s = self.signal_rect(n_cols, n_rows)?;
        if s.h > n_rows / 2 {
            return Err(Error::Config(format!(
                "signal ROI height {} overlaps its ghost at M/2 = {}",
                s.h,
                n_rows / 2
            )));
        }
        self.noise_rect(n_cols, n_rows)?;
        Ok(())
    }
}

fn mean_over(img: &RealImage, r: Rect, row_shift: usize) -> f64 {
    let mut sum = 0.0;
    for dr in 0..r.h {
        let row = (r.row0 + dr + row_shift) % img.n_rows();
        sum += img.row(row)[r.col0..r.col0 + r.w].iter().sum::<f64>();
    }
    sum / (r.h * r.w) as f64
}

/// Mean magnitude of the signal ROI shifted circularly by M/2 along y,
/// divided by the mean magnitude of the signal ROI.
pub fn ghost_to_signal_ratio(img: &RealImage, roi: &RoiSpec) -> Result<f64> {
    roi.validate(img.n_cols(), img.n_rows())?;
    let s = roi.signal_rect(img.n_cols(), img.n_rows())?;
    let signal = mean_over(img, s, 0);
    if signal == 0.0 {
        return Err(Error::UndefinedMetric("signal ROI mean is zero"));
    }
    Ok(mean_over(img, s, img.n_rows() / 2) / signal)
}

/// Mean magnitude of the signal ROI divided by the mean of the corner noise
/// ROI. A noise-free background gives `f64::INFINITY`.
pub fn signal_to_noise_ratio(img: &RealImage, roi: &RoiSpec) -> Result<f64> {
    roi.validate(img.n_cols(), img.n_rows())?;
    let signal = mean_over(img, roi.signal_rect(img.n_cols(), img.n_rows())?, 0);
    let noise = mean_over(img, roi.noise_rect(img.n_cols(), img.n_rows())?, 0);
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(signal / noise)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub gsr: f64,
    pub snr: f64,
    pub roi: RoiSpec,
    pub residual_percent: Option<f64>,
}

impl QualityReport {
    pub fn measure(img: &RealImage, roi: &RoiSpec) -> Result<Self> {
        Ok(Self {
            gsr: ghost_to_signal_ratio(img, roi)?,
            snr: signal_to_noise_ratio(img, roi)?,
            roi: *roi,
            residual_percent: None,
        })
    }

    /// The noise ROI had zero mean, so `snr` is the infinite sentinel.
    pub fn noise_free(&self) -> bool {
        self.snr.is_infinite()
    }

    /// Attaches the residual percentage relative to `baseline`.
    pub fn against(mut self, baseline: &QualityReport) -> Result<Self> {
        self.residual_percent = Some(residual_artifact_percent(self, baseline)?);
        Ok(self)
    }
}

/// 100 · corrected GSR / original GSR.
pub fn residual_artifact_percent(
    corrected: QualityReport,
    original: &QualityReport,
) -> Result<f64> {
    if corrected.roi != original.roi {
        return Err(Error::Config(
            "reports were measured with different ROIs".into(),
        ));
    }
    residual_percent_of(corrected.gsr, original.gsr)
}

pub fn residual_percent_of(corrected_gsr: f64, original_gsr: f64) -> Result<f64> {
    if original_gsr == 0.0 {
        return Err(Error::UndefinedMetric("baseline GSR is zero"));
    }
    Ok(100.0 * corrected_gsr / original_gsr)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileAxis {
    /// One profile per row, running along columns.
    Row,
    /// One profile per column, running along rows.
    Col,
}

pub fn magnitude_profiles(m: &ComplexMatrix, axis: ProfileAxis) -> Vec<Vec<f64>> {
    match axis {
        ProfileAxis::Row => (0..m.n_rows())
            .map(|r| m.row(r).iter().map(|z| z.norm()).collect())
            .collect(),
        ProfileAxis::Col => (0..m.n_cols())
            .map(|c| m.column(c).iter().map(|z| z.norm()).collect())
            .collect(),
    }
}

/// Σ |v[i+1] − v[i]|.
pub fn total_variation(line: &[f64]) -> f64 {
    line.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

pub fn profile_total_variation(m: &ComplexMatrix, axis: ProfileAxis) -> Vec<f64> {
    magnitude_profiles(m, axis)
        .iter()
        .map(|p| total_variation(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn uniform(v: f64) -> RealImage {
        RealImage::from_fn(64, 64, |_, _| v).unwrap()
    }

    #[test]
    fn default_roi_for_64() {
        let roi = RoiSpec::default_for(64, 64);
        assert_eq!(roi.signal_center, (32, 32));
        assert_eq!(roi.signal_size, (16, 16));
        assert_eq!(roi.noise_size, (8, 8));
        roi.validate(64, 64).unwrap();
    }

    #[test]
    fn uniform_image() {
        let roi = RoiSpec::default_for(64, 64);
        assert_eq!(ghost_to_signal_ratio(&uniform(3.0), &roi).unwrap(), 1.0);
        assert_eq!(signal_to_noise_ratio(&uniform(3.0), &roi).unwrap(), 1.0);
    }

    #[test]
    fn signal_only_image() {
        let roi = RoiSpec::default_for(64, 64);
        let img = RealImage::from_fn(64, 64, |r, c| {
            if (24..40).contains(&r) && (24..40).contains(&c) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(ghost_to_signal_ratio(&img, &roi).unwrap(), 0.0);
        assert!(signal_to_noise_ratio(&img, &roi).unwrap().is_infinite());
        assert!(QualityReport::measure(&img, &roi).unwrap().noise_free());
    }

    #[test]
    fn zero_signal_is_undefined() {
        let roi = RoiSpec::default_for(64, 64);
        assert!(matches!(
            ghost_to_signal_ratio(&uniform(0.0), &roi),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn snr_ratio_of_means() {
        let roi = RoiSpec::default_for(64, 64);
        let img =
            RealImage::from_fn(64, 64, |r, c| if r < 8 && c < 8 { 1.0 } else { 43.74 }).unwrap();
        assert!((signal_to_noise_ratio(&img, &roi).unwrap() - 43.74).abs() < 1e-12);
    }

    #[test]
    fn roi_validation() {
        let mut roi = RoiSpec::default_for(64, 64);
        roi.signal_size = (40, 16);
        assert!(roi.validate(64, 64).is_err());
        let mut roi = RoiSpec::default_for(64, 64);
        roi.signal_center = (60, 32);
        assert!(roi.validate(64, 64).is_err());
        let mut roi = RoiSpec::default_for(64, 64);
        roi.noise_size = (65, 8);
        assert!(roi.validate(64, 64).is_err());
    }

    #[test]
    fn noise_corners() {
        let img = RealImage::from_fn(64, 64, |r, c| (r * 64 + c) as f64 + 1.0).unwrap();
        for corner in [
            NoiseCorner::Tl,
            NoiseCorner::Tr,
            NoiseCorner::Bl,
            NoiseCorner::Br,
        ] {
            let roi = RoiSpec {
                noise_corner: corner,
                ..RoiSpec::default_for(64, 64)
            };
            let r = roi.noise_rect(64, 64).unwrap();
            let (r0, c0) = match corner {
                NoiseCorner::Tl => (0, 0),
                NoiseCorner::Tr => (0, 56),
                NoiseCorner::Bl => (56, 0),
                NoiseCorner::Br => (56, 56),
            };
            assert_eq!((r.row0, r.col0), (r0, c0));
            assert!(signal_to_noise_ratio(&img, &roi).unwrap() > 0.0);
        }
    }

    #[test]
    fn residual_percent_table_values() {
        assert!((residual_percent_of(0.0172, 0.1710).unwrap() - 10.0585).abs() < 1e-4);
        assert_eq!(residual_percent_of(0.2, 0.2).unwrap(), 100.0);
        assert!(residual_percent_of(0.1, 0.0).is_err());
        let roi = RoiSpec::default_for(64, 64);
        let a = QualityReport {
            gsr: 0.05,
            snr: 10.0,
            roi,
            residual_percent: None,
        };
        let b = QualityReport { gsr: 0.1, ..a };
        assert_eq!(a.against(&b).unwrap().residual_percent, Some(50.0));
        let other = QualityReport {
            roi: RoiSpec {
                noise_corner: NoiseCorner::Br,
                ..roi
            },
            ..b
        };
        assert!(residual_artifact_percent(a, &other).is_err());
    }

    #[test]
    fn profiles_of_small_matrix() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(4.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(
            magnitude_profiles(&m, ProfileAxis::Row),
            vec![vec![1.0, 2.0], vec![3.0, 4.0]]
        );
        assert_eq!(
            magnitude_profiles(&m, ProfileAxis::Col),
            vec![vec![1.0, 3.0], vec![2.0, 4.0]]
        );
        assert_eq!(total_variation(&[2.0; 5]), 0.0);
        assert_eq!(total_variation(&[0.0, 1.0, -1.0]), 3.0);
    }
}
