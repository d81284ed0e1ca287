use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::{transform_columns, transform_rows, Direction};
use super::matrix::{ComplexMatrix, Parity, RealImage};
use crate::error::{Error, Result};

/// Which pair of axes the samples are currently indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    /// Raw k-space (kx, ky).
    KxKy,
    /// Hybrid space (x, ky): inverse transformed along the readout only.
    XKy,
    /// Image space (x, y).
    Xy,
}

impl Domain {
    pub fn tag(self) -> u8 {
        match self {
            Domain::KxKy => 0,
            Domain::XKy => 1,
            Domain::Xy => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Domain> {
        match tag {
            0 => Some(Domain::KxKy),
            1 => Some(Domain::XKy),
            2 => Some(Domain::Xy),
            _ => None,
        }
    }
}

/// Scanner-side acquisition parameters carried alongside the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionMeta {
    pub field_strength_t: Option<f64>,
    pub fov_mm: (f64, f64),
    pub slice_thickness_mm: f64,
    pub te_ms: f64,
    pub tr_ms: f64,
    pub averages: u32,
    pub b_value_s_per_mm2: Option<f64>,
}

impl AcquisitionMeta {
    /// 0.5 T prototype EPI protocol.
    pub fn low_field() -> Self {
        Self {
            field_strength_t: Some(0.5),
            fov_mm: (250.0, 250.0),
            slice_thickness_mm: 5.0,
            te_ms: 86.0,
            tr_ms: 3000.0,
            averages: 1,
            b_value_s_per_mm2: None,
        }
    }

    /// 0.068 T prototype EPI protocol.
    pub fn ultra_low_field() -> Self {
        Self {
            field_strength_t: Some(0.068),
            fov_mm: (350.0, 350.0),
            slice_thickness_mm: 20.0,
            te_ms: 171.0,
            tr_ms: 6000.0,
            averages: 4,
            b_value_s_per_mm2: None,
        }
    }

    /// 0.068 T diffusion-weighted protocol at the given b-value.
    pub fn ultra_low_field_dwi(b_value: f64) -> Self {
        Self {
            b_value_s_per_mm2: Some(b_value),
            ..Self::ultra_low_field()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if let Some(b0) = self.field_strength_t {
            positive("field_strength_t", b0)?;
        }
        positive("fov_mm.0", self.fov_mm.0)?;
        positive("fov_mm.1", self.fov_mm.1)?;
        positive("slice_thickness_mm", self.slice_thickness_mm)?;
        positive("te_ms", self.te_ms)?;
        positive("tr_ms", self.tr_ms)?;
        if self.averages == 0 {
            return Err(Error::Config("averages must be positive".into()));
        }
        if let Some(b) = self.b_value_s_per_mm2 {
            positive("b_value_s_per_mm2", b)?;
        }
        Ok(())
    }
}

impl Default for AcquisitionMeta {
    fn default() -> Self {
        Self::low_field()
    }
}

/// Acquisition samples tagged with their domain and readout bookkeeping.
///
/// Row parity is 1-indexed throughout: 0-indexed row `m` is an odd line iff
/// `m` is even, so for M = 64 the center pair is row 32 (even) and row 33
/// (odd).
#[derive(Debug, Clone, PartialEq)]
pub struct KSpaceData {
    matrix: ComplexMatrix,
    domain: Domain,
    reversal_applied: bool,
    pub meta: AcquisitionMeta,
}

impl KSpaceData {
    pub fn new(
        matrix: ComplexMatrix,
        domain: Domain,
        reversal_applied: bool,
        meta: AcquisitionMeta,
    ) -> Self {
        Self {
            matrix,
            domain,
            reversal_applied,
            meta,
        }
    }

    /// Raw k-space as delivered by the scanner, before readout reversal.
    pub fn acquired(matrix: ComplexMatrix) -> Self {
        Self::new(matrix, Domain::KxKy, false, AcquisitionMeta::default())
    }

    /// k-space whose alternate lines already share one readout direction.
    pub fn reversed(matrix: ComplexMatrix) -> Self {
        Self::new(matrix, Domain::KxKy, true, AcquisitionMeta::default())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn reversal_applied(&self) -> bool {
        self.reversal_applied
    }

    pub fn n_cols(&self) -> usize {
        self.matrix.n_cols()
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.n_rows()
    }

    pub(crate) fn with_matrix(&self, matrix: ComplexMatrix) -> Self {
        Self {
            matrix,
            domain: self.domain,
            reversal_applied: self.reversal_applied,
            meta: self.meta.clone(),
        }
    }

    pub(crate) fn require_domain(&self, expected: Domain) -> Result<()> {
        if self.domain != expected {
            return Err(Error::WrongDomain {
                expected,
                found: self.domain,
            });
        }
        Ok(())
    }

    pub(crate) fn require_reversed(&self) -> Result<()> {
        if !self.reversal_applied {
            return Err(Error::ReversalNotApplied);
        }
        Ok(())
    }

    fn transformed(
        &self,
        from: Domain,
        to: Domain,
        along_rows: bool,
        dir: Direction,
    ) -> Result<Self> {
        self.require_domain(from)?;
        let mut matrix = self.matrix.clone();
        if along_rows {
            transform_rows(&mut matrix, dir);
        } else {
            transform_columns(&mut matrix, dir);
        }
        matrix.ensure_finite()?;
        Ok(Self {
            matrix,
            domain: to,
            reversal_applied: self.reversal_applied,
            meta: self.meta.clone(),
        })
    }

    /// Centered inverse DFT along kx: (kx, ky) -> (x, ky).
    pub fn ifft_kx_to_x(&self) -> Result<Self> {
        self.transformed(Domain::KxKy, Domain::XKy, true, Direction::Inverse)
    }

    /// Centered forward DFT along x: (x, ky) -> (kx, ky).
    pub fn fft_x_to_kx(&self) -> Result<Self> {
        self.transformed(Domain::XKy, Domain::KxKy, true, Direction::Forward)
    }

    /// Centered inverse DFT along ky: (x, ky) -> (x, y).
    pub fn ifft_ky_to_y(&self) -> Result<Self> {
        self.transformed(Domain::XKy, Domain::Xy, false, Direction::Inverse)
    }

    /// Centered forward DFT along y: (x, y) -> (x, ky).
    pub fn fft_y_to_ky(&self) -> Result<Self> {
        self.transformed(Domain::Xy, Domain::XKy, false, Direction::Forward)
    }

    /// Full reconstruction from k-space to a complex image.
    pub fn reconstruct(&self) -> Result<Self> {
        self.ifft_kx_to_x()?.ifft_ky_to_y()
    }

    /// Brings hybrid- or image-space data back to image space; k-space is
    /// reconstructed.
    pub fn to_image(&self) -> Result<Self> {
        match self.domain {
            Domain::KxKy => self.reconstruct(),
            Domain::XKy => self.ifft_ky_to_y(),
            Domain::Xy => Ok(self.clone()),
        }
    }

    /// Undoes the alternating readout direction on rows of `which` parity.
    pub fn reverse_alternate_rows(&self, which: Parity) -> Result<Self> {
        self.require_domain(Domain::KxKy)?;
        if self.reversal_applied {
            return Err(Error::ReversalAlreadyApplied);
        }
        let mut matrix = self.matrix.clone();
        matrix.reverse_rows(which);
        Ok(Self {
            matrix,
            domain: self.domain,
            reversal_applied: true,
            meta: self.meta.clone(),
        })
    }

    pub fn split_parity(&self) -> ParitySplit {
        let mut odd = RowSet::default();
        let mut even = RowSet::default();
        for m in 0..self.n_rows() {
            let set = match Parity::of_row(m) {
                Parity::Odd => &mut odd,
                Parity::Even => &mut even,
            };
            set.indices.push(m);
            set.rows.push(self.matrix.row(m).to_vec());
        }
        ParitySplit {
            odd,
            even,
            n_cols: self.n_cols(),
            n_rows: self.n_rows(),
            domain: self.domain,
            reversal_applied: self.reversal_applied,
            meta: self.meta.clone(),
        }
    }

    pub fn magnitude(&self) -> RealImage {
        self.matrix.magnitude()
    }
}

/// Rows of one parity together with their 0-indexed positions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RowSet {
    pub indices: Vec<usize>,
    pub rows: Vec<Vec<Complex64>>,
}

/// Odd and even line subsets plus what is needed to reassemble them.
#[derive(Debug, Clone, PartialEq)]
pub struct ParitySplit {
    pub odd: RowSet,
    pub even: RowSet,
    pub n_cols: usize,
    pub n_rows: usize,
    pub domain: Domain,
    pub reversal_applied: bool,
    pub meta: AcquisitionMeta,
}

impl ParitySplit {
    /// Places every row back at its original index.
    pub fn merge(self) -> Result<KSpaceData> {
        let n_rows = self.n_rows;
        for set in [&self.odd, &self.even] {
            if set.indices.len() != set.rows.len() {
                return Err(Error::BadPartition("index and row counts differ".into()));
            }
        }
        let mut slots: Vec<Option<Vec<Complex64>>> = vec![None; n_rows];
        for set in [self.odd, self.even] {
            for (idx, row) in set.indices.into_iter().zip(set.rows) {
                if idx >= n_rows {
                    return Err(Error::BadPartition(format!(
                        "row index {idx} outside 0..{n_rows}"
                    )));
                }
                if row.len() != self.n_cols {
                    return Err(Error::ShapeMismatch(format!(
                        "row {idx} has {} samples, expected {}",
                        row.len(),
                        self.n_cols
                    )));
                }
                if slots[idx].replace(row).is_some() {
                    return Err(Error::BadPartition(format!("row {idx} appears twice")));
                }
            }
        }
        let mut data = Vec::with_capacity(n_rows * self.n_cols);
        for (idx, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(row) => data.extend(row),
                None => return Err(Error::BadPartition(format!("row {idx} missing"))),
            }
        }
        let matrix = ComplexMatrix::new(self.n_cols, n_rows, data)?;
        Ok(KSpaceData::new(
            matrix,
            self.domain,
            self.reversal_applied,
            self.meta,
        ))
    }
}

/// Centered 2-D forward transform of a real image: (x, y) -> (kx, ky).
pub fn forward_2d(img: &RealImage) -> Result<ComplexMatrix> {
    let k = KSpaceData::new(
        ComplexMatrix::from_real(img)?,
        Domain::Xy,
        true,
        AcquisitionMeta::default(),
    );
    Ok(k.fft_y_to_ky()?.fft_x_to_kx()?.into_matrix())
}
