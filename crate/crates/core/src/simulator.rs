//! Synthetic EPI forward model.
//!
//! Phantom images are transformed to k-space and corrupted with the classic
//! odd/even inconsistencies on the even lines: a constant phase, an
//! x-dependent phase polynomial, an integer kx shift, and complex Gaussian
//! noise. A matching blip-off reference scan repeats the center ky line on
//! every echo and receives the same even-line errors.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    forward_2d, AcquisitionMeta, ComplexMatrix, Domain, KSpaceData, Parity, RealImage,
};
use crate::peak_align::circular_shift;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PhantomShape {
    Disk {
        radius: f64,
    },
    /// Two disks side by side, centers `separation` columns apart.
    TwoDisks {
        radius: f64,
        separation: f64,
    },
    /// Axis-aligned rectangle with the given half extents in pixels.
    Rect {
        half_height: f64,
        half_width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub shape: PhantomShape,
    pub n_cols: usize,
    pub n_rows: usize,
    pub intensity: f64,
    /// (row, col) of the shape center.
    pub center: (f64, f64),
}

impl PhantomSpec {
    /// Centered disk in an `n × n` image.
    pub fn disk(n: usize, radius: f64) -> Self {
        Self {
            shape: PhantomShape::Disk { radius },
            n_cols: n,
            n_rows: n,
            intensity: 1.0,
            center: ((n / 2) as f64, (n / 2) as f64),
        }
    }

    pub fn two_disks(n: usize, radius: f64, separation: f64) -> Self {
        Self {
            shape: PhantomShape::TwoDisks { radius, separation },
            ..Self::disk(n, radius)
        }
    }

    pub fn rect(n: usize, half_height: f64, half_width: f64) -> Self {
        Self {
            shape: PhantomShape::Rect {
                half_height,
                half_width,
            },
            ..Self::disk(n, 0.0)
        }
    }

    fn inside(&self, row: usize, col: usize) -> bool {
        let (y, x) = (row as f64 - self.center.0, col as f64 - self.center.1);
        match self.shape {
            PhantomShape::Disk { radius } => y * y + x * x <= radius * radius,
            PhantomShape::TwoDisks { radius, separation } => {
                let h = separation / 2.0;
                let r2 = radius * radius;
                y * y + (x - h) * (x - h) <= r2 || y * y + (x + h) * (x + h) <= r2
            }
            PhantomShape::Rect {
                half_height,
                half_width,
            } => y.abs() <= half_height && x.abs() <= half_width,
        }
    }

    /// Boolean support mask, row-major.
    pub fn support(&self) -> Vec<bool> {
        let mut mask = Vec::with_capacity(self.n_cols * self.n_rows);
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                mask.push(self.inside(r, c));
            }
        }
        mask
    }

    /// Support must be nonempty, lie inside the image, and occupy fewer than
    /// M/2 consecutive rows of the central band so a half-FOV ghost never
    /// lands on the object.
    pub fn validate(&self) -> Result<()> {
        crate::numerics::ComplexMatrix::zeros(self.n_cols, self.n_rows)?;
        if !(self.intensity.is_finite() && self.intensity > 0.0) {
            return Err(Error::Config("phantom intensity must be positive".into()));
        }
        let size_ok = match self.shape {
            PhantomShape::Disk { radius } => radius >= 0.0,
            PhantomShape::TwoDisks { radius, separation } => radius >= 0.0 && separation >= 0.0,
            PhantomShape::Rect {
                half_height,
                half_width,
            } => half_height >= 0.0 && half_width >= 0.0,
        };
        if !size_ok {
            return Err(Error::Config("phantom extents must be nonnegative".into()));
        }
        let mask = self.support();
        let rows: Vec<usize> = (0..self.n_rows)
            .filter(|&r| {
                mask[r * self.n_cols..(r + 1) * self.n_cols]
                    .iter()
                    .any(|&b| b)
            })
            .collect();
        let (Some(&first), Some(&last)) = (rows.first(), rows.last()) else {
            return Err(Error::Config("phantom support is empty".into()));
        };
        let band = (self.n_rows / 4, self.n_rows - self.n_rows / 4);
        if first < band.0 || last >= band.1 {
            return Err(Error::Config(format!(
                "phantom rows {first}..={last} leave the central band {}..{}",
                band.0, band.1
            )));
        }
        // the raster is clipped to the image, so check the continuous extents
        let fits_cols = |lo: f64, hi: f64| lo >= 0.0 && hi <= (self.n_cols - 1) as f64;
        let ok = match self.shape {
            PhantomShape::Disk { radius } => {
                fits_cols(self.center.1 - radius, self.center.1 + radius)
            }
            PhantomShape::TwoDisks { radius, separation } => fits_cols(
                self.center.1 - separation / 2.0 - radius,
                self.center.1 + separation / 2.0 + radius,
            ),
            PhantomShape::Rect { half_width, .. } => {
                fits_cols(self.center.1 - half_width, self.center.1 + half_width)
            }
        };
        if !ok {
            return Err(Error::Config(
                "phantom leaves the image horizontally".into(),
            ));
        }
        Ok(())
    }
}

/// Rasterizes the phantom: `intensity` inside the support, zero elsewhere.
pub fn make_phantom(spec: &PhantomSpec) -> Result<RealImage> {
    spec.validate()?;
    let mask = spec.support();
    RealImage::new(
        spec.n_cols,
        spec.n_rows,
        mask.into_iter()
            .map(|b| if b { spec.intensity } else { 0.0 })
            .collect(),
    )
}

/// Odd/even inconsistencies injected into the even lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    /// Constant phase θ in radians.
    pub const_phase_even: f64,
    /// Polynomial coefficients `c0 + c1·u + c2·u² + …` in `u = 2x/N − 1`.
    pub xphase_poly_even: Vec<f64>,
    /// Circular kx shift δ in samples (`out[n] = in[n − δ]`).
    pub peak_shift_even: i64,
    /// Complex Gaussian noise std per sample, relative to the k-space peak
    /// magnitude; each component gets `σ/√2`.
    pub noise_sigma: f64,
    /// Independent noise realizations averaged per scan.
    pub averages: u32,
    pub seed: u64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self {
            const_phase_even: 0.0,
            xphase_poly_even: Vec::new(),
            peak_shift_even: 0,
            noise_sigma: 0.0,
            averages: 1,
            seed: 0,
        }
    }
}

impl ErrorModel {
    pub fn phase(theta: f64) -> Self {
        Self {
            const_phase_even: theta,
            ..Self::default()
        }
    }

    pub fn shift(delta: i64) -> Self {
        Self {
            peak_shift_even: delta,
            ..Self::default()
        }
    }

    pub fn validate(&self, n_cols: usize) -> Result<()> {
        if self.peak_shift_even.unsigned_abs() as usize * 4 >= n_cols {
            return Err(Error::Config(format!(
                "|shift| = {} must be below N/4 = {}",
                self.peak_shift_even.unsigned_abs(),
                n_cols / 4
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config("noise sigma must be finite and >= 0".into()));
        }
        if self.averages == 0 {
            return Err(Error::Config("averages must be >= 1".into()));
        }
        if !self.const_phase_even.is_finite()
            || self.xphase_poly_even.iter().any(|c| !c.is_finite())
        {
            return Err(Error::Config("phase error terms must be finite".into()));
        }
        Ok(())
    }

    fn has_phase(&self) -> bool {
        self.const_phase_even != 0.0 || self.xphase_poly_even.iter().any(|&c| c != 0.0)
    }

    /// Total even-line phase error at column `x` of an `n`-sample line.
    pub fn phase_at(&self, x: usize, n: usize) -> f64 {
        let u = 2.0 * x as f64 / n as f64 - 1.0;
        let poly = self
            .xphase_poly_even
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * u + c);
        self.const_phase_even + poly
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    /// Imaging scan with errors, readout reversal already applied.
    pub k_formal: KSpaceData,
    /// Blip-off reference scan with the same even-line errors.
    pub k_ref: KSpaceData,
    pub ground_truth_image: RealImage,
    pub ground_truth_kspace: KSpaceData,
}

fn corrupt_even_lines(k: &KSpaceData, err: &ErrorModel) -> Result<KSpaceData> {
    let mut out = k.clone();
    if err.has_phase() {
        let mut split = out.ifft_kx_to_x()?.split_parity();
        let n = split.n_cols;
        let ramp: Vec<Complex64> = (0..n)
            .map(|x| Complex64::from_polar(1.0, err.phase_at(x, n)))
            .collect();
        for row in &mut split.even.rows {
            for (z, r) in row.iter_mut().zip(&ramp) {
                *z *= r;
            }
        }
        out = split.merge()?.fft_x_to_kx()?;
    }
    if err.peak_shift_even != 0 {
        let mut split = out.split_parity();
        for row in &mut split.even.rows {
            circular_shift(row, err.peak_shift_even);
        }
        out = split.merge()?;
    }
    Ok(out)
}

fn add_noise(k: &KSpaceData, std: f64, averages: u32, rng: &mut ChaCha8Rng) -> Result<KSpaceData> {
    if std == 0.0 {
        return Ok(k.clone());
    }
    let normal = Normal::new(0.0, std / std::f64::consts::SQRT_2)
        .map_err(|e| Error::Config(format!("noise distribution: {e}")))?;
    let scale = 1.0 / averages as f64;
    let mut matrix = k.matrix().clone();
    for z in matrix.data_mut() {
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..averages {
            acc += Complex64::new(normal.sample(rng), normal.sample(rng));
        }
        *z += acc * scale;
    }
    matrix.ensure_finite()?;
    Ok(k.with_matrix(matrix))
}

/// Runs the forward model on a phantom image.
pub fn simulate_epi(img: &RealImage, err: &ErrorModel) -> Result<SimOutput> {
    let (n_cols, n_rows) = (img.n_cols(), img.n_rows());
    err.validate(n_cols)?;
    let meta = AcquisitionMeta {
        averages: err.averages,
        ..AcquisitionMeta::default()
    };
    let truth = KSpaceData::new(forward_2d(img)?, Domain::KxKy, true, meta);

    let center = truth.matrix().row(n_rows / 2).to_vec();
    let reference = truth.with_matrix(ComplexMatrix::from_fn(n_cols, n_rows, |_, n| center[n])?);

    let k_formal = corrupt_even_lines(&truth, err)?;
    let k_ref = corrupt_even_lines(&reference, err)?;

    let peak = truth
        .matrix()
        .data()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let std = err.noise_sigma * peak;
    let mut rng = ChaCha8Rng::seed_from_u64(err.seed);
    let k_formal = add_noise(&k_formal, std, err.averages, &mut rng)?;
    let k_ref = add_noise(&k_ref, std, err.averages, &mut rng)?;

    Ok(SimOutput {
        k_formal,
        k_ref,
        ground_truth_image: img.clone(),
        ground_truth_kspace: truth,
    })
}

/// Puts reversed k-space back into acquisition order: even lines flipped
/// along kx and the reversal flag cleared.
pub fn as_acquired(k: &KSpaceData) -> Result<KSpaceData> {
    k.require_domain(Domain::KxKy)?;
    k.require_reversed()?;
    let mut matrix = k.matrix().clone();
    matrix.reverse_rows(Parity::Even);
    Ok(KSpaceData::new(matrix, Domain::KxKy, false, k.meta.clone()))
}

/// Energy inside the phantom support shifted by M/2 along y, as a fraction
/// of total image energy.
pub fn ghost_energy_fraction(img: &RealImage, phantom: &PhantomSpec) -> Result<f64> {
    if img.n_cols() != phantom.n_cols || img.n_rows() != phantom.n_rows {
        return Err(Error::ShapeMismatch(format!(
            "image {}x{} vs phantom {}x{}",
            img.n_cols(),
            img.n_rows(),
            phantom.n_cols,
            phantom.n_rows
        )));
    }
    let total = img.energy();
    if total == 0.0 {
        return Err(Error::UndefinedMetric("image has zero energy"));
    }
    let mask = phantom.support();
    let (n_cols, n_rows) = (img.n_cols(), img.n_rows());
    let mut ghost = 0.0;
    for r in 0..n_rows {
        for c in 0..n_cols {
            if mask[r * n_cols + c] {
                let v = img.get((r + n_rows / 2) % n_rows, c);
                ghost += v * v;
            }
        }
    }
    Ok(ghost / total)
}
