use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major grid of complex samples.
///
/// Rows run along ky (or y), columns along kx (or x). Both dimensions are
/// even and at least 2, and every sample is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n_cols: usize,
    n_rows: usize,
    data: Vec<Complex64>,
}

pub(crate) fn check_dims(n_cols: usize, n_rows: usize) -> Result<()> {
    if n_cols < 2 || n_rows < 2 || !n_cols.is_multiple_of(2) || !n_rows.is_multiple_of(2) {
        return Err(Error::InvalidDimensions { n_cols, n_rows });
    }
    Ok(())
}

impl ComplexMatrix {
    pub fn new(n_cols: usize, n_rows: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dims(n_cols, n_rows)?;
        if data.len() != n_cols * n_rows {
            return Err(Error::LengthMismatch {
                n_cols,
                n_rows,
                found: data.len(),
            });
        }
        if let Some(i) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            n_cols,
            n_rows,
            data,
        })
    }

    pub fn zeros(n_cols: usize, n_rows: usize) -> Result<Self> {
        Self::new(
            n_cols,
            n_rows,
            vec![Complex64::new(0.0, 0.0); n_cols * n_rows],
        )
    }

    /// Builds a matrix from a generator called with `(row, col)`.
    pub fn from_fn(
        n_cols: usize,
        n_rows: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(n_cols * n_rows);
        for m in 0..n_rows {
            for n in 0..n_cols {
                data.push(f(m, n));
            }
        }
        Self::new(n_cols, n_rows, data)
    }

    /// Real-valued image lifted to complex samples.
    pub fn from_real(img: &RealImage) -> Result<Self> {
        Self::new(
            img.n_cols(),
            img.n_rows(),
            img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n_cols + col]
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.data[m * self.n_cols..(m + 1) * self.n_cols]
    }

    pub fn column(&self, n: usize) -> Vec<Complex64> {
        (0..self.n_rows).map(|m| self.get(m, n)).collect()
    }

    pub(crate) fn row_mut(&mut self, m: usize) -> &mut [Complex64] {
        &mut self.data[m * self.n_cols..(m + 1) * self.n_cols]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Re-checks the finiteness invariant after in-place arithmetic.
    pub(crate) fn ensure_finite(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            Some(i) => Err(Error::NonFinite(i)),
            None => Ok(()),
        }
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn magnitude(&self) -> RealImage {
        RealImage {
            n_cols: self.n_cols,
            n_rows: self.n_rows,
            data: self.data.iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn phase(&self) -> RealImage {
        RealImage {
            n_cols: self.n_cols,
            n_rows: self.n_rows,
            data: self.data.iter().map(|&z| phase(z)).collect(),
        }
    }

    /// Reverses every row of the given parity in place along the column axis.
    /// No bookkeeping: applying it twice is the identity.
    pub fn reverse_rows(&mut self, parity: Parity) {
        for m in 0..self.n_rows {
            if Parity::of_row(m) == parity {
                self.row_mut(m).reverse();
            }
        }
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ‖self − other‖₂ / ‖other‖₂, or the absolute norm when `other` is zero.
    pub fn relative_l2_error(&self, reference: &ComplexMatrix) -> f64 {
        let num: f64 = self
            .data
            .iter()
            .zip(&reference.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den = reference.energy();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

/// Row parity under 1-indexed numbering: row 1 is odd, row 2 even.
///
/// A 0-indexed row `m` is therefore odd iff `m` is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of_row(m: usize) -> Parity {
        if m.is_multiple_of(2) {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Parity of a 1-indexed row number.
    pub fn of_row_number(row: usize) -> Parity {
        if row % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Four-quadrant phase in (−π, π]; zero for the origin.
pub fn phase(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let p = z.im.atan2(z.re);
    if p == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        p
    }
}

/// Row-major real-valued image, typically a magnitude reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    n_cols: usize,
    n_rows: usize,
    data: Vec<f64>,
}

impl RealImage {
    pub fn new(n_cols: usize, n_rows: usize, data: Vec<f64>) -> Result<Self> {
        if n_cols == 0 || n_rows == 0 {
            return Err(Error::InvalidDimensions { n_cols, n_rows });
        }
        if data.len() != n_cols * n_rows {
            return Err(Error::LengthMismatch {
                n_cols,
                n_rows,
                found: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            n_cols,
            n_rows,
            data,
        })
    }

    pub fn from_fn(
        n_cols: usize,
        n_rows: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(n_cols * n_rows);
        for m in 0..n_rows {
            for n in 0..n_cols {
                data.push(f(m, n));
            }
        }
        Self::new(n_cols, n_rows, data)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols + col]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.data[m * self.n_cols..(m + 1) * self.n_cols]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}
