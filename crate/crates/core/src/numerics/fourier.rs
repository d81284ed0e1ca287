//! Centered 1-D DFTs along rows and columns.
//!
//! Every transform is `shift -> (i)DFT -> shift` with DC at index `len / 2`.
//! The inverse carries the `1/len` factor; the forward is unnormalized.
//! For even lengths the shift is its own inverse, so one rotation serves as
//! both `fftshift` and `ifftshift`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::matrix::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

struct CenteredFft {
    fft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    scale: f64,
}

impl CenteredFft {
    fn new(len: usize, dir: Direction) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft(
            len,
            match dir {
                Direction::Forward => FftDirection::Forward,
                Direction::Inverse => FftDirection::Inverse,
            },
        );
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let scale = match dir {
            Direction::Forward => 1.0,
            Direction::Inverse => 1.0 / len as f64,
        };
        Self {
            fft,
            scratch,
            scale,
        }
    }

    fn process(&mut self, line: &mut [Complex64]) {
        let half = line.len() / 2;
        line.rotate_left(half);
        self.fft.process_with_scratch(line, &mut self.scratch);
        line.rotate_left(half);
        if self.scale != 1.0 {
            for z in line.iter_mut() {
                *z *= self.scale;
            }
        }
    }
}

/// Transforms a single even-length line in place.
pub fn centered_dft_line(line: &mut [Complex64], inverse: bool) {
    let dir = if inverse {
        Direction::Inverse
    } else {
        Direction::Forward
    };
    CenteredFft::new(line.len(), dir).process(line);
}

pub(crate) fn transform_rows(m: &mut ComplexMatrix, dir: Direction) {
    let n_rows = m.n_rows();
    let mut fft = CenteredFft::new(m.n_cols(), dir);
    for r in 0..n_rows {
        fft.process(m.row_mut(r));
    }
}

pub(crate) fn transform_columns(m: &mut ComplexMatrix, dir: Direction) {
    let (n_cols, n_rows) = (m.n_cols(), m.n_rows());
    let mut fft = CenteredFft::new(n_rows, dir);
    let mut col = vec![Complex64::new(0.0, 0.0); n_rows];
    let data = m.data_mut();
    for c in 0..n_cols {
        for r in 0..n_rows {
            col[r] = data[r * n_cols + c];
        }
        fft.process(&mut col);
        for r in 0..n_rows {
            data[r * n_cols + c] = col[r];
        }
    }
}
