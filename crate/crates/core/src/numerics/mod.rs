//! Complex grids, centered Fourier transforms between k-space, hybrid space
//! and image space, and odd/even line bookkeeping.

mod fourier;
mod kspace;
mod matrix;

pub use fourier::centered_dft_line;
pub use kspace::{forward_2d, AcquisitionMeta, Domain, KSpaceData, ParitySplit, RowSet};
pub use matrix::{phase, ComplexMatrix, Parity, RealImage};
