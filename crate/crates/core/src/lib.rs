//! Nyquist ghost correction for echo-planar imaging at low field.
//!
//! Three correction stages operate on EPI k-space:
//!
//! * [`reference`]: odd/even phase correction estimated from a blip-off
//!   reference scan.
//! * [`peak_align`]: reference-free alignment of the center odd/even line
//!   peaks by an integer kx shift of the even lines.
//! * [`interp`]: per-line interpolation and resampling along kx to suppress
//!   residual inconsistencies.
//!
//! [`pipeline`] chains them (reference or peak alignment, then optionally
//! interpolation), [`metrics`] scores images by ghost-to-signal and
//! signal-to-noise ratio, and [`simulator`] produces synthetic acquisitions
//! with known odd/even errors.

pub mod error;
pub mod interp;
pub mod io;
pub mod metrics;
pub mod numerics;
pub mod peak_align;
pub mod pipeline;
pub mod reference;
pub mod simulator;

pub use error::{Error, ErrorClass, FormatError, Result};
pub use numerics::{AcquisitionMeta, ComplexMatrix, Domain, KSpaceData, Parity, RealImage};
