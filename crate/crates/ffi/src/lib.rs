//! C ABI over `epi_ghost`.
//!
//! Objects are opaque handles created by `eg_*` constructors and released
//! with the matching `*_free`. Every fallible call returns an [`EgStatus`];
//! on failure a description is available from [`eg_last_error`] on the same
//! thread. Outputs are written only on success.
//!
//! Complex samples cross the boundary as interleaved `re, im` doubles in
//! row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use num_complex::Complex64;

use epi_ghost::interp::{apply_ir, IrConfig, ResampleMode};
use epi_ghost::io::{read_epik_with_sidecar, write_epik_with_sidecar};
use epi_ghost::metrics::{ghost_to_signal_ratio, signal_to_noise_ratio, NoiseCorner, RoiSpec};
use epi_ghost::pipeline::{correct_kspace, Method, PipelineConfig};
use epi_ghost::simulator::{make_phantom, simulate_epi, ErrorModel, PhantomSpec};
use epi_ghost::{ComplexMatrix, Domain, Error, KSpaceData, RealImage};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgStatus {
    Ok = 0,
    Io = 1,
    Format = 2,
    Config = 3,
    Numeric = 4,
    /// A required pointer argument was null.
    NullPointer = 5,
    /// The caller's buffer is too small.
    BufferTooSmall = 6,
    /// An internal panic was caught at the boundary.
    Panic = 7,
}

/// k-space, hybrid or image-domain samples with their acquisition metadata.
pub struct EgKSpace {
    inner: KSpaceData,
}

/// Real-valued magnitude image.
pub struct EgImage {
    inner: RealImage,
}

/// Signal and noise regions for GSR/SNR. Sizes are (height, width); the
/// noise corner is 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EgRoi {
    pub signal_row: usize,
    pub signal_col: usize,
    pub signal_height: usize,
    pub signal_width: usize,
    pub noise_corner: u8,
    pub noise_height: usize,
    pub noise_width: usize,
}

/// Simulation of a centered disk phantom. `xphase_poly` may be null when
/// `xphase_len` is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EgSimParams {
    pub size: usize,
    pub radius: f64,
    pub phase_even: f64,
    pub xphase_poly: *const f64,
    pub xphase_len: usize,
    pub shift_even: i64,
    pub noise_sigma: f64,
    pub averages: u32,
    pub seed: u64,
}

/// Resampling modes for [`eg_apply_ir`].
pub const EG_IR_LITERAL: u8 = 0;
pub const EG_IR_CENTERED_AVERAGE: u8 = 1;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(bytes).unwrap_or_default());
}

fn fail(status: EgStatus, msg: impl Into<Vec<u8>>) -> EgStatus {
    set_last_error(msg);
    status
}

fn from_error(e: Error) -> EgStatus {
    let status = match e.exit_code() {
        1 => EgStatus::Io,
        2 => EgStatus::Format,
        4 => EgStatus::Numeric,
        _ => EgStatus::Config,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), EgStatus>) -> EgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EgStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(EgStatus::Panic, "internal panic"),
    }
}

fn lib<T>(r: epi_ghost::Result<T>) -> Result<T, EgStatus> {
    r.map_err(from_error)
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, EgStatus> {
    p.as_ref()
        .ok_or_else(|| fail(EgStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, EgStatus> {
    p.as_mut()
        .ok_or_else(|| fail(EgStatus::NullPointer, format!("{name} is null")))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, EgStatus> {
    let s = deref(p, "path")?;
    let c = CStr::from_ptr(s);
    c.to_str()
        .map(PathBuf::from)
        .map_err(|_| fail(EgStatus::Config, "path is not valid UTF-8"))
}

fn boxed_kspace(k: KSpaceData) -> *mut EgKSpace {
    Box::into_raw(Box::new(EgKSpace { inner: k }))
}

fn roi_from(r: &EgRoi) -> Result<RoiSpec, EgStatus> {
    let corner = match r.noise_corner {
        0 => NoiseCorner::Tl,
        1 => NoiseCorner::Tr,
        2 => NoiseCorner::Bl,
        3 => NoiseCorner::Br,
        c => return Err(fail(EgStatus::Config, format!("unknown noise corner {c}"))),
    };
    Ok(RoiSpec {
        signal_center: (r.signal_row, r.signal_col),
        signal_size: (r.signal_height, r.signal_width),
        noise_corner: corner,
        noise_size: (r.noise_height, r.noise_width),
    })
}

fn roi_to(r: &RoiSpec) -> EgRoi {
    EgRoi {
        signal_row: r.signal_center.0,
        signal_col: r.signal_center.1,
        signal_height: r.signal_size.0,
        signal_width: r.signal_size.1,
        noise_corner: match r.noise_corner {
            NoiseCorner::Tl => 0,
            NoiseCorner::Tr => 1,
            NoiseCorner::Bl => 2,
            NoiseCorner::Br => 3,
        },
        noise_height: r.noise_size.0,
        noise_width: r.noise_size.1,
    }
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds k-space from `2 * n_cols * n_rows` interleaved doubles. `domain`
/// is 0 (kx, ky), 1 (x, ky) or 2 (x, y).
///
/// # Safety
/// `data` must point to `2 * n_cols * n_rows` readable doubles and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn eg_kspace_new(
    n_cols: usize,
    n_rows: usize,
    data: *const f64,
    domain: u8,
    reversal_applied: bool,
    out: *mut *mut EgKSpace,
) -> EgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        deref(data, "data")?;
        let domain = Domain::from_tag(domain)
            .ok_or_else(|| fail(EgStatus::Config, format!("unknown domain tag {domain}")))?;
        let len = n_cols
            .checked_mul(n_rows)
            .and_then(|n| n.checked_mul(2))
            .ok_or_else(|| fail(EgStatus::Config, "dimensions overflow"))?;
        let raw = std::slice::from_raw_parts(data, len);
        let samples = raw
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        let matrix = lib(ComplexMatrix::new(n_cols, n_rows, samples))?;
        *out = boxed_kspace(KSpaceData::new(
            matrix,
            domain,
            reversal_applied,
            Default::default(),
        ));
        Ok(())
    })
}

/// # Safety
/// `k` must be null or a handle from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn eg_kspace_free(k: *mut EgKSpace) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn eg_kspace_dims(
    k: *const EgKSpace,
    n_cols: *mut usize,
    n_rows: *mut usize,
) -> EgStatus {
    guard(|| {
        let k = &deref(k, "k")?.inner;
        let (c, r) = (out_ptr(n_cols, "n_cols")?, out_ptr(n_rows, "n_rows")?);
        *c = k.n_cols();
        *r = k.n_rows();
        Ok(())
    })
}

/// Domain tag and reversal flag of `k`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn eg_kspace_info(
    k: *const EgKSpace,
    domain: *mut u8,
    reversal_applied: *mut bool,
) -> EgStatus {
    guard(|| {
        let k = &deref(k, "k")?.inner;
        let (d, r) = (
            out_ptr(domain, "domain")?,
            out_ptr(reversal_applied, "reversal_applied")?,
        );
        *d = k.domain().tag();
        *r = k.reversal_applied();
        Ok(())
    })
}

/// Copies samples as interleaved doubles; `len` counts doubles and must be
/// at least `2 * n_cols * n_rows`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn eg_kspace_copy_data(
    k: *const EgKSpace,
    out: *mut f64,
    len: usize,
) -> EgStatus {
    guard(|| {
        let data = deref(k, "k")?.inner.matrix().data();
        out_ptr(out, "out")?;
        if len < 2 * data.len() {
            return Err(fail(
                EgStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", 2 * data.len()),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(out, 2 * data.len());
        for (d, z) in dst.chunks_exact_mut(2).zip(data) {
            d[0] = z.re;
            d[1] = z.im;
        }
        Ok(())
    })
}

/// Reads an EPIK file and its metadata sidecar, if present.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eg_kspace_read(path: *const c_char, out: *mut *mut EgKSpace) -> EgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let (k, _) = lib(read_epik_with_sidecar(&path_arg(path)?))?;
        *out = boxed_kspace(k);
        Ok(())
    })
}

/// Writes an EPIK file and its metadata sidecar.
///
/// # Safety
/// `k` must be a valid handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn eg_kspace_write(k: *const EgKSpace, path: *const c_char) -> EgStatus {
    guard(|| {
        let k = &deref(k, "k")?.inner;
        lib(write_epik_with_sidecar(k, &path_arg(path)?))
    })
}

/// Simulates imaging, reference and error-free scans. `out_truth` may be
/// null.
///
/// # Safety
/// `params` must be valid, including `xphase_len` readable doubles at
/// `xphase_poly`; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn eg_simulate(
    params: *const EgSimParams,
    out_formal: *mut *mut EgKSpace,
    out_ref: *mut *mut EgKSpace,
    out_truth: *mut *mut EgKSpace,
) -> EgStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let (formal, reference) = (
            out_ptr(out_formal, "out_formal")?,
            out_ptr(out_ref, "out_ref")?,
        );
        let poly = if p.xphase_len == 0 {
            Vec::new()
        } else {
            deref(p.xphase_poly, "xphase_poly")?;
            std::slice::from_raw_parts(p.xphase_poly, p.xphase_len).to_vec()
        };
        let err = ErrorModel {
            const_phase_even: p.phase_even,
            xphase_poly_even: poly,
            peak_shift_even: p.shift_even,
            noise_sigma: p.noise_sigma,
            averages: p.averages,
            seed: p.seed,
        };
        let phantom = lib(make_phantom(&PhantomSpec::disk(p.size, p.radius)))?;
        let sim = lib(simulate_epi(&phantom, &err))?;
        *formal = boxed_kspace(sim.k_formal);
        *reference = boxed_kspace(sim.k_ref);
        if let Some(t) = out_truth.as_mut() {
            *t = boxed_kspace(sim.ground_truth_kspace);
        }
        Ok(())
    })
}

unsafe fn run_method(
    formal: *const EgKSpace,
    reference: *const EgKSpace,
    method: Method,
    out: *mut *mut EgKSpace,
    delta_p: *mut i64,
) -> EgStatus {
    guard(|| {
        let formal = &deref(formal, "formal")?.inner;
        let reference = match method {
            Method::Ref => Some(&deref(reference, "reference")?.inner),
            _ => None,
        };
        let out = out_ptr(out, "out")?;
        let (k, est, _) = lib(correct_kspace(
            &PipelineConfig::new(method, false),
            formal,
            reference,
        ))?;
        if let (Some(d), Some(e)) = (delta_p.as_mut(), est) {
            *d = e.delta_p;
        }
        *out = boxed_kspace(k);
        Ok(())
    })
}

/// Reference-scan phase correction of the even lines.
///
/// # Safety
/// Handles must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eg_correct_ref(
    formal: *const EgKSpace,
    reference: *const EgKSpace,
    out: *mut *mut EgKSpace,
) -> EgStatus {
    run_method(formal, reference, Method::Ref, out, ptr::null_mut())
}

/// Peak-alignment correction. `delta_p` (may be null) receives the applied
/// even-line shift.
///
/// # Safety
/// `formal` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eg_correct_pa(
    formal: *const EgKSpace,
    out: *mut *mut EgKSpace,
    delta_p: *mut i64,
) -> EgStatus {
    run_method(formal, ptr::null(), Method::Pa, out, delta_p)
}

/// Interpolation and resampling along kx. `mode` is [`EG_IR_LITERAL`] or
/// [`EG_IR_CENTERED_AVERAGE`].
///
/// # Safety
/// `k` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eg_apply_ir(
    k: *const EgKSpace,
    interp_factor: usize,
    mode: u8,
    passes: usize,
    out: *mut *mut EgKSpace,
) -> EgStatus {
    guard(|| {
        let k = &deref(k, "k")?.inner;
        let out = out_ptr(out, "out")?;
        let mode = match mode {
            EG_IR_LITERAL => ResampleMode::Literal,
            EG_IR_CENTERED_AVERAGE => ResampleMode::CenteredAverage,
            m => return Err(fail(EgStatus::Config, format!("unknown IR mode {m}"))),
        };
        let cfg = IrConfig {
            interp_factor,
            mode,
            passes,
        };
        *out = boxed_kspace(lib(apply_ir(k, &cfg))?);
        Ok(())
    })
}

/// Magnitude image of `k`, transforming whichever axes are still in
/// frequency space.
///
/// # Safety
/// `k` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eg_reconstruct(k: *const EgKSpace, out: *mut *mut EgImage) -> EgStatus {
    guard(|| {
        let k = &deref(k, "k")?.inner;
        let out = out_ptr(out, "out")?;
        let img = lib(k.to_image())?.magnitude();
        *out = Box::into_raw(Box::new(EgImage { inner: img }));
        Ok(())
    })
}

/// # Safety
/// `img` must be null or a handle from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn eg_image_free(img: *mut EgImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn eg_image_dims(
    img: *const EgImage,
    n_cols: *mut usize,
    n_rows: *mut usize,
) -> EgStatus {
    guard(|| {
        let img = &deref(img, "img")?.inner;
        let (c, r) = (out_ptr(n_cols, "n_cols")?, out_ptr(n_rows, "n_rows")?);
        *c = img.n_cols();
        *r = img.n_rows();
        Ok(())
    })
}

/// Copies pixels row-major; `len` must be at least `n_cols * n_rows`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn eg_image_copy_data(
    img: *const EgImage,
    out: *mut f64,
    len: usize,
) -> EgStatus {
    guard(|| {
        let data = deref(img, "img")?.inner.data();
        out_ptr(out, "out")?;
        if len < data.len() {
            return Err(fail(
                EgStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", data.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out, data.len()).copy_from_slice(data);
        Ok(())
    })
}

/// Default ROIs for an image of the given size.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eg_default_roi(n_cols: usize, n_rows: usize, out: *mut EgRoi) -> EgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let roi = RoiSpec::default_for(n_cols, n_rows);
        lib(roi.validate(n_cols, n_rows))?;
        *out = roi_to(&roi);
        Ok(())
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn eg_gsr(img: *const EgImage, roi: *const EgRoi, out: *mut f64) -> EgStatus {
    guard(|| {
        let img = &deref(img, "img")?.inner;
        let roi = roi_from(deref(roi, "roi")?)?;
        let out = out_ptr(out, "out")?;
        *out = lib(ghost_to_signal_ratio(img, &roi))?;
        Ok(())
    })
}

/// SNR; a noise-free background yields positive infinity.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn eg_snr(img: *const EgImage, roi: *const EgRoi, out: *mut f64) -> EgStatus {
    guard(|| {
        let img = &deref(img, "img")?.inner;
        let roi = roi_from(deref(roi, "roi")?)?;
        let out = out_ptr(out, "out")?;
        *out = lib(signal_to_noise_ratio(img, &roi))?;
        Ok(())
    })
}
