use std::ffi::{CStr, CString};
use std::ptr;

use epi_ghost_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(eg_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn params(phase: f64, shift: i64, sigma: f64) -> EgSimParams {
    EgSimParams {
        size: 64,
        radius: 12.0,
        phase_even: phase,
        xphase_poly: ptr::null(),
        xphase_len: 0,
        shift_even: shift,
        noise_sigma: sigma,
        averages: 1,
        seed: 3,
    }
}

struct Sim {
    formal: *mut EgKSpace,
    reference: *mut EgKSpace,
    truth: *mut EgKSpace,
}

impl Sim {
    fn new(p: &EgSimParams) -> Sim {
        let mut s = Sim {
            formal: ptr::null_mut(),
            reference: ptr::null_mut(),
            truth: ptr::null_mut(),
        };
        let st = unsafe { eg_simulate(p, &mut s.formal, &mut s.reference, &mut s.truth) };
        assert_eq!(st, EgStatus::Ok, "{}", last_error());
        s
    }
}

impl Drop for Sim {
    fn drop(&mut self) {
        unsafe {
            eg_kspace_free(self.formal);
            eg_kspace_free(self.reference);
            eg_kspace_free(self.truth);
        }
    }
}

fn data(k: *const EgKSpace) -> Vec<f64> {
    let (mut c, mut r) = (0, 0);
    unsafe {
        assert_eq!(eg_kspace_dims(k, &mut c, &mut r), EgStatus::Ok);
        let mut buf = vec![0.0; 2 * c * r];
        assert_eq!(
            eg_kspace_copy_data(k, buf.as_mut_ptr(), buf.len()),
            EgStatus::Ok
        );
        buf
    }
}

fn gsr_of(k: *const EgKSpace) -> f64 {
    unsafe {
        let mut img = ptr::null_mut();
        assert_eq!(eg_reconstruct(k, &mut img), EgStatus::Ok);
        let mut roi = std::mem::zeroed();
        assert_eq!(eg_default_roi(64, 64, &mut roi), EgStatus::Ok);
        let mut g = f64::NAN;
        assert_eq!(eg_gsr(img, &roi, &mut g), EgStatus::Ok);
        eg_image_free(img);
        g
    }
}

#[test]
fn create_inspect_copy() {
    let samples: Vec<f64> = (0..2 * 4 * 2).map(|i| i as f64 * 0.5).collect();
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(
            eg_kspace_new(4, 2, samples.as_ptr(), 1, true, &mut k),
            EgStatus::Ok
        );
        let (mut domain, mut rev) = (9u8, false);
        assert_eq!(eg_kspace_info(k, &mut domain, &mut rev), EgStatus::Ok);
        assert_eq!((domain, rev), (1, true));
        assert_eq!(data(k), samples);

        let mut small = [0.0; 4];
        assert_eq!(
            eg_kspace_copy_data(k, small.as_mut_ptr(), 4),
            EgStatus::BufferTooSmall
        );
        assert!(last_error().contains("16"));
        eg_kspace_free(k);
    }
}

#[test]
fn invalid_arguments_are_reported() {
    let samples = [0.0; 2 * 3 * 2];
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(
            eg_kspace_new(3, 2, samples.as_ptr(), 0, false, &mut k),
            EgStatus::Config
        );
        assert!(last_error().contains("3x2"));
        assert!(k.is_null());
        assert_eq!(
            eg_kspace_new(2, 2, samples.as_ptr(), 7, false, &mut k),
            EgStatus::Config
        );
        assert_eq!(
            eg_kspace_new(2, 2, ptr::null(), 0, false, &mut k),
            EgStatus::NullPointer
        );
        let nan = [f64::NAN; 8];
        assert_eq!(
            eg_kspace_new(2, 2, nan.as_ptr(), 0, false, &mut k),
            EgStatus::Numeric
        );
        assert_eq!(
            eg_correct_pa(ptr::null(), &mut k, ptr::null_mut()),
            EgStatus::NullPointer
        );
        eg_kspace_free(ptr::null_mut());
        eg_image_free(ptr::null_mut());

        let mut p = params(0.0, 20, 0.0);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            eg_simulate(&p, &mut a, &mut b, ptr::null_mut()),
            EgStatus::Config
        );
        p.shift_even = 0;
        p.xphase_len = 2;
        assert_eq!(
            eg_simulate(&p, &mut a, &mut b, ptr::null_mut()),
            EgStatus::NullPointer
        );
    }
}

#[test]
fn peak_alignment_restores_shifted_data() {
    let sim = Sim::new(&params(0.0, 2, 0.0));
    unsafe {
        let (mut out, mut delta) = (ptr::null_mut(), 0i64);
        assert_eq!(
            eg_correct_pa(sim.formal, &mut out, &mut delta),
            EgStatus::Ok
        );
        assert_eq!(delta, -2);
        assert_eq!(data(out), data(sim.truth));
        eg_kspace_free(out);
    }
}

#[test]
fn reference_correction_removes_phase_ghost() {
    let poly = [0.1, 0.3];
    let mut p = params(0.2, 0, 0.0);
    p.xphase_poly = poly.as_ptr();
    p.xphase_len = poly.len();
    let sim = Sim::new(&p);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            eg_correct_ref(sim.formal, sim.reference, &mut out),
            EgStatus::Ok
        );
        assert!(gsr_of(sim.formal) > 0.05);
        assert!(gsr_of(out) < 1e-8);
        eg_kspace_free(out);
        assert_eq!(
            eg_correct_ref(sim.formal, ptr::null(), &mut out),
            EgStatus::NullPointer
        );
    }
}

#[test]
fn ir_modes() {
    let sim = Sim::new(&params(0.0, 0, 0.05));
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            eg_apply_ir(sim.formal, 8, EG_IR_LITERAL, 1, &mut out),
            EgStatus::Ok
        );
        assert_eq!(data(out), data(sim.formal));
        eg_kspace_free(out);
        assert_eq!(
            eg_apply_ir(sim.formal, 64, EG_IR_CENTERED_AVERAGE, 1, &mut out),
            EgStatus::Ok
        );
        assert_ne!(data(out), data(sim.formal));
        eg_kspace_free(out);
        assert_eq!(
            eg_apply_ir(sim.formal, 0, EG_IR_LITERAL, 1, &mut out),
            EgStatus::Config
        );
        assert_eq!(eg_apply_ir(sim.formal, 2, 5, 1, &mut out), EgStatus::Config);
    }
}

#[test]
fn image_metrics() {
    let sim = Sim::new(&params(0.2, 0, 0.0));
    unsafe {
        let mut img = ptr::null_mut();
        assert_eq!(eg_reconstruct(sim.formal, &mut img), EgStatus::Ok);
        let (mut c, mut r) = (0, 0);
        assert_eq!(eg_image_dims(img, &mut c, &mut r), EgStatus::Ok);
        let mut px = vec![0.0; c * r];
        assert_eq!(
            eg_image_copy_data(img, px.as_mut_ptr(), px.len()),
            EgStatus::Ok
        );
        assert!(px.iter().all(|v| *v >= 0.0));

        let mut roi = std::mem::zeroed();
        assert_eq!(eg_default_roi(64, 64, &mut roi), EgStatus::Ok);
        assert_eq!(
            (
                roi.signal_row,
                roi.signal_height,
                roi.noise_corner,
                roi.noise_width
            ),
            (32, 16, 0, 8)
        );
        let mut g = 0.0;
        assert_eq!(eg_gsr(img, &roi, &mut g), EgStatus::Ok);
        assert!((g - 0.1f64.tan()).abs() < 0.02 * 0.1f64.tan());
        let mut snr = 0.0;
        assert_eq!(eg_snr(img, &roi, &mut snr), EgStatus::Ok);
        assert!(snr > 1e10);

        roi.noise_corner = 9;
        assert_eq!(eg_gsr(img, &roi, &mut g), EgStatus::Config);
        assert_eq!(eg_default_roi(6, 5, &mut roi), EgStatus::Config);
        eg_image_free(img);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("k.epik").to_str().unwrap()).unwrap();
    let missing = CString::new(dir.path().join("none.epik").to_str().unwrap()).unwrap();
    let sim = Sim::new(&params(0.3, 1, 0.05));
    unsafe {
        assert_eq!(eg_kspace_write(sim.formal, path.as_ptr()), EgStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(eg_kspace_read(path.as_ptr(), &mut back), EgStatus::Ok);
        let expect: Vec<f64> = data(sim.formal).iter().map(|v| *v as f32 as f64).collect();
        assert_eq!(data(back), expect);
        eg_kspace_free(back);

        assert_eq!(eg_kspace_read(missing.as_ptr(), &mut back), EgStatus::Io);
        std::fs::write(dir.path().join("none.epik"), b"EPIX0000").unwrap();
        assert_eq!(
            eg_kspace_read(missing.as_ptr(), &mut back),
            EgStatus::Format
        );
        assert!(last_error().contains("magic"));
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(eg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
