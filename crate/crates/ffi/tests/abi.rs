use std::ffi::{CStr, CString};
use std::ptr;

use scatlab_ffi::*;

fn gaussian(amplitude: f64) -> *mut ScatField {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { scat_field_gaussian(1, 1.0, amplitude, 40.0, &mut f) }, ScatStatus::Ok);
    f
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(scat_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn exponents_match_closed_forms() {
    let mut e = ScatExponents::default();
    assert_eq!(unsafe { scat_exponents(3, 1.2, &mut e) }, ScatStatus::Ok);
    assert_eq!(e.strauss, 1.0);
    assert!((e.q_unsharp - 2.0 * 3.4 / 3.2).abs() < 1e-14);
    assert!(e.mass_subcritical && e.scattering_regime);
    assert_eq!(unsafe { scat_exponents(0, 1.0, &mut e) }, ScatStatus::InvalidParameter);
    assert!(last_error().contains("dimension"));
}

#[test]
fn field_round_trip_through_buffers_and_files() {
    let f = gaussian(0.3);
    let (mut d, mut n, mut length) = (0u32, 0usize, 0.0);
    assert_eq!(unsafe { scat_field_grid(f, &mut d, &mut n, &mut length) }, ScatStatus::Ok);
    let count = unsafe { scat_field_value_count(f) };
    assert_eq!(count, 2 * n);
    let mut buf = vec![0.0; count];
    assert_eq!(unsafe { scat_field_values(f, buf.as_mut_ptr(), count) }, ScatStatus::Ok);
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { scat_field_new(d, n, length, buf.as_ptr(), count, &mut g) }, ScatStatus::Ok);
    assert_eq!(
        unsafe { scat_field_new(d, n, length, buf.as_ptr(), count - 2, &mut g) },
        ScatStatus::SizeMismatch
    );

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("f.bin").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { scat_field_write(g, path.as_ptr()) }, ScatStatus::Ok);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { scat_field_read(path.as_ptr(), &mut h) }, ScatStatus::Ok);
    let mut back = vec![0.0; count];
    assert_eq!(unsafe { scat_field_values(h, back.as_mut_ptr(), count) }, ScatStatus::Ok);
    assert_eq!(back, buf);

    let missing = CString::new(dir.path().join("none.bin").to_str().unwrap()).unwrap();
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { scat_field_read(missing.as_ptr(), &mut x) }, ScatStatus::Io);
    unsafe {
        scat_field_free(f);
        scat_field_free(g);
        scat_field_free(h);
        scat_field_free(ptr::null_mut());
    }
}

#[test]
fn propagation_conserves_norms() {
    let f = gaussian(0.5);
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { scat_propagate(f, 3.0, &mut g) }, ScatStatus::Ok);
    let (mut a, mut b) = (ScatNorms::default(), ScatNorms::default());
    unsafe {
        assert_eq!(scat_norms(f, 3.0, &mut a), ScatStatus::Ok);
        assert_eq!(scat_norms(g, 3.0, &mut b), ScatStatus::Ok);
    }
    assert!((a.l2 - 0.5).abs() < 1e-12);
    assert!((b.mass - a.mass).abs() < 1e-13);
    assert!(b.lp_power < a.lp_power);
    unsafe {
        scat_field_free(f);
        scat_field_free(g);
    }
}

#[test]
fn maps_and_born_term() {
    let f = gaussian(0.07);
    let mut born = ptr::null_mut();
    let mut binfo = ScatBornInfo::default();
    assert_eq!(unsafe { scat_born(f, 3.0, &mut born, &mut binfo) }, ScatStatus::Ok);
    assert!(binfo.duality_gap < 1e-10);

    let (mut w, mut s) = (ptr::null_mut(), ptr::null_mut());
    let (mut wi, mut si) = (ScatMapInfo::default(), ScatMapInfo::default());
    unsafe {
        assert_eq!(scat_wave(f, 3.0, &mut w, &mut wi), ScatStatus::Ok);
        assert_eq!(scat_scatter(w, 3.0, &mut s, &mut si), ScatStatus::Ok);
    }
    assert!((wi.born_norm - binfo.norm).abs() < 1e-10 * binfo.norm);
    let count = unsafe { scat_field_value_count(f) };
    let (mut a, mut b) = (vec![0.0; count], vec![0.0; count]);
    unsafe {
        scat_field_values(f, a.as_mut_ptr(), count);
        scat_field_values(s, b.as_mut_ptr(), count);
    }
    let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let size: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(diff < 1e-8 * size, "{}", diff / size);

    let big = gaussian(50.0);
    let mut o = ptr::null_mut();
    let st = unsafe { scat_scatter(big, 3.0, &mut o, &mut si) };
    assert_eq!(st, ScatStatus::Numerical, "{}", last_error());
    assert_eq!(unsafe { scat_scatter(ptr::null(), 3.0, &mut o, &mut si) }, ScatStatus::NullPointer);
    unsafe {
        for h in [f, born, w, s, big] {
            scat_field_free(h);
        }
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(scat_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
