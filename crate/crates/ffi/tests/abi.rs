use std::ffi::{c_char, CString};
use std::ptr;

use isochrone_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { iso_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn potential(address: &str, omega: f64) -> *mut IsoPotential {
    let s = CString::new(address).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { iso_potential_from_address(s.as_ptr(), omega, &mut p) },
        IsoStatus::Ok
    );
    assert!(!p.is_null());
    p
}

#[test]
fn involution_round_trip() {
    let s = CString::new("lambert:rho=2,a=0.5").unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(iso_involution_from_address(s.as_ptr(), &mut h), IsoStatus::Ok);
        let (mut y, mut back, mut d) = (0.0, 0.0, 0.0);
        assert_eq!(iso_involution_eval(h, 1.5, &mut y), IsoStatus::Ok);
        assert_eq!(iso_involution_eval(h, y, &mut back), IsoStatus::Ok);
        assert!((back - 1.5).abs() < 1e-12);
        assert_eq!(iso_involution_deriv(h, 0.0, &mut d), IsoStatus::Ok);
        assert!((d + 1.0).abs() < 1e-12);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(iso_involution_domain(h, &mut lo, &mut hi), IsoStatus::Ok);
        assert!(lo == f64::NEG_INFINITY && hi == f64::INFINITY);

        let mut p = ptr::null_mut();
        assert_eq!(iso_potential_from_involution(h, 2.0, &mut p), IsoStatus::Ok);
        iso_involution_free(h);
        let mut t = 0.0;
        assert_eq!(iso_potential_period_quadrature(p, 3.0, &mut t), IsoStatus::Ok);
        assert!((t - std::f64::consts::PI).abs() < 1e-9);
        iso_potential_free(p);
    }
}

#[test]
fn potential_values_and_periods() {
    let p = potential("stillinger:lambda=1,a=1", 1.0);
    unsafe {
        let mut v = 0.0;
        assert_eq!(iso_potential_v(p, 1.0, &mut v), IsoStatus::Ok);
        let expected = (8.0 - 2.0 * 10f64.sqrt()).powi(2) / 8.0;
        assert!((v - expected).abs() < 1e-12);
        let mut g = 0.0;
        assert_eq!(iso_potential_g(p, 0.0, &mut g), IsoStatus::Ok);
        assert!(g.abs() < 1e-15);
        let (mut t_exp, mut t_ode) = (0.0, 0.0);
        assert_eq!(iso_potential_expected_period(p, &mut t_exp), IsoStatus::Ok);
        assert_eq!(iso_potential_period_ode(p, 0.5, 0.0, &mut t_ode), IsoStatus::Ok);
        assert!((t_ode - t_exp).abs() < 1e-6 * t_exp);
        let (mut v4, mut v6) = (1.0, 1.0);
        assert_eq!(iso_potential_necessary_residuals(p, &mut v4, &mut v6), IsoStatus::Ok);
        assert!(v4 < 1e-4 && v6 < 1e-4);
        iso_potential_free(p);
    }
}

#[test]
fn quartic_control_is_not_isochronous() {
    let p = potential("quartic-control", 1.0);
    unsafe {
        let (mut t1, mut t2) = (0.0, 0.0);
        assert_eq!(iso_potential_period_quadrature(p, 0.01, &mut t1), IsoStatus::Ok);
        assert_eq!(iso_potential_period_quadrature(p, 1.0, &mut t2), IsoStatus::Ok);
        assert!((t1 - t2).abs() > 0.1);
        iso_potential_free(p);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let mut out = 0.0;
        assert_eq!(iso_lambert_w0(-1.0, &mut out), IsoStatus::Domain);
        assert!(!last_error().is_empty());
        assert_eq!(iso_lambert_w0(1.0, &mut out), IsoStatus::Ok);
        assert!((out - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!(last_error().is_empty());
        assert_eq!(iso_lambert_w0(1.0, ptr::null_mut()), IsoStatus::NullPointer);

        let mut p = ptr::null_mut();
        assert_eq!(
            iso_potential_from_address(ptr::null(), 1.0, &mut p),
            IsoStatus::NullPointer
        );
        let bad = CString::new("stillinger:lambda=-1,a=0").unwrap();
        assert_eq!(
            iso_potential_from_address(bad.as_ptr(), 1.0, &mut p),
            IsoStatus::Parameter
        );
        assert!(p.is_null());
        let bytes = [0xffu8, 0];
        assert_eq!(
            iso_potential_from_address(bytes.as_ptr().cast(), 1.0, &mut p),
            IsoStatus::InvalidString
        );

        let rational = potential("rational:a=1", 1.0);
        assert_eq!(iso_potential_v(rational, -5.0, &mut out), IsoStatus::Domain);
        assert!(last_error().contains("outside the domain"));
        iso_potential_free(rational);

        assert_eq!(iso_potential_v(ptr::null(), 0.0, &mut out), IsoStatus::NullPointer);
        iso_potential_free(ptr::null_mut());
        iso_involution_free(ptr::null_mut());
    }
}

#[test]
fn error_message_truncates() {
    unsafe {
        let mut out = 0.0;
        iso_lambert_w0(-1.0, &mut out);
        let full = iso_last_error_message(ptr::null_mut(), 0);
        let mut buf = [1 as c_char; 4];
        assert_eq!(iso_last_error_message(buf.as_mut_ptr(), 4), full);
        assert_eq!(buf[3], 0);
    }
}

#[test]
fn version_is_terminated() {
    let v = unsafe { std::ffi::CStr::from_ptr(iso_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
