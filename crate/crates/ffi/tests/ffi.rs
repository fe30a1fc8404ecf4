use std::ffi::{c_char, CStr, CString};
use std::process::Command;
use std::ptr;

use skew_motzkin_ffi::*;

/// Takes ownership of a library string.
unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    skm_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = skm_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(skm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn path_validation() {
    let (mut valid, mut at) = (false, 0usize);
    unsafe {
        let w = CString::new("UFL").unwrap();
        assert_eq!(
            skm_path_validate(w.as_ptr(), &mut valid, &mut at),
            SkmStatus::Ok
        );
        assert!(valid);
        assert_eq!(at, usize::MAX);
        assert!(skm_last_error().is_null());

        let w = CString::new("UL").unwrap();
        assert_eq!(
            skm_path_validate(w.as_ptr(), &mut valid, &mut at),
            SkmStatus::Ok
        );
        assert!(!valid);
        assert_eq!(at, 1);

        let w = CString::new("UX").unwrap();
        assert_eq!(
            skm_path_validate(w.as_ptr(), &mut valid, &mut at),
            SkmStatus::InvalidPath
        );
        assert!(last_error().contains('X'));

        assert_eq!(
            skm_path_validate(ptr::null(), &mut valid, &mut at),
            SkmStatus::NullPointer
        );
    }
}

#[test]
fn count_table_round_trip() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(skm_count_table_new(60, -1, &mut t), SkmStatus::Ok);
        let mut n = 0u64;
        assert_eq!(skm_count_table_count_u64(t, 5, 1, &mut n), SkmStatus::Ok);
        assert_eq!(n, 36);
        let mut s = ptr::null_mut();
        assert_eq!(skm_count_table_count(t, 11, 0, &mut s), SkmStatus::Ok);
        assert_eq!(take(s), "20705");
        assert_eq!(
            skm_count_table_count_u64(t, 60, 0, &mut n),
            SkmStatus::OutOfRange
        );
        assert_eq!(
            skm_count_table_count(t, 61, 0, &mut s),
            SkmStatus::OutOfRange
        );
        assert!(last_error().contains("61"));
        skm_count_table_free(t);

        assert_eq!(skm_count_table_new(8, 1, &mut t), SkmStatus::Ok);
        assert_eq!(skm_count_table_count_u64(t, 4, 0, &mut n), SkmStatus::Ok);
        assert_eq!(n, 11);
        skm_count_table_free(t);
        skm_count_table_free(ptr::null_mut());
    }
}

#[test]
fn series_coefficients() {
    unsafe {
        let name = CString::new("total").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(skm_series_new(name.as_ptr(), 10, &mut s), SkmStatus::Ok);
        let mut len = 0usize;
        assert_eq!(skm_series_len(s, &mut len), SkmStatus::Ok);
        assert_eq!(len, 11);
        let mut c = ptr::null_mut();
        assert_eq!(skm_series_coefficient(s, 10, &mut c), SkmStatus::Ok);
        assert_eq!(take(c), "30413");
        assert_eq!(skm_series_coefficient(s, 11, &mut c), SkmStatus::OutOfRange);
        skm_series_free(s);

        let bad = CString::new("nope").unwrap();
        assert_eq!(
            skm_series_new(bad.as_ptr(), 4, &mut s),
            SkmStatus::InvalidArgument
        );
    }
}

#[test]
fn oracle_count_and_limit() {
    let mut n = 0u64;
    unsafe {
        assert_eq!(skm_enumerate_count(4, 0, 16, &mut n), SkmStatus::Ok);
        assert_eq!(n, 13);
        assert_eq!(skm_enumerate_count(9, 0, 8, &mut n), SkmStatus::OracleLimit);
    }
}

#[test]
fn sampler_is_seeded() {
    unsafe fn draw(seed: u64) -> Vec<String> {
        let mut s = ptr::null_mut();
        assert_eq!(skm_sampler_new(6, 0, seed, &mut s), SkmStatus::Ok);
        let out = (0..20)
            .map(|_| {
                let mut w = ptr::null_mut();
                assert_eq!(skm_sampler_next(s, &mut w), SkmStatus::Ok);
                take(w)
            })
            .collect();
        skm_sampler_free(s);
        out
    }
    unsafe {
        let a = draw(3);
        assert_eq!(a, draw(3));
        assert!(a.iter().all(|w| w.len() == 6));
        let mut s = ptr::null_mut();
        assert_eq!(skm_sampler_new(2, 5, 0, &mut s), SkmStatus::InvalidArgument);
        assert!(s.is_null());
    }
}

#[test]
fn constants_as_doubles() {
    let mut c = SkmConstants::default();
    unsafe {
        assert_eq!(skm_asymptotic_constants(30, &mut c), SkmStatus::Ok);
        assert_eq!(
            skm_asymptotic_constants(5, &mut c),
            SkmStatus::InvalidArgument
        );
    }
    assert!((c.rho - 0.295_597_742_522_084_8).abs() < 1e-15);
    assert!((c.k_height - 0.704_525_137_678_140_9).abs() < 1e-12);
}

#[test]
fn header_declares_the_api() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/skew_motzkin.h");
    let header = std::fs::read_to_string(path).unwrap();
    for name in [
        "SKM_STATUS_OK",
        "typedef struct SkmCountTable SkmCountTable",
        "skm_count_table_new",
        "skm_series_coefficient",
        "skm_sampler_next",
        "skm_asymptotic_constants",
        "skm_string_free",
        "skm_last_error",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
    // Compile-check the header when a C compiler is around.
    if let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", path])
        .output()
    {
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
