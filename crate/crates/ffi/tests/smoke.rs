//! Exercises the C entry points from Rust, including error paths.

use std::ptr;

use rieszkit_ffi::*;

#[test]
fn build_v_and_s_partition_the_window() {
    unsafe {
        let mut v: *mut RkIntervalSet = ptr::null_mut();
        let mut s: *mut RkIntervalSet = ptr::null_mut();
        assert_eq!(rk_build_v(1.0, 0.1, 10, &mut v), RkStatus::Ok);
        assert_eq!(rk_build_s(1.0, 0.1, 10, &mut s), RkStatus::Ok);
        let (mut mv, mut ms) = (0.0, 0.0);
        assert_eq!(rk_interval_set_measure(v, &mut mv), RkStatus::Ok);
        assert_eq!(rk_interval_set_measure(s, &mut ms), RkStatus::Ok);
        assert!(mv < 0.1);
        assert!(ms > 0.9);
        assert!((mv + ms - 1.0).abs() < 1e-12);

        let mut n = 0usize;
        assert_eq!(rk_interval_set_num_parts(v, &mut n), RkStatus::Ok);
        assert!(n > 0);
        let mut buf = vec![0.0f64; 2 * n];
        assert_eq!(rk_interval_set_copy_parts(v, buf.as_mut_ptr(), n), RkStatus::Ok);
        assert!(buf.chunks(2).all(|c| c[0] <= c[1]));
        assert_eq!(
            rk_interval_set_copy_parts(v, buf.as_mut_ptr(), n - 1),
            RkStatus::BufferTooSmall
        );

        rk_interval_set_free(v);
        rk_interval_set_free(s);
    }
}

#[test]
fn complement_and_exp_inner() {
    unsafe {
        let pairs = [-0.1f64, 0.1];
        let mut set: *mut RkIntervalSet = ptr::null_mut();
        assert_eq!(rk_interval_set_new(pairs.as_ptr(), 1, &mut set), RkStatus::Ok);
        let mut comp: *mut RkIntervalSet = ptr::null_mut();
        assert_eq!(
            rk_interval_set_complement_in(set, -0.5, 0.5, &mut comp),
            RkStatus::Ok
        );
        let mut m = 0.0;
        assert_eq!(rk_interval_set_measure(comp, &mut m), RkStatus::Ok);
        assert!((m - 0.8).abs() < 1e-15);

        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(rk_exp_inner(0.0, set, &mut re, &mut im), RkStatus::Ok);
        assert!((re - 0.2).abs() < 1e-15);
        assert_eq!(im, 0.0);

        rk_interval_set_free(set);
        rk_interval_set_free(comp);
    }
}

#[test]
fn gram_eigs_of_orthonormal_family() {
    unsafe {
        let pairs = [-0.5f64, 0.5];
        let mut window: *mut RkIntervalSet = ptr::null_mut();
        assert_eq!(rk_interval_set_new(pairs.as_ptr(), 1, &mut window), RkStatus::Ok);
        let freqs: Vec<f64> = (-4..=4).map(|j| j as f64).collect();
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(
            rk_gram_extremal_eigs(freqs.as_ptr(), freqs.len(), window, &mut lo, &mut hi),
            RkStatus::Ok
        );
        assert!((lo - 1.0).abs() < 1e-10);
        assert!((hi - 1.0).abs() < 1e-10);
        rk_interval_set_free(window);
    }
}

#[test]
fn witness_box_round_trip() {
    unsafe {
        let mut report = std::mem::zeroed::<RkWitnessReport>();
        assert_eq!(
            rk_witness_box(1.0, 0.5, 0.25, 3, 1, 0.0, 10, &mut report),
            RkStatus::Ok
        );
        assert!(report.satisfied);
        assert!(report.energy_on_s <= report.bound);
        assert!(report.m_tilde > 0);

        // Degenerate eta must be refused.
        assert_eq!(
            rk_witness_box(1.0, 0.5, 0.9, 3, 1, 0.0, 10, &mut report),
            RkStatus::InvalidArgument
        );
    }
}

#[test]
fn extract_ap_and_not_found() {
    unsafe {
        let points: Vec<f64> = (-40..=40).map(|j| j as f64).collect();
        let mut out = std::mem::zeroed::<RkApResult>();
        let mut s_buf = vec![0.0f64; 11];
        assert_eq!(
            rk_extract_approx_ap(points.as_ptr(), points.len(), 5, 0.3, 1, &mut out, s_buf.as_mut_ptr(), 11),
            RkStatus::Ok
        );
        assert_eq!(out.c, 1);
        assert_eq!(out.len, 11);
        assert_eq!(out.max_deviation, 0.0);
        assert!(s_buf.windows(2).all(|w| w[0] < w[1]));

        // A window too small for the requested length reports NotFound.
        let short: Vec<f64> = (0..5).map(|j| j as f64).collect();
        let status = rk_extract_approx_ap(
            short.as_ptr(),
            short.len(),
            5,
            0.3,
            1,
            &mut out,
            s_buf.as_mut_ptr(),
            11,
        );
        assert_eq!(status, RkStatus::NotFound);
        assert!(out.len < 11);
    }
}

#[test]
fn squarefree_report() {
    unsafe {
        let mut rep = std::mem::zeroed::<RkSquarefreeReport>();
        assert_eq!(rk_squarefree_obstruction(1, 100_000, &mut rep), RkStatus::Ok);
        assert_eq!(rep.q, 2);
        assert_eq!(rep.cap, 3);
        assert_eq!(rep.observed, 3);
    }
}

#[test]
fn invalid_intervals_are_rejected() {
    unsafe {
        let mut set: *mut RkIntervalSet = ptr::null_mut();
        let inverted = [1.0f64, 0.0];
        assert_eq!(
            rk_interval_set_new(inverted.as_ptr(), 1, &mut set),
            RkStatus::InvalidArgument
        );
        let nan = [f64::NAN, 1.0];
        assert_eq!(rk_interval_set_new(nan.as_ptr(), 1, &mut set), RkStatus::InvalidArgument);
        assert_eq!(rk_build_v(2.0, 0.5, 5, &mut set), RkStatus::InvalidArgument);
        assert_eq!(rk_build_v(1.0, 1.5, 5, &mut set), RkStatus::InvalidArgument);
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(rk_build_v(1.0, 0.5, 5, ptr::null_mut()), RkStatus::NullPointer);
        let mut m = 0.0;
        assert_eq!(rk_interval_set_measure(ptr::null(), &mut m), RkStatus::NullPointer);
        rk_interval_set_free(ptr::null_mut()); // no-op
    }
}

#[test]
fn version_and_status_names() {
    unsafe {
        let v = std::ffi::CStr::from_ptr(rk_version());
        assert!(!v.to_str().unwrap().is_empty());
        let name = std::ffi::CStr::from_ptr(rk_status_name(RkStatus::NotFound));
        assert_eq!(name.to_str().unwrap(), "not found");
    }
}

#[test]
fn generated_header_exports_the_surface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rieszkit.h"))
        .expect("header is generated by build.rs");
    for symbol in [
        "typedef struct RkIntervalSet RkIntervalSet;",
        "rk_build_v",
        "rk_build_s",
        "rk_interval_set_measure",
        "rk_gram_extremal_eigs",
        "rk_witness_box",
        "rk_extract_approx_ap",
        "rk_squarefree_obstruction",
        "RK_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}
