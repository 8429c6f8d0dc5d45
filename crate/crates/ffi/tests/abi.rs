use std::f64::consts::PI;
use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use tfdkit_ffi::*;

fn last_error() -> String {
    let p = tfd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn tone_signal(freq: f64, n: usize) -> *mut TfdSignal {
    let x: Vec<f64> = (0..n)
        .map(|k| (2.0 * PI * freq * k as f64 / 2000.0).cos())
        .collect();
    let mut sig = ptr::null_mut();
    assert_eq!(
        unsafe { tfd_signal_new(x.as_ptr(), x.len(), 2000.0, &mut sig) },
        TfdStatus::Ok
    );
    sig
}

#[test]
fn stft_grid_through_handles() {
    let sig = tone_signal(50.0, 2000);
    let mut grid = ptr::null_mut();
    unsafe {
        assert_eq!(
            tfd_grid_compute(sig, TfdKind::Stft, 3.0, &mut grid),
            TfdStatus::Ok
        );
        assert!(tfd_last_error().is_null());
        let (rows, cols) = (tfd_grid_rows(grid), tfd_grid_cols(grid));
        assert_eq!((rows, cols), ((2000 - 256) / 6 + 1, 257));
        let values = std::slice::from_raw_parts(tfd_grid_values(grid), rows * cols);
        let row = &values[100 * cols..101 * cols];
        let peak = (0..cols)
            .max_by(|&a, &b| row[a].total_cmp(&row[b]))
            .unwrap();
        assert_eq!(peak, 13);
        let freqs = std::slice::from_raw_parts(tfd_grid_freq_axis(grid), cols);
        assert_eq!(freqs[256], 1000.0);
        let times = std::slice::from_raw_parts(tfd_grid_time_axis(grid), rows);
        assert_eq!(times[1], 6.0 / 2000.0);

        let mut img = ptr::null_mut();
        assert_eq!(
            tfd_grid_to_image(grid, true, 32, 48, &mut img),
            TfdStatus::Ok
        );
        let (mut h, mut w, mut c) = (0, 0, 0);
        assert_eq!(tfd_image_shape(img, &mut h, &mut w, &mut c), TfdStatus::Ok);
        assert_eq!((h, w, c), (32, 48, 1));
        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("g.png").to_str().unwrap()).unwrap();
        assert_eq!(tfd_image_write_png(img, path.as_ptr()), TfdStatus::Ok);
        assert!(dir.path().join("g.png").exists());
        tfd_image_free(img);
        tfd_grid_free(grid);
        tfd_signal_free(sig);
    }
}

#[test]
fn render_stack_is_normalized() {
    let sig = tone_signal(80.0, 1000);
    let kinds = [TfdKind::Chirplet, TfdKind::Cwt, TfdKind::Stft];
    let mut img = ptr::null_mut();
    unsafe {
        assert_eq!(
            tfd_render(sig, kinds.as_ptr(), 3, 64, 3.0, &mut img),
            TfdStatus::Ok
        );
        let (mut h, mut w, mut c) = (0, 0, 0);
        tfd_image_shape(img, &mut h, &mut w, &mut c);
        assert_eq!((h, w, c), (64, 64, 3));
        let px = std::slice::from_raw_parts(tfd_image_pixels(img), h * w * c);
        let mean = px.iter().sum::<f64>() / px.len() as f64;
        let var = px.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / px.len() as f64;
        assert!(mean.abs() < 1e-9 && (var.sqrt() - 1.0).abs() < 1e-9);

        // a normalized tensor is not an 8-bit raster
        let path = CString::new("/tmp/never-written.png").unwrap();
        assert_eq!(
            tfd_image_write_png(img, path.as_ptr()),
            TfdStatus::InvalidArgument
        );
        tfd_image_free(img);

        let two = [TfdKind::Stft, TfdKind::Cwt];
        let mut bad = ptr::null_mut();
        assert_eq!(
            tfd_render(sig, two.as_ptr(), 2, 64, 3.0, &mut bad),
            TfdStatus::InvalidArgument
        );
        assert!(bad.is_null());
        tfd_signal_free(sig);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut sig = ptr::null_mut();
        let x = [1.0, 2.0];
        assert_eq!(
            tfd_signal_new(x.as_ptr(), 2, -5.0, &mut sig),
            TfdStatus::InvalidArgument
        );
        assert!(last_error().contains("sample rate"), "{}", last_error());
        assert_eq!(
            tfd_signal_new(ptr::null(), 4, 100.0, &mut sig),
            TfdStatus::NullPointer
        );
        assert_eq!(
            tfd_signal_new(x.as_ptr(), 2, 100.0, ptr::null_mut()),
            TfdStatus::NullPointer
        );

        let s = tone_signal(50.0, 100);
        let mut grid = ptr::null_mut();
        assert_eq!(
            tfd_grid_compute(s, TfdKind::Raw, 3.0, &mut grid),
            TfdStatus::InvalidArgument
        );
        assert_eq!(
            tfd_grid_compute(ptr::null(), TfdKind::Stft, 3.0, &mut grid),
            TfdStatus::NullPointer
        );
        tfd_signal_free(s);
        tfd_signal_free(ptr::null_mut());
        assert_eq!(tfd_grid_rows(ptr::null()), 0);
        assert!(tfd_grid_values(ptr::null()).is_null());

        let mut m = TfdMetrics::default();
        assert_eq!(tfd_metrics(0, 3, 4, 0, &mut m), TfdStatus::UndefinedRate);
    }
}

#[test]
fn metrics_and_mann_whitney() {
    unsafe {
        let mut m = TfdMetrics::default();
        assert_eq!(tfd_metrics(85, 4, 96, 15, &mut m), TfdStatus::Ok);
        assert!((m.macc - 0.905).abs() < 1e-12);
        assert_eq!((m.se, m.sp), (0.85, 0.96));

        let a = [0.91, 0.93, 0.92, 0.95, 0.94];
        let b = [0.71, 0.73, 0.72, 0.75, 0.74];
        let mut r = TfdMannWhitney::default();
        assert_eq!(
            tfd_mann_whitney(a.as_ptr(), 5, b.as_ptr(), 5, true, &mut r),
            TfdStatus::Ok
        );
        assert_eq!((r.u, r.exact), (25.0, 1));
        assert!((r.p_two_sided - 2.0 / 252.0).abs() < 1e-12);
        assert_eq!(
            tfd_mann_whitney(a.as_ptr(), 5, b.as_ptr(), 5, false, &mut r),
            TfdStatus::Ok
        );
        assert_eq!(r.exact, 0);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(tfd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_abi_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tfdkit.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "tfd_signal_new",
        "tfd_signal_free",
        "tfd_grid_compute",
        "tfd_grid_values",
        "tfd_grid_free",
        "tfd_grid_to_image",
        "tfd_render",
        "tfd_image_pixels",
        "tfd_image_write_png",
        "tfd_image_free",
        "tfd_metrics",
        "tfd_mann_whitney",
        "tfd_last_error",
        "tfd_version",
        "TFD_STATUS_NULL_POINTER",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    // a C compiler is optional in the build environment
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-xc"])
        .arg(&header)
        .output()
    else {
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
