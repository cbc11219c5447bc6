use nearfield_bd_ffi::*;
use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

const LAMBDA: f64 = 299_792_458.0 / 3e9;

fn default_array() -> *mut NfbRectArray {
    let mut arr = ptr::null_mut();
    let st = unsafe { nfb_rect_array_new(100, 1.0, NfbSizing::ElementDiagonal, LAMBDA / 4.0, LAMBDA, &mut arr) };
    assert_eq!(st, NfbStatus::Ok);
    assert!(!arr.is_null());
    arr
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(nfb_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn distances_and_beam_depth() {
    let arr = default_array();
    let mut d = NfbDistances::default();
    assert_eq!(unsafe { nfb_rect_array_distances(arr, &mut d) }, NfbStatus::Ok);
    assert!((d.uniform_amplitude / d.fraunhofer - 400.0).abs() < 1e-9);
    assert!((d.array_fraunhofer / d.fraunhofer - 1e4).abs() < 1e-6);
    assert!((d.finite_bd_limit / d.array_fraunhofer - 0.1).abs() < 1e-3);

    let mut bd = NfbBeamDepth::default();
    assert_eq!(unsafe { nfb_rect_beam_depth(arr, d.uniform_amplitude, &mut bd) }, NfbStatus::Ok);
    assert!((bd.depth / d.fraunhofer / 381.0 - 1.0).abs() < 0.015);
    assert!(bd.within_validity);

    let mut bd_far = NfbBeamDepth::default();
    assert_eq!(unsafe { nfb_rect_beam_depth(arr, d.array_fraunhofer, &mut bd_far) }, NfbStatus::Ok);
    assert!(bd_far.z_hi.is_infinite());
    unsafe { nfb_rect_array_free(arr) };
}

#[test]
fn gains() {
    let arr = default_array();
    let mut d = NfbDistances::default();
    unsafe { nfb_rect_array_distances(arr, &mut d) };
    let mut g = 0.0;
    assert_eq!(unsafe { nfb_rect_analytic_gain(arr, d.uniform_amplitude, d.uniform_amplitude, &mut g) }, NfbStatus::Ok);
    assert!((g - 1.0).abs() < 1e-12);
    let mut exact = 0.0;
    let st = unsafe { nfb_rect_exact_gain(arr, d.uniform_amplitude, 0.0, 0.0, d.uniform_amplitude, 0.0, 0.0, 4, &mut exact) };
    assert_eq!(st, NfbStatus::Ok);
    assert!(exact > 0.99 && exact <= 1.0 + 1e-9);
    let mut steered = 0.0;
    let st = unsafe { nfb_rect_analytic_gain_steered(arr, 1000.0 * d.fraunhofer, 0.0, 0.0, 1000.0 * d.fraunhofer, &mut steered) };
    assert_eq!(st, NfbStatus::Ok);
    assert!((steered - 1.0).abs() < 1e-9);
    unsafe { nfb_rect_array_free(arr) };
}

#[test]
fn circular_aperture() {
    let mut circ = ptr::null_mut();
    assert_eq!(unsafe { nfb_circ_array_new(12.5 * LAMBDA, LAMBDA, 0, &mut circ) }, NfbStatus::Ok);
    let mut bd = NfbBeamDepth::default();
    assert_eq!(unsafe { nfb_circ_beam_depth(circ, 50.0 * LAMBDA, &mut bd) }, NfbStatus::Ok);
    let mut d_f = 0.0;
    assert_eq!(unsafe { nfb_circ_fraunhofer_reference(circ, &mut d_f) }, NfbStatus::Ok);
    assert!((bd.depth / d_f / 247.0 - 1.0).abs() < 0.02);
    let mut g = 0.0;
    assert_eq!(unsafe { nfb_circ_analytic_gain(circ, 50.0 * LAMBDA, 50.0 * LAMBDA, &mut g) }, NfbStatus::Ok);
    assert_eq!(g, 1.0);
    unsafe { nfb_circ_array_free(circ) };
}

#[test]
fn scalar_functions() {
    let (mut c, mut s) = (0.0, 0.0);
    assert_eq!(unsafe { nfb_fresnel(1.0, &mut c, &mut s) }, NfbStatus::Ok);
    assert!((c - 0.779_893_400_376_823).abs() < 1e-12);
    assert!((s - 0.438_259_147_390_355).abs() < 1e-12);
    let mut a = 0.0;
    assert_eq!(unsafe { nfb_a3db(1.0, &mut a) }, NfbStatus::Ok);
    assert!((a - 1.25).abs() < 0.01);
}

#[test]
fn error_codes() {
    let mut arr = ptr::null_mut();
    let st = unsafe { nfb_rect_array_new(100, -1.0, NfbSizing::ElementDiagonal, 0.01, LAMBDA, &mut arr) };
    assert_eq!(st, NfbStatus::InvalidParameter);
    assert!(arr.is_null());
    assert!(last_error().contains("eta"));

    let st = unsafe { nfb_rect_array_new(100, 1.0, NfbSizing::ElementDiagonal, 0.01, LAMBDA, ptr::null_mut()) };
    assert_eq!(st, NfbStatus::NullPointer);

    let mut g = 0.0;
    assert_eq!(unsafe { nfb_rect_analytic_gain(ptr::null(), 1.0, 1.0, &mut g) }, NfbStatus::NullPointer);
    assert_eq!(unsafe { nfb_fresnel(1.0, ptr::null_mut(), &mut g) }, NfbStatus::NullPointer);

    let real = default_array();
    let st = unsafe { nfb_rect_exact_gain(real, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 4, &mut g) };
    assert_eq!(st, NfbStatus::ReactiveNearField);
    let st = unsafe { nfb_rect_exact_gain(real, 10.0, 2.0, 0.0, 10.0, 0.0, 0.0, 4, &mut g) };
    assert_eq!(st, NfbStatus::InvalidParameter);
    unsafe { nfb_rect_array_free(real) };
    unsafe { nfb_rect_array_free(ptr::null_mut()) };
    unsafe { nfb_circ_array_free(ptr::null_mut()) };

    let s = unsafe { CStr::from_ptr(nfb_status_str(NfbStatus::ReactiveNearField)) };
    assert_eq!(s.to_str().unwrap(), "distance in the reactive near-field");
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/nearfield_bd.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "nfb_last_error",
        "nfb_status_str",
        "nfb_rect_array_new",
        "nfb_rect_array_free",
        "nfb_rect_array_distances",
        "nfb_circ_array_new",
        "nfb_circ_array_free",
        "nfb_fresnel",
        "nfb_a3db",
        "nfb_rect_analytic_gain",
        "nfb_rect_analytic_gain_steered",
        "nfb_rect_exact_gain",
        "nfb_rect_beam_depth",
        "nfb_circ_analytic_gain",
        "nfb_circ_beam_depth",
        "nfb_circ_fraunhofer_reference",
        "typedef struct NfbRectArray NfbRectArray",
        "NFB_STATUS_REACTIVE_NEAR_FIELD = 3",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "nearfield_bd.h"

int main(void) {
    double lambda = 299792458.0 / 3e9;
    NfbRectArray *arr = NULL;
    if (nfb_rect_array_new(100, 1.0, NFB_SIZING_ELEMENT_DIAGONAL, lambda / 4, lambda, &arr) != NFB_STATUS_OK) return 1;
    NfbDistances d;
    if (nfb_rect_array_distances(arr, &d) != NFB_STATUS_OK) return 2;
    NfbBeamDepth bd;
    if (nfb_rect_beam_depth(arr, d.uniform_amplitude, &bd) != NFB_STATUS_OK) return 3;
    if (fabs(bd.depth / d.fraunhofer / 381.0 - 1.0) > 0.015) return 4;
    if (nfb_rect_array_new(100, 0.0, NFB_SIZING_ELEMENT_DIAGONAL, 1, 1, NULL) != NFB_STATUS_NULL_POINTER) return 5;
    nfb_rect_array_free(arr);
    printf("ok\n");
    return 0;
}
"#;

// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libnearfield_bd_ffi.a");
    let has_cc = Command::new("cc").arg("--version").output().is_ok();
    if !has_cc || !lib.exists() {
        eprintln!("skipping: cc or {} not available", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.join("smoke");
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

fn tempfile_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi-smoke");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
