use std::ffi::{c_char, c_int, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use spreadlab_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = sl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn profile(json: &str) -> *mut SlProfile {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sl_profile_from_json(cstr(json).as_ptr(), &mut p) }, SlStatus::Ok);
    p
}

fn parallelism(json: &str) -> *mut SlParallelism {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sl_parallelism_from_json(cstr(json).as_ptr(), &mut p) }, SlStatus::Ok);
    p
}

#[test]
fn profile_functions() {
    let p = profile(r#"{"kind": "regular", "d": 2.0}"#);
    let (mut a, mut b, mut d, mut r) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(sl_profile_eval(p, 4.0, &mut a, &mut b), SlStatus::Ok);
        assert_eq!(sl_profile_d_of_r(p, 3.0, &mut d), SlStatus::Ok);
        assert_eq!(sl_profile_r_of_d(p, 3.0, &mut r), SlStatus::Ok);
        assert_eq!(sl_profile_eval(p, -1.0, &mut a, &mut b), SlStatus::InvalidArgument);
        sl_profile_free(p);
    }
    assert_eq!((a, b), (0.5, 0.0));
    assert_eq!(d, 3.0);
    assert!((r - 3.0).abs() < 1e-9 * 3.0);
}

#[test]
fn spread_lines_pass_through_points() {
    let p = profile(r#"{"kind": "satz2", "d": 1.0}"#);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(sl_spread_new(p, 1, 1.0, 0.0, &mut s), SlStatus::Ok);
        let x = [0.3, -1.2, 2.0, 1.0];
        let mut line = [0.0; 6];
        assert_eq!(sl_spread_containing_line(s, x.as_ptr(), line.as_mut_ptr()), SlStatus::Ok);
        // Joining the point with the line's point at infinity reproduces the line.
        let dir = [-line[2], -line[4], -line[5], 0.0];
        let mut again = [0.0; 6];
        assert_eq!(sl_join(x.as_ptr(), dir.as_ptr(), again.as_mut_ptr()), SlStatus::Ok);
        let gap = line.iter().zip(&again).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-9, "{line:?} vs {again:?}");

        let mut m = [0.0; 6];
        assert_eq!(sl_spread_regulus_line(s, 0.5, 1.0, m.as_mut_ptr()), SlStatus::Ok);
        let mut pairing = 0.0;
        assert_eq!(sl_meet_pairing(line.as_ptr(), m.as_ptr(), &mut pairing), SlStatus::Ok);
        assert!(pairing.abs() > 1e-9);

        let mut bad = ptr::null_mut();
        assert_eq!(sl_spread_new(p, 0, 1.0, 0.0, &mut bad), SlStatus::InvalidArgument);
        assert_eq!(sl_spread_new(p, 1, 0.0, 0.0, &mut bad), SlStatus::InvalidArgument);
        assert!(bad.is_null());
        sl_spread_free(s);
        sl_profile_free(p);
    }
}

#[test]
fn classification_and_partition_failure() {
    let oriented = parallelism(r#"{"kind": "satz2", "d": 1.0}"#);
    let unoriented = parallelism(r#"{"profile": {"kind": "satz2", "d": 1.0}, "oriented": false}"#);
    let z_axis = [0.0, 0.0, 0.0, 0.0, 0.0, -1.0];
    let mut axis = [0.0; 3];
    let mut residual = 1.0;
    unsafe {
        assert_eq!(sl_parallelism_classify(oriented, z_axis.as_ptr(), axis.as_mut_ptr(), &mut residual), SlStatus::Ok);
        assert_eq!(axis, [0.0, 0.0, 1.0]);
        assert!(residual < 1e-12);
        let st = sl_parallelism_classify(unoriented, z_axis.as_ptr(), axis.as_mut_ptr(), ptr::null_mut());
        assert_eq!(st, SlStatus::NotAPartition);
        assert!(last_error().contains("distinct unoriented classes"));
        sl_parallelism_free(oriented);
        sl_parallelism_free(unoriented);
    }
    let mut p = ptr::null_mut();
    let json = cstr(r#"{"profile": {"kind": "satz2", "d": 1.0}, "gamma": "O2"}"#);
    assert_eq!(unsafe { sl_parallelism_from_json(json.as_ptr(), &mut p) }, SlStatus::NotO2Admissible);
}

#[test]
fn study_labels_flip_with_orientation() {
    let l = [0.0, 0.0, -1.0, 0.0, 0.0, 0.0];
    let r = l.map(|x: f64| -x);
    let (mut a, mut b, mut c, mut d) = ([0.0; 3], [0.0; 3], [0.0; 3], [0.0; 3]);
    unsafe {
        assert_eq!(sl_study_map(l.as_ptr(), a.as_mut_ptr(), b.as_mut_ptr()), SlStatus::Ok);
        assert_eq!(sl_study_map(r.as_ptr(), c.as_mut_ptr(), d.as_mut_ptr()), SlStatus::Ok);
    }
    for k in 0..3 {
        assert!((a[k] + c[k]).abs() < 1e-12 && (b[k] + d[k]).abs() < 1e-12);
    }
}

#[test]
fn errors_are_reported() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(sl_profile_from_json(ptr::null(), &mut p), SlStatus::NullPointer);
        assert!(last_error().contains("json"));
        assert_eq!(sl_profile_from_json(cstr("{").as_ptr(), &mut p), SlStatus::InvalidConfig);
        let x = [1.0, 2.0, 3.0, 4.0];
        let mut line = [0.0; 6];
        assert_eq!(sl_join(x.as_ptr(), x.as_ptr(), line.as_mut_ptr()), SlStatus::Degenerate);
        let off_quadric = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let mut v = 0.0;
        assert_eq!(sl_meet_pairing(off_quadric.as_ptr(), off_quadric.as_ptr(), &mut v), SlStatus::InvalidArgument);
        assert_eq!(sl_profile_d_of_r(ptr::null(), 1.0, &mut v), SlStatus::NullPointer);
        let p = profile(r#"{"kind": "regular", "d": 1.0}"#);
        assert_eq!(sl_profile_d_of_r(p, 1.0, &mut v), SlStatus::Ok);
        sl_profile_free(p);
    }
    assert!(sl_last_error_message().is_null());
}

#[test]
fn run_returns_reports() {
    let cfg = cstr(
        r#"{"profile": {"kind": "satz2", "d": 1.0}, "oriented": false, "command": "parallelism check", "samples": 50}"#,
    );
    let mut text: *mut c_char = ptr::null_mut();
    let mut pass: c_int = -1;
    unsafe {
        assert_eq!(sl_run(cfg.as_ptr(), &mut text, &mut pass), SlStatus::Ok);
        let s = CStr::from_ptr(text).to_str().unwrap().to_string();
        sl_string_free(text);
        assert_eq!(pass, 0);
        assert!(s.contains("partition_failure"));

        let cfg = cstr(r#"{"profile": {"kind": "regular", "d": 1.0}, "command": "emit dtable", "samples": 3}"#);
        assert_eq!(sl_run(cfg.as_ptr(), &mut text, &mut pass), SlStatus::Ok);
        assert_eq!(pass, 1);
        assert!(CStr::from_ptr(text).to_str().unwrap().starts_with("r,d\n"));
        sl_string_free(text);

        let cfg = cstr(r#"{"profile": {"kind": "regular", "d": 1.0}}"#);
        assert_eq!(sl_run(cfg.as_ptr(), &mut text, &mut pass), SlStatus::InvalidConfig);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(sl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("spreadlab.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 18, "{exports:?}");
    for name in exports {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
    for handle in ["SlProfile", "SlSpread", "SlParallelism"] {
        assert!(h.contains(&format!("typedef struct {handle} {handle};")));
    }
}

const C_SMOKE: &str = r#"
#include <math.h>
#include <stdio.h>
#include "spreadlab.h"

int main(void) {
    SlProfile *p = NULL;
    SlSpread *s = NULL;
    double x[4] = {1.0, 2.0, -0.5, 1.0}, line[6];
    if (sl_profile_from_json("{\"kind\": \"satz1\", \"w\": 0.5, \"c\": 1.0}", &p) != SL_STATUS_OK) return 1;
    if (sl_spread_new(p, -1, 2.0, 0.5, &s) != SL_STATUS_OK) return 2;
    if (sl_spread_containing_line(s, x, line) != SL_STATUS_OK) return 3;
    double q = line[0] * line[5] - line[1] * line[4] + line[2] * line[3];
    if (fabs(q) > 1e-12) return 4;
    if (sl_profile_from_json("nope", &p) != SL_STATUS_INVALID_CONFIG) return 5;
    if (sl_last_error_message() == NULL) return 6;
    sl_spread_free(s);
    sl_profile_free(p);
    printf("ok %s\n", sl_version());
    return 0;
}
"#;

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_against_the_static_library() {
    let exe_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = exe_dir.join("libspreadlab_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_SMOKE).unwrap();
    let bin = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
