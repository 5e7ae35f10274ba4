use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use scrambler_ffi::*;

const DIMS2: ShDims = ShDims { d_a: 2, d_b: 2, d_k: 2, d_l: 2 };

fn last_error() -> String {
    let n = unsafe { sh_last_error_message(ptr::null_mut(), 0) };
    let mut buf = vec![0 as c_char; n + 1];
    unsafe { sh_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn swap4() -> *mut ShMatrix {
    let mut e = [0.0; 32];
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        e[2 * (4 * r + c)] = 1.0;
    }
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sh_matrix_new(4, 4, e.as_ptr(), &mut m) }, ShStatus::Ok);
    m
}

#[test]
fn swap_scores_one_on_every_measure() {
    let u = swap4();
    let (mut me, mut pg, mut opt, mut iters) = (0.0, 0.0, 0.0, 0usize);
    unsafe {
        assert_eq!(sh_p_me(u, DIMS2, &mut me), ShStatus::Ok);
        assert_eq!(sh_p_pg(u, DIMS2, &mut pg), ShStatus::Ok);
        assert_eq!(sh_p_opt(u, DIMS2, 0.0, 0, &mut opt, &mut iters), ShStatus::Ok);
        sh_matrix_free(u);
    }
    for p in [me, pg, opt] {
        assert!((p - 1.0).abs() < 1e-12);
    }
    assert!(iters >= 1);
}

#[test]
fn entries_round_trip_through_a_handle() {
    let mut u = ptr::null_mut();
    assert_eq!(unsafe { sh_haar_unitary(6, 7, 1, &mut u) }, ShStatus::Ok);
    let dims = ShDims { d_a: 2, d_b: 3, d_k: 3, d_l: 2 };
    let mut uo = ptr::null_mut();
    assert_eq!(unsafe { sh_rotate_pi_half(u, dims, &mut uo) }, ShStatus::Ok);
    assert_eq!(unsafe { (sh_matrix_rows(uo), sh_matrix_cols(uo)) }, (6, 6));

    let mut short = vec![0.0; 71];
    assert_eq!(unsafe { sh_matrix_get_entries(uo, short.as_mut_ptr(), short.len()) }, ShStatus::Shape);
    assert!(last_error().contains("72"));

    let mut buf = vec![0.0; 72];
    assert_eq!(unsafe { sh_matrix_get_entries(u, buf.as_mut_ptr(), buf.len()) }, ShStatus::Ok);
    let mut copy = ptr::null_mut();
    assert_eq!(unsafe { sh_matrix_new(6, 6, buf.as_ptr(), &mut copy) }, ShStatus::Ok);
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        sh_p_me(u, dims, &mut a);
        sh_p_me(copy, dims, &mut b);
        sh_matrix_free(u);
        sh_matrix_free(uo);
        sh_matrix_free(copy);
    }
    assert_eq!(a, b);
}

#[test]
fn errors_carry_codes_and_messages() {
    let u = swap4();
    let mut out = 0.0;
    let bad = ShDims { d_a: 2, d_b: 2, d_k: 3, d_l: 2 };
    assert_eq!(unsafe { sh_p_me(u, bad, &mut out) }, ShStatus::Argument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { sh_p_me(ptr::null(), DIMS2, &mut out) }, ShStatus::NullPointer);
    assert_eq!(unsafe { sh_hyp2f1(0.5, 0.5, 1.0, 1.0, &mut out) }, ShStatus::Argument);
    assert!(last_error().contains("diverges"));
    // Success clears the message.
    assert_eq!(unsafe { sh_hyp2f1(0.5, -0.5, 2.0, 1.0, &mut out) }, ShStatus::Ok);
    assert_eq!(last_error(), "");
    assert!((out - 8.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-12);
    unsafe { sh_matrix_free(u) };
}

#[test]
fn json_documents_parse() {
    let text = CString::new(r#"{"rows": 1, "cols": 2, "entries": [[1.0, 0.0], [0.0, -1.0]]}"#).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sh_matrix_from_json(text.as_ptr(), &mut m) }, ShStatus::Ok);
    let mut buf = [0.0; 4];
    assert_eq!(unsafe { sh_matrix_get_entries(m, buf.as_mut_ptr(), 4) }, ShStatus::Ok);
    assert_eq!(buf, [1.0, 0.0, 0.0, -1.0]);
    unsafe { sh_matrix_free(m) };

    let broken = CString::new("{\"rows\": 1,\n \"cols\": }").unwrap();
    assert_eq!(unsafe { sh_matrix_from_json(broken.as_ptr(), &mut m) }, ShStatus::Parse);
    assert!(last_error().contains("line 2"));
}

#[test]
fn asymptote_matches_the_large_dimension_limit() {
    let mut p = 0.0;
    assert_eq!(unsafe { sh_asym_p_opt(1.0, 1 << 20, 1 << 20, &mut p) }, ShStatus::Ok);
    assert!((p - 64.0 / (9.0 * std::f64::consts::PI.powi(2))).abs() < 1e-9);
}

#[test]
fn header_declares_every_export_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/scrambler.h");
    let text = std::fs::read_to_string(&header).unwrap();
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.strip_prefix("pub unsafe extern \"C\" fn "))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for name in exports {
        assert!(text.contains(&format!("{name}(")), "{name} missing from header");
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
}
