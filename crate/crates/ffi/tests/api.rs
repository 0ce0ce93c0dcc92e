use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use kkverify_ffi::*;

fn scenario(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = kk_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    kk_string_free(p);
    s
}

#[test]
fn expression_round_trip() {
    unsafe {
        let mut e = ptr::null_mut();
        let text = CString::new("x^3 + 2*x*y").unwrap();
        assert_eq!(kk_expr_parse(text.as_ptr(), &mut e), KkStatus::Ok);
        assert!(kk_last_error_message().is_null());
        let mut d = ptr::null_mut();
        let x = CString::new("x").unwrap();
        assert_eq!(kk_expr_differentiate(e, x.as_ptr(), &mut d), KkStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(kk_expr_to_string(d, &mut s), KkStatus::Ok);
        let printed = take_string(s);

        // The printed derivative parses back to the same value.
        let mut back = ptr::null_mut();
        let printed_c = CString::new(printed.clone()).unwrap();
        assert_eq!(kk_expr_parse(printed_c.as_ptr(), &mut back), KkStatus::Ok);
        let y = CString::new("y").unwrap();
        let names = [x.as_ptr(), y.as_ptr()];
        let values = [1.5, -2.0];
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(
            kk_expr_evaluate(d, names.as_ptr(), values.as_ptr(), 2, &mut a),
            KkStatus::Ok
        );
        assert_eq!(
            kk_expr_evaluate(back, names.as_ptr(), values.as_ptr(), 2, &mut b),
            KkStatus::Ok
        );
        assert_eq!(a, 3.0 * 1.5 * 1.5 + 2.0 * -2.0, "{printed}");
        assert_eq!(a, b);

        let mut simple = ptr::null_mut();
        assert_eq!(kk_expr_simplify(back, &mut simple), KkStatus::Ok);
        for h in [e, d, back, simple] {
            kk_expr_free(h);
        }
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut e = ptr::null_mut();
        let bad = CString::new("sin(").unwrap();
        assert_eq!(kk_expr_parse(bad.as_ptr(), &mut e), KkStatus::Parse);
        assert!(e.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(kk_expr_parse(ptr::null(), &mut e), KkStatus::NullPointer);
        assert!(last_error().contains("text"));

        let ok = CString::new("1/x").unwrap();
        assert_eq!(kk_expr_parse(ok.as_ptr(), &mut e), KkStatus::Ok);
        let mut v = 0.0;
        assert_eq!(kk_expr_evaluate(e, ptr::null(), ptr::null(), 0, &mut v), KkStatus::Eval);
        kk_expr_free(e);

        let invalid = [0xffu8, 0];
        assert_eq!(
            kk_expr_parse(invalid.as_ptr() as *const c_char, &mut e),
            KkStatus::InvalidUtf8
        );

        let mut count = 0;
        assert_eq!(kk_parameter_count(0, &mut count), KkStatus::InvalidArgument);
        assert_eq!(kk_parameter_count(5, &mut count), KkStatus::Ok);
        assert_eq!(count, 10);

        let mut s = ptr::null_mut();
        assert_eq!(
            kk_scenario_load_str(c"{\"name\": 1}".as_ptr(), &mut s),
            KkStatus::Scenario
        );
        assert!(s.is_null());
        assert_eq!(kk_report_exit_code(ptr::null()), -1);

        // Freeing null is a no-op.
        kk_expr_free(ptr::null_mut());
        kk_scenario_free(ptr::null_mut());
        kk_report_free(ptr::null_mut());
        kk_string_free(ptr::null_mut());
    }
}

#[test]
fn report_matches_cli_json() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            kk_scenario_load_path(scenario("uniform_field.json").as_ptr(), &mut s),
            KkStatus::Ok
        );
        let mut r = ptr::null_mut();
        assert_eq!(kk_report_run(s, 0.0, &mut r), KkStatus::InvalidArgument);
        assert_eq!(kk_report_run(s, 1.0, &mut r), KkStatus::Ok);
        let (mut pass, mut fail, mut skip) = (0, 0, 0);
        assert_eq!(kk_report_counts(r, &mut pass, &mut fail, &mut skip), KkStatus::Ok);
        assert_eq!((pass, fail, skip), (21, 0, 0));
        assert_eq!(kk_report_exit_code(r), 0);

        let mut json = ptr::null_mut();
        assert_eq!(kk_report_to_json(r, &mut json), KkStatus::Ok);
        let json = take_string(json);
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios/uniform_field.json");
        let expected = kkverify::cli::run_pipeline(
            &kkverify::cli::Scenario::load(&path).unwrap(),
            &kkverify::cli::Options::default(),
        )
        .to_json();
        assert_eq!(json, expected);

        let mut text = ptr::null_mut();
        assert_eq!(kk_report_to_text(r, &mut text), KkStatus::Ok);
        assert!(take_string(text).contains("[holonomy]"));
        kk_report_free(r);

        assert_eq!(kk_scenario_set_seed(s, 42), KkStatus::Ok);
        assert_eq!(kk_report_run(s, 1.0, &mut r), KkStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(kk_report_to_json(r, &mut json), KkStatus::Ok);
        assert!(take_string(json).contains("\"seed\": 42"));
        kk_report_free(r);
        kk_scenario_free(s);
    }
}

#[test]
fn holonomy_constants() {
    unsafe {
        let mut m = 0.0;
        assert_eq!(kk_min_action(1.0, 0.0, &mut m), KkStatus::Ok);
        assert_eq!(m, 0.5);
        let (mut n, mut q) = (0i64, false);
        let k = 1.0 / (4.0 * std::f64::consts::PI);
        let action = 2.0 * std::f64::consts::PI * 5.0 * k;
        assert_eq!(
            kk_quantization_check(action, 1.0, 0.0, 1e-6, &mut n, &mut q),
            KkStatus::Ok
        );
        assert!(q);
        assert_eq!(n, 5);
        assert_eq!(
            kk_quantization_check(action + 0.01, 1.0, 0.0, 1e-6, &mut n, &mut q),
            KkStatus::Ok
        );
        assert!(!q);
        assert_eq!(
            kk_quantization_check(1.0, -1.0, 0.0, 1e-6, &mut n, &mut q),
            KkStatus::InvalidArgument
        );
    }
}

/// Compiles the C smoke program against the generated header and the
/// shared library, when a C compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<this test> -> target/<profile>
    let libdir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&libdir)
        .args(["-lkkverify_ffi", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe)
        .arg(scenario("flat.json").to_str().unwrap())
        .env("LD_LIBRARY_PATH", &libdir)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
