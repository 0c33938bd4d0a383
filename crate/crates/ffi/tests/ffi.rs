use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use abplab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(abp_last_error()) }.to_string_lossy().into_owned()
}

fn builtin() -> *mut AbpConfig {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { abp_config_builtin(&mut cfg) }, AbpStatus::Ok);
    cfg
}

#[test]
fn run_and_read_reports() {
    let cfg = builtin();
    let name = CString::new("eigen-robin-disk").unwrap();
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(abp_run(cfg, name.as_ptr(), 32, 0, &mut run), AbpStatus::Ok, "{}", last_error());
        assert_eq!(abp_run_len(run), 3);
        assert_eq!(abp_run_passed(run), 1);
        let (mut scenario, mut res, mut n) = (ptr::null_mut(), 0, 0);
        assert_eq!(abp_run_summary(run, 0, &mut scenario, &mut res, &mut n), AbpStatus::Ok);
        assert_eq!(CStr::from_ptr(scenario).to_str().unwrap(), "eigen-robin-disk-a0.5");
        assert_eq!(res, 32);
        abp_string_free(scenario);
        let mut rep = std::mem::zeroed::<AbpReport>();
        for r in 0..n {
            assert_eq!(abp_run_report(run, 0, r, &mut rep), AbpStatus::Ok);
            assert!(!CStr::from_ptr(rep.id).to_bytes().is_empty());
            assert!(rep.pass >= -1 && rep.pass <= 1);
        }
        assert_eq!(abp_run_report(run, 0, n, &mut rep), AbpStatus::OutOfRange);
        assert_eq!(abp_run_report(run, 9, 0, &mut rep), AbpStatus::OutOfRange);

        let mut json = ptr::null_mut();
        assert_eq!(abp_run_render(run, AbpFormat::Json, &mut json), AbpStatus::Ok);
        let parsed = abplab::emit::from_json(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(parsed.len(), 3);
        abp_string_free(json);
        abp_run_free(run);
        abp_config_free(cfg);
    }
}

#[test]
fn errors_set_status_and_message() {
    let cfg = builtin();
    let mut run = ptr::null_mut();
    let bad = CString::new("no-such-scenario").unwrap();
    unsafe {
        assert_eq!(abp_run(cfg, bad.as_ptr(), 0, 0, &mut run), AbpStatus::Config);
        assert!(last_error().contains("no-such-scenario"));
        assert!(run.is_null());
        assert_eq!(abp_run(ptr::null(), bad.as_ptr(), 0, 0, &mut run), AbpStatus::NullPointer);
        assert_eq!(abp_config_builtin(ptr::null_mut()), AbpStatus::NullPointer);

        let mut parsed = ptr::null_mut();
        let toml = CString::new("seed = 1\nbogus = 2\n").unwrap();
        assert_eq!(abp_config_parse(toml.as_ptr(), &mut parsed), AbpStatus::Config);
        assert!(last_error().contains("bogus"));
        let path = CString::new("/nonexistent/x.toml").unwrap();
        assert_ne!(abp_config_load(path.as_ptr(), &mut parsed), AbpStatus::Ok);

        let invalid = [0xffu8, 0];
        assert_eq!(abp_config_parse(invalid.as_ptr().cast(), &mut parsed), AbpStatus::InvalidUtf8);

        let mut lambda = 0.0;
        let disk = CString::new("disk").unwrap();
        assert_eq!(abp_principal_eigenvalue(AbpOperator::Laplace, disk.as_ptr(), 48, f64::NAN, 1.0, 1.0, &mut lambda), AbpStatus::Ok);
        assert!(last_error().is_empty());
        assert!((lambda / 5.783185962946784 - 1.0).abs() < 0.01);
        assert_eq!(abp_principal_eigenvalue(AbpOperator::Pucci, disk.as_ptr(), 48, f64::NAN, 2.0, 1.0, &mut lambda), AbpStatus::InvalidArgument);

        abp_run_free(ptr::null_mut());
        abp_config_free(cfg);
        assert_eq!(abp_run_len(ptr::null()), 0);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(abp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compiles `smoke.c` against the generated header and the static library.
#[test]
fn c_smoke_program() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libabplab_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("abplab_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 7);
}
