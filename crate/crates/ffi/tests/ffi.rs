use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cmab_ffi::*;

const CONFIG: &str = r#"
horizon = 300
repetitions = 2
seed = 21
instance.kind = "classical"
instance.means = [0.1, 0.5, 0.9]
"#;

fn experiment(text: &str) -> *mut CmabExperiment {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    let code = unsafe { cmab_experiment_new(c.as_ptr(), &mut out) };
    assert_eq!(code, CMAB_OK, "{:?}", last_error());
    out
}

fn last_error() -> Option<String> {
    let p = cmab_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn stepping_matches_full_run() {
    let exp = experiment(CONFIG);
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(cmab_run_new(exp, 1, &mut run), CMAB_OK);
        let mut rec = CmabRecord::default();
        let mut sum = 0.0;
        for t in 1..=300 {
            assert_eq!(cmab_run_step(run, &mut rec), CMAB_OK);
            assert_eq!(rec.t, t);
            sum += rec.regret;
        }
        let mut full = f64::NAN;
        assert_eq!(cmab_experiment_run(exp, 1, &mut full), CMAB_OK);
        assert_eq!(rec.cumulative_regret, full);
        assert!((sum - full).abs() < 1e-9);
        cmab_run_free(run);
        cmab_experiment_free(exp);
    }
}

#[test]
fn run_outlives_experiment() {
    let exp = experiment(CONFIG);
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(cmab_run_new(exp, 0, &mut run), CMAB_OK);
        cmab_experiment_free(exp);
        let mut rec = CmabRecord::default();
        assert_eq!(cmab_run_step(run, &mut rec), CMAB_OK);
        assert_eq!(rec.t, 1);
        cmab_run_free(run);
    }
}

#[test]
fn accessors_and_bounds() {
    let exp = experiment(CONFIG);
    unsafe {
        let mut arms = 0;
        assert_eq!(cmab_experiment_num_arms(exp, &mut arms), CMAB_OK);
        assert_eq!(arms, 3);
        let mut n = 0;
        assert_eq!(cmab_experiment_horizon(exp, &mut n), CMAB_OK);
        assert_eq!(n, 300);
        let mut opt = 0.0;
        assert_eq!(cmab_experiment_opt(exp, &mut opt), CMAB_OK);
        assert!((opt - 0.9).abs() < 1e-15);
        let name = CString::new("classical").unwrap();
        let mut b = 0.0;
        assert_eq!(cmab_experiment_bound(exp, name.as_ptr(), 1000.0, &mut b), CMAB_OK);
        let ln = 1000f64.ln();
        let expected = 6.0 * ln / 0.8 + 6.0 * ln / 0.4 + (std::f64::consts::PI.powi(2) / 3.0 + 1.0) * 3.0 * 0.8;
        assert!((b - expected).abs() < 1e-9 * expected);
        let bogus = CString::new("nope").unwrap();
        assert_eq!(
            cmab_experiment_bound(exp, bogus.as_ptr(), 1000.0, &mut b),
            CMAB_ERR_CONFIG
        );
        assert!(last_error().unwrap().contains("nope"));
        cmab_experiment_free(exp);
    }
}

#[test]
fn error_codes_and_last_error() {
    cmab_clear_last_error();
    assert!(last_error().is_none());
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(cmab_experiment_new(ptr::null(), &mut out), CMAB_ERR_NULL_POINTER);
        assert!(last_error().unwrap().contains("config_toml"));
        let bad = CString::new("horizon = 0\ninstance.kind = \"classical\"\ninstance.means = [0.5]").unwrap();
        assert_eq!(cmab_experiment_new(bad.as_ptr(), &mut out), CMAB_ERR_CONFIG);
        let invalid = CString::new("horizon = 5\ninstance.kind = \"classical\"\ninstance.means = [1.5]").unwrap();
        assert_eq!(cmab_experiment_new(invalid.as_ptr(), &mut out), CMAB_ERR_CONFIG);
        assert!(last_error().unwrap().contains("mean out of range"));
        let mut v = 0.0;
        assert_eq!(cmab_zeta(1.0, &mut v), CMAB_ERR_INVALID_ARGUMENT);
        assert_eq!(cmab_zeta(2.0, ptr::null_mut()), CMAB_ERR_NULL_POINTER);
        assert_eq!(
            cmab_run_step(ptr::null_mut(), &mut CmabRecord::default()),
            CMAB_ERR_NULL_POINTER
        );
        cmab_experiment_free(ptr::null_mut());
        cmab_run_free(ptr::null_mut());
    }
}

#[test]
fn last_error_is_thread_local() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(cmab_zeta(0.5, &mut v), CMAB_ERR_INVALID_ARGUMENT);
    }
    assert!(last_error().is_some());
    std::thread::spawn(|| assert!(last_error().is_none())).join().unwrap();
}

#[test]
fn analysis_utilities() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(cmab_zeta(2.0, &mut v), CMAB_OK);
        assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
        assert_eq!(cmab_sampling_threshold(0.5, 1.0, 1000.0, 1.0, 1.0, &mut v), CMAB_OK);
        assert!((v - 165.787).abs() < 1e-3);
        assert_eq!(
            cmab_sampling_threshold(0.5, 1.0, 1000.0, 1.0, 1.5, &mut v),
            CMAB_ERR_INVALID_ARGUMENT
        );
        assert_eq!(cmab_hoeffding_tail(100, 10.0, &mut v), CMAB_OK);
        assert!((v - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(cmab_chernoff_tail(10, 0.5, 0.0, &mut v), CMAB_OK);
        assert_eq!(v, 1.0);
        assert_eq!(cmab_bernstein_tail(10, 2.0, 0.0, 5.0, &mut v), CMAB_OK);
        assert!((v - (-3.75f64).exp()).abs() < 1e-15);
    }
    let version = unsafe { CStr::from_ptr(cmab_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn writes_experiment_files() {
    let dir = tempfile::tempdir().unwrap();
    let exp = experiment(CONFIG);
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(cmab_experiment_write(exp, path.as_ptr()), CMAB_OK);
        cmab_experiment_free(exp);
    }
    for f in [
        "aggregate.csv",
        "bounds.csv",
        "metadata.json",
        "runs/run_0000.csv",
        "runs/run_0001.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/cmab.h")).unwrap();
    for symbol in [
        "cmab_version",
        "cmab_last_error_message",
        "cmab_clear_last_error",
        "cmab_experiment_new",
        "cmab_experiment_free",
        "cmab_experiment_bound",
        "cmab_experiment_run",
        "cmab_experiment_write",
        "cmab_run_new",
        "cmab_run_step",
        "cmab_run_free",
        "typedef struct CmabExperiment CmabExperiment",
        "#define CMAB_ERR_PANIC 7",
    ] {
        assert!(header.contains(symbol), "{symbol}");
    }
}

/// Directory holding the library artifacts of this build (`target/<profile>`).
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("libcmab_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("t=500 "));
}
