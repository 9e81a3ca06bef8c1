use std::process::{Command, Output};

use morrey_core::probe::ContinuityCurve;
use morrey_core::seminorms::SeminormReport;
use morrey_core::verify::VerifyReport;

fn morrey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morrey")).args(args).output().unwrap()
}

#[test]
fn norm_emits_a_seminorm_report() {
    let out = morrey(&["norm", "--fn", "f_lambda", "--lambda", "0.5", "--seminorm", "p3", "--arc-levels", "6"]);
    assert!(out.status.success());
    let rep: SeminormReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep.supremum > 0.0);
    assert_eq!(rep.parameter, 0.5);
}

#[test]
fn probe_matches_the_affine_eigenrelation() {
    let base = ["--fn", "f_lambda", "--lambda", "0.5", "--arc-levels", "8"];
    let norm: SeminormReport = serde_json::from_slice(&morrey(&[&["norm"][..], &base].concat()).stdout).unwrap();
    let out = morrey(&[&["probe", "--semigroup", "affine", "--ts", "0.2,0.1,0.05"][..], &base].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let curve: ContinuityCurve = serde_json::from_slice(&out.stdout).unwrap();
    // the norm includes |f(0)| = 1
    let full = norm.supremum + 1.0;
    for (t, v) in curve.t_values.iter().zip(curve.values().unwrap()) {
        let expect = (t / 4.0).exp() - 1.0;
        assert!((v / full / expect - 1.0).abs() < 0.02, "t = {t}");
    }
}

#[test]
fn unknown_label_exits_2_with_known_labels() {
    let out = morrey(&["probe", "--fn", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("f_lambda") && err.contains("spirallike_h"), "{err}");
    let out = morrey(&["flow", "--semigroup", "spiral"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("koenigs_lambda"));
    let out = morrey(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["norm", "--fn", "spirallike_h", "--seminorm", "p2", "--format", "csv"][..],
        &["flow", "--semigroup", "affine", "--ts", "0.1,1", "--point", "0.5,-0.5"][..],
        &["condition", "--check", "thm2", "--semigroup", "dilation", "--centers", "8"][..],
        &["gallery"][..],
    ] {
        let a = morrey(args);
        let b = morrey(args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_selection_passes_and_writes_output() {
    let dir = std::env::temp_dir().join(format!("morrey_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = morrey(&["verify", "--suite", "eigenrelation,thm2-dilation", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let rep: VerifyReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.n_total, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS eigenrelation"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn failing_criterion_forces_nonzero_exit() {
    // an impossibly strict vanish threshold turns the dilation box check indeterminate
    let out = morrey(&["verify", "--suite", "thm2-dilation", "--vanish", "1e-300"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL thm2-dilation"));
}

#[test]
fn thm4_on_boundary_point_is_a_precondition_error() {
    let out = morrey(&["condition", "--check", "thm4", "--semigroup", "affine"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Denjoy–Wolff"));
}
