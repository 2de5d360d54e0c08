use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn vedil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vedil")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    vedil(args).status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    for (name, want) in [
        ("identity_kernel.json", 0),
        ("rank_one_kernel.json", 0),
        ("zero_kernel.json", 0),
        ("matrix_swap_kernel.json", 0),
        ("module_identity.json", 0),
        ("z2_sznagy.json", 0),
        ("stinespring_identity.json", 0),
        ("non_psd.json", 1),
        ("broken_semigroup.json", 1),
        ("transpose_map.json", 1),
    ] {
        assert_eq!(code(&["check", path(&fixture(name))]), want, "{name}");
    }
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"format": "nonsense"}"#).unwrap();
    assert_eq!(code(&["check", path(&bad)]), 2);
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&["dilate", path(&bad)]), 2);
    assert_eq!(code(&["check", path(&dir.path().join("missing.json"))]), 2);
}

#[test]
fn dilate_without_timestamp_is_deterministic() {
    for name in ["z2_sznagy.json", "identity_kernel.json", "stinespring_identity.json", "module_identity.json"] {
        let p = fixture(name);
        let a = vedil(&["dilate", path(&p), "--no-timestamp"]);
        let b = vedil(&["dilate", path(&p), "--no-timestamp"]);
        assert_eq!(a.status.code(), Some(0), "{name}");
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn certificates_verify_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let problem = fixture("z2_sznagy.json");
    let cert = dir.path().join("cert.json");
    assert_eq!(code(&["dilate", path(&problem), "-o", path(&cert), "--no-timestamp"]), 0);
    assert_eq!(code(&["verify", path(&problem), path(&cert)]), 0);

    let orig: Value = serde_json::from_slice(&std::fs::read(&cert).unwrap()).unwrap();

    // Perturb one entry of pi.
    let mut bad = orig.clone();
    let entry = &mut bad["outputs"]["pi"]["g1"][0][0][0];
    *entry = Value::from(entry.as_f64().unwrap() + 1e-3);
    let tampered = dir.path().join("pi.json");
    std::fs::write(&tampered, serde_json::to_vec(&bad).unwrap()).unwrap();
    assert_eq!(code(&["verify", path(&problem), path(&tampered)]), 1);

    // Loosening the tolerance breaks the digest.
    let mut bad = orig.clone();
    bad["tol"] = Value::from(1.0);
    std::fs::write(&tampered, serde_json::to_vec(&bad).unwrap()).unwrap();
    assert_eq!(code(&["verify", path(&problem), path(&tampered)]), 1);

    // A certificate for another problem does not verify.
    assert_eq!(code(&["verify", path(&fixture("identity_kernel.json")), path(&cert)]), 1);
}

#[test]
fn rk_emits_a_passing_certificate() {
    let out = vedil(&["rk", path(&fixture("rank_one_kernel.json")), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["command"], "rk");
}

#[test]
fn failing_problems_produce_failing_certificates() {
    let out = vedil(&["dilate", path(&fixture("non_psd.json")), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn text_format_is_available() {
    let out = vedil(&["check", path(&fixture("identity_kernel.json")), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
    assert!(serde_json::from_slice::<Value>(&out.stdout).is_err());
}
