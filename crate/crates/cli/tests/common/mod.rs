#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Runs the binary with a clean environment.
pub fn nflp(args: &[&str]) -> Output {
    nflp_env(args, &[])
}

pub fn nflp_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nflp"));
    cmd.env_clear().args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Error object from stderr, checked against the error schema.
pub fn stderr_error(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert_valid("error.schema.json", &v);
    assert_eq!(v["error"]["exit_code"].as_i64(), out.status.code().map(i64::from));
    v
}

pub fn schema_errors(schema_name: &str, instance: &Value) -> Vec<String> {
    let validator = jsonschema::validator_for(&schema(schema_name)).expect("schema compiles");
    validator.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path)).collect()
}

pub fn assert_valid(schema_name: &str, instance: &Value) {
    let errors = schema_errors(schema_name, instance);
    assert!(errors.is_empty(), "{schema_name}: {errors:#?}");
}

pub fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}
