use std::process::Command;

fn hartree() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hartree"));
    c.env("RUST_LOG", "warn");
    c
}

#[test]
fn invalid_config_exits_with_2_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ini");
    std::fs::write(&path, "scenario = evolve\n[grid]\nn = 12\n").unwrap();
    let out = hartree().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.n"));
}

#[test]
fn missing_config_exits_with_2() {
    let out = hartree().args(["run", "/nonexistent/config.ini"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("defocusing.ini");
    std::fs::write(
        &path,
        "scenario = defocusing\n[grid]\nn = 16\nL = 12\n[model]\nsign = defocusing\n\
         [evolve]\ndt = 1e-2\nt_end = 0.1\nrecord_every = 5\n",
    )
    .unwrap();
    let out_dir = dir.path().join("elsewhere");
    let status = hartree()
        .arg("run")
        .arg(&path)
        .arg("--output-dir")
        .arg(&out_dir)
        .args(["--seed", "42", "--threads", "1"])
        .status()
        .unwrap();
    assert!(status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert!(out_dir.join("trajectory.csv").is_file());
}

#[test]
fn ground_state_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gs.ini");
    std::fs::write(&path, "scenario = evolve\n[grid]\nn = 16\nL = 12\n[output]\ndir = gs\n").unwrap();
    let status = hartree().arg("ground-state").arg(&path).status().unwrap();
    assert!(status.success());
    assert!(dir.path().join("gs/ground_state.ighc").is_file());
}

#[test]
fn verify_single_criterion() {
    let out = hartree().args(["verify", "--only", "3"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("criterion  3"), "{stdout}");
    assert_eq!(out.status.code(), Some(if stdout.contains("PASS") { 0 } else { 4 }));
}
