use std::path::Path;

use hartree_core::config::ExperimentConfig;
use hartree_core::experiment::{csv_header, run, RunOptions};
use hartree_core::HartreeError;

fn config(dir: &Path, body: &str) -> ExperimentConfig {
    ExperimentConfig::parse(body, dir).unwrap()
}

const DEFOCUSING: &str = "
scenario = defocusing
[grid]
n = 16
L = 12
[model]
sign = defocusing
[init]
amplitude = 0.8
width = 1.5
[evolve]
dt = 1e-2
t_end = 0.5
record_every = 10
[sponge]
enabled = true
[diagnostics]
tight_radii = 1, 3
[output]
dir = out
checkpoint_every = 2
";

#[test]
fn defocusing_run_writes_contracted_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), DEFOCUSING);
    let outcome = run(&cfg, &RunOptions::default()).unwrap();
    assert!(outcome.failure.is_none());
    let out = dir.path().join("out");
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,mass,E,K,P,Hdot,M_quad,virial_rhs,N_t,tight_R1,tight_R3,S1_accum,tail_fraction"
    );
    assert_eq!(csv_header(&[1.0, 3.0]), csv.lines().next().unwrap());
    assert_eq!(lines.count(), 6);
    for name in ["summary.json", "manifest.json", "final.ighc", "state_00000.ighc", "state_00002.ighc", "state_00004.ighc"] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["regime"], "defocusing");
    assert_eq!(summary["stop_reason"], "T_end");
    assert_eq!(summary["defocusing"]["energy_above_kinetic"], true);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"], DEFOCUSING);
    assert_eq!(manifest["config_sha256"], hartree_core::experiment::sha256_hex(DEFOCUSING.as_bytes()));
    let listed: Vec<&str> = manifest["artifacts"].as_array().unwrap().iter().map(|a| a["path"].as_str().unwrap()).collect();
    assert!(listed.contains(&"trajectory.csv"));
}

#[test]
fn same_config_gives_identical_csv_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(&config(a.path(), DEFOCUSING), &RunOptions::default()).unwrap();
    run(&config(b.path(), DEFOCUSING), &RunOptions::default()).unwrap();
    let read = |d: &Path| std::fs::read(d.join("out/trajectory.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    let man = |d: &Path| std::fs::read(d.join("out/manifest.json")).unwrap();
    assert_eq!(man(a.path()), man(b.path()));
}

#[test]
fn ground_state_then_sweep_and_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let gs_cfg = config(
        dir.path(),
        "scenario = ground_state\n[grid]\nn = 16\nL = 12\n[output]\ndir = gs\n",
    );
    run(&gs_cfg, &RunOptions::default()).unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("gs/summary.json")).unwrap()).unwrap();
    for key in ["C0", "K_W", "P_W", "E_W", "Hdot_W", "residual", "grid"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert!(summary["residual"].as_f64().unwrap() <= 1e-3);

    let sweep = config(
        dir.path(),
        "scenario = dichotomy\n[grid]\nn = 16\nL = 12\n[ground_state]\nload = gs/ground_state.ighc\n\
         [dichotomy]\nladder = 0.5, 1.0, 1.3\n[evolve]\ndt = 1e-2\nt_end = 0.2\nrecord_every = 10\n\
         [output]\ndir = sweep\nformats = json, csv\n",
    );
    run(&sweep, &RunOptions { threads: 2 }).unwrap();
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep/summary.json")).unwrap()).unwrap();
    let rows = s["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["regime"], "below_threshold");
    assert_eq!(rows[1]["regime"], "at_threshold");
    assert_eq!(rows[2]["regime"], "exploratory");
    assert!(dir.path().join("sweep/row_01/trajectory.csv").is_file());

    let gn = config(
        dir.path(),
        "scenario = gn_sample\nseed = 5\n[grid]\nn = 16\nL = 12\n[ground_state]\nload = gs/ground_state.ighc\n\
         [gn_sample]\nsamples = 20\n[output]\ndir = gn\n",
    );
    run(&gn, &RunOptions::default()).unwrap();
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("gn/summary.json")).unwrap()).unwrap();
    assert!(s["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-3);
    assert!(s["ratio_ground_state"].as_f64().unwrap() >= 0.999);
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("scenario = nope\n", "scenario"),
        ("scenario = evolve\n[grid]\nn = 48\n", "grid.n"),
        ("scenario = evolve\n[model]\nalpha = 3.5\n", "model"),
        ("scenario = evolve\n[evolve]\ndt = -1\n", "evolve"),
        ("scenario = evolve\n[ground_state]\nload = missing.ighc\n", "ground_state.load"),
        ("scenario = defocusing\n", "model.sign"),
        ("scenario = evolve\n[output]\nformats = json, xml\n", "output.formats"),
        ("scenario = evolve\n[init]\noffset = 1, 2\n", "init.offset"),
        ("scenario = evolve\n[sponge]\nenabled = maybe\n", "sponge.enabled"),
    ];
    for (text, key) in cases {
        match ExperimentConfig::parse(text, dir.path()) {
            Err(HartreeError::Config { key: k, .. }) => assert!(k.starts_with(key), "{text:?}: got key {k}"),
            other => panic!("{text:?}: expected config error, got {other:?}"),
        }
    }
}

#[test]
fn loaded_ground_state_must_match_grid() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &config(dir.path(), "scenario = ground_state\n[grid]\nn = 16\nL = 12\n[output]\ndir = gs\n"),
        &RunOptions::default(),
    )
    .unwrap();
    let cfg = config(
        dir.path(),
        "scenario = gn_sample\n[grid]\nn = 32\nL = 12\n[ground_state]\nload = gs/ground_state.ighc\n[output]\ndir = gn\n",
    );
    assert!(matches!(run(&cfg, &RunOptions::default()), Err(HartreeError::Config { .. })));
}
