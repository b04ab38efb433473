//! Acceptance criteria; each test prints one PASS/FAIL line plus its checks.

use std::sync::{Mutex, OnceLock};

use hartree_core::acceptance::{self, CriterionReport, Suite};

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(Suite::new)
}

/// Criteria run one at a time so their runtimes are not inflated by each other.
fn exclusive() -> std::sync::MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(r: CriterionReport) {
    println!("{}", r.line());
    print!("{}", r.details());
    assert!(r.passed(), "{}", r.line());
}

#[test]
fn criterion_01_spectral_correctness() {
    let _guard = exclusive();
    report(acceptance::spectral_correctness());
}

#[test]
fn criterion_02_conservation() {
    let _guard = exclusive();
    report(acceptance::conservation());
}

#[test]
fn criterion_03_splitting_order() {
    let _guard = exclusive();
    report(acceptance::splitting_order());
}

#[test]
fn criterion_04_scaling_symmetry() {
    let _guard = exclusive();
    report(acceptance::scaling_symmetry());
}

#[test]
fn criterion_05_ground_state() {
    let _guard = exclusive();
    report(acceptance::ground_state(suite()));
}

#[test]
fn criterion_06_sharp_gagliardo_nirenberg() {
    let _guard = exclusive();
    report(acceptance::sharp_gn(suite()));
}

#[test]
fn criterion_07_virial_morawetz() {
    let _guard = exclusive();
    report(acceptance::virial_morawetz(suite()));
}

#[test]
fn criterion_08_subthreshold_scattering() {
    let _guard = exclusive();
    report(acceptance::subthreshold_regime(suite()));
}

#[test]
fn criterion_09_defocusing() {
    let _guard = exclusive();
    report(acceptance::defocusing());
}

#[test]
fn criterion_10_homogeneous_radial() {
    let _guard = exclusive();
    report(acceptance::homogeneous_radial(suite()));
}
