mod common;

use common::{gaussian, rel_diff};
use hartree_core::evolution::{evolve, evolve_steps, sponge_mask, strang_step, EvolveConfig, SpongeConfig, StopReason};
use hartree_core::model::{validate_params, HartreeModel, Sign};
use hartree_core::spectral::{free_propagator, mass};
use hartree_core::{make_grid, Complex64};
use proptest::prelude::*;

fn small_model(sign: Sign) -> HartreeModel {
    let g = make_grid(16, 12.0).unwrap();
    HartreeModel::new(&g, validate_params(2.0, 0.5, sign).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn time_reversal(amp in 0.2f64..1.5, dt in 1e-3f64..2e-2) {
        let m = small_model(Sign::Focusing);
        let u0 = gaussian(m.grid(), amp, 1.5, [0.0; 3]);
        let forward = evolve_steps(&u0, dt, 5, &m).unwrap();
        let back = evolve_steps(&forward.map(|v| v.conj()), dt, 5, &m).unwrap().map(|v| v.conj());
        prop_assert!(rel_diff(&back, &u0) < 1e-10);
        let undo = evolve_steps(&forward, -dt, 5, &m).unwrap();
        prop_assert!(rel_diff(&undo, &u0) < 1e-10);
    }

    #[test]
    fn step_conserves_mass(amp in 0.2f64..1.5, dt in 1e-3f64..2e-2) {
        let m = small_model(Sign::Focusing);
        let u0 = gaussian(m.grid(), amp, 1.5, [0.5, 0.0, -0.5]);
        let u1 = strang_step(&u0, dt, &m).unwrap();
        prop_assert!((mass(&u1) - mass(&u0)).abs() < 1e-12 * mass(&u0));
    }

    #[test]
    fn gauge_covariance(theta in -3.2f64..3.2) {
        let m = small_model(Sign::Focusing);
        let u0 = gaussian(m.grid(), 1.0, 1.5, [0.0; 3]);
        let phase = Complex64::from_polar(1.0, theta);
        let a = evolve_steps(&u0.scale(phase), 5e-3, 4, &m).unwrap();
        let b = evolve_steps(&u0, 5e-3, 4, &m).unwrap().scale(phase);
        prop_assert!(rel_diff(&a, &b) < 1e-12);
    }
}

#[test]
fn vanishing_data_follows_free_flow() {
    let m = small_model(Sign::Focusing);
    let u0 = gaussian(m.grid(), 1e-6, 1.5, [0.0; 3]);
    let u = evolve_steps(&u0, 1e-2, 10, &m).unwrap();
    let free = free_propagator(&u0, 0.1);
    assert!(rel_diff(&u, &free) < 1e-9);
}

#[test]
fn sponge_is_identity_inside_and_damps_outside() {
    let g = make_grid(32, 20.0).unwrap();
    let cfg = SpongeConfig::default();
    let mask = sponge_mask(&g, &cfg, 1e-2);
    let r2 = g.radius_squared();
    for (m, q) in mask.iter().zip(&r2) {
        assert!(*m > 0.0 && *m <= 1.0);
        if q.sqrt() < 0.5 * 10.0 - 1e-9 {
            assert_eq!(*m, 1.0);
        }
    }
    assert!(mask.iter().any(|m| *m < 1.0));
}

#[test]
fn sponge_only_removes_mass() {
    let g = make_grid(32, 16.0).unwrap();
    let m = HartreeModel::new(&g, validate_params(2.0, 0.5, Sign::Defocusing).unwrap());
    let u0 = gaussian(&g, 1.0, 1.0, [0.0; 3]);
    let cfg = EvolveConfig {
        dt: 2e-3,
        t_end: 2.0,
        record_every: 50,
        sponge: Some(SpongeConfig::default()),
        tail_cap: 1e-2,
        ..Default::default()
    };
    let traj = evolve(&u0, &cfg, &m, None).unwrap();
    assert_eq!(traj.stop_reason, StopReason::TEnd);
    for w in traj.records.windows(2) {
        assert!(w[1].mass <= w[0].mass * (1.0 + 1e-12));
    }
    assert!(traj.records.last().unwrap().mass < 0.9 * traj.records[0].mass);
}

#[test]
fn gradient_cap_stops_the_run() {
    let g = make_grid(16, 12.0).unwrap();
    let m = HartreeModel::new(&g, validate_params(2.0, 0.5, Sign::Focusing).unwrap());
    let u0 = gaussian(&g, 1.0, 1.5, [0.0; 3]);
    let k0 = m.kinetic(&u0).sqrt();
    let cfg = EvolveConfig {
        dt: 1e-3,
        t_end: 0.5,
        record_every: 10,
        grad_cap: 0.5 * k0,
        ..Default::default()
    };
    let traj = evolve(&u0, &cfg, &m, None).unwrap();
    assert_eq!(traj.stop_reason, StopReason::GradCap);
    assert_eq!(traj.steps, 1);
}

#[test]
fn records_land_on_the_record_grid() {
    let m = small_model(Sign::Defocusing);
    let u0 = gaussian(m.grid(), 0.5, 1.5, [0.0; 3]);
    let cfg = EvolveConfig {
        dt: 1e-2,
        t_end: 0.35,
        record_every: 10,
        ..Default::default()
    };
    let traj = evolve(&u0, &cfg, &m, None).unwrap();
    let times: Vec<f64> = traj.records.iter().map(|r| r.t).collect();
    assert_eq!(times.len(), 5);
    for (t, want) in times.iter().zip([0.0, 0.1, 0.2, 0.3, 0.35]) {
        assert!((t - want).abs() < 1e-12, "{times:?}");
    }
    assert!((traj.t_final - 0.35).abs() < 1e-12);
}

#[test]
fn evolution_is_deterministic() {
    let m = small_model(Sign::Focusing);
    let u0 = gaussian(m.grid(), 0.8, 1.5, [0.0; 3]);
    let a = evolve_steps(&u0, 1e-2, 20, &m).unwrap();
    let b = evolve_steps(&u0, 1e-2, 20, &m).unwrap();
    assert_eq!(a.values(), b.values());
}
