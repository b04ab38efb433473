mod common;

use common::{gaussian, random_field, rel_diff};
use hartree_core::model::{validate_params, HartreeModel, Sign};
use hartree_core::{make_grid, Complex64, GridSpec};
use proptest::prelude::*;

fn model(grid: &GridSpec, alpha: f64, b: f64) -> HartreeModel {
    HartreeModel::new(grid, validate_params(alpha, b, Sign::Focusing).unwrap())
}

fn admissible() -> impl Strategy<Value = (f64, f64)> {
    (0.3f64..2.9).prop_flat_map(|a| {
        let bound = hartree_core::model::b_bound(a);
        (Just(a), 0.0..bound)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn potential_is_nonnegative((alpha, b) in admissible(), seed in any::<u64>()) {
        let g = make_grid(16, 10.0).unwrap();
        let m = model(&g, alpha, b);
        let f = random_field(&g, seed);
        prop_assert!(m.potential_energy(&f).unwrap() >= -1e-12);
    }

    #[test]
    fn potential_homogeneity((alpha, b) in admissible(), c in 0.2f64..3.0) {
        let g = make_grid(16, 10.0).unwrap();
        let m = model(&g, alpha, b);
        let f = gaussian(&g, 1.0, 1.3, [0.3, -0.2, 0.1]);
        let p = m.params().p;
        let lhs = m.potential_energy(&f.scale_real(c)).unwrap();
        let rhs = c.powf(2.0 * p) * m.potential_energy(&f).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn gauge_covariance((alpha, b) in admissible(), theta in -3.2f64..3.2, seed in any::<u64>()) {
        let g = make_grid(16, 10.0).unwrap();
        let m = model(&g, alpha, b);
        let f = random_field(&g, seed);
        let phase = Complex64::from_polar(1.0, theta);
        let rotated = f.scale(phase);
        let n1 = m.nonlinearity(&rotated).unwrap();
        let n2 = m.nonlinearity(&f).unwrap().scale(phase);
        prop_assert!(rel_diff(&n1, &n2) < 1e-12);
        let (p1, p2) = (m.potential_energy(&rotated).unwrap(), m.potential_energy(&f).unwrap());
        prop_assert!((p1 - p2).abs() <= 1e-12 * p2);
    }

    #[test]
    fn hardy_inequality(seed in any::<u64>()) {
        // int |u|^2 / (|x|^2 + eps^2) <= 4 int |grad u|^2 on zero-mean data
        let g = make_grid(16, 10.0).unwrap();
        let f = random_field(&g, seed);
        let m0 = f.mean();
        let f = f.map(|v| v - m0);
        let r2 = g.radius_squared();
        let lhs: f64 = f.values().iter().zip(&r2).map(|(v, q)| v.norm_sqr() / (q + 1.0)).sum::<f64>() * g.cell_volume();
        prop_assert!(lhs <= 4.0 * hartree_core::model::kinetic(&f));
    }
}

#[test]
fn energy_splits_into_kinetic_and_potential() {
    let g = make_grid(32, 16.0).unwrap();
    let m = model(&g, 2.0, 0.5);
    let u = gaussian(&g, 1.2, 1.0, [0.0; 3]);
    let e = m.energy(&u).unwrap();
    let want = m.kinetic(&u) - m.potential_energy(&u).unwrap() / m.params().p;
    assert!((e - want).abs() < 1e-12 * want.abs());
    let d = m.with_sign(Sign::Defocusing);
    let want = m.kinetic(&u) + m.potential_energy(&u).unwrap() / m.params().p;
    assert!((d.energy(&u).unwrap() - want).abs() < 1e-12 * want);
}

#[test]
fn nonlinearity_is_gradient_of_potential() {
    // d/ds P(u + s v) at s = 0 equals 2p Re <N(u), v>
    let g = make_grid(16, 10.0).unwrap();
    let m = model(&g, 1.5, 0.4);
    let u = gaussian(&g, 1.0, 1.5, [0.2, 0.0, -0.1]);
    let v = gaussian(&g, 0.5, 1.0, [-0.5, 0.4, 0.0]);
    let s = 1e-5;
    let plus = m.potential_energy(&u.add(&v.scale_real(s)).unwrap()).unwrap();
    let minus = m.potential_energy(&u.sub(&v.scale_real(s)).unwrap()).unwrap();
    let fd = (plus - minus) / (2.0 * s);
    let nl = m.nonlinearity(&u).unwrap();
    let pairing = hartree_core::spectral::inner(&nl, &v).re;
    let exact = 2.0 * m.params().p * pairing;
    assert!((fd - exact).abs() < 1e-6 * exact.abs(), "fd {fd} exact {exact}");
}

#[test]
fn weight_is_one_when_b_vanishes() {
    let g = make_grid(16, 10.0).unwrap();
    let m = model(&g, 2.0, 0.0);
    assert!(m.weight().values().iter().all(|w| *w == 1.0));
    assert_eq!(m.params().p, 5.0);
}
