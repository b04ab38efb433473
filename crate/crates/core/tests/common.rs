#![allow(dead_code)]

use hartree_core::{Complex64, GridSpec, ScalarField, SpectrumField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_field(grid: &GridSpec, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ScalarField::new(grid.clone(), v).unwrap()
}

/// Random trigonometric polynomial with modes `|m|_inf <= max_mode`.
pub fn band_limited(grid: &GridSpec, seed: u64, max_mode: i64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let signed = |i: usize| if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
    let modes = (0..grid.len())
        .map(|idx| {
            let (i, j, k) = grid.unravel(idx);
            if signed(i).abs() <= max_mode && signed(j).abs() <= max_mode && signed(k).abs() <= max_mode {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::default()
            }
        })
        .collect();
    SpectrumField::new(grid.clone(), modes).unwrap().into_field()
}

pub fn gaussian(grid: &GridSpec, amplitude: f64, width: f64, center: [f64; 3]) -> ScalarField {
    ScalarField::from_real_fn(grid, |x| {
        let r2: f64 = (0..3).map(|d| (x[d] - center[d]).powi(2)).sum();
        amplitude * (-r2 / (width * width)).exp()
    })
}

pub fn rel_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.sub(b).unwrap().max_abs() / b.max_abs().max(1e-300)
}
