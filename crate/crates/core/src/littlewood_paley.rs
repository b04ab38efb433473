//! Smooth dyadic frequency projections.

use crate::field::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// `P_{<=N}`
    Low,
    /// `P_N = P_{<=N} - P_{<=N/2}`
    Band,
    /// `P_{>N}`
    High,
}

/// Radial cutoff: 1 on `|xi| <= 1`, 0 on `|xi| >= 11/10`, quintic smoothstep between.
pub fn psi(xi: f64) -> f64 {
    let t = (xi - 1.0) / 0.1;
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

pub fn multiplier(k: f64, big_n: f64, kind: Projection) -> f64 {
    match kind {
        Projection::Low => psi(k / big_n),
        Projection::Band => psi(k / big_n) - psi(2.0 * k / big_n),
        Projection::High => 1.0 - psi(k / big_n),
    }
}

pub fn littlewood_paley_project(f: &ScalarField, big_n: f64, kind: Projection) -> ScalarField {
    assert!(big_n > 0.0, "dyadic frequency must be positive");
    let m: Vec<f64> = f
        .grid()
        .wavenumber_squared()
        .into_iter()
        .map(|k2| multiplier(k2.sqrt(), big_n, kind))
        .collect();
    let mut spec = f.to_spectrum();
    spec.apply_multiplier(&m);
    spec.into_field()
}
