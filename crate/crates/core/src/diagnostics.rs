//! Monitoring functionals: Morawetz action and its identities, tightness,
//! frequency scale, Strichartz accumulation and the scattering detector.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{HartreeError, Result};
use crate::field::ScalarField;
use crate::littlewood_paley::psi;
use crate::model::{riesz_constant, HartreeModel};
use crate::spectral;

/// Plateau value `a = C R^2` of the truncated weight beyond `2R`, fixed by the
/// quintic that matches `|x|^2` to second order at `R` and flattens at `2R`.
pub const TRUNCATED_PLATEAU: f64 = 77.0 / 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MorawetzWeight {
    /// `a = |x|^2`
    Quadratic,
    /// `a = |x|^2` on `|x| <= R`, constant beyond `2R`, C^2 in between.
    Truncated { r: f64 },
}

impl MorawetzWeight {
    pub fn truncated(r: f64, box_len: f64) -> Result<Self> {
        if !(r > 0.0) || r >= box_len / 4.0 {
            return Err(HartreeError::Param {
                name: "R",
                reason: format!("truncation radius {r} must lie in (0, L/4)"),
            });
        }
        Ok(MorawetzWeight::Truncated { r })
    }

    pub fn plateau(&self) -> Option<f64> {
        match self {
            MorawetzWeight::Quadratic => None,
            MorawetzWeight::Truncated { .. } => Some(TRUNCATED_PLATEAU),
        }
    }

    /// Radial profile derivatives `[a, a', a'', a''']` at radius `r`.
    pub fn radial(&self, r: f64) -> [f64; 4] {
        match *self {
            MorawetzWeight::Quadratic => [r * r, 2.0 * r, 2.0, 0.0],
            MorawetzWeight::Truncated { r: big } => {
                if r <= big {
                    [r * r, 2.0 * r, 2.0, 0.0]
                } else if r >= 2.0 * big {
                    [TRUNCATED_PLATEAU * big * big, 0.0, 0.0, 0.0]
                } else {
                    let s = (r - big) / big;
                    // A'(s) = (1-s)^2 (2 + 6s + 12s^2) = 2 + 2s + 2s^2 - 18s^3 + 12s^4
                    let a = 1.0 + 2.0 * s + s * s + (2.0 / 3.0) * s.powi(3) - 4.5 * s.powi(4)
                        + 2.4 * s.powi(5);
                    let a1 = 2.0 + 2.0 * s + 2.0 * s * s - 18.0 * s.powi(3) + 12.0 * s.powi(4);
                    let a2 = 2.0 + 4.0 * s - 54.0 * s * s + 48.0 * s.powi(3);
                    let a3 = 4.0 - 108.0 * s + 144.0 * s * s;
                    [big * big * a, big * a1, a2, a3 / big]
                }
            }
        }
    }

    /// `a'(r) / r`, finite at the origin.
    fn slope_over_r(&self, r: f64) -> f64 {
        let [_, a1, a2, _] = self.radial(r);
        if r < 1e-12 {
            a2
        } else {
            a1 / r
        }
    }
}

/// `M = 2 Im int conj(u) grad u . grad a`.
pub fn morawetz_action(u: &ScalarField, weight: &MorawetzWeight) -> f64 {
    let grid = u.grid();
    let grad = spectral::gradient(u);
    let mut acc = 0.0;
    for (idx, v) in u.values().iter().enumerate() {
        let x = grid.position(idx);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let s = weight.slope_over_r(r);
        let mut dot = Complex64::default();
        for c in 0..3 {
            dot += grad[c].values()[idx] * (x[c] * s);
        }
        acc += (v.conj() * dot).im;
    }
    2.0 * acc * grid.cell_volume()
}

/// `dM/dt` for the quadratic weight with the regularized weight's exact
/// dilation rate: `8K - (4 sigma / p) [(3p - 3 - alpha) P + 2b P_q]`,
/// `P_q` carrying the factor `|x|^2 / (|x|^2 + eps^2)`. Equals `8(K - sigma P)`
/// when `b = 0`.
pub fn virial_rhs(u: &ScalarField, model: &HartreeModel) -> Result<f64> {
    let k = model.kinetic(u);
    let t = model.nonlinear_terms(u.values())?;
    let p_full = model.potential_from_terms(&t);
    let p_q = model.potential_dilation_weighted(&t);
    let prm = model.params();
    Ok(8.0 * k
        - 4.0 * prm.sigma() / prm.p
            * ((3.0 * prm.p - 3.0 - prm.alpha) * p_full + 2.0 * prm.b * p_q))
}

/// `8 (K - sigma P)`.
pub fn virial_rhs_unregularized(u: &ScalarField, model: &HartreeModel) -> Result<f64> {
    Ok(8.0 * (model.kinetic(u) - model.params().sigma() * model.potential_energy(u)?))
}

/// `8K + 4 int |u|^2 x . grad Phi`, exact for the discrete flow with frozen phase.
pub fn virial_rhs_phase(u: &ScalarField, model: &HartreeModel) -> Result<f64> {
    let grid = u.grid();
    let phi = model.hartree_phase(u)?;
    let gphi = spectral::gradient(&phi);
    let mut acc = 0.0;
    for (idx, v) in u.values().iter().enumerate() {
        let x = grid.position(idx);
        let d = x[0] * gphi[0].values()[idx].re
            + x[1] * gphi[1].values()[idx].re
            + x[2] * gphi[2].values()[idx].re;
        acc += v.norm_sqr() * d;
    }
    Ok(8.0 * model.kinetic(u) + 4.0 * acc * grid.cell_volume())
}

/// `6(2 - 4/p) + 8b/p + 4(3 - alpha)/p` with `p = 3 + alpha - 2b`.
pub fn morawetz_coefficient_sum(alpha: Ratio<i64>, b: Ratio<i64>) -> Ratio<i64> {
    let p = Ratio::from_integer(3) + alpha - Ratio::from_integer(2) * b;
    Ratio::from_integer(6) * (Ratio::from_integer(2) - Ratio::from_integer(4) / p)
        + Ratio::from_integer(8) * b / p
        + Ratio::from_integer(4) * (Ratio::from_integer(3) - alpha) / p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorawetzTerms {
    pub bilaplacian: f64,
    pub hessian: f64,
    pub laplacian: f64,
    pub weight_gradient: f64,
    pub double_integral: f64,
    /// Stride-doubled estimate of the non-factorized double-integral part.
    pub double_integral_coarse: f64,
}

impl MorawetzTerms {
    pub fn total(&self) -> f64 {
        self.bilaplacian + self.hessian + self.laplacian + self.weight_gradient + self.double_integral
    }
}

fn double_sum_exterior(
    model: &HartreeModel,
    density: &[f64],
    weight: &MorawetzWeight,
    r_in: f64,
    stride: usize,
) -> f64 {
    let grid = model.grid();
    let n = grid.n();
    let alpha = model.params().alpha;
    let gmax = density.iter().cloned().fold(0.0, f64::max);
    let mut pts: Vec<([f64; 3], [f64; 3], f64, bool)> = Vec::new();
    for i in (0..n).step_by(stride) {
        for j in (0..n).step_by(stride) {
            for k in (0..n).step_by(stride) {
                let idx = grid.index(i, j, k);
                let g = density[idx];
                if g <= 1e-14 * gmax {
                    continue;
                }
                let x = grid.position(idx);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let s = weight.slope_over_r(r);
                pts.push((x, [s * x[0], s * x[1], s * x[2]], g, r <= r_in));
            }
        }
    }
    let mut acc = 0.0;
    for a in 0..pts.len() {
        for b in (a + 1)..pts.len() {
            let (x, gx, fx, inx) = pts[a];
            let (y, gy, fy, iny) = pts[b];
            if inx && iny {
                continue;
            }
            let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
            let d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            let num = (gx[0] - gy[0]) * d[0] + (gx[1] - gy[1]) * d[1] + (gx[2] - gy[2]) * d[2];
            acc += 2.0 * num * d2.powf((alpha - 5.0) / 2.0) * fx * fy;
        }
    }
    let dv = (stride as f64 * grid.h()).powi(3);
    acc * dv * dv
}

/// All five terms of the Morawetz identity for a radial weight. The double
/// integral uses the spectral Riesz potential where both points lie in the
/// quadratic region and a direct sum on a stride-`stride` subgrid elsewhere.
pub fn morawetz_rhs_terms(
    u: &ScalarField,
    weight: &MorawetzWeight,
    model: &HartreeModel,
    stride: usize,
) -> Result<MorawetzTerms> {
    let grid = u.grid();
    let prm = *model.params();
    let (sigma, p, alpha, b, eps) = (prm.sigma(), prm.p, prm.alpha, prm.b, prm.eps_reg);
    let dv = grid.cell_volume();
    let grad = spectral::gradient(u);
    let t = model.nonlinear_terms(u.values())?;
    let r_in = match *weight {
        MorawetzWeight::Quadratic => f64::INFINITY,
        MorawetzWeight::Truncated { r } => r,
    };

    let (mut t1, mut t2, mut t3, mut t4) = (0.0, 0.0, 0.0, 0.0);
    let mut inside = vec![0.0; grid.len()];
    for (idx, v) in u.values().iter().enumerate() {
        let x = grid.position(idx);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let [_, a1, a2, a3] = weight.radial(r);
        let a1_r = weight.slope_over_r(r);
        let du = [grad[0].values()[idx], grad[1].values()[idx], grad[2].values()[idx]];
        let grad_sq: f64 = du.iter().map(|c| c.norm_sqr()).sum();
        let (radial_sq, radial_re) = if r < 1e-12 {
            (0.0, 0.0)
        } else {
            let d = (du[0] * x[0] + du[1] * x[1] + du[2] * x[2]) / r;
            (d.norm_sqr(), (v.conj() * d).re)
        };
        // grad(Laplacian a) . grad|u|^2, the bilaplacian term after integrating by parts
        let dlap = if r < 1e-12 { 0.0 } else { a3 + 2.0 * a2 / r - 2.0 * a1 / (r * r) };
        t1 += dlap * 2.0 * radial_re;
        t2 += 4.0 * (a2 * radial_sq + a1_r * (grad_sq - radial_sq));
        let lap_a = a2 + 2.0 * a1_r;
        let nl = t.potential[idx] * t.density[idx];
        t3 += lap_a * nl;
        t4 += a1 * r / (r * r + eps * eps) * nl;
        if r <= r_in {
            inside[idx] = t.density[idx];
        }
    }
    let v_in = model.riesz().apply_real(grid, &inside);
    let factorized: f64 = inside.iter().zip(&v_in).map(|(g, v)| g * v).sum::<f64>() * dv;
    let kconst = riesz_constant(alpha);
    let pref = -sigma * 2.0 * kconst * (3.0 - alpha) / p;
    let (ext, ext_coarse) = if r_in.is_finite() {
        (
            double_sum_exterior(model, &t.density, weight, r_in, stride),
            double_sum_exterior(model, &t.density, weight, r_in, 2 * stride),
        )
    } else {
        (0.0, 0.0)
    };
    let in_part = -sigma * 4.0 * (3.0 - alpha) / p * factorized;
    if ext.abs() > 1e-12 * in_part.abs() && (ext - ext_coarse).abs() > 0.1 * ext.abs() {
        log::warn!(
            "double-integral quadrature unresolved: stride {stride} gives {ext:.4e}, stride {} gives {ext_coarse:.4e}",
            2 * stride
        );
    }
    Ok(MorawetzTerms {
        bilaplacian: t1 * dv,
        hessian: t2 * dv,
        laplacian: -sigma * (2.0 - 4.0 / p) * t3 * dv,
        weight_gradient: -sigma * 4.0 * b / p * t4 * dv,
        double_integral: in_part + pref * ext,
        double_integral_coarse: in_part + pref * ext_coarse,
    })
}

pub fn morawetz_rhs_truncated(
    u: &ScalarField,
    weight: &MorawetzWeight,
    model: &HartreeModel,
    stride: usize,
) -> Result<f64> {
    Ok(morawetz_rhs_terms(u, weight, model, stride)?.total())
}

/// `int_{|x|>R} |grad u|^2 + |u|^2 / (|x|^2 + eps^2) + (I_alpha * w|u|^p) w |u|^p`.
pub fn tightness_measure(u: &ScalarField, r: f64, model: &HartreeModel) -> Result<f64> {
    Ok(tightness_many(u, &[r], model)?[0])
}

pub fn tightness_many(u: &ScalarField, radii: &[f64], model: &HartreeModel) -> Result<Vec<f64>> {
    let grid = u.grid();
    let grad = spectral::gradient(u);
    let t = model.nonlinear_terms(u.values())?;
    let eps2 = model.params().eps_reg * model.params().eps_reg;
    let r2 = grid.radius_squared();
    let mut out = vec![0.0; radii.len()];
    for (idx, v) in u.values().iter().enumerate() {
        let g: f64 = grad.iter().map(|c| c.values()[idx].norm_sqr()).sum();
        let dens = g + v.norm_sqr() / (r2[idx] + eps2) + t.potential[idx] * t.density[idx];
        for (o, &r) in out.iter_mut().zip(radii) {
            if r2[idx] > r * r {
                *o += dens;
            }
        }
    }
    let dv = grid.cell_volume();
    Ok(out.into_iter().map(|o| o * dv).collect())
}

/// Smallest dyadic `N = 2^j` with `||P_{<=N} u||^2_{H^1} >= ||u||^2_{H^1} / 2`,
/// never below `2 pi / L`.
pub fn frequency_scale(u: &ScalarField) -> Result<f64> {
    let grid = u.grid();
    let spec = u.to_spectrum();
    let k2 = grid.wavenumber_squared();
    let e: Vec<f64> = spec.modes().iter().zip(&k2).map(|(c, k)| k * c.norm_sqr()).collect();
    let total: f64 = e.iter().sum();
    if total == 0.0 {
        return Err(HartreeError::ZeroField);
    }
    let floor = 2.0 * std::f64::consts::PI / grid.l();
    let kmax = 3f64.sqrt() * grid.nyquist();
    let mut j = floor.log2().floor() as i32;
    loop {
        let big_n = 2f64.powi(j);
        let low: f64 = e
            .iter()
            .zip(&k2)
            .map(|(w, k)| w * psi(k.sqrt() / big_n).powi(2))
            .sum();
        if low >= 0.5 * total || big_n > 2.0 * kmax {
            return Ok(big_n.max(floor));
        }
        j += 1;
    }
}

/// Space exponent `6p/(p-2)` of the `S^1` norm.
pub fn strichartz_space_exponent(p: f64) -> f64 {
    6.0 * p / (p - 2.0)
}

/// `(sum dt ||u(t)||^{2p}_{L^{6p/(p-2)}})^{1/(2p)}` for sampled norms.
pub fn s1_accumulate(dts: &[f64], norms: &[f64], p: f64) -> f64 {
    let s: f64 = dts
        .iter()
        .zip(norms)
        .map(|(dt, q)| dt * q.powf(2.0 * p))
        .sum();
    s.powf(1.0 / (2.0 * p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Drift tolerance relative to `||u0||_{H^1}`.
    pub tol: f64,
    /// Length of the final time window.
    pub window: f64,
    pub decay_factor: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            window: 2.0,
            decay_factor: 100.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatterVerdict {
    pub scattered: bool,
    pub t_detect: Option<f64>,
    pub pullback_drift: f64,
    pub p_decay_factor: f64,
    #[serde(rename = "S1_total")]
    pub s1_total: f64,
    #[serde(skip)]
    pub u_plus: Option<ScalarField>,
}

/// Judge scattering from pullback snapshots `v(t) = exp(-it Laplacian) u(t)`.
pub fn scattering_detector(
    snapshots: &[(f64, ScalarField)],
    p0: f64,
    p_end: f64,
    hdot0: f64,
    s1_total: f64,
    cfg: &DetectorConfig,
) -> ScatterVerdict {
    let decay = if p_end > 0.0 { p0 / p_end } else { f64::INFINITY };
    let Some(t_end) = snapshots.last().map(|s| s.0) else {
        return ScatterVerdict {
            scattered: false,
            t_detect: None,
            pullback_drift: f64::NAN,
            p_decay_factor: decay,
            s1_total,
            u_plus: None,
        };
    };
    let pulled: Vec<(f64, ScalarField)> = snapshots
        .iter()
        .filter(|(t, _)| *t >= t_end - cfg.window - 1e-12)
        .map(|(t, u)| (*t, spectral::free_propagator(u, -*t)))
        .collect();
    let mut drift: f64 = 0.0;
    for a in 0..pulled.len() {
        for b in (a + 1)..pulled.len() {
            let d = pulled[a].1.sub(&pulled[b].1).expect("snapshots share a grid");
            drift = drift.max(spectral::sobolev_h1dot(&d));
        }
    }
    let scale = if hdot0 > 0.0 { hdot0 } else { 1.0 };
    let drift_rel = drift / scale;
    let scattered = pulled.len() >= 2 && drift_rel < cfg.tol && decay > cfg.decay_factor;
    ScatterVerdict {
        scattered,
        t_detect: if scattered { Some(pulled[0].0) } else { None },
        pullback_drift: drift_rel,
        p_decay_factor: decay,
        s1_total,
        u_plus: pulled.last().map(|p| p.1.clone()),
    }
}

/// Variant of [`scattering_detector`] for runs with absorption: the drift is
/// `max_j ||u(t_j) - lin(t_j - t_0) u(t_0)||_{H^1}` over the final window,
/// where `lin(u, s)` advances `u` by `s` under the linear reference flow.
pub fn scattering_detector_with(
    snapshots: &[(f64, ScalarField)],
    p0: f64,
    p_end: f64,
    hdot0: f64,
    s1_total: f64,
    cfg: &DetectorConfig,
    lin: impl Fn(&ScalarField, f64) -> ScalarField,
) -> ScatterVerdict {
    let decay = if p_end > 0.0 { p0 / p_end } else { f64::INFINITY };
    let t_end = snapshots.last().map(|s| s.0).unwrap_or(0.0);
    let window: Vec<&(f64, ScalarField)> = snapshots
        .iter()
        .filter(|(t, _)| *t >= t_end - cfg.window - 1e-12)
        .collect();
    let mut drift: f64 = if window.len() < 2 { f64::NAN } else { 0.0 };
    if let Some((t0, u0)) = window.first() {
        let mut w = u0.clone();
        let mut t = *t0;
        for (tj, uj) in &window[1..] {
            w = lin(&w, tj - t);
            t = *tj;
            drift = drift.max(spectral::sobolev_h1dot(&uj.sub(&w).expect("snapshots share a grid")));
        }
    }
    let scale = if hdot0 > 0.0 { hdot0 } else { 1.0 };
    let drift_rel = drift / scale;
    let scattered = window.len() >= 2 && drift_rel < cfg.tol && decay > cfg.decay_factor;
    ScatterVerdict {
        scattered,
        t_detect: if scattered { window.first().map(|w| w.0) } else { None },
        pullback_drift: drift_rel,
        p_decay_factor: decay,
        s1_total,
        u_plus: window.last().map(|(t, u)| spectral::free_propagator(u, -*t)),
    }
}

/// Pairwise `H^1` distances of `N(t)^{-1/2} u(t, x / N(t))`; entries are NaN
/// where the renormalized field does not fit on the grid.
pub fn renormalized_orbit_distances(snapshots: &[(f64, ScalarField)]) -> Vec<Vec<f64>> {
    let renorm: Vec<Option<ScalarField>> = snapshots
        .iter()
        .map(|(_, u)| {
            let n = frequency_scale(u).ok()?;
            spectral::rescale_field(u, 1.0 / n).ok()
        })
        .collect();
    let m = renorm.len();
    let mut out = vec![vec![f64::NAN; m]; m];
    for a in 0..m {
        for b in 0..m {
            if let (Some(x), Some(y)) = (&renorm[a], &renorm[b]) {
                out[a][b] = spectral::sobolev_h1dot(&x.sub(y).expect("shared grid"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_weight_is_c2() {
        let w = MorawetzWeight::Truncated { r: 2.0 };
        let h = 1e-7;
        for r in [2.0, 4.0] {
            let lo = w.radial(r - h);
            let hi = w.radial(r + h);
            for d in 0..3 {
                assert!((lo[d] - hi[d]).abs() < 1e-5, "r={r} d={d}: {lo:?} {hi:?}");
            }
        }
        assert!((w.radial(4.0)[0] - TRUNCATED_PLATEAU * 4.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_weight_derivative_bounds() {
        let big = 3.0;
        let w = MorawetzWeight::Truncated { r: big };
        for i in 0..=200 {
            let r = big + big * i as f64 / 200.0;
            let [a, a1, a2, a3] = w.radial(r);
            assert!(a > 0.0 && a1 >= 0.0);
            assert!(a <= 3.0 * big * big && a1 <= 3.0 * big && a2.abs() <= 6.0 && a3.abs() <= 60.0 / big);
        }
    }

    #[test]
    fn coefficient_sum_example() {
        let s = morawetz_coefficient_sum(Ratio::from_integer(2), Ratio::new(1, 2));
        assert_eq!(s, Ratio::from_integer(8));
    }

    #[test]
    fn s1_constant_profile() {
        let t = 2.0;
        let p = 4.0;
        let v = s1_accumulate(&[t / 4.0; 4], &[1.5; 4], p);
        assert!((v - 1.5 * t.powf(1.0 / (2.0 * p))).abs() < 1e-14);
        assert_eq!(s1_accumulate(&[0.1; 3], &[0.0; 3], p), 0.0);
    }
}
