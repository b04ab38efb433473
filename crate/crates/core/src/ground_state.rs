//! Ground state by Sobolev-preconditioned ascent of the Weinstein functional.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HartreeError, Result};
use crate::field::{ScalarField, SpectrumField};
use crate::grid::GridSpec;
use crate::model::{HartreeModel, Sign};
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initializer {
    /// `exp(-|x|^2)`
    Gaussian,
    /// `(1 + |x|^2)^{-1/2}`
    Bubble,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeinsteinConfig {
    pub max_iters: usize,
    /// Initial step; doubled after each accepted step up to `max_step`.
    pub tau: f64,
    pub max_step: f64,
    /// Stop once the relative J increase stays below this for 5 accepted steps.
    pub tol: f64,
    /// Stop once the preconditioned gradient norm drops below this.
    pub grad_tol: f64,
    pub init: Initializer,
}

impl Default for WeinsteinConfig {
    fn default() -> Self {
        Self {
            max_iters: 4000,
            tau: 1.0,
            max_step: 8.0,
            tol: 1e-14,
            grad_tol: 1e-8,
            init: Initializer::Gaussian,
        }
    }
}

impl WeinsteinConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !(self.max_step >= self.tau) {
            return Err(HartreeError::Param {
                name: "tau",
                reason: format!("step {} must be positive and <= max_step", self.tau),
            });
        }
        if !(self.tol > 0.0) || !(self.grad_tol > 0.0) {
            return Err(HartreeError::Param {
                name: "tol",
                reason: "tolerances must be positive".into(),
            });
        }
        Ok(())
    }
}

pub fn initial_profile(grid: &GridSpec, init: Initializer) -> ScalarField {
    match init {
        Initializer::Gaussian => {
            ScalarField::from_real_fn(grid, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp())
        }
        Initializer::Bubble => ScalarField::from_real_fn(grid, |x| {
            (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).powf(-0.5)
        }),
    }
}

/// `J(f) = P(f) / K(f)^p`.
pub fn weinstein_functional(f: &ScalarField, model: &HartreeModel) -> Result<f64> {
    let k = model.kinetic(f);
    if k == 0.0 {
        return Err(HartreeError::ZeroField);
    }
    Ok(model.potential_energy(f)? / k.powf(model.params().p))
}

#[derive(Debug, Clone)]
pub struct WeinsteinResult {
    /// Maximizer with zero mean and unit `H^1`-seminorm.
    pub field: ScalarField,
    pub j: f64,
    pub iterations: usize,
    pub converged: bool,
    /// J after every accepted step, starting with the initial value.
    pub history: Vec<f64>,
    pub grad_norm: f64,
}

/// Real part of the field, with zero mean and unit `H^1`-seminorm.
fn project(spec: &SpectrumField) -> Result<(SpectrumField, ScalarField)> {
    let real = spec.to_field().map(|v| Complex64::new(v.re, 0.0));
    let mut s = real.to_spectrum();
    s.modes_mut()[0] = Complex64::default();
    let k = spectral::kinetic_from_spectrum(&s);
    if !(k > 0.0) {
        return Err(HartreeError::ZeroField);
    }
    let c = 1.0 / k.sqrt();
    for v in s.modes_mut() {
        *v *= c;
    }
    let f = s.to_field().map(|v| Complex64::new(v.re, 0.0));
    Ok((s, f))
}

/// Ascent on the unit `H^1` sphere of zero-mean real fields. The mean is
/// removed because a constant adds `P` without adding gradient energy on
/// the torus.
pub fn maximize_weinstein(
    init: &ScalarField,
    cfg: &WeinsteinConfig,
    model: &HartreeModel,
) -> Result<WeinsteinResult> {
    cfg.validate()?;
    let scale = init.max_abs();
    if scale == 0.0 {
        return Err(HartreeError::ZeroField);
    }
    if init.imag_fraction() > 1e-12 {
        return Err(HartreeError::Param {
            name: "init",
            reason: "initializer must be real".into(),
        });
    }
    let min = init.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    if min < -0.05 * scale {
        return Err(HartreeError::Param {
            name: "init",
            reason: format!("initializer changes sign (min {min:.3e}, max {scale:.3e})"),
        });
    }
    let grid = model.grid().clone();
    let n3 = grid.len() as f64;
    let dv = grid.cell_volume();
    let k2 = grid.wavenumber_squared();

    let (mut fs, mut f) = project(&init.to_spectrum())?;
    let mut terms = model.nonlinear_terms(f.values())?;
    let mut j = model.potential_from_terms(&terms);
    let mut tau = cfg.tau;
    let mut history = vec![j];
    let mut quiet = 0usize;
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;

    for it in 0..cfg.max_iters {
        iterations = it;
        // N(f) from the cached terms
        let w = model.weight().values();
        let nf: Vec<f64> = (0..f.values().len())
            .map(|i| w[i] * terms.potential[i] * terms.abs_pm2[i] * f.values()[i].re)
            .collect();
        let ns = ScalarField::from_real(&grid, &nf).to_spectrum();
        let mut gs = fs.clone();
        for (idx, g) in gs.modes_mut().iter_mut().enumerate() {
            *g = if k2[idx] > 0.0 {
                ns.modes()[idx] / k2[idx] - *g * j
            } else {
                Complex64::default()
            };
        }
        let gh1: f64 = gs
            .modes()
            .iter()
            .zip(&k2)
            .map(|(v, k)| k * v.norm_sqr())
            .sum::<f64>()
            * dv
            / n3;
        grad_norm = gh1.sqrt() / j;
        if grad_norm < cfg.grad_tol {
            converged = true;
            break;
        }

        let mut accepted = None;
        while tau >= 1e-14 {
            let mut trial = fs.clone();
            for (t, g) in trial.modes_mut().iter_mut().zip(gs.modes()) {
                *t += g * (tau / j);
            }
            let (ts, tf) = project(&trial)?;
            let tt = model.nonlinear_terms(tf.values())?;
            let tj = model.potential_from_terms(&tt);
            if tj >= j {
                accepted = Some((ts, tf, tt, tj));
                break;
            }
            tau *= 0.5;
        }
        let Some((next_s, next_f, next_terms, next_j)) = accepted else {
            // round-off floor of J: accept if the gradient is already small
            converged = grad_norm <= 100.0 * cfg.grad_tol;
            if !converged {
                log::warn!("weinstein ascent: line search stalled at iteration {it}");
            }
            break;
        };
        let rel = (next_j - j) / j;
        fs = next_s;
        f = next_f;
        terms = next_terms;
        j = next_j;
        history.push(j);
        tau = (tau * 2.0).min(cfg.max_step);
        if rel < cfg.tol {
            quiet += 1;
            if quiet >= 5 {
                converged = true;
                iterations = it + 1;
                break;
            }
        } else {
            quiet = 0;
        }
        iterations = it + 1;
    }
    if !converged {
        log::warn!(
            "weinstein ascent stopped after {iterations} iterations without convergence (gradient {grad_norm:.3e})"
        );
    }
    Ok(WeinsteinResult {
        field: f,
        j,
        iterations,
        converged,
        history,
        grad_norm,
    })
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub w: ScalarField,
    pub model: HartreeModel,
    pub k_w: f64,
    pub p_w: f64,
    pub c0: f64,
    pub e_w: f64,
    pub hdot_w: f64,
    /// Elliptic residual modulo constants.
    pub residual: f64,
    /// Elliptic residual including the constant mode.
    pub residual_raw: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridSummary {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroundStateSummary {
    pub alpha: f64,
    pub b: f64,
    pub p: f64,
    pub eps_reg: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "K_W")]
    pub k_w: f64,
    #[serde(rename = "P_W")]
    pub p_w: f64,
    #[serde(rename = "E_W")]
    pub e_w: f64,
    #[serde(rename = "Hdot_W")]
    pub hdot_w: f64,
    pub residual: f64,
    pub residual_raw: f64,
    pub grid: GridSummary,
}

impl GroundState {
    pub fn summary(&self) -> GroundStateSummary {
        let p = self.model.params();
        GroundStateSummary {
            alpha: p.alpha,
            b: p.b,
            p: p.p,
            eps_reg: p.eps_reg,
            c0: self.c0,
            k_w: self.k_w,
            p_w: self.p_w,
            e_w: self.e_w,
            hdot_w: self.hdot_w,
            residual: self.residual,
            residual_raw: self.residual_raw,
            grid: GridSummary {
                n: self.w.grid().n(),
                l: self.w.grid().l(),
            },
        }
    }

    /// Rebuild the derived quantities for a stored profile.
    pub fn from_profile(w: ScalarField, model: &HartreeModel) -> Result<Self> {
        let model = model.with_sign(Sign::Focusing);
        let k_w = model.kinetic(&w);
        if k_w == 0.0 {
            return Err(HartreeError::ZeroField);
        }
        let p_w = model.potential_energy(&w)?;
        let p = model.params().p;
        let (residual, residual_raw) = residuals(&w, &model)?;
        Ok(Self {
            c0: p_w / k_w.powf(p),
            e_w: model.energy(&w)?,
            hdot_w: k_w.sqrt(),
            k_w,
            p_w,
            residual,
            residual_raw,
            w,
            model,
        })
    }
}

/// `W = mu f*` with `mu^{2p-2} = 1 / J(f*)`, which turns the stationarity
/// condition `-Laplacian f = N(f) / J` into `-Laplacian W = N(W)`.
pub fn rescale_to_ground_state(fstar: &ScalarField, model: &HartreeModel) -> Result<GroundState> {
    let k = model.kinetic(fstar);
    if (k - 1.0).abs() > 1e-8 {
        return Err(HartreeError::Numerical(format!(
            "maximizer must have unit gradient norm, got K = {k}"
        )));
    }
    let j = weinstein_functional(fstar, model)?;
    let p = model.params().p;
    let mu = j.powf(-1.0 / (2.0 * p - 2.0));
    if !mu.is_finite() || mu <= 0.0 {
        return Err(HartreeError::Numerical(format!(
            "degenerate amplitude mu = {mu} from J = {j}"
        )));
    }
    GroundState::from_profile(fstar.scale_real(mu), model)
}

fn residuals(w: &ScalarField, model: &HartreeModel) -> Result<(f64, f64)> {
    let lap = spectral::laplacian(w);
    let nw = model.nonlinearity(w)?;
    let r = lap.add(&nw)?;
    let denom = spectral::mass(&lap).sqrt();
    if denom == 0.0 {
        return Err(HartreeError::ZeroField);
    }
    let mean = r.mean();
    let projected = r.map(|v| v - mean);
    Ok((
        spectral::mass(&projected).sqrt() / denom,
        spectral::mass(&r).sqrt() / denom,
    ))
}

/// `||Laplacian W + N(W) - mean||_2 / ||Laplacian W||_2`, the constant mode
/// projected out since a zero-mean Laplacian cannot balance it on the torus.
pub fn elliptic_residual(w: &ScalarField, model: &HartreeModel) -> Result<f64> {
    Ok(residuals(w, model)?.0)
}

/// Residual including the constant mode.
pub fn elliptic_residual_raw(w: &ScalarField, model: &HartreeModel) -> Result<f64> {
    Ok(residuals(w, model)?.1)
}

/// `|K - P| / K`.
pub fn pohozaev_defect(w: &ScalarField, model: &HartreeModel) -> Result<f64> {
    let k = model.kinetic(w);
    Ok((k - model.potential_energy(w)?).abs() / k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    #[serde(rename = "E_W")]
    pub e_w: f64,
    #[serde(rename = "Hdot_W")]
    pub hdot_w: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
}

pub fn thresholds(gs: &GroundState) -> Result<Thresholds> {
    let p = gs.model.params().p;
    let e_formula = (1.0 - 1.0 / p) * gs.k_w;
    if (e_formula - gs.e_w).abs() > 1e-3 * e_formula.abs() {
        return Err(HartreeError::Numerical(format!(
            "E_W mismatch: (1-1/p)K_W = {e_formula:.6e}, E(W) = {:.6e}",
            gs.e_w
        )));
    }
    Ok(Thresholds {
        e_w: e_formula,
        hdot_w: gs.k_w.sqrt(),
        c0: gs.p_w / gs.k_w.powf(p),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub energy: f64,
    pub hdot: f64,
    pub below_energy: bool,
    pub below_kinetic: bool,
    pub at_threshold: bool,
    /// `1 - ||u0||_{H^1} / ||W||_{H^1}`
    pub margin: f64,
}

impl ThresholdReport {
    pub fn below(&self) -> bool {
        self.below_energy && self.below_kinetic && !self.at_threshold
    }
}

pub fn threshold_check(u0: &ScalarField, gs: &GroundState, model: &HartreeModel) -> Result<ThresholdReport> {
    let energy = model.energy(u0)?;
    let hdot = model.kinetic(u0).sqrt();
    let tol = 1e-8;
    let at_threshold = (energy - gs.e_w).abs() <= tol * gs.e_w.abs()
        && (hdot - gs.hdot_w).abs() <= tol * gs.hdot_w;
    Ok(ThresholdReport {
        energy,
        hdot,
        below_energy: energy < gs.e_w && !at_threshold,
        below_kinetic: hdot < gs.hdot_w && !at_threshold,
        at_threshold,
        margin: 1.0 - hdot / gs.hdot_w,
    })
}

/// Solve from the configured initializer and rescale.
pub fn solve_ground_state(model: &HartreeModel, cfg: &WeinsteinConfig) -> Result<(GroundState, WeinsteinResult)> {
    let model = model.with_sign(Sign::Focusing);
    let init = initial_profile(model.grid(), cfg.init);
    let res = maximize_weinstein(&init, cfg, &model)?;
    let gs = rescale_to_ground_state(&res.field, &model)?;
    Ok((gs, res))
}
