//! Strang split-step integration with exact linear and phase sub-flows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, MorawetzWeight};
use crate::error::{HartreeError, Result};
use crate::field::{ScalarField, SpectrumField};
use crate::ground_state::{threshold_check, GroundState, ThresholdReport};
use crate::grid::{mode_index, GridSpec};
use crate::model::{HartreeModel, Power};
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpongeConfig {
    /// Shell thickness as a fraction of `L/2`, measured inward from the faces.
    pub width: f64,
    pub strength: f64,
}

impl Default for SpongeConfig {
    fn default() -> Self {
        Self {
            width: 0.5,
            strength: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    /// Gradient-norm cap; a multiple of `||W||_{H^1}` when a ground state is supplied.
    pub grad_cap: f64,
    pub tail_cap: f64,
    pub sponge: Option<SpongeConfig>,
    /// Records between stored snapshots.
    pub snapshot_every: usize,
    /// Snapshots older than this (relative to the latest) are dropped.
    pub snapshot_window: f64,
    pub tight_radii: Vec<f64>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            record_every: 100,
            grad_cap: 10.0,
            tail_cap: 1e-4,
            sponge: None,
            snapshot_every: 1,
            snapshot_window: f64::INFINITY,
            tight_radii: vec![2.0, 4.0],
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| {
            Err(HartreeError::Param {
                name,
                reason: reason.into(),
            })
        };
        if !(self.dt > 0.0) {
            return bad("dt", "must be positive");
        }
        if !(self.t_end > 0.0) {
            return bad("t_end", "must be positive");
        }
        if self.record_every == 0 || self.snapshot_every == 0 {
            return bad("record_every", "must be at least 1");
        }
        if !(self.grad_cap > 0.0) || !(self.tail_cap > 0.0) {
            return bad("grad_cap", "caps must be positive");
        }
        if let Some(s) = &self.sponge {
            if !(s.width > 0.0 && s.width <= 1.0) || !(s.strength >= 0.0) {
                return bad("sponge", "width in (0, 1], strength >= 0");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub hdot: f64,
    pub m_quad: f64,
    pub virial_rhs: f64,
    pub n_t: f64,
    pub tightness: Vec<f64>,
    pub s1_accum: f64,
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    #[serde(rename = "T_end")]
    TEnd,
    #[serde(rename = "grad_cap")]
    GradCap,
    #[serde(rename = "tail_cap")]
    TailCap,
    #[serde(rename = "failure")]
    Failure,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::TEnd => "T_end",
            StopReason::GradCap => "grad_cap",
            StopReason::TailCap => "tail_cap",
            StopReason::Failure => "failure",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub snapshots: Vec<(f64, ScalarField)>,
    pub stop_reason: StopReason,
    pub failure: Option<String>,
    /// Last good state.
    pub final_state: ScalarField,
    pub t_final: f64,
    pub dt_final: f64,
    pub steps: usize,
    pub threshold: Option<ThresholdReport>,
    pub sponge: Option<SpongeConfig>,
    pub dt: f64,
}

/// `exp(-strength * dt * ramp(|x|))` with a quintic ramp from 0 at
/// `(1 - width) L/2` to 1 at `L/2`.
pub fn sponge_mask(grid: &GridSpec, sponge: &SpongeConfig, dt: f64) -> Vec<f64> {
    let half = grid.l() / 2.0;
    let r0 = (1.0 - sponge.width) * half;
    grid.radius_squared()
        .into_iter()
        .map(|r2| {
            let r = r2.sqrt();
            if r <= r0 {
                return 1.0;
            }
            let s = ((r - r0) / (half - r0)).min(1.0);
            let ramp = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
            (-sponge.strength * dt.abs() * ramp).exp()
        })
        .collect()
}

pub fn sponge_apply(u: &ScalarField, sponge: &SpongeConfig, dt: f64) -> ScalarField {
    let mask = sponge_mask(u.grid(), sponge, dt);
    let values = u.values().iter().zip(&mask).map(|(v, m)| v * m).collect();
    ScalarField::from_raw(u.grid().clone(), values)
}

/// One Strang step `exp(i dt/2 Lap) . exp(i dt Phi) . exp(i dt/2 Lap)`, with `Phi`
/// evaluated on the half-stepped field. Any sign of `dt` is allowed.
pub fn strang_step(u: &ScalarField, dt: f64, model: &HartreeModel) -> Result<ScalarField> {
    if dt == 0.0 {
        return Ok(u.clone());
    }
    let mut stepper = Stepper::new(model, dt, None);
    let mut spec = u.to_spectrum();
    stepper.step(&mut spec, false)?;
    Ok(spec.into_field())
}

/// Advance by `t` under `i u_t + Laplacian u = 0` with the sponge, in Strang
/// steps no longer than `dt`.
pub fn absorbing_linear_flow(u: &ScalarField, t: f64, dt: f64, sponge: &SpongeConfig) -> ScalarField {
    let steps = (t.abs() / dt.abs()).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let half = spectral::propagator_multiplier(u.grid(), h / 2.0);
    let mask = sponge_mask(u.grid(), sponge, h);
    let mut spec = u.to_spectrum();
    for _ in 0..steps {
        spec.apply_complex_multiplier(&half);
        let mut v = spec.into_field();
        for (val, m) in v.values_mut().iter_mut().zip(&mask) {
            *val *= m;
        }
        spec = v.to_spectrum();
        spec.apply_complex_multiplier(&half);
    }
    spec.into_field()
}

/// Apply `steps` Strang steps of size `dt` (either sign), without diagnostics.
pub fn evolve_steps(u: &ScalarField, dt: f64, steps: usize, model: &HartreeModel) -> Result<ScalarField> {
    let mut stepper = Stepper::new(model, dt, None);
    let mut spec = u.to_spectrum();
    for _ in 0..steps {
        stepper.step(&mut spec, false)?;
    }
    Ok(spec.into_field())
}

struct StepOutcome {
    /// `||v||_{L^q}^q` of the half-stepped field.
    lq_power: f64,
}

struct Stepper<'a> {
    model: &'a HartreeModel,
    dt: f64,
    half: Vec<Complex64>,
    sponge: Option<SpongeConfig>,
    mask: Option<Vec<f64>>,
    strichartz_q: f64,
}

impl<'a> Stepper<'a> {
    fn new(model: &'a HartreeModel, dt: f64, sponge: Option<SpongeConfig>) -> Self {
        let grid = model.grid();
        let mask = sponge.as_ref().map(|s| sponge_mask(grid, s, dt));
        Self {
            model,
            dt,
            half: spectral::propagator_multiplier(grid, dt / 2.0),
            sponge,
            mask,
            strichartz_q: diagnostics::strichartz_space_exponent(model.params().p),
        }
    }

    fn set_dt(&mut self, dt: f64) {
        *self = Stepper::new(self.model, dt, self.sponge);
    }

    /// Advance in place; on a phase-guard violation the state is untouched.
    fn step(&mut self, spec: &mut SpectrumField, guard: bool) -> Result<StepOutcome> {
        let mut work = spec.clone();
        work.apply_complex_multiplier(&self.half);
        let mut v = work.into_field();
        if !v.is_finite() {
            return Err(HartreeError::Numerical("non-finite field after linear half-step".into()));
        }
        let phi = self.model.phase_values(v.values())?;
        if guard {
            let pmax = phi.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if pmax * self.dt.abs() > 0.5 {
                return Err(HartreeError::Numerical(format!("phase guard: dt * max|Phi| = {:.3}", pmax * self.dt.abs())));
            }
        }
        let pow = Power::new(self.strichartz_q);
        let mut lq = 0.0;
        for (val, ph) in v.values_mut().iter_mut().zip(&phi) {
            lq += pow.of_square(val.norm_sqr());
            *val *= Complex64::from_polar(1.0, ph * self.dt);
        }
        if let Some(mask) = &self.mask {
            for (val, m) in v.values_mut().iter_mut().zip(mask) {
                *val *= m;
            }
        }
        let mut out = v.to_spectrum();
        out.apply_complex_multiplier(&self.half);
        if out.modes().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(HartreeError::Numerical("non-finite field after phase step".into()));
        }
        *spec = out;
        Ok(StepOutcome {
            lq_power: lq * self.model.grid().cell_volume(),
        })
    }
}

fn tail_mask(grid: &GridSpec) -> Vec<bool> {
    let n = grid.n();
    let cut = n as i64 / 3;
    (0..grid.len())
        .map(|idx| {
            let (i, j, k) = grid.unravel(idx);
            mode_index(i, n).abs().max(mode_index(j, n).abs()).max(mode_index(k, n).abs()) > cut
        })
        .collect()
}

fn record(
    u: &ScalarField,
    t: f64,
    s1: f64,
    tail: f64,
    cfg: &EvolveConfig,
    model: &HartreeModel,
) -> Result<StepRecord> {
    let kinetic = model.kinetic(u);
    let terms = model.nonlinear_terms(u.values())?;
    let potential = model.potential_from_terms(&terms);
    let prm = model.params();
    let p_q = model.potential_dilation_weighted(&terms);
    let virial = 8.0 * kinetic
        - 4.0 * prm.sigma() / prm.p * ((3.0 * prm.p - 3.0 - prm.alpha) * potential + 2.0 * prm.b * p_q);
    let n_t = if kinetic > 0.0 {
        diagnostics::frequency_scale(u)?
    } else {
        2.0 * std::f64::consts::PI / u.grid().l()
    };
    Ok(StepRecord {
        t,
        mass: spectral::mass(u),
        energy: kinetic - prm.sigma() * potential / prm.p,
        kinetic,
        potential,
        hdot: kinetic.sqrt(),
        m_quad: diagnostics::morawetz_action(u, &MorawetzWeight::Quadratic),
        virial_rhs: virial,
        n_t,
        tightness: diagnostics::tightness_many(u, &cfg.tight_radii, model)?,
        s1_accum: s1,
        tail_fraction: tail,
    })
}

/// Integrate from `u0` to `cfg.t_end`, recording diagnostics every
/// `record_every` steps of the initial `dt`.
pub fn evolve(
    u0: &ScalarField,
    cfg: &EvolveConfig,
    model: &HartreeModel,
    gs: Option<&GroundState>,
) -> Result<Trajectory> {
    evolve_with(u0, cfg, model, gs, |_, _| Ok(()))
}

/// [`evolve`] with a hook called on every record and the state it describes.
pub fn evolve_with(
    u0: &ScalarField,
    cfg: &EvolveConfig,
    model: &HartreeModel,
    gs: Option<&GroundState>,
    mut on_record: impl FnMut(&StepRecord, &ScalarField) -> Result<()>,
) -> Result<Trajectory> {
    cfg.validate()?;
    if u0.grid() != model.grid() {
        return Err(HartreeError::GridMismatch);
    }
    let grid = model.grid().clone();
    let threshold = match gs {
        Some(g) => Some(threshold_check(u0, g, model)?),
        None => None,
    };
    let grad_cap = match gs {
        Some(g) => cfg.grad_cap * g.hdot_w,
        None => cfg.grad_cap,
    };
    let k2 = grid.wavenumber_squared();
    let tails = tail_mask(&grid);
    let spec_stats = |s: &SpectrumField| {
        let mut kin = 0.0;
        let mut tot = 0.0;
        let mut tail = 0.0;
        for ((c, k), is_tail) in s.modes().iter().zip(&k2).zip(&tails) {
            let e = c.norm_sqr();
            kin += k * e;
            tot += e;
            if *is_tail {
                tail += e;
            }
        }
        let scale = grid.cell_volume() / grid.len() as f64;
        (kin * scale, if tot > 0.0 { tail / tot } else { 0.0 })
    };

    let p = model.params().p;
    let record_dt = cfg.dt * cfg.record_every as f64;
    let mut stepper = Stepper::new(model, cfg.dt, cfg.sponge);
    let mut spec = u0.to_spectrum();
    let mut t = 0.0;
    let mut s1_sum = 0.0;
    let mut steps = 0usize;
    let (_, tail0) = spec_stats(&spec);
    let mut records = vec![record(u0, 0.0, 0.0, tail0, cfg, model)?];
    on_record(&records[0], u0)?;
    let mut snapshots = vec![(0.0, u0.clone())];
    let mut last_good = u0.clone();
    let mut stop = StopReason::TEnd;
    let mut failure = None;
    let mut block = 0usize;

    'outer: while t < cfg.t_end - 1e-12 * cfg.t_end {
        let t_next = ((block + 1) as f64 * record_dt).min(cfg.t_end);
        while t < t_next - 1e-9 * stepper.dt.abs() {
            let dt_here = stepper.dt.min(t_next - t);
            if (dt_here - stepper.dt).abs() > 1e-9 * stepper.dt {
                // final partial step of the run
                let saved = stepper.dt;
                stepper.set_dt(dt_here);
                let r = stepper.step(&mut spec, true);
                stepper.set_dt(saved);
                match r {
                    Ok(o) => {
                        s1_sum += dt_here * o.lq_power.powf(2.0 * p / stepper.strichartz_q);
                        t = t_next;
                        steps += 1;
                    }
                    Err(e) => {
                        stop = StopReason::Failure;
                        failure = Some(e.to_string());
                        break 'outer;
                    }
                }
                continue;
            }
            match stepper.step(&mut spec, true) {
                Ok(o) => {
                    s1_sum += stepper.dt * o.lq_power.powf(2.0 * p / stepper.strichartz_q);
                    t += stepper.dt;
                    steps += 1;
                }
                Err(HartreeError::Numerical(msg)) if msg.starts_with("phase guard") => {
                    let new_dt = stepper.dt / 2.0;
                    if new_dt < cfg.dt * 1e-6 {
                        stop = StopReason::Failure;
                        failure = Some(msg);
                        break 'outer;
                    }
                    log::info!("{msg}; halving dt to {new_dt:.3e} at t = {t:.4}");
                    stepper.set_dt(new_dt);
                    continue;
                }
                Err(e) => {
                    stop = StopReason::Failure;
                    failure = Some(e.to_string());
                    break 'outer;
                }
            }
            let (kin, tail) = spec_stats(&spec);
            if kin.sqrt() > grad_cap {
                stop = StopReason::GradCap;
                break 'outer;
            }
            if tail > cfg.tail_cap {
                stop = StopReason::TailCap;
                break 'outer;
            }
        }
        block += 1;
        t = t_next;
        let u = spec.to_field();
        let (_, tail) = spec_stats(&spec);
        let rec = record(&u, t, s1_sum.powf(1.0 / (2.0 * p)), tail, cfg, model)?;
        on_record(&rec, &u)?;
        records.push(rec);
        if block % cfg.snapshot_every == 0 {
            snapshots.push((t, u.clone()));
            snapshots.retain(|(ts, _)| *ts >= t - cfg.snapshot_window - 1e-12);
        }
        last_good = u;
    }
    if stop != StopReason::TEnd && stop != StopReason::Failure {
        // record the state that tripped the cap
        let u = spec.to_field();
        let (_, tail) = spec_stats(&spec);
        if let Ok(rec) = record(&u, t, s1_sum.powf(1.0 / (2.0 * p)), tail, cfg, model) {
            on_record(&rec, &u)?;
            records.push(rec);
        }
        last_good = u;
    }
    if failure.is_some() {
        log::error!("evolution stopped at t = {t:.4}: {}", failure.as_deref().unwrap_or(""));
    }
    Ok(Trajectory {
        records,
        snapshots,
        stop_reason: stop,
        failure,
        final_state: last_good,
        t_final: t,
        dt_final: stepper.dt,
        steps,
        threshold,
        sponge: cfg.sponge,
        dt: cfg.dt,
    })
}

impl Trajectory {
    pub fn s1_total(&self) -> f64 {
        self.records.last().map(|r| r.s1_accum).unwrap_or(0.0)
    }

    /// Free-flow pullback detector, or with a sponge, drift against the
    /// linear absorbing flow.
    pub fn detect(&self, cfg: &diagnostics::DetectorConfig) -> diagnostics::ScatterVerdict {
        let first = &self.records[0];
        let last = self.records.last().expect("at least one record");
        match &self.sponge {
            None => diagnostics::scattering_detector(
                &self.snapshots,
                first.potential,
                last.potential,
                first.hdot,
                self.s1_total(),
                cfg,
            ),
            Some(sponge) => diagnostics::scattering_detector_with(
                &self.snapshots,
                first.potential,
                last.potential,
                first.hdot,
                self.s1_total(),
                cfg,
                |u, s| absorbing_linear_flow(u, s, self.dt, sponge),
            ),
        }
    }
}
