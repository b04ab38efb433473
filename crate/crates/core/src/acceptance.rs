//! The acceptance suite: ten criteria at the reference resolution
//! `n = 64`, `L = 20`, `dt = 1e-3`, each returning a report of named checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagnostics::{
    morawetz_action, morawetz_coefficient_sum, morawetz_rhs_terms, virial_rhs, virial_rhs_unregularized,
    DetectorConfig, MorawetzWeight,
};
use crate::error::{HartreeError, Result};
use crate::evolution::{evolve, evolve_steps, EvolveConfig, SpongeConfig, StopReason};
use crate::experiment::{defocusing_checks, gn_ratios, INTERIOR_MASS_FRACTION};
use crate::field::ScalarField;
use crate::ground_state::{
    elliptic_residual, pohozaev_defect, solve_ground_state, weinstein_functional, GroundState, Initializer,
    WeinsteinConfig, WeinsteinResult,
};
use crate::grid::{make_grid, GridSpec};
use crate::model::{apply_riesz, b_bound, riesz_constant, validate_params, HartreeModel, Sign};
use crate::spectral;

pub const REFERENCE_N: usize = 64;
pub const REFERENCE_L: f64 = 20.0;
pub const REFERENCE_DT: f64 = 1e-3;

/// `C0` of the reference model (`alpha = 2`, `b = 1/2`, `eps = 1`, `n = 64`,
/// `L = 20`) from an independent ascent.
pub const REFERENCE_C0_ORACLE: f64 = 1.49320e-4;

/// Whole-space `C0` for `alpha = 2`, `b = 0`: the extremal is
/// `(1 + |x|^2)^{-1/2}` with `K = 3 pi^2 / 4` and `P = pi^2 / 12`.
pub fn homogeneous_c0_exact() -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    (pi2 / 12.0) / (0.75 * pi2).powi(5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Setup {
    pub alpha: f64,
    pub b: f64,
}

pub const REFERENCE: Setup = Setup { alpha: 2.0, b: 0.5 };
pub const HOMOGENEOUS: Setup = Setup { alpha: 2.0, b: 0.0 };

impl Setup {
    pub fn model(&self, n: usize, sign: Sign) -> Result<HartreeModel> {
        let grid = make_grid(n, REFERENCE_L)?;
        Ok(HartreeModel::new(&grid, validate_params(self.alpha, self.b, sign)?))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition.
    pub condition: String,
    pub passed: bool,
    /// Informational checks are reported but do not gate the criterion.
    pub gating: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("<= {limit:.3e}"),
            passed: value <= limit,
            gating: true,
        }
    }

    pub fn ge(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!(">= {limit:.3e}"),
            passed: value >= limit,
            gating: true,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("in [{lo}, {hi}]"),
            passed: value >= lo && value <= hi,
            gating: true,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            condition: "true".into(),
            passed: ok,
            gating: true,
        }
    }

    pub fn info(mut self) -> Self {
        self.gating = false;
        self
    }

    fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}: {}", self.name);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().filter(|c| c.gating).all(|c| c.passed)
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<34} {} ({:.1} s, budget {:.0} s)",
            self.id,
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.seconds,
            self.budget_seconds
        )
    }

    pub fn details(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "    [{}{}] {} = {:.6e} ({})\n",
                if c.passed { "ok" } else { "FAIL" },
                if c.gating { "" } else { ", info" },
                c.name,
                c.value,
                c.condition
            ));
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("    error: {e}\n"));
        }
        out
    }
}

fn timed(
    id: u8,
    name: &'static str,
    budget_seconds: f64,
    body: impl FnOnce() -> Result<Vec<Check>>,
) -> CriterionReport {
    let start = Instant::now();
    let (mut checks, error) = match body() {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let seconds = start.elapsed().as_secs_f64();
    checks.push(Check::le("runtime in seconds", seconds, budget_seconds));
    CriterionReport {
        id,
        name,
        checks,
        seconds,
        budget_seconds,
        error,
    }
}

type Solved = Arc<(GroundState, WeinsteinResult)>;

/// Ground states shared between criteria, solved on first use.
#[derive(Default)]
pub struct Suite {
    cache: Mutex<HashMap<(u64, usize, u8), Arc<OnceLock<std::result::Result<Solved, String>>>>>,
}

impl Suite {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ground_state(&self, setup: Setup, n: usize, init: Initializer) -> Result<Solved> {
        let key = (setup.b.to_bits(), n, init as u8);
        let cell = self.cache.lock().expect("cache").entry(key).or_default().clone();
        cell.get_or_init(|| {
            let model = setup.model(n, Sign::Focusing).map_err(|e| e.to_string())?;
            let cfg = WeinsteinConfig {
                init,
                ..Default::default()
            };
            let start = Instant::now();
            let solved = solve_ground_state(&model, &cfg).map_err(|e| e.to_string())?;
            log::info!(
                "ground state b = {}, n = {n}, {init:?}: J = {:.8e} after {} iterations ({:.1} s)",
                setup.b,
                solved.1.j,
                solved.1.iterations,
                start.elapsed().as_secs_f64()
            );
            Ok(Arc::new(solved))
        })
        .clone()
        .map_err(HartreeError::Numerical)
    }

    pub fn run_one(&self, id: u8) -> Option<CriterionReport> {
        Some(match id {
            1 => spectral_correctness(),
            2 => conservation(),
            3 => splitting_order(),
            4 => scaling_symmetry(),
            5 => ground_state(self),
            6 => sharp_gn(self),
            7 => virial_morawetz(self),
            8 => subthreshold_regime(self),
            9 => defocusing(),
            10 => homogeneous_radial(self),
            _ => return None,
        })
    }

    pub fn run_all(&self) -> Vec<CriterionReport> {
        (1..=10).filter_map(|id| self.run_one(id)).collect()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn random_field(grid: &GridSpec, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ScalarField::new(grid.clone(), values).expect("finite samples")
}

fn relative_sup(a: &ScalarField, b: &ScalarField) -> f64 {
    let d = a.sub(b).expect("same grid");
    d.max_abs() / b.max_abs()
}

/// Free-space `K int f(y) |x - y|^{alpha - 3} dy` at the nodes of `grid`,
/// summing over a source lattice `sub` times finer and offset by half a
/// cell so no source meets a target.
pub fn riesz_direct_sum(grid: &GridSpec, alpha: f64, sub: usize, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
    let l = grid.l();
    let ns = grid.n() * sub;
    let hs = l / ns as f64;
    let xs: Vec<f64> = (0..ns).map(|i| (i as f64 + 0.5) * hs - l / 2.0).collect();
    let mut sources = Vec::with_capacity(ns * ns * ns);
    for &x in &xs {
        for &y in &xs {
            for &z in &xs {
                let v = f([x, y, z]);
                if v != 0.0 {
                    sources.push(([x, y, z], v * hs * hs * hs));
                }
            }
        }
    }
    let k = riesz_constant(alpha);
    let e = (alpha - 3.0) / 2.0;
    (0..grid.len())
        .map(|i| {
            let p = grid.position(i);
            k * sources
                .iter()
                .map(|(q, w)| {
                    let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                    w * d2.powf(e)
                })
                .sum::<f64>()
        })
        .collect()
}

pub fn spectral_correctness() -> CriterionReport {
    timed(1, "spectral correctness", 10.0, || {
        let mut checks = Vec::new();
        let grid = make_grid(32, REFERENCE_L)?;
        let f = random_field(&grid, 11);
        let back = f.to_spectrum().into_field();
        checks.push(Check::le("round trip relative sup error", relative_sup(&back, &f), 1e-12));
        let parseval = rel(f.to_spectrum().parseval_mass(), spectral::mass(&f));
        checks.push(Check::le("Parseval relative error", parseval, 1e-12));

        let m = f.mean();
        let f0 = f.map(|v| v - m);
        for alpha in [0.5, 1.0, 2.0, 2.5] {
            let op = crate::model::RieszOperator::new(&grid, alpha);
            let g = apply_riesz(&spectral::fractional_laplacian(&f0, alpha), &op);
            checks.push(Check::le(
                format!("I_alpha (-Laplacian)^(alpha/2) = id, alpha = {alpha}"),
                relative_sup(&g, &f0),
                1e-12,
            ));
        }

        // radial bump of zero mass, so the far field is small
        let small = make_grid(16, 12.0)?;
        let bump = |x: [f64; 3]| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            (-r2).exp() - 0.125 * (-r2 / 4.0).exp()
        };
        let src = ScalarField::from_real_fn(&small, bump);
        for alpha in [2.0, 2.5] {
            let spec = apply_riesz(&src, &crate::model::RieszOperator::new(&small, alpha)).real_part();
            let direct = riesz_direct_sum(&small, alpha, 3, bump);
            let centered = |v: &[f64]| {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                v.iter().map(|x| x - m).collect::<Vec<_>>()
            };
            let (a, b) = (centered(&spec), centered(&direct));
            let num: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum();
            let den: f64 = b.iter().map(|y| y * y).sum();
            checks.push(Check::le(
                format!("spectral vs direct Riesz on 16^3, alpha = {alpha}"),
                (num / den).sqrt(),
                5e-2,
            ));
        }
        Ok(checks)
    })
}

fn gaussian(grid: &GridSpec, amplitude: f64, width: f64) -> ScalarField {
    let w2 = width * width;
    ScalarField::from_real_fn(grid, |x| amplitude * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / w2).exp())
}

fn plain_config(dt: f64, t_end: f64, record_dt: f64) -> EvolveConfig {
    EvolveConfig {
        dt,
        t_end,
        record_every: ((record_dt / dt).round() as usize).max(1),
        grad_cap: 1e3,
        tail_cap: 1e-2,
        sponge: None,
        snapshot_every: 1,
        snapshot_window: 0.0,
        tight_radii: vec![],
    }
}

pub fn conservation() -> CriterionReport {
    timed(2, "conservation", 120.0, || {
        let model = REFERENCE.model(REFERENCE_N, Sign::Focusing)?;
        let u0 = gaussian(model.grid(), 1.5, 1.0);
        let t_end = 2.0;
        let mut checks = Vec::new();
        let mut energy_drifts = Vec::new();
        for dt in [REFERENCE_DT, REFERENCE_DT / 2.0] {
            let traj = evolve(&u0, &plain_config(dt, t_end, 0.1), &model, None)?;
            checks.push(Check::flag(format!("dt = {dt:e} reached T"), traj.stop_reason == StopReason::TEnd));
            let r0 = &traj.records[0];
            let mass = traj.records.iter().map(|r| rel(r.mass, r0.mass)).fold(0.0, f64::max) / t_end;
            let energy = traj.records.iter().map(|r| rel(r.energy, r0.energy)).fold(0.0, f64::max) / t_end;
            checks.push(Check::le(format!("mass drift per unit time, dt = {dt:e}"), mass, 1e-8));
            checks.push(Check::le(format!("energy drift per unit time, dt = {dt:e}"), energy, 1e-6));
            energy_drifts.push(energy);
        }
        checks.push(Check::ge(
            "energy drift ratio dt / (dt/2)",
            energy_drifts[0] / energy_drifts[1],
            3.0,
        ));
        Ok(checks)
    })
}

pub fn splitting_order() -> CriterionReport {
    timed(3, "splitting order", 120.0, || {
        let model = REFERENCE.model(REFERENCE_N, Sign::Focusing)?;
        let u0 = gaussian(model.grid(), 1.5, 1.0);
        let t = 0.1;
        let dt = 1e-2;
        let run = |h: f64| evolve_steps(&u0, h, (t / h).round() as usize, &model);
        let reference = run(dt / 16.0)?;
        let err = |h: f64| -> Result<f64> { Ok(spectral::mass(&run(h)?.sub(&reference)?).sqrt()) };
        let (e1, e2) = (err(dt)?, err(dt / 2.0)?);
        Ok(vec![
            Check::within("error(dt) / error(dt/2)", e1 / e2, 3.6, 4.4),
            Check::le("error(dt) in L2", e1, f64::INFINITY).info(),
        ])
    })
}

fn scaling_checks(setup: Setup) -> Result<Vec<Check>> {
    let model = setup.model(REFERENCE_N, Sign::Focusing)?;
    let f = gaussian(model.grid(), 1.0, 2.0);
    let g = spectral::rescale_field(&f, 2.0)?;
    let mut checks = vec![
        Check::le(
            "Hdot1 invariance",
            rel(spectral::sobolev_h1dot(&g), spectral::sobolev_h1dot(&f)),
            1e-6,
        ),
        Check::le("P invariance", rel(model.potential_energy(&g)?, model.potential_energy(&f)?), 1e-6),
        Check::le("E invariance", rel(model.energy(&g)?, model.energy(&f)?), 1e-6),
    ];
    let t = 0.4;
    let steps = (t / REFERENCE_DT).round() as usize;
    let u = evolve_steps(&f, REFERENCE_DT, steps, &model)?;
    let v = evolve_steps(&g, REFERENCE_DT / 4.0, steps, &model)?;
    let scaled = spectral::rescale_field(&u, 2.0)?;
    let err = spectral::sobolev_h1dot(&scaled.sub(&v)?) / spectral::sobolev_h1dot(&v);
    checks.push(Check::le("evolution commutes with scaling (relative Hdot1)", err, 1e-4));
    Ok(checks)
}

pub fn scaling_symmetry() -> CriterionReport {
    timed(4, "scaling symmetry", 180.0, || {
        let mut checks = scaling_checks(REFERENCE)?;
        checks.extend(
            scaling_checks(HOMOGENEOUS)?
                .into_iter()
                .map(|c| c.prefixed("b = 0").info()),
        );
        Ok(checks)
    })
}

fn ground_state_checks(suite: &Suite, setup: Setup) -> Result<Vec<Check>> {
    let solved = suite.ground_state(setup, REFERENCE_N, Initializer::Gaussian)?;
    let (gs, res) = (&solved.0, &solved.1);
    let model = &gs.model;
    let p = model.params().p;
    let mut checks = vec![
        Check::flag("ascent converged", res.converged),
        Check::le("elliptic residual", elliptic_residual(&gs.w, model)?, 1e-3),
        Check::le("Pohozaev |K_W - P_W| / K_W", pohozaev_defect(&gs.w, model)?, 1e-3),
        Check::le("E_W = (1 - 1/p) K_W", rel(gs.e_w, (1.0 - 1.0 / p) * gs.k_w), 1e-3),
        Check::le("C0 K_W^(p-1) = 1", (gs.c0 * gs.k_w.powf(p - 1.0) - 1.0).abs(), 1e-3),
    ];
    let other = suite.ground_state(setup, REFERENCE_N, Initializer::Bubble)?;
    checks.push(Check::le("two-initializer J agreement", rel(other.1.j, res.j), 1e-4));
    let fine = suite.ground_state(setup, 2 * REFERENCE_N, Initializer::Gaussian)?;
    checks.push(Check::le("two-resolution C0 agreement (n = 64, 128)", rel(fine.0.c0, gs.c0), 1e-2));
    Ok(checks)
}

pub fn ground_state(suite: &Suite) -> CriterionReport {
    timed(5, "ground state", 600.0, || {
        let mut checks = ground_state_checks(suite, REFERENCE)?;
        let c0 = suite.ground_state(REFERENCE, REFERENCE_N, Initializer::Gaussian)?.0.c0;
        checks.push(Check::le("C0 vs independent oracle", rel(c0, REFERENCE_C0_ORACLE), 1e-3));
        Ok(checks)
    })
}

fn gn_checks(suite: &Suite, setup: Setup) -> Result<Vec<Check>> {
    let solved = suite.ground_state(setup, REFERENCE_N, Initializer::Gaussian)?;
    let gs = &solved.0;
    let ratios = gn_ratios(&gs.model, gs.c0, 200, 20_240_601)?;
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        Check::le("max P/(C0 K^p) over 200 random fields", max, 1.0 + 1e-3),
        Check::ge("P/(C0 K^p) at W", weinstein_functional(&gs.w, &gs.model)? / gs.c0, 0.999),
    ])
}

pub fn sharp_gn(suite: &Suite) -> CriterionReport {
    timed(6, "sharp Gagliardo-Nirenberg", 120.0, || gn_checks(suite, REFERENCE))
}

/// The first `count` pairs `(alpha, b)` with `alpha = i/4`, `b = j/8` admissible.
pub fn admissible_rational_pairs(count: usize) -> Vec<(Ratio<i64>, Ratio<i64>)> {
    let mut out = Vec::new();
    for i in 1..12 {
        for j in 0..12 {
            let alpha = Ratio::new(i, 4);
            let b = Ratio::new(j, 8);
            if (j as f64 / 8.0) <= b_bound(i as f64 / 4.0) && out.len() < count {
                out.push((alpha, b));
            }
        }
    }
    out
}

fn virial_checks(setup: Setup) -> Result<Vec<Check>> {
    let model = setup.model(REFERENCE_N, Sign::Focusing)?;
    let u0 = gaussian(model.grid(), 0.8, 1.0);
    let delta = 2e-3;
    let sub = 8;
    let forward = evolve_steps(&u0, delta / sub as f64, sub, &model)?;
    let backward = evolve_steps(&u0, -delta / sub as f64, sub, &model)?;
    let action = |u: &ScalarField| morawetz_action(u, &MorawetzWeight::Quadratic);
    let fd = (action(&forward) - action(&backward)) / (2.0 * delta);
    let quadratic = virial_rhs(&u0, &model)?;
    let unregularized = virial_rhs_unregularized(&u0, &model)?;
    let weight = MorawetzWeight::truncated(4.5, REFERENCE_L)?;
    let terms = morawetz_rhs_terms(&u0, &weight, &model, 2)?;
    let quadrature_tol = (terms.double_integral - terms.double_integral_coarse).abs() + 1e-9 * quadratic.abs();
    Ok(vec![
        Check::le("finite-difference dM/dt vs 8(K - sigma P)", rel(fd, unregularized), 1e-3),
        Check::le("finite-difference dM/dt vs regularized virial", rel(fd, quadratic), 1e-3).info(),
        Check::le(
            "truncated weight (R = 4.5) minus quadratic, over quadrature tolerance",
            (terms.total() - quadratic).abs() / quadrature_tol,
            1.0,
        ),
        Check::le(
            "data mass outside R = 4.5",
            spectral::mass_fraction_outside(&u0, 4.5),
            INTERIOR_MASS_FRACTION,
        )
        .info(),
    ])
}

pub fn virial_morawetz(_suite: &Suite) -> CriterionReport {
    timed(7, "virial and Morawetz identity", 300.0, || {
        let pairs = admissible_rational_pairs(50);
        let eight = Ratio::from_integer(8);
        let exact = pairs.iter().filter(|(a, b)| morawetz_coefficient_sum(*a, *b) == eight).count();
        let mut checks = vec![
            Check::ge("admissible rational pairs tested", pairs.len() as f64, 50.0),
            Check::flag("coefficient sum is exactly 8 for every pair", exact == pairs.len()),
        ];
        checks.extend(virial_checks(REFERENCE)?);
        Ok(checks)
    })
}

/// Evolution settings for the long sub-threshold and defocusing runs.
pub fn scattering_config(t_end: f64) -> EvolveConfig {
    EvolveConfig {
        dt: REFERENCE_DT,
        t_end,
        record_every: 100,
        grad_cap: 10.0,
        tail_cap: 1e-2,
        sponge: Some(SpongeConfig::default()),
        snapshot_every: 1,
        snapshot_window: DetectorConfig::default().window,
        tight_radii: vec![],
    }
}

pub const SCATTERING_T_END: f64 = 8.0;
pub const SOLITON_T_END: f64 = 5.0;

fn regime_checks(suite: &Suite, setup: Setup) -> Result<Vec<Check>> {
    let solved = suite.ground_state(setup, REFERENCE_N, Initializer::Gaussian)?;
    let gs = &solved.0;
    let model = gs.model.clone();
    let detector = DetectorConfig::default();

    let half = gs.w.scale_real(0.5);
    let traj = evolve(&half, &scattering_config(SCATTERING_T_END), &model, Some(gs))?;
    let sup_hdot = traj.records.iter().map(|r| r.hdot).fold(0.0, f64::max);
    let verdict = traj.detect(&detector);
    let mut checks = vec![
        Check::flag("0.5 W below both thresholds", traj.threshold.map(|t| t.below()).unwrap_or(false)),
        Check::flag("0.5 W reached T", traj.stop_reason == StopReason::TEnd),
        Check::le("0.5 W: sup Hdot / Hdot_W", sup_hdot / gs.hdot_w, 1.0 - 1e-12),
        Check::le("0.5 W: pullback drift", verdict.pullback_drift, detector.tol),
        Check::ge("0.5 W: P decay factor", verdict.p_decay_factor, detector.decay_factor),
        Check::flag("0.5 W: scattered", verdict.scattered),
    ];

    let mut cfg = plain_config(REFERENCE_DT, SOLITON_T_END, 0.1);
    cfg.grad_cap = 10.0;
    cfg.snapshot_window = detector.window;
    let traj = evolve(&gs.w, &cfg, &model, Some(gs))?;
    let verdict = traj.detect(&detector);
    let p_dev = traj.records.iter().map(|r| rel(r.potential, gs.p_w)).fold(0.0, f64::max);
    checks.push(Check::flag("W: reached T", traj.stop_reason == StopReason::TEnd));
    checks.push(Check::flag("W: not scattered", !verdict.scattered));
    checks.push(Check::le("W: max |P(u) - P_W| / P_W on [0, 5]", p_dev, 1e-2));
    let held = traj
        .records
        .iter()
        .take_while(|r| rel(r.potential, gs.p_w) <= 1e-2)
        .last()
        .map(|r| r.t)
        .unwrap_or(0.0);
    checks.push(Check::ge("W: time P stays within 1% of P_W", held, SOLITON_T_END).info());
    Ok(checks)
}

pub fn subthreshold_regime(suite: &Suite) -> CriterionReport {
    timed(8, "sub-threshold scattering", 900.0, || regime_checks(suite, REFERENCE))
}

pub fn defocusing() -> CriterionReport {
    timed(9, "defocusing scattering", 600.0, || {
        let model = REFERENCE.model(REFERENCE_N, Sign::Defocusing)?;
        let u0 = gaussian(model.grid(), 1.0, 1.0);
        let quarter = REFERENCE_L / 4.0;
        let mut interior = Vec::new();
        let traj = crate::evolution::evolve_with(
            &u0,
            &scattering_config(SCATTERING_T_END),
            &model,
            None,
            |_, u| {
                interior.push(spectral::mass_fraction_outside(u, quarter) < INTERIOR_MASS_FRACTION);
                Ok(())
            },
        )?;
        let verdict = traj.detect(&DetectorConfig::default());
        let dc = defocusing_checks(&traj.records, &interior);
        Ok(vec![
            Check::flag("reached T", traj.stop_reason == StopReason::TEnd),
            Check::flag("scattered", verdict.scattered),
            Check::le("pullback drift", verdict.pullback_drift, DetectorConfig::default().tol).info(),
            Check::ge("P decay factor", verdict.p_decay_factor, DetectorConfig::default().decay_factor).info(),
            Check::flag("E(t) - K(t) >= 0 at every record", dc.energy_above_kinetic),
            Check::flag("M_quad increasing while interior", dc.m_quad_increasing_while_interior),
            Check::ge("interior records", dc.interior_records as f64, 2.0),
        ])
    })
}

pub fn homogeneous_radial(suite: &Suite) -> CriterionReport {
    timed(10, "homogeneous radial (b = 0)", 1200.0, || {
        let mut checks: Vec<Check> = ground_state_checks(suite, HOMOGENEOUS)?
            .into_iter()
            .map(|c| c.prefixed("ground state"))
            .collect();
        let c0 = suite.ground_state(HOMOGENEOUS, REFERENCE_N, Initializer::Gaussian)?.0.c0;
        checks.push(Check::le("ground state: C0 vs whole-space value", rel(c0, homogeneous_c0_exact()), 1e-2));
        checks.extend(gn_checks(suite, HOMOGENEOUS)?.into_iter().map(|c| c.prefixed("GN")));
        checks.extend(virial_checks(HOMOGENEOUS)?.into_iter().map(|c| c.prefixed("virial")));
        checks.extend(regime_checks(suite, HOMOGENEOUS)?.into_iter().map(|c| c.prefixed("regime")));
        Ok(checks)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_pairs_are_admissible() {
        let pairs = admissible_rational_pairs(50);
        assert_eq!(pairs.len(), 50);
        for (a, b) in pairs {
            let (a, b) = (*a.numer() as f64 / *a.denom() as f64, *b.numer() as f64 / *b.denom() as f64);
            assert!(validate_params(a, b, Sign::Focusing).is_ok());
        }
    }

    #[test]
    fn homogeneous_constant() {
        assert!((homogeneous_c0_exact() - 3.700952e-5).abs() < 1e-10);
    }
}
