//! Scenario dispatch and result files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::checkpoint::Checkpoint;
use crate::config::{ExperimentConfig, InitConfig, InitFamily, Scenario};
use crate::diagnostics::ScatterVerdict;
use crate::error::{HartreeError, Result};
use crate::evolution::{evolve_with, EvolveConfig, StepRecord, Trajectory};
use crate::field::ScalarField;
use crate::ground_state::{
    solve_ground_state, threshold_check, thresholds, weinstein_functional, GridSummary, GroundState,
    GroundStateSummary, ThresholdReport, Thresholds,
};
use crate::grid::{make_grid, GridSpec};
use crate::model::{HartreeModel, Sign};
use crate::spectral;

/// Fraction of mass allowed outside `|x| <= L/4` for a state to count as interior.
pub const INTERIOR_MASS_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub threads: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    /// Set when a run stopped on a numerical failure; partial artifacts remain.
    pub failure: Option<String>,
    pub artifacts: Vec<PathBuf>,
}

pub fn build_model(cfg: &ExperimentConfig) -> Result<HartreeModel> {
    let grid = make_grid(cfg.n, cfg.l)?;
    let params = crate::model::validate_params(cfg.alpha, cfg.b, cfg.sign)?.with_eps(cfg.eps_reg)?;
    Ok(HartreeModel::new(&grid, params))
}

/// Load the configured ground-state checkpoint or solve for one.
pub fn obtain_ground_state(cfg: &ExperimentConfig, model: &HartreeModel) -> Result<GroundState> {
    if let Some(path) = &cfg.ground_state_path {
        let ck = Checkpoint::load(path)?;
        if ck.field.grid() != model.grid() {
            return Err(HartreeError::Config {
                key: "ground_state.load".into(),
                reason: format!("checkpoint grid n = {} does not match the configured grid", ck.field.grid().n()),
            });
        }
        if ck.alpha != cfg.alpha || ck.b != cfg.b {
            return Err(HartreeError::Config {
                key: "ground_state.load".into(),
                reason: format!("checkpoint has alpha = {}, b = {}", ck.alpha, ck.b),
            });
        }
        log::info!("loaded ground state from {}", path.display());
        return GroundState::from_profile(ck.field, model);
    }
    let (gs, res) = solve_ground_state(model, &cfg.weinstein)?;
    log::info!(
        "ground state: C0 = {:.6e}, iterations = {}, converged = {}, residual = {:.3e}",
        gs.c0,
        res.iterations,
        res.converged,
        gs.residual
    );
    Ok(gs)
}

/// Initial data for the configured family: built centered, rescaled by
/// `scale`, multiplied by `amplitude`, then moved to `offset`.
pub fn initial_data(init: &InitConfig, grid: &GridSpec, gs: Option<&GroundState>) -> Result<ScalarField> {
    let w2 = init.width * init.width;
    let base = match init.family {
        InitFamily::Gaussian => ScalarField::from_real_fn(grid, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / w2).exp()),
        InitFamily::Bubble => {
            ScalarField::from_real_fn(grid, |x| (1.0 + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / w2).powf(-0.5))
        }
        InitFamily::ScaledGroundState => {
            let gs = gs.ok_or_else(|| HartreeError::Config {
                key: "init.family".into(),
                reason: "scaled_ground_state needs a ground state".into(),
            })?;
            if gs.w.grid() != grid {
                return Err(HartreeError::GridMismatch);
            }
            gs.w.clone()
        }
    };
    let scaled = spectral::rescale_field(&base, init.scale)?;
    let u = scaled.scale_real(init.amplitude);
    Ok(translate(&u, init.offset))
}

/// `f(x - x0)` by a spectral phase shift.
pub fn translate(f: &ScalarField, x0: [f64; 3]) -> ScalarField {
    if x0 == [0.0; 3] {
        return f.clone();
    }
    let grid = f.grid();
    let mult: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let k = grid.wavevector(i);
            Complex64::from_polar(1.0, -(k[0] * x0[0] + k[1] * x0[1] + k[2] * x0[2]))
        })
        .collect();
    let mut s = f.to_spectrum();
    s.apply_complex_multiplier(&mult);
    s.into_field()
}

/// A random smooth real field with zero mean: a sum of one to four
/// anisotropic Gaussian bumps of random sign, placed within `L/8` of the origin.
pub fn random_smooth_field(grid: &GridSpec, rng: &mut impl Rng) -> ScalarField {
    let bumps = rng.gen_range(1..=4);
    let c = grid.l() / 8.0;
    let params: Vec<([f64; 3], [f64; 3], f64)> = (0..bumps)
        .map(|_| {
            let center = [rng.gen_range(-c..c), rng.gen_range(-c..c), rng.gen_range(-c..c)];
            let width = [rng.gen_range(0.7..2.5), rng.gen_range(0.7..2.5), rng.gen_range(0.7..2.5)];
            (center, width, rng.gen_range(-1.0..1.0))
        })
        .collect();
    let f = ScalarField::from_real_fn(grid, |x| {
        params
            .iter()
            .map(|(c, w, a)| {
                let q: f64 = (0..3).map(|d| ((x[d] - c[d]) / w[d]).powi(2)).sum();
                a * (-q).exp()
            })
            .sum()
    });
    let m = f.mean();
    f.map(|v| Complex64::new(v.re - m.re, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BelowThreshold,
    AtThreshold,
    /// Not covered by the scattering theorem; reported, never asserted.
    Exploratory,
    Defocusing,
}

pub fn classify(report: Option<&ThresholdReport>, sign: Sign) -> Regime {
    match (sign, report) {
        (Sign::Defocusing, _) => Regime::Defocusing,
        (_, Some(r)) if r.at_threshold => Regime::AtThreshold,
        (_, Some(r)) if r.below() => Regime::BelowThreshold,
        _ => Regime::Exploratory,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub alpha: f64,
    pub b: f64,
    pub p: f64,
    pub sign: f64,
    pub eps_reg: f64,
    pub grid: GridSummary,
}

impl ModelSummary {
    fn of(model: &HartreeModel) -> Self {
        let p = model.params();
        Self {
            alpha: p.alpha,
            b: p.b,
            p: p.p,
            sign: p.sign.value(),
            eps_reg: p.eps_reg,
            grid: GridSummary {
                n: model.grid().n(),
                l: model.grid().l(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateRun {
    pub scenario: &'static str,
    #[serde(flatten)]
    pub ground_state: GroundStateSummary,
    pub thresholds: Thresholds,
    pub pohozaev_defect: f64,
    pub weinstein_j: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefocusingChecks {
    /// `E(t) - K(t) >= 0` at every record.
    pub energy_above_kinetic: bool,
    /// `M_quad` strictly increases between consecutive interior records.
    pub m_quad_increasing_while_interior: bool,
    pub interior_records: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveRun {
    pub scenario: &'static str,
    pub model: ModelSummary,
    pub init: InitConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_state: Option<GroundStateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdReport>,
    pub regime: Regime,
    pub stop_reason: &'static str,
    pub t_stop: f64,
    pub steps: usize,
    pub dt_final: f64,
    pub failure: Option<String>,
    pub verdict: ScatterVerdict,
    pub max_hdot: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_trapping: Option<bool>,
    pub mass_drift: f64,
    pub energy_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defocusing: Option<DefocusingChecks>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyRow {
    pub c: f64,
    pub energy_ratio: f64,
    pub hdot_ratio: f64,
    pub regime: Regime,
    pub scattered: bool,
    pub stop_reason: &'static str,
    pub t_stop: f64,
    pub pullback_drift: f64,
    pub p_decay_factor: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyRun {
    pub scenario: &'static str,
    pub model: ModelSummary,
    pub ground_state: GroundStateSummary,
    pub scale: f64,
    pub rows: Vec<DichotomyRow>,
    /// Every below-threshold row scattered; at-threshold and exploratory rows are excluded.
    pub below_threshold_all_scattered: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GnSampleRun {
    pub scenario: &'static str,
    pub model: ModelSummary,
    #[serde(rename = "C0")]
    pub c0: f64,
    pub samples: usize,
    pub seed: u64,
    pub max_ratio: f64,
    pub argmax: usize,
    pub ratio_ground_state: f64,
    pub sharp: bool,
}

#[derive(Debug, Clone, Serialize)]
struct ManifestArtifact {
    path: String,
    sha256: String,
}

#[derive(Debug, Clone, Serialize)]
struct Manifest {
    package: &'static str,
    code_version: &'static str,
    os: &'static str,
    arch: &'static str,
    scenario: &'static str,
    seed: u64,
    config_sha256: String,
    config: String,
    artifacts: Vec<ManifestArtifact>,
}

#[derive(Debug, Clone, Serialize)]
struct ErrorRecord<'a> {
    stage: &'a str,
    message: &'a str,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Sink {
    dir: PathBuf,
    artifacts: Mutex<Vec<PathBuf>>,
}

impl Sink {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: Mutex::new(Vec::new()),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.artifacts.lock().expect("artifact list").push(p.clone());
        p
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(self.path(name), text)?;
        Ok(())
    }

    fn checkpoint(&self, name: &str, model: &HartreeModel, t: f64, field: &ScalarField) -> Result<()> {
        let p = model.params();
        Checkpoint {
            alpha: p.alpha,
            b: p.b,
            sign: p.sign,
            t,
            field: field.clone(),
        }
        .save(&self.path(name))
    }

    fn error(&self, stage: &str, message: &str) -> Result<()> {
        self.json("error.json", &ErrorRecord { stage, message })
    }
}

pub fn csv_header(radii: &[f64]) -> String {
    let mut cols: Vec<String> = ["t", "mass", "E", "K", "P", "Hdot", "M_quad", "virial_rhs", "N_t"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(radii.iter().map(|r| format!("tight_R{r}")));
    cols.push("S1_accum".into());
    cols.push("tail_fraction".into());
    cols.join(",")
}

pub fn csv_row(r: &StepRecord) -> String {
    let mut vals = vec![
        r.t,
        r.mass,
        r.energy,
        r.kinetic,
        r.potential,
        r.hdot,
        r.m_quad,
        r.virial_rhs,
        r.n_t,
    ];
    vals.extend(&r.tightness);
    vals.push(r.s1_accum);
    vals.push(r.tail_fraction);
    vals.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

/// Run one configured experiment, writing artifacts under `cfg.output_dir`.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let sink = Sink::new(&cfg.output_dir)?;
    let result = match cfg.scenario {
        Scenario::GroundState => run_ground_state(cfg, &sink),
        Scenario::Evolve | Scenario::Defocusing | Scenario::HomogeneousRadial => run_evolve(cfg, &sink),
        Scenario::Dichotomy => run_dichotomy(cfg, opts, &sink),
        Scenario::GnSample => run_gn_sample(cfg, &sink),
    };
    let failure = match result {
        Ok(f) => f,
        Err(e @ HartreeError::Config { .. }) | Err(e @ HartreeError::Param { .. }) => return Err(e),
        Err(e) => {
            sink.error(cfg.scenario.as_str(), &e.to_string())?;
            Some(e.to_string())
        }
    };
    write_manifest(cfg, &sink)?;
    let artifacts = sink.artifacts.lock().expect("artifact list").clone();
    Ok(RunOutcome {
        output_dir: cfg.output_dir.clone(),
        failure,
        artifacts,
    })
}

fn write_manifest(cfg: &ExperimentConfig, sink: &Sink) -> Result<()> {
    let mut artifacts = Vec::new();
    let mut paths = sink.artifacts.lock().expect("artifact list").clone();
    paths.sort();
    paths.dedup();
    for p in paths {
        let bytes = std::fs::read(&p)?;
        artifacts.push(ManifestArtifact {
            path: p.strip_prefix(&sink.dir).unwrap_or(&p).display().to_string(),
            sha256: sha256_hex(&bytes),
        });
    }
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME"),
        code_version: env!("CARGO_PKG_VERSION"),
        os: std::env::consts::OS,
        arch: std::env::consts::ARCH,
        scenario: cfg.scenario.as_str(),
        seed: cfg.seed,
        config_sha256: sha256_hex(cfg.source.as_bytes()),
        config: cfg.source.clone(),
        artifacts,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(sink.dir.join("manifest.json"), text)?;
    Ok(())
}

fn run_ground_state(cfg: &ExperimentConfig, sink: &Sink) -> Result<Option<String>> {
    let model = build_model(cfg)?.with_sign(Sign::Focusing);
    let gs = obtain_ground_state(cfg, &model)?;
    if cfg.wants("checkpoint") {
        sink.checkpoint("ground_state.ighc", &model, 0.0, &gs.w)?;
    }
    let summary = GroundStateRun {
        scenario: cfg.scenario.as_str(),
        ground_state: gs.summary(),
        thresholds: thresholds(&gs)?,
        pohozaev_defect: crate::ground_state::pohozaev_defect(&gs.w, &model)?,
        weinstein_j: weinstein_functional(&gs.w, &model)?,
    };
    if cfg.wants("json") {
        sink.json("summary.json", &summary)?;
    }
    Ok(None)
}

/// Evolve `u0`, streaming CSV rows and checkpoints into `sink`.
fn traced_evolution(
    u0: &ScalarField,
    evolve: &EvolveConfig,
    model: &HartreeModel,
    gs: Option<&GroundState>,
    cfg: &ExperimentConfig,
    sink: &Sink,
    interior: &mut Vec<bool>,
) -> Result<Trajectory> {
    let mut csv = if cfg.wants("csv") {
        let mut w = BufWriter::new(File::create(sink.path("trajectory.csv"))?);
        writeln!(w, "{}", csv_header(&evolve.tight_radii))?;
        Some(w)
    } else {
        None
    };
    let quarter = model.grid().l() / 4.0;
    let mut index = 0usize;
    let traj = evolve_with(u0, evolve, model, gs, |rec, u| {
        if let Some(w) = csv.as_mut() {
            writeln!(w, "{}", csv_row(rec))?;
            w.flush()?;
        }
        interior.push(spectral::mass_fraction_outside(u, quarter) < INTERIOR_MASS_FRACTION);
        if cfg.wants("checkpoint") && cfg.checkpoint_every > 0 && index % cfg.checkpoint_every == 0 {
            sink.checkpoint(&format!("state_{index:05}.ighc"), model, rec.t, u)?;
        }
        index += 1;
        Ok(())
    })?;
    if cfg.wants("checkpoint") {
        sink.checkpoint("final.ighc", model, traj.t_final, &traj.final_state)?;
    }
    if let Some(msg) = &traj.failure {
        sink.error("evolve", msg)?;
    }
    Ok(traj)
}

fn drift(records: &[StepRecord], f: impl Fn(&StepRecord) -> f64) -> f64 {
    let first = f(&records[0]);
    let scale = first.abs().max(f64::MIN_POSITIVE);
    records.iter().map(|r| (f(r) - first).abs()).fold(0.0, f64::max) / scale
}

pub fn defocusing_checks(records: &[StepRecord], interior: &[bool]) -> DefocusingChecks {
    let energy_above_kinetic = records
        .iter()
        .all(|r| r.energy - r.kinetic >= -1e-12 * r.energy.abs().max(1.0));
    let mut increasing = true;
    for (i, w) in records.windows(2).enumerate() {
        if interior[i] && interior[i + 1] && !(w[1].m_quad > w[0].m_quad) {
            increasing = false;
        }
    }
    DefocusingChecks {
        energy_above_kinetic,
        m_quad_increasing_while_interior: increasing,
        interior_records: interior.iter().filter(|b| **b).count(),
    }
}

fn run_evolve(cfg: &ExperimentConfig, sink: &Sink) -> Result<Option<String>> {
    let model = build_model(cfg)?;
    let gs = match model.params().sign {
        Sign::Focusing => Some(obtain_ground_state(cfg, &model)?),
        Sign::Defocusing => None,
    };
    let u0 = initial_data(&cfg.init, model.grid(), gs.as_ref())?;
    let mut interior = Vec::new();
    let traj = traced_evolution(&u0, &cfg.evolve, &model, gs.as_ref(), cfg, sink, &mut interior)?;
    let max_hdot = traj.records.iter().map(|r| r.hdot).fold(0.0, f64::max);
    let summary = EvolveRun {
        scenario: cfg.scenario.as_str(),
        model: ModelSummary::of(&model),
        init: cfg.init.clone(),
        ground_state: gs.as_ref().map(|g| g.summary()),
        threshold: traj.threshold,
        regime: classify(traj.threshold.as_ref(), model.params().sign),
        stop_reason: traj.stop_reason.as_str(),
        t_stop: traj.t_final,
        steps: traj.steps,
        dt_final: traj.dt_final,
        failure: traj.failure.clone(),
        verdict: traj.detect(&cfg.detector),
        max_hdot,
        energy_trapping: gs.as_ref().map(|g| max_hdot < g.hdot_w),
        mass_drift: drift(&traj.records, |r| r.mass),
        energy_drift: drift(&traj.records, |r| r.energy),
        defocusing: (model.params().sign == Sign::Defocusing).then(|| defocusing_checks(&traj.records, &interior)),
    };
    if cfg.wants("json") {
        sink.json("summary.json", &summary)?;
    }
    Ok(traj.failure)
}

fn run_dichotomy(cfg: &ExperimentConfig, opts: &RunOptions, sink: &Sink) -> Result<Option<String>> {
    let model = build_model(cfg)?;
    if model.params().sign != Sign::Focusing {
        return Err(HartreeError::Config {
            key: "model.sign".into(),
            reason: "dichotomy needs the focusing equation".into(),
        });
    }
    let gs = obtain_ground_state(cfg, &model)?;
    let base = spectral::rescale_field(&gs.w, cfg.init.scale)?;
    let base = translate(&base, cfg.init.offset);
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<(usize, DichotomyRow)>> = Mutex::new(Vec::new());
    let first_error: Mutex<Option<HartreeError>> = Mutex::new(None);
    let workers = opts.threads.clamp(1, cfg.ladder.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&c) = cfg.ladder.get(i) else { break };
                match dichotomy_row(i, c, &base, &model, &gs, cfg, sink) {
                    Ok(row) => rows.lock().expect("rows").push((i, row)),
                    Err(e) => {
                        first_error.lock().expect("error slot").get_or_insert(e);
                    }
                }
            });
        }
    });
    if let Some(e) = first_error.into_inner().expect("error slot") {
        return Err(e);
    }
    let mut rows = rows.into_inner().expect("rows");
    rows.sort_by_key(|(i, _)| *i);
    let rows: Vec<DichotomyRow> = rows.into_iter().map(|(_, r)| r).collect();
    let failure = rows.iter().find_map(|r| r.failure.clone());
    let summary = DichotomyRun {
        scenario: cfg.scenario.as_str(),
        model: ModelSummary::of(&model),
        ground_state: gs.summary(),
        scale: cfg.init.scale,
        below_threshold_all_scattered: rows
            .iter()
            .filter(|r| r.regime == Regime::BelowThreshold)
            .all(|r| r.scattered),
        rows,
    };
    if cfg.wants("json") {
        sink.json("summary.json", &summary)?;
    }
    if cfg.wants("csv") {
        let mut w = BufWriter::new(File::create(sink.path("sweep.csv"))?);
        writeln!(w, "c,energy_ratio,hdot_ratio,regime,scattered,stop_reason,t_stop")?;
        for r in &summary.rows {
            let regime = serde_json::to_value(r.regime)?;
            writeln!(
                w,
                "{:e},{:e},{:e},{},{},{},{:e}",
                r.c,
                r.energy_ratio,
                r.hdot_ratio,
                regime.as_str().unwrap_or(""),
                r.scattered,
                r.stop_reason,
                r.t_stop
            )?;
        }
        w.flush()?;
    }
    Ok(failure)
}

fn dichotomy_row(
    i: usize,
    c: f64,
    base: &ScalarField,
    model: &HartreeModel,
    gs: &GroundState,
    cfg: &ExperimentConfig,
    sink: &Sink,
) -> Result<DichotomyRow> {
    let row_sink = Sink {
        dir: sink.dir.join(format!("row_{i:02}")),
        artifacts: Mutex::new(Vec::new()),
    };
    std::fs::create_dir_all(&row_sink.dir)?;
    let u0 = base.scale_real(c);
    let report = threshold_check(&u0, gs, model)?;
    let regime = classify(Some(&report), Sign::Focusing);
    log::info!("dichotomy row c = {c}: {regime:?}");
    let mut interior = Vec::new();
    let traj = traced_evolution(&u0, &cfg.evolve, model, Some(gs), cfg, &row_sink, &mut interior)?;
    let verdict = traj.detect(&cfg.detector);
    let row = DichotomyRow {
        c,
        energy_ratio: report.energy / gs.e_w,
        hdot_ratio: report.hdot / gs.hdot_w,
        regime,
        scattered: verdict.scattered,
        stop_reason: traj.stop_reason.as_str(),
        t_stop: traj.t_final,
        pullback_drift: verdict.pullback_drift,
        p_decay_factor: verdict.p_decay_factor,
        failure: traj.failure.clone(),
    };
    row_sink.json("summary.json", &row)?;
    sink.artifacts
        .lock()
        .expect("artifact list")
        .extend(row_sink.artifacts.into_inner().expect("artifact list"));
    Ok(row)
}

/// `J(f) / C0` for `samples` seeded random fields.
pub fn gn_ratios(model: &HartreeModel, c0: f64, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let f = random_smooth_field(model.grid(), &mut rng);
            Ok(weinstein_functional(&f, model)? / c0)
        })
        .collect()
}

fn run_gn_sample(cfg: &ExperimentConfig, sink: &Sink) -> Result<Option<String>> {
    let model = build_model(cfg)?.with_sign(Sign::Focusing);
    let gs = obtain_ground_state(cfg, &model)?;
    let ratios = gn_ratios(&model, gs.c0, cfg.gn_samples, cfg.seed)?;
    let (argmax, max_ratio) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, (i, r)| if r > a.1 { (i, r) } else { a });
    let ratio_w = weinstein_functional(&gs.w, &model)? / gs.c0;
    if cfg.wants("csv") {
        let mut w = BufWriter::new(File::create(sink.path("gn_samples.csv"))?);
        writeln!(w, "sample,ratio")?;
        for (i, r) in ratios.iter().enumerate() {
            writeln!(w, "{i},{r:e}")?;
        }
        w.flush()?;
    }
    let summary = GnSampleRun {
        scenario: cfg.scenario.as_str(),
        model: ModelSummary::of(&model),
        c0: gs.c0,
        samples: cfg.gn_samples,
        seed: cfg.seed,
        max_ratio,
        argmax,
        ratio_ground_state: ratio_w,
        sharp: max_ratio <= 1.0 + 1e-3 && ratio_w >= 0.999,
    };
    if cfg.wants("json") {
        sink.json("summary.json", &summary)?;
    }
    Ok(None)
}
