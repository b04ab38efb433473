//! Sectioned `key = value` experiment configuration (grammar in docs/config.md).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::DetectorConfig;
use crate::error::{HartreeError, Result};
use crate::evolution::{EvolveConfig, SpongeConfig};
use crate::ground_state::{Initializer, WeinsteinConfig};
use crate::model::Sign;

/// Raw sections in file order; keys before the first header live in section `""`.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

fn cfg_err(key: impl Into<String>, reason: impl Into<String>) -> HartreeError {
    HartreeError::Config {
        key: key.into(),
        reason: reason.into(),
    }
}

pub fn parse_raw(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::default();
    let mut section = String::new();
    raw.sections.insert(section.clone(), BTreeMap::new());
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find(['#', ';']) {
            Some(i) => &line[..i],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| cfg_err(line, format!("line {}: unterminated section header", lineno + 1)))?
                .trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(cfg_err(name, format!("line {}: invalid section name", lineno + 1)));
            }
            if raw.sections.contains_key(name) {
                return Err(cfg_err(name, format!("line {}: duplicate section", lineno + 1)));
            }
            section = name.to_string();
            raw.sections.insert(section.clone(), BTreeMap::new());
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| cfg_err(line, format!("line {}: expected key = value", lineno + 1)))?;
        let k = k.trim();
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(cfg_err(k, format!("line {}: invalid key", lineno + 1)));
        }
        let entries = raw.sections.get_mut(&section).expect("section inserted");
        if entries.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(cfg_err(full_key(&section, k), format!("line {}: duplicate key", lineno + 1)));
        }
    }
    Ok(raw)
}

fn full_key(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    GroundState,
    Evolve,
    Dichotomy,
    Defocusing,
    HomogeneousRadial,
    GnSample,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::GroundState => "ground_state",
            Scenario::Evolve => "evolve",
            Scenario::Dichotomy => "dichotomy",
            Scenario::Defocusing => "defocusing",
            Scenario::HomogeneousRadial => "homogeneous_radial",
            Scenario::GnSample => "gn_sample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitFamily {
    Gaussian,
    Bubble,
    ScaledGroundState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitConfig {
    pub family: InitFamily,
    pub amplitude: f64,
    pub width: f64,
    pub scale: f64,
    pub offset: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub n: usize,
    pub l: f64,
    pub alpha: f64,
    pub b: f64,
    pub sign: Sign,
    pub eps_reg: f64,
    pub init: InitConfig,
    pub weinstein: WeinsteinConfig,
    pub ground_state_path: Option<PathBuf>,
    pub evolve: EvolveConfig,
    pub detector: DetectorConfig,
    pub gn_samples: usize,
    pub ladder: Vec<f64>,
    pub output_dir: PathBuf,
    pub formats: Vec<String>,
    /// Records between checkpoints; 0 writes only the final state.
    pub checkpoint_every: usize,
    pub source: String,
}

struct Reader<'a> {
    raw: &'a RawConfig,
    used: Vec<String>,
}

impl<'a> Reader<'a> {
    fn get(&mut self, section: &str, key: &str) -> Option<&'a str> {
        let v = self.raw.sections.get(section)?.get(key)?;
        self.used.push(full_key(section, key));
        Some(v.as_str())
    }

    fn num<T: std::str::FromStr>(&mut self, section: &str, key: &str, default: T) -> Result<T> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| cfg_err(full_key(section, key), format!("cannot parse `{v}`"))),
        }
    }

    fn list(&mut self, section: &str, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(section, key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| cfg_err(full_key(section, key), format!("cannot parse `{s}`")))
                })
                .collect(),
        }
    }

    fn flag(&mut self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.get(section, key) {
            None => Ok(default),
            Some("true") | Some("yes") | Some("1") => Ok(true),
            Some("false") | Some("no") | Some("0") => Ok(false),
            Some(v) => Err(cfg_err(full_key(section, key), format!("expected a boolean, got `{v}`"))),
        }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(path.display().to_string(), e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parse and check; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw = parse_raw(text)?;
        let mut r = Reader {
            raw: &raw,
            used: Vec::new(),
        };
        let scenario = match r.get("", "scenario") {
            None => return Err(cfg_err("scenario", "missing")),
            Some("ground_state") => Scenario::GroundState,
            Some("evolve") => Scenario::Evolve,
            Some("dichotomy") => Scenario::Dichotomy,
            Some("defocusing") => Scenario::Defocusing,
            Some("homogeneous_radial") => Scenario::HomogeneousRadial,
            Some("gn_sample") => Scenario::GnSample,
            Some(v) => return Err(cfg_err("scenario", format!("unknown scenario `{v}`"))),
        };
        let seed = r.num("", "seed", 0u64)?;
        let n = r.num("grid", "n", 64usize)?;
        let l = r.num("grid", "L", 20.0)?;
        let alpha = r.num("model", "alpha", 2.0)?;
        let b = r.num("model", "b", 0.5)?;
        let sign = match r.get("model", "sign").unwrap_or("focusing") {
            "focusing" | "+1" | "1" => Sign::Focusing,
            "defocusing" | "-1" => Sign::Defocusing,
            v => return Err(cfg_err("model.sign", format!("expected focusing or defocusing, got `{v}`"))),
        };
        let eps_reg = r.num("model", "eps_reg", crate::model::DEFAULT_EPS_REG)?;

        let family = match r.get("init", "family").unwrap_or("gaussian") {
            "gaussian" => InitFamily::Gaussian,
            "bubble" => InitFamily::Bubble,
            "scaled_ground_state" => InitFamily::ScaledGroundState,
            v => return Err(cfg_err("init.family", format!("unknown family `{v}`"))),
        };
        let offset = r.list("init", "offset", &[0.0, 0.0, 0.0])?;
        if offset.len() != 3 {
            return Err(cfg_err("init.offset", "expected three comma-separated numbers"));
        }
        let init = InitConfig {
            family,
            amplitude: r.num("init", "amplitude", 1.0)?,
            width: r.num("init", "width", 1.0)?,
            scale: r.num("init", "scale", 1.0)?,
            offset: [offset[0], offset[1], offset[2]],
        };
        if !(init.width > 0.0) {
            return Err(cfg_err("init.width", "must be positive"));
        }
        if !(init.scale > 0.0) {
            return Err(cfg_err("init.scale", "must be positive"));
        }

        let wd = WeinsteinConfig::default();
        let weinstein = WeinsteinConfig {
            max_iters: r.num("ground_state", "max_iters", wd.max_iters)?,
            tau: r.num("ground_state", "tau", wd.tau)?,
            max_step: r.num("ground_state", "max_step", wd.max_step)?,
            tol: r.num("ground_state", "tol", wd.tol)?,
            grad_tol: r.num("ground_state", "grad_tol", wd.grad_tol)?,
            init: match r.get("ground_state", "init").unwrap_or("gaussian") {
                "gaussian" => Initializer::Gaussian,
                "bubble" => Initializer::Bubble,
                v => return Err(cfg_err("ground_state.init", format!("unknown initializer `{v}`"))),
            },
        };
        weinstein
            .validate()
            .map_err(|e| cfg_err("ground_state", e.to_string()))?;
        let ground_state_path = match r.get("ground_state", "load") {
            None => None,
            Some(p) => {
                let path = base.join(p);
                if !path.is_file() {
                    return Err(cfg_err("ground_state.load", format!("{} is not a file", path.display())));
                }
                Some(path)
            }
        };

        let ed = EvolveConfig::default();
        let sponge = if r.flag("sponge", "enabled", false)? {
            let sd = SpongeConfig::default();
            Some(SpongeConfig {
                width: r.num("sponge", "width", sd.width)?,
                strength: r.num("sponge", "strength", sd.strength)?,
            })
        } else {
            None
        };
        let evolve = EvolveConfig {
            dt: r.num("evolve", "dt", ed.dt)?,
            t_end: r.num("evolve", "t_end", ed.t_end)?,
            record_every: r.num("evolve", "record_every", ed.record_every)?,
            grad_cap: r.num("evolve", "grad_cap", ed.grad_cap)?,
            tail_cap: r.num("evolve", "tail_cap", ed.tail_cap)?,
            sponge,
            snapshot_every: r.num("evolve", "snapshot_every", ed.snapshot_every)?,
            snapshot_window: r.num("evolve", "snapshot_window", ed.snapshot_window)?,
            tight_radii: r.list("diagnostics", "tight_radii", &ed.tight_radii)?,
        };
        evolve
            .validate()
            .map_err(|e| cfg_err("evolve", e.to_string()))?;
        let dd = DetectorConfig::default();
        let detector = DetectorConfig {
            tol: r.num("diagnostics", "detector_tol", dd.tol)?,
            window: r.num("diagnostics", "detector_window", dd.window)?,
            decay_factor: r.num("diagnostics", "decay_factor", dd.decay_factor)?,
        };
        let gn_samples = r.num("gn_sample", "samples", 200usize)?;
        let ladder = r.list("dichotomy", "ladder", &[0.3, 0.5, 0.7, 0.9, 1.1, 1.3])?;

        let output_dir = base.join(r.get("output", "dir").unwrap_or("out"));
        let formats: Vec<String> = r
            .get("output", "formats")
            .unwrap_or("json,csv,checkpoint")
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        for f in &formats {
            if !matches!(f.as_str(), "json" | "csv" | "checkpoint") {
                return Err(cfg_err("output.formats", format!("unknown format `{f}`")));
            }
        }
        let checkpoint_every = r.num("output", "checkpoint_every", 0usize)?;

        for (section, entries) in &raw.sections {
            for key in entries.keys() {
                let fk = full_key(section, key);
                if !r.used.contains(&fk) {
                    return Err(cfg_err(fk, "unknown key"));
                }
            }
        }

        let cfg = Self {
            scenario,
            seed,
            n,
            l,
            alpha,
            b,
            sign,
            eps_reg,
            init,
            weinstein,
            ground_state_path,
            evolve,
            detector,
            gn_samples,
            ladder,
            output_dir,
            formats,
            checkpoint_every,
            source: text.to_string(),
        };
        cfg.check_scenario()?;
        Ok(cfg)
    }

    fn check_scenario(&self) -> Result<()> {
        crate::grid::make_grid(self.n, self.l).map_err(|e| cfg_err("grid.n", e.to_string()))?;
        crate::model::validate_params(self.alpha, self.b, self.sign)
            .map_err(|e| cfg_err("model", e.to_string()))?
            .with_eps(self.eps_reg)
            .map_err(|e| cfg_err("model.eps_reg", e.to_string()))?;
        match self.scenario {
            Scenario::HomogeneousRadial => {
                if self.b != 0.0 {
                    return Err(cfg_err("model.b", "homogeneous_radial requires b = 0"));
                }
                if self.init.offset != [0.0; 3] {
                    return Err(cfg_err("init.offset", "homogeneous_radial requires radial data (offset = 0)"));
                }
            }
            Scenario::Defocusing => {
                if self.sign != Sign::Defocusing {
                    return Err(cfg_err("model.sign", "defocusing scenario requires sign = defocusing"));
                }
            }
            _ => {}
        }
        if self.sign == Sign::Defocusing && self.init.family == InitFamily::ScaledGroundState {
            return Err(cfg_err("init.family", "scaled_ground_state needs the focusing ground state"));
        }
        Ok(())
    }

    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let raw = parse_raw("scenario = evolve # trailing\n[grid]\nn = 32\n; note\nL=10\n").unwrap();
        assert_eq!(raw.sections[""]["scenario"], "evolve");
        assert_eq!(raw.sections["grid"]["L"], "10");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_raw("[grid\n").is_err());
        assert!(parse_raw("novalue\n").is_err());
        assert!(parse_raw("a = 1\na = 2\n").is_err());
        assert!(parse_raw("[g]\n[g]\n").is_err());
    }

    #[test]
    fn names_offending_key() {
        let e = ExperimentConfig::parse("scenario = evolve\n[grid]\nn = abc\n", Path::new(".")).unwrap_err();
        assert!(e.to_string().contains("grid.n"), "{e}");
        let e = ExperimentConfig::parse("scenario = evolve\n[grid]\nbogus = 1\n", Path::new(".")).unwrap_err();
        assert!(e.to_string().contains("grid.bogus"), "{e}");
    }

    #[test]
    fn homogeneous_radial_contract() {
        let ok = ExperimentConfig::parse("scenario = homogeneous_radial\n[model]\nb = 0\n", Path::new("."));
        assert!(ok.is_ok());
        let e = ExperimentConfig::parse("scenario = homogeneous_radial\n[model]\nb = 0.3\n", Path::new(".")).unwrap_err();
        assert!(e.to_string().contains("model.b"));
        let e = ExperimentConfig::parse(
            "scenario = homogeneous_radial\n[model]\nb = 0\n[init]\noffset = 1,0,0\n",
            Path::new("."),
        )
        .unwrap_err();
        assert!(e.to_string().contains("init.offset"));
    }
}
