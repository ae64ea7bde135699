//! Flat `key = value` experiment configuration with named presets.
//!
//! Physical values are given in table units (dBm, kHz, MHz, mW, meters) and
//! converted to SI once when the configuration is built.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use swipt_core::sysmodel::{dbm_to_watt, EavesdropperModel, SecureParams, SystemParams};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    MoopRegion,
    MoopPairwise,
    SecureSweep,
    SolverSelftest,
}

impl Experiment {
    pub const ALL: [Experiment; 4] =
        [Experiment::MoopRegion, Experiment::MoopPairwise, Experiment::SecureSweep, Experiment::SolverSelftest];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::MoopRegion => "moop-region",
            Experiment::MoopPairwise => "moop-pairwise",
            Experiment::SecureSweep => "secure-sweep",
            Experiment::SolverSelftest => "solver-selftest",
        }
    }

    pub fn default_preset(self) -> Preset {
        match self {
            Experiment::SecureSweep => Preset::Table31,
            _ => Preset::Table21,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

/// Named parameter sets of the two system models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Table21,
    Table31,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Table21 => "table-2.1",
            Preset::Table31 => "table-3.1",
        }
    }
}

impl FromStr for Preset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table-2.1" => Ok(Preset::Table21),
            "table-3.1" => Ok(Preset::Table31),
            _ => Err(ConfigError::UnknownPreset(s.to_string())),
        }
    }
}

/// Objective index used by the pairwise sweep: 0 IR-EE, 1 EH-EE, 2 transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ObjectiveAxis(pub usize);

impl ObjectiveAxis {
    const NAMES: [&'static str; 3] = ["ir-ee", "eh-ee", "power"];

    pub fn as_str(self) -> &'static str {
        Self::NAMES[self.0]
    }
}

impl FromStr for ObjectiveAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::NAMES.iter().position(|n| *n == s).map(ObjectiveAxis).ok_or_else(|| format!("expected one of {}", Self::NAMES.join(", ")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub preset: Preset,
    pub seed: u64,
    pub trials: usize,
    pub weight_step: f64,
    pub antennas: Vec<usize>,
    /// SINR targets of the secure sweep, in dB.
    pub sinr_db: Vec<f64>,
    /// Objective whose weight stays zero in the pairwise sweep.
    pub zero_weight: ObjectiveAxis,
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    /// Solver gap tolerance override.
    pub gap_tol: Option<f64>,
    /// Single-objective system of the energy-efficiency experiments.
    pub system: SystemParams,
    /// Multi-user system of the secure sweep.
    pub secure: SecureParams,
    /// Every key applied on top of the preset, in order, as given.
    pub entries: Vec<(String, String)>,
}

/// Default number of Monte Carlo trials per preset.
pub const DEFAULT_TRIALS: usize = 200;

impl ExperimentConfig {
    /// Preset defaults for an experiment.
    pub fn preset(experiment: Experiment, preset: Preset) -> Self {
        let weight_step = match experiment {
            Experiment::MoopPairwise => 0.01,
            _ => 0.04,
        };
        let antennas = match preset {
            Preset::Table21 => vec![SystemParams::table_2_1().n_tx],
            Preset::Table31 => vec![5, 8],
        };
        Self {
            experiment,
            preset,
            seed: 1,
            trials: DEFAULT_TRIALS,
            weight_step,
            antennas,
            sinr_db: (0..6).map(|i| 10.0 + 2.0 * i as f64).collect(),
            zero_weight: ObjectiveAxis(2),
            out_dir: PathBuf::from("results"),
            workers: 0,
            gap_tol: None,
            system: SystemParams::table_2_1(),
            secure: SecureParams::table_3_1(8),
            entries: Vec::new(),
        }
    }

    /// Build from config-file text followed by overrides; later keys win.
    pub fn load(experiment: Experiment, text: Option<&str>, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut pairs = match text {
            Some(t) => parse_pairs(t)?,
            None => Vec::new(),
        };
        pairs.extend(overrides.iter().cloned());
        let preset = match pairs.iter().rev().find(|(k, _)| k == "preset") {
            Some((_, v)) => v.parse()?,
            None => experiment.default_preset(),
        };
        let mut cfg = Self::preset(experiment, preset);
        for (key, value) in &pairs {
            if key != "preset" {
                cfg.apply(key, value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one key.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: String| ConfigError::BadValue { key: key.to_string(), value: value.to_string(), reason };
        let num = || value.parse::<f64>().map_err(|e| bad(e.to_string())).and_then(|v| finite(v).map_err(bad));
        let count = || value.parse::<usize>().map_err(|e| bad(e.to_string()));
        let sys = &mut self.system;
        let sec = &mut self.secure;
        match key {
            "seed" => self.seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "trials" => self.trials = count()?,
            "weight_step" => self.weight_step = num()?,
            "antennas" => self.antennas = parse_list(value).map_err(bad)?,
            "sinr_db" => self.sinr_db = parse_list(value).map_err(bad)?,
            "zero_weight" => self.zero_weight = value.parse().map_err(bad)?,
            "out" => self.out_dir = PathBuf::from(value),
            "workers" => self.workers = count()?,
            "gap_tol" => self.gap_tol = Some(num()?),
            "eavesdropper" => {
                sec.eavesdropper = match value {
                    "multi-user" => EavesdropperModel::MultiUser,
                    "single-user" => EavesdropperModel::SingleUser,
                    _ => return Err(bad("expected multi-user or single-user".into())),
                }
            }
            "bandwidth_khz" => sys.bandwidth_hz = num()? * 1e3,
            "p_ant_mw" => sys.p_ant_w = num()? * 1e-3,
            "p_c_w" => sys.p_c_w = num()?,
            "xi" => sys.xi = num()?,
            "p_max_w" => sys.p_max_w = num()?,
            "noise_dbm" => sys.noise_w = dbm_to_watt(num()?),
            "eta" => {
                let v = num()?;
                sys.eta = v;
                sec.eta = v;
            }
            "carrier_mhz" => {
                let v = num()? * 1e6;
                sys.propagation.carrier_hz = v;
                sec.propagation.carrier_hz = v;
            }
            "antenna_gain_dbi" => {
                let v = num()?;
                sys.propagation.antenna_gain_dbi = v;
                sec.propagation.antenna_gain_dbi = v;
            }
            "rician_db" => {
                let v = num()?;
                sys.propagation.rician_factor_db = v;
                sec.propagation.rician_factor_db = v;
            }
            "d_ref_m" => {
                let v = num()?;
                sys.propagation.d_ref_m = v;
                sec.propagation.d_ref_m = v;
            }
            "d_max_m" => {
                let v = num()?;
                sys.propagation.d_max_m = v;
                sec.propagation.d_max_m = v;
            }
            "n_rx" => sec.n_rx = count()?,
            "sigma_ant_dbm" => sec.sigma_ant_w = dbm_to_watt(num()?),
            "sigma_s_dbm" => sec.sigma_s_w = dbm_to_watt(num()?),
            "r_max" => {
                let v = num()?;
                sec.r_max = vec![vec![v; sec.k_desired]; sec.m_roaming];
            }
            "p_req1_dbm" => {
                let v = num()?;
                sec.p_req1_w = vec![dbm_to_watt(v); sec.k_desired];
            }
            "p_req2_dbm" => {
                let v = num()?;
                sec.p_req2_w = vec![dbm_to_watt(v); sec.m_roaming];
            }
            "p_max_dbm" => sec.p_max_w = Some(dbm_to_watt(num()?)),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        self.entries.push((key.to_string(), value.to_string()));
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        let n = (1.0 / self.weight_step).round();
        if !(self.weight_step > 0.0 && self.weight_step <= 1.0) || (n * self.weight_step - 1.0).abs() > 1e-9 {
            return invalid(format!("weight_step {} does not divide 1", self.weight_step));
        }
        if self.antennas.is_empty() || self.antennas.contains(&0) {
            return invalid("antennas must list positive counts".into());
        }
        if self.sinr_db.is_empty() {
            return invalid("sinr_db must not be empty".into());
        }
        self.system.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let mut secure = self.secure.clone();
        secure.n_tx = self.max_antennas();
        secure.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(tol) = self.gap_tol {
            if !(tol > 0.0) {
                return invalid("gap_tol must be positive".into());
            }
        }
        Ok(())
    }

    pub fn max_antennas(&self) -> usize {
        self.antennas.iter().copied().max().unwrap_or(1)
    }

    pub fn system_with(&self, n_tx: usize) -> SystemParams {
        SystemParams { n_tx, ..self.system.clone() }
    }

    pub fn secure_with(&self, n_tx: usize, gamma_db: f64) -> SecureParams {
        self.secure.clone().with_n_tx(n_tx).with_gamma_db(gamma_db)
    }
}

fn finite(v: f64) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| s.parse::<T>().map_err(|e| format!("`{s}`: {e}"))).collect()
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Split a `key=value` override.
pub fn parse_override(s: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::Syntax { line: 0, text: s.to_string() })?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let pairs = parse_pairs("# header\n\nseed = 7 # trailing\ntrials=3\n").unwrap();
        assert_eq!(pairs, vec![("seed".into(), "7".into()), ("trials".into(), "3".into())]);
    }

    #[test]
    fn missing_equals_is_a_syntax_error() {
        assert!(matches!(parse_pairs("seed 7"), Err(ConfigError::Syntax { line: 1, .. })));
    }

    #[test]
    fn overrides_win_over_file() {
        let cfg = ExperimentConfig::load(Experiment::MoopRegion, Some("seed = 3\ntrials = 4"), &[("seed".into(), "9".into())]).unwrap();
        assert_eq!((cfg.seed, cfg.trials), (9, 4));
    }

    #[test]
    fn units_are_converted_once() {
        let cfg = ExperimentConfig::load(
            Experiment::SecureSweep,
            Some("p_req1_dbm = 10\nsigma_s_dbm = -30\nbandwidth_khz = 100\np_ant_mw = 50"),
            &[],
        )
        .unwrap();
        assert!((cfg.secure.p_req1_w[0] - 1e-2).abs() < 1e-15);
        assert!((cfg.secure.sigma_s_w - 1e-6).abs() < 1e-18);
        assert_eq!(cfg.system.bandwidth_hz, 1e5);
        assert!((cfg.system.p_ant_w - 0.05).abs() < 1e-15);
    }

    #[test]
    fn presets_follow_the_experiment() {
        let a = ExperimentConfig::load(Experiment::SecureSweep, None, &[]).unwrap();
        assert_eq!(a.preset, Preset::Table31);
        assert_eq!(a.antennas, vec![5, 8]);
        assert_eq!(a.sinr_db, vec![10.0, 12.0, 14.0, 16.0, 18.0, 20.0]);
        assert_eq!(a.trials, DEFAULT_TRIALS);
        let b = ExperimentConfig::load(Experiment::MoopPairwise, None, &[]).unwrap();
        assert_eq!((b.preset, b.weight_step), (Preset::Table21, 0.01));
    }

    #[test]
    fn invalid_values_are_rejected() {
        let load = |k: &str, v: &str| ExperimentConfig::load(Experiment::MoopRegion, None, &[(k.into(), v.into())]);
        assert!(matches!(load("trials", "0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(load("weight_step", "0.03"), Err(ConfigError::Invalid(_))));
        assert!(matches!(load("colour", "red"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(load("seed", "-1"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(load("preset", "table-9"), Err(ConfigError::UnknownPreset(_))));
        assert!(matches!(load("zero_weight", "rate"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(load("eta", "nan"), Err(ConfigError::BadValue { .. })));
    }
}
