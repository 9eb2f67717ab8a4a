//! Run configuration: TOML file plus command-line overrides.
//!
//! Precedence is defaults < config file < flags. Every experiment resolves
//! to a full `Config` value which is echoed verbatim into the run manifest,
//! so a run can be reproduced from its output directory alone.

use std::fmt;
use std::path::Path;

use ompair_core::params::{BathKind, SystemParams};
use ompair_core::sync::SyncSettings;
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(String),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "cannot parse config: {e}"),
            ConfigError::Invalid(e) => write!(f, "invalid config: {e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Base dimensionless parameters of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub omega_m: f64,
    /// Second oscillator frequency; defaults to `omega_m`.
    pub omega_m2: Option<f64>,
    pub gamma: f64,
    pub kc: f64,
    pub delta0: f64,
    pub power: f64,
    pub nth: f64,
    /// "sb" or "cb".
    pub bath: String,
}

impl Default for ParamsSection {
    fn default() -> Self {
        // Fig. 2 working point of the synchronization study.
        ParamsSection {
            omega_m: 1.0,
            omega_m2: None,
            gamma: 0.01,
            kc: 0.0,
            delta0: 1.0,
            power: 0.36,
            nth: 0.0,
            bath: "sb".into(),
        }
    }
}

pub fn parse_bath(s: &str) -> Result<BathKind, ConfigError> {
    match s {
        "sb" => Ok(BathKind::SeparateBaths),
        "cb" => Ok(BathKind::CommonBath),
        other => Err(ConfigError::Invalid(format!(
            "bath must be \"sb\" or \"cb\", got \"{other}\""
        ))),
    }
}

impl ParamsSection {
    pub fn to_system_params(&self) -> Result<SystemParams, ConfigError> {
        let p = SystemParams {
            omega_m1: self.omega_m,
            omega_m2: self.omega_m2.unwrap_or(self.omega_m),
            gamma: self.gamma,
            k_c: self.kc,
            delta0: self.delta0,
            power: self.power,
            n_th: self.nth,
            bath: parse_bath(&self.bath)?,
        };
        p.validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(p)
    }
}

/// A swept axis; `log = true` spaces points geometrically.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl Axis {
    pub fn new(start: f64, stop: f64, count: usize) -> Axis {
        Axis {
            start,
            stop,
            count,
            log: false,
        }
    }

    pub fn validate(&self, name: &str) -> Result<(), ConfigError> {
        if self.count == 0 {
            return Err(ConfigError::Invalid(format!("{name}: empty axis")));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(ConfigError::Invalid(format!("{name}: non-finite range")));
        }
        if self.log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "{name}: log axis needs positive endpoints"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / n;
                if self.log {
                    (self.start.ln() * (1.0 - t) + self.stop.ln() * t).exp()
                } else {
                    self.start * (1.0 - t) + self.stop * t
                }
            })
            .collect()
    }
}

/// Synchronization-analysis knobs (see the core defaults).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyncSection {
    pub transient_damping_times: f64,
    pub window_periods: f64,
    pub dt_sample: f64,
    pub n_delays: usize,
    pub threshold: f64,
}

impl Default for SyncSection {
    fn default() -> Self {
        let s = SyncSettings::default();
        SyncSection {
            transient_damping_times: s.transient_damping_times,
            window_periods: s.window_periods,
            dt_sample: s.dt_sample,
            n_delays: s.n_delays,
            threshold: s.threshold,
        }
    }
}

impl SyncSection {
    pub fn to_settings(&self) -> SyncSettings {
        SyncSettings {
            transient_damping_times: self.transient_damping_times,
            window_periods: self.window_periods,
            dt_sample: self.dt_sample,
            n_delays: self.n_delays,
            threshold: self.threshold,
            ..SyncSettings::default()
        }
    }
}

/// Sweep axes; each experiment reads the axes it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AxesSection {
    /// Mechanical frequency detuning of unit 2 (absolute, units of kappa).
    pub dwm: Axis,
    pub kc: Axis,
    pub delta0: Axis,
    pub power: Axis,
    pub omega_m: Axis,
}

impl Default for AxesSection {
    fn default() -> Self {
        AxesSection {
            dwm: Axis::new(0.01, 0.10, 10),
            kc: Axis::new(0.0, 0.27, 10),
            delta0: Axis::new(-5.0, -2.5, 64),
            power: Axis::new(5.0, 60.0, 64),
            omega_m: Axis::new(1.0, 10.0, 6),
        }
    }
}

/// Trajectory export settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySection {
    pub t_end: f64,
    pub dt_sample: f64,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        TrajectorySection {
            t_end: 1000.0,
            dt_sample: 0.05,
        }
    }
}

/// Optimizer settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeSection {
    /// Coarse grid size before golden-section refinement.
    pub grid: usize,
    /// Absolute refinement tolerance in the swept variable (relative for
    /// log-spaced power grids).
    pub tol: f64,
    /// K_c / omega_m^2 held fixed across a sideband scan.
    pub kc_ratio: f64,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            grid: 64,
            tol: 1e-4,
            kc_ratio: 0.5,
        }
    }
}

/// Execution settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Worker threads; 0 means one per logical CPU.
    pub workers: usize,
    pub seed: u64,
    /// Draw per-cell random initial conditions instead of the deterministic
    /// default (probes multistability).
    pub random_ic: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            workers: 0,
            seed: 0,
            random_ic: false,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub params: ParamsSection,
    pub sync: SyncSection,
    pub axes: AxesSection,
    pub trajectory: TrajectorySection,
    pub optimize: OptimizeSection,
    pub run: RunSection,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.to_system_params()?;
        self.axes.dwm.validate("axes.dwm")?;
        self.axes.kc.validate("axes.kc")?;
        self.axes.delta0.validate("axes.delta0")?;
        self.axes.power.validate("axes.power")?;
        self.axes.omega_m.validate("axes.omega_m")?;
        if self.optimize.grid < 2 {
            return Err(ConfigError::Invalid("optimize.grid must be >= 2".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn axis_spacing() {
        let lin = Axis::new(0.0, 1.0, 5).values();
        assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = Axis {
            start: 1.0,
            stop: 100.0,
            count: 3,
            log: true,
        }
        .values();
        assert!((log[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_keys_rejected() {
        let r: Result<Config, _> = toml::from_str("[params]\nomega = 3.0\n");
        assert!(r.is_err());
    }

    #[test]
    fn bath_parsing() {
        assert_eq!(parse_bath("sb").unwrap(), BathKind::SeparateBaths);
        assert_eq!(parse_bath("cb").unwrap(), BathKind::CommonBath);
        assert!(parse_bath("xx").is_err());
    }
}
