//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinprobe::dynamics::PreparationMode;
use spinprobe::estimation::{SweepSpec, TimeWindow};
use spinprobe::qfi::{Estimator, Route};
use spinprobe::ModelParams;

use crate::RunError;

/// Evenly spaced times `start..=stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        TimeGrid { start, stop, points }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.points == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(RunError::Config(format!("bad time grid {self:?}")));
        }
        if self.start < 0.0 || self.stop < self.start || (self.points > 1 && self.stop == self.start) {
            return Err(RunError::Config(format!("time grid needs 0 <= start < stop, got {self:?}")));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points).map(|i| self.start + (self.stop - self.start) * i as f64 / n).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryTask {
    pub mode: PreparationMode,
    pub times: TimeGrid,
}

/// QFI against time, for every mode and every value of the estimated
/// parameter (the value in `params` when `values` is absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiTimeTask {
    pub estimator: Estimator,
    pub modes: Vec<PreparationMode>,
    pub times: TimeGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub route: Route,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareTask {
    pub estimator: Estimator,
    pub x_value: f64,
    pub window: TimeWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCheckTask {
    /// Bath sizes to check, at most 8 spins each.
    pub n: Vec<usize>,
    pub times: TimeGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// CSV destination; relative paths resolve against the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub params: ModelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qfi_time: Option<QfiTimeTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opt_sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_check: Option<OracleCheckTask>,
}

/// The single command payload of a config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Task<'a> {
    Trajectory(&'a TrajectoryTask),
    QfiTime(&'a QfiTimeTask),
    OptSweep(&'a SweepSpec),
    Compare(&'a CompareTask),
    OracleCheck(&'a OracleCheckTask),
}

impl ExperimentConfig {
    pub fn new(params: ModelParams) -> Self {
        ExperimentConfig {
            output: None,
            params,
            trajectory: None,
            qfi_time: None,
            opt_sweep: None,
            compare: None,
            oracle_check: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn task(&self) -> Result<Task<'_>, RunError> {
        let mut found = Vec::new();
        if let Some(t) = &self.trajectory {
            found.push(Task::Trajectory(t));
        }
        if let Some(t) = &self.qfi_time {
            found.push(Task::QfiTime(t));
        }
        if let Some(t) = &self.opt_sweep {
            found.push(Task::OptSweep(t));
        }
        if let Some(t) = &self.compare {
            found.push(Task::Compare(t));
        }
        if let Some(t) = &self.oracle_check {
            found.push(Task::OracleCheck(t));
        }
        match found.as_slice() {
            [one] => Ok(*one),
            [] => Err(RunError::Config(
                "no command: expected one of trajectory, qfi_time, opt_sweep, compare, oracle_check".into(),
            )),
            _ => Err(RunError::Config(format!("{} commands given, expected exactly one", found.len()))),
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        self.params.clone().validate()?;
        match self.task()? {
            Task::Trajectory(t) => t.times.validate(),
            Task::QfiTime(t) => {
                t.times.validate()?;
                if t.modes.is_empty() {
                    return Err(RunError::Config("qfi_time.modes is empty".into()));
                }
                if let Some(values) = &t.values {
                    if values.is_empty() {
                        return Err(RunError::Config("qfi_time.values is empty".into()));
                    }
                    for &x in values {
                        t.estimator.with_value(&self.params, x).validate()?;
                    }
                }
                Ok(())
            }
            Task::OptSweep(s) => Ok(s.validate()?),
            Task::Compare(c) => {
                c.window.validate()?;
                c.estimator.with_value(&self.params, c.x_value).validate()?;
                Ok(())
            }
            Task::OracleCheck(o) => {
                o.times.validate()?;
                if o.n.is_empty() {
                    return Err(RunError::Config("oracle_check.n is empty".into()));
                }
                if let Some(&n) = o.n.iter().find(|&&n| n == 0 || n > spinprobe::oracle::MAX_ORACLE_SPINS) {
                    return Err(RunError::Config(format!(
                        "oracle_check.n = {n} outside 1..={}",
                        spinprobe::oracle::MAX_ORACLE_SPINS
                    )));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[params]
n = 4
eps0 = 4.0
eps = 2.0
delta = 1.0
omega = 1.0
chi = 0.0
g = 0.1
temperature = 1.0

[trajectory]
mode = "PulseCorrelated"
times = { start = 0.0, stop = 5.0, points = 11 }
"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert!(matches!(cfg.task().unwrap(), Task::Trajectory(t) if t.times.points == 11));
        assert_eq!(cfg.params.n, 4);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_two_commands() {
        let text = format!("{MINIMAL}\n[compare]\nestimator = \"temperature\"\nx_value = 1.0\nwindow = {{ t_min = 0.0, t_max = 1.0 }}\n");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(RunError::Config(_))));
    }

    #[test]
    fn rejects_unknown_keys_and_modes() {
        assert!(ExperimentConfig::from_toml(&MINIMAL.replace("n = 4", "n = 4\nfoo = 1")).is_err());
        assert!(ExperimentConfig::from_toml(&MINIMAL.replace("PulseCorrelated", "Pulsed")).is_err());
    }

    #[test]
    fn time_grid() {
        assert_eq!(TimeGrid::new(0.0, 1.0, 3).times(), vec![0.0, 0.5, 1.0]);
        assert_eq!(TimeGrid::new(2.0, 2.0, 1).times(), vec![2.0]);
        assert!(TimeGrid::new(1.0, 0.0, 3).validate().is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).validate().is_err());
    }
}
