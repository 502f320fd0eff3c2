//! Built-in experiment configurations.

use spinprobe::dynamics::PreparationMode;
use spinprobe::estimation::{SweepSpec, TimeWindow};
use spinprobe::qfi::{Estimator, Route};
use spinprobe::{ModelParams, SiteValues};

use crate::config::{ExperimentConfig, OracleCheckTask, QfiTimeTask, TimeGrid};

/// Temperature set for presets that trace several temperatures.
pub const CANONICAL_TEMPERATURES: [f64; 3] = [0.5, 1.0, 2.0];

pub const PRESET_NAMES: [&str; 7] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "oracle-check"];

fn fig1_params() -> ModelParams {
    ModelParams::default()
}

fn temperature_traces(params: ModelParams) -> ExperimentConfig {
    ExperimentConfig {
        qfi_time: Some(QfiTimeTask {
            estimator: Estimator::Temperature,
            modes: vec![PreparationMode::PulseCorrelated, PreparationMode::PulseUncorrelated],
            times: TimeGrid::new(0.0, 20.0, 2001),
            values: Some(CANONICAL_TEMPERATURES.to_vec()),
            route: Route::Bloch,
        }),
        ..ExperimentConfig::new(params)
    }
}

fn temperature_sweep(params: ModelParams) -> ExperimentConfig {
    // 0.4, 0.6, ..., 3.0
    let values = (0..14).map(|i| (4 + 2 * i) as f64 / 10.0).collect();
    ExperimentConfig {
        opt_sweep: Some(SweepSpec {
            variable: Estimator::Temperature,
            values,
            window: TimeWindow::default(),
            modes: PreparationMode::ALL.to_vec(),
        }),
        ..ExperimentConfig::new(params)
    }
}

fn coupling_traces(params: ModelParams) -> ExperimentConfig {
    ExperimentConfig {
        qfi_time: Some(QfiTimeTask {
            estimator: Estimator::Coupling,
            modes: PreparationMode::ALL.to_vec(),
            times: TimeGrid::new(0.0, 10.0, 2001),
            values: None,
            route: Route::Bloch,
        }),
        ..ExperimentConfig::new(params)
    }
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let mut cfg = match name {
        "fig1" => temperature_traces(fig1_params()),
        "fig2" => temperature_sweep(fig1_params()),
        "fig3" => temperature_sweep(ModelParams { g: 1.0, ..fig1_params() }),
        "fig4" => temperature_sweep(ModelParams { n: 10, chi: SiteValues::Uniform(0.1), ..fig1_params() }),
        "fig5" => coupling_traces(ModelParams { g: 0.1, temperature: 1.0, ..fig1_params() }),
        "fig6" => coupling_traces(ModelParams { g: 0.5, temperature: 0.5, ..fig1_params() }),
        "oracle-check" => ExperimentConfig {
            oracle_check: Some(OracleCheckTask { n: vec![2, 4, 6], times: TimeGrid::new(0.0, 10.0, 101) }),
            ..ExperimentConfig::new(ModelParams { g: 0.5, chi: SiteValues::Uniform(0.1), ..fig1_params() })
        },
        _ => return None,
    };
    cfg.output = Some(format!("{name}.csv").into());
    Some(cfg)
}

pub fn builtin_presets() -> Vec<(&'static str, ExperimentConfig)> {
    PRESET_NAMES.iter().map(|&n| (n, preset(n).expect("known preset"))).collect()
}
