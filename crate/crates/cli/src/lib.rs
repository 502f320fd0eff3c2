//! Config-driven front end: runs one experiment and writes its CSV.

pub mod config;
pub mod presets;

use std::io::Write;
use std::path::Path;

use spinprobe::dynamics::{prepare_params, write_trajectory_csv};
use spinprobe::estimation::{compare_preparations, sweep_parameter, write_comparison_csv, write_sweep_csv};
use spinprobe::oracle::{oracle_check, write_oracle_check_csv};
use spinprobe::qfi::{write_qfi_csv, DerivativeOptions, Sensitivity};

use crate::config::{ExperimentConfig, Task};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Numeric(_) => 3,
        }
    }
}

impl From<spinprobe::Error> for RunError {
    fn from(e: spinprobe::Error) -> Self {
        if e.is_config() {
            RunError::Config(e.to_string())
        } else {
            RunError::Numeric(e.to_string())
        }
    }
}

/// Result of a run: the CSV text plus per-cell failures that did not stop it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub failures: Vec<String>,
}

/// Compute the CSV for `cfg` without touching the file system.
pub fn render(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    let p = cfg.params.clone().validate()?;
    let mut out = Vec::new();
    let mut failures = Vec::new();
    let io = |e: std::io::Error| RunError::Io(e.to_string());
    match cfg.task()? {
        Task::Trajectory(t) => {
            let ens = prepare_params(&p, t.mode)?;
            write_trajectory_csv(&mut out, &p, t.mode, &ens.trajectory(&t.times.times())).map_err(io)?;
        }
        Task::QfiTime(task) => {
            let times = task.times.times();
            let values = task.values.clone().unwrap_or_else(|| vec![task.estimator.value(&p)]);
            let mut records = Vec::new();
            for &x in &values {
                let q = task.estimator.with_value(&p, x);
                for &mode in &task.modes {
                    let cell = format!("{}={x} {mode}", task.estimator.name());
                    let s = Sensitivity::new(&q, mode, task.estimator, DerivativeOptions::default())
                        .map_err(|e| cell_error(e, cell.clone()))?;
                    for &t in &times {
                        let r = s.record(t, task.route).map_err(|e| cell_error(e, format!("{cell} t={t}")))?;
                        if !r.richardson_ok {
                            failures.push(format!("warning: {cell} t={t}: finite-difference step not converged"));
                        }
                        records.push(r);
                    }
                }
            }
            write_qfi_csv(&mut out, &p, &records).map_err(io)?;
        }
        Task::OptSweep(spec) => {
            let outcome = sweep_parameter(spec, &p)?;
            write_sweep_csv(&mut out, &p, &outcome.records).map_err(io)?;
            failures.extend(outcome.failures.iter().map(|f| {
                format!("{}={} {}: {}", spec.variable.name(), f.x_value, f.mode, f.error)
            }));
        }
        Task::Compare(c) => {
            let cmp = compare_preparations(&p, c.estimator, c.x_value, &c.window)?;
            write_comparison_csv(&mut out, &p, &cmp).map_err(io)?;
        }
        Task::OracleCheck(o) => {
            let rows = oracle_check(&p, &o.n, &o.times.times())?;
            write_oracle_check_csv(&mut out, &p, &rows).map_err(io)?;
            failures.extend(rows.iter().filter(|r| !r.passed()).map(|r| {
                format!(
                    "N={} {}: bloch deviation {:.3e}, QFI relative error {:.3e} above tolerance",
                    r.n, r.mode, r.max_bloch_dev, r.max_qfi_rel_err
                )
            }));
        }
    }
    Ok(Report { csv: String::from_utf8(out).expect("csv is utf-8"), failures })
}

fn cell_error(e: spinprobe::Error, cell: String) -> RunError {
    match RunError::from(e) {
        RunError::Numeric(m) => RunError::Numeric(format!("{cell}: {m}")),
        other => other,
    }
}

/// Write `contents` next to `path` and rename it into place.
pub fn write_atomically(path: &Path, contents: &str) -> Result<(), RunError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let err = |e: std::io::Error| RunError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// Run `cfg`, writing to `output` (or the config's own output path, or
/// stdout when neither is set). Diagnostics go to stderr.
pub fn run(cfg: &ExperimentConfig, output: Option<&Path>) -> Result<(), RunError> {
    let report = render(cfg)?;
    match output.or(cfg.output.as_deref()) {
        Some(path) => write_atomically(path, &report.csv)?,
        None => print!("{}", report.csv),
    }
    let mut numeric = Vec::new();
    for f in &report.failures {
        eprintln!("{f}");
        if !f.starts_with("warning:") {
            numeric.push(f.clone());
        }
    }
    if numeric.is_empty() {
        Ok(())
    } else {
        Err(RunError::Numeric(format!("{} cell(s) failed", numeric.len())))
    }
}
