//! Optimizing the QFI over interaction time and sweeping the estimated
//! parameter across preparation modes.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::PreparationMode;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::qfi::{DerivativeOptions, Estimator, Route, Sensitivity};

/// Coarse grid plus golden-section refinement on `[t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
}

fn default_grid_points() -> usize {
    2001
}

fn default_refine_tol() -> f64 {
    1e-6
}

impl TimeWindow {
    pub fn new(t_min: f64, t_max: f64) -> Self {
        TimeWindow { t_min, t_max, grid_points: default_grid_points(), refine_tol: default_refine_tol() }
    }

    pub fn with_grid_points(self, grid_points: usize) -> Self {
        TimeWindow { grid_points, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min >= 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(Error::InvalidWindow(format!("need 0 <= t_min < t_max, got [{}, {}]", self.t_min, self.t_max)));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidWindow(format!("need at least 2 grid points, got {}", self.grid_points)));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidWindow(format!("refine_tol must be positive, got {}", self.refine_tol)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_points - 1;
        (0..=n)
            .map(|i| self.t_min + (self.t_max - self.t_min) * i as f64 / n as f64)
            .collect()
    }
}

impl Default for TimeWindow {
    fn default() -> Self {
        TimeWindow::new(0.0, 20.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOptimum {
    pub t_star: f64,
    pub f_star: f64,
    /// Coarse argmax at the last grid point.
    pub boundary_flag: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximize `f` on the window: scan the grid, then refine around the best
/// grid point by golden-section search. Non-finite samples are skipped.
pub fn maximize_over_time<F>(f: F, window: &TimeWindow) -> Result<TimeOptimum>
where
    F: Fn(f64) -> Result<f64>,
{
    window.validate()?;
    let grid = window.grid();
    let mut best: Option<(usize, f64)> = None;
    for (i, &t) in grid.iter().enumerate() {
        let v = f(t)?;
        if v.is_finite() && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (i, f_grid) = best.ok_or(Error::NoFiniteValue)?;
    let boundary_flag = i == grid.len() - 1;

    let mut lo = grid[i.saturating_sub(1)];
    let mut hi = grid[(i + 1).min(grid.len() - 1)];
    let (mut t_star, mut f_star) = (grid[i], f_grid);
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    while hi - lo > window.refine_tol {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b)?;
        }
    }
    for (t, v) in [(a, fa), (b, fb)] {
        if v.is_finite() && v > f_star {
            t_star = t;
            f_star = v;
        }
    }
    Ok(TimeOptimum { t_star, f_star, boundary_flag })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumRecord {
    pub variable: Estimator,
    pub x_value: f64,
    pub mode: PreparationMode,
    pub t_star: f64,
    pub f_star: f64,
    pub boundary_flag: bool,
}

/// Maximize the QFI of `which` (at its value in `p`) over interaction time.
pub fn optimize_time(p: &ModelParams, mode: PreparationMode, which: Estimator, window: &TimeWindow) -> Result<OptimumRecord> {
    let s = Sensitivity::new(p, mode, which, DerivativeOptions::default())?;
    let opt = maximize_over_time(|t| s.record(t, Route::Bloch).map(|r| r.f), window)?;
    Ok(OptimumRecord {
        variable: which,
        x_value: s.x,
        mode,
        t_star: opt.t_star,
        f_star: opt.f_star,
        boundary_flag: opt.boundary_flag,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: Estimator,
    pub values: Vec<f64>,
    pub window: TimeWindow,
    pub modes: Vec<PreparationMode>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        if self.values.is_empty() {
            return Err(Error::InvalidParams("sweep needs at least one value".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidParams("sweep needs at least one preparation mode".into()));
        }
        if self.variable == Estimator::Temperature && self.values.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidParams("temperatures must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub x_value: f64,
    pub mode: PreparationMode,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutcome {
    /// Successful cells in input order (value-major, then mode).
    pub records: Vec<OptimumRecord>,
    pub failures: Vec<CellFailure>,
}

/// One [`optimize_time`] per `(value, mode)` cell; cells run in parallel
/// and failing cells are collected without stopping the sweep.
pub fn sweep_parameter(spec: &SweepSpec, p: &ModelParams) -> Result<SweepOutcome> {
    spec.validate()?;
    let cells: Vec<(f64, PreparationMode)> = spec
        .values
        .iter()
        .flat_map(|&x| spec.modes.iter().map(move |&m| (x, m)))
        .collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(x, mode)| {
            let q = spec.variable.with_value(p, x);
            optimize_time(&q, mode, spec.variable, &spec.window).map_err(|error| CellFailure { x_value: x, mode, error })
        })
        .collect();
    let mut out = SweepOutcome::default();
    for r in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(f) => out.failures.push(f),
        }
    }
    Ok(out)
}

/// Optimized QFI of every preparation mode at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationComparison {
    pub variable: Estimator,
    pub x_value: f64,
    /// In [`PreparationMode::ALL`] order.
    pub rows: Vec<OptimumRecord>,
    /// `F_pulse / F_proj` with initial correlations.
    pub ratio_correlated: f64,
    /// `F_pulse / F_proj` without initial correlations.
    pub ratio_uncorrelated: f64,
}

impl PreparationComparison {
    pub fn get(&self, mode: PreparationMode) -> &OptimumRecord {
        self.rows.iter().find(|r| r.mode == mode).expect("all modes present")
    }
}

pub fn compare_preparations(p: &ModelParams, which: Estimator, x_value: f64, window: &TimeWindow) -> Result<PreparationComparison> {
    let spec = SweepSpec { variable: which, values: vec![x_value], window: *window, modes: PreparationMode::ALL.to_vec() };
    let outcome = sweep_parameter(&spec, p)?;
    if let Some(f) = outcome.failures.into_iter().next() {
        return Err(f.error);
    }
    let rows = outcome.records;
    let f = |m: PreparationMode| rows.iter().find(|r| r.mode == m).map(|r| r.f_star).unwrap_or(f64::NAN);
    Ok(PreparationComparison {
        variable: which,
        x_value,
        ratio_correlated: f(PreparationMode::PulseCorrelated) / f(PreparationMode::ProjectiveCorrelated),
        ratio_uncorrelated: f(PreparationMode::PulseUncorrelated) / f(PreparationMode::ProjectiveUncorrelated),
        rows,
    })
}

/// Columns `variable, x_value, mode, t_star, F_star, boundary_flag` after a parameter-echo line.
pub fn write_sweep_csv<W: Write>(mut out: W, params: &ModelParams, records: &[OptimumRecord]) -> io::Result<()> {
    writeln!(out, "{}", params.header_line())?;
    writeln!(out, "variable,x_value,mode,t_star,F_star,boundary_flag")?;
    for r in records {
        writeln!(
            out,
            "{},{:.16e},{},{:.16e},{:.16e},{}",
            r.variable.name(),
            r.x_value,
            r.mode,
            r.t_star,
            r.f_star,
            r.boundary_flag
        )?;
    }
    Ok(())
}

/// Sweep columns plus the two pulse/projective ratios, repeated on every row.
pub fn write_comparison_csv<W: Write>(mut out: W, params: &ModelParams, c: &PreparationComparison) -> io::Result<()> {
    writeln!(out, "{}", params.header_line())?;
    writeln!(out, "variable,x_value,mode,t_star,F_star,boundary_flag,ratio_correlated,ratio_uncorrelated")?;
    for r in &c.rows {
        writeln!(
            out,
            "{},{:.16e},{},{:.16e},{:.16e},{},{:.16e},{:.16e}",
            r.variable.name(),
            r.x_value,
            r.mode,
            r.t_star,
            r.f_star,
            r.boundary_flag,
            c.ratio_correlated,
            c.ratio_uncorrelated
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_analytic_peak() {
        // d/dt [sin^2 t e^{-t/5}] = 0  =>  tan t = 10
        let f = |t: f64| Ok(t.sin().powi(2) * (-t / 5.0).exp());
        let window = TimeWindow::new(0.0, 3.0).with_grid_points(31);
        let opt = maximize_over_time(f, &window).unwrap();
        let exact = 10f64.atan();
        assert!((opt.t_star - exact).abs() < 1e-5);
        assert!(!opt.boundary_flag);
        // never below the best grid value
        let grid_best = window.grid().into_iter().map(|t| f(t).unwrap()).fold(f64::MIN, f64::max);
        assert!(opt.f_star >= grid_best);
    }

    #[test]
    fn identically_zero_objective() {
        let opt = maximize_over_time(|_| Ok(0.0), &TimeWindow::new(0.5, 2.0).with_grid_points(11)).unwrap();
        assert_eq!(opt.f_star, 0.0);
        assert_eq!(opt.t_star, 0.5);
    }

    #[test]
    fn nan_everywhere_is_an_error() {
        let r = maximize_over_time(|_| Ok(f64::NAN), &TimeWindow::new(0.0, 1.0).with_grid_points(5));
        assert_eq!(r, Err(Error::NoFiniteValue));
    }

    #[test]
    fn increasing_objective_sets_boundary_flag() {
        let opt = maximize_over_time(|t| Ok(t), &TimeWindow::new(0.0, 4.0).with_grid_points(9)).unwrap();
        assert!(opt.boundary_flag);
        assert!((opt.t_star - 4.0).abs() < 1e-5);
    }

    #[test]
    fn bad_windows_rejected() {
        assert!(TimeWindow::new(2.0, 1.0).validate().is_err());
        assert!(TimeWindow::new(-1.0, 1.0).validate().is_err());
        assert!(TimeWindow::new(0.0, 1.0).with_grid_points(1).validate().is_err());
    }

    #[test]
    fn decoupled_projective_temperature_is_zero() {
        // g = 0: the probe never sees the bath, so nothing depends on T
        let p = ModelParams { n: 6, g: 0.0, delta: 0.0, ..Default::default() };
        let r = optimize_time(&p, PreparationMode::ProjectiveUncorrelated, Estimator::Temperature, &TimeWindow::new(0.0, 5.0).with_grid_points(51)).unwrap();
        assert!(r.f_star.abs() < 1e-15);
    }

    #[test]
    fn single_cell_sweep_matches_optimize_time() {
        let p = ModelParams { n: 10, g: 0.3, ..Default::default() };
        let window = TimeWindow::new(0.0, 5.0).with_grid_points(201);
        let spec = SweepSpec { variable: Estimator::Temperature, values: vec![0.8], window, modes: vec![PreparationMode::PulseCorrelated] };
        let out = sweep_parameter(&spec, &p).unwrap();
        assert!(out.failures.is_empty());
        let direct = optimize_time(&Estimator::Temperature.with_value(&p, 0.8), PreparationMode::PulseCorrelated, Estimator::Temperature, &window).unwrap();
        assert_eq!(out.records, vec![direct]);
    }

    #[test]
    fn failing_cells_are_reported() {
        let p = ModelParams { n: 4, ..Default::default() };
        let spec = SweepSpec {
            variable: Estimator::Coupling,
            values: vec![0.1, f64::NAN, 0.2],
            window: TimeWindow::new(0.0, 2.0).with_grid_points(21),
            modes: vec![PreparationMode::PulseUncorrelated],
        };
        let out = sweep_parameter(&spec, &p).unwrap();
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.failures.len(), 1);
        assert!(out.failures[0].x_value.is_nan());
        assert_eq!(out.records[0].x_value, 0.1);
        assert_eq!(out.records[1].x_value, 0.2);
    }

    #[test]
    fn sweep_spec_validation() {
        let base = SweepSpec { variable: Estimator::Temperature, values: vec![1.0], window: TimeWindow::default(), modes: vec![] };
        assert!(base.validate().is_err());
        let neg = SweepSpec { values: vec![-1.0], modes: vec![PreparationMode::PulseCorrelated], ..base };
        assert!(neg.validate().is_err());
    }

    #[test]
    fn sweep_csv_layout() {
        let p = ModelParams::default();
        let rec = OptimumRecord {
            variable: Estimator::Coupling,
            x_value: 0.5,
            mode: PreparationMode::ProjectiveCorrelated,
            t_star: 10.0,
            f_star: 3.25,
            boundary_flag: true,
        };
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &p, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[1], "variable,x_value,mode,t_star,F_star,boundary_flag");
        assert!(lines[2].starts_with("g,5.0000000000000000e-1,ProjectiveCorrelated,"));
        assert!(lines[2].ends_with(",true"));
    }
}
