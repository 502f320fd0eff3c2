//! Quantum Fisher information of the reduced probe state.
//!
//! Three routes are provided for a single qubit: the spectral formula on
//! the 2x2 density matrix, the equivalent Bloch-vector formula, and the
//! closed form in terms of decoherence rate, population and phase. The
//! derivative of the state with respect to the estimated parameter is taken
//! by central finite differences with one Richardson level, rebuilding the
//! spectrum and the prepared ensemble at every shifted parameter value.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{prepare_params, PreparationMode, PreparedEnsemble};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::qubit::{BlochVector, QubitDensity};

/// Parameter being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Temperature,
    Coupling,
}

impl Estimator {
    /// Short column label.
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Temperature => "T",
            Estimator::Coupling => "g",
        }
    }

    pub fn value(self, p: &ModelParams) -> f64 {
        match self {
            Estimator::Temperature => p.temperature,
            Estimator::Coupling => p.g,
        }
    }

    pub fn with_value(self, p: &ModelParams, x: f64) -> ModelParams {
        let mut q = p.clone();
        match self {
            Estimator::Temperature => q.temperature = x,
            Estimator::Coupling => q.g = x,
        }
        q
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Temperature => "temperature",
            Estimator::Coupling => "coupling",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "temperature" | "T" => Ok(Estimator::Temperature),
            "coupling" | "g" => Ok(Estimator::Coupling),
            other => Err(Error::UnknownEstimator(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Eigen,
    #[default]
    Bloch,
    ClosedForm,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Eigen => "eigen",
            Route::Bloch => "bloch",
            Route::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Values in `[-CLIP_TOL, 0)` are rounding noise and are clipped to zero.
pub const CLIP_TOL: f64 = 1e-9;
/// Relative change of F between steps `h` and `h/2` above which a record is flagged.
pub const RICHARDSON_TOL: f64 = 1e-4;

fn clip(f: f64) -> Result<f64> {
    if f.is_nan() {
        Ok(f)
    } else if f < -CLIP_TOL {
        Err(Error::NegativeFisher(f))
    } else {
        Ok(f.max(0.0))
    }
}

/// `|dr|^2 + (r.dr)^2 / (1 - |r|^2)`.
pub fn qfi_bloch(r: BlochVector, dr: BlochVector) -> Result<f64> {
    let mixedness = 1.0 - r.norm_sqr();
    let radial = r.dot(dr);
    if mixedness < 1e-12 {
        if radial.abs() < 1e-9 {
            return clip(dr.norm_sqr());
        }
        return Err(Error::PureStateRadialDerivative(radial));
    }
    clip(dr.norm_sqr() + radial * radial / mixedness)
}

/// Spectral formula `sum_n (rho_n')^2 / rho_n
/// + 2 sum_{n != m} (rho_n - rho_m)^2 / (rho_n + rho_m) |<v_m|v_n'>|^2`
/// with eigenvector derivatives from first-order perturbation theory.
pub fn qfi_eigen(rho: &QubitDensity, drho: &QubitDensity) -> Result<f64> {
    let (vals, vecs) = rho.eigh();
    let elem = |m: usize, n: usize| -> Complex64 {
        let mut acc = Complex64::from(0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += vecs[i][m].conj() * drho.m[i][j] * vecs[j][n];
            }
        }
        acc
    };

    let mut f = 0.0;
    for n in 0..2 {
        let d = elem(n, n).re;
        if vals[n] < 1e-14 {
            if d.abs() < 1e-12 {
                continue;
            }
            return Err(Error::UnboundedFisher { eigenvalue: vals[n], derivative: d });
        }
        f += d * d / vals[n];
    }
    for n in 0..2 {
        let m = 1 - n;
        let sum = vals[n] + vals[m];
        if sum <= 0.0 {
            continue;
        }
        let gap = vals[n] - vals[m];
        let coupling = elem(m, n);
        let weight = if gap.abs() < 1e-12 {
            coupling.norm_sqr() / sum
        } else {
            let overlap = coupling / gap;
            gap * gap / sum * overlap.norm_sqr()
        };
        f += 2.0 * weight;
    }
    clip(f)
}

/// Inputs of the closed form derived from `r` and `dr`:
/// `(Gamma, Gamma', nz, nz', phase')`.
pub fn closed_form_inputs(r: BlochVector, dr: BlochVector) -> (f64, f64, f64, f64, f64) {
    let c2 = r.x * r.x + r.y * r.y;
    let gamma = -0.5 * c2.ln();
    let dgamma = -(r.x * dr.x + r.y * dr.y) / c2;
    let dphase = (r.x * dr.y - r.y * dr.x) / c2;
    (gamma, dgamma, r.z, dr.z, dphase)
}

/// `(G' - nz nz' e^{2G})^2 / [f (e^{2G} - f)] + (nz' + nz G')^2 / f + phase'^2 e^{-2G}`
/// with `f = 1 + nz^2 e^{2G}`.
pub fn qfi_closed_form(gamma: f64, dgamma: f64, nz: f64, dnz: f64, dphase: f64) -> Result<f64> {
    let e2g = (2.0 * gamma).exp();
    let f = 1.0 + nz * nz * e2g;
    if !(e2g > f) || !e2g.is_finite() {
        return Err(Error::ClosedFormDomain { exp_two_gamma: e2g, f });
    }
    let a = dgamma - nz * dnz * e2g;
    let b = dnz + nz * dgamma;
    clip(a * a / (f * (e2g - f)) + b * b / f + dphase * dphase / e2g)
}

/// Evaluate one route on a Bloch vector and its derivative.
pub fn qfi_route(route: Route, r: BlochVector, dr: BlochVector) -> Result<f64> {
    match route {
        Route::Bloch => qfi_bloch(r, dr),
        Route::Eigen => qfi_eigen(&QubitDensity::from_bloch(r), &QubitDensity::from_bloch_derivative(dr)),
        Route::ClosedForm => {
            let (g, dg, nz, dnz, dp) = closed_form_inputs(r, dr);
            qfi_closed_form(g, dg, nz, dnz, dp)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOptions {
    /// Step relative to `max(|x|, floor)`.
    pub rel_step: f64,
    pub floor: f64,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        DerivativeOptions { rel_step: 1e-5, floor: 1e-3 }
    }
}

/// Smallest step accepted after shrinking at a domain boundary.
pub const MIN_STEP: f64 = 1e-12;

/// Ensembles at `x`, `x +- h` and `x +- h/2`, reused across many times.
#[derive(Debug, Clone)]
pub struct Sensitivity {
    pub which: Estimator,
    pub x: f64,
    pub step: f64,
    center: PreparedEnsemble,
    plus: [PreparedEnsemble; 2],
    minus: [PreparedEnsemble; 2],
}

/// State and derivative at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub r: BlochVector,
    /// Richardson-extrapolated derivative.
    pub dr: BlochVector,
    /// Plain central difference with step `h`.
    pub dr_coarse: BlochVector,
    /// Plain central difference with step `h/2`.
    pub dr_fine: BlochVector,
}

impl Sensitivity {
    pub fn new(p: &ModelParams, mode: PreparationMode, which: Estimator, opts: DerivativeOptions) -> Result<Self> {
        let p = p.clone().validate()?;
        let x = which.value(&p);
        let mut step = opts.rel_step * x.abs().max(opts.floor);
        if which == Estimator::Temperature {
            while x - step <= 0.0 {
                step /= 2.0;
                if step < MIN_STEP {
                    return Err(Error::StepUnderflow(MIN_STEP));
                }
            }
        }
        let at = |x: f64| prepare_params(&which.with_value(&p, x), mode);
        Ok(Sensitivity {
            which,
            x,
            step,
            center: at(x)?,
            plus: [at(x + step)?, at(x + 0.5 * step)?],
            minus: [at(x - step)?, at(x - 0.5 * step)?],
        })
    }

    pub fn mode(&self) -> PreparationMode {
        self.center.mode
    }

    pub fn params(&self) -> &ModelParams {
        &self.center.params
    }

    pub fn point(&self, t: f64) -> SensitivityPoint {
        let h = self.step;
        let coarse = (self.plus[0].bloch_at(t) - self.minus[0].bloch_at(t)) * (1.0 / (2.0 * h));
        let fine = (self.plus[1].bloch_at(t) - self.minus[1].bloch_at(t)) * (1.0 / h);
        SensitivityPoint {
            r: self.center.bloch_at(t),
            dr: (fine * 4.0 - coarse) * (1.0 / 3.0),
            dr_coarse: coarse,
            dr_fine: fine,
        }
    }

    pub fn record(&self, t: f64, route: Route) -> Result<QfiRecord> {
        let pt = self.point(t);
        let f = qfi_route(route, pt.r, pt.dr)?;
        let coarse = qfi_bloch(pt.r, pt.dr_coarse)?;
        let fine = qfi_bloch(pt.r, pt.dr_fine)?;
        let scale = coarse.abs().max(fine.abs());
        let richardson_ok = scale == 0.0 || (coarse - fine).abs() <= RICHARDSON_TOL * scale;
        Ok(QfiRecord {
            t,
            estimator: self.which,
            x: self.x,
            f,
            mode: self.mode(),
            route,
            deriv_step: self.step,
            richardson_ok,
        })
    }
}

/// `dr/dx` at time `t`.
pub fn bloch_derivative(
    p: &ModelParams,
    mode: PreparationMode,
    t: f64,
    which: Estimator,
    opts: DerivativeOptions,
) -> Result<BlochVector> {
    Ok(Sensitivity::new(p, mode, which, opts)?.point(t).dr)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiRecord {
    pub t: f64,
    pub estimator: Estimator,
    pub x: f64,
    pub f: f64,
    pub mode: PreparationMode,
    pub route: Route,
    /// Finite-difference step `h`.
    pub deriv_step: f64,
    /// False when halving the step moved F by more than [`RICHARDSON_TOL`].
    pub richardson_ok: bool,
}

/// QFI at one time along the default (Bloch) route.
pub fn qfi_at(p: &ModelParams, mode: PreparationMode, t: f64, which: Estimator) -> Result<QfiRecord> {
    Sensitivity::new(p, mode, which, DerivativeOptions::default())?.record(t, Route::Bloch)
}

/// QFI over a time grid, sharing the shifted ensembles.
pub fn qfi_trace(
    p: &ModelParams,
    mode: PreparationMode,
    which: Estimator,
    times: &[f64],
    route: Route,
) -> Result<Vec<QfiRecord>> {
    let s = Sensitivity::new(p, mode, which, DerivativeOptions::default())?;
    times.iter().map(|&t| s.record(t, route)).collect()
}

/// Columns `t, x_name, x_value, F, mode, route, deriv_step` after a parameter-echo line.
pub fn write_qfi_csv<W: Write>(mut out: W, params: &ModelParams, records: &[QfiRecord]) -> io::Result<()> {
    writeln!(out, "{}", params.header_line())?;
    writeln!(out, "t,x_name,x_value,F,mode,route,deriv_step")?;
    for r in records {
        writeln!(
            out,
            "{:.16e},{},{:.16e},{:.16e},{},{},{:.16e}",
            r.t,
            r.estimator.name(),
            r.x,
            r.f,
            r.mode,
            r.route,
            r.deriv_step
        )?;
    }
    Ok(())
}
