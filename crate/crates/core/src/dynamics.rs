//! Prepared probe+bath ensembles and the exact reduced probe dynamics.
//!
//! The joint state after preparation is block diagonal in the bath
//! configurations, so the reduced probe state is a Boltzmann-weighted
//! mixture over spectrum classes of per-class qubit states, each rotated by
//! its own shifted Hamiltonian `(xi_n/2) sz + (delta/2) sx` with
//! `xi_n = G_n + eps`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::qubit::{half_gap, log_plus_x_overlap, thermal_qubit, BlochVector, QubitDensity, Rotation};
use crate::spectrum::Spectrum;
use crate::sum::{log_shift, CompensatedSum};

/// How the probe state is prepared at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PreparationMode {
    /// Pulse `exp(i pi/4 sy)` applied to the joint Gibbs state.
    PulseCorrelated,
    /// Same pulse applied to the product of probe and bath Gibbs states.
    PulseUncorrelated,
    /// Selective measurement of the joint Gibbs state onto `|+x>`.
    ProjectiveCorrelated,
    /// `|+x><+x|` times the bath Gibbs state.
    ProjectiveUncorrelated,
}

impl PreparationMode {
    pub const ALL: [PreparationMode; 4] = [
        PreparationMode::PulseCorrelated,
        PreparationMode::PulseUncorrelated,
        PreparationMode::ProjectiveCorrelated,
        PreparationMode::ProjectiveUncorrelated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PreparationMode::PulseCorrelated => "PulseCorrelated",
            PreparationMode::PulseUncorrelated => "PulseUncorrelated",
            PreparationMode::ProjectiveCorrelated => "ProjectiveCorrelated",
            PreparationMode::ProjectiveUncorrelated => "ProjectiveUncorrelated",
        }
    }

    pub fn is_pulse(self) -> bool {
        matches!(self, PreparationMode::PulseCorrelated | PreparationMode::PulseUncorrelated)
    }

    pub fn is_correlated(self) -> bool {
        matches!(self, PreparationMode::PulseCorrelated | PreparationMode::ProjectiveCorrelated)
    }

    /// Same preparation with the opposite correlation setting.
    pub fn toggled_correlation(self) -> PreparationMode {
        match self {
            PreparationMode::PulseCorrelated => PreparationMode::PulseUncorrelated,
            PreparationMode::PulseUncorrelated => PreparationMode::PulseCorrelated,
            PreparationMode::ProjectiveCorrelated => PreparationMode::ProjectiveUncorrelated,
            PreparationMode::ProjectiveUncorrelated => PreparationMode::ProjectiveCorrelated,
        }
    }
}

impl fmt::Display for PreparationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PreparationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PreparationMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMode(s.to_string()))
    }
}

/// Which per-class trace factor normalizes the correlated pulse ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationFactor {
    /// `2 cosh(beta eta0_n)` from the pre-switch class Hamiltonian, which
    /// keeps the class weights consistent with the joint partition function.
    #[default]
    PreSwitch,
    /// `2 cosh(beta eta_n)` from the post-switch class Hamiltonian.
    PostSwitch,
}

/// One spectrum class of a prepared ensemble.
///
/// The class contributes `exp(log_weight) * J * rho_n` to the unnormalized
/// reduced state, where `rho_n` has Bloch vector `bloch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleEntry {
    /// `ln(multiplicity * c_n)`.
    pub log_weight: f64,
    /// `ln J` of the class trace weight.
    pub log_j: f64,
    /// Normalized Bloch vector of the class state, `b0 / J`.
    pub bloch: BlochVector,
    /// Evolution energy `G_n + eps`.
    pub xi: f64,
}

impl EnsembleEntry {
    pub fn j(&self) -> f64 {
        self.log_j.exp()
    }

    /// Unnormalized Bloch triple `b0 = J * bloch`.
    pub fn b0(&self) -> BlochVector {
        self.bloch * self.j()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedEnsemble {
    pub mode: PreparationMode,
    pub params: ModelParams,
    pub entries: Vec<EnsembleEntry>,
}

/// Build the prepared ensemble with the default correlation factor.
pub fn prepare(p: &ModelParams, spectrum: &Spectrum, mode: PreparationMode) -> Result<PreparedEnsemble> {
    prepare_with(p, spectrum, mode, CorrelationFactor::default())
}

pub fn prepare_with(
    p: &ModelParams,
    spectrum: &Spectrum,
    mode: PreparationMode,
    factor: CorrelationFactor,
) -> Result<PreparedEnsemble> {
    if spectrum.n != p.n {
        return Err(Error::InvalidParams(format!(
            "spectrum built for N = {} used with N = {}",
            spectrum.n, p.n
        )));
    }
    let beta = p.beta();
    let delta = p.delta;
    // Pulsing maps the Bloch vector (x, y, z) to (-z, y, x).
    let pulsed = |b: BlochVector| BlochVector::new(-b.z, b.y, b.x);
    let uncorrelated_probe = thermal_qubit(p.eps0, delta, beta);

    let mut entries = Vec::with_capacity(spectrum.entries.len());
    for e in &spectrum.entries {
        let log_weight = e.log_mult + e.log_boltzmann(beta);
        let xi = e.coupling + p.eps;
        let eps0_n = e.coupling + p.eps0;
        let (log_j, bloch) = match mode {
            PreparationMode::PulseCorrelated => {
                let th = thermal_qubit(eps0_n, delta, beta);
                let log_j = match factor {
                    CorrelationFactor::PreSwitch => th.log_j,
                    CorrelationFactor::PostSwitch => thermal_qubit(xi, delta, beta).log_j,
                };
                (log_j, pulsed(th.bloch))
            }
            PreparationMode::PulseUncorrelated => (uncorrelated_probe.log_j, pulsed(uncorrelated_probe.bloch)),
            PreparationMode::ProjectiveCorrelated => {
                let log_p = log_plus_x_overlap(eps0_n, delta, beta);
                if !log_p.is_finite() || log_p < -690.0 {
                    return Err(Error::ProjectionUnderflow(log_p.exp()));
                }
                (log_p, BlochVector::new(1.0, 0.0, 0.0))
            }
            PreparationMode::ProjectiveUncorrelated => (0.0, BlochVector::new(1.0, 0.0, 0.0)),
        };
        entries.push(EnsembleEntry { log_weight, log_j, bloch, xi });
    }
    Ok(PreparedEnsemble { mode, params: p.clone(), entries })
}

/// Validate, build the spectrum and prepare in one call.
pub fn prepare_params(p: &ModelParams, mode: PreparationMode) -> Result<PreparedEnsemble> {
    let p = p.clone().validate()?;
    let spectrum = Spectrum::for_params(&p)?;
    prepare(&p, &spectrum, mode)
}

/// Reduced probe state at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsPoint {
    pub t: f64,
    pub r: BlochVector,
    /// `-ln(nx^2 + ny^2) / 2`; `+inf` when the coherence underflows.
    pub gamma: f64,
    /// `atan2(ny, nx)`.
    pub phase: f64,
    pub nz: f64,
}

impl DynamicsPoint {
    pub fn from_bloch(t: f64, r: BlochVector) -> Self {
        let coherence = r.x * r.x + r.y * r.y;
        let gamma = if coherence < 1e-300 { f64::INFINITY } else { -0.5 * coherence.ln() };
        DynamicsPoint { t, r, gamma, phase: r.y.atan2(r.x), nz: r.z }
    }

    pub fn coherence_underflow(&self) -> bool {
        self.gamma.is_infinite()
    }

    pub fn density(&self) -> QubitDensity {
        QubitDensity::from_bloch(self.r)
    }
}

impl PreparedEnsemble {
    /// Class weights `exp(log_weight + log_j - shift)` sharing one shift.
    fn shifted_weights(&self) -> Vec<f64> {
        let shift = log_shift(self.entries.iter().map(|e| e.log_weight + e.log_j));
        self.entries.iter().map(|e| (e.log_weight + e.log_j - shift).exp()).collect()
    }

    /// Aggregate Bloch vector at `t`.
    pub fn bloch_at(&self, t: f64) -> BlochVector {
        let weights = self.shifted_weights();
        let delta = self.params.delta;
        let (mut x, mut y, mut z, mut norm) =
            (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
        for (e, &w) in self.entries.iter().zip(&weights) {
            let r = Rotation::generated_by(e.xi, delta, t).apply(e.bloch);
            x.add(w * r.x);
            y.add(w * r.y);
            z.add(w * r.z);
            norm.add(w);
        }
        let n = norm.value();
        BlochVector::new(x.value() / n, y.value() / n, z.value() / n)
    }

    pub fn reduced_bloch(&self, t: f64) -> DynamicsPoint {
        DynamicsPoint::from_bloch(t, self.bloch_at(t))
    }

    pub fn trajectory(&self, times: &[f64]) -> Vec<DynamicsPoint> {
        times.iter().map(|&t| self.reduced_bloch(t)).collect()
    }

    /// Per-class rotations at `t` together with the normalized class
    /// weights in the correlated (`J`-weighted) and uncorrelated sense.
    pub fn class_propagators(&self, t: f64) -> Vec<(f64, f64, Rotation)> {
        let jw = self.shifted_weights();
        let jsum: CompensatedSum = jw.iter().copied().collect();
        let shift = log_shift(self.entries.iter().map(|e| e.log_weight));
        let uw: Vec<f64> = self.entries.iter().map(|e| (e.log_weight - shift).exp()).collect();
        let usum: CompensatedSum = uw.iter().copied().collect();
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                (
                    uw[i] / usum.value(),
                    jw[i] / jsum.value(),
                    Rotation::generated_by(e.xi, self.params.delta, t),
                )
            })
            .collect()
    }
}

/// Reduced Bloch vector and derived quantities of `e` at `t`.
pub fn reduced_bloch(e: &PreparedEnsemble, t: f64) -> DynamicsPoint {
    e.reduced_bloch(t)
}

/// Class-averaged rotation matrices, `Theta[i][j]` mapping initial component
/// `j` to component `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagators {
    /// Weights `c_n m_n / Z_B`.
    pub uncorrelated: [[f64; 3]; 3],
    /// Weights `J_n c_n m_n / Z`.
    pub correlated: [[f64; 3]; 3],
}

/// Class-averaged propagators of the pulse ensembles.
///
/// With `corrected = false` the `xx` entry uses `eta_n^2` in place of
/// `xi_n^2` in front of the cosine, which does not reduce to one at `t = 0`.
pub fn averaged_propagators(
    p: &ModelParams,
    spectrum: &Spectrum,
    t: f64,
    corrected: bool,
    factor: CorrelationFactor,
) -> Result<Propagators> {
    let ens = prepare_with(p, spectrum, PreparationMode::PulseCorrelated, factor)?;
    let mut unc = [[CompensatedSum::new(); 3]; 3];
    let mut cor = [[CompensatedSum::new(); 3]; 3];
    for ((uw, jw, rot), entry) in ens.class_propagators(t).into_iter().zip(&ens.entries) {
        let mut m = rot.m;
        if !corrected {
            let eta = half_gap(entry.xi, p.delta);
            if eta > 0.0 {
                m[0][0] = (p.delta * p.delta + eta * eta * (2.0 * eta * t).cos()) / (4.0 * eta * eta);
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                unc[i][j].add(uw * m[i][j]);
                cor[i][j].add(jw * m[i][j]);
            }
        }
    }
    let finish = |s: [[CompensatedSum; 3]; 3]| {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = s[i][j].value();
            }
        }
        out
    };
    Ok(Propagators { uncorrelated: finish(unc), correlated: finish(cor) })
}

/// Columns `t, nx, ny, nz, Gamma, phase, mode` after a parameter-echo line.
pub fn write_trajectory_csv<W: Write>(
    mut out: W,
    params: &ModelParams,
    mode: PreparationMode,
    points: &[DynamicsPoint],
) -> io::Result<()> {
    writeln!(out, "{}", params.header_line())?;
    writeln!(out, "t,nx,ny,nz,Gamma,phase,mode")?;
    for p in points {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            p.t, p.r.x, p.r.y, p.r.z, p.gamma, p.phase, mode
        )?;
    }
    Ok(())
}
