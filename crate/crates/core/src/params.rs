//! Model parameters and their validation.
//!
//! All quantities are dimensionless: energies are measured in units of the
//! post-preparation probe splitting, times in its inverse, with the reduced
//! Planck and Boltzmann constants set to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Topology of the nearest-neighbour bath bonds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Ring: bond `i` joins spins `i` and `i + 1 (mod N)`, giving `N` bonds.
    #[default]
    Periodic,
    /// Chain: `N - 1` bonds.
    Open,
}

/// A coupling that is either the same on every site/bond or given per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteValues {
    Uniform(f64),
    PerSite(Vec<f64>),
}

impl SiteValues {
    /// Common value when every entry is identical.
    pub fn as_uniform(&self) -> Option<f64> {
        match self {
            SiteValues::Uniform(v) => Some(*v),
            SiteValues::PerSite(vs) => {
                let first = *vs.first()?;
                vs.iter().all(|&v| v == first).then_some(first)
            }
        }
    }

    /// Broadcast to `len` entries. Lengths are checked by [`ModelParams::validate`].
    pub fn expand(&self, len: usize) -> Vec<f64> {
        match self {
            SiteValues::Uniform(v) => vec![*v; len],
            SiteValues::PerSite(vs) => vs.clone(),
        }
    }

    fn all_finite(&self) -> bool {
        match self {
            SiteValues::Uniform(v) => v.is_finite(),
            SiteValues::PerSite(vs) => vs.iter().all(|v| v.is_finite()),
        }
    }
}

impl From<f64> for SiteValues {
    fn from(v: f64) -> Self {
        SiteValues::Uniform(v)
    }
}

impl From<Vec<f64>> for SiteValues {
    fn from(vs: Vec<f64>) -> Self {
        SiteValues::PerSite(vs)
    }
}

/// Probe and bath parameters.
///
/// `eps0` is the probe splitting while the joint state equilibrates, `eps`
/// the splitting after the instantaneous switch at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Number of bath spins.
    pub n: usize,
    pub eps0: f64,
    pub eps: f64,
    /// Tunnelling amplitude of the probe.
    pub delta: f64,
    /// Bath level spacings, one per spin.
    pub omega: SiteValues,
    /// Nearest-neighbour Ising couplings, one per bond.
    pub chi: SiteValues,
    /// Probe-bath coupling.
    pub g: f64,
    pub temperature: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n: 50,
            eps0: 4.0,
            eps: 2.0,
            delta: 1.0,
            omega: SiteValues::Uniform(1.0),
            chi: SiteValues::Uniform(0.0),
            g: 0.01,
            temperature: 1.0,
            boundary: Boundary::Periodic,
        }
    }
}

impl ModelParams {
    pub fn validate(self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        let scalars = [
            ("eps0", self.eps0),
            ("eps", self.eps),
            ("delta", self.delta),
            ("g", self.g),
            ("temperature", self.temperature),
        ];
        if let Some((name, v)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} is not finite ({v})")));
        }
        if self.temperature <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if !self.omega.all_finite() {
            return Err(Error::InvalidParams("omega contains non-finite values".into()));
        }
        if !self.chi.all_finite() {
            return Err(Error::InvalidParams("chi contains non-finite values".into()));
        }
        if let SiteValues::PerSite(vs) = &self.omega {
            if vs.len() != self.n {
                return Err(Error::InvalidParams(format!(
                    "omega needs {} entries (one per spin), got {}",
                    self.n,
                    vs.len()
                )));
            }
        }
        if let SiteValues::PerSite(vs) = &self.chi {
            let bonds = self.bond_count();
            if vs.len() != bonds {
                return Err(Error::InvalidParams(format!(
                    "chi needs {bonds} entries for a {:?} bath of {} spins, got {}",
                    self.boundary,
                    self.n,
                    vs.len()
                )));
            }
        }
        Ok(self)
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    pub fn bond_count(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n,
            Boundary::Open => self.n - 1,
        }
    }

    /// Bond list as `(i, j)` spin indices, zero based.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        (0..self.bond_count()).map(|i| (i, (i + 1) % self.n)).collect()
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.omega.expand(self.n)
    }

    pub fn chis(&self) -> Vec<f64> {
        self.chi.expand(self.bond_count())
    }

    /// `(omega, chi)` when both are the same on every site and bond.
    pub fn uniform_bath(&self) -> Option<(f64, f64)> {
        let omega = self.omega.as_uniform()?;
        // An open single spin has no bonds at all.
        let chi = match (&self.chi, self.bond_count()) {
            (SiteValues::PerSite(v), 0) if v.is_empty() => 0.0,
            _ => self.chi.as_uniform()?,
        };
        Some((omega, chi))
    }

    /// One-line `# params = { ... }` comment carrying the full parameter set.
    pub fn header_line(&self) -> String {
        let value = toml::Value::try_from(self).expect("parameters serialize to TOML");
        format!("# params = {value}")
    }

    /// Inverse of [`ModelParams::header_line`].
    pub fn from_header_line(line: &str) -> Result<Self> {
        let body = line
            .trim()
            .strip_prefix('#')
            .map(str::trim)
            .ok_or_else(|| Error::Header("missing leading '#'".into()))?;
        #[derive(Deserialize)]
        struct Wrapper {
            params: ModelParams,
        }
        let w: Wrapper = toml::from_str(body).map_err(|e| Error::Header(e.to_string()))?;
        Ok(w.params)
    }
}
