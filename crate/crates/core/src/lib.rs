//! Exact reduced dynamics of a qubit probe coupled to an Ising spin bath,
//! and quantum Fisher information for estimating the bath temperature and
//! the probe-bath coupling.

pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod oracle;
pub mod params;
pub mod qfi;
pub mod qubit;
pub mod spectrum;
pub mod sum;

pub use error::{Error, Result};
pub use params::{Boundary, ModelParams, SiteValues};
pub use qubit::{BlochVector, QubitDensity, QubitExpWeights};
pub use spectrum::{Spectrum, SpectrumEntry};
pub use dynamics::{DynamicsPoint, PreparationMode, PreparedEnsemble};
pub use estimation::{OptimumRecord, SweepSpec, TimeWindow};
pub use qfi::{Estimator, QfiRecord, Route};
