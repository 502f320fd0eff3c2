//! Brute-force simulation of the full probe+bath Hilbert space.
//!
//! Nothing here uses the class structure of the model: Hamiltonians are
//! assembled from Kronecker products of Pauli matrices, thermal states and
//! propagators come from dense symmetric eigen-decompositions, and the
//! probe state is obtained by an explicit partial trace. It exists to
//! arbitrate the class-sum pipeline and is limited to small baths.
//!
//! Basis order is probe (most significant) then bath spins `1..N`, with
//! index bit `0` meaning spin up.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::dynamics::PreparationMode;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::qfi::{qfi_eigen, Estimator};
use crate::qubit::QubitDensity;

pub const MAX_ORACLE_SPINS: usize = 8;

/// Imaginary parts above this are reported instead of being discarded.
const REALNESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Probe splitting `eps0`, while equilibrating.
    Before,
    /// Probe splitting `eps`, for `t >= 0`.
    After,
}

/// Dense operator on the `2^(N+1)`-dimensional joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub n: usize,
    pub mat: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn real_part(&self) -> Result<DMatrix<f64>> {
        real_part(&self.mat)
    }

    fn from_real(n: usize, m: &DMatrix<f64>) -> Self {
        DenseOperator { n, mat: m.map(Complex64::from) }
    }

    /// Probe marginal `Tr_B rho`.
    pub fn partial_trace_bath(&self) -> QubitDensity {
        let half = self.dim() / 2;
        let mut m = [[Complex64::from(0.0); 2]; 2];
        for (a, row) in m.iter_mut().enumerate() {
            for (b, z) in row.iter_mut().enumerate() {
                *z = (0..half).map(|j| self.mat[(a * half + j, b * half + j)]).sum();
            }
        }
        QubitDensity::new(m)
    }
}

fn real_part(m: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    let worst = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > REALNESS_TOL {
        return Err(Error::Oracle(format!("operator has imaginary part {worst:e}")));
    }
    Ok(m.map(|z| z.re))
}

fn c(re: f64) -> Complex64 {
    Complex64::from(re)
}

fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

fn pauli_y() -> DMatrix<Complex64> {
    let i = Complex64::i();
    DMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)])
}

fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

fn identity(dim: usize) -> DMatrix<Complex64> {
    DMatrix::identity(dim, dim)
}

/// `op` acting on `site` of a register of `sites` qubits.
fn embed(op: &DMatrix<Complex64>, site: usize, sites: usize) -> DMatrix<Complex64> {
    let left = identity(1 << site);
    let right = identity(1 << (sites - site - 1));
    left.kronecker(op).kronecker(&right)
}

fn check_size(p: &ModelParams) -> Result<()> {
    if p.n > MAX_ORACLE_SPINS {
        return Err(Error::TooManySpins { what: "dense oracle", n: p.n, max: MAX_ORACLE_SPINS });
    }
    Ok(())
}

/// `(eps_phase/2) sz + (delta/2) sx` on the probe alone.
fn probe_hamiltonian(p: &ModelParams, phase: Phase) -> DMatrix<Complex64> {
    let eps = match phase {
        Phase::Before => p.eps0,
        Phase::After => p.eps,
    };
    pauli_z() * c(eps / 2.0) + pauli_x() * c(p.delta / 2.0)
}

/// `sum_i (omega_i/2) sz_i + sum_bonds chi_b sz_i sz_j` on the bath alone.
fn bath_hamiltonian(p: &ModelParams) -> DMatrix<Complex64> {
    let n = p.n;
    let dim = 1 << n;
    let z: Vec<_> = (0..n).map(|i| embed(&pauli_z(), i, n)).collect();
    let mut h = DMatrix::zeros(dim, dim);
    for (i, w) in p.omegas().into_iter().enumerate() {
        h += &z[i] * c(w / 2.0);
    }
    for ((i, j), chi) in p.bonds().into_iter().zip(p.chis()) {
        h += &z[i] * &z[j] * c(chi);
    }
    h
}

/// `H_probe(phase) x I + I x H_B + (1/2) sz x g sum_i sz_i`.
pub fn build_total_hamiltonian(p: &ModelParams, phase: Phase) -> Result<DenseOperator> {
    check_size(p)?;
    let n = p.n;
    let bath_dim = 1 << n;
    let mut collective = DMatrix::zeros(bath_dim, bath_dim);
    for i in 0..n {
        collective += embed(&pauli_z(), i, n);
    }
    let mat = probe_hamiltonian(p, phase).kronecker(&identity(bath_dim))
        + identity(2).kronecker(&bath_hamiltonian(p))
        + pauli_z().kronecker(&collective) * c(p.g / 2.0);
    Ok(DenseOperator { n, mat })
}

/// `exp(-beta H) / Tr exp(-beta H)` for a real symmetric `H`.
fn gibbs(h: &DMatrix<f64>, beta: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(h.clone());
    let e0 = eig.eigenvalues.min();
    let w: DVector<f64> = eig.eigenvalues.map(|e| (-beta * (e - e0)).exp());
    let z = w.sum();
    let mut scaled = eig.eigenvectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= w[j] / z;
    }
    &scaled * eig.eigenvectors.transpose()
}

/// `exp(i pi/4 sy)`.
fn pulse() -> DMatrix<Complex64> {
    let (s, co) = std::f64::consts::FRAC_PI_4.sin_cos();
    identity(2) * c(co) + pauli_y() * Complex64::new(0.0, s)
}

/// `|+x><+x|`.
fn plus_x_projector() -> DMatrix<Complex64> {
    DMatrix::from_element(2, 2, c(0.5))
}

/// Joint state right after preparation.
pub fn prepare_total_state(p: &ModelParams, mode: PreparationMode) -> Result<DenseOperator> {
    check_size(p)?;
    let beta = p.beta();
    let bath_dim = 1 << p.n;
    let rho = if mode.is_correlated() {
        let h = build_total_hamiltonian(p, Phase::Before)?.real_part()?;
        let rho = gibbs(&h, beta);
        let op = if mode.is_pulse() { pulse() } else { plus_x_projector() };
        let full = real_part(&op.kronecker(&identity(bath_dim)))?;
        let mut out = &full * rho * full.transpose();
        if !mode.is_pulse() {
            let tr = out.trace();
            if tr < 1e-300 {
                return Err(Error::ProjectionUnderflow(tr));
            }
            out /= tr;
        }
        out
    } else {
        let probe = if mode.is_pulse() {
            let th = gibbs(&real_part(&probe_hamiltonian(p, Phase::Before))?, beta);
            let r = real_part(&pulse())?;
            &r * th * r.transpose()
        } else {
            real_part(&plus_x_projector())?
        };
        let bath = gibbs(&real_part(&bath_hamiltonian(p))?, beta);
        probe.kronecker(&bath)
    };
    Ok(DenseOperator::from_real(p.n, &rho))
}

/// Exact propagation under the post-switch Hamiltonian.
#[derive(Debug, Clone)]
pub struct OracleEvolver {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl OracleEvolver {
    pub fn new(p: &ModelParams) -> Result<Self> {
        let h = build_total_hamiltonian(p, Phase::After)?;
        if h.hermiticity_error() > REALNESS_TOL {
            return Err(Error::Oracle("Hamiltonian is not Hermitian".into()));
        }
        let eig = SymmetricEigen::new(h.real_part()?);
        Ok(OracleEvolver { energies: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    /// Precompute what the probe marginal of `U(t) rho0 U(t)^dagger` needs.
    pub fn bind(&self, rho0: &DenseOperator) -> Result<BoundEvolution> {
        let rho = rho0.real_part()?;
        let v = &self.vectors;
        let rho_eig = v.transpose() * rho * v;
        let half = v.nrows() / 2;
        let rows = |a: usize| v.rows(a * half, half).into_owned();
        let (v0, v1) = (rows(0), rows(1));
        // Tr[rho(t) (|b><a| x I)] = sum_kl rho_kl e^{-i(E_k - E_l)t} (V_a^T V_b)_kl
        let weights = |va: &DMatrix<f64>, vb: &DMatrix<f64>| rho_eig.component_mul(&(va.transpose() * vb));
        Ok(BoundEvolution {
            energies: self.energies.clone(),
            w00: weights(&v0, &v0),
            w11: weights(&v1, &v1),
            w10: weights(&v1, &v0),
        })
    }

    /// Full joint state at `t`; for small systems and invariant checks.
    pub fn full_state(&self, rho0: &DenseOperator, t: f64) -> Result<DenseOperator> {
        let v = self.vectors.map(Complex64::from);
        let phases = self.energies.map(|e| Complex64::from_polar(1.0, -e * t));
        let u = &v * DMatrix::from_diagonal(&phases) * v.adjoint();
        Ok(DenseOperator { n: rho0.n, mat: &u * &rho0.mat * u.adjoint() })
    }
}

/// Reduced dynamics of one initial state.
#[derive(Debug, Clone)]
pub struct BoundEvolution {
    energies: DVector<f64>,
    w00: DMatrix<f64>,
    w11: DMatrix<f64>,
    w10: DMatrix<f64>,
}

impl BoundEvolution {
    pub fn reduced(&self, t: f64) -> QubitDensity {
        let cos = self.energies.map(|e| (e * t).cos());
        let sin = self.energies.map(|e| (e * t).sin());
        // p^T W conj(p) with p_k = cos_k - i sin_k
        let entry = |w: &DMatrix<f64>| {
            let qc = w * &cos;
            let qs = w * &sin;
            let re = cos.dot(&qc) + sin.dot(&qs);
            let im = cos.dot(&qs) - sin.dot(&qc);
            Complex64::new(re, im)
        };
        let r10 = entry(&self.w10);
        QubitDensity::new([[entry(&self.w00), r10.conj()], [r10, entry(&self.w11)]])
    }
}

/// `Tr_B[U(t) rho0 U(t)^dagger]`.
pub fn oracle_reduced_state(rho0: &DenseOperator, p: &ModelParams, t: f64) -> Result<QubitDensity> {
    Ok(OracleEvolver::new(p)?.bind(rho0)?.reduced(t))
}

/// Probe state at each time for one parameter set and preparation.
pub fn oracle_trajectory(p: &ModelParams, mode: PreparationMode, times: &[f64]) -> Result<Vec<QubitDensity>> {
    let rho0 = prepare_total_state(p, mode)?;
    let bound = OracleEvolver::new(p)?.bind(&rho0)?;
    Ok(times.iter().map(|&t| bound.reduced(t)).collect())
}

const FD8: [(f64, f64); 4] = [
    (1.0, 4.0 / 5.0),
    (2.0, -1.0 / 5.0),
    (3.0, 4.0 / 105.0),
    (4.0, -1.0 / 280.0),
];

/// Step used by [`oracle_qfi`].
pub fn oracle_step(x: f64) -> f64 {
    2e-4 * x.abs().max(1e-2)
}

/// QFI from an eighth-order central difference of oracle probe states.
pub fn oracle_qfi(p: &ModelParams, mode: PreparationMode, t: f64, which: Estimator) -> Result<f64> {
    let x = which.value(p);
    let mut h = oracle_step(x);
    if which == Estimator::Temperature {
        while x - 4.0 * h <= 0.0 {
            h /= 2.0;
        }
    }
    let state = |x: f64| -> Result<QubitDensity> {
        let q = which.with_value(p, x).validate()?;
        oracle_trajectory(&q, mode, &[t]).map(|v| v[0])
    };
    let rho = state(x)?;
    let mut d = [[Complex64::from(0.0); 2]; 2];
    for &(k, coef) in &FD8 {
        let plus = state(x + k * h)?;
        let minus = state(x - k * h)?;
        for i in 0..2 {
            for j in 0..2 {
                d[i][j] += (plus.m[i][j] - minus.m[i][j]) * (coef / h);
            }
        }
    }
    qfi_eigen(&rho, &QubitDensity::new(d))
}

/// Largest admissible Bloch-vector deviation in [`oracle_check`].
pub const DYNAMICS_TOL: f64 = 1e-9;
/// Largest admissible relative QFI deviation in [`oracle_check`].
pub const QFI_TOL: f64 = 1e-6;

/// Worst disagreement between the class-sum pipeline and the oracle for one
/// bath size and preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheckRow {
    pub n: usize,
    pub mode: PreparationMode,
    /// Largest `|r - r_oracle|` over the time grid.
    pub max_bloch_dev: f64,
    /// Largest relative QFI deviation, both estimators, at the middle and last grid time.
    pub max_qfi_rel_err: f64,
}

impl OracleCheckRow {
    pub fn passed(&self) -> bool {
        self.max_bloch_dev <= DYNAMICS_TOL && self.max_qfi_rel_err <= QFI_TOL
    }
}

/// Compare against the oracle for every bath size in `ns` and every mode.
pub fn oracle_check(p: &ModelParams, ns: &[usize], times: &[f64]) -> Result<Vec<OracleCheckRow>> {
    if times.is_empty() {
        return Err(Error::InvalidParams("oracle check needs at least one time".into()));
    }
    let qfi_times = [times[times.len() / 2], times[times.len() - 1]];
    let mut rows = Vec::new();
    for &n in ns {
        let q = ModelParams { n, ..p.clone() }.validate()?;
        let evolver = OracleEvolver::new(&q)?;
        for mode in PreparationMode::ALL {
            let bound = evolver.bind(&prepare_total_state(&q, mode)?)?;
            let ens = crate::dynamics::prepare_params(&q, mode)?;
            let max_bloch_dev = times
                .iter()
                .map(|&t| (ens.bloch_at(t) - bound.reduced(t).bloch()).norm())
                .fold(0.0, f64::max);
            let mut max_qfi_rel_err = 0.0f64;
            for which in [Estimator::Temperature, Estimator::Coupling] {
                for &t in &qfi_times {
                    let a = crate::qfi::qfi_at(&q, mode, t, which)?.f;
                    let b = oracle_qfi(&q, mode, t, which)?;
                    let scale = a.abs().max(b.abs());
                    if scale > 0.0 {
                        max_qfi_rel_err = max_qfi_rel_err.max((a - b).abs() / scale);
                    }
                }
            }
            rows.push(OracleCheckRow { n, mode, max_bloch_dev, max_qfi_rel_err });
        }
    }
    Ok(rows)
}

/// Columns `n, mode, max_bloch_dev, max_qfi_rel_err, pass` after a parameter-echo line.
pub fn write_oracle_check_csv<W: std::io::Write>(mut out: W, params: &ModelParams, rows: &[OracleCheckRow]) -> std::io::Result<()> {
    writeln!(out, "{}", params.header_line())?;
    writeln!(out, "n,mode,max_bloch_dev,max_qfi_rel_err,pass")?;
    for r in rows {
        writeln!(out, "{},{},{:.16e},{:.16e},{}", r.n, r.mode, r.max_bloch_dev, r.max_qfi_rel_err, r.passed())?;
    }
    Ok(())
}
