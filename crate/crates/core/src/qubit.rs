//! Exact single-qubit primitives: Bloch vectors, 2x2 density matrices,
//! thermal exponentials of `(a_z/2) sz + (a_x/2) sx`, and the rotations
//! generated by `(xi/2) sz + (delta/2) sx`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// `(Tr rho sx, Tr rho sy, Tr rho sz)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn dot(self, o: BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: BlochVector) -> BlochVector {
        BlochVector {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochVector::new(a[0], a[1], a[2])
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for BlochVector {
    type Output = BlochVector;
    fn mul(self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        self * -1.0
    }
}

/// A 2x2 complex matrix in the `{|up>, |down>}` basis of `sz`.
///
/// Used both for density matrices and for their (traceless) derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    pub m: [[Complex64; 2]; 2],
}

impl QubitDensity {
    pub fn new(m: [[Complex64; 2]; 2]) -> Self {
        QubitDensity { m }
    }

    /// `(I + r.sigma) / 2`.
    pub fn from_bloch(r: BlochVector) -> Self {
        Self::affine(0.5, r * 0.5)
    }

    /// `(r.sigma) / 2`, the derivative of [`QubitDensity::from_bloch`] along `dr`.
    pub fn from_bloch_derivative(dr: BlochVector) -> Self {
        Self::affine(0.0, dr * 0.5)
    }

    fn affine(c: f64, v: BlochVector) -> Self {
        let i = Complex64::i();
        QubitDensity {
            m: [
                [Complex64::from(c + v.z), v.x - i * v.y],
                [v.x + i * v.y, Complex64::from(c - v.z)],
            ],
        }
    }

    pub fn bloch(&self) -> BlochVector {
        let m = &self.m;
        BlochVector::new(
            (m[0][1] + m[1][0]).re,
            (m[1][0] - m[0][1]).im,
            (m[0][0] - m[1][1]).re,
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.m;
        let off = (m[0][1] - m[1][0].conj()).norm();
        off.max(m[0][0].im.abs()).max(m[1][1].im.abs())
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        let (vals, _) = self.eigh();
        (self.trace() - 1.0).norm() <= tol && self.hermiticity_error() <= tol && vals[0] >= -tol
    }

    /// Closed-form eigen-decomposition of a Hermitian 2x2 matrix.
    ///
    /// Eigenvalues are returned ascending; column `k` of the second result
    /// is the normalized eigenvector of eigenvalue `k`.
    pub fn eigh(&self) -> ([f64; 2], [[Complex64; 2]; 2]) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = self.m[0][1];
        let mean = 0.5 * (a + d);
        let half = 0.5 * (a - d);
        let radius = half.hypot(b.norm());
        let vals = [mean - radius, mean + radius];
        let one = Complex64::from(1.0);
        let zero = Complex64::from(0.0);
        if b.norm() <= 1e-300 {
            // Already diagonal; order the standard basis by eigenvalue.
            return if a <= d {
                (vals, [[one, zero], [zero, one]])
            } else {
                (vals, [[zero, one], [one, zero]])
            };
        }
        // For eigenvalue lambda, (b, lambda - a) solves the first row; the
        // alternative (lambda - d, conj(b)) solves the second. Pick the
        // better conditioned one.
        let mut vecs = [[zero; 2]; 2];
        for (k, &lambda) in vals.iter().enumerate() {
            let v1 = [b, Complex64::from(lambda - a)];
            let v2 = [Complex64::from(lambda - d), b.conj()];
            let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
            let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
            let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
            vecs[0][k] = v[0] / n;
            vecs[1][k] = v[1] / n;
        }
        (vals, vecs)
    }
}

/// Trace weight and unnormalized Bloch vector of `exp(-beta H)` for
/// `H = (az/2) sz + (ax/2) sx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitExpWeights {
    /// `Tr exp(-beta H)`.
    pub j: f64,
    /// `Tr[exp(-beta H) sigma_k]`.
    pub b: BlochVector,
}

/// `sinh(beta eta) / eta`, continuous at `eta = 0`.
fn sinh_over(beta: f64, eta: f64) -> f64 {
    if eta == 0.0 {
        beta
    } else {
        (beta * eta).sinh() / eta
    }
}

/// `tanh(beta eta) / eta`, continuous at `eta = 0`.
fn tanh_over(beta: f64, eta: f64) -> f64 {
    if eta == 0.0 {
        beta
    } else {
        (beta * eta).tanh() / eta
    }
}

/// Half the level gap of `(az/2) sz + (ax/2) sx`.
pub fn half_gap(az: f64, ax: f64) -> f64 {
    0.5 * az.hypot(ax)
}

/// `exp(-beta H) = cosh(beta eta) I - (sinh(beta eta)/eta) H`, with `eta` half
/// the level gap of `H = (az/2) sz + (ax/2) sx`.
pub fn qubit_exp_weights(az: f64, ax: f64, beta: f64) -> QubitExpWeights {
    let eta = half_gap(az, ax);
    let s = sinh_over(beta, eta);
    QubitExpWeights {
        j: 2.0 * (beta * eta).cosh(),
        b: BlochVector::new(-s * ax, 0.0, -s * az),
    }
}

/// Log-domain form of [`QubitExpWeights`] that survives `beta * eta` beyond
/// the range of `cosh`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalQubit {
    /// `ln Tr exp(-beta H)`.
    pub log_j: f64,
    /// Bloch vector of the normalized state `exp(-beta H) / Tr exp(-beta H)`.
    pub bloch: BlochVector,
}

pub fn thermal_qubit(az: f64, ax: f64, beta: f64) -> ThermalQubit {
    let eta = half_gap(az, ax);
    let x = beta * eta;
    // ln(2 cosh x) = |x| + ln(1 + exp(-2|x|))
    let log_j = x.abs() + (-2.0 * x.abs()).exp().ln_1p();
    let s = 0.5 * tanh_over(beta, eta);
    ThermalQubit {
        log_j,
        bloch: BlochVector::new(-s * ax, 0.0, -s * az),
    }
}

/// `ln <+x| exp(-beta H) |+x>` for `H = (az/2) sz + (ax/2) sx`.
pub fn log_plus_x_overlap(az: f64, ax: f64, beta: f64) -> f64 {
    let eta = half_gap(az, ax);
    if eta == 0.0 {
        return 0.0;
    }
    // <+x|H|+x> = ax/2, so the overlap is cosh(x) - a sinh(x), a = ax/(2 eta)
    // = e^x/2 [(1 - a) + (1 + a) e^{-2x}].
    let x = beta * eta;
    let a = ax / (2.0 * eta);
    x - std::f64::consts::LN_2 + ((1.0 - a) + (1.0 + a) * (-2.0 * x).exp()).ln()
}

/// Rotation of the Bloch ball induced by `exp(-i t [(xi/2) sz + (delta/2) sx])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Axis `(delta, 0, xi) / (2 eta)`, angle `2 eta t`, right-handed.
    pub fn generated_by(xi: f64, delta: f64, t: f64) -> Rotation {
        let eta = half_gap(xi, delta);
        if eta == 0.0 {
            return Rotation::IDENTITY;
        }
        let (mx, mz) = (delta / (2.0 * eta), xi / (2.0 * eta));
        let (s, c) = (2.0 * eta * t).sin_cos();
        let v = 1.0 - c;
        Rotation {
            m: [
                [c + v * mx * mx, -s * mz, v * mx * mz],
                [s * mz, c, -s * mx],
                [v * mx * mz, s * mx, c + v * mz * mz],
            ],
        }
    }

    pub fn apply(&self, r: BlochVector) -> BlochVector {
        let m = &self.m;
        BlochVector::new(
            m[0][0] * r.x + m[0][1] * r.y + m[0][2] * r.z,
            m[1][0] * r.x + m[1][1] * r.y + m[1][2] * r.z,
            m[2][0] * r.x + m[2][1] * r.y + m[2][2] * r.z,
        )
    }

    pub fn column(&self, j: usize) -> BlochVector {
        BlochVector::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }
}

/// Rodrigues form `cos(phi) r + sin(phi) (m x r) + (1 - cos(phi)) (m.r) m`
/// for axis `m = (delta, 0, xi)/(2 eta)` and angle `phi = 2 eta t`.
pub fn rodrigues_rotate(xi: f64, delta: f64, t: f64, r0: BlochVector) -> BlochVector {
    let eta = half_gap(xi, delta);
    if eta == 0.0 {
        return r0;
    }
    let m = BlochVector::new(delta / (2.0 * eta), 0.0, xi / (2.0 * eta));
    let (s, c) = (2.0 * eta * t).sin_cos();
    r0 * c + m.cross(r0) * s + m * ((1.0 - c) * m.dot(r0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex64;
    type M2 = [[C; 2]; 2];

    fn mul(a: &M2, b: &M2) -> M2 {
        let mut out = [[C::from(0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    fn dagger(a: &M2) -> M2 {
        [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
    }

    /// Scaling-and-squaring with a 30-term Taylor core.
    fn expm(a: &M2) -> M2 {
        let norm = a.iter().flatten().map(|z| z.norm()).sum::<f64>();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let scale = 0.5f64.powi(squarings as i32);
        let a: M2 = [[a[0][0] * scale, a[0][1] * scale], [a[1][0] * scale, a[1][1] * scale]];
        let mut term: M2 = [[C::from(1.0), C::from(0.0)], [C::from(0.0), C::from(1.0)]];
        let mut sum = term;
        for k in 1..30 {
            term = mul(&term, &a);
            for row in term.iter_mut() {
                for z in row.iter_mut() {
                    *z /= k as f64;
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    sum[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            sum = mul(&sum, &sum);
        }
        sum
    }

    fn hamiltonian(az: f64, ax: f64) -> M2 {
        [[C::from(az / 2.0), C::from(ax / 2.0)], [C::from(ax / 2.0), C::from(-az / 2.0)]]
    }

    fn dense_weights(az: f64, ax: f64, beta: f64) -> (f64, BlochVector) {
        let h = hamiltonian(az, ax);
        let e = expm(&[[h[0][0] * -beta, h[0][1] * -beta], [h[1][0] * -beta, h[1][1] * -beta]]);
        let rho = QubitDensity::new(e);
        (rho.trace().re, rho.bloch())
    }

    fn dense_evolve(xi: f64, delta: f64, t: f64, r0: BlochVector) -> BlochVector {
        let h = hamiltonian(xi, delta);
        let mi = C::new(0.0, -t);
        let u = expm(&[[h[0][0] * mi, h[0][1] * mi], [h[1][0] * mi, h[1][1] * mi]]);
        let rho = QubitDensity::from_bloch(r0).m;
        QubitDensity::new(mul(&mul(&u, &rho), &dagger(&u))).bloch()
    }

    fn close(a: BlochVector, b: BlochVector, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn identity_hamiltonian_weights() {
        let w = qubit_exp_weights(0.0, 0.0, 1.0);
        assert_eq!(w.j, 2.0);
        assert_eq!(w.b, BlochVector::ZERO);
        let w = qubit_exp_weights(3.0, -1.0, 0.0);
        assert_eq!(w.j, 2.0);
        assert_eq!(w.b.norm(), 0.0);
    }

    #[test]
    fn weights_at_preparation_parameters() {
        let w = qubit_exp_weights(4.0, 1.0, 1.0);
        let eta = 17f64.sqrt() / 2.0;
        assert!((w.j - 2.0 * eta.cosh()).abs() < 1e-12);
        let s = eta.sinh() / eta;
        assert!(close(w.b, BlochVector::new(-s, 0.0, -4.0 * s), 1e-12));
        let (j, b) = dense_weights(4.0, 1.0, 1.0);
        assert!((w.j - j).abs() < 1e-12 * j);
        assert!(close(w.b, b, 1e-12 * j));
    }

    #[test]
    fn thermal_qubit_matches_linear_form() {
        for &(az, ax, beta) in &[(4.0, 1.0, 1.0), (0.0, 0.0, 2.0), (-3.0, 0.5, 0.3), (2.0, 1.0, 0.0)] {
            let w = qubit_exp_weights(az, ax, beta);
            let t = thermal_qubit(az, ax, beta);
            assert!((t.log_j - w.j.ln()).abs() < 1e-13);
            assert!(close(t.bloch, w.b * (1.0 / w.j), 1e-14));
        }
        // far beyond cosh overflow
        let t = thermal_qubit(4.0, 1.0, 1000.0);
        assert!(t.log_j.is_finite());
        assert!((t.bloch.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plus_x_overlap_matches_dense() {
        for &(az, ax, beta) in &[(4.0, 1.0, 1.0), (3.5, 1.0, 2.0), (1.0, -1.0, 0.7), (0.0, 0.0, 1.0)] {
            let h = hamiltonian(az, ax);
            let e = expm(&[[h[0][0] * -beta, h[0][1] * -beta], [h[1][0] * -beta, h[1][1] * -beta]]);
            let overlap = 0.5 * (e[0][0] + e[0][1] + e[1][0] + e[1][1]).re;
            assert!((log_plus_x_overlap(az, ax, beta) - overlap.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_identity_and_period() {
        let r0 = BlochVector::new(0.3, -0.2, 0.5);
        assert_eq!(rodrigues_rotate(2.0, 1.0, 0.0, r0), r0);
        let eta = half_gap(2.0, 1.0);
        let full = rodrigues_rotate(2.0, 1.0, std::f64::consts::PI / eta, r0);
        assert!(close(full, r0, 1e-12));
        assert_eq!(rodrigues_rotate(0.0, 0.0, 5.0, r0), r0);
    }

    #[test]
    fn rotation_x_column_matches_propagators() {
        let (xi, delta) = (2.0, 1.0);
        let eta = half_gap(xi, delta);
        for &t in &[0.01, 0.1, 0.37, 1.3] {
            let r = rodrigues_rotate(xi, delta, t, BlochVector::new(1.0, 0.0, 0.0));
            let xx = (delta * delta + xi * xi * (2.0 * eta * t).cos()) / (4.0 * eta * eta);
            let yx = xi / (2.0 * eta) * (2.0 * eta * t).sin();
            let zx = xi * delta / (2.0 * eta * eta) * (eta * t).sin().powi(2);
            assert!(close(r, BlochVector::new(xx, yx, zx), 1e-12));
            let dense = dense_evolve(xi, delta, t, BlochVector::new(1.0, 0.0, 0.0));
            assert!(close(r, dense, 1e-12));
        }
    }

    #[test]
    fn eigh_recovers_matrix() {
        let rho = QubitDensity::from_bloch(BlochVector::new(0.3, -0.4, 0.2));
        let (vals, vecs) = rho.eigh();
        assert!(vals[0] <= vals[1]);
        let r = 0.3f64.hypot(0.4).hypot(0.2);
        assert!((vals[1] - 0.5 * (1.0 + r)).abs() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                let rebuilt: C = (0..2).map(|k| vecs[i][k] * vals[k] * vecs[j][k].conj()).sum();
                assert!((rebuilt - rho.m[i][j]).norm() < 1e-14);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn weights_match_dense_exponential(az in -10.0..10.0f64, ax in -10.0..10.0f64, beta in 0.0..5.0f64) {
            let w = qubit_exp_weights(az, ax, beta);
            let (j, b) = dense_weights(az, ax, beta);
            prop_assert!((w.j - j).abs() <= 1e-12 * j);
            prop_assert!((w.b - b).norm() <= 1e-12 * j);
            prop_assert!(w.b.norm() <= w.j * (1.0 + 1e-12));
        }

        #[test]
        fn rotation_is_isometry_and_composes(
            xi in -5.0..5.0f64, delta in -3.0..3.0f64,
            t1 in 0.0..10.0f64, t2 in 0.0..10.0f64,
            x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64,
        ) {
            let r0 = BlochVector::new(x, y, z);
            let r1 = rodrigues_rotate(xi, delta, t1, r0);
            prop_assert!((r1.norm() - r0.norm()).abs() <= 1e-12);
            let r12 = rodrigues_rotate(xi, delta, t2, r1);
            let direct = rodrigues_rotate(xi, delta, t1 + t2, r0);
            prop_assert!((r12 - direct).norm() <= 1e-10);
            let m = Rotation::generated_by(xi, delta, t1);
            prop_assert!((m.apply(r0) - r1).norm() <= 1e-12);
        }

        #[test]
        fn rotation_matches_dense_unitary(
            xi in -5.0..5.0f64, delta in -3.0..3.0f64, t in 0.0..3.0f64,
            x in -0.5..0.5f64, y in -0.5..0.5f64, z in -0.5..0.5f64,
        ) {
            let r0 = BlochVector::new(x, y, z);
            prop_assert!((rodrigues_rotate(xi, delta, t, r0) - dense_evolve(xi, delta, t, r0)).norm() <= 1e-12);
        }
    }
}
