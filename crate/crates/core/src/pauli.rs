//! Exact 2×2 complex algebra over the Pauli basis.
//!
//! Everything here is closed form: a traceless Hermitian `r·σ` has eigenvalues
//! `±|r|` and `exp(-i r·σ dt) = cos(|r| dt) I - i sin(|r| dt) r̂·σ`, so no
//! iterative linear algebra is needed anywhere in the crate.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Relative threshold below which `f = |r|` counts as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Default frequency scale (rad/s) the degeneracy threshold is measured against.
pub const DEFAULT_FREQUENCY_SCALE: f64 = 1.0;

/// Coefficients of `x σx + y σy + z σz`, in rad/s.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PauliVector {
    pub const ZERO: PauliVector = PauliVector { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        PauliVector { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        PauliVector::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// `f = sqrt(x² + y² + z²)`.
    pub fn magnitude(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, other: PauliVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: PauliVector) -> PauliVector {
        PauliVector::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn component(self, axis: usize) -> f64 {
        self.to_array()[axis]
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Whether `f` is below [`DEGENERACY_THRESHOLD`] relative to `scale`.
    pub fn is_degenerate(self, scale: f64) -> bool {
        self.magnitude() < DEGENERACY_THRESHOLD * scale
    }
}

impl Add for PauliVector {
    type Output = PauliVector;
    fn add(self, o: PauliVector) -> PauliVector {
        PauliVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for PauliVector {
    type Output = PauliVector;
    fn sub(self, o: PauliVector) -> PauliVector {
        PauliVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for PauliVector {
    type Output = PauliVector;
    fn neg(self) -> PauliVector {
        PauliVector::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for PauliVector {
    type Output = PauliVector;
    fn mul(self, s: f64) -> PauliVector {
        PauliVector::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Dense 2×2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2(pub [[C64; 2]; 2]);

impl Matrix2 {
    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Matrix2([[m00, m01], [m10, m11]])
    }

    pub const fn zero() -> Self {
        Matrix2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Matrix2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn sigma_x() -> Self {
        Matrix2::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn sigma_y() -> Self {
        Matrix2::new(ZERO, C64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn sigma_z() -> Self {
        Matrix2::new(ONE, ZERO, ZERO, C64::new(-1.0, 0.0))
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn scale(&self, s: C64) -> Matrix2 {
        let m = &self.0;
        Matrix2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn dagger(&self) -> Matrix2 {
        let m = &self.0;
        Matrix2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn determinant(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix2) -> f64 {
        let d = *self - *other;
        d.0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        // largest eigenvalue of M†M = [[p, q], [q*, r]]
        let m = &self.0;
        let p = m[0][0].norm_sqr() + m[1][0].norm_sqr();
        let r = m[0][1].norm_sqr() + m[1][1].norm_sqr();
        let q = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        (0.5 * (p + r) + (0.5 * (p - r)).hypot(q.norm())).sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn apply(&self, s: &QubitState) -> QubitState {
        let m = &self.0;
        QubitState { c0: m[0][0] * s.c0 + m[0][1] * s.c1, c1: m[1][0] * s.c0 + m[1][1] * s.c1 }
    }

    /// Pauli coefficients of the traceless Hermitian part, `tr(M σ_k)/2`.
    pub fn pauli_coefficients(&self) -> PauliVector {
        let m = &self.0;
        PauliVector::new(0.5 * (m[0][1] + m[1][0]).re, 0.5 * (m[1][0] - m[0][1]).im, 0.5 * (m[0][0] - m[1][1]).re)
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, o: Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &o.0);
        Matrix2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, o: Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &o.0);
        Matrix2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &o.0);
        Matrix2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// A Hermitian 2×2 matrix (Hamiltonians, number operators).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hermitian2(Matrix2);

impl Hermitian2 {
    /// `s0·I + r·σ`.
    pub fn from_pauli(s0: f64, r: PauliVector) -> Self {
        Hermitian2(Matrix2::new(
            C64::new(s0 + r.z, 0.0),
            C64::new(r.x, -r.y),
            C64::new(r.x, r.y),
            C64::new(s0 - r.z, 0.0),
        ))
    }

    /// Wraps `m` if it is Hermitian to within `1e-14` entrywise.
    pub fn try_from_matrix(m: Matrix2) -> Option<Self> {
        m.is_hermitian(1e-14 * m.max_abs().max(1.0)).then_some(Hermitian2(m))
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.0
    }

    pub fn scale(&self, s: f64) -> Hermitian2 {
        Hermitian2(self.0.scale(C64::new(s, 0.0)))
    }
}

impl std::ops::Deref for Hermitian2 {
    type Target = Matrix2;
    fn deref(&self) -> &Matrix2 {
        &self.0
    }
}

/// A unitary 2×2 matrix (single propagator steps and their products).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(Matrix2);

impl Unitary2 {
    pub fn identity() -> Self {
        Unitary2(Matrix2::identity())
    }

    /// Hadamard gate `(1/√2)[[1, 1], [1, -1]]`.
    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Unitary2(Matrix2::new(h, h, h, -h))
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.0
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &Unitary2) -> Unitary2 {
        Unitary2(self.0 * other.0)
    }

    pub fn apply(&self, s: &QubitState) -> QubitState {
        self.0.apply(s)
    }

    /// Largest entrywise deviation of `U U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        (self.0 * self.0.dagger()).max_abs_diff(&Matrix2::identity())
    }
}

impl std::ops::Deref for Unitary2 {
    type Target = Matrix2;
    fn deref(&self) -> &Matrix2 {
        &self.0
    }
}

/// Amplitudes `c0 |0⟩ + c1 |1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    pub c0: C64,
    pub c1: C64,
}

impl QubitState {
    /// `|0⟩`, the computational ground state.
    pub const fn ground() -> Self {
        QubitState { c0: ONE, c1: ZERO }
    }

    pub const fn excited() -> Self {
        QubitState { c0: ZERO, c1: ONE }
    }

    /// Normalizes `(c0, c1)`; `None` for the zero vector.
    pub fn new(c0: C64, c1: C64) -> Option<Self> {
        let n = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        (n > 0.0 && n.is_finite()).then(|| QubitState { c0: c0 / n, c1: c1 / n })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitState) -> C64 {
        self.c0.conj() * other.c0 + self.c1.conj() * other.c1
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &QubitState) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// `x σx + y σy + z σz`.
pub fn pauli_compose(r: PauliVector) -> Hermitian2 {
    Hermitian2::from_pauli(0.0, r)
}

/// `AB - BA`.
pub fn commutator(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    *a * *b - *b * *a
}

/// Spectrum of `r·σ`: `λ± = ±f` with unit eigenvectors.
///
/// Eigenvectors are phase-fixed so that their first nonzero component is real
/// and positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigensystem {
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub v_minus: QubitState,
    pub v_plus: QubitState,
}

pub fn eigensystem(r: PauliVector) -> Result<Eigensystem> {
    eigensystem_with_scale(r, DEFAULT_FREQUENCY_SCALE)
}

pub fn eigensystem_with_scale(r: PauliVector, scale: f64) -> Result<Eigensystem> {
    let f = r.magnitude();
    if r.is_degenerate(scale) {
        return Err(Error::DegenerateSpectrum { time: f64::NAN, magnitude: f });
    }
    Ok(Eigensystem { lambda_minus: -f, lambda_plus: f, v_minus: eigenvector(r, -f), v_plus: eigenvector(r, f) })
}

fn eigenvector(r: PauliVector, lambda: f64) -> QubitState {
    // (H - λ)v = 0 has the two (parallel) solutions (x - iy, λ - z) and
    // (λ + z, x + iy); take whichever avoids cancellation.
    let off = C64::new(r.x, r.y);
    let raw = if (lambda + r.z).abs() >= (lambda - r.z).abs() {
        (C64::new(lambda + r.z, 0.0), off)
    } else {
        (off.conj(), C64::new(lambda - r.z, 0.0))
    };
    let v = QubitState::new(raw.0, raw.1).expect("eigenvector of non-degenerate r·σ is nonzero");
    fix_phase(v)
}

fn fix_phase(v: QubitState) -> QubitState {
    let lead = if v.c0.norm() > 1e-15 { v.c0 } else { v.c1 };
    let phase = lead.conj() / lead.norm();
    QubitState { c0: v.c0 * phase, c1: v.c1 * phase }
}

/// One sample-and-hold propagator `exp(-i (r·σ) dt)`.
pub fn expm_step(r: PauliVector, dt: f64) -> Unitary2 {
    let f = r.magnitude();
    let theta = f * dt;
    // sin(f dt)/f written as dt·sinc so a vanishing r needs no division.
    let sinc = if theta == 0.0 { 1.0 } else { theta.sin() / theta };
    let c = C64::new(theta.cos(), 0.0);
    let s = C64::new(0.0, -dt * sinc);
    Unitary2(Matrix2::identity().scale(c) + pauli_compose(r).matrix().scale(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Taylor series with scaling and squaring; independent of the closed form.
    fn expm_series(a: &Matrix2) -> Matrix2 {
        let norm = a.max_abs().max(1e-300);
        let squarings = (norm.log2().ceil() as i32 + 4).max(0);
        let scaled = a.scale(c(0.5f64.powi(squarings), 0.0));
        let mut term = Matrix2::identity();
        let mut sum = Matrix2::identity();
        for k in 1..30 {
            term = (term * scaled).scale(c(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn compose_single_components() {
        assert_eq!(*pauli_compose(PauliVector::new(0.0, 0.0, 1.0)).matrix(), Matrix2::sigma_z());
        assert_eq!(*pauli_compose(PauliVector::new(1.0, 0.0, 0.0)).matrix(), Matrix2::sigma_x());
        assert_eq!(*pauli_compose(PauliVector::new(0.0, 1.0, 0.0)).matrix(), Matrix2::sigma_y());
        let h = pauli_compose(PauliVector::new(3.0, 0.0, 4.0));
        assert_eq!(*h.matrix(), Matrix2::new(c(4.0, 0.0), c(3.0, 0.0), c(3.0, 0.0), c(-4.0, 0.0)));
    }

    #[test]
    fn pauli_commutators() {
        let (x, y, z) = (Matrix2::sigma_x(), Matrix2::sigma_y(), Matrix2::sigma_z());
        assert_eq!(commutator(&x, &y), z.scale(c(0.0, 2.0)));
        assert_eq!(commutator(&y, &z), x.scale(c(0.0, 2.0)));
        assert_eq!(commutator(&z, &x), y.scale(c(0.0, 2.0)));
        assert_eq!(commutator(&z, &z), Matrix2::zero());
    }

    #[test]
    fn levi_civita_table() {
        let s = [Matrix2::sigma_x(), Matrix2::sigma_y(), Matrix2::sigma_z()];
        for j in 0..3 {
            for k in 0..3 {
                let mut expected = Matrix2::zero();
                for (l, sl) in s.iter().enumerate() {
                    let eps = match (j, k, l) {
                        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                        _ => 0.0,
                    };
                    expected = expected + sl.scale(c(0.0, 2.0 * eps));
                }
                assert_eq!(commutator(&s[j], &s[k]), expected, "[σ{j}, σ{k}]");
            }
        }
    }

    #[test]
    fn eigensystem_of_minus_sigma_z() {
        let e = eigensystem(PauliVector::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(e.lambda_minus, -1.0);
        assert_eq!(e.lambda_plus, 1.0);
        assert_eq!(e.v_minus, QubitState::ground());
        assert_eq!(e.v_plus, QubitState::excited());
    }

    #[test]
    fn eigensystem_three_four_five() {
        let e = eigensystem(PauliVector::new(3.0, 0.0, 4.0)).unwrap();
        assert!((e.lambda_minus + 5.0).abs() < 1e-15);
        assert!((e.lambda_plus - 5.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_ground_state_overlap_matches_dense_solver() {
        let r = PauliVector::new(-267.77e6, 0.0, -100e6);
        let e = eigensystem(r).unwrap();
        let p0 = e.v_minus.c0.norm_sqr();

        // closed form p0 = b²/(b² + (f - a)²) with a = -z, b = -x
        let (a, b, f) = (100e6_f64, 267.77e6_f64, r.magnitude());
        let closed = b * b / (b * b + (f - a).powi(2));
        assert!((p0 - closed).abs() < 1e-12);

        // dense symmetric eigensolver (y = 0 so H is real)
        let h = nalgebra::Matrix2::new(r.z, r.x, r.x, -r.z);
        let eig = nalgebra::SymmetricEigen::new(h);
        let imin = if eig.eigenvalues[0] < eig.eigenvalues[1] { 0 } else { 1 };
        let dense_p0 = eig.eigenvectors[(0, imin)].powi(2);
        assert!((p0 - dense_p0).abs() < 1e-12);
        assert!((p0 - 0.6749).abs() < 5e-5, "p0 = {p0}");
    }

    #[test]
    fn degenerate_spectrum_rejected() {
        assert!(matches!(eigensystem(PauliVector::ZERO), Err(Error::DegenerateSpectrum { .. })));
        assert!(eigensystem_with_scale(PauliVector::new(1e-3, 0.0, 0.0), 1e10).is_err());
    }

    #[test]
    fn eigenvector_phase_convention() {
        let e = eigensystem(PauliVector::new(0.3, -0.7, 0.2)).unwrap();
        for v in [e.v_minus, e.v_plus] {
            assert!(v.c0.im.abs() < 1e-15 && v.c0.re > 0.0);
        }
        let e = eigensystem(PauliVector::new(0.0, 0.0, 2.0)).unwrap();
        assert_eq!(e.v_minus, QubitState::excited());
    }

    #[test]
    fn zero_hamiltonian_step_is_identity() {
        assert_eq!(*expm_step(PauliVector::ZERO, 0.37).matrix(), Matrix2::identity());
    }

    #[test]
    fn quarter_period_sigma_x_flip() {
        let dt = 0.22222222222222221e-9;
        let u = expm_step(PauliVector::new(PI / (2.0 * dt), 0.0, 0.0), dt);
        assert!(u.max_abs_diff(&Matrix2::sigma_x().scale(c(0.0, -1.0))) < 1e-15);
        let s = u.apply(&QubitState::ground());
        assert!(s.c0.norm_sqr() < 1e-30);
    }

    #[test]
    fn step_matches_series_oracle() {
        let r = PauliVector::new(3.0, 0.0, 4.0);
        let dt = 0.1;
        let generator = pauli_compose(r).scale(-dt);
        let oracle = expm_series(&generator.matrix().scale(c(0.0, 1.0)));
        assert!(expm_step(r, dt).max_abs_diff(&oracle) < 1e-12);

        let r = PauliVector::new(-1.3, 2.1, 0.4);
        let oracle = expm_series(&pauli_compose(r).scale(-0.7).matrix().scale(c(0.0, 1.0)));
        assert!(expm_step(r, 0.7).max_abs_diff(&oracle) < 1e-12);
    }

    #[test]
    fn spectral_norm_of_pauli_combination() {
        let m = pauli_compose(PauliVector::new(3.0, 0.0, 4.0));
        assert!((m.spectral_norm() - 5.0).abs() < 1e-14);
        let m = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!((m.spectral_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_guard() {
        assert!(Hermitian2::try_from_matrix(Matrix2::sigma_y()).is_some());
        assert!(Hermitian2::try_from_matrix(Matrix2::sigma_y().scale(c(0.0, 1.0))).is_none());
    }
}
