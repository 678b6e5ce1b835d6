//! Number-operator-based inverse engineering for a general two-level system.
//!
//! For `H(t) = r(t)·σ` the number operator is `N = H/f` with eigenvalues ±1.
//! A driving Hamiltonian `H_N = h(t)·σ` keeps `N` invariant when
//!
//! ```text
//! ∂N/∂t - i[N, H_N] = 0,
//! ```
//!
//! which in components reads `(f ṙ - ḟ r)/f = 2 h × r`. Two closed-form
//! families solve it: the *mutually dependent* one (the counter-diabatic
//! Hamiltonian `H + (r × ṙ)/(2f²)·σ`) and the *mutually independent* one, which
//! removes one Pauli component entirely.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pauli::{commutator, pauli_compose, Hermitian2, Matrix2, PauliVector, QubitState};
use crate::protocol::{ControlProtocol, VectorFn};

/// Relative size of `|r_axis|/f` below which the independent solution's
/// divisor counts as zero.
pub const SINGULAR_DIVISOR_THRESHOLD: f64 = 1e-9;

/// Default verification tolerance, relative to `f(t)`.
pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Instants probed when validating a protocol over `[0, τ]`.
pub const SCAN_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionFamily {
    MutuallyDependent,
    MutuallyIndependent,
    /// Any other candidate, e.g. a gauge-shifted or hand-written one.
    Custom,
}

/// A driving Hamiltonian `H_N(t) = a σx + b σy + c σz` tied to its source protocol.
#[derive(Clone)]
pub struct NobieSolution {
    coefficients: VectorFn,
    family: SolutionFamily,
    eliminated_axis: Option<Axis>,
    source: ControlProtocol,
}

impl fmt::Debug for NobieSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NobieSolution")
            .field("family", &self.family)
            .field("eliminated_axis", &self.eliminated_axis)
            .field("source", &self.source)
            .finish_non_exhaustive()
    }
}

impl NobieSolution {
    /// A candidate `H_N` given directly by its coefficients.
    pub fn custom<F>(source: &ControlProtocol, coefficients: F) -> Self
    where
        F: Fn(f64) -> PauliVector + Send + Sync + 'static,
    {
        NobieSolution {
            coefficients: Arc::new(coefficients),
            family: SolutionFamily::Custom,
            eliminated_axis: None,
            source: source.clone(),
        }
    }

    /// `(a, b, c)` at time `t`.
    pub fn at(&self, t: f64) -> PauliVector {
        (self.coefficients)(t)
    }

    pub fn hamiltonian(&self, t: f64) -> Hermitian2 {
        pauli_compose(self.at(t))
    }

    pub fn family(&self) -> SolutionFamily {
        self.family
    }

    pub fn eliminated_axis(&self) -> Option<Axis> {
        self.eliminated_axis
    }

    pub fn source(&self) -> &ControlProtocol {
        &self.source
    }

    /// `H_N + s·H`: the invariance condition is blind to multiples of `H`.
    pub fn gauge_shifted(&self, s: f64) -> NobieSolution {
        let inner = Arc::clone(&self.coefficients);
        let source = self.source.clone();
        NobieSolution::custom(&self.source, move |t| inner(t) + source.at(t) * s)
    }
}

fn nondegenerate(r: PauliVector, t: f64) -> Result<f64> {
    let f = r.magnitude();
    if f > 0.0 && f.is_finite() {
        Ok(f)
    } else {
        Err(Error::DegenerateSpectrum { time: t, magnitude: f })
    }
}

/// `N = (r·σ)/f`.
pub fn number_operator(r: PauliVector) -> Result<Hermitian2> {
    let f = nondegenerate(r, f64::NAN)?;
    Ok(pauli_compose(r * (1.0 / f)))
}

/// `∂N/∂t = ((f ṙ - ḟ r)/f²)·σ`, by the quotient rule.
pub fn number_operator_rate(r: PauliVector, r_dot: PauliVector) -> Result<Hermitian2> {
    let f = nondegenerate(r, f64::NAN)?;
    let f_dot = r.dot(r_dot) / f;
    Ok(pauli_compose((r_dot * f - r * f_dot) * (1.0 / (f * f))))
}

/// `⟨ψ|N|ψ⟩ = p₊ - p₋`, where `p±` are the occupations `|⟨λ±|ψ⟩|²` of the
/// instantaneous eigenstates. It is constant exactly when the occupations are.
pub fn number_expectation(state: &QubitState, r: PauliVector) -> Result<f64> {
    let n = number_operator(r)?;
    Ok(state.inner(&n.apply(state)).re)
}

/// Spectral norm of `∂N/∂t - i[N, H_N]` at `t`.
pub fn invariance_residual(p: &ControlProtocol, sol: &NobieSolution, t: f64) -> Result<f64> {
    let r = p.at(t);
    nondegenerate(r, t)?;
    let dn = number_operator_rate(r, p.rate(t))?;
    let n = number_operator(r)?;
    let comm = commutator(&n, &sol.hamiltonian(t));
    let residual: Matrix2 = *dn.matrix() - comm.scale(C64::new(0.0, 1.0));
    Ok(residual.spectral_norm())
}

/// Left-minus-right residuals of the three component conditions
/// `(f ṙ_k - ḟ r_k)/f = 2 (h × r)_k`.
pub fn main_conditions_residual(p: &ControlProtocol, sol: &NobieSolution, t: f64) -> Result<[f64; 3]> {
    let r = p.at(t);
    let f = nondegenerate(r, t)?;
    let r_dot = p.rate(t);
    let f_dot = r.dot(r_dot) / f;
    let h = sol.at(t);
    Ok([
        (f * r_dot.x - f_dot * r.x) / f - 2.0 * (r.z * h.y - r.y * h.z),
        (f * r_dot.y - f_dot * r.y) / f - 2.0 * (r.x * h.z - r.z * h.x),
        (f * r_dot.z - f_dot * r.z) / f - 2.0 * (r.y * h.x - r.x * h.y),
    ])
}

/// `a(f ẋ - ḟ x) + b(f ẏ - ḟ y) + c(f ż - ḟ z)`, zero for every solution of the
/// main conditions.
pub fn general_condition(p: &ControlProtocol, sol: &NobieSolution, t: f64) -> Result<f64> {
    let r = p.at(t);
    let f = nondegenerate(r, t)?;
    let r_dot = p.rate(t);
    let f_dot = r.dot(r_dot) / f;
    Ok(sol.at(t).dot(r_dot * f - r * f_dot))
}

fn check_nondegenerate(p: &ControlProtocol) -> Result<()> {
    for t in p.scan_times(SCAN_POINTS) {
        let r = p.at(t);
        if !r.is_finite() {
            return Err(Error::NonFiniteControl(t));
        }
        nondegenerate(r, t)?;
    }
    Ok(())
}

/// The mutually dependent family under the gauge `x a + y b + z c = f²`:
/// `H_N = H + (r × ṙ)/(2f²)·σ`, the counter-diabatic Hamiltonian.
pub fn dependent_solution(p: &ControlProtocol) -> Result<NobieSolution> {
    check_nondegenerate(p)?;
    let source = p.clone();
    Ok(NobieSolution {
        coefficients: Arc::new(move |t| {
            let r = source.at(t);
            let f2 = r.dot(r);
            r + r.cross(source.rate(t)) * (0.5 / f2)
        }),
        family: SolutionFamily::MutuallyDependent,
        eliminated_axis: None,
        source: p.clone(),
    })
}

/// The mutually independent family with the `eliminated_axis` component
/// removed. For `X`:
///
/// ```text
/// a = 0,  b = (ḟ z - f ż)/(2 x f),  c = (f ẏ - ḟ y)/(2 x f)
/// ```
///
/// and cyclically for `Y` and `Z`. Where the divisor component vanishes the
/// pole cancels iff `(r × ṙ)` has no component along the eliminated axis; the
/// limit is then `b, c = (r × ṙ)_{y,z}/(2f²)`. The driven qubit (`y ≡ 0`,
/// constant `z`) is such a case.
pub fn independent_solution(p: &ControlProtocol, eliminated_axis: Axis) -> Result<NobieSolution> {
    check_nondegenerate(p)?;
    for t in p.scan_times(SCAN_POINTS) {
        independent_coefficients(p.at(t), p.rate(t), eliminated_axis).ok_or(Error::SingularControl { time: t })?;
    }
    let source = p.clone();
    Ok(NobieSolution {
        coefficients: Arc::new(move |t| {
            independent_coefficients(source.at(t), source.rate(t), eliminated_axis).unwrap_or(PauliVector::new(
                f64::NAN,
                f64::NAN,
                f64::NAN,
            ))
        }),
        family: SolutionFamily::MutuallyIndependent,
        eliminated_axis: Some(eliminated_axis),
        source: p.clone(),
    })
}

fn independent_coefficients(r: PauliVector, r_dot: PauliVector, axis: Axis) -> Option<PauliVector> {
    let i = axis.index();
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    let (rv, rd) = (r.to_array(), r_dot.to_array());
    let f = r.magnitude();
    let f_dot = r.dot(r_dot) / f;

    let mut h = [0.0; 3];
    if rv[i].abs() >= SINGULAR_DIVISOR_THRESHOLD * f {
        let denom = 2.0 * rv[i] * f;
        h[j] = (f_dot * rv[k] - f * rd[k]) / denom;
        h[k] = (f * rd[j] - f_dot * rv[j]) / denom;
    } else {
        let w = r.cross(r_dot).to_array();
        let scale = r.magnitude() * r_dot.magnitude();
        if w[i].abs() > 1e-12 * scale {
            return None;
        }
        let f2 = f * f;
        h[j] = w[j] / (2.0 * f2);
        h[k] = w[k] / (2.0 * f2);
    }
    Some(PauliVector::from_array(h))
}

/// Largest `invariance_residual / f` and `max_k |main residual_k| / f` over the
/// scan grid; handy for quick certification of a candidate.
pub fn max_relative_residuals(p: &ControlProtocol, sol: &NobieSolution, points: usize) -> Result<(f64, f64)> {
    let mut worst = (0.0f64, 0.0f64);
    for t in p.scan_times(points) {
        let f = p.magnitude(t);
        let inv = invariance_residual(p, sol, t)? / f;
        let main = main_conditions_residual(p, sol, t)?.iter().map(|v| v.abs()).fold(0.0, f64::max) / f;
        worst = (worst.0.max(inv), worst.1.max(main));
    }
    Ok(worst)
}
