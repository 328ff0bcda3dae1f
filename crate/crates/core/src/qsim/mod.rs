//! Qubit simulation backends: dense state vectors and density matrices for
//! arbitrary gates and equatorial measurements, and a stabilizer tableau for
//! Clifford circuits.
//!
//! Qubit 0 is the most significant bit of a basis-state index, so the
//! amplitude of `|q0 q1 ... q(n-1)>` sits at index `q0·2^(n-1) + ... + q(n-1)`.
//! Measurement outcome 0 is the +1 eigenvector of the measured observable.
//! Randomness enters only through the `rng` passed to `measure`: one uniform
//! `u` is drawn per measurement and the outcome is 0 iff `u < P(0)`.

mod dense;
mod density;
mod kernels;
mod pauli;
mod tableau;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dense::{DenseState, MAX_DENSE_QUBITS};
pub use density::{DensityMatrix, MAX_DENSITY_QUBITS};
pub use kernels::Mat2;
pub use pauli::{Pauli, PauliString};
pub use tableau::StabilizerTableau;

/// Probabilities within this distance of 0 or 1 count as deterministic.
pub const DETERMINISTIC_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("gate {gate} is not supported on the {backend} backend")]
    UnsupportedOnBackend { gate: String, backend: &'static str },
    #[error("gate {gate} expects {expected} targets, got {got}")]
    WrongArity { gate: String, expected: usize, got: usize },
    #[error("targets must be distinct: {0:?}")]
    DuplicateTargets(Vec<usize>),
    #[error("qubit {qubit} out of range for {count}-qubit register")]
    OutOfRange { qubit: usize, count: usize },
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("{requested} qubits exceeds the backend cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("state is not normalised (norm {0})")]
    NotNormalised(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("outcome {outcome} has zero probability")]
    ImpossibleOutcome { outcome: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rz(f64),
    CZ,
    CNOT,
    CCZ,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::CZ | Gate::CNOT => 2,
            Gate::CCZ => 3,
            _ => 1,
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::T | Gate::Tdg | Gate::Rz(_) | Gate::CCZ)
    }

    pub fn name(&self) -> String {
        match self {
            Gate::Rz(t) => format!("Rz({t})"),
            g => format!("{g:?}"),
        }
    }

    /// 2×2 matrix of a single-qubit gate.
    pub fn matrix(&self) -> Option<Mat2> {
        let z = C::new(0.0, 0.0);
        let o = C::new(1.0, 0.0);
        let i = C::new(0.0, 1.0);
        let h = C::new(FRAC_1_SQRT_2, 0.0);
        Some(match *self {
            Gate::X => [[z, o], [o, z]],
            Gate::Y => [[z, -i], [i, z]],
            Gate::Z => [[o, z], [z, -o]],
            Gate::H => [[h, h], [h, -h]],
            Gate::S => [[o, z], [z, i]],
            Gate::Sdg => [[o, z], [z, -i]],
            Gate::T => [[o, z], [z, C::from_polar(1.0, FRAC_PI_4)]],
            Gate::Tdg => [[o, z], [z, C::from_polar(1.0, -FRAC_PI_4)]],
            Gate::Rz(t) => [[C::from_polar(1.0, -t / 2.0), z], [z, C::from_polar(1.0, t / 2.0)]],
            _ => return None,
        })
    }
}

pub(crate) fn check_targets(gate: &Gate, targets: &[usize], count: usize) -> Result<(), QsimError> {
    if targets.len() != gate.arity() {
        return Err(QsimError::WrongArity { gate: gate.name(), expected: gate.arity(), got: targets.len() });
    }
    for (k, &t) in targets.iter().enumerate() {
        if t >= count {
            return Err(QsimError::OutOfRange { qubit: t, count });
        }
        if targets[..k].contains(&t) {
            return Err(QsimError::DuplicateTargets(targets.to_vec()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    Pauli(Pauli),
    /// `{(|0> ± e^{iδ}|1>)/√2}`; outcome 0 is the `+` vector.
    Equatorial(f64),
}

impl Basis {
    /// Ket components `(<0|b>, <1|b>)` of the eigenvector `|b>` for `outcome`.
    pub(crate) fn outcome_vector(&self, outcome: u8) -> [C; 2] {
        let h = FRAC_1_SQRT_2;
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        match self {
            Basis::Pauli(Pauli::Z) => {
                if outcome == 0 {
                    [C::new(1.0, 0.0), C::new(0.0, 0.0)]
                } else {
                    [C::new(0.0, 0.0), C::new(1.0, 0.0)]
                }
            }
            Basis::Pauli(Pauli::X) => [C::new(h, 0.0), C::new(sign * h, 0.0)],
            Basis::Pauli(Pauli::Y) => [C::new(h, 0.0), C::new(0.0, sign * h)],
            Basis::Equatorial(d) => [C::new(h, 0.0), C::from_polar(sign * h, *d)],
        }
    }

    /// The equivalent Pauli (and whether the outcome must be flipped), when
    /// the angle is a multiple of π/2.
    pub fn as_pauli(&self) -> Option<(Pauli, bool)> {
        match *self {
            Basis::Pauli(p) => Some((p, false)),
            Basis::Equatorial(d) => {
                let k = (d / FRAC_PI_2).round();
                if (d - k * FRAC_PI_2).abs() > 1e-12 {
                    return None;
                }
                match (k as i64).rem_euclid(4) {
                    0 => Some((Pauli::X, false)),
                    1 => Some((Pauli::Y, false)),
                    2 => Some((Pauli::X, true)),
                    _ => Some((Pauli::Y, true)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubit: usize,
    pub basis: Basis,
    pub outcome: u8,
    pub was_random: bool,
}

pub(crate) fn sample_outcome<R: rand::Rng + ?Sized>(p0: f64, rng: &mut R) -> (u8, bool) {
    let u: f64 = rng.gen();
    let outcome = if u < p0 { 0 } else { 1 };
    let was_random = p0 > DETERMINISTIC_EPS && p0 < 1.0 - DETERMINISTIC_EPS;
    (outcome, was_random)
}

/// Either a pure state or a density matrix, for `fidelity`.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a DenseState),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a DenseState> for StateRef<'a> {
    fn from(s: &'a DenseState) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    fn qubits(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.qubit_count(),
            StateRef::Mixed(m) => m.qubit_count(),
        }
    }
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`; for pure states this is `|<ψ|φ>|²`.
pub fn fidelity<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64, QsimError> {
    let (a, b) = (a.into(), b.into());
    if a.qubits() != b.qubits() {
        return Err(QsimError::DimensionMismatch(a.qubits(), b.qubits()));
    }
    Ok(match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => x.inner(y).norm_sqr(),
        (StateRef::Pure(x), StateRef::Mixed(r)) | (StateRef::Mixed(r), StateRef::Pure(x)) => r.expectation_pure(x),
        (StateRef::Mixed(x), StateRef::Mixed(y)) => x.uhlmann_fidelity(y),
    })
}

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_pauli_equivalents() {
        assert_eq!(Basis::Equatorial(0.0).as_pauli(), Some((Pauli::X, false)));
        assert_eq!(Basis::Equatorial(PI).as_pauli(), Some((Pauli::X, true)));
        assert_eq!(Basis::Equatorial(3.0 * FRAC_PI_2).as_pauli(), Some((Pauli::Y, true)));
        assert_eq!(Basis::Equatorial(FRAC_PI_4).as_pauli(), None);
    }

    #[test]
    fn target_validation() {
        assert!(check_targets(&Gate::CNOT, &[0, 1], 2).is_ok());
        assert!(matches!(check_targets(&Gate::CNOT, &[1, 1], 2), Err(QsimError::DuplicateTargets(_))));
        assert!(matches!(check_targets(&Gate::H, &[2], 2), Err(QsimError::OutOfRange { .. })));
        assert!(matches!(check_targets(&Gate::CCZ, &[0, 1], 3), Err(QsimError::WrongArity { .. })));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(2.0 * PI), 0.0);
        assert!((wrap_angle(-FRAC_PI_4) - 7.0 * FRAC_PI_4).abs() < 1e-15);
    }
}
