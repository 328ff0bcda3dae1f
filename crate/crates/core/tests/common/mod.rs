#![allow(dead_code)]

use std::f64::consts::PI;

use covertnet::qsim::DenseState;
use num_complex::Complex64;
use rand::Rng;

/// `|<a|b>|`, equal to 1 exactly when the states agree up to global phase.
pub fn overlap(a: &DenseState, b: &DenseState) -> f64 {
    a.inner(b).norm()
}

pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> DenseState {
    let cos_theta: f64 = 1.0 - 2.0 * rng.gen::<f64>();
    let phi = 2.0 * PI * rng.gen::<f64>();
    let half = cos_theta.acos() / 2.0;
    DenseState::qubit(Complex64::new(half.cos(), 0.0), Complex64::from_polar(half.sin(), phi)).unwrap()
}

/// Werner entanglement-swap output fidelity.
pub fn swap_fidelity(f1: f64, f2: f64) -> f64 {
    f1 * f2 + (1.0 - f1) * (1.0 - f2) / 3.0
}
