//! Two-qubit entanglement measures and recurrence distillation.
//!
//! Basis ordering throughout is `|00>, |01>, |10>, |11>` with the first
//! qubit most significant. Bell-diagonal weights are ordered
//! `(Φ⁺, Φ⁻, Ψ⁺, Ψ⁻)`.

mod distill;
mod measures;
pub mod optimize;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use distill::{
    distill_step, distill_to_target, werner_step, DistillationRound, DistillationTrace, MAX_DISTILLATION_ROUNDS,
};
pub use measures::{
    bell_basis, concurrence, eof, singlet_fraction, singlet_fraction_best, singlet_fraction_with,
    twirl_to_bell_diagonal, SingletFraction, SingletFractionOptions,
};

pub type C = Complex64;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("most negative eigenvalue {min:e} is below -{slack:e}")]
    NotPositive { min: f64, slack: f64 },
    #[error("singlet-fraction search did not agree across starts (best {best}, spread {spread:e})")]
    OptimizerStall { best: f64, spread: f64 },
    #[error("pool fidelity {0} is not distillable (must exceed 1/2)")]
    NotDistillable(f64),
    #[error("invalid Bell-diagonal weights: {0}")]
    InvalidWeights(String),
    #[error("invalid distillation target {0} (must lie below 1)")]
    InvalidTarget(f64),
    #[error("distillation needs more than {0} rounds")]
    RoundLimit(u32),
}

/// Hermitian, unit-trace 4×4 operator with eigenvalues no lower than
/// `-psd_slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator2Q {
    matrix: Matrix4<C>,
    psd_slack: f64,
}

impl DensityOperator2Q {
    pub fn new(matrix: Matrix4<C>) -> Result<Self, EntanglementError> {
        Self::with_slack(matrix, 1e-12)
    }

    pub fn with_slack(matrix: Matrix4<C>, psd_slack: f64) -> Result<Self, EntanglementError> {
        let dev = (matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > HERMITIAN_TOL {
            return Err(EntanglementError::NotHermitian(dev));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(EntanglementError::BadTrace(tr));
        }
        let rho = DensityOperator2Q { matrix: hermitize(&matrix), psd_slack };
        let min = rho.min_eigenvalue();
        if min < -psd_slack {
            return Err(EntanglementError::NotPositive { min, slack: psd_slack });
        }
        Ok(rho)
    }

    pub fn from_pure(psi: &Vector4<C>) -> Result<Self, EntanglementError> {
        let n = psi.norm();
        let v = psi / C::new(n, 0.0);
        Self::new(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        DensityOperator2Q { matrix: Matrix4::identity() * C::new(0.25, 0.0), psd_slack: 1e-12 }
    }

    /// `F|Φ⁺><Φ⁺| + (1-F)/3 (I - |Φ⁺><Φ⁺|)`.
    pub fn werner(fidelity: f64) -> Self {
        BellDiagonalState::werner(fidelity).to_density()
    }

    pub fn bell(index: usize) -> Self {
        let b = bell_basis()[index];
        DensityOperator2Q { matrix: b * b.adjoint(), psd_slack: 1e-12 }
    }

    pub fn matrix(&self) -> &Matrix4<C> {
        &self.matrix
    }

    pub fn psd_slack(&self) -> f64 {
        self.psd_slack
    }

    pub fn eigenvalues(&self) -> Vector4<f64> {
        SymmetricEigen::new(self.matrix).eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Zero out negative eigenvalues and renormalise; fails when the most
    /// negative eigenvalue lies below `-psd_slack`.
    pub fn clamp_positive(&self) -> Result<Self, EntanglementError> {
        let eig = SymmetricEigen::new(self.matrix);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -self.psd_slack {
            return Err(EntanglementError::NotPositive { min, slack: self.psd_slack });
        }
        if min >= 0.0 {
            return Ok(DensityOperator2Q { matrix: self.matrix, psd_slack: 1e-12 });
        }
        let clamped = eig.eigenvalues.map(|l| l.max(0.0));
        let total: f64 = clamped.sum();
        let mut m = Matrix4::zeros();
        for k in 0..4 {
            let v = eig.eigenvectors.column(k);
            m += v * v.adjoint() * C::new(clamped[k] / total, 0.0);
        }
        Ok(DensityOperator2Q { matrix: hermitize(&m), psd_slack: 1e-12 })
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn local_unitary(&self, u: &nalgebra::Matrix2<C>, v: &nalgebra::Matrix2<C>) -> Self {
        let w = u.kronecker(v);
        let m = w * self.matrix * w.adjoint();
        DensityOperator2Q { matrix: hermitize(&m), psd_slack: self.psd_slack }
    }

    /// Overlap `<Φ⁺|ρ|Φ⁺>`.
    pub fn bell_fidelity(&self) -> f64 {
        let b = bell_basis()[0];
        (b.adjoint() * self.matrix * b)[(0, 0)].re
    }
}

fn hermitize(m: &Matrix4<C>) -> Matrix4<C> {
    (m + m.adjoint()) * C::new(0.5, 0.0)
}

/// Mixture of the four Bell states with weights `(Φ⁺, Φ⁻, Ψ⁺, Ψ⁻)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalState {
    p: [f64; 4],
}

impl BellDiagonalState {
    pub fn new(p: [f64; 4]) -> Result<Self, EntanglementError> {
        if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(EntanglementError::InvalidWeights(format!("{p:?} outside [0, 1]")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(EntanglementError::InvalidWeights(format!("weights sum to {s}")));
        }
        Ok(BellDiagonalState { p })
    }

    pub fn werner(fidelity: f64) -> Self {
        let f = fidelity.clamp(0.0, 1.0);
        let q = (1.0 - f) / 3.0;
        BellDiagonalState { p: [f, q, q, q] }
    }

    pub fn weights(&self) -> [f64; 4] {
        self.p
    }

    pub fn fidelity(&self) -> f64 {
        self.p[0]
    }

    pub fn to_density(&self) -> DensityOperator2Q {
        let basis = bell_basis();
        let mut m = Matrix4::zeros();
        for (w, b) in self.p.iter().zip(basis.iter()) {
            m += b * b.adjoint() * C::new(*w, 0.0);
        }
        DensityOperator2Q { matrix: hermitize(&m), psd_slack: 1e-12 }
    }

    /// Bell-diagonal concurrence `max(0, 2·p_max - 1)`.
    pub fn concurrence(&self) -> f64 {
        let pmax = self.p.iter().cloned().fold(0.0, f64::max);
        (2.0 * pmax - 1.0).max(0.0)
    }
}
