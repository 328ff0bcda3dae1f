use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64 as C;
use rand::Rng;

use super::kernels::{self, conj_mat, Mat2};
use super::{check_targets, sample_outcome, Basis, DenseState, Gate, MeasurementRecord, QsimError};
use crate::entanglement::DensityOperator2Q;

pub const MAX_DENSITY_QUBITS: usize = 10;

const TRACE_TOL: f64 = 1e-9;

/// Row-major `2^n × 2^n` matrix stored as a `2n`-qubit amplitude array: row
/// qubit `q` sits at position `q`, column qubit `q` at position `n + q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<C>,
}

fn check_cap(n: usize) -> Result<(), QsimError> {
    if n > MAX_DENSITY_QUBITS {
        return Err(QsimError::CapExceeded { requested: n, cap: MAX_DENSITY_QUBITS });
    }
    Ok(())
}

impl DensityMatrix {
    pub fn zero(n: usize) -> Result<Self, QsimError> {
        check_cap(n)?;
        let mut data = vec![C::new(0.0, 0.0); 1 << (2 * n)];
        data[0] = C::new(1.0, 0.0);
        Ok(DensityMatrix { n, data })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self, QsimError> {
        check_cap(n)?;
        let d = 1usize << n;
        let mut data = vec![C::new(0.0, 0.0); d * d];
        for i in 0..d {
            data[i * d + i] = C::new(1.0 / d as f64, 0.0);
        }
        Ok(DensityMatrix { n, data })
    }

    pub fn from_pure(psi: &DenseState) -> Result<Self, QsimError> {
        let n = psi.qubit_count();
        check_cap(n)?;
        let a = psi.amplitudes();
        let mut data = Vec::with_capacity(a.len() * a.len());
        for x in a {
            for y in a {
                data.push(x * y.conj());
            }
        }
        Ok(DensityMatrix { n, data })
    }

    /// Build from row-major entries; checks Hermiticity and unit trace.
    pub fn from_rows(n: usize, data: Vec<C>) -> Result<Self, QsimError> {
        check_cap(n)?;
        let d = 1usize << n;
        if data.len() != d * d {
            return Err(QsimError::InvalidState(format!("expected {} entries, got {}", d * d, data.len())));
        }
        for i in 0..d {
            for j in 0..=i {
                if (data[i * d + j] - data[j * d + i].conj()).norm() > TRACE_TOL {
                    return Err(QsimError::InvalidState("matrix is not Hermitian".into()));
                }
            }
        }
        let m = DensityMatrix { n, data };
        let tr = m.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(QsimError::NotNormalised(tr));
        }
        Ok(m)
    }

    pub fn from_two_qubit(rho: &DensityOperator2Q) -> Self {
        let m = rho.matrix();
        let mut data = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                data.push(m[(i, j)]);
            }
        }
        DensityMatrix { n: 2, data }
    }

    pub fn to_two_qubit(&self) -> Result<DensityOperator2Q, QsimError> {
        if self.n != 2 {
            return Err(QsimError::DimensionMismatch(self.n, 2));
        }
        let m = Matrix4::from_fn(|i, j| self.data[i * 4 + j]);
        DensityOperator2Q::new(m).map_err(|e| QsimError::InvalidState(e.to_string()))
    }

    /// State vector of a pure density matrix (global phase fixed by the
    /// largest diagonal entry).
    pub fn to_pure(&self) -> Result<DenseState, QsimError> {
        let purity = self.purity();
        if (purity - 1.0).abs() > 1e-9 {
            return Err(QsimError::InvalidState(format!("state is mixed (purity {purity})")));
        }
        let d = self.dim();
        let k = (0..d).max_by(|&a, &b| self.data[a * d + a].re.total_cmp(&self.data[b * d + b].re)).unwrap_or(0);
        let scale = self.data[k * d + k].re.sqrt();
        DenseState::from_unnormalised((0..d).map(|i| self.data[i * d + k] / scale).collect())
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> C {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).sum()
    }

    /// `<ψ|ρ|ψ>`.
    pub fn expectation_pure(&self, psi: &DenseState) -> f64 {
        let d = self.dim();
        let a = psi.amplitudes();
        let mut acc = C::new(0.0, 0.0);
        for i in 0..d {
            let mut row = C::new(0.0, 0.0);
            for j in 0..d {
                row += self.data[i * d + j] * a[j];
            }
            acc += a[i].conj() * row;
        }
        acc.re
    }

    fn to_dmatrix(&self) -> DMatrix<C> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.data[i * d + j])
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.to_dmatrix()).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    pub fn purity(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    fn sqrt_psd(&self) -> DMatrix<C> {
        let eig = SymmetricEigen::new(self.to_dmatrix());
        let d = self.dim();
        let cutoff = eig.eigenvalues.amax() * d as f64 * f64::EPSILON;
        let mut out = DMatrix::<C>::zeros(d, d);
        for k in 0..d {
            let l = eig.eigenvalues[k];
            if l <= cutoff {
                continue;
            }
            let v = eig.eigenvectors.column(k);
            out += v * v.adjoint() * C::new(l.sqrt(), 0.0);
        }
        out
    }

    /// Uhlmann fidelity `‖√ρ √σ‖₁²` via singular values.
    pub fn uhlmann_fidelity(&self, other: &DensityMatrix) -> f64 {
        let m = self.sqrt_psd() * other.sqrt_psd();
        let s: f64 = m.singular_values().iter().sum();
        (s * s).min(1.0)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix, QsimError> {
        let n = self.n + other.n;
        check_cap(n)?;
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut data = vec![C::new(0.0, 0.0); d * d];
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self.data[i1 * da + j1];
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..db {
                    for j2 in 0..db {
                        data[(i1 * db + i2) * d + j1 * db + j2] = a * other.data[i2 * db + j2];
                    }
                }
            }
        }
        Ok(DensityMatrix { n, data })
    }

    fn apply_both(&mut self, qubit: usize, m: &Mat2) {
        kernels::apply_1q(&mut self.data, 2 * self.n, qubit, m);
        kernels::apply_1q(&mut self.data, 2 * self.n, self.n + qubit, &conj_mat(m));
    }

    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<(), QsimError> {
        check_targets(&gate, targets, self.n)?;
        let total = 2 * self.n;
        match gate {
            Gate::CNOT => {
                kernels::apply_cnot(&mut self.data, total, targets[0], targets[1]);
                kernels::apply_cnot(&mut self.data, total, self.n + targets[0], self.n + targets[1]);
            }
            Gate::CZ | Gate::CCZ => {
                let cols: Vec<usize> = targets.iter().map(|t| t + self.n).collect();
                kernels::apply_phase_flip(&mut self.data, total, targets);
                kernels::apply_phase_flip(&mut self.data, total, &cols);
            }
            g => self.apply_both(targets[0], &g.matrix().expect("single-qubit gate")),
        }
        Ok(())
    }

    pub fn apply_matrix(&mut self, qubit: usize, m: &Mat2) -> Result<(), QsimError> {
        if qubit >= self.n {
            return Err(QsimError::OutOfRange { qubit, count: self.n });
        }
        self.apply_both(qubit, m);
        Ok(())
    }

    fn projector(basis: Basis, outcome: u8) -> Mat2 {
        let v = basis.outcome_vector(outcome);
        [[v[0] * v[0].conj(), v[0] * v[1].conj()], [v[1] * v[0].conj(), v[1] * v[1].conj()]]
    }

    pub fn probability_zero(&self, qubit: usize, basis: Basis) -> Result<f64, QsimError> {
        if qubit >= self.n {
            return Err(QsimError::OutOfRange { qubit, count: self.n });
        }
        let p = Self::projector(basis, 0);
        let bit = 1usize << (self.n - 1 - qubit);
        let d = self.dim();
        let mut acc = C::new(0.0, 0.0);
        // tr(P_q ρ) = Σ_i Σ_{a,b} P[a][b] ρ[i_b, i_a] over rows with the other bits fixed.
        for i in 0..d {
            if i & bit != 0 {
                continue;
            }
            let idx = [i, i | bit];
            for a in 0..2 {
                for b in 0..2 {
                    acc += p[a][b] * self.data[idx[b] * d + idx[a]];
                }
            }
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// Project onto the outcome eigenvector and renormalise. Returns the
    /// outcome probability.
    pub fn project(&mut self, qubit: usize, basis: Basis, outcome: u8) -> Result<f64, QsimError> {
        if qubit >= self.n {
            return Err(QsimError::OutOfRange { qubit, count: self.n });
        }
        self.apply_both(qubit, &Self::projector(basis, outcome));
        let p = self.trace();
        if p <= 0.0 {
            return Err(QsimError::ImpossibleOutcome { outcome });
        }
        for x in &mut self.data {
            *x /= p;
        }
        Ok(p)
    }

    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        basis: Basis,
        rng: &mut R,
    ) -> Result<MeasurementRecord, QsimError> {
        let p0 = self.probability_zero(qubit, basis)?;
        let (outcome, was_random) = sample_outcome(p0, rng);
        self.project(qubit, basis, outcome)?;
        Ok(MeasurementRecord { qubit, basis, outcome, was_random })
    }

    /// Reduced state on `keep`, with qubits reordered to follow `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, QsimError> {
        for (k, &q) in keep.iter().enumerate() {
            if q >= self.n {
                return Err(QsimError::OutOfRange { qubit: q, count: self.n });
            }
            if keep[..k].contains(&q) {
                return Err(QsimError::DuplicateTargets(keep.to_vec()));
            }
        }
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let n = self.n;
        let compose = |kept_bits: usize, traced_bits: usize| -> usize {
            let mut idx = 0usize;
            for (k, &q) in keep.iter().enumerate() {
                if kept_bits >> (keep.len() - 1 - k) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            for (k, &q) in traced.iter().enumerate() {
                if traced_bits >> (traced.len() - 1 - k) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        let dk = 1usize << keep.len();
        let dt = 1usize << traced.len();
        let d = self.dim();
        let mut data = vec![C::new(0.0, 0.0); dk * dk];
        for r in 0..dk {
            for c in 0..dk {
                let mut acc = C::new(0.0, 0.0);
                for t in 0..dt {
                    acc += self.data[compose(r, t) * d + compose(c, t)];
                }
                data[r * dk + c] = acc;
            }
        }
        Ok(DensityMatrix { n: keep.len(), data })
    }
}
