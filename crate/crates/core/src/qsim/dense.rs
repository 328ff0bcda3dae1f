use num_complex::Complex64 as C;
use rand::Rng;

use super::kernels::{self, Mat2};
use super::{check_targets, sample_outcome, Basis, DensityMatrix, Gate, MeasurementRecord, QsimError};

pub const MAX_DENSE_QUBITS: usize = 22;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<C>,
}

impl DenseState {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self, QsimError> {
        if n > MAX_DENSE_QUBITS {
            return Err(QsimError::CapExceeded { requested: n, cap: MAX_DENSE_QUBITS });
        }
        let mut amps = vec![C::new(0.0, 0.0); 1 << n];
        amps[0] = C::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    /// `|+>^⊗n`.
    pub fn plus(n: usize) -> Result<Self, QsimError> {
        if n > MAX_DENSE_QUBITS {
            return Err(QsimError::CapExceeded { requested: n, cap: MAX_DENSE_QUBITS });
        }
        let a = C::new((1u64 << n) as f64, 0.0).sqrt().inv();
        Ok(DenseState { n, amps: vec![a; 1 << n] })
    }

    pub fn from_amplitudes(amps: Vec<C>) -> Result<Self, QsimError> {
        if !amps.len().is_power_of_two() {
            return Err(QsimError::InvalidState(format!("length {} is not a power of two", amps.len())));
        }
        let n = amps.len().trailing_zeros() as usize;
        if n > MAX_DENSE_QUBITS {
            return Err(QsimError::CapExceeded { requested: n, cap: MAX_DENSE_QUBITS });
        }
        let s = DenseState { n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalised(norm));
        }
        Ok(s)
    }

    /// Normalises the given amplitudes.
    pub fn from_unnormalised(amps: Vec<C>) -> Result<Self, QsimError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(QsimError::InvalidState("zero vector".into()));
        }
        Self::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
    }

    /// `a|0> + b|1>` (normalised).
    pub fn qubit(a: C, b: C) -> Result<Self, QsimError> {
        Self::from_unnormalised(vec![a, b])
    }

    /// `(|0> + e^{iθ}|1>)/√2`.
    pub fn equatorial(theta: f64) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DenseState { n: 1, amps: vec![C::new(h, 0.0), C::from_polar(h, theta)] }
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DenseState) -> C {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `self ⊗ other`; `other`'s qubits follow `self`'s.
    pub fn tensor(&self, other: &DenseState) -> Result<DenseState, QsimError> {
        let n = self.n + other.n;
        if n > MAX_DENSE_QUBITS {
            return Err(QsimError::CapExceeded { requested: n, cap: MAX_DENSE_QUBITS });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(DenseState { n, amps })
    }

    pub fn to_density(&self) -> Result<DensityMatrix, QsimError> {
        DensityMatrix::from_pure(self)
    }

    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<(), QsimError> {
        check_targets(&gate, targets, self.n)?;
        match gate {
            Gate::CNOT => kernels::apply_cnot(&mut self.amps, self.n, targets[0], targets[1]),
            Gate::CZ | Gate::CCZ => kernels::apply_phase_flip(&mut self.amps, self.n, targets),
            g => kernels::apply_1q(&mut self.amps, self.n, targets[0], &g.matrix().expect("single-qubit gate")),
        }
        Ok(())
    }

    pub fn apply_matrix(&mut self, qubit: usize, m: &Mat2) -> Result<(), QsimError> {
        if qubit >= self.n {
            return Err(QsimError::OutOfRange { qubit, count: self.n });
        }
        kernels::apply_1q(&mut self.amps, self.n, qubit, m);
        Ok(())
    }

    /// Probability of outcome 0 when measuring `qubit` in `basis`.
    pub fn probability_zero(&self, qubit: usize, basis: Basis) -> Result<f64, QsimError> {
        if qubit >= self.n {
            return Err(QsimError::OutOfRange { qubit, count: self.n });
        }
        let v = basis.outcome_vector(0);
        let bit = kernels::mask(self.n, qubit);
        let mut p = 0.0;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = v[0].conj() * self.amps[i] + v[1].conj() * self.amps[i | bit];
                p += a.norm_sqr();
            }
        }
        Ok(p.clamp(0.0, 1.0))
    }

    /// Project `qubit` onto the `outcome` eigenvector of `basis` and
    /// renormalise. Returns the probability of that outcome.
    pub fn project(&mut self, qubit: usize, basis: Basis, outcome: u8) -> Result<f64, QsimError> {
        if qubit >= self.n {
            return Err(QsimError::OutOfRange { qubit, count: self.n });
        }
        let v = basis.outcome_vector(outcome);
        let bit = kernels::mask(self.n, qubit);
        let mut p = 0.0;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let a = v[0].conj() * self.amps[i] + v[1].conj() * self.amps[j];
                p += a.norm_sqr();
                self.amps[i] = v[0] * a;
                self.amps[j] = v[1] * a;
            }
        }
        if p <= 0.0 {
            return Err(QsimError::ImpossibleOutcome { outcome });
        }
        let s = p.sqrt();
        for a in &mut self.amps {
            *a /= s;
        }
        Ok(p)
    }

    /// Born-rule measurement; the measured qubit is left in the eigenvector
    /// of the observed outcome.
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

    /// Drop a qubit that is in a product state with the rest (e.g. after it
    /// was measured), keeping the remaining amplitudes in order.
    pub fn remove_qubit(&self, qubit: usize) -> Result<DenseState, QsimError> {
        if qubit >= self.n {
            return Err(QsimError::OutOfRange { qubit, count: self.n });
        }
        let bit = kernels::mask(self.n, qubit);
        let mut zero = Vec::with_capacity(self.amps.len() / 2);
        let mut one = Vec::with_capacity(self.amps.len() / 2);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                zero.push(self.amps[i]);
                one.push(self.amps[i | bit]);
            }
        }
        let n0: f64 = zero.iter().map(|a| a.norm_sqr()).sum();
        let n1: f64 = one.iter().map(|a| a.norm_sqr()).sum();
        let (big, small, nb) = if n0 >= n1 { (zero, one, n0) } else { (one, zero, n1) };
        // Product check: the smaller branch must be parallel to the larger.
        let overlap: C = big.iter().zip(&small).map(|(a, b)| a.conj() * b).sum();
        let ns = nb.min(n0 + n1 - nb);
        if ns > 1e-20 && (overlap.norm_sqr() - nb * ns).abs() > 1e-9 {
            return Err(QsimError::InvalidState(format!("qubit {qubit} is entangled with the register")));
        }
        DenseState::from_unnormalised(big)
    }
}
