use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pauli::{product_phase, words};
use super::{check_targets, Basis, DenseState, Gate, MeasurementRecord, Pauli, PauliString, QsimError};

const BACKEND: &str = "stabilizer";

/// Aaronson–Gottesman tableau. Rows `0..n` are destabilizers, rows `n..2n`
/// stabilizers; each row holds bit-packed `x`/`z` vectors and a sign bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerTableau {
    n: usize,
    w: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

impl StabilizerTableau {
    /// `|0...0>`.
    pub fn zero(n: usize) -> Self {
        let w = words(n);
        let mut t = StabilizerTableau { n, w, x: vec![0; 2 * n * w], z: vec![0; 2 * n * w], r: vec![false; 2 * n] };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        t
    }

    /// Graph state `Π CZ_e |+>^⊗n`.
    pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Result<Self, QsimError> {
        let mut t = Self::zero(n);
        for q in 0..n {
            t.apply_gate(Gate::H, &[q])?;
        }
        for &(a, b) in edges {
            t.apply_gate(Gate::CZ, &[a, b])?;
        }
        Ok(t)
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn xb(&self, row: usize, q: usize) -> bool {
        (self.x[row * self.w + q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    fn zb(&self, row: usize, q: usize) -> bool {
        (self.z[row * self.w + q / 64] >> (q % 64)) & 1 == 1
    }

    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let i = row * self.w + q / 64;
        self.x[i] = (self.x[i] & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let i = row * self.w + q / 64;
        self.z[i] = (self.z[i] & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    fn row(&self, row: usize) -> PauliString {
        let mut p = PauliString::identity(self.n);
        p.x.copy_from_slice(&self.x[row * self.w..(row + 1) * self.w]);
        p.z.copy_from_slice(&self.z[row * self.w..(row + 1) * self.w]);
        p.phase = if self.r[row] { 2 } else { 0 };
        p
    }

    fn set_row(&mut self, row: usize, p: &PauliString) {
        self.x[row * self.w..(row + 1) * self.w].copy_from_slice(&p.x);
        self.z[row * self.w..(row + 1) * self.w].copy_from_slice(&p.z);
        self.r[row] = p.phase == 2;
    }

    /// Row `h` ← row `h` · row `i`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.w;
        let g = product_phase(&self.x[h * w..(h + 1) * w], &self.z[h * w..(h + 1) * w], &self.x[i * w..(i + 1) * w], &self.z[i * w..(i + 1) * w]);
        let total = (2 * self.r[h] as u8 + 2 * self.r[i] as u8 + g) % 4;
        debug_assert!(h < self.n || total % 2 == 0, "rowsum of anticommuting stabilizers");
        self.r[h] = total == 2;
        for k in 0..w {
            self.x[h * w + k] ^= self.x[i * w + k];
            self.z[h * w + k] ^= self.z[i * w + k];
        }
    }

    fn hadamard(&mut self, q: usize) {
        for row in 0..2 * self.n {
            let (x, z) = (self.xb(row, q), self.zb(row, q));
            self.r[row] ^= x && z;
            self.set_x(row, q, z);
            self.set_z(row, q, x);
        }
    }

    fn phase_gate(&mut self, q: usize) {
        for row in 0..2 * self.n {
            let (x, z) = (self.xb(row, q), self.zb(row, q));
            self.r[row] ^= x && z;
            self.set_z(row, q, z ^ x);
        }
    }

    fn cnot(&mut self, a: usize, b: usize) {
        for row in 0..2 * self.n {
            let (xa, za, xb, zb) = (self.xb(row, a), self.zb(row, a), self.xb(row, b), self.zb(row, b));
            self.r[row] ^= xa && zb && !(xb ^ za);
            self.set_x(row, b, xb ^ xa);
            self.set_z(row, a, za ^ zb);
        }
    }

    fn pauli_flip(&mut self, q: usize, flip_on_x: bool, flip_on_z: bool) {
        for row in 0..2 * self.n {
            self.r[row] ^= (flip_on_x && self.xb(row, q)) ^ (flip_on_z && self.zb(row, q));
        }
    }

    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<(), QsimError> {
        if !gate.is_clifford() {
            return Err(QsimError::UnsupportedOnBackend { gate: gate.name(), backend: BACKEND });
        }
        check_targets(&gate, targets, self.n)?;
        let q = targets[0];
        match gate {
            Gate::H => self.hadamard(q),
            Gate::S => self.phase_gate(q),
            Gate::Sdg => {
                for _ in 0..3 {
                    self.phase_gate(q);
                }
            }
            // X anticommutes with Z and Y components, Z with X and Y.
            Gate::X => self.pauli_flip(q, false, true),
            Gate::Z => self.pauli_flip(q, true, false),
            Gate::Y => self.pauli_flip(q, true, true),
            Gate::CNOT => self.cnot(targets[0], targets[1]),
            Gate::CZ => {
                self.hadamard(targets[1]);
                self.cnot(targets[0], targets[1]);
                self.hadamard(targets[1]);
            }
            Gate::T | Gate::Tdg | Gate::Rz(_) | Gate::CCZ => unreachable!("non-Clifford gates rejected above"),
        }
        Ok(())
    }

    /// Z measurement; `random_outcome` is used when the result is not fixed.
    fn measure_z(&mut self, q: usize, random_outcome: bool) -> (bool, bool) {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&row| self.xb(row, q)) {
            for row in 0..2 * n {
                if row != p && self.xb(row, q) {
                    self.rowsum(row, p);
                }
            }
            let stab = self.row(p);
            self.set_row(p - n, &stab);
            let mut zq = PauliString::single(n, q, Pauli::Z);
            if random_outcome {
                zq.negate();
            }
            self.set_row(p, &zq);
            (random_outcome, true)
        } else {
            let mut acc = PauliString::identity(n);
            for i in 0..n {
                if self.xb(i, q) {
                    acc = acc.mul(&self.row(i + n));
                }
            }
            (acc.phase == 2, false)
        }
    }

    /// Measure in a Pauli basis, or an equatorial basis at a multiple of π/2.
    /// Random outcomes follow the dense rule: outcome 1 iff `u >= 1/2`.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        basis: Basis,
        rng: &mut R,
    ) -> Result<MeasurementRecord, QsimError> {
        if qubit >= self.n {
            return Err(QsimError::OutOfRange { qubit, count: self.n });
        }
        let (pauli, flip) = basis.as_pauli().ok_or_else(|| QsimError::UnsupportedOnBackend {
            gate: format!("measurement in {basis:?}"),
            backend: BACKEND,
        })?;
        let u: f64 = rng.gen();
        let basis_outcome_if_random = u >= 0.5;
        let rotate = |t: &mut Self, forward: bool| {
            match (pauli, forward) {
                (Pauli::Z, _) => {}
                (Pauli::X, _) => t.hadamard(qubit),
                (Pauli::Y, true) => {
                    t.apply_gate(Gate::Sdg, &[qubit]).expect("valid qubit");
                    t.hadamard(qubit);
                }
                (Pauli::Y, false) => {
                    t.hadamard(qubit);
                    t.phase_gate(qubit);
                }
            }
        };
        rotate(self, true);
        let (pauli_outcome, was_random) = self.measure_z(qubit, basis_outcome_if_random ^ flip);
        rotate(self, false);
        let outcome = (pauli_outcome ^ flip) as u8;
        Ok(MeasurementRecord { qubit, basis, outcome, was_random })
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.n..2 * self.n).map(|r| self.row(r)).collect()
    }

    /// `Some(±1)` if `±p` is in the stabilizer group, `None` if `<p> = 0`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<Option<i8>, QsimError> {
        if p.qubit_count() != self.n {
            return Err(QsimError::DimensionMismatch(p.qubit_count(), self.n));
        }
        if p.sign().is_none() {
            return Err(QsimError::InvalidState(format!("{p} is not Hermitian")));
        }
        let stabs = self.stabilizers();
        if stabs.iter().any(|s| !s.commutes_with(p)) {
            return Ok(None);
        }
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if !self.row(i).commutes_with(p) {
                acc = acc.mul(&stabs[i]);
            }
        }
        debug_assert_eq!((acc.x.clone(), acc.z.clone()), (p.x.clone(), p.z.clone()));
        let same = acc.phase == p.phase;
        Ok(Some(if same { 1 } else { -1 }))
    }

    /// Reduced row-echelon generators (X block first, then Z block). Two
    /// tableaux describe the same state iff these agree.
    pub fn canonical_stabilizers(&self) -> Vec<PauliString> {
        let mut rows = self.stabilizers();
        let mut top = 0;
        for pass_x in [true, false] {
            for q in 0..self.n {
                let has = |p: &PauliString| {
                    let b = if pass_x { p.x[q / 64] } else { p.z[q / 64] };
                    (b >> (q % 64)) & 1 == 1
                };
                let Some(pivot) = (top..rows.len()).find(|&i| has(&rows[i])) else {
                    continue;
                };
                rows.swap(top, pivot);
                for i in 0..rows.len() {
                    if i != top && has(&rows[i]) {
                        rows[i] = rows[i].mul(&rows[top]);
                    }
                }
                top += 1;
            }
        }
        rows
    }

    /// Dense amplitudes of the stabilized state (global phase arbitrary).
    pub fn to_dense(&self) -> Result<DenseState, QsimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7ab1e);
        let amps: Vec<C> = (0..1usize << self.n).map(|_| C::new(rng.gen::<f64>() + 0.1, rng.gen::<f64>())).collect();
        let mut v = DenseState::from_unnormalised(amps)?;
        for s in self.stabilizers() {
            let sv = s.apply_to(&v)?;
            let sum: Vec<C> = v.amplitudes().iter().zip(sv.amplitudes()).map(|(a, b)| a + b).collect();
            v = DenseState::from_unnormalised(sum)?;
        }
        Ok(v)
    }
}
