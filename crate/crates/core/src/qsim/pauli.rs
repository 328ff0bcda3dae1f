use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::{DenseState, Gate, QsimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn gate(self) -> Gate {
        match self {
            Pauli::X => Gate::X,
            Pauli::Y => Gate::Y,
            Pauli::Z => Gate::Z,
        }
    }
}

/// `i^phase · P_0 ⊗ ... ⊗ P_{n-1}`, with each factor encoded by an `(x, z)`
/// bit pair: `I=(0,0) X=(1,0) Y=(1,1) Z=(0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    pub(crate) phase: u8,
}

pub(crate) fn words(n: usize) -> usize {
    n.div_ceil(64)
}

/// Power of `i` picked up when multiplying rows `(x1, z1)·(x2, z2)`.
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u8 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for w in 0..x1.len() {
        let (a_x, a_y, a_z) = (x1[w] & !z1[w], x1[w] & z1[w], !x1[w] & z1[w]);
        let (b_x, b_y, b_z) = (x2[w] & !z2[w], x2[w] & z2[w], !x2[w] & z2[w]);
        plus += ((a_x & b_y) | (a_y & b_z) | (a_z & b_x)).count_ones();
        minus += ((a_y & b_x) | (a_z & b_y) | (a_x & b_z)).count_ones();
    }
    ((plus + 3 * minus) % 4) as u8
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: vec![0; words(n)], z: vec![0; words(n)], phase: 0 }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(qubit, Some(p));
        s
    }

    pub fn from_factors(factors: &[(usize, Pauli)], n: usize) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in factors {
            s.set(q, Some(p));
        }
        s
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        let (w, b) = (qubit / 64, qubit % 64);
        match ((self.x[w] >> b) & 1, (self.z[w] >> b) & 1) {
            (0, 0) => None,
            (1, 0) => Some(Pauli::X),
            (1, 1) => Some(Pauli::Y),
            _ => Some(Pauli::Z),
        }
    }

    pub fn set(&mut self, qubit: usize, p: Option<Pauli>) {
        let (w, b) = (qubit / 64, qubit % 64);
        let (xb, zb) = p.map_or((false, false), Pauli::bits);
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    /// Exponent `k` of the overall `i^k` factor.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// `+1` or `-1` for Hermitian strings.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n, other.n, "Pauli strings on different registers");
        let phase = (self.phase + other.phase + product_phase(&self.x, &self.z, &other.x, &other.z)) % 4;
        PauliString {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            phase,
        }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity += ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity % 2 == 0
    }

    /// `P|ψ>`.
    pub fn apply_to(&self, state: &DenseState) -> Result<DenseState, QsimError> {
        if state.qubit_count() != self.n {
            return Err(QsimError::DimensionMismatch(self.n, state.qubit_count()));
        }
        let mut out = state.clone();
        for q in 0..self.n {
            if let Some(p) = self.get(q) {
                out.apply_gate(p.gate(), &[q])?;
            }
        }
        let f = C::i().powu(self.phase as u32);
        let amps = out.amplitudes().iter().map(|a| a * f).collect();
        DenseState::from_amplitudes(amps)
    }

    /// `<ψ|P|ψ>`.
    pub fn expectation(&self, state: &DenseState) -> Result<C, QsimError> {
        Ok(state.inner(&self.apply_to(state)?))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.phase as usize])?;
        for q in 0..self.n {
            let c = match self.get(q) {
                None => 'I',
                Some(Pauli::X) => 'X',
                Some(Pauli::Y) => 'Y',
                Some(Pauli::Z) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QsimError;

    /// Parses an optional sign (`+`, `-`, `+i`, `-i`, `i`) followed by
    /// letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (phase, body) = if let Some(r) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s.strip_prefix('+').unwrap_or(s))
        };
        let n = body.chars().count();
        let mut out = PauliString::identity(n);
        out.phase = phase;
        for (q, c) in body.chars().enumerate() {
            let p = match c {
                'I' => None,
                'X' => Some(Pauli::X),
                'Y' => Some(Pauli::Y),
                'Z' => Some(Pauli::Z),
                other => return Err(QsimError::InvalidState(format!("unexpected character {other:?} in Pauli string"))),
            };
            out.set(q, p);
        }
        Ok(out)
    }
}
