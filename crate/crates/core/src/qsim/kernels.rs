//! In-place kernels on a flat amplitude array over `total` qubits.
//! Position `p` addresses bit `total - 1 - p` of the index (qubit 0 is the
//! most significant).

use num_complex::Complex64 as C;

#[inline]
pub fn mask(total: usize, pos: usize) -> usize {
    1usize << (total - 1 - pos)
}

pub type Mat2 = [[C; 2]; 2];

pub fn apply_1q(amps: &mut [C], total: usize, pos: usize, m: &Mat2) {
    let bit = mask(total, pos);
    for i in 0..amps.len() {
        if i & bit == 0 {
            let j = i | bit;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

pub fn apply_cnot(amps: &mut [C], total: usize, control: usize, target: usize) {
    let cb = mask(total, control);
    let tb = mask(total, target);
    for i in 0..amps.len() {
        if i & cb != 0 && i & tb == 0 {
            amps.swap(i, i | tb);
        }
    }
}

/// Negate every amplitude whose bits at all `positions` are 1 (CZ, CCZ, ...).
pub fn apply_phase_flip(amps: &mut [C], total: usize, positions: &[usize]) {
    let m: usize = positions.iter().map(|&p| mask(total, p)).fold(0, |a, b| a | b);
    for (i, a) in amps.iter_mut().enumerate() {
        if i & m == m {
            *a = -*a;
        }
    }
}

pub fn conj_mat(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}
