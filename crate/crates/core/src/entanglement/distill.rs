use serde::{Deserialize, Serialize};

use super::{BellDiagonalState, EntanglementError};

/// Worst-case pair counts are `2^rounds`; beyond this they overflow `u64`.
pub const MAX_DISTILLATION_ROUNDS: u32 = 63;

/// One DEJMPS recurrence step on two Bell-diagonal pairs.
///
/// Alice rotates by `Rx(π/2)` and Bob by `Rx(-π/2)` (exchanging the `Φ⁻`
/// and `Ψ⁻` weights), both apply CNOT from pair `a` onto pair `b`, measure
/// pair `b` in `Z` and keep pair `a` when the outcomes coincide. Returns the
/// success probability and the post-selected state.
pub fn distill_step(a: &BellDiagonalState, b: &BellDiagonalState) -> (f64, BellDiagonalState) {
    // Labels as (phase, parity): Φ⁺=(0,0) Φ⁻=(1,0) Ψ⁺=(0,1) Ψ⁻=(1,1).
    let rotate = |s: &BellDiagonalState| {
        let [pp, pm, sp, sm] = s.weights();
        [pp, sm, sp, pm]
    };
    let [a00, a10, a01, a11] = rotate(a);
    let [b00, b10, b01, b11] = rotate(b);

    let out = [
        a00 * b00 + a10 * b10, // Φ⁺
        a00 * b10 + a10 * b00, // Φ⁻
        a01 * b01 + a11 * b11, // Ψ⁺
        a01 * b11 + a11 * b01, // Ψ⁻
    ];
    let norm: f64 = out.iter().sum();
    if norm <= 0.0 {
        return (0.0, *a);
    }
    let p = out.map(|x| x / norm);
    (norm, BellDiagonalState::new(p).expect("recurrence preserves normalisation"))
}

/// Fidelity map of one step on two Werner pairs of fidelity `f`:
/// `(F² + (1-F)²/9) / (F² + 2F(1-F)/3 + 5(1-F)²/9)`, together with the
/// success probability (the denominator).
pub fn werner_step(f: f64) -> (f64, f64) {
    let q = 1.0 - f;
    let num = f * f + q * q / 9.0;
    let den = f * f + 2.0 * f * q / 3.0 + 5.0 * q * q / 9.0;
    (num / den, den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistillationRound {
    pub fidelity: f64,
    pub success_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistillationTrace {
    pub initial_fidelity: f64,
    pub target: f64,
    pub rounds: u32,
    /// Per-round output fidelity and success probability.
    pub per_round: Vec<DistillationRound>,
    /// `2^rounds`: raw pairs consumed if every round succeeds.
    pub pairs_consumed: u64,
    /// Expected raw pairs per output pair, `Π 2/p_i`, when failed rounds are discarded.
    pub expected_pairs: f64,
    pub final_fidelity: f64,
}

/// Iterate Werner-twirled recurrence rounds until the fidelity reaches `target`.
pub fn distill_to_target(pool_fidelity: f64, target: f64) -> Result<DistillationTrace, EntanglementError> {
    if !(pool_fidelity > 0.5) || !pool_fidelity.is_finite() {
        return Err(EntanglementError::NotDistillable(pool_fidelity));
    }
    if !(target < 1.0) || !target.is_finite() {
        return Err(EntanglementError::InvalidTarget(target));
    }
    let pool_fidelity = pool_fidelity.min(1.0);

    let mut f = pool_fidelity;
    let mut per_round = Vec::new();
    let mut expected_pairs = 1.0;
    while f < target {
        if per_round.len() as u32 >= MAX_DISTILLATION_ROUNDS {
            return Err(EntanglementError::RoundLimit(MAX_DISTILLATION_ROUNDS));
        }
        let (next, success_prob) = werner_step(f);
        expected_pairs *= 2.0 / success_prob;
        per_round.push(DistillationRound { fidelity: next, success_prob });
        f = next;
    }
    let rounds = per_round.len() as u32;
    Ok(DistillationTrace {
        initial_fidelity: pool_fidelity,
        target,
        rounds,
        per_round,
        pairs_consumed: 1u64 << rounds,
        expected_pairs,
        final_fidelity: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn werner_fixed_points() {
        assert!((werner_step(1.0).0 - 1.0).abs() < 1e-15);
        assert!((werner_step(1.0).1 - 1.0).abs() < 1e-15);
        assert!((werner_step(0.5).0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn werner_three_quarters() {
        let (f, p) = werner_step(0.75);
        assert!((f - 0.788_461_538_461_538_5).abs() < 1e-12);
        assert!((p - 0.722_222_222_222_222_2).abs() < 1e-12);
    }

    #[test]
    fn step_on_werner_matches_scalar_map() {
        for f in [0.55, 0.7, 0.9, 0.99] {
            let w = BellDiagonalState::werner(f);
            let (p, out) = distill_step(&w, &w);
            let (fe, pe) = werner_step(f);
            assert!((out.fidelity() - fe).abs() < 1e-14);
            assert!((p - pe).abs() < 1e-14);
        }
    }

    #[test]
    fn already_above_target() {
        let t = distill_to_target(0.9, 0.89).unwrap();
        assert_eq!(t.rounds, 0);
        assert_eq!(t.pairs_consumed, 1);
        assert_eq!(t.expected_pairs, 1.0);
    }

    #[test]
    fn iterates_until_target() {
        let t = distill_to_target(0.51, 0.6).unwrap();
        let mut f = 0.51;
        let mut rounds = 0;
        while f < 0.6 {
            f = werner_step(f).0;
            rounds += 1;
        }
        assert_eq!(t.rounds, rounds);
        assert_eq!(t.pairs_consumed, 1 << rounds);
        assert!(t.final_fidelity >= 0.6);
        assert!(t.expected_pairs >= t.pairs_consumed as f64);
    }

    #[test]
    fn boundary_is_not_distillable() {
        assert!(matches!(distill_to_target(0.5, 0.9), Err(EntanglementError::NotDistillable(_))));
        assert!(matches!(distill_to_target(0.7, 1.0), Err(EntanglementError::InvalidTarget(_))));
    }
}
