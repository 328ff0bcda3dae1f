use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BellResource, NodeId, ProtocolError, Purpose, Transcript};
use crate::qsim::{Basis, DenseState, DensityMatrix, Gate, Pauli};

const Z_BASIS: Basis = Basis::Pauli(Pauli::Z);
const X_BASIS: Basis = Basis::Pauli(Pauli::X);

fn single_qubit(state: &DenseState, what: &str) -> Result<(), ProtocolError> {
    if state.qubit_count() != 1 {
        return Err(ProtocolError::InvalidInput(format!("{what} must be a single qubit, got {}", state.qubit_count())));
    }
    Ok(())
}

fn apply_if(reg: &mut DensityMatrix, bit: u8, gate: Gate, q: usize) -> Result<(), ProtocolError> {
    if bit == 1 {
        reg.apply_gate(gate, &[q])?;
    }
    Ok(())
}

/// Teleport `input` from `resource.endpoints().0` to `.1`. Returns the
/// receiver's qubit.
pub fn teleport_state<R: Rng + ?Sized>(
    input: &DenseState,
    resource: BellResource,
    rng: &mut R,
) -> Result<(DensityMatrix, Transcript), ProtocolError> {
    single_qubit(input, "input")?;
    let (sender, receiver) = resource.endpoints();
    // [input, sender half, receiver half]
    let mut reg = DensityMatrix::from_pure(input)?.tensor(&resource.density())?;
    reg.apply_gate(Gate::CNOT, &[0, 1])?;
    reg.apply_gate(Gate::H, &[0])?;
    let m1 = reg.measure(0, Z_BASIS, rng)?.outcome;
    let m2 = reg.measure(1, Z_BASIS, rng)?.outcome;

    let mut t = Transcript::new();
    t.consume_pairs(1);
    t.send(sender, receiver, &[m1, m2], Purpose::TeleportCorrection);

    apply_if(&mut reg, m2, Gate::X, 2)?;
    apply_if(&mut reg, m1, Gate::Z, 2)?;
    Ok((reg.partial_trace(&[2])?, t))
}

/// Nonlocal CNOT from a control held at `resource.endpoints().0` onto a
/// target held at `.1`, consuming one pair and one bit each way.
pub fn teleport_cnot<R: Rng + ?Sized>(
    control: &DenseState,
    target: &DenseState,
    resource: BellResource,
    rng: &mut R,
) -> Result<(DensityMatrix, Transcript), ProtocolError> {
    single_qubit(control, "control")?;
    single_qubit(target, "target")?;
    teleport_cnot_joint(&control.tensor(target)?, resource, rng)
}

/// As [`teleport_cnot`] for an arbitrary (possibly entangled) two-qubit
/// input, control first.
pub fn teleport_cnot_joint<R: Rng + ?Sized>(
    input: &DenseState,
    resource: BellResource,
    rng: &mut R,
) -> Result<(DensityMatrix, Transcript), ProtocolError> {
    if input.qubit_count() != 2 {
        return Err(ProtocolError::InvalidInput(format!("joint input must have 2 qubits, got {}", input.qubit_count())));
    }
    let (alice, bob) = resource.endpoints();
    // [control, target, alice half, bob half]
    let mut reg = DensityMatrix::from_pure(input)?.tensor(&resource.density())?;
    let (c, tq, a, b) = (0, 1, 2, 3);
    let mut t = Transcript::new();
    t.consume_pairs(1);

    reg.apply_gate(Gate::CNOT, &[c, a])?;
    let m1 = reg.measure(a, Z_BASIS, rng)?.outcome;
    t.send(alice, bob, &[m1], Purpose::GateTeleport);
    apply_if(&mut reg, m1, Gate::X, b)?;

    reg.apply_gate(Gate::CNOT, &[b, tq])?;
    let m2 = reg.measure(b, X_BASIS, rng)?.outcome;
    t.send(bob, alice, &[m2], Purpose::GateTeleport);
    apply_if(&mut reg, m2, Gate::Z, c)?;

    Ok((reg.partial_trace(&[c, tq])?, t))
}

/// One-bit teleportation primitives, named by the correction they need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneBitKind {
    /// Ancilla `|0>`, CNOT input→ancilla, X-measure the input, correct `Z^m`.
    ZPrimitive,
    /// Ancilla `|+>`, CNOT ancilla→input, Z-measure the input, correct `X^m`.
    XPrimitive,
}

impl OneBitKind {
    pub fn ancilla(self) -> DenseState {
        match self {
            OneBitKind::ZPrimitive => DenseState::zero(1).expect("one qubit"),
            OneBitKind::XPrimitive => DenseState::plus(1).expect("one qubit"),
        }
    }
}

/// Move `input` from `from` onto a fresh ancilla held by `to` with one bit
/// of classical communication and no Bell pair. Returns the ancilla.
pub fn one_bit_teleport<R: Rng + ?Sized>(
    kind: OneBitKind,
    input: &DenseState,
    from: NodeId,
    to: NodeId,
    rng: &mut R,
) -> Result<(DenseState, Transcript), ProtocolError> {
    single_qubit(input, "input")?;
    let mut reg = input.tensor(&kind.ancilla())?;
    let (basis, correction) = match kind {
        OneBitKind::ZPrimitive => {
            reg.apply_gate(Gate::CNOT, &[0, 1])?;
            (X_BASIS, Gate::Z)
        }
        OneBitKind::XPrimitive => {
            reg.apply_gate(Gate::CNOT, &[1, 0])?;
            (Z_BASIS, Gate::X)
        }
    };
    let m = reg.measure(0, basis, rng)?.outcome;
    let mut t = Transcript::new();
    t.send(from, to, &[m], Purpose::OneBitCorrection);
    if m == 1 {
        reg.apply_gate(correction, &[1])?;
    }
    Ok((reg.remove_qubit(0)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::Provenance;
    use crate::qsim::fidelity;
    use num_complex::Complex64 as C;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_qubit(rng: &mut ChaCha8Rng) -> DenseState {
        DenseState::qubit(C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5), C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .unwrap()
    }

    fn pair() -> BellResource {
        BellResource::ideal(NodeId(0), NodeId(1)).unwrap()
    }

    #[test]
    fn ideal_teleport_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let psi = random_qubit(&mut rng);
            let (out, t) = teleport_state(&psi, pair(), &mut rng).unwrap();
            assert!((fidelity(&psi, &out).unwrap() - 1.0).abs() < 1e-10);
            assert_eq!((t.covert_bits(), t.bell_pairs_consumed()), (2, 1));
        }
    }

    #[test]
    fn werner_teleport_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = 0.85;
        for _ in 0..10 {
            let psi = random_qubit(&mut rng);
            let r = BellResource::werner(f, Provenance::Distilled, NodeId(0), NodeId(1)).unwrap();
            let (out, _) = teleport_state(&psi, r, &mut rng).unwrap();
            assert!((fidelity(&psi, &out).unwrap() - 0.9).abs() < 1e-10);
        }
    }

    #[test]
    fn cnot_truth_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let one = DenseState::qubit(C::new(0.0, 0.0), C::new(1.0, 0.0)).unwrap();
        let zero = DenseState::zero(1).unwrap();
        for _ in 0..8 {
            let (out, t) = teleport_cnot(&one, &zero, pair(), &mut rng).unwrap();
            assert!((out.entry(3, 3).re - 1.0).abs() < 1e-12);
            assert_eq!(t.covert_bits(), 2);

            let (out, _) = teleport_cnot(&DenseState::plus(1).unwrap(), &zero, pair(), &mut rng).unwrap();
            let mut bell = DenseState::zero(2).unwrap();
            bell.apply_gate(Gate::H, &[0]).unwrap();
            bell.apply_gate(Gate::CNOT, &[0, 1]).unwrap();
            assert!((fidelity(&bell, &out).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_bit_primitives() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in [OneBitKind::ZPrimitive, OneBitKind::XPrimitive] {
            for _ in 0..20 {
                let psi = random_qubit(&mut rng);
                let (out, t) = one_bit_teleport(kind, &psi, NodeId(0), NodeId(1), &mut rng).unwrap();
                assert!((fidelity(&psi, &out).unwrap() - 1.0).abs() < 1e-10);
                assert_eq!((t.covert_bits(), t.bell_pairs_consumed()), (1, 0));
            }
        }
    }

    #[test]
    fn x_primitive_on_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let zero = DenseState::zero(1).unwrap();
        let (out, _) = one_bit_teleport(OneBitKind::XPrimitive, &zero, NodeId(0), NodeId(1), &mut rng).unwrap();
        assert!((out.amplitude(0).norm() - 1.0).abs() < 1e-12);
    }
}
