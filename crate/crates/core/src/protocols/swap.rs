use std::collections::BTreeSet;

use rand::Rng;

use super::{BellResource, GhzResource, NodeId, ProtocolError, Provenance, Purpose, Transcript};
use crate::qsim::{Basis, DensityMatrix, Gate, Pauli, MAX_DENSITY_QUBITS};

const Z_BASIS: Basis = Basis::Pauli(Pauli::Z);

/// Orient `a` as (A, M) and `b` as (M, B).
fn orient(a: BellResource, b: BellResource) -> Result<(BellResource, BellResource), ProtocolError> {
    let (a0, a1) = a.endpoints();
    let (b0, b1) = b.endpoints();
    let (a, b) = if a1 == b0 {
        (a, b)
    } else if a1 == b1 {
        (a, b.reversed())
    } else if a0 == b0 {
        (a.reversed(), b)
    } else if a0 == b1 {
        (a.reversed(), b.reversed())
    } else {
        return Err(ProtocolError::EndpointMismatch(format!("pairs {a0}-{a1} and {b0}-{b1} share no node")));
    };
    if a.endpoints().0 == b.endpoints().1 {
        return Err(ProtocolError::EndpointMismatch(format!("swap would join {} to itself", a.endpoints().0)));
    }
    Ok((a, b))
}

/// Bell measurement at the shared node M, two bits to B, Pauli correction at
/// B. Returns the A–B pair.
pub fn entanglement_swap<R: Rng + ?Sized>(
    a: BellResource,
    b: BellResource,
    rng: &mut R,
) -> Result<(BellResource, Transcript), ProtocolError> {
    let (a, b) = orient(a, b)?;
    let (left, middle) = a.endpoints();
    let right = b.endpoints().1;
    let provenance = if a.provenance() == Provenance::Ideal && b.provenance() == Provenance::Ideal {
        Provenance::Ideal
    } else {
        Provenance::Swapped
    };

    // [A, M₁, M₂, B]
    let mut reg = a.density().tensor(&b.density())?;
    reg.apply_gate(Gate::CNOT, &[1, 2])?;
    reg.apply_gate(Gate::H, &[1])?;
    let m1 = reg.measure(1, Z_BASIS, rng)?.outcome;
    let m2 = reg.measure(2, Z_BASIS, rng)?.outcome;

    let mut t = Transcript::new();
    t.consume_pairs(2);
    t.send(middle, right, &[m1, m2], Purpose::SwapCorrection);
    if m2 == 1 {
        reg.apply_gate(Gate::X, &[3])?;
    }
    if m1 == 1 {
        reg.apply_gate(Gate::Z, &[3])?;
    }
    let out = reg.partial_trace(&[0, 3])?.to_two_qubit()?;
    Ok((BellResource::from_state(out, provenance, left, right)?, t))
}

/// Grow a GHZ state over `parties` from `k − 1` pairs forming a tree.
///
/// The first pair seeds a two-party GHZ. Each further pair `(h, new)` with
/// `h` already holding a GHZ qubit is fused by CNOT from `h`'s GHZ qubit onto
/// its pair half, a Z measurement of that half, and one bit to `new` for an
/// X correction.
pub fn build_ghz_from_bell<R: Rng + ?Sized>(
    parties: &[NodeId],
    resources: Vec<BellResource>,
    rng: &mut R,
) -> Result<(GhzResource, Transcript), ProtocolError> {
    let k = parties.len();
    if k < 2 {
        return Err(ProtocolError::TopologyError(format!("need at least 2 parties, got {k}")));
    }
    let unique: BTreeSet<NodeId> = parties.iter().copied().collect();
    if unique.len() != k {
        return Err(ProtocolError::TopologyError("duplicate party".into()));
    }
    if resources.len() != k - 1 {
        return Err(ProtocolError::TopologyError(format!("{k} parties need {} pairs, got {}", k - 1, resources.len())));
    }
    if k + 1 > MAX_DENSITY_QUBITS {
        return Err(ProtocolError::InvalidInput(format!("{k} parties exceed the simulator cap")));
    }
    for r in &resources {
        let (a, b) = r.endpoints();
        if !unique.contains(&a) || !unique.contains(&b) {
            return Err(ProtocolError::TopologyError(format!("pair {a}-{b} reaches outside the party set")));
        }
    }

    let mut pending = resources;
    let mut t = Transcript::new();
    let first = pending.remove(0);
    let (a, b) = first.endpoints();
    let mut holders = vec![a, b];
    let mut reg = first.density();
    t.consume_pairs(1);

    while !pending.is_empty() {
        let pos = pending.iter().position(|r| {
            let (x, y) = r.endpoints();
            holders.contains(&x) != holders.contains(&y)
        });
        let Some(pos) = pos else {
            return Err(ProtocolError::TopologyError("pairs do not form a tree over the parties".into()));
        };
        let mut r = pending.remove(pos);
        if !holders.contains(&r.endpoints().0) {
            r = r.reversed();
        }
        let (h, new) = r.endpoints();
        let hq = holders.iter().position(|&p| p == h).expect("holder present");
        let m = holders.len();
        reg = reg.tensor(&r.density())?;
        reg.apply_gate(Gate::CNOT, &[hq, m])?;
        let s = reg.measure(m, Z_BASIS, rng)?.outcome;
        t.consume_pairs(1);
        t.send(h, new, &[s], Purpose::GhzMerge);
        if s == 1 {
            reg.apply_gate(Gate::X, &[m + 1])?;
        }
        let keep: Vec<usize> = (0..m).chain([m + 1]).collect();
        reg = reg.partial_trace(&keep)?;
        holders.push(new);
    }

    if holders.iter().collect::<BTreeSet<_>>() != unique.iter().collect::<BTreeSet<_>>() {
        return Err(ProtocolError::TopologyError("pairs do not cover every party".into()));
    }
    // Reorder qubits to follow `parties`.
    let order: Vec<usize> = parties.iter().map(|p| holders.iter().position(|h| h == p).expect("covered")).collect();
    let state: DensityMatrix = reg.partial_trace(&order)?;
    Ok((GhzResource { state, parties: parties.to_vec() }, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ideal(a: u32, b: u32) -> BellResource {
        BellResource::ideal(NodeId(a), NodeId(b)).unwrap()
    }

    #[test]
    fn swap_werner_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (f1, f2) in [(0.9, 0.8), (0.6, 0.95), (1.0, 0.7)] {
            let a = BellResource::werner(f1, Provenance::Distilled, NodeId(0), NodeId(1)).unwrap();
            let b = BellResource::werner(f2, Provenance::Distilled, NodeId(1), NodeId(2)).unwrap();
            let (out, t) = entanglement_swap(a, b, &mut rng).unwrap();
            let expected = f1 * f2 + (1.0 - f1) * (1.0 - f2) / 3.0;
            assert!((out.fidelity() - expected).abs() < 1e-8);
            assert_eq!(out.endpoints(), (NodeId(0), NodeId(2)));
            assert_eq!(out.provenance(), Provenance::Swapped);
            assert_eq!(t.covert_bits(), 2);
        }
    }

    #[test]
    fn swap_reorients_and_rejects() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (out, _) = entanglement_swap(ideal(1, 0), ideal(2, 1), &mut rng).unwrap();
        assert_eq!(out.endpoints(), (NodeId(0), NodeId(2)));
        assert!(matches!(entanglement_swap(ideal(0, 1), ideal(2, 3), &mut rng), Err(ProtocolError::EndpointMismatch(_))));
        assert!(matches!(entanglement_swap(ideal(0, 1), ideal(1, 0), &mut rng), Err(ProtocolError::EndpointMismatch(_))));
    }

    #[test]
    fn ghz_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (g, t) = build_ghz_from_bell(&[NodeId(0), NodeId(1)], vec![ideal(0, 1)], &mut rng).unwrap();
        assert!((g.ghz_fidelity().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(t.covert_bits(), 0);

        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let parties: Vec<NodeId> = (0..4).map(NodeId).collect();
            let star = vec![ideal(0, 1), ideal(2, 0), ideal(0, 3)];
            let (g, t) = build_ghz_from_bell(&parties, star, &mut rng).unwrap();
            assert!((g.ghz_fidelity().unwrap() - 1.0).abs() < 1e-10);
            assert_eq!((t.covert_bits(), t.bell_pairs_consumed()), (2, 3));
        }
    }

    #[test]
    fn ghz_topology_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let parties: Vec<NodeId> = (0..4).map(NodeId).collect();
        let disconnected = vec![ideal(0, 1), ideal(2, 3), ideal(1, 0)];
        assert!(matches!(build_ghz_from_bell(&parties, disconnected, &mut rng), Err(ProtocolError::TopologyError(_))));
        assert!(matches!(build_ghz_from_bell(&parties, vec![ideal(0, 1)], &mut rng), Err(ProtocolError::TopologyError(_))));
        let outside = vec![ideal(0, 1), ideal(1, 2), ideal(2, 9)];
        assert!(matches!(build_ghz_from_bell(&parties, outside, &mut rng), Err(ProtocolError::TopologyError(_))));
    }
}
