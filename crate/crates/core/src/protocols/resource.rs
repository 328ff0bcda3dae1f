use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::entanglement::{singlet_fraction_with, DensityOperator2Q, SingletFractionOptions};
use crate::qsim::{fidelity, DenseState, DensityMatrix, QsimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    VacuumExtracted,
    Distilled,
    Ideal,
    Swapped,
}

/// A two-qubit resource shared between `endpoints.0` (first qubit) and
/// `endpoints.1` (second qubit).
#[derive(Debug, Clone, PartialEq)]
pub struct BellResource {
    state: DensityOperator2Q,
    fidelity: f64,
    provenance: Provenance,
    endpoints: (NodeId, NodeId),
}

fn check_endpoints(a: NodeId, b: NodeId) -> Result<(), ProtocolError> {
    if a == b {
        return Err(ProtocolError::EndpointMismatch(format!("both ends of a pair sit at {a}")));
    }
    Ok(())
}

impl BellResource {
    pub fn ideal(a: NodeId, b: NodeId) -> Result<Self, ProtocolError> {
        check_endpoints(a, b)?;
        Ok(BellResource { state: DensityOperator2Q::bell(0), fidelity: 1.0, provenance: Provenance::Ideal, endpoints: (a, b) })
    }

    pub fn werner(f: f64, provenance: Provenance, a: NodeId, b: NodeId) -> Result<Self, ProtocolError> {
        check_endpoints(a, b)?;
        if !(0.0..=1.0).contains(&f) {
            return Err(ProtocolError::InvalidInput(format!("Werner fidelity {f} outside [0, 1]")));
        }
        Ok(BellResource { state: DensityOperator2Q::werner(f), fidelity: f, provenance, endpoints: (a, b) })
    }

    /// Wrap an arbitrary two-qubit state. A local unitary on the second
    /// qubit rotates the closest maximally entangled state onto `Φ⁺`, so
    /// the stored overlap with `Φ⁺` equals the singlet fraction.
    pub fn from_state(
        state: DensityOperator2Q,
        provenance: Provenance,
        a: NodeId,
        b: NodeId,
    ) -> Result<Self, ProtocolError> {
        check_endpoints(a, b)?;
        let direct = state.bell_fidelity();
        let opts = SingletFractionOptions { spread_tol: f64::INFINITY, ..Default::default() };
        let best = singlet_fraction_with(&state, &opts)?;
        let state = if best.value > direct + 1e-12 {
            state.local_unitary(&nalgebra::Matrix2::identity(), &best.unitary.adjoint())
        } else {
            state
        };
        let fidelity = state.bell_fidelity();
        Ok(BellResource { state, fidelity, provenance, endpoints: (a, b) })
    }

    pub fn state(&self) -> &DensityOperator2Q {
        &self.state
    }

    /// Singlet fraction of the stored state.
    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        self.endpoints
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.endpoints.0 == node || self.endpoints.1 == node
    }

    /// The same pair with its endpoints (and qubits) exchanged.
    pub fn reversed(self) -> Self {
        let m = DensityMatrix::from_two_qubit(&self.state)
            .partial_trace(&[1, 0])
            .and_then(|m| m.to_two_qubit())
            .expect("qubit swap of a valid two-qubit state");
        BellResource { state: m, endpoints: (self.endpoints.1, self.endpoints.0), ..self }
    }

    pub(crate) fn density(&self) -> DensityMatrix {
        DensityMatrix::from_two_qubit(&self.state)
    }
}

/// A `k`-party state with qubit `i` held by `parties[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzResource {
    pub state: DensityMatrix,
    pub parties: Vec<NodeId>,
}

impl GhzResource {
    /// Overlap with `(|0…0> + |1…1>)/√2`.
    pub fn ghz_fidelity(&self) -> Result<f64, QsimError> {
        let k = self.parties.len();
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << k];
        amps[0] = num_complex::Complex64::new(1.0, 0.0);
        amps[(1 << k) - 1] = num_complex::Complex64::new(1.0, 0.0);
        let ghz = DenseState::from_unnormalised(amps)?;
        fidelity(&ghz, &self.state)
    }
}

/// Per-link stock of Bell pairs, keyed by the unordered endpoint pair.
#[derive(Debug, Clone, Default)]
pub struct ResourcePool {
    links: BTreeMap<(NodeId, NodeId), VecDeque<BellResource>>,
}

fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ResourcePool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, r: BellResource) {
        let (a, b) = r.endpoints();
        self.links.entry(key(a, b)).or_default().push_back(r);
    }

    pub fn remaining(&self, a: NodeId, b: NodeId) -> usize {
        self.links.get(&key(a, b)).map_or(0, VecDeque::len)
    }

    /// Next pair on the link, oriented so its first qubit sits at `a`.
    pub fn take(&mut self, a: NodeId, b: NodeId) -> Result<BellResource, ProtocolError> {
        let r = self
            .links
            .get_mut(&key(a, b))
            .and_then(VecDeque::pop_front)
            .ok_or(ProtocolError::ResourceDepleted(a, b))?;
        Ok(if r.endpoints().0 == a { r } else { r.reversed() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{singlet_fraction, DensityOperator2Q};

    #[test]
    fn from_state_aligns_to_phi_plus() {
        // Ψ⁻ has zero Φ⁺ overlap but unit singlet fraction.
        let r = BellResource::from_state(DensityOperator2Q::bell(3), Provenance::Distilled, NodeId(0), NodeId(1)).unwrap();
        assert!((r.fidelity() - 1.0).abs() < 1e-8);
        assert!((r.fidelity() - singlet_fraction(r.state()).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn pool_depletes_and_orients() {
        let mut pool = ResourcePool::new();
        pool.add(BellResource::werner(0.9, Provenance::Distilled, NodeId(2), NodeId(1)).unwrap());
        assert_eq!(pool.remaining(NodeId(1), NodeId(2)), 1);
        let r = pool.take(NodeId(1), NodeId(2)).unwrap();
        assert_eq!(r.endpoints(), (NodeId(1), NodeId(2)));
        assert_eq!(pool.take(NodeId(1), NodeId(2)), Err(ProtocolError::ResourceDepleted(NodeId(1), NodeId(2))));
    }

    #[test]
    fn rejects_loops() {
        assert!(matches!(BellResource::ideal(NodeId(3), NodeId(3)), Err(ProtocolError::EndpointMismatch(_))));
    }
}
