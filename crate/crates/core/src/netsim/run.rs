use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Link, LinkSource, NetError, Topology};
use crate::entanglement::{distill_to_target, twirl_to_bell_diagonal, EntanglementError};
use crate::protocols::{entanglement_swap, teleport_state, BellResource, Message, NodeId, Provenance, Transcript};
use crate::qsim::{DensityMatrix, DenseState};
use crate::vacuum::{amplified_state, correlation_integrals, DEFAULT_TOL};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvisionCost {
    /// Singlet fraction of one raw pair before distillation.
    pub raw_fidelity: f64,
    pub distillation_rounds: u32,
    /// Raw pairs per delivered pair when every round succeeds.
    pub pairs_worst_case: u64,
    pub pairs_expected: f64,
    pub final_fidelity: f64,
}

fn distil(raw: f64, target: Option<f64>, a: NodeId, b: NodeId) -> Result<ProvisionCost, NetError> {
    let trivial = ProvisionCost {
        raw_fidelity: raw,
        distillation_rounds: 0,
        pairs_worst_case: 1,
        pairs_expected: 1.0,
        final_fidelity: raw,
    };
    let Some(target) = target else { return Ok(trivial) };
    if raw >= target {
        return Ok(trivial);
    }
    match distill_to_target(raw, target) {
        Ok(trace) => Ok(ProvisionCost {
            raw_fidelity: raw,
            distillation_rounds: trace.rounds,
            pairs_worst_case: trace.pairs_consumed,
            pairs_expected: trace.expected_pairs,
            final_fidelity: trace.final_fidelity,
        }),
        Err(EntanglementError::NotDistillable(f)) => Err(NetError::NotDistillable(a, b, f)),
        Err(e) => Err(e.into()),
    }
}

/// Deliver one pair on `link`, oriented `link.a → link.b`. `target`
/// overrides the link's own target fidelity.
pub fn provision_link(link: &Link, target: Option<f64>, tol: f64) -> Result<(BellResource, ProvisionCost), NetError> {
    let target = target.or(link.target_fidelity);
    let (a, b) = (link.a, link.b);
    match &link.source {
        LinkSource::Ideal => Ok((BellResource::ideal(a, b)?, distil(1.0, None, a, b)?)),
        LinkSource::Werner { fidelity } => {
            if target.is_some() && *fidelity <= 0.5 {
                return Err(NetError::NotDistillable(a, b, *fidelity));
            }
            let cost = distil(*fidelity, target, a, b)?;
            Ok((BellResource::werner(cost.final_fidelity, Provenance::Distilled, a, b)?, cost))
        }
        LinkSource::Vacuum { detector } => {
            detector.validate()?;
            let integrals = correlation_integrals(detector, tol)?;
            let rho = amplified_state(&integrals, detector.iterations, detector.coupling_sq)?
                .positive_completion()
                .to_density()?
                .clamp_positive()?;
            let aligned = BellResource::from_state(rho, Provenance::VacuumExtracted, a, b)?;
            let raw = twirl_to_bell_diagonal(aligned.state()).fidelity();
            if raw <= 0.5 {
                return Err(NetError::NotDistillable(a, b, raw));
            }
            let cost = distil(raw, target, a, b)?;
            Ok((BellResource::werner(cost.final_fidelity, Provenance::Distilled, a, b)?, cost))
        }
    }
}

/// Hop-count shortest path. Ties go to the smallest next node id.
pub fn shortest_path(topology: &Topology, src: NodeId, dst: NodeId) -> Result<Vec<NodeId>, NetError> {
    for id in [src, dst] {
        if !topology.contains(id) {
            return Err(NetError::UnknownNode(id));
        }
    }
    let dist = topology.distances(dst);
    let Some(&hops) = dist.get(&src) else { return Err(NetError::NoPath(src, dst)) };
    let adj = topology.adjacency();
    let mut path = vec![src];
    let mut cur = src;
    for remaining in (0..hops).rev() {
        cur = *adj[&cur].iter().find(|v| dist.get(v) == Some(&remaining)).expect("BFS layer has a predecessor");
        path.push(cur);
    }
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub a: NodeId,
    pub b: NodeId,
    pub source: String,
    #[serde(flatten)]
    pub cost: ProvisionCost,
    pub covert_bits: u64,
    pub covert_bit_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub from: NodeId,
    pub to: NodeId,
    pub covert_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetViolation {
    pub a: NodeId,
    pub b: NodeId,
    pub used: u64,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub src: NodeId,
    pub dst: NodeId,
    pub path: Vec<NodeId>,
    pub links: Vec<LinkReport>,
    pub protocols: Vec<ProtocolReport>,
    /// Link-level pairs delivered to the run, one per hop.
    pub bell_pairs_consumed: u64,
    pub covert_bits: u64,
    /// Fidelity of the end-to-end pair before teleportation.
    pub end_to_end_pair_fidelity: f64,
    /// `<ψ|ρ_out|ψ>` for the teleported input.
    pub output_fidelity: f64,
    pub budget_violations: Vec<BudgetViolation>,
    pub messages: Vec<Message>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn budget_exceeded(&self) -> bool {
        !self.budget_violations.is_empty()
    }
}

fn source_name(s: &LinkSource) -> &'static str {
    match s {
        LinkSource::Ideal => "ideal",
        LinkSource::Werner { .. } => "werner",
        LinkSource::Vacuum { .. } => "vacuum",
    }
}

/// Provision every hop, swap from the source side towards `dst`, then
/// teleport `input`. Each message is charged to every link between its
/// sender and receiver on the path. Budget overruns are reported, not
/// enforced.
pub fn route_and_teleport<R: Rng + ?Sized>(
    src: NodeId,
    dst: NodeId,
    input: &DenseState,
    topology: &Topology,
    rng: &mut R,
) -> Result<(DensityMatrix, RunReport), NetError> {
    topology.validate()?;
    let path = shortest_path(topology, src, dst)?;
    if path.len() < 2 {
        return Err(NetError::InvalidTopology(format!("source and destination coincide at {src}")));
    }
    let position: BTreeMap<NodeId, usize> = path.iter().enumerate().map(|(i, n)| (*n, i)).collect();

    let mut links = Vec::with_capacity(path.len() - 1);
    let mut pairs = Vec::with_capacity(path.len() - 1);
    for hop in path.windows(2) {
        let link = topology.link(hop[0], hop[1]).expect("path follows links");
        let (pair, cost) = provision_link(link, None, DEFAULT_TOL)?;
        let pair = if pair.endpoints().0 == hop[0] { pair } else { pair.reversed() };
        pairs.push(pair);
        links.push(LinkReport {
            a: hop[0],
            b: hop[1],
            source: source_name(&link.source).to_owned(),
            cost,
            covert_bits: 0,
            covert_bit_budget: link.covert_bit_budget,
        });
    }
    let bell_pairs_consumed = pairs.len() as u64;

    let mut transcript = Transcript::new();
    let mut protocols = Vec::new();
    let mut record = |t: Transcript, name: &str, transcript: &mut Transcript, links: &mut [LinkReport]| {
        for m in t.messages() {
            let (i, j) = (position[&m.from], position[&m.to]);
            for l in &mut links[i.min(j)..i.max(j)] {
                l.covert_bits += m.bits.len() as u64;
            }
            protocols.push(ProtocolReport {
                protocol: name.to_owned(),
                from: m.from,
                to: m.to,
                covert_bits: m.bits.len() as u64,
            });
        }
        transcript.extend(t);
    };

    let mut pairs = pairs.into_iter();
    let mut end_to_end = pairs.next().expect("at least one hop");
    for next in pairs {
        let (joined, t) = entanglement_swap(end_to_end, next, rng)?;
        record(t, "swap", &mut transcript, &mut links);
        end_to_end = joined;
    }
    let end_to_end_pair_fidelity = end_to_end.fidelity();
    let (output, t) = teleport_state(input, end_to_end, rng)?;
    record(t, "teleport", &mut transcript, &mut links);

    let budget_violations = links
        .iter()
        .filter(|l| l.covert_bits > l.covert_bit_budget)
        .map(|l| BudgetViolation { a: l.a, b: l.b, used: l.covert_bits, budget: l.covert_bit_budget })
        .collect();
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        src,
        dst,
        path,
        links,
        protocols,
        bell_pairs_consumed,
        covert_bits: transcript.covert_bits(),
        end_to_end_pair_fidelity,
        output_fidelity: output.expectation_pure(input),
        budget_violations,
        messages: transcript.messages().to_vec(),
    };
    Ok((output, report))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::netsim::Node;
    use crate::vacuum::DetectorConfig;

    fn line(sources: &[LinkSource], budget: u64) -> Topology {
        let nodes = (0..=sources.len() as u32).map(|i| Node { id: NodeId(i), label: format!("n{i}") }).collect();
        let links = sources
            .iter()
            .enumerate()
            .map(|(i, s)| Link {
                a: NodeId(i as u32),
                b: NodeId(i as u32 + 1),
                source: s.clone(),
                target_fidelity: None,
                covert_bit_budget: budget,
            })
            .collect();
        Topology::new(nodes, links).unwrap()
    }

    fn input() -> DenseState {
        DenseState::qubit(num_complex::Complex64::new(0.6, 0.0), num_complex::Complex64::new(0.0, 0.8)).unwrap()
    }

    #[test]
    fn adjacent_ideal() {
        let t = line(&[LinkSource::Ideal], 10);
        let (_, r) = route_and_teleport(NodeId(0), NodeId(1), &input(), &t, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!((r.output_fidelity - 1.0).abs() < 1e-10);
        assert_eq!(r.covert_bits, 2);
        assert_eq!(r.bell_pairs_consumed, 1);
    }

    #[test]
    fn two_hop_ideal_accounting() {
        let t = line(&[LinkSource::Ideal, LinkSource::Ideal], 3);
        let (_, r) = route_and_teleport(NodeId(0), NodeId(2), &input(), &t, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(r.covert_bits, 4);
        assert_eq!(r.bell_pairs_consumed, 2);
        assert_eq!(r.protocols.iter().map(|p| p.covert_bits).sum::<u64>(), r.covert_bits);
        // Link 1-2 carries the swap bits and the teleport bits.
        assert_eq!(r.links[0].covert_bits, 2);
        assert_eq!(r.links[1].covert_bits, 4);
        assert_eq!(r.budget_violations, vec![BudgetViolation { a: NodeId(1), b: NodeId(2), used: 4, budget: 3 }]);
        assert!((r.output_fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn three_hop_werner_composition() {
        let fs = [0.9, 0.85, 0.95];
        let t = line(&fs.map(|fidelity| LinkSource::Werner { fidelity }), 100);
        let (_, r) = route_and_teleport(NodeId(0), NodeId(3), &input(), &t, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let compose = |f1: f64, f2: f64| f1 * f2 + (1.0 - f1) * (1.0 - f2) / 3.0;
        let f = compose(compose(fs[0], fs[1]), fs[2]);
        assert!((r.end_to_end_pair_fidelity - f).abs() < 1e-9);
        assert!((r.output_fidelity - (2.0 * f + 1.0) / 3.0).abs() < 1e-9);
        assert_eq!(r.covert_bits, 2 * (2 + 1));
    }

    #[test]
    fn reports_are_byte_identical() {
        let t = line(&[LinkSource::Werner { fidelity: 0.8 }, LinkSource::Ideal], 100);
        let run = || {
            route_and_teleport(NodeId(0), NodeId(2), &input(), &t, &mut ChaCha8Rng::seed_from_u64(9)).unwrap().1.to_json()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn routing_ties_and_failures() {
        // Square 0-1-3, 0-2-3 plus isolated 4.
        let nodes = (0..5).map(|i| Node { id: NodeId(i), label: String::new() }).collect();
        let l = |a, b| Link {
            a: NodeId(a),
            b: NodeId(b),
            source: LinkSource::Ideal,
            target_fidelity: None,
            covert_bit_budget: 0,
        };
        let t = Topology::new(nodes, vec![l(0, 2), l(2, 3), l(0, 1), l(1, 3)]).unwrap();
        assert_eq!(shortest_path(&t, NodeId(0), NodeId(3)).unwrap(), vec![NodeId(0), NodeId(1), NodeId(3)]);
        assert_eq!(shortest_path(&t, NodeId(0), NodeId(4)), Err(NetError::NoPath(NodeId(0), NodeId(4))));
        assert_eq!(shortest_path(&t, NodeId(0), NodeId(9)), Err(NetError::UnknownNode(NodeId(9))));
    }

    #[test]
    fn provisioning_costs() {
        let link = |source, target_fidelity| Link { a: NodeId(0), b: NodeId(1), source, target_fidelity, covert_bit_budget: 0 };
        let (_, c) = provision_link(&link(LinkSource::Werner { fidelity: 0.75 }, None), Some(0.7), DEFAULT_TOL).unwrap();
        assert_eq!((c.distillation_rounds, c.pairs_worst_case), (0, 1));
        let (r, c) = provision_link(&link(LinkSource::Werner { fidelity: 0.75 }, Some(0.99)), None, DEFAULT_TOL).unwrap();
        let trace = distill_to_target(0.75, 0.99).unwrap();
        assert_eq!(c.distillation_rounds, trace.rounds);
        assert_eq!(c.pairs_worst_case, 1 << trace.rounds);
        assert_eq!(r.provenance(), Provenance::Distilled);
        assert!(r.fidelity() >= 0.99);
        assert!(matches!(
            provision_link(&link(LinkSource::Werner { fidelity: 0.5 }, Some(0.9)), None, DEFAULT_TOL),
            Err(NetError::NotDistillable(..))
        ));
    }

    #[test]
    fn far_vacuum_link_is_not_distillable() {
        // At zero gap the vacuum noise J1 dominates any cross term.
        let detector =
            DetectorConfig { coupling_sq: 1e-3, gap: 0.0, width: 1.0, separation: 10.0, iterations: 1 };
        let link = Link { a: NodeId(0), b: NodeId(1), source: LinkSource::Vacuum { detector }, target_fidelity: Some(0.9), covert_bit_budget: 0 };
        assert!(matches!(provision_link(&link, None, DEFAULT_TOL), Err(NetError::NotDistillable(..))));
    }
}
