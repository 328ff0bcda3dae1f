use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    adapt_phi, angle_octant, client_correct, client_delta_octant, client_prepare, octant_angle, BfkError, ClientSecrets,
    Flow, MbqcPattern, Server,
};
use crate::graphstates::{brickwork_graph, BrickworkLayout, LayoutKind};
use crate::protocols::{teleport_state, BellResource, NodeId, Purpose, Transcript};
use crate::qsim::{Basis, DenseState, Gate, QsimError, MAX_DENSE_QUBITS};

pub const CLIENT: NodeId = NodeId(0);
pub const SERVER: NodeId = NodeId(1);

/// Independent streams for client secrets, server measurements and the
/// teleportation channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfkSeeds {
    pub client: u64,
    pub server: u64,
    pub channel: u64,
}

impl BfkSeeds {
    pub fn from_master(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BfkSeeds { client: rng.gen(), server: rng.gen(), channel: rng.gen() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteRecord {
    pub x: usize,
    pub y: usize,
    /// Octant index of the transmitted `δ`.
    pub delta: u8,
    pub outcome: u8,
    pub corrected: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlindTranscript {
    pub layout: LayoutKind,
    /// One record per site, in measurement order.
    pub sites: Vec<SiteRecord>,
    pub messages: Transcript,
}

impl BlindTranscript {
    pub fn covert_bits(&self) -> u64 {
        self.messages.covert_bits()
    }

    pub fn bell_pairs_consumed(&self) -> u64 {
        self.messages.bell_pairs_consumed()
    }

    pub fn sites_jsonl(&self) -> String {
        self.sites.iter().map(|s| serde_json::to_string(s).expect("record serialises") + "\n").collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlindRun {
    /// Corrected outcome per vertex.
    pub corrected: Vec<u8>,
    pub transcript: BlindTranscript,
}

fn layout_for(pattern: &MbqcPattern) -> Result<BrickworkLayout, BfkError> {
    let n = pattern.columns * pattern.rows;
    if n > MAX_DENSE_QUBITS {
        return Err(QsimError::CapExceeded { requested: n, cap: MAX_DENSE_QUBITS }.into());
    }
    Ok(brickwork_graph(pattern.columns, pattern.rows)?)
}

fn entangle(mut state: DenseState, layout: &BrickworkLayout) -> Result<DenseState, BfkError> {
    for (u, v) in layout.graph.edges() {
        state.apply_gate(Gate::CZ, &[u, v])?;
    }
    Ok(state)
}

fn octant_bits(k: u8) -> [u8; 3] {
    [(k >> 2) & 1, (k >> 1) & 1, k & 1]
}

/// Run the blind protocol with ideal teleportation pairs. All `φ` must be
/// octant angles.
pub fn run_blind_computation(pattern: &MbqcPattern, seeds: &BfkSeeds) -> Result<BlindRun, BfkError> {
    for &phi in &pattern.phi {
        angle_octant(phi)?;
    }
    let layout = layout_for(pattern)?;
    let flow = Flow::rows(&layout);
    let order = pattern.measurement_order();
    let mut client_rng = ChaCha8Rng::seed_from_u64(seeds.client);
    let mut server_rng = ChaCha8Rng::seed_from_u64(seeds.server);
    let mut channel_rng = ChaCha8Rng::seed_from_u64(seeds.channel);

    let secrets = ClientSecrets::sample(pattern, &mut client_rng);
    let mut messages = Transcript::new();

    // Stage 1: prepare and teleport every site, then entangle at the server.
    let mut received: Vec<Option<DenseState>> = vec![None; order.len()];
    for &v in &order {
        let psi = client_prepare(octant_angle(secrets.theta[v]));
        let pair = BellResource::ideal(CLIENT, SERVER)?;
        let (out, t) = teleport_state(&psi, pair, &mut channel_rng)?;
        messages.extend(t);
        received[v] = Some(out.to_pure()?);
    }
    let mut joint: Option<DenseState> = None;
    for q in received.into_iter().map(|q| q.expect("every site teleported")) {
        joint = Some(match joint {
            None => q,
            Some(j) => j.tensor(&q)?,
        });
    }
    let mut server = Server::new(entangle(joint.expect("non-empty layout"), &layout)?);

    // Stage 2: adaptive measurements.
    let mut corrected: Vec<Option<u8>> = vec![None; order.len()];
    let mut sites = Vec::with_capacity(order.len());
    for &v in &order {
        let phi_prime = angle_octant(adapt_phi(pattern.phi[v], v, &flow, &corrected)?)?;
        let delta = client_delta_octant(phi_prime, secrets.theta[v], secrets.r[v]);
        messages.send(CLIENT, SERVER, &octant_bits(delta), Purpose::BlindAngle);
        let outcome = server.measure(v, octant_angle(delta), &mut server_rng)?;
        messages.send(SERVER, CLIENT, &[outcome], Purpose::BlindOutcome);
        let s = client_correct(outcome, secrets.r[v]);
        corrected[v] = Some(s);
        let (row, col) = layout.coords(v);
        sites.push(SiteRecord { x: col + 1, y: row + 1, delta, outcome, corrected: s });
    }

    Ok(BlindRun {
        corrected: corrected.into_iter().map(|s| s.expect("all measured")).collect(),
        transcript: BlindTranscript { layout: layout.layout, sites, messages },
    })
}

fn direct(pattern: &MbqcPattern, server_rng: &mut ChaCha8Rng, r: Option<&[u8]>) -> Result<Vec<u8>, BfkError> {
    let layout = layout_for(pattern)?;
    let flow = Flow::rows(&layout);
    let mut state = entangle(DenseState::plus(layout.graph.vertex_count())?, &layout)?;
    let mut outcomes: Vec<Option<u8>> = vec![None; pattern.phi.len()];
    for v in pattern.measurement_order() {
        let basis = Basis::Equatorial(adapt_phi(pattern.phi[v], v, &flow, &outcomes)?);
        let s = match r {
            None => state.measure(v, basis, server_rng)?.outcome,
            Some(r) => {
                let p0 = state.probability_zero(v, basis)?;
                let p_eq_r = if r[v] == 0 { p0 } else { 1.0 - p0 };
                let u: f64 = server_rng.gen();
                let s = (u >= p_eq_r) as u8 ^ r[v];
                state.project(v, basis, s)?;
                s
            }
        };
        outcomes[v] = Some(s);
    }
    Ok(outcomes.into_iter().map(|s| s.expect("all measured")).collect())
}

/// Non-blind MBQC of the same pattern with plain Born sampling. Accepts
/// arbitrary angles.
pub fn run_direct_mbqc<R: Rng + ?Sized>(pattern: &MbqcPattern, rng: &mut R) -> Result<Vec<u8>, BfkError> {
    let mut inner = ChaCha8Rng::seed_from_u64(rng.gen());
    direct(pattern, &mut inner, None)
}

/// Non-blind MBQC coupled to a blind run with the same seeds: it replays the
/// client's `r` stream and the server's uniforms, and samples each outcome
/// `s` as `[u >= P(s = r)] ⊕ r`. Each shot is an exact sample of the direct
/// distribution; equal probabilities give shot-by-shot agreement.
pub fn run_direct_paired(pattern: &MbqcPattern, seeds: &BfkSeeds) -> Result<Vec<u8>, BfkError> {
    let mut client_rng = ChaCha8Rng::seed_from_u64(seeds.client);
    let secrets = ClientSecrets::sample(pattern, &mut client_rng);
    let mut server_rng = ChaCha8Rng::seed_from_u64(seeds.server);
    direct(pattern, &mut server_rng, Some(&secrets.r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfk::{DELTA_BITS, OUTCOME_BITS, TELEPORT_BITS_PER_SITE};

    #[test]
    fn zeros_on_path_match_paired_direct() {
        let pattern = MbqcPattern::zeros(5, 1).unwrap();
        for seed in 0..20 {
            let seeds = BfkSeeds::from_master(seed);
            let blind = run_blind_computation(&pattern, &seeds).unwrap();
            assert_eq!(blind.corrected, run_direct_paired(&pattern, &seeds).unwrap());
        }
    }

    #[test]
    fn transcript_accounting_and_order() {
        let pattern = MbqcPattern::from_octant_rows(&[vec![1, 2, 3, 4], vec![5, 6, 7, 0]]).unwrap();
        let run = run_blind_computation(&pattern, &BfkSeeds::from_master(3)).unwrap();
        let sites = pattern.columns * pattern.rows;
        let t = &run.transcript;
        assert_eq!(t.covert_bits(), sites as u64 * (TELEPORT_BITS_PER_SITE + DELTA_BITS + OUTCOME_BITS));
        assert_eq!(t.bell_pairs_consumed(), sites as u64);
        let order: Vec<(usize, usize)> = t.sites.iter().map(|s| (s.x, s.y)).collect();
        assert_eq!(order, vec![(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 2)]);
        assert_eq!(t.layout, LayoutKind::Fallback);
    }

    #[test]
    fn replayable() {
        let pattern = MbqcPattern::from_octant_rows(&[vec![1, 3, 5], vec![2, 2, 7]]).unwrap();
        let seeds = BfkSeeds::from_master(11);
        assert_eq!(run_blind_computation(&pattern, &seeds).unwrap(), run_blind_computation(&pattern, &seeds).unwrap());
    }

    #[test]
    fn rejects_non_octant_and_oversize() {
        let pattern = MbqcPattern::new(2, 1, vec![0.1, 0.0]).unwrap();
        assert!(matches!(run_blind_computation(&pattern, &BfkSeeds::from_master(0)), Err(BfkError::NonOctantAngle(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(run_direct_mbqc(&pattern, &mut rng).is_ok());
        let big = MbqcPattern::zeros(5, 5).unwrap();
        assert!(run_blind_computation(&big, &BfkSeeds::from_master(0)).is_err());
    }
}
