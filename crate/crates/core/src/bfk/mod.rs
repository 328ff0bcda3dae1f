//! Blind quantum computation on a brickwork layout.
//!
//! The client (Alice) prepares every site as `(|0> + e^{iθ}|1>)/√2` with a
//! secret octant angle `θ`, teleports it to the server (Bob), and then, site
//! by site in column-major order, sends `δ = φ' + θ + πr` and receives a
//! measurement outcome `b`. The corrected outcome is `b ⊕ r`.
//!
//! Sites are addressed by 1-based `(x, y)`: column `x = 1..n`, row `y = 1..m`.
//! Vertex indices follow [`crate::graphstates::BrickworkLayout`].

mod description;
mod run;

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphstates::{BrickworkLayout, GraphError};
use crate::protocols::ProtocolError;
use crate::qsim::{wrap_angle, Basis, DenseState, QsimError};

pub use description::BfkRunDescription;
pub use run::{run_blind_computation, run_direct_mbqc, run_direct_paired, BfkSeeds, BlindRun, BlindTranscript, SiteRecord};

/// Covert bits per site: teleported qubit, δ octant and returned outcome.
pub const TELEPORT_BITS_PER_SITE: u64 = 2;
pub const DELTA_BITS: u64 = 3;
pub const OUTCOME_BITS: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BfkError {
    #[error("site {site} depends on unmeasured site {dependency}")]
    FlowViolation { site: usize, dependency: usize },
    #[error("site {0} was already measured")]
    AlreadyMeasured(usize),
    #[error("angle {0} is not a multiple of π/4")]
    NonOctantAngle(f64),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid run description: {0}")]
    Description(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

pub fn octant_angle(k: u8) -> f64 {
    (k % 8) as f64 * PI / 4.0
}

/// Octant index of an angle that is a multiple of π/4.
pub fn angle_octant(angle: f64) -> Result<u8, BfkError> {
    let k = (wrap_angle(angle) / (PI / 4.0)).round();
    if (wrap_angle(angle) - k * PI / 4.0).abs() > 1e-9 {
        return Err(BfkError::NonOctantAngle(angle));
    }
    Ok((k as u64 % 8) as u8)
}

/// Measurement angles `φ` of the target computation on an `n × m` layout,
/// stored per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct MbqcPattern {
    pub columns: usize,
    pub rows: usize,
    pub phi: Vec<f64>,
}

impl MbqcPattern {
    pub fn new(columns: usize, rows: usize, phi: Vec<f64>) -> Result<Self, BfkError> {
        if columns == 0 || rows == 0 {
            return Err(BfkError::InvalidPattern(format!("empty layout {columns}×{rows}")));
        }
        if phi.len() != columns * rows {
            return Err(BfkError::InvalidPattern(format!("{} angles for {} sites", phi.len(), columns * rows)));
        }
        Ok(MbqcPattern { columns, rows, phi })
    }

    /// `table[y][x]` holds the octant of site `(x + 1, y + 1)`.
    pub fn from_octant_rows(table: &[Vec<u8>]) -> Result<Self, BfkError> {
        let rows = table.len();
        let columns = table.first().map_or(0, Vec::len);
        if table.iter().any(|r| r.len() != columns) {
            return Err(BfkError::InvalidPattern("ragged phi table".into()));
        }
        if let Some(k) = table.iter().flatten().find(|k| **k >= 8) {
            return Err(BfkError::InvalidPattern(format!("octant {k} out of range 0..8")));
        }
        Self::new(columns, rows, table.iter().flatten().map(|k| octant_angle(*k)).collect())
    }

    pub fn zeros(columns: usize, rows: usize) -> Result<Self, BfkError> {
        Self::new(columns, rows, vec![0.0; columns * rows])
    }

    pub fn vertex(&self, x: usize, y: usize) -> usize {
        (y - 1) * self.columns + (x - 1)
    }

    /// Vertices in protocol order: `for x in 1..=n { for y in 1..=m }`.
    pub fn measurement_order(&self) -> Vec<usize> {
        (1..=self.columns).flat_map(|x| (1..=self.rows).map(move |y| (y - 1) * self.columns + (x - 1))).collect()
    }
}

/// Client secrets per vertex: octant `θ`, flip bit `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientSecrets {
    pub theta: Vec<u8>,
    pub r: Vec<u8>,
}

impl ClientSecrets {
    /// Draws `θ` then `r` for each vertex in measurement order.
    pub fn sample<R: Rng + ?Sized>(pattern: &MbqcPattern, rng: &mut R) -> Self {
        let n = pattern.phi.len();
        let mut s = ClientSecrets { theta: vec![0; n], r: vec![0; n] };
        for v in pattern.measurement_order() {
            s.theta[v] = rng.gen_range(0..8);
            s.r[v] = rng.gen_range(0..2);
        }
        s
    }
}

/// `(|0> + e^{iθ}|1>)/√2`.
pub fn client_prepare(theta: f64) -> DenseState {
    DenseState::equatorial(theta)
}

/// `δ = φ' + θ + πr` reduced into `[0, 2π)`.
pub fn client_delta(phi_prime: f64, theta: f64, r: u8) -> f64 {
    wrap_angle(phi_prime + theta + PI * (r & 1) as f64)
}

/// Octant form of [`client_delta`].
pub fn client_delta_octant(phi_prime: u8, theta: u8, r: u8) -> u8 {
    (phi_prime + theta + 4 * (r & 1)) % 8
}

pub fn client_correct(outcome: u8, r: u8) -> u8 {
    (outcome ^ r) & 1
}

/// Counts of each `δ` octant over all 16 `(θ, r)` pairs at fixed `φ'`.
pub fn delta_histogram(phi_prime: u8) -> [u32; 8] {
    let mut h = [0; 8];
    for theta in 0..8 {
        for r in 0..2 {
            h[client_delta_octant(phi_prime, theta, r) as usize] += 1;
        }
    }
    h
}

/// Dependency sets from the row flow `f(x, y) = (x + 1, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub x_deps: Vec<Vec<usize>>,
    pub z_deps: Vec<Vec<usize>>,
}

impl Flow {
    pub fn rows(layout: &BrickworkLayout) -> Self {
        let n = layout.graph.vertex_count();
        let successor = |v: usize| {
            let (r, c) = layout.coords(v);
            (c + 1 < layout.columns).then(|| layout.index(r, c + 1))
        };
        let mut x_deps = vec![Vec::new(); n];
        let mut z_deps = vec![Vec::new(); n];
        for k in 0..n {
            let Some(fk) = successor(k) else { continue };
            x_deps[fk].push(k);
            for i in layout.graph.neighbors(fk) {
                if i != k {
                    z_deps[i].push(k);
                }
            }
        }
        for d in x_deps.iter_mut().chain(z_deps.iter_mut()) {
            d.sort_unstable();
        }
        Flow { x_deps, z_deps }
    }
}

fn parity(site: usize, deps: &[usize], outcomes: &[Option<u8>]) -> Result<u8, BfkError> {
    let mut p = 0;
    for &d in deps {
        p ^= outcomes[d].ok_or(BfkError::FlowViolation { site, dependency: d })?;
    }
    Ok(p & 1)
}

/// `φ' = (-1)^{s_X} φ + s_Z π`, from the corrected outcomes seen so far.
pub fn adapt_phi(phi: f64, site: usize, flow: &Flow, outcomes: &[Option<u8>]) -> Result<f64, BfkError> {
    let sx = parity(site, &flow.x_deps[site], outcomes)?;
    let sz = parity(site, &flow.z_deps[site], outcomes)?;
    let signed = if sx == 1 { -phi } else { phi };
    Ok(wrap_angle(signed + PI * sz as f64))
}

/// Server side: the entangled layout state and which sites have been measured.
#[derive(Debug, Clone)]
pub struct Server {
    state: DenseState,
    measured: Vec<bool>,
}

impl Server {
    pub fn new(state: DenseState) -> Self {
        let n = state.qubit_count();
        Server { state, measured: vec![false; n] }
    }

    pub fn state(&self) -> &DenseState {
        &self.state
    }

    /// Probability of raw outcome 0 at angle `δ`.
    pub fn probability_zero(&self, site: usize, delta: f64) -> Result<f64, BfkError> {
        Ok(self.state.probability_zero(site, Basis::Equatorial(delta))?)
    }

    pub fn measure<R: Rng + ?Sized>(&mut self, site: usize, delta: f64, rng: &mut R) -> Result<u8, BfkError> {
        server_measure(self, site, delta, rng)
    }
}

/// Measure `site` in `{(|0> ± e^{iδ}|1>)/√2}`.
pub fn server_measure<R: Rng + ?Sized>(server: &mut Server, site: usize, delta: f64, rng: &mut R) -> Result<u8, BfkError> {
    if site >= server.measured.len() {
        return Err(QsimError::OutOfRange { qubit: site, count: server.measured.len() }.into());
    }
    if server.measured[site] {
        return Err(BfkError::AlreadyMeasured(site));
    }
    let rec = server.state.measure(site, Basis::Equatorial(delta), rng)?;
    server.measured[site] = true;
    Ok(rec.outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstates::brickwork_graph;
    use crate::qsim::{fidelity, Gate};
    use num_complex::Complex64 as C;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn prepare_octants() {
        let plus = client_prepare(0.0);
        assert!((plus.amplitude(1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let minus = client_prepare(PI);
        assert!((minus.amplitude(1).re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        for k in 0..8 {
            assert!((client_prepare(octant_angle(k)).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_values() {
        assert!((client_delta(FRAC_PI_4, PI / 2.0, 1) - 7.0 * FRAC_PI_4).abs() < 1e-15);
        assert_eq!(client_delta_octant(1, 2, 1), 7);
        assert_eq!(client_delta(0.0, 0.0, 0), 0.0);
        for k in 0..8u8 {
            for r in 0..2 {
                assert_eq!(client_delta_octant(3, k, r), client_delta_octant(3, (k + 4) % 8, r ^ 1));
            }
        }
    }

    #[test]
    fn delta_is_uniform() {
        for p in 0..8 {
            assert_eq!(delta_histogram(p), [2; 8]);
        }
    }

    #[test]
    fn correction_table() {
        assert_eq!(client_correct(0, 1), 1);
        assert_eq!(client_correct(1, 0), 1);
        assert_eq!(client_correct(1, 1), 0);
    }

    #[test]
    fn adaptation_rule() {
        let layout = brickwork_graph(3, 1).unwrap();
        let flow = Flow::rows(&layout);
        assert_eq!(flow.x_deps[1], vec![0]);
        assert_eq!(flow.z_deps[2], vec![0]);
        let phi = 0.7;
        assert_eq!(adapt_phi(phi, 0, &flow, &[None, None, None]).unwrap(), phi);
        let flipped = adapt_phi(phi, 1, &flow, &[Some(1), None, None]).unwrap();
        assert!((flipped - wrap_angle(-phi)).abs() < 1e-15);
        assert_eq!(adapt_phi(phi, 2, &flow, &[None, Some(0), None]), Err(BfkError::FlowViolation { site: 2, dependency: 0 }));
    }

    #[test]
    fn linear_cluster_matches_circuit() {
        // Measuring sites 0 and 1 of a 3-site path with adapted angles and
        // correcting site 2 by X^{s_X} Z^{s_Z} implements H P(-φ₂) H P(-φ₁)|+>.
        let layout = brickwork_graph(3, 1).unwrap();
        let flow = Flow::rows(&layout);
        let (phi1, phi2) = (0.9, -1.3);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let mut s = DenseState::plus(3).unwrap();
            s.apply_gate(Gate::CZ, &[0, 1]).unwrap();
            s.apply_gate(Gate::CZ, &[1, 2]).unwrap();
            let mut outcomes = vec![None; 3];
            for (site, phi) in [(0, phi1), (1, phi2)] {
                let a = adapt_phi(phi, site, &flow, &outcomes).unwrap();
                outcomes[site] = Some(s.measure(site, Basis::Equatorial(a), &mut rng).unwrap().outcome);
            }
            let sx = parity(2, &flow.x_deps[2], &outcomes).unwrap();
            let sz = parity(2, &flow.z_deps[2], &outcomes).unwrap();
            let s = s.remove_qubit(0).unwrap().remove_qubit(0).unwrap();
            let mut out = s.clone();
            if sx == 1 {
                out.apply_gate(Gate::X, &[0]).unwrap();
            }
            if sz == 1 {
                out.apply_gate(Gate::Z, &[0]).unwrap();
            }
            let mut expected = DenseState::plus(1).unwrap();
            for phi in [phi1, phi2] {
                expected.apply_matrix(0, &[[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::from_polar(1.0, -phi)]]).unwrap();
                expected.apply_gate(Gate::H, &[0]).unwrap();
            }
            assert!((fidelity(&out, &expected).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn server_rejects_remeasurement() {
        let mut server = Server::new(client_prepare(0.3));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(server_measure(&mut server, 0, 0.3, &mut rng).unwrap(), 0);
        assert_eq!(server_measure(&mut server, 0, 0.3, &mut rng), Err(BfkError::AlreadyMeasured(0)));
    }

    #[test]
    fn octant_parsing() {
        assert_eq!(angle_octant(7.0 * FRAC_PI_4).unwrap(), 7);
        assert_eq!(angle_octant(-FRAC_PI_4).unwrap(), 7);
        assert!(angle_octant(0.1).is_err());
        assert!(MbqcPattern::from_octant_rows(&[vec![0, 8]]).is_err());
        assert!(MbqcPattern::from_octant_rows(&[vec![0, 1], vec![2]]).is_err());
    }
}
