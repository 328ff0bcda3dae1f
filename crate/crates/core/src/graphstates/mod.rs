//! Graph states, hypergraph (Union Jack) states and the lattices used for
//! measurement-based computation.
//!
//! Graph states are built on the stabilizer backend. A vertex `a` of graph
//! `G` carries the generator `K_a = X_a ∏_{b ∈ N(a)} Z_b`.

mod brickwork;
mod lattice;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::qsim::{DenseState, Gate, Pauli, PauliString, QsimError, StabilizerTableau, MAX_DENSE_QUBITS};

pub use brickwork::{brickwork_graph, brickwork_graph_with, BrickPattern, BrickRule, BrickworkLayout, LayoutKind, RowParity};
pub use lattice::{raussendorf_cell, tile_cells, union_jack_lattice, LatticeGraph, MAX_LATTICE_QUBITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {count} vertices")]
    OutOfRange { vertex: usize, count: usize },
    #[error("invalid triangle {0:?}")]
    InvalidTriangle([usize; 3]),
    #[error("{requested} qubits exceeds the cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid brick pattern: {0}")]
    Pattern(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Simple undirected graph with edges stored as sorted `(u, v)`, `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl GraphSpec {
    pub fn empty(n: usize) -> Self {
        GraphSpec { n, edges: BTreeSet::new() }
    }

    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::OutOfRange { vertex: x, count: self.n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let e = (u.min(v), u.max(v));
        if !self.edges.insert(e) {
            return Err(GraphError::DuplicateEdge(e.0, e.1));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(u, v)| if u == a { Some(v) } else if v == a { Some(u) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// `K_a = X_a ∏_{b ∈ N(a)} Z_b`.
    pub fn stabilizer_generator(&self, a: usize) -> PauliString {
        let mut p = PauliString::single(self.n, a, Pauli::X);
        for b in self.neighbors(a) {
            p.set(b, Some(Pauli::Z));
        }
        p
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    g.edges.insert((u, v));
                }
            }
        }
        g
    }

    /// `# vertices: N` header followed by one sorted `u v` line per edge.
    pub fn to_adjacency_text(&self) -> String {
        let mut out = format!("# vertices: {}\n", self.n);
        for (u, v) in &self.edges {
            writeln!(out, "{u} {v}").expect("write to string");
        }
        out
    }

    /// Parse the adjacency text format. Without a `# vertices:` header the
    /// vertex count is one past the largest index.
    pub fn from_adjacency_text(text: &str) -> Result<Self, GraphError> {
        let mut declared: Option<usize> = None;
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("vertices:") {
                    if declared.is_some() {
                        return Err(GraphError::Parse { line: line_no, reason: "repeated vertex header".into() });
                    }
                    let n = v.trim().parse::<usize>().map_err(|e| GraphError::Parse { line: line_no, reason: e.to_string() })?;
                    if n > MAX_LATTICE_QUBITS {
                        return Err(GraphError::CapExceeded { requested: n, cap: MAX_LATTICE_QUBITS });
                    }
                    declared = Some(n);
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next = || -> Result<usize, GraphError> {
                it.next()
                    .ok_or_else(|| GraphError::Parse { line: line_no, reason: "expected two vertex indices".into() })?
                    .parse::<usize>()
                    .map_err(|e| GraphError::Parse { line: line_no, reason: e.to_string() })
            };
            let (u, v) = (next()?, next()?);
            if it.next().is_some() {
                return Err(GraphError::Parse { line: line_no, reason: "trailing tokens".into() });
            }
            pairs.push((line_no, u, v));
        }
        let n = match declared {
            Some(n) => n,
            None => pairs.iter().map(|&(_, u, v)| u.max(v) + 1).max().unwrap_or(0),
        };
        if n > MAX_LATTICE_QUBITS {
            return Err(GraphError::CapExceeded { requested: n, cap: MAX_LATTICE_QUBITS });
        }
        let mut g = Self::empty(n);
        for (line, u, v) in pairs {
            g.add_edge(u, v).map_err(|e| GraphError::Parse { line, reason: e.to_string() })?;
        }
        Ok(g)
    }
}

/// `|+>^⊗n` followed by CZ on every edge, on the stabilizer backend.
pub fn build_graph_state(g: &GraphSpec) -> StabilizerTableau {
    build_graph_state_ordered(g, &g.edges().collect::<Vec<_>>())
}

/// As [`build_graph_state`] with an explicit CZ order (must be a permutation
/// of the edge set).
pub fn build_graph_state_ordered(g: &GraphSpec, order: &[(usize, usize)]) -> StabilizerTableau {
    debug_assert_eq!(order.len(), g.edge_count());
    let mut t = StabilizerTableau::zero(g.n);
    for q in 0..g.n {
        t.apply_gate(Gate::H, &[q]).expect("vertex in range");
    }
    for &(u, v) in order {
        t.apply_gate(Gate::CZ, &[u, v]).expect("validated edge");
    }
    t
}

/// Dense-vector graph state, for cross-checks on small graphs.
pub fn graph_state_dense(g: &GraphSpec) -> Result<DenseState, GraphError> {
    let mut s = DenseState::plus(g.n)?;
    for (u, v) in g.edges() {
        s.apply_gate(Gate::CZ, &[u, v])?;
    }
    Ok(s)
}

/// Vertices whose generator `K_a` is not a deterministic `+1` on `t`.
pub fn failing_stabilizers(g: &GraphSpec, t: &StabilizerTableau) -> Result<Vec<usize>, GraphError> {
    let mut bad = Vec::new();
    for a in 0..g.n {
        if t.pauli_expectation(&g.stabilizer_generator(a))? != Some(1) {
            bad.push(a);
        }
    }
    Ok(bad)
}

/// Vertex triples for controlled-controlled-Z gates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleComplex {
    n: usize,
    triangles: Vec<[usize; 3]>,
}

impl TriangleComplex {
    pub fn new(n: usize, triangles: impl IntoIterator<Item = [usize; 3]>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in triangles {
            let mut s = t;
            s.sort_unstable();
            if s[2] >= n {
                return Err(GraphError::OutOfRange { vertex: s[2], count: n });
            }
            if s[0] == s[1] || s[1] == s[2] || !seen.insert(s) {
                return Err(GraphError::InvalidTriangle(t));
            }
            out.push(s);
        }
        Ok(TriangleComplex { n, triangles: out })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn shuffled<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut triangles = self.triangles.clone();
        triangles.shuffle(rng);
        TriangleComplex { n: self.n, triangles }
    }
}

/// `|+>^⊗n` followed by CCZ on every triangle, in the stored order.
pub fn build_union_jack(t: &TriangleComplex) -> Result<DenseState, GraphError> {
    if t.n > MAX_DENSE_QUBITS {
        return Err(GraphError::CapExceeded { requested: t.n, cap: MAX_DENSE_QUBITS });
    }
    let mut s = DenseState::plus(t.n)?;
    for tri in &t.triangles {
        s.apply_gate(Gate::CCZ, tri)?;
    }
    Ok(s)
}
