use std::collections::BTreeMap;

use super::{GraphError, GraphSpec, TriangleComplex};
use crate::qsim::StabilizerTableau;

pub const MAX_LATTICE_QUBITS: usize = 10_000;

/// Graph with the lattice coordinate of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGraph {
    pub graph: GraphSpec,
    pub coords: Vec<[u32; 3]>,
}

/// Cubic cluster lattice on doubled coordinates `[0, 2nx] × [0, 2ny] × [0, 2nz]`.
/// Edge qubits have one odd coordinate, face qubits two; qubits at distance
/// one are joined. Vertices are numbered in lexicographic coordinate order.
pub fn tile_cells(nx: u32, ny: u32, nz: u32) -> Result<LatticeGraph, GraphError> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(GraphError::Pattern(format!("cell counts must be positive, got ({nx}, {ny}, {nz})")));
    }
    let (ox, oy, oz) = (nx as u128, ny as u128, nz as u128);
    let (evx, evy, evz) = (ox + 1, oy + 1, oz + 1);
    let count = ox * evy * evz + evx * oy * evz + evx * evy * oz + ox * oy * evz + ox * evy * oz + evx * oy * oz;
    if count > MAX_LATTICE_QUBITS as u128 {
        return Err(GraphError::CapExceeded { requested: usize::try_from(count).unwrap_or(usize::MAX), cap: MAX_LATTICE_QUBITS });
    }
    let (ex, ey, ez) = (2 * nx + 1, 2 * ny + 1, 2 * nz + 1);

    let mut coords = Vec::new();
    for x in 0..ex {
        for y in 0..ey {
            for z in 0..ez {
                let odd = (x % 2) + (y % 2) + (z % 2);
                if odd == 1 || odd == 2 {
                    coords.push([x, y, z]);
                }
            }
        }
    }
    let index: BTreeMap<[u32; 3], usize> = coords.iter().enumerate().map(|(i, c)| (*c, i)).collect();

    let mut graph = GraphSpec::empty(coords.len());
    for (i, c) in coords.iter().enumerate() {
        if (c[0] % 2) + (c[1] % 2) + (c[2] % 2) != 2 {
            continue;
        }
        // A face qubit's neighbours step along one of its two odd axes.
        for axis in 0..3 {
            if c[axis] % 2 == 0 {
                continue;
            }
            for up in [false, true] {
                let mut d = *c;
                d[axis] = if up { d[axis] + 1 } else { d[axis] - 1 };
                if let Some(&j) = index.get(&d) {
                    graph.add_edge(i, j)?;
                }
            }
        }
    }
    Ok(LatticeGraph { graph, coords })
}

/// The single elementary cell and its graph state.
pub fn raussendorf_cell() -> (LatticeGraph, StabilizerTableau) {
    let cell = tile_cells(1, 1, 1).expect("one cell is within the cap");
    let t = super::build_graph_state(&cell.graph);
    (cell, t)
}

/// Square grid of `rows × cols` plaquettes, each split into four triangles
/// around a central vertex. Corner vertices come first in row-major order,
/// followed by plaquette centres.
pub fn union_jack_lattice(rows: usize, cols: usize) -> Result<TriangleComplex, GraphError> {
    let corners = (rows + 1) * (cols + 1);
    let n = corners + rows * cols;
    let corner = |r: usize, c: usize| r * (cols + 1) + c;
    let mut tris = Vec::with_capacity(4 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let centre = corners + r * cols + c;
            let (a, b, d, e) = (corner(r, c), corner(r, c + 1), corner(r + 1, c + 1), corner(r + 1, c));
            for (p, q) in [(a, b), (b, d), (d, e), (e, a)] {
                tris.push([p, q, centre]);
            }
        }
    }
    TriangleComplex::new(n, tris)
}
