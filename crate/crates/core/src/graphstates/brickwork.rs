use serde::{Deserialize, Serialize};

use super::{GraphError, GraphSpec};

const DEFAULT_PATTERN: &str = include_str!("../../data/brickwork.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowParity {
    Odd,
    Even,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrickRule {
    /// 1-based column residue modulo the pattern period.
    pub column: usize,
    pub row_parity: RowParity,
    pub offsets: Vec<usize>,
}

/// Vertical-edge table for brickwork layouts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrickPattern {
    pub period: usize,
    pub full_column_residue: usize,
    pub min_rows: usize,
    pub bricks: Vec<BrickRule>,
}

impl BrickPattern {
    pub fn from_toml(text: &str) -> Result<Self, GraphError> {
        let p: BrickPattern = toml::from_str(text).map_err(|e| GraphError::Pattern(e.to_string()))?;
        if p.period == 0 {
            return Err(GraphError::Pattern("period must be positive".into()));
        }
        Ok(p)
    }

    /// Whether `columns × rows` admits the complete pattern.
    pub fn is_full(&self, columns: usize, rows: usize) -> bool {
        columns % self.period == self.full_column_residue % self.period && rows >= self.min_rows
    }
}

impl Default for BrickPattern {
    fn default() -> Self {
        BrickPattern::from_toml(DEFAULT_PATTERN).expect("bundled brick pattern parses")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    Full,
    /// Dimensions outside the pattern's congruences; the brick table is
    /// clipped to the window.
    Fallback,
}

/// Brickwork graph on `rows × columns`; vertex `(row, col)` (0-based) has
/// index `row * columns + col`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickworkLayout {
    pub graph: GraphSpec,
    pub columns: usize,
    pub rows: usize,
    pub layout: LayoutKind,
}

impl BrickworkLayout {
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.columns + col
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.columns, v % self.columns)
    }
}

pub fn brickwork_graph(columns: usize, rows: usize) -> Result<BrickworkLayout, GraphError> {
    brickwork_graph_with(&BrickPattern::default(), columns, rows)
}

pub fn brickwork_graph_with(pattern: &BrickPattern, columns: usize, rows: usize) -> Result<BrickworkLayout, GraphError> {
    if columns == 0 || rows == 0 {
        return Err(GraphError::Pattern(format!("layout {columns}×{rows} is empty")));
    }
    let n = columns.checked_mul(rows).ok_or(GraphError::CapExceeded { requested: usize::MAX, cap: super::MAX_LATTICE_QUBITS })?;
    if n > super::MAX_LATTICE_QUBITS {
        return Err(GraphError::CapExceeded { requested: n, cap: super::MAX_LATTICE_QUBITS });
    }
    let idx = |r: usize, c: usize| r * columns + c;
    let mut g = GraphSpec::empty(n);
    for r in 0..rows {
        for c in 0..columns.saturating_sub(1) {
            g.add_edge(idx(r, c), idx(r, c + 1))?;
        }
    }
    for i in 1..rows {
        let parity = if i % 2 == 1 { RowParity::Odd } else { RowParity::Even };
        for j in 1..=columns {
            for rule in &pattern.bricks {
                if rule.row_parity != parity || j % pattern.period != rule.column % pattern.period {
                    continue;
                }
                for off in &rule.offsets {
                    let col = j + off;
                    if col <= columns && !g.has_edge(idx(i - 1, col - 1), idx(i, col - 1)) {
                        g.add_edge(idx(i - 1, col - 1), idx(i, col - 1))?;
                    }
                }
            }
        }
    }
    let layout = if pattern.is_full(columns, rows) { LayoutKind::Full } else { LayoutKind::Fallback };
    Ok(BrickworkLayout { graph: g, columns, rows, layout })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_shapes() {
        let path = brickwork_graph(6, 1).unwrap();
        assert_eq!(path.graph.edge_count(), 5);
        assert_eq!(path.layout, LayoutKind::Fallback);
        let column = brickwork_graph(1, 4).unwrap();
        assert_eq!(column.graph.edge_count(), 0);
    }

    #[test]
    fn five_by_two_bricks() {
        let b = brickwork_graph(5, 2).unwrap();
        assert_eq!(b.layout, LayoutKind::Full);
        // 2 rows of 4 horizontal edges, verticals at columns 3 and 5.
        assert_eq!(b.graph.edge_count(), 10);
        assert!(b.graph.has_edge(b.index(0, 2), b.index(1, 2)));
        assert!(b.graph.has_edge(b.index(0, 4), b.index(1, 4)));
    }

    #[test]
    fn second_brick_row_uses_even_rows() {
        let b = brickwork_graph(13, 3).unwrap();
        assert!(b.graph.has_edge(b.index(1, 6), b.index(2, 6)));
        assert!(b.graph.has_edge(b.index(1, 8), b.index(2, 8)));
        assert!(!b.graph.has_edge(b.index(0, 6), b.index(1, 6)));
    }

    #[test]
    fn degree_at_most_three() {
        for n in 1..=12 {
            for m in 1..=12 {
                let b = brickwork_graph(n, m).unwrap();
                assert!(b.graph.degrees().iter().all(|&d| d <= 3), "{n}×{m}");
            }
        }
    }

    #[test]
    fn custom_pattern_parses() {
        let p = BrickPattern::from_toml("period = 4\nfull_column_residue = 1\nmin_rows = 2\nbricks = []\n").unwrap();
        assert!(p.is_full(5, 2));
        assert!(BrickPattern::from_toml("period = 0\nfull_column_residue = 1\nmin_rows = 2\nbricks = []\n").is_err());
    }
}
