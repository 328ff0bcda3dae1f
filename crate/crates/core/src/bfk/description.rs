use serde::{Deserialize, Serialize};

use super::{BfkError, MbqcPattern};

/// JSON run description: `{"n": columns, "m": rows, "phi_table": [[..]], "seed": u64}`
/// with `phi_table[y][x]` the octant of site `(x + 1, y + 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BfkRunDescription {
    pub n: usize,
    pub m: usize,
    pub phi_table: Vec<Vec<u8>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl BfkRunDescription {
    pub fn from_json(text: &str) -> Result<Self, BfkError> {
        let d: BfkRunDescription = serde_json::from_str(text).map_err(|e| BfkError::Description(e.to_string()))?;
        d.pattern()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serialises")
    }

    pub fn pattern(&self) -> Result<MbqcPattern, BfkError> {
        if self.phi_table.len() != self.m {
            return Err(BfkError::Description(format!("phi_table has {} rows, m = {}", self.phi_table.len(), self.m)));
        }
        if let Some(row) = self.phi_table.iter().find(|r| r.len() != self.n) {
            return Err(BfkError::Description(format!("phi_table row of length {}, n = {}", row.len(), self.n)));
        }
        MbqcPattern::from_octant_rows(&self.phi_table)
    }
}
