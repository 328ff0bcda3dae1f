use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::NetError;
use crate::protocols::NodeId;
use crate::vacuum::DetectorConfig;

pub const TOPOLOGY_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: NodeId,
    #[serde(default)]
    pub label: String,
}

/// How a link obtains its Bell pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkSource {
    Ideal,
    Werner { fidelity: f64 },
    Vacuum { detector: DetectorConfig },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub source: LinkSource,
    /// Distil until the pair fidelity reaches this value.
    #[serde(default)]
    pub target_fidelity: Option<f64>,
    /// Covert bits this link may carry per run.
    pub covert_bit_budget: u64,
}

impl Link {
    pub fn connects(&self, x: NodeId, y: NodeId) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    pub schema_version: u32,
    #[serde(default)]
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub links: Vec<Link>,
}

impl Topology {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self, NetError> {
        let t = Topology { schema_version: TOPOLOGY_SCHEMA_VERSION, nodes, links };
        t.validate()?;
        Ok(t)
    }

    pub fn from_toml(text: &str) -> Result<Self, NetError> {
        let t: Topology = toml::from_str(text).map_err(|e| NetError::InvalidTopology(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("topology serialises")
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.schema_version != TOPOLOGY_SCHEMA_VERSION {
            return Err(NetError::InvalidTopology(format!("unsupported schema_version {}", self.schema_version)));
        }
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return Err(NetError::InvalidTopology(format!("duplicate node {}", n.id)));
            }
        }
        let mut seen = BTreeSet::new();
        for l in &self.links {
            for end in [l.a, l.b] {
                if !ids.contains(&end) {
                    return Err(NetError::UnknownNode(end));
                }
            }
            if l.a == l.b {
                return Err(NetError::InvalidTopology(format!("self-loop at {}", l.a)));
            }
            if !seen.insert((l.a.min(l.b), l.a.max(l.b))) {
                return Err(NetError::InvalidTopology(format!("duplicate link {}-{}", l.a, l.b)));
            }
            match &l.source {
                LinkSource::Werner { fidelity } if !(0.0..=1.0).contains(fidelity) => {
                    return Err(NetError::InvalidTopology(format!("Werner fidelity {fidelity} outside [0, 1]")));
                }
                LinkSource::Vacuum { detector } => detector.validate()?,
                _ => {}
            }
            if let Some(t) = l.target_fidelity {
                if !(t > 0.0 && t < 1.0) {
                    return Err(NetError::InvalidTopology(format!("target fidelity {t} outside (0, 1)")));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.iter().any(|n| n.id == id)
    }

    pub fn link(&self, x: NodeId, y: NodeId) -> Option<&Link> {
        self.links.iter().find(|l| l.connects(x, y))
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> = self.nodes.iter().map(|n| (n.id, Vec::new())).collect();
        for l in &self.links {
            adj.entry(l.a).or_default().push(l.b);
            adj.entry(l.b).or_default().push(l.a);
        }
        for v in adj.values_mut() {
            v.sort_unstable();
        }
        adj
    }

    /// Hop distances from `from` to every reachable node.
    pub fn distances(&self, from: NodeId) -> BTreeMap<NodeId, usize> {
        let adj = self.adjacency();
        let mut dist = BTreeMap::from([(from, 0usize)]);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &v in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                if !dist.contains_key(&v) {
                    dist.insert(v, dist[&u] + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        match self.nodes.first() {
            None => true,
            Some(n) => self.distances(n.id).len() == self.nodes.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"
schema_version = 1

[[nodes]]
id = 0
label = "alice"

[[nodes]]
id = 1

[[nodes]]
id = 2
label = "bob"

[[links]]
a = 0
b = 1
covert_bit_budget = 10
source = { kind = "ideal" }

[[links]]
a = 1
b = 2
covert_bit_budget = 10
target_fidelity = 0.95
source = { kind = "werner", fidelity = 0.9 }
"#;

    #[test]
    fn parses_line() {
        let t = Topology::from_toml(LINE).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert!(t.is_connected());
        assert_eq!(t.distances(NodeId(0))[&NodeId(2)], 2);
        assert_eq!(Topology::from_toml(&t.to_toml()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_topologies() {
        let unknown = LINE.replace("b = 2", "b = 7");
        assert_eq!(Topology::from_toml(&unknown), Err(NetError::UnknownNode(NodeId(7))));
        let negative = LINE.replace("covert_bit_budget = 10\ntarget", "covert_bit_budget = -1\ntarget");
        assert!(Topology::from_toml(&negative).is_err());
        let bad_f = LINE.replace("fidelity = 0.9", "fidelity = 1.5");
        assert!(Topology::from_toml(&bad_f).is_err());
        let version = LINE.replace("schema_version = 1", "schema_version = 2");
        assert!(Topology::from_toml(&version).is_err());
        assert!(Topology::from_toml("nodes = 3").is_err());
    }

    #[test]
    fn disconnected() {
        let t = Topology::new(vec![Node { id: NodeId(0), label: String::new() }, Node { id: NodeId(1), label: String::new() }], vec![])
            .unwrap();
        assert!(!t.is_connected());
    }
}
