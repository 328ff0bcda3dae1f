//! Network orchestration: per-link provisioning of Bell pairs, hop-count
//! routing, swapping along the path and a covert-resource report.

mod run;
mod topology;

use thiserror::Error;

use crate::entanglement::EntanglementError;
use crate::protocols::{NodeId, ProtocolError};
use crate::qsim::QsimError;
use crate::vacuum::VacuumError;

pub use run::{
    provision_link, route_and_teleport, shortest_path, BudgetViolation, LinkReport, ProtocolReport, ProvisionCost,
    RunReport, REPORT_SCHEMA_VERSION,
};
pub use topology::{Link, LinkSource, Node, Topology, TOPOLOGY_SCHEMA_VERSION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no path from {0} to {1}")]
    NoPath(NodeId, NodeId),
    #[error("link {0}-{1} is not distillable: extracted singlet fraction {2} ≤ 1/2")]
    NotDistillable(NodeId, NodeId, f64),
    #[error(transparent)]
    Vacuum(#[from] VacuumError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}
