//! Covert LOCC protocols over shared Bell pairs: state and gate
//! teleportation, one-bit teleportation, entanglement swapping and GHZ
//! construction. Every run returns a [`Transcript`] of the classical
//! messages it sent, all of which travel over the covert channel.
//!
//! Resources are consumed by value, so a pair cannot be used twice. Shared
//! inventories go through [`ResourcePool`], which reports
//! [`ProtocolError::ResourceDepleted`] when a link runs dry.

mod resource;
mod swap;
mod teleport;
mod transcript;

use thiserror::Error;

use crate::entanglement::EntanglementError;
use crate::qsim::QsimError;

pub use resource::{BellResource, GhzResource, NodeId, Provenance, ResourcePool};
pub use swap::{build_ghz_from_bell, entanglement_swap};
pub use teleport::{one_bit_teleport, teleport_cnot, teleport_cnot_joint, teleport_state, OneBitKind};
pub use transcript::{Message, Purpose, Transcript};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("no Bell pairs left between {0} and {1}")]
    ResourceDepleted(NodeId, NodeId),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("resources do not connect the parties: {0}")]
    TopologyError(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("transcript line {line}: {reason}")]
    TranscriptParse { line: usize, reason: String },
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
}
