//! Mapping logical circuits onto coupling graphs.

mod alloc;
mod circuit;
mod props;
mod topology;

use thiserror::Error;

pub use alloc::{allocate, AllocOptions, Allocator, Metrics, LOOKAHEAD_OPS, LOOKAHEAD_WEIGHT};
pub use circuit::{depth, phys_depth, stream_depth, verify_mapped, PhysOp, PhysicalCircuit, Tag};
pub use props::{cut_size, graph_props, search_bisection, GraphProps, BISECTION_TRIALS};
pub use topology::{build_topology, witness_side, CouplingGraph, MULTIRING_SPOKES, TOPOLOGIES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("unknown topology `{0}`")]
    UnknownTopology(String),
    #[error("invalid coupling graph: {0}")]
    InvalidGraph(String),
    #[error("circuit uses {qubits} qubits but the device has {vertices}")]
    TooWide { qubits: usize, vertices: usize },
    #[error("no placement for a three-qubit gate")]
    ToffoliUnplaceable,
    #[error("gates on {0} qubits are not supported")]
    UnsupportedWidth(usize),
    #[error("allocation exceeded its time budget")]
    Timeout,
}
