//! Discrete-event simulator for self-healing peer-to-peer overlays.
//!
//! The crate models an unstructured overlay as an undirected graph over a
//! fixed id space, subjects it to node churn (failures, optionally balanced
//! by joins), and lets maintenance protocols rebuild connectivity from each
//! failed node's two-hop neighborhood. Modules:
//!
//! - [`graph`]: the overlay structure and its local queries (neighborhoods,
//!   two-hop sets, edge clustering coefficients).
//! - [`analysis`]: global metrics — components, diameter, clustering,
//!   betweenness centrality.
//! - [`topology`]: initial graph generators and per-topology join wiring.
//! - [`protocol`]: the healing protocols and periodic link reduction.
//! - [`engine`]: the per-run churn loop.
//! - [`batch`]: multi-run execution and averaging.

pub mod analysis;
pub mod batch;
pub mod engine;
pub mod graph;
pub mod protocol;
pub mod topology;

pub use analysis::MetricsRow;
pub use batch::{mean_rows, run_batch, run_batch_sequential, MeanRow};
pub use engine::{
    run_single, EngineError, HealTotals, RunResult, ScenarioMode, ScenarioSpec, Simulation,
};
pub use graph::{GraphError, NodeId, OverlayGraph};
pub use protocol::{HealReport, ProtocolConfig, ProtocolKind};
pub use topology::{TopologyError, TopologyMeta, TopologySpec};
