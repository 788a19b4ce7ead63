//! Property graph engine that stores each relation as a sparse boolean
//! adjacency matrix and evaluates traversals as matrix-vector products.

pub mod bench;
pub mod cypher;
pub mod exec;
pub mod graph;
pub mod khop;
pub mod plan;
pub mod server;
pub mod snapshot;
pub mod sparse;
pub mod value;

pub use graph::{NodeId, PropertyGraph, Relation};
pub use khop::{k_hop_count, KHopMode, KHopQuery};
pub use value::{Properties, PropertyValue};
