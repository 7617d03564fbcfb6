//! Generalized graph queries: matching signed query graphs against
//! subgraphs of a data graph, and refining queries into partitions.

pub mod dot;
pub mod fixtures;
pub mod graph;
pub mod ids;
pub mod matcher;
pub mod predicate;
pub mod query;
pub mod refinement;
