//! Refinement of queries.
//!
//! A refinement set of `Q` in `G` is a list of queries, each refining `Q`,
//! such that every subgraph of `G` matching `Q` matches exactly one of them.
//! The four operators here build such sets structurally; the oracles check
//! the contract by brute force over all subgraphs of a small graph.

mod clone;
mod operators;
mod oracle;
mod simplify;
mod tree;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::GraphError;
use crate::matcher::MatchError;
use crate::predicate::{NodePredicate, PathPredicate};
use crate::query::{Query, QueryError, Sign};

pub use clone::clone_query;
pub use operators::{
    refine_add_edge, refine_add_edge_predicate, refine_add_node, refine_add_node_predicate,
};
pub use oracle::{
    equivalent_oracle, is_conservative_extension, refines_oracle, verify_partition,
    verify_refinement_set, PartitionReport, PartitionViolation,
};
pub use simplify::{simplified_refinement, simplify};
pub use tree::{
    build_refinement_tree, BfsPolicy, P5Policy, PolicyChoice, RefinementPolicy, RefinementTree,
    TreeNode,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RefinementError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error("id `{0}` is already used in the query")]
    IdClash(String),
    #[error("`{0}` must be positive")]
    NegativeAnchor(String),
    #[error("neighbor `{neighbor}` of `{node}` must be positive")]
    NegativeEnvironment { node: String, neighbor: String },
    #[error("refinement policy failed: {0}")]
    Policy(String),
}

impl From<GraphError> for RefinementError {
    fn from(e: GraphError) -> Self {
        RefinementError::Match(MatchError::Graph(e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    AddNode {
        node: String,
    },
    AddEdge {
        from: String,
        to: String,
        sign: Sign,
    },
    AddEdgePredicate {
        edge: String,
        phi: PathPredicate,
    },
    AddNodePredicate {
        node: String,
        phi: NodePredicate,
    },
}

impl Operator {
    pub fn tag(&self) -> &'static str {
        match self {
            Operator::AddNode { .. } => "add_node",
            Operator::AddEdge { .. } => "add_edge",
            Operator::AddEdgePredicate { .. } => "add_edge_pred",
            Operator::AddNodePredicate { .. } => "add_node_pred",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::AddNode { node } => write!(f, "add_node {node}"),
            Operator::AddEdge { from, to, sign } => write!(f, "add_edge {from} -> {to} ({sign})"),
            Operator::AddEdgePredicate { edge, phi } => write!(f, "add_edge_pred {edge}: {phi}"),
            Operator::AddNodePredicate { node, phi } => write!(f, "add_node_pred {node}: {phi}"),
        }
    }
}

/// The output of one operator application.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementSet {
    pub parent: Query,
    pub operator: Operator,
    pub members: Vec<Query>,
    /// Per member, the sign assignment that distinguishes it, e.g. `n'=+ m'=-`.
    pub assignments: Vec<String>,
    /// Original node id to the id of its copy, for the nodes cloned first.
    pub clone_map: BTreeMap<String, String>,
    /// The edge introduced by `add_edge` or `add_edge_pred`.
    pub new_edge: Option<String>,
    pub simplified: bool,
}

impl RefinementSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
