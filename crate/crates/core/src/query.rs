//! Generalized graph queries: binary directed graphs whose nodes and edges
//! carry a sign and a predicate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::predicate::{
    normalize, parse_node_predicate, parse_path_predicate, syntactic_equiv, NodePredicate,
    PathPredicate, PredicateError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Pos => "+",
            Sign::Neg => "-",
        }
    }

    pub fn parse(text: &str) -> Option<Sign> {
        match text {
            "+" => Some(Sign::Pos),
            "-" => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn is_pos(self) -> bool {
        self == Sign::Pos
    }

    /// Applies the sign to a verdict: `+` keeps it, `-` negates it.
    pub fn apply(self, verdict: bool) -> bool {
        match self {
            Sign::Pos => verdict,
            Sign::Neg => !verdict,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryNode {
    pub id: String,
    pub sign: Sign,
    pub theta: NodePredicate,
    /// Free-form diagnostics label; no effect on matching.
    pub label: Option<String>,
    /// Unrecognized document keys, kept for round-tripping.
    pub extra: BTreeMap<String, Value>,
}

impl QueryNode {
    pub fn new(id: impl Into<String>, sign: Sign, theta: NodePredicate) -> Self {
        QueryNode {
            id: id.into(),
            sign,
            theta,
            label: None,
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub sign: Sign,
    pub theta: PathPredicate,
    pub label: Option<String>,
    pub extra: BTreeMap<String, Value>,
}

impl QueryEdge {
    pub fn new(
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        sign: Sign,
        theta: PathPredicate,
    ) -> Self {
        QueryEdge {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            sign,
            theta,
            label: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }

    pub fn touches(&self, node: &str) -> bool {
        self.from == node || self.to == node
    }

    /// The endpoint opposite to `node` (the node itself for a loop).
    pub fn other_end(&self, node: &str) -> &str {
        if self.from == node {
            &self.to
        } else {
            &self.from
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("unknown query node `{0}`")]
    UnknownNode(String),
    #[error("unknown query edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{edge}` has unknown endpoint `{endpoint}`")]
    DanglingEndpoint { edge: String, endpoint: String },
    #[error("not a sub-query: {0}")]
    NotASubquery(String),
    #[error("invalid query document:\n{0}")]
    Invalid(ValidationReport),
    #[error("malformed query document: {0}")]
    Format(String),
}

/// A query: nodes and edges keyed by id. Edge endpoints always exist.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Query {
    nodes: BTreeMap<String, QueryNode>,
    edges: BTreeMap<String, QueryEdge>,
}

impl Query {
    pub fn new() -> Self {
        Query::default()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &QueryNode> {
        self.nodes.values()
    }

    /// Edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = &QueryEdge> {
        self.edges.values()
    }

    pub fn node(&self, id: &str) -> Option<&QueryNode> {
        self.nodes.get(id)
    }

    pub fn edge(&self, id: &str) -> Option<&QueryEdge> {
        self.edges.get(id)
    }

    pub fn has_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn has_edge(&self, id: &str) -> bool {
        self.edges.contains_key(id)
    }

    pub fn add_node(&mut self, node: QueryNode) -> Result<(), QueryError> {
        if self.nodes.contains_key(&node.id) {
            return Err(QueryError::DuplicateId {
                kind: "node",
                id: node.id,
            });
        }
        self.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    pub fn add_edge(&mut self, edge: QueryEdge) -> Result<(), QueryError> {
        if self.edges.contains_key(&edge.id) {
            return Err(QueryError::DuplicateId {
                kind: "edge",
                id: edge.id,
            });
        }
        for end in [&edge.from, &edge.to] {
            if !self.nodes.contains_key(end) {
                return Err(QueryError::DanglingEndpoint {
                    edge: edge.id.clone(),
                    endpoint: end.clone(),
                });
            }
        }
        self.edges.insert(edge.id.clone(), edge);
        Ok(())
    }

    /// Removes a node and every edge incident to it.
    pub fn remove_node(&mut self, id: &str) -> Result<QueryNode, QueryError> {
        let node = self
            .nodes
            .remove(id)
            .ok_or_else(|| QueryError::UnknownNode(id.to_string()))?;
        self.edges.retain(|_, e| !e.touches(id));
        Ok(node)
    }

    pub fn remove_edge(&mut self, id: &str) -> Result<QueryEdge, QueryError> {
        self.edges
            .remove(id)
            .ok_or_else(|| QueryError::UnknownEdge(id.to_string()))
    }

    pub fn set_node_sign(&mut self, id: &str, sign: Sign) -> Result<(), QueryError> {
        self.node_entry(id)?.sign = sign;
        Ok(())
    }

    pub fn set_node_theta(&mut self, id: &str, theta: NodePredicate) -> Result<(), QueryError> {
        self.node_entry(id)?.theta = theta;
        Ok(())
    }

    pub fn set_edge_sign(&mut self, id: &str, sign: Sign) -> Result<(), QueryError> {
        self.edge_entry(id)?.sign = sign;
        Ok(())
    }

    pub fn set_edge_theta(&mut self, id: &str, theta: PathPredicate) -> Result<(), QueryError> {
        self.edge_entry(id)?.theta = theta;
        Ok(())
    }

    fn node_entry(&mut self, id: &str) -> Result<&mut QueryNode, QueryError> {
        self.nodes
            .get_mut(id)
            .ok_or_else(|| QueryError::UnknownNode(id.to_string()))
    }

    fn edge_entry(&mut self, id: &str) -> Result<&mut QueryEdge, QueryError> {
        self.edges
            .get_mut(id)
            .ok_or_else(|| QueryError::UnknownEdge(id.to_string()))
    }

    /// Edges with `id` as an endpoint, in edge-id order.
    pub fn incident(&self, id: &str) -> impl Iterator<Item = &QueryEdge> + '_ {
        let id = id.to_string();
        self.edges.values().filter(move |e| e.touches(&id))
    }

    /// Nodes sharing an edge with `id`, excluding `id` itself.
    pub fn neighbors(&self, id: &str) -> BTreeSet<String> {
        self.incident(id)
            .map(|e| e.other_end(id).to_string())
            .filter(|n| n != id)
            .collect()
    }

    pub fn signed_partitions(&self) -> SignedPartitions {
        let mut p = SignedPartitions::default();
        for n in self.nodes.values() {
            match n.sign {
                Sign::Pos => p.pos_nodes.insert(n.id.clone()),
                Sign::Neg => p.neg_nodes.insert(n.id.clone()),
            };
        }
        for e in self.edges.values() {
            match e.sign {
                Sign::Pos => p.pos_edges.insert(e.id.clone()),
                Sign::Neg => p.neg_edges.insert(e.id.clone()),
            };
        }
        p
    }

    /// Whether every element of `self` occurs in `other` with the same sign,
    /// endpoints and (normalized) predicate.
    pub fn is_subquery_of(&self, other: &Query) -> bool {
        self.subquery_mismatch(other).is_none()
    }

    fn subquery_mismatch(&self, other: &Query) -> Option<String> {
        for n in self.nodes.values() {
            match other.nodes.get(&n.id) {
                None => return Some(format!("node `{}` is missing", n.id)),
                Some(m) if m.sign != n.sign || !syntactic_equiv(&m.theta, &n.theta) => {
                    return Some(format!("node `{}` differs", n.id))
                }
                _ => {}
            }
        }
        for e in self.edges.values() {
            match other.edges.get(&e.id) {
                None => return Some(format!("edge `{}` is missing", e.id)),
                Some(f)
                    if f.from != e.from
                        || f.to != e.to
                        || f.sign != e.sign
                        || !syntactic_equiv(&f.theta, &e.theta) =>
                {
                    return Some(format!("edge `{}` differs", e.id))
                }
                _ => {}
            }
        }
        None
    }

    /// Query with every element predicate in normal form.
    pub fn normalized(&self) -> Query {
        let mut q = self.clone();
        for n in q.nodes.values_mut() {
            n.theta = normalize(&n.theta);
        }
        for e in q.edges.values_mut() {
            e.theta = normalize(&e.theta);
        }
        q
    }

    /// Whether the two queries agree up to predicate normalization and labels.
    pub fn same_structure(&self, other: &Query) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.edges.len() == other.edges.len()
            && self.is_subquery_of(other)
    }

    pub fn to_document(&self) -> QueryDocument {
        QueryDocument {
            nodes: self
                .nodes
                .values()
                .map(|n| NodeDocument {
                    id: n.id.clone(),
                    sign: n.sign.symbol().to_string(),
                    theta: Some(normalize(&n.theta).to_string()),
                    label: n.label.clone(),
                    extra: n.extra.clone(),
                })
                .collect(),
            edges: self
                .edges
                .values()
                .map(|e| EdgeDocument {
                    id: e.id.clone(),
                    from: e.from.clone(),
                    to: e.to.clone(),
                    sign: e.sign.symbol().to_string(),
                    theta: Some(normalize(&e.theta).to_string()),
                    label: e.label.clone(),
                    extra: e.extra.clone(),
                })
                .collect(),
        }
    }

    /// Builds a query from a document, reporting every violation at once.
    pub fn from_document(doc: &QueryDocument) -> Result<Query, QueryError> {
        let report = validate_query(doc);
        if !report.is_valid() {
            return Err(QueryError::Invalid(report));
        }
        let mut q = Query::new();
        for n in &doc.nodes {
            q.add_node(QueryNode {
                id: n.id.clone(),
                sign: Sign::parse(&n.sign).expect("validated sign"),
                theta: parse_node_predicate(n.theta.as_deref().unwrap_or(""))
                    .expect("validated predicate"),
                label: n.label.clone(),
                extra: n.extra.clone(),
            })?;
        }
        for e in &doc.edges {
            q.add_edge(QueryEdge {
                id: e.id.clone(),
                from: e.from.clone(),
                to: e.to.clone(),
                sign: Sign::parse(&e.sign).expect("validated sign"),
                theta: parse_path_predicate(e.theta.as_deref().unwrap_or(""))
                    .expect("validated predicate"),
                label: e.label.clone(),
                extra: e.extra.clone(),
            })?;
        }
        Ok(q)
    }
}

/// Compact one-line rendering, e.g. `{+n1: v in S} {+e1: n2 -> n1: types =~ /A/}`.
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if !std::mem::take(&mut first) {
                f.write_str(" ")?;
            }
            Ok::<(), fmt::Error>(())
        };
        for n in self.nodes.values() {
            sep(f)?;
            write!(f, "{{{}{}: {}}}", n.sign, n.id, normalize(&n.theta))?;
        }
        for e in self.edges.values() {
            sep(f)?;
            write!(
                f,
                "{{{}{}: {} -> {}: {}}}",
                e.sign,
                e.id,
                e.from,
                e.to,
                normalize(&e.theta)
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SignedPartitions {
    pub pos_nodes: BTreeSet<String>,
    pub neg_nodes: BTreeSet<String>,
    pub pos_edges: BTreeSet<String>,
    pub neg_edges: BTreeSet<String>,
}

/// `q` without the nodes and edges of `part` and without edges incident to
/// removed nodes.
pub fn query_minus(q: &Query, part: &Query) -> Result<Query, QueryError> {
    if let Some(why) = part.subquery_mismatch(q) {
        return Err(QueryError::NotASubquery(why));
    }
    let mut out = q.clone();
    for e in part.edges.keys() {
        out.edges.remove(e);
    }
    for n in part.nodes.keys() {
        out.remove_node(n)?;
    }
    Ok(out)
}

/// JSON document form. Predicates are DSL strings; absent means `true`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryDocument {
    #[serde(default)]
    pub nodes: Vec<NodeDocument>,
    #[serde(default)]
    pub edges: Vec<EdgeDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDocument {
    pub id: String,
    pub sign: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub id: String,
    pub from: String,
    pub to: String,
    pub sign: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateId { kind: &'static str, id: String },
    BadSign { id: String, sign: String },
    DanglingEndpoint { edge: String, endpoint: String },
    BadPredicate { id: String, error: PredicateError },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { kind, id } => write!(f, "duplicate {kind} id `{id}`"),
            Violation::BadSign { id, sign } => {
                write!(f, "`{id}` has sign `{sign}`, expected `+` or `-`")
            }
            Violation::DanglingEndpoint { edge, endpoint } => {
                write!(f, "edge `{edge}` has unknown endpoint `{endpoint}`")
            }
            Violation::BadPredicate { id, error } => write!(f, "predicate of `{id}`: {error}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "  {v}")?;
        }
        Ok(())
    }
}

pub fn validate_query(doc: &QueryDocument) -> ValidationReport {
    let mut violations = Vec::new();
    let mut node_ids = BTreeSet::new();
    for n in &doc.nodes {
        if !node_ids.insert(n.id.as_str()) {
            violations.push(Violation::DuplicateId {
                kind: "node",
                id: n.id.clone(),
            });
        }
        if Sign::parse(&n.sign).is_none() {
            violations.push(Violation::BadSign {
                id: n.id.clone(),
                sign: n.sign.clone(),
            });
        }
        if let Err(error) = parse_node_predicate(n.theta.as_deref().unwrap_or("")) {
            violations.push(Violation::BadPredicate {
                id: n.id.clone(),
                error,
            });
        }
    }
    let mut edge_ids = BTreeSet::new();
    for e in &doc.edges {
        if !edge_ids.insert(e.id.as_str()) {
            violations.push(Violation::DuplicateId {
                kind: "edge",
                id: e.id.clone(),
            });
        }
        if Sign::parse(&e.sign).is_none() {
            violations.push(Violation::BadSign {
                id: e.id.clone(),
                sign: e.sign.clone(),
            });
        }
        for end in [&e.from, &e.to] {
            if !node_ids.contains(end.as_str()) {
                violations.push(Violation::DanglingEndpoint {
                    edge: e.id.clone(),
                    endpoint: end.clone(),
                });
            }
        }
        if let Err(error) = parse_path_predicate(e.theta.as_deref().unwrap_or("")) {
            violations.push(Violation::BadPredicate {
                id: e.id.clone(),
                error,
            });
        }
    }
    ValidationReport { violations }
}

pub fn load_query(text: &str) -> Result<Query, QueryError> {
    let doc: QueryDocument =
        serde_json::from_str(text).map_err(|e| QueryError::Format(e.to_string()))?;
    Query::from_document(&doc)
}

/// Pretty JSON, elements sorted by id, predicates normalized.
pub fn store_query(q: &Query) -> String {
    serde_json::to_string_pretty(&q.to_document()).expect("query documents always serialize")
}
