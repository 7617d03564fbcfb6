//! Generalized property graphs.
//!
//! Edges are symbols with an incidence (an ordered tuple or an unordered
//! multiset of node ids) rather than node pairs, so multi-edges, undirected
//! edges and n-ary hyperedges all live in the same structure. Graphs are
//! immutable once built; nodes and edges are stored sorted by id and are
//! addressed internally by their position in that order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::fresh_id;

/// Position of a node in the id-sorted node table of a graph.
pub type NodeIx = usize;
/// Position of an edge in the id-sorted edge table of a graph.
pub type EdgeIx = usize;

/// Property key holding the conventional type classification of an element.
pub const TYPE_KEY: &str = "type";
/// Property key used for human-readable labels.
pub const NAME_KEY: &str = "name";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("edge `{edge}` references unknown node `{node}`")]
    DanglingIncidence { edge: String, node: String },
    #[error("edge `{0}` must connect at least two member slots")]
    BadArity(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("walks do not meet: first ends at `{left}`, second starts at `{right}`")]
    JunctionMismatch { left: String, right: String },
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error("enumeration exceeded the yield cap of {0}")]
    BudgetExceeded(usize),
    #[error("cannot order a {left} value against a {right} value")]
    Incomparable {
        left: &'static str,
        right: &'static str,
    },
    #[error("malformed graph document: {0}")]
    Format(String),
}

/// A property value. Integers and reals form a single numeric kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Bool(bool),
    Int(i64),
    Real(f64),
    Text(String),
}

impl PropertyValue {
    pub fn kind(&self) -> &'static str {
        match self {
            PropertyValue::Bool(_) => "boolean",
            PropertyValue::Int(_) | PropertyValue::Real(_) => "number",
            PropertyValue::Text(_) => "text",
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            PropertyValue::Text(s) => Some(s),
            _ => None,
        }
    }

    fn as_real(&self) -> Option<f64> {
        match self {
            PropertyValue::Int(i) => Some(*i as f64),
            PropertyValue::Real(r) => Some(*r),
            _ => None,
        }
    }

    /// Equality with numeric unification; values of different kinds are never equal.
    pub fn value_eq(&self, other: &PropertyValue) -> bool {
        match (self, other) {
            (PropertyValue::Int(a), PropertyValue::Int(b)) => a == b,
            (PropertyValue::Bool(a), PropertyValue::Bool(b)) => a == b,
            (PropertyValue::Text(a), PropertyValue::Text(b)) => a == b,
            _ => match (self.as_real(), other.as_real()) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
        }
    }

    /// Ordering within a kind. Ordering across kinds is an error.
    pub fn compare(&self, other: &PropertyValue) -> Result<Ordering, GraphError> {
        match (self, other) {
            (PropertyValue::Int(a), PropertyValue::Int(b)) => Ok(a.cmp(b)),
            (PropertyValue::Text(a), PropertyValue::Text(b)) => Ok(a.cmp(b)),
            (PropertyValue::Bool(a), PropertyValue::Bool(b)) => Ok(a.cmp(b)),
            _ => match (self.as_real(), other.as_real()) {
                (Some(a), Some(b)) => Ok(a.total_cmp(&b)),
                _ => Err(GraphError::Incomparable {
                    left: self.kind(),
                    right: other.kind(),
                }),
            },
        }
    }
}

/// Literal syntax: text is double-quoted with JSON escapes, reals always carry
/// a fractional part or exponent.
impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Bool(b) => write!(f, "{b}"),
            PropertyValue::Int(i) => write!(f, "{i}"),
            PropertyValue::Real(r) => {
                let s = format!("{r:?}");
                if s.contains(['.', 'e', 'E']) || !r.is_finite() {
                    f.write_str(&s)
                } else {
                    write!(f, "{s}.0")
                }
            }
            PropertyValue::Text(s) => {
                let quoted = serde_json::to_string(s).map_err(|_| fmt::Error)?;
                f.write_str(&quoted)
            }
        }
    }
}

impl From<&str> for PropertyValue {
    fn from(s: &str) -> Self {
        PropertyValue::Text(s.to_string())
    }
}

impl From<i64> for PropertyValue {
    fn from(i: i64) -> Self {
        PropertyValue::Int(i)
    }
}

impl From<f64> for PropertyValue {
    fn from(r: f64) -> Self {
        PropertyValue::Real(r)
    }
}

impl From<bool> for PropertyValue {
    fn from(b: bool) -> Self {
        PropertyValue::Bool(b)
    }
}

pub type PropertyMap = BTreeMap<String, PropertyValue>;

/// Builds a property map from `(key, value)` pairs.
pub fn props<K, V, I>(pairs: I) -> PropertyMap
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: Into<PropertyValue>,
{
    pairs
        .into_iter()
        .map(|(k, v)| (k.into(), v.into()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IncidenceKind {
    Ordered,
    Unordered,
}

/// The members an edge connects.
#[derive(Debug, Clone, Eq)]
pub struct Incidence {
    kind: IncidenceKind,
    members: Vec<String>,
}

impl Incidence {
    pub fn ordered<I, S>(members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Incidence {
            kind: IncidenceKind::Ordered,
            members: members.into_iter().map(Into::into).collect(),
        }
    }

    pub fn unordered<I, S>(members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut members: Vec<String> = members.into_iter().map(Into::into).collect();
        members.sort();
        Incidence {
            kind: IncidenceKind::Unordered,
            members,
        }
    }

    pub fn kind(&self) -> IncidenceKind {
        self.kind
    }

    pub fn is_ordered(&self) -> bool {
        self.kind == IncidenceKind::Ordered
    }

    /// Member slots; for unordered incidences these are kept sorted.
    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn arity(&self) -> usize {
        self.members.len()
    }

    pub fn support(&self) -> BTreeSet<&str> {
        self.members.iter().map(String::as_str).collect()
    }

    /// More than one slot, a single distinct member.
    pub fn is_loop(&self) -> bool {
        self.arity() != 1 && self.support().len() == 1
    }

    pub fn is_directed_binary(&self) -> bool {
        self.is_ordered() && self.arity() == 2
    }
}

impl PartialEq for Incidence {
    fn eq(&self, other: &Self) -> bool {
        // unordered members are stored sorted, so multiset equality is slice equality
        self.kind == other.kind && self.members == other.members
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub props: PropertyMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub incidence: Incidence,
    pub props: PropertyMap,
    members: Vec<NodeIx>,
}

impl Edge {
    /// Member slots as node positions, in incidence order.
    pub fn member_ixs(&self) -> &[NodeIx] {
        &self.members
    }

    pub fn edge_type(&self) -> Option<&str> {
        self.props.get(TYPE_KEY).and_then(PropertyValue::as_text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegreeMode {
    All,
    Out,
    In,
}

/// An immutable generalized graph.
#[derive(Debug, Clone, Default)]
pub struct GeneralizedGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_lookup: HashMap<String, NodeIx>,
    edge_lookup: HashMap<String, EdgeIx>,
    incident: Vec<Vec<EdgeIx>>,
    forward: Vec<Vec<(EdgeIx, NodeIx)>>,
    backward: Vec<Vec<(EdgeIx, NodeIx)>>,
}

impl PartialEq for GeneralizedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl GeneralizedGraph {
    /// Validates the specs and builds the graph. Iteration order is by id.
    pub fn build(
        node_specs: Vec<(String, PropertyMap)>,
        edge_specs: Vec<(String, Incidence, PropertyMap)>,
    ) -> Result<Self, GraphError> {
        let mut nodes: Vec<Node> = node_specs
            .into_iter()
            .map(|(id, props)| Node { id, props })
            .collect();
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateId {
                kind: "node",
                id: w[0].id.clone(),
            });
        }
        let node_lookup: HashMap<String, NodeIx> = nodes
            .iter()
            .enumerate()
            .map(|(ix, n)| (n.id.clone(), ix))
            .collect();

        let mut edge_specs = edge_specs;
        edge_specs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut edges = Vec::with_capacity(edge_specs.len());
        for (id, incidence, props) in edge_specs {
            if edges.last().is_some_and(|e: &Edge| e.id == id) {
                return Err(GraphError::DuplicateId { kind: "edge", id });
            }
            if incidence.arity() < 2 {
                return Err(GraphError::BadArity(id));
            }
            let mut members = Vec::with_capacity(incidence.arity());
            for m in incidence.members() {
                match node_lookup.get(m) {
                    Some(&ix) => members.push(ix),
                    None => {
                        return Err(GraphError::DanglingIncidence {
                            edge: id,
                            node: m.clone(),
                        })
                    }
                }
            }
            edges.push(Edge {
                id,
                incidence,
                props,
                members,
            });
        }
        let edge_lookup = edges
            .iter()
            .enumerate()
            .map(|(ix, e)| (e.id.clone(), ix))
            .collect();

        let n = nodes.len();
        let mut incident = vec![Vec::new(); n];
        let mut forward = vec![Vec::new(); n];
        let mut backward = vec![Vec::new(); n];
        for (eix, edge) in edges.iter().enumerate() {
            let support: BTreeSet<NodeIx> = edge.members.iter().copied().collect();
            for &u in &support {
                incident[u].push(eix);
            }
            for (u, v) in step_pairs_of(edge) {
                forward[u].push((eix, v));
                backward[v].push((eix, u));
            }
        }
        for list in forward.iter_mut().chain(backward.iter_mut()) {
            list.sort_unstable();
        }
        Ok(GeneralizedGraph {
            nodes,
            edges,
            node_lookup,
            edge_lookup,
            incident,
            forward,
            backward,
        })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, ix: NodeIx) -> &Node {
        &self.nodes[ix]
    }

    pub fn edge(&self, ix: EdgeIx) -> &Edge {
        &self.edges[ix]
    }

    pub fn node_ix(&self, id: &str) -> Option<NodeIx> {
        self.node_lookup.get(id).copied()
    }

    pub fn edge_ix(&self, id: &str) -> Option<EdgeIx> {
        self.edge_lookup.get(id).copied()
    }

    fn require_node(&self, id: &str) -> Result<NodeIx, GraphError> {
        self.node_ix(id)
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    fn require_edge(&self, id: &str) -> Result<EdgeIx, GraphError> {
        self.edge_ix(id)
            .ok_or_else(|| GraphError::UnknownEdge(id.to_string()))
    }

    /// The `name` property when it is text, otherwise the id.
    pub fn display_name(&self, ix: NodeIx) -> &str {
        let node = &self.nodes[ix];
        node.props
            .get(NAME_KEY)
            .and_then(PropertyValue::as_text)
            .unwrap_or(&node.id)
    }

    /// Edges incident on a node.
    pub fn incident_edges(&self, u: NodeIx) -> &[EdgeIx] {
        &self.incident[u]
    }

    /// Legal single steps leaving `u`, as `(edge, next node)` sorted.
    pub fn steps_from(&self, u: NodeIx) -> &[(EdgeIx, NodeIx)] {
        &self.forward[u]
    }

    /// Legal single steps arriving at `v`, as `(edge, previous node)` sorted.
    pub fn steps_into(&self, v: NodeIx) -> &[(EdgeIx, NodeIx)] {
        &self.backward[v]
    }

    /// The pairs `(u, v)` such that `u -e-> v` is a one-step walk.
    pub fn step_pairs(&self, edge_id: &str) -> Result<BTreeSet<(String, String)>, GraphError> {
        let eix = self.require_edge(edge_id)?;
        Ok(step_pairs_of(&self.edges[eix])
            .into_iter()
            .map(|(u, v)| (self.nodes[u].id.clone(), self.nodes[v].id.clone()))
            .collect())
    }

    /// Nodes sharing an edge with `u`, including `u` itself unless `reduced`.
    /// An isolated node has an empty environment.
    pub fn environment(&self, id: &str, reduced: bool) -> Result<BTreeSet<String>, GraphError> {
        let u = self.require_node(id)?;
        let mut env: BTreeSet<String> = self.incident[u]
            .iter()
            .flat_map(|&e| self.edges[e].members.iter())
            .map(|&m| self.nodes[m].id.clone())
            .collect();
        if reduced {
            env.remove(id);
        }
        Ok(env)
    }

    pub fn degree(&self, id: &str, mode: DegreeMode) -> Result<usize, GraphError> {
        Ok(self.degree_of(self.require_node(id)?, mode))
    }

    /// `out` and `in` only count directed binary edges; loops count once in `all`.
    pub fn degree_of(&self, u: NodeIx, mode: DegreeMode) -> usize {
        let edges = &self.incident[u];
        match mode {
            DegreeMode::All => edges.len(),
            DegreeMode::Out => edges
                .iter()
                .filter(|&&e| {
                    let edge = &self.edges[e];
                    edge.incidence.is_directed_binary() && edge.members[0] == u
                })
                .count(),
            DegreeMode::In => edges
                .iter()
                .filter(|&&e| {
                    let edge = &self.edges[e];
                    edge.incidence.is_directed_binary() && edge.members[1] == u
                })
                .count(),
        }
    }

    /// Enumerates walks starting at `from` with 1..=`max_len` steps, ordered by
    /// length and then lexicographically by `(edge, node)` steps.
    pub fn enumerate_walks(
        &self,
        from: &str,
        to: Option<&str>,
        max_len: usize,
    ) -> Result<Vec<Walk>, GraphError> {
        let start = self.require_node(from)?;
        let target = to.map(|t| self.require_node(t)).transpose()?;
        let mut out = Vec::new();
        let mut frontier = vec![Walk {
            nodes: vec![start],
            edges: Vec::new(),
        }];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for walk in &frontier {
                for &(e, v) in self.steps_from(walk.terminus()) {
                    let mut w = walk.clone();
                    w.nodes.push(v);
                    w.edges.push(e);
                    next.push(w);
                }
            }
            out.extend(
                next.iter()
                    .filter(|w| target.is_none_or(|t| w.terminus() == t))
                    .cloned(),
            );
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        Ok(out)
    }

    /// Copies every node of `w` and re-instantiates each edge touching `w`
    /// once for every non-trivial substitution of copies for originals.
    /// Returns the new graph and the original-to-copy id map.
    pub fn clone_by_duplication(
        &self,
        w: &BTreeSet<String>,
    ) -> Result<(GeneralizedGraph, BTreeMap<String, String>), GraphError> {
        for id in w {
            self.require_node(id)?;
        }
        let mut node_ids: BTreeSet<String> = self.nodes.iter().map(|n| n.id.clone()).collect();
        let mut copies = BTreeMap::new();
        for id in w {
            let fresh = fresh_id(id, |c| node_ids.contains(c));
            node_ids.insert(fresh.clone());
            copies.insert(id.clone(), fresh);
        }
        let mut node_specs: Vec<(String, PropertyMap)> = self
            .nodes
            .iter()
            .map(|n| (n.id.clone(), n.props.clone()))
            .collect();
        for (orig, copy) in &copies {
            let ix = self.node_lookup[orig];
            node_specs.push((copy.clone(), self.nodes[ix].props.clone()));
        }
        let mut edge_ids: BTreeSet<String> = self.edges.iter().map(|e| e.id.clone()).collect();
        let mut edge_specs: Vec<(String, Incidence, PropertyMap)> = self
            .edges
            .iter()
            .map(|e| (e.id.clone(), e.incidence.clone(), e.props.clone()))
            .collect();
        for edge in &self.edges {
            let slots: Vec<usize> = edge
                .incidence
                .members()
                .iter()
                .enumerate()
                .filter(|(_, m)| copies.contains_key(*m))
                .map(|(i, _)| i)
                .collect();
            let mut seen: Vec<Incidence> = vec![edge.incidence.clone()];
            for mask in 1u64..(1u64 << slots.len()) {
                let mut members = edge.incidence.members().to_vec();
                for (bit, &slot) in slots.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        members[slot] = copies[&members[slot]].clone();
                    }
                }
                let incidence = match edge.incidence.kind() {
                    IncidenceKind::Ordered => Incidence::ordered(members),
                    IncidenceKind::Unordered => Incidence::unordered(members),
                };
                if seen.contains(&incidence) {
                    continue;
                }
                seen.push(incidence.clone());
                let fresh = fresh_id(&edge.id, |c| edge_ids.contains(c));
                edge_ids.insert(fresh.clone());
                edge_specs.push((fresh, incidence, edge.props.clone()));
            }
        }
        Ok((GeneralizedGraph::build(node_specs, edge_specs)?, copies))
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        doc.into_graph()
    }

    /// Pretty JSON with elements sorted by id and property keys sorted.
    pub fn to_json(&self) -> String {
        let doc = GraphDocument::from_graph(self);
        serde_json::to_string_pretty(&doc).expect("graph documents always serialize")
    }
}

fn step_pairs_of(edge: &Edge) -> BTreeSet<(NodeIx, NodeIx)> {
    let m = &edge.members;
    let mut pairs = BTreeSet::new();
    match edge.incidence.kind() {
        IncidenceKind::Ordered => {
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    if m[i] != m[j] {
                        pairs.insert((m[i], m[j]));
                    }
                }
            }
        }
        IncidenceKind::Unordered => {
            for &a in m {
                for &b in m {
                    if a != b {
                        pairs.insert((a, b));
                    }
                }
            }
        }
    }
    if edge.incidence.is_loop() {
        pairs.insert((m[0], m[0]));
    }
    pairs
}

/// JSON document form of a graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<NodeDocument>,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDocument {
    pub id: String,
    #[serde(default)]
    pub props: PropertyMap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub id: String,
    pub ordered: bool,
    pub nodes: Vec<String>,
    #[serde(default)]
    pub props: PropertyMap,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<GeneralizedGraph, GraphError> {
        let nodes = self.nodes.into_iter().map(|n| (n.id, n.props)).collect();
        let edges = self
            .edges
            .into_iter()
            .map(|e| {
                let inc = if e.ordered {
                    Incidence::ordered(e.nodes)
                } else {
                    Incidence::unordered(e.nodes)
                };
                (e.id, inc, e.props)
            })
            .collect();
        GeneralizedGraph::build(nodes, edges)
    }

    pub fn from_graph(g: &GeneralizedGraph) -> Self {
        GraphDocument {
            nodes: g
                .nodes
                .iter()
                .map(|n| NodeDocument {
                    id: n.id.clone(),
                    props: n.props.clone(),
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    id: e.id.clone(),
                    ordered: e.incidence.is_ordered(),
                    nodes: e.incidence.members().to_vec(),
                    props: e.props.clone(),
                })
                .collect(),
        }
    }
}

/// A selection of nodes and edges of a parent graph, by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubgraphRef {
    pub nodes: BTreeSet<NodeIx>,
    pub edges: BTreeSet<EdgeIx>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgraphViolation {
    NodeOutOfRange(NodeIx),
    EdgeOutOfRange(EdgeIx),
    /// The edge is selected but this member node is not.
    DanglingEndpoint {
        edge: String,
        node: String,
    },
}

impl SubgraphRef {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn whole(g: &GeneralizedGraph) -> Self {
        SubgraphRef {
            nodes: (0..g.node_count()).collect(),
            edges: (0..g.edge_count()).collect(),
        }
    }

    /// Resolves ids against `g`; incidence closure is not checked here.
    pub fn from_ids<N, E>(g: &GeneralizedGraph, nodes: N, edges: E) -> Result<Self, GraphError>
    where
        N: IntoIterator,
        N::Item: AsRef<str>,
        E: IntoIterator,
        E::Item: AsRef<str>,
    {
        let nodes = nodes
            .into_iter()
            .map(|id| g.require_node(id.as_ref()))
            .collect::<Result<_, _>>()?;
        let edges = edges
            .into_iter()
            .map(|id| g.require_edge(id.as_ref()))
            .collect::<Result<_, _>>()?;
        Ok(SubgraphRef { nodes, edges })
    }

    /// Selects the given nodes together with every edge among them.
    pub fn induced<N>(g: &GeneralizedGraph, nodes: N) -> Result<Self, GraphError>
    where
        N: IntoIterator,
        N::Item: AsRef<str>,
    {
        let nodes: BTreeSet<NodeIx> = nodes
            .into_iter()
            .map(|id| g.require_node(id.as_ref()))
            .collect::<Result<_, _>>()?;
        let edges = (0..g.edge_count())
            .filter(|&e| g.edge(e).members.iter().all(|m| nodes.contains(m)))
            .collect();
        Ok(SubgraphRef { nodes, edges })
    }

    pub fn contains_node(&self, ix: NodeIx) -> bool {
        self.nodes.contains(&ix)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn violations(&self, g: &GeneralizedGraph) -> Vec<SubgraphViolation> {
        let mut out = Vec::new();
        for &n in &self.nodes {
            if n >= g.node_count() {
                out.push(SubgraphViolation::NodeOutOfRange(n));
            }
        }
        for &e in &self.edges {
            if e >= g.edge_count() {
                out.push(SubgraphViolation::EdgeOutOfRange(e));
                continue;
            }
            let edge = g.edge(e);
            let missing: BTreeSet<NodeIx> = edge
                .members
                .iter()
                .copied()
                .filter(|m| !self.nodes.contains(m))
                .collect();
            for m in missing {
                out.push(SubgraphViolation::DanglingEndpoint {
                    edge: edge.id.clone(),
                    node: g.node(m).id.clone(),
                });
            }
        }
        out
    }

    pub fn is_subgraph_of(&self, g: &GeneralizedGraph) -> bool {
        self.violations(g).is_empty()
    }

    /// Connected through its own edges. The empty selection counts as connected.
    pub fn is_connected(&self, g: &GeneralizedGraph) -> bool {
        let Some(&first) = self.nodes.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([first]);
        let mut queue = VecDeque::from([first]);
        while let Some(u) = queue.pop_front() {
            for &e in g.incident_edges(u) {
                if !self.edges.contains(&e) {
                    continue;
                }
                for &m in &g.edge(e).members {
                    if seen.insert(m) {
                        queue.push_back(m);
                    }
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    /// `{a, b | e1}` using ids.
    pub fn describe(&self, g: &GeneralizedGraph) -> String {
        let nodes: Vec<&str> = self.nodes.iter().map(|&n| g.node(n).id.as_str()).collect();
        let edges: Vec<&str> = self.edges.iter().map(|&e| g.edge(e).id.as_str()).collect();
        if edges.is_empty() {
            format!("{{{}}}", nodes.join(", "))
        } else {
            format!("{{{} | {}}}", nodes.join(", "), edges.join(", "))
        }
    }
}

pub fn is_subgraph(s: &SubgraphRef, g: &GeneralizedGraph) -> bool {
    s.is_subgraph_of(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub max_nodes: usize,
    pub include_empty: bool,
    pub connected_only: bool,
    /// Yielding more than this many subgraphs is an error.
    pub yield_cap: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            max_nodes: 3,
            include_empty: true,
            connected_only: false,
            yield_cap: 1_000_000,
        }
    }
}

impl EnumerateOptions {
    pub fn up_to(max_nodes: usize) -> Self {
        EnumerateOptions {
            max_nodes,
            ..Self::default()
        }
    }
}

/// Streams every subgraph with at most `max_nodes` nodes exactly once: node
/// subsets by size then lexicographically, each crossed with every subset of
/// the edges closed over it.
pub fn enumerate_subgraphs(g: &GeneralizedGraph, opts: EnumerateOptions) -> SubgraphIter<'_> {
    SubgraphIter::new(g, opts)
}

pub struct SubgraphIter<'g> {
    g: &'g GeneralizedGraph,
    opts: EnumerateOptions,
    size: usize,
    combo: Option<Vec<NodeIx>>,
    closed: Vec<EdgeIx>,
    mask: u64,
    yielded: usize,
    done: bool,
}

const MAX_CLOSED_EDGES: usize = 40;

impl<'g> SubgraphIter<'g> {
    fn new(g: &'g GeneralizedGraph, opts: EnumerateOptions) -> Self {
        let size = if opts.include_empty { 0 } else { 1 };
        let mut it = SubgraphIter {
            g,
            opts,
            size,
            combo: None,
            closed: Vec::new(),
            mask: 0,
            yielded: 0,
            done: false,
        };
        it.start_size();
        it
    }

    fn start_size(&mut self) {
        if self.size > self.opts.max_nodes.min(self.g.node_count()) {
            self.combo = None;
            self.done = true;
            return;
        }
        self.combo = Some((0..self.size).collect());
        self.load_combo();
    }

    fn load_combo(&mut self) {
        let combo = self.combo.as_ref().expect("combo present");
        let set: BTreeSet<NodeIx> = combo.iter().copied().collect();
        self.closed = (0..self.g.edge_count())
            .filter(|&e| self.g.edge(e).members.iter().all(|m| set.contains(m)))
            .collect();
        self.mask = 0;
    }

    fn advance_combo(&mut self) {
        let n = self.g.node_count();
        let k = self.size;
        let combo = self.combo.as_mut().expect("combo present");
        let mut i = k;
        while i > 0 {
            i -= 1;
            if combo[i] < n - k + i {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                self.load_combo();
                return;
            }
        }
        self.size += 1;
        self.start_size();
    }
}

impl Iterator for SubgraphIter<'_> {
    type Item = Result<SubgraphRef, GraphError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            if self.closed.len() > MAX_CLOSED_EDGES {
                self.done = true;
                return Some(Err(GraphError::BudgetExceeded(self.opts.yield_cap)));
            }
            if self.mask >= 1u64 << self.closed.len() {
                self.advance_combo();
                continue;
            }
            let combo = self.combo.as_ref().expect("combo present");
            let sub = SubgraphRef {
                nodes: combo.iter().copied().collect(),
                edges: self
                    .closed
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| self.mask & (1 << bit) != 0)
                    .map(|(_, &e)| e)
                    .collect(),
            };
            self.mask += 1;
            if self.opts.connected_only && !sub.is_connected(self.g) {
                continue;
            }
            if self.yielded >= self.opts.yield_cap {
                self.done = true;
                return Some(Err(GraphError::BudgetExceeded(self.opts.yield_cap)));
            }
            self.yielded += 1;
            return Some(Ok(sub));
        }
    }
}

/// An alternating node/edge sequence built from legal steps. Nodes and edges may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    nodes: Vec<NodeIx>,
    edges: Vec<EdgeIx>,
}

impl Walk {
    pub fn new(
        g: &GeneralizedGraph,
        nodes: Vec<NodeIx>,
        edges: Vec<EdgeIx>,
    ) -> Result<Self, GraphError> {
        if edges.is_empty() || nodes.len() != edges.len() + 1 {
            return Err(GraphError::InvalidWalk(format!(
                "{} nodes and {} edges",
                nodes.len(),
                edges.len()
            )));
        }
        for (i, &e) in edges.iter().enumerate() {
            let (u, v) = (nodes[i], nodes[i + 1]);
            if e >= g.edge_count() || u >= g.node_count() || v >= g.node_count() {
                return Err(GraphError::InvalidWalk("position out of range".into()));
            }
            if g.steps_from(u).binary_search(&(e, v)).is_err() {
                return Err(GraphError::InvalidWalk(format!(
                    "`{}` is not a step from `{}` to `{}`",
                    g.edge(e).id,
                    g.node(u).id,
                    g.node(v).id
                )));
            }
        }
        Ok(Walk { nodes, edges })
    }

    pub fn from_ids(
        g: &GeneralizedGraph,
        nodes: &[&str],
        edges: &[&str],
    ) -> Result<Self, GraphError> {
        let nodes = nodes
            .iter()
            .map(|id| g.require_node(id))
            .collect::<Result<_, _>>()?;
        let edges = edges
            .iter()
            .map(|id| g.require_edge(id))
            .collect::<Result<_, _>>()?;
        Walk::new(g, nodes, edges)
    }

    /// Builds from parts already known to be legal steps.
    pub(crate) fn from_parts(nodes: Vec<NodeIx>, edges: Vec<EdgeIx>) -> Self {
        debug_assert_eq!(nodes.len(), edges.len() + 1);
        Walk { nodes, edges }
    }

    pub fn node_seq(&self) -> &[NodeIx] {
        &self.nodes
    }

    pub fn edge_seq(&self) -> &[EdgeIx] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn origin(&self) -> NodeIx {
        self.nodes[0]
    }

    pub fn terminus(&self) -> NodeIx {
        *self.nodes.last().expect("walks have at least one node")
    }

    pub fn is_closed(&self) -> bool {
        self.origin() == self.terminus()
    }

    /// Closed and without a repeated edge.
    pub fn is_cycle(&self) -> bool {
        let distinct: BTreeSet<EdgeIx> = self.edges.iter().copied().collect();
        self.is_closed() && distinct.len() == self.edges.len()
    }

    /// The junction node appears once in the result.
    pub fn concat(&self, other: &Walk, g: &GeneralizedGraph) -> Result<Walk, GraphError> {
        if self.terminus() != other.origin() {
            return Err(GraphError::JunctionMismatch {
                left: g.node(self.terminus()).id.clone(),
                right: g.node(other.origin()).id.clone(),
            });
        }
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&other.nodes[1..]);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Walk { nodes, edges })
    }

    /// `a -e1-> b -e2-> c` using ids.
    pub fn describe(&self, g: &GeneralizedGraph) -> String {
        let mut out = g.node(self.nodes[0]).id.clone();
        for (e, v) in self.edges.iter().zip(&self.nodes[1..]) {
            out.push_str(&format!(" -{}-> {}", g.edge(*e).id, g.node(*v).id));
        }
        out
    }
}
