//! Deciding `S ⊨ Q`.
//!
//! Every query node independently looks for a witness data node `v`; the node
//! holds when `θ_n(v, S)` holds and every incident query edge, read from the
//! correct end and with its sign applied, has (or lacks) a walk anchored at
//! `v` satisfying the edge predicate and both endpoint predicates.
//!
//! Edge predicates built only from `types =~` regexes and `src`/`dst`
//! membership are decided exactly over unbounded walks by reachability in the
//! product of the data graph and an automaton. Anything else falls back to a
//! search over walks of at most `max_walk_len` steps.

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::graph::{
    enumerate_subgraphs, EdgeIx, EnumerateOptions, GeneralizedGraph, GraphError, NodeIx,
    PropertyValue, SubgraphIter, SubgraphRef, Walk,
};
use crate::predicate::derivative::{Residual, ResidualTable};
use crate::predicate::{
    normalize, CmpOp, EvalContext, EvalError, Formula, Label, NodeAtom, NodePredicate, PathAtom,
    PathPredicate, Quantifier, TypeNfa, TypeRegex, WalkEnd,
};
use crate::query::{Query, Sign};

/// Clause budget for the disjunctive normal form of an edge predicate.
const MAX_CLAUSES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchConfig {
    /// Longest walk considered by the bounded search.
    pub max_walk_len: usize,
    /// Use the bounded search for every edge predicate.
    pub oracle_mode: bool,
    /// Upper bound on subgraphs examined by enumeration.
    pub yield_cap: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            max_walk_len: 8,
            oracle_mode: false,
            yield_cap: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("not a subgraph: {0}")]
    InvalidSubgraph(String),
    #[error("unknown query element `{0}`")]
    UnknownQueryElement(String),
    #[error("max_walk_len must be at least 1")]
    ZeroWalkLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeEnd {
    Origin,
    Terminus,
}

impl fmt::Display for EdgeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeEnd::Origin => "origin",
            EdgeEnd::Terminus => "terminus",
        })
    }
}

/// One conjunctive clause of a regex/membership edge predicate.
struct Clause {
    nfa: TypeNfa,
    /// Reversed transitions: `rev[q]` lists `(label, p)` with `p -label-> q`.
    rev: Vec<Vec<(Label, usize)>>,
    /// Required membership of the walk origin / terminus in `S`.
    src: Option<bool>,
    dst: Option<bool>,
}

enum Slot {
    Regex(usize),
    Len(CmpOp, i64),
    Endpoint(WalkEnd, bool),
    Quantified(usize),
}

struct QuantifiedAtom {
    quantifier: Quantifier,
    key: String,
    op: CmpOp,
    value: PropertyValue,
}

struct Bounded {
    formula: Formula<Slot>,
    /// Initial residual id per regex slot.
    regexes: Vec<usize>,
    quantified: Vec<QuantifiedAtom>,
}

enum Strategy {
    Exact(Vec<Clause>),
    Bounded(Bounded),
}

struct CompiledEdge {
    id: String,
    from: usize,
    to: usize,
    sign: Sign,
    strategy: Strategy,
    uses_s: bool,
}

/// Per-subgraph valuation tables over data nodes.
struct Tables {
    theta: Vec<Vec<bool>>,
    origin_ok: Vec<Vec<bool>>,
    terminus_ok: Vec<Vec<bool>>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct SearchState {
    node: NodeIx,
    depth: usize,
    residuals: Vec<usize>,
    flags: Vec<bool>,
}

/// A query compiled against a data graph, reusable across subgraphs.
pub struct Matcher<'a> {
    g: &'a GeneralizedGraph,
    cfg: MatchConfig,
    node_ids: Vec<String>,
    node_signs: Vec<Sign>,
    node_theta: Vec<NodePredicate>,
    node_uses_s: Vec<bool>,
    /// Query-node incidences as `(edge position, end)`; loops appear at both ends.
    incident: Vec<Vec<(usize, EdgeEnd)>>,
    edges: Vec<CompiledEdge>,
    fixed_theta: Vec<Option<Vec<bool>>>,
    fixed_edges: Vec<Option<(Vec<bool>, Vec<bool>)>>,
    residuals: RefCell<ResidualTable>,
}

fn node_uses_s(p: &NodePredicate) -> bool {
    p.atoms().iter().any(|a| {
        matches!(
            a,
            NodeAtom::InS { .. } | NodeAtom::ReachableFromS | NodeAtom::ReachesS
        )
    })
}

fn path_uses_s(p: &PathPredicate) -> bool {
    p.atoms()
        .iter()
        .any(|a| matches!(a, PathAtom::Endpoint { .. }))
}

/// Disjunctive normal form over regex and endpoint atoms, or `None` when the
/// predicate falls outside that class or exceeds the clause budget.
fn exact_clauses(theta: &PathPredicate) -> Option<Vec<Clause>> {
    fn dnf(f: &PathPredicate) -> Option<Vec<Vec<PathAtom>>> {
        match f {
            Formula::True => Some(vec![vec![]]),
            Formula::False => Some(vec![]),
            Formula::Atom(a @ (PathAtom::Types(_) | PathAtom::Endpoint { .. })) => {
                Some(vec![vec![a.clone()]])
            }
            Formula::Atom(_) | Formula::Not(_) => None,
            Formula::Or(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    out.extend(dnf(x)?);
                    if out.len() > MAX_CLAUSES {
                        return None;
                    }
                }
                Some(out)
            }
            Formula::And(xs) => {
                let mut out = vec![vec![]];
                for x in xs {
                    let part = dnf(x)?;
                    let mut next = Vec::new();
                    for left in &out {
                        for right in &part {
                            let mut c: Vec<PathAtom> = left.clone();
                            c.extend(right.iter().cloned());
                            next.push(c);
                        }
                    }
                    if next.len() > MAX_CLAUSES {
                        return None;
                    }
                    out = next;
                }
                Some(out)
            }
        }
    }

    let mut clauses = Vec::new();
    'clause: for atoms in dnf(&normalize(theta))? {
        let mut regexes: Vec<&TypeRegex> = Vec::new();
        let (mut src, mut dst) = (None, None);
        for atom in &atoms {
            match atom {
                PathAtom::Types(re) => regexes.push(re),
                PathAtom::Endpoint { end, negated } => {
                    let slot = match end {
                        WalkEnd::Src => &mut src,
                        WalkEnd::Dst => &mut dst,
                    };
                    match *slot {
                        Some(want) if want == *negated => continue 'clause,
                        _ => *slot = Some(!negated),
                    }
                }
                _ => unreachable!("filtered by dnf"),
            }
        }
        let nfa = regexes
            .iter()
            .map(|re| TypeNfa::compile(re))
            .reduce(|a, b| a.intersect(&b))
            .unwrap_or_else(TypeNfa::universal);
        let mut rev = vec![Vec::new(); nfa.state_count()];
        for p in 0..nfa.state_count() {
            for (label, q) in nfa.transitions(p) {
                rev[*q].push((label.clone(), p));
            }
        }
        clauses.push(Clause { nfa, rev, src, dst });
    }
    Some(clauses)
}

/// Search states with a back pointer to the predecessor and the edge taken.
type Arena = Vec<(SearchState, Option<(usize, EdgeIx)>)>;

impl<'a> Matcher<'a> {
    pub fn new(q: &Query, g: &'a GeneralizedGraph, cfg: MatchConfig) -> Result<Self, MatchError> {
        if cfg.max_walk_len == 0 {
            return Err(MatchError::ZeroWalkLength);
        }
        let node_ids: Vec<String> = q.nodes().map(|n| n.id.clone()).collect();
        let position = |id: &str| {
            node_ids
                .binary_search_by(|x| x.as_str().cmp(id))
                .expect("edge endpoints exist")
        };
        let mut residuals = ResidualTable::default();
        let mut incident = vec![Vec::new(); node_ids.len()];
        let mut edges = Vec::new();
        for (k, e) in q.edges().enumerate() {
            let (from, to) = (position(&e.from), position(&e.to));
            incident[from].push((k, EdgeEnd::Origin));
            incident[to].push((k, EdgeEnd::Terminus));
            let exact = if cfg.oracle_mode {
                None
            } else {
                exact_clauses(&e.theta)
            };
            let strategy = match exact {
                Some(clauses) => Strategy::Exact(clauses),
                None => Strategy::Bounded(compile_bounded(&e.theta, &mut residuals)),
            };
            edges.push(CompiledEdge {
                id: e.id.clone(),
                from,
                to,
                sign: e.sign,
                strategy,
                uses_s: path_uses_s(&e.theta),
            });
        }
        let node_theta: Vec<NodePredicate> = q.nodes().map(|n| n.theta.clone()).collect();
        let node_uses_s: Vec<bool> = node_theta.iter().map(node_uses_s).collect();
        let mut m = Matcher {
            g,
            cfg,
            node_signs: q.nodes().map(|n| n.sign).collect(),
            node_ids,
            node_theta,
            node_uses_s,
            incident,
            edges,
            fixed_theta: Vec::new(),
            fixed_edges: Vec::new(),
            residuals: RefCell::new(residuals),
        };
        // Anything that does not look at S is evaluated once, here.
        let empty = SubgraphRef::empty();
        let ctx = EvalContext::new(g, &empty);
        let mut fixed_theta = Vec::new();
        for i in 0..m.node_ids.len() {
            fixed_theta.push(if m.node_uses_s[i] {
                None
            } else {
                Some(m.theta_vector(i, &ctx)?)
            });
        }
        let mut fixed_edges = Vec::new();
        for e in &m.edges {
            let fixed = match (&fixed_theta[e.from], &fixed_theta[e.to]) {
                (Some(o), Some(t)) if !e.uses_s => Some(m.edge_vectors(e, o, t, &empty)?),
                _ => None,
            };
            fixed_edges.push(fixed);
        }
        m.fixed_theta = fixed_theta;
        m.fixed_edges = fixed_edges;
        Ok(m)
    }

    pub fn graph(&self) -> &'a GeneralizedGraph {
        self.g
    }

    pub fn config(&self) -> MatchConfig {
        self.cfg
    }

    /// Whether the edge is decided by the bounded search.
    pub fn is_bounded(&self, edge_id: &str) -> Result<bool, MatchError> {
        let e = self.edge_position(edge_id)?;
        Ok(matches!(self.edges[e].strategy, Strategy::Bounded(_)))
    }

    fn node_position(&self, id: &str) -> Result<usize, MatchError> {
        self.node_ids
            .binary_search_by(|x| x.as_str().cmp(id))
            .map_err(|_| MatchError::UnknownQueryElement(id.to_string()))
    }

    fn edge_position(&self, id: &str) -> Result<usize, MatchError> {
        self.edges
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .map_err(|_| MatchError::UnknownQueryElement(id.to_string()))
    }

    fn check_subgraph(&self, s: &SubgraphRef) -> Result<(), MatchError> {
        let violations = s.violations(self.g);
        if violations.is_empty() {
            Ok(())
        } else {
            let text: Vec<String> = violations.iter().map(|v| format!("{v:?}")).collect();
            Err(MatchError::InvalidSubgraph(text.join(", ")))
        }
    }

    fn theta_vector(&self, i: usize, ctx: &EvalContext<'_>) -> Result<Vec<bool>, MatchError> {
        (0..self.g.node_count())
            .map(|v| ctx.node(&self.node_theta[i], v).map_err(MatchError::from))
            .collect()
    }

    fn tables(&self, s: &SubgraphRef) -> Result<Tables, MatchError> {
        let ctx = EvalContext::new(self.g, s);
        let mut theta = Vec::with_capacity(self.node_ids.len());
        for i in 0..self.node_ids.len() {
            theta.push(match &self.fixed_theta[i] {
                Some(t) => t.clone(),
                None => self.theta_vector(i, &ctx)?,
            });
        }
        let mut origin_ok = Vec::with_capacity(self.edges.len());
        let mut terminus_ok = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let (o, t) = match &self.fixed_edges[k] {
                Some(pair) => pair.clone(),
                None => self.edge_vectors(e, &theta[e.from], &theta[e.to], s)?,
            };
            origin_ok.push(o);
            terminus_ok.push(t);
        }
        Ok(Tables {
            theta,
            origin_ok,
            terminus_ok,
        })
    }

    /// For every data node, whether it is the origin (resp. terminus) of a
    /// walk satisfying the edge predicate and both endpoint predicates.
    fn edge_vectors(
        &self,
        e: &CompiledEdge,
        good_origin: &[bool],
        good_terminus: &[bool],
        s: &SubgraphRef,
    ) -> Result<(Vec<bool>, Vec<bool>), MatchError> {
        let n = self.g.node_count();
        let mut origin_ok = vec![false; n];
        let mut terminus_ok = vec![false; n];
        match &e.strategy {
            Strategy::Exact(clauses) => {
                for c in clauses {
                    let (om, tm) = clause_masks(c, good_origin, good_terminus, s);
                    let back = self.backward_closure(c, &tm);
                    let fwd = self.forward_closure(c, &om);
                    let states = c.nfa.state_count();
                    for v in 0..n {
                        origin_ok[v] |= om[v] && back[v * states + c.nfa.start()];
                        terminus_ok[v] |= tm[v]
                            && (0..states).any(|f| c.nfa.is_accepting(f) && fwd[v * states + f]);
                    }
                }
            }
            Strategy::Bounded(b) => {
                for u in (0..n).filter(|&u| good_origin[u]) {
                    self.bounded_search(b, u, good_terminus, s, &mut |_, state| {
                        origin_ok[u] = true;
                        terminus_ok[state.node] = true;
                        false
                    })?;
                }
            }
        }
        Ok((origin_ok, terminus_ok))
    }

    /// Product states `(u, p)` from which one or more steps reach an
    /// accepting state at a node of `targets`.
    fn backward_closure(&self, c: &Clause, targets: &[bool]) -> Vec<bool> {
        let states = c.nfa.state_count();
        let mut mark = vec![false; self.g.node_count() * states];
        let mut stack: Vec<(NodeIx, usize)> = Vec::new();
        let expand =
            |w: NodeIx, q: usize, mark: &mut Vec<bool>, stack: &mut Vec<(NodeIx, usize)>| {
                for &(e, u) in self.g.steps_into(w) {
                    let ty = self.g.edge(e).edge_type();
                    for (label, p) in &c.rev[q] {
                        if label.matches(ty) && !mark[u * states + p] {
                            mark[u * states + p] = true;
                            stack.push((u, *p));
                        }
                    }
                }
            };
        for w in (0..self.g.node_count()).filter(|&w| targets[w]) {
            for f in (0..states).filter(|&f| c.nfa.is_accepting(f)) {
                expand(w, f, &mut mark, &mut stack);
            }
        }
        while let Some((w, q)) = stack.pop() {
            expand(w, q, &mut mark, &mut stack);
        }
        mark
    }

    /// Product states reached in one or more steps from `(u, start)` with
    /// `u` in `sources`.
    fn forward_closure(&self, c: &Clause, sources: &[bool]) -> Vec<bool> {
        let states = c.nfa.state_count();
        let mut mark = vec![false; self.g.node_count() * states];
        let mut stack: Vec<(NodeIx, usize)> = Vec::new();
        let expand =
            |u: NodeIx, p: usize, mark: &mut Vec<bool>, stack: &mut Vec<(NodeIx, usize)>| {
                for &(e, w) in self.g.steps_from(u) {
                    for q in c.nfa.successors(p, self.g.edge(e).edge_type()) {
                        if !mark[w * states + q] {
                            mark[w * states + q] = true;
                            stack.push((w, q));
                        }
                    }
                }
            };
        for u in (0..self.g.node_count()).filter(|&u| sources[u]) {
            expand(u, c.nfa.start(), &mut mark, &mut stack);
        }
        while let Some((u, p)) = stack.pop() {
            expand(u, p, &mut mark, &mut stack);
        }
        mark
    }

    /// Shortest walk of one or more steps in the product from a source node
    /// to an accepting state at a node accepted by `target`.
    fn product_walk(
        &self,
        c: &Clause,
        sources: &[NodeIx],
        target: impl Fn(NodeIx) -> bool,
    ) -> Option<Walk> {
        #[derive(Clone, Copy)]
        enum Prev {
            Source(NodeIx),
            State(NodeIx, usize),
        }
        let states = c.nfa.state_count();
        let mut parent: HashMap<(NodeIx, usize), (Prev, EdgeIx)> = HashMap::new();
        let mut queue: VecDeque<(Prev, NodeIx, usize)> = sources
            .iter()
            .map(|&u| (Prev::Source(u), u, c.nfa.start()))
            .collect();
        while let Some((here, u, p)) = queue.pop_front() {
            for &(e, w) in self.g.steps_from(u) {
                for q in c.nfa.successors(p, self.g.edge(e).edge_type()) {
                    if parent.contains_key(&(w, q)) {
                        continue;
                    }
                    parent.insert((w, q), (here, e));
                    if c.nfa.is_accepting(q) && target(w) {
                        let mut nodes = vec![w];
                        let mut edges = Vec::new();
                        let mut at = (w, q);
                        loop {
                            let (prev, edge) = parent[&at];
                            edges.push(edge);
                            match prev {
                                Prev::Source(origin) => {
                                    nodes.push(origin);
                                    break;
                                }
                                Prev::State(x, r) => {
                                    nodes.push(x);
                                    at = (x, r);
                                }
                            }
                        }
                        nodes.reverse();
                        edges.reverse();
                        return Some(Walk::from_parts(nodes, edges));
                    }
                    queue.push_back((Prev::State(w, q), w, q));
                }
            }
        }
        debug_assert!(parent.len() <= self.g.node_count() * states);
        None
    }

    /// Breadth-first search over walks from `origin` of at most
    /// `max_walk_len` steps, identified up to everything the predicate can
    /// still observe. Calls `found` on each accepted state; stops when it
    /// returns `true`. Returns the accepted state arena index that stopped
    /// the search, with the arena for walk reconstruction.
    fn bounded_search(
        &self,
        b: &Bounded,
        origin: NodeIx,
        good_terminus: &[bool],
        s: &SubgraphRef,
        found: &mut impl FnMut(usize, &SearchState) -> bool,
    ) -> Result<Option<(usize, Arena)>, MatchError> {
        let mut table = self.residuals.borrow_mut();
        let root = SearchState {
            node: origin,
            depth: 0,
            residuals: b.regexes.clone(),
            flags: b
                .quantified
                .iter()
                .map(|q| q.quantifier == Quantifier::All)
                .collect(),
        };
        let mut arena: Arena = vec![(root.clone(), None)];
        let mut seen: HashMap<SearchState, usize> = HashMap::from([(root, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(ix) = queue.pop_front() {
            let state = arena[ix].0.clone();
            if state.depth >= self.cfg.max_walk_len {
                continue;
            }
            for &(e, w) in self.g.steps_from(state.node) {
                let edge = self.g.edge(e);
                let ty = edge.edge_type();
                let residuals: Vec<usize> =
                    state.residuals.iter().map(|&r| table.step(r, ty)).collect();
                let mut flags = state.flags.clone();
                for (flag, qa) in flags.iter_mut().zip(&b.quantified) {
                    let hit = match edge.props.get(&qa.key) {
                        Some(actual) => crate::predicate::compare_values(actual, qa.op, &qa.value)?,
                        None => false,
                    };
                    match qa.quantifier {
                        Quantifier::All => *flag &= hit,
                        Quantifier::Any => *flag |= hit,
                    }
                }
                let next = SearchState {
                    node: w,
                    depth: state.depth + 1,
                    residuals,
                    flags,
                };
                if seen.contains_key(&next) {
                    continue;
                }
                let nix = arena.len();
                seen.insert(next.clone(), nix);
                arena.push((next.clone(), Some((ix, e))));
                queue.push_back(nix);
                if good_terminus[w] {
                    let accepted = b
                        .formula
                        .evaluate(&mut |slot| -> Result<bool, MatchError> {
                            Ok(match slot {
                                Slot::Regex(k) => table.get(next.residuals[*k]).nullable(),
                                Slot::Len(op, value) => op.holds((next.depth as i64).cmp(value)),
                                Slot::Endpoint(WalkEnd::Src, negated) => {
                                    s.contains_node(origin) != *negated
                                }
                                Slot::Endpoint(WalkEnd::Dst, negated) => {
                                    s.contains_node(w) != *negated
                                }
                                Slot::Quantified(k) => next.flags[*k],
                            })
                        })?;
                    if accepted && found(nix, &next) {
                        return Ok(Some((nix, arena)));
                    }
                }
            }
        }
        Ok(None)
    }

    fn bounded_walk(
        &self,
        b: &Bounded,
        origin: NodeIx,
        good_terminus: &[bool],
        s: &SubgraphRef,
        target: impl Fn(NodeIx) -> bool,
    ) -> Result<Option<Walk>, MatchError> {
        let hit = self.bounded_search(b, origin, good_terminus, s, &mut |_, st| target(st.node))?;
        Ok(hit.map(|(mut ix, arena)| {
            let mut nodes = vec![arena[ix].0.node];
            let mut edges = Vec::new();
            while let Some((prev, e)) = arena[ix].1 {
                edges.push(e);
                nodes.push(arena[prev].0.node);
                ix = prev;
            }
            nodes.reverse();
            edges.reverse();
            Walk::from_parts(nodes, edges)
        }))
    }

    /// A walk witnessing the unsigned edge Q-predicate at `v`, if any.
    fn edge_walk(
        &self,
        k: usize,
        end: EdgeEnd,
        v: NodeIx,
        t: &Tables,
        s: &SubgraphRef,
    ) -> Result<Option<Walk>, MatchError> {
        let e = &self.edges[k];
        let (good_o, good_t) = (&t.theta[e.from], &t.theta[e.to]);
        match &e.strategy {
            Strategy::Exact(clauses) => {
                for c in clauses {
                    let (om, tm) = clause_masks(c, good_o, good_t, s);
                    let walk = match end {
                        EdgeEnd::Origin if om[v] => self.product_walk(c, &[v], |w| tm[w]),
                        EdgeEnd::Origin => None,
                        EdgeEnd::Terminus if tm[v] => {
                            let sources: Vec<NodeIx> = (0..om.len()).filter(|&u| om[u]).collect();
                            self.product_walk(c, &sources, |w| w == v)
                        }
                        EdgeEnd::Terminus => None,
                    };
                    if walk.is_some() {
                        return Ok(walk);
                    }
                }
                Ok(None)
            }
            Strategy::Bounded(b) => match end {
                EdgeEnd::Origin if good_o[v] => self.bounded_walk(b, v, good_t, s, |_| true),
                EdgeEnd::Origin => Ok(None),
                EdgeEnd::Terminus => {
                    for u in (0..good_o.len()).filter(|&u| good_o[u]) {
                        if let Some(w) = self.bounded_walk(b, u, good_t, s, |w| w == v)? {
                            return Ok(Some(w));
                        }
                    }
                    Ok(None)
                }
            },
        }
    }

    fn edge_holds(&self, t: &Tables, k: usize, end: EdgeEnd, v: NodeIx) -> bool {
        match end {
            EdgeEnd::Origin => t.origin_ok[k][v],
            EdgeEnd::Terminus => t.terminus_ok[k][v],
        }
    }

    /// `θ_n(v,S)` and every signed incident edge Q-predicate at `v`.
    fn node_holds_at(&self, t: &Tables, i: usize, v: NodeIx) -> bool {
        t.theta[i][v]
            && self.incident[i]
                .iter()
                .all(|&(k, end)| self.edges[k].sign.apply(self.edge_holds(t, k, end, v)))
    }

    fn node_witness(&self, t: &Tables, i: usize) -> Option<NodeIx> {
        (0..self.g.node_count()).find(|&v| self.node_holds_at(t, i, v))
    }

    /// Unsigned edge Q-predicate: `Q_{e^o}(v,S)` or `Q_{e^i}(v,S)`.
    pub fn edge_qpredicate(
        &self,
        edge: &str,
        end: EdgeEnd,
        v: NodeIx,
        s: &SubgraphRef,
    ) -> Result<bool, MatchError> {
        let k = self.edge_position(edge)?;
        self.check_subgraph(s)?;
        let t = self.tables(s)?;
        Ok(self.edge_holds(&t, k, end, v))
    }

    /// Unsigned node Q-predicate `Q_n(S)`.
    pub fn node_qpredicate(&self, node: &str, s: &SubgraphRef) -> Result<bool, MatchError> {
        let i = self.node_position(node)?;
        self.check_subgraph(s)?;
        let t = self.tables(s)?;
        Ok(self.node_witness(&t, i).is_some())
    }

    pub fn matches(&self, s: &SubgraphRef) -> Result<bool, MatchError> {
        self.check_subgraph(s)?;
        let t = self.tables(s)?;
        Ok((0..self.node_ids.len())
            .all(|i| self.node_signs[i].apply(self.node_witness(&t, i).is_some())))
    }

    pub fn explain(&self, s: &SubgraphRef) -> Result<Explanation, MatchError> {
        self.check_subgraph(s)?;
        let t = self.tables(s)?;
        let mut outcomes = Vec::new();
        for i in 0..self.node_ids.len() {
            let witness = match self.node_witness(&t, i) {
                Some(v) => Some(self.describe_witness(&t, i, v, s)?),
                None => None,
            };
            let sign = self.node_signs[i];
            match (sign, witness) {
                (Sign::Pos, Some(w)) => outcomes.push(NodeOutcome::Witnessed(w)),
                (Sign::Neg, None) => outcomes.push(NodeOutcome::NoWitness {
                    query_node: self.node_ids[i].clone(),
                }),
                (_, counter) => {
                    return Ok(Explanation::Failure(MatchFailure {
                        query_node: self.node_ids[i].clone(),
                        sign,
                        counter_witness: counter,
                    }))
                }
            }
        }
        Ok(Explanation::Match(MatchWitness { nodes: outcomes }))
    }

    fn describe_witness(
        &self,
        t: &Tables,
        i: usize,
        v: NodeIx,
        s: &SubgraphRef,
    ) -> Result<NodeWitness, MatchError> {
        let mut edges = Vec::new();
        for &(k, end) in &self.incident[i] {
            let e = &self.edges[k];
            let evidence = match e.sign {
                Sign::Pos => {
                    let walk = self
                        .edge_walk(k, end, v, t, s)?
                        .expect("positive edge predicate holds at witness");
                    EdgeEvidence::Walk(walk.describe(self.g))
                }
                Sign::Neg => EdgeEvidence::NoWalk,
            };
            edges.push(EdgeWitness {
                edge: e.id.clone(),
                end,
                evidence,
            });
        }
        Ok(NodeWitness {
            query_node: self.node_ids[i].clone(),
            data_node: self.g.node(v).id.clone(),
            edges,
        })
    }

    /// Witness walk for the unsigned edge Q-predicate, as node/edge positions.
    pub fn edge_witness_walk(
        &self,
        edge: &str,
        end: EdgeEnd,
        v: NodeIx,
        s: &SubgraphRef,
    ) -> Result<Option<Walk>, MatchError> {
        let k = self.edge_position(edge)?;
        self.check_subgraph(s)?;
        let t = self.tables(s)?;
        if !self.edge_holds(&t, k, end, v) {
            return Ok(None);
        }
        self.edge_walk(k, end, v, &t, s)
    }
}

fn clause_masks(
    c: &Clause,
    good_o: &[bool],
    good_t: &[bool],
    s: &SubgraphRef,
) -> (Vec<bool>, Vec<bool>) {
    let mask = |good: &[bool], want: Option<bool>| -> Vec<bool> {
        (0..good.len())
            .map(|v| good[v] && want.is_none_or(|w| s.contains_node(v) == w))
            .collect()
    };
    (mask(good_o, c.src), mask(good_t, c.dst))
}

fn compile_bounded(theta: &PathPredicate, table: &mut ResidualTable) -> Bounded {
    let mut regexes = Vec::new();
    let mut quantified = Vec::new();
    let formula = theta.map_atoms(&mut |atom| match atom {
        PathAtom::Types(re) => {
            regexes.push(table.intern(Residual::from_regex(re)));
            Slot::Regex(regexes.len() - 1)
        }
        PathAtom::Len { op, value } => Slot::Len(*op, *value),
        PathAtom::Endpoint { end, negated } => Slot::Endpoint(*end, *negated),
        PathAtom::Quantified {
            quantifier,
            key,
            op,
            value,
        } => {
            quantified.push(QuantifiedAtom {
                quantifier: *quantifier,
                key: key.clone(),
                op: *op,
                value: value.clone(),
            });
            Slot::Quantified(quantified.len() - 1)
        }
    });
    Bounded {
        formula,
        regexes,
        quantified,
    }
}

/// Evidence for one incident edge of a witnessed query node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeEvidence {
    /// A satisfying walk, rendered as `u -e-> v ...`.
    Walk(String),
    /// Negative edge: no satisfying walk exists.
    NoWalk,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWitness {
    pub edge: String,
    pub end: EdgeEnd,
    pub evidence: EdgeEvidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeWitness {
    pub query_node: String,
    pub data_node: String,
    pub edges: Vec<EdgeWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeOutcome {
    Witnessed(NodeWitness),
    /// Negative node with no data node satisfying its Q-predicate.
    NoWitness {
        query_node: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchWitness {
    pub nodes: Vec<NodeOutcome>,
}

/// The first query node (in id order) whose signed Q-predicate is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchFailure {
    pub query_node: String,
    pub sign: Sign,
    /// For a negative node, the data node that satisfies it.
    pub counter_witness: Option<NodeWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Explanation {
    Match(MatchWitness),
    Failure(MatchFailure),
}

impl Explanation {
    pub fn is_match(&self) -> bool {
        matches!(self, Explanation::Match(_))
    }
}

impl fmt::Display for NodeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- {}", self.query_node, self.data_node)?;
        for e in &self.edges {
            match &e.evidence {
                EdgeEvidence::Walk(w) => write!(f, "\n    {} ({}): {w}", e.edge, e.end)?,
                EdgeEvidence::NoWalk => write!(f, "\n    {} ({}): no walk", e.edge, e.end)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Explanation::Match(w) => {
                f.write_str("match")?;
                for n in &w.nodes {
                    match n {
                        NodeOutcome::Witnessed(nw) => write!(f, "\n  {nw}")?,
                        NodeOutcome::NoWitness { query_node } => {
                            write!(f, "\n  {query_node}: no witness (negative)")?
                        }
                    }
                }
                Ok(())
            }
            Explanation::Failure(fail) => {
                match fail.sign {
                    Sign::Pos => write!(
                        f,
                        "no match: positive node {} has no witness",
                        fail.query_node
                    )?,
                    Sign::Neg => write!(
                        f,
                        "no match: negative node {} is satisfied",
                        fail.query_node
                    )?,
                }
                if let Some(w) = &fail.counter_witness {
                    write!(f, "\n  {w}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn eval_edge_qpredicate(
    q: &Query,
    edge: &str,
    end: EdgeEnd,
    v: &str,
    s: &SubgraphRef,
    g: &GeneralizedGraph,
    cfg: MatchConfig,
) -> Result<bool, MatchError> {
    let v = g
        .node_ix(v)
        .ok_or_else(|| GraphError::UnknownNode(v.to_string()))?;
    Matcher::new(q, g, cfg)?.edge_qpredicate(edge, end, v, s)
}

pub fn eval_node_qpredicate(
    q: &Query,
    node: &str,
    s: &SubgraphRef,
    g: &GeneralizedGraph,
    cfg: MatchConfig,
) -> Result<bool, MatchError> {
    Matcher::new(q, g, cfg)?.node_qpredicate(node, s)
}

pub fn matches(
    s: &SubgraphRef,
    q: &Query,
    g: &GeneralizedGraph,
    cfg: MatchConfig,
) -> Result<bool, MatchError> {
    Matcher::new(q, g, cfg)?.matches(s)
}

pub fn explain_match(
    s: &SubgraphRef,
    q: &Query,
    g: &GeneralizedGraph,
    cfg: MatchConfig,
) -> Result<Explanation, MatchError> {
    Matcher::new(q, g, cfg)?.explain(s)
}

/// Matching subgraphs in enumeration order.
pub struct MatchIter<'a> {
    matcher: Matcher<'a>,
    subgraphs: SubgraphIter<'a>,
}

impl Iterator for MatchIter<'_> {
    type Item = Result<SubgraphRef, MatchError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let s = match self.subgraphs.next()? {
                Ok(s) => s,
                Err(e) => return Some(Err(e.into())),
            };
            match self.matcher.matches(&s) {
                Ok(true) => return Some(Ok(s)),
                Ok(false) => {}
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

pub fn enumerate_matches<'a>(
    g: &'a GeneralizedGraph,
    q: &Query,
    cfg: MatchConfig,
    opts: EnumerateOptions,
) -> Result<MatchIter<'a>, MatchError> {
    let opts = EnumerateOptions {
        yield_cap: opts.yield_cap.min(cfg.yield_cap),
        ..opts
    };
    Ok(MatchIter {
        matcher: Matcher::new(q, g, cfg)?,
        subgraphs: enumerate_subgraphs(g, opts),
    })
}
