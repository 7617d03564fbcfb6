use std::cell::OnceCell;

use thiserror::Error;

use crate::graph::{GeneralizedGraph, GraphError, NodeIx, PropertyValue, SubgraphRef, Walk};

use super::derivative::Residual;
use super::{CmpOp, NodeAtom, NodePredicate, PathAtom, PathPredicate, Quantifier, WalkEnd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("type mismatch: cannot order {left} against {right}")]
    TypeMismatch {
        left: &'static str,
        right: &'static str,
    },
}

impl From<GraphError> for EvalError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Incomparable { left, right } => EvalError::TypeMismatch { left, right },
            other => unreachable!("comparison raised {other}"),
        }
    }
}

/// A data graph and a subgraph `S`, with reachability from and to `S`
/// computed on first use.
pub struct EvalContext<'g> {
    g: &'g GeneralizedGraph,
    s: &'g SubgraphRef,
    from_s: OnceCell<Vec<bool>>,
    to_s: OnceCell<Vec<bool>>,
}

impl<'g> EvalContext<'g> {
    pub fn new(g: &'g GeneralizedGraph, s: &'g SubgraphRef) -> Self {
        EvalContext {
            g,
            s,
            from_s: OnceCell::new(),
            to_s: OnceCell::new(),
        }
    }

    pub fn graph(&self) -> &'g GeneralizedGraph {
        self.g
    }

    pub fn subgraph(&self) -> &'g SubgraphRef {
        self.s
    }

    /// Whether some node of `S` reaches `v` in one or more steps.
    pub fn reachable_from_s(&self, v: NodeIx) -> bool {
        self.from_s
            .get_or_init(|| self.closure(|u| self.g.steps_from(u)))[v]
    }

    /// Whether `v` reaches some node of `S` in one or more steps.
    pub fn reaches_s(&self, v: NodeIx) -> bool {
        self.to_s
            .get_or_init(|| self.closure(|u| self.g.steps_into(u)))[v]
    }

    fn closure<'a>(&'a self, next: impl Fn(NodeIx) -> &'a [(usize, NodeIx)]) -> Vec<bool> {
        let mut hit = vec![false; self.g.node_count()];
        let mut stack: Vec<NodeIx> = self.s.nodes.iter().copied().collect();
        while let Some(u) = stack.pop() {
            for &(_, w) in next(u) {
                if !hit[w] {
                    hit[w] = true;
                    stack.push(w);
                }
            }
        }
        hit
    }

    pub fn node(&self, pred: &NodePredicate, v: NodeIx) -> Result<bool, EvalError> {
        pred.evaluate(&mut |atom| self.node_atom(atom, v))
    }

    pub fn node_atom(&self, atom: &NodeAtom, v: NodeIx) -> Result<bool, EvalError> {
        Ok(match atom {
            NodeAtom::InS { negated } => self.s.contains_node(v) != *negated,
            NodeAtom::ReachableFromS => self.reachable_from_s(v),
            NodeAtom::ReachesS => self.reaches_s(v),
            NodeAtom::Property { key, op, value } => match self.g.node(v).props.get(key) {
                Some(actual) => compare(actual, *op, value)?,
                None => false,
            },
            NodeAtom::Degree { mode, op, value } => {
                let d = self.g.degree_of(v, *mode) as i64;
                op.holds(d.cmp(value))
            }
        })
    }

    pub fn path(&self, pred: &PathPredicate, walk: &Walk) -> Result<bool, EvalError> {
        pred.evaluate(&mut |atom| self.path_atom(atom, walk))
    }

    pub fn path_atom(&self, atom: &PathAtom, walk: &Walk) -> Result<bool, EvalError> {
        Ok(match atom {
            PathAtom::Types(re) => {
                let mut r = Residual::from_regex(re);
                for &e in walk.edge_seq() {
                    r = r.derive(self.g.edge(e).edge_type());
                }
                r.nullable()
            }
            PathAtom::Len { op, value } => op.holds((walk.len() as i64).cmp(value)),
            PathAtom::Endpoint { end, negated } => {
                let v = match end {
                    WalkEnd::Src => walk.origin(),
                    WalkEnd::Dst => walk.terminus(),
                };
                self.s.contains_node(v) != *negated
            }
            PathAtom::Quantified {
                quantifier,
                key,
                op,
                value,
            } => {
                let mut results =
                    walk.edge_seq()
                        .iter()
                        .map(|&e| match self.g.edge(e).props.get(key) {
                            Some(actual) => compare(actual, *op, value),
                            None => Ok(false),
                        });
                match quantifier {
                    Quantifier::All => {
                        for r in &mut results {
                            if !r? {
                                return Ok(false);
                            }
                        }
                        true
                    }
                    Quantifier::Any => {
                        for r in &mut results {
                            if r? {
                                return Ok(true);
                            }
                        }
                        false
                    }
                }
            }
        })
    }
}

/// Cross-kind `=` is false and `!=` is true; cross-kind ordering is an error.
pub(crate) fn compare(
    actual: &PropertyValue,
    op: CmpOp,
    literal: &PropertyValue,
) -> Result<bool, EvalError> {
    match op {
        CmpOp::Eq => Ok(actual.value_eq(literal)),
        CmpOp::Ne => Ok(!actual.value_eq(literal)),
        _ => Ok(op.holds(actual.compare(literal)?)),
    }
}

pub fn eval_node_predicate(
    ast: &NodePredicate,
    v: NodeIx,
    s: &SubgraphRef,
    g: &GeneralizedGraph,
) -> Result<bool, EvalError> {
    EvalContext::new(g, s).node(ast, v)
}

pub fn eval_path_predicate(
    ast: &PathPredicate,
    walk: &Walk,
    s: &SubgraphRef,
    g: &GeneralizedGraph,
) -> Result<bool, EvalError> {
    EvalContext::new(g, s).path(ast, walk)
}
