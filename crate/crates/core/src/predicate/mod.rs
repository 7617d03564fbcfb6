//! Predicates attached to query elements.
//!
//! Node predicates are evaluated on a data node in the context of a subgraph;
//! path predicates on a walk in the same context. Both share one boolean
//! skeleton ([`Formula`]) over different atom vocabularies.

mod algebra;
pub(crate) mod derivative;
mod eval;
mod parse;
pub mod regex;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::graph::{DegreeMode, PropertyValue};

pub use algebra::{conjoin, normalize, syntactic_equiv, syntactic_implies};
pub(crate) use eval::compare as compare_values;
pub use eval::{eval_node_predicate, eval_path_predicate, EvalContext, EvalError};
pub use parse::{parse_node_predicate, parse_path_predicate};
pub use regex::{parse_type_regex, regex_accepts, Label, TypeNfa, TypeRegex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredicateError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown function `{name}` at offset {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("type mismatch at offset {position}: {message}")]
    TypeMismatch { position: usize, message: String },
    #[error("empty type token in regex at offset {position}")]
    EmptyAlphabetToken { position: usize },
}

impl PredicateError {
    pub fn position(&self) -> usize {
        match self {
            PredicateError::Syntax { position, .. }
            | PredicateError::UnknownFunction { position, .. }
            | PredicateError::TypeMismatch { position, .. }
            | PredicateError::EmptyAlphabetToken { position } => *position,
        }
    }
}

/// Boolean skeleton shared by node and path predicates.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Formula<A> {
    #[default]
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Vec<Formula<A>>),
    Or(Vec<Formula<A>>),
}

pub type NodePredicate = Formula<NodeAtom>;
pub type PathPredicate = Formula<PathAtom>;

impl<A> Formula<A> {
    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a A>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.push(a),
            Formula::Not(x) => x.collect_atoms(out),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
        }
    }

    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Formula<B> {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::Not(x) => Formula::Not(Box::new(x.map_atoms(f))),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| x.map_atoms(f)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| x.map_atoms(f)).collect()),
        }
    }

    /// Evaluates with a fallible atom valuation, short-circuiting left to right.
    pub fn evaluate<E>(&self, atom: &mut impl FnMut(&A) -> Result<bool, E>) -> Result<bool, E> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => atom(a)?,
            Formula::Not(x) => !x.evaluate(atom)?,
            Formula::And(xs) => {
                for x in xs {
                    if !x.evaluate(atom)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(xs) => {
                for x in xs {
                    if x.evaluate(atom)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

/// Vocabulary hooks the algebra needs from an atom type.
pub trait Atom: Clone + PartialEq + fmt::Display {
    /// The atom expressing the negation of this one, when the vocabulary has it.
    fn negated(&self) -> Option<Self>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

/// Atoms over a node `v` in subgraph `S`.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeAtom {
    /// `v in S` / `v not in S`
    InS { negated: bool },
    /// Some node of `S` reaches `v` by a walk of at least one step.
    ReachableFromS,
    /// `v` reaches some node of `S` by a walk of at least one step.
    ReachesS,
    Property {
        key: String,
        op: CmpOp,
        value: PropertyValue,
    },
    Degree {
        mode: DegreeMode,
        op: CmpOp,
        value: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkEnd {
    Src,
    Dst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    All,
    Any,
}

/// Atoms over a walk `ρ` in subgraph `S`.
#[derive(Debug, Clone, PartialEq)]
pub enum PathAtom {
    /// The sequence of edge types along the walk matches the regex.
    Types(TypeRegex),
    /// Number of steps.
    Len {
        op: CmpOp,
        value: i64,
    },
    Endpoint {
        end: WalkEnd,
        negated: bool,
    },
    /// Edge-property comparison quantified over the walk's edges.
    Quantified {
        quantifier: Quantifier,
        key: String,
        op: CmpOp,
        value: PropertyValue,
    },
}

impl Atom for NodeAtom {
    fn negated(&self) -> Option<Self> {
        match self {
            NodeAtom::InS { negated } => Some(NodeAtom::InS { negated: !negated }),
            _ => None,
        }
    }
}

impl Atom for PathAtom {
    fn negated(&self) -> Option<Self> {
        match self {
            PathAtom::Endpoint { end, negated } => Some(PathAtom::Endpoint {
                end: *end,
                negated: !negated,
            }),
            _ => None,
        }
    }
}

fn degree_name(mode: DegreeMode) -> &'static str {
    match mode {
        DegreeMode::All => "deg",
        DegreeMode::Out => "deg_out",
        DegreeMode::In => "deg_in",
    }
}

impl fmt::Display for NodeAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeAtom::InS { negated: false } => f.write_str("v in S"),
            NodeAtom::InS { negated: true } => f.write_str("v not in S"),
            NodeAtom::ReachableFromS => f.write_str("reachable_from_S(v)"),
            NodeAtom::ReachesS => f.write_str("reaches_S(v)"),
            NodeAtom::Property { key, op, value } => {
                write!(f, "{key}(v) {} {value}", op.symbol())
            }
            NodeAtom::Degree { mode, op, value } => {
                write!(f, "{}(v) {} {value}", degree_name(*mode), op.symbol())
            }
        }
    }
}

impl fmt::Display for PathAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathAtom::Types(re) => write!(f, "types =~ /{re}/"),
            PathAtom::Len { op, value } => write!(f, "len {} {value}", op.symbol()),
            PathAtom::Endpoint { end, negated } => {
                let end = match end {
                    WalkEnd::Src => "src",
                    WalkEnd::Dst => "dst",
                };
                let rel = if *negated { "not in" } else { "in" };
                write!(f, "{end} {rel} S")
            }
            PathAtom::Quantified {
                quantifier,
                key,
                op,
                value,
            } => {
                let q = match quantifier {
                    Quantifier::All => "all",
                    Quantifier::Any => "any",
                };
                write!(f, "{q} {key} {} {value}", op.symbol())
            }
        }
    }
}

impl<A: fmt::Display> Formula<A> {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(x) => {
                f.write_str("not ")?;
                x.fmt_prec(f, 2)
            }
            Formula::And(xs) | Formula::Or(xs) => {
                let (level, sep, unit) = match self {
                    Formula::And(_) => (1, " and ", "true"),
                    _ => (0, " or ", "false"),
                };
                match xs.as_slice() {
                    [] => f.write_str(unit),
                    [only] => only.fmt_prec(f, prec),
                    _ => {
                        let wrap = prec > level;
                        if wrap {
                            f.write_str("(")?;
                        }
                        for (i, x) in xs.iter().enumerate() {
                            if i > 0 {
                                f.write_str(sep)?;
                            }
                            x.fmt_prec(f, level + 1)?;
                        }
                        if wrap {
                            f.write_str(")")?;
                        }
                        Ok(())
                    }
                }
            }
        }
    }
}

/// Prints in the DSL syntax accepted by the parsers.
impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
