//! Brute-force checks over every subgraph of a small graph.

use std::fmt;

use crate::graph::{enumerate_subgraphs, EnumerateOptions, GeneralizedGraph, SubgraphRef};
use crate::matcher::{MatchConfig, Matcher};
use crate::predicate::{normalize, syntactic_equiv};
use crate::query::{Query, QueryEdge, Sign};

use super::{RefinementError, RefinementSet};

fn all_subgraphs(g: &GeneralizedGraph, cfg: MatchConfig, max_nodes: usize) -> EnumerateOptions {
    EnumerateOptions {
        max_nodes: max_nodes.min(g.node_count()),
        include_empty: true,
        connected_only: false,
        yield_cap: cfg.yield_cap,
    }
}

/// `q1 ⪯ q2` on `g`: every subgraph with at most `max_nodes` nodes that
/// matches `q1` also matches `q2`.
pub fn refines_oracle(
    q1: &Query,
    q2: &Query,
    g: &GeneralizedGraph,
    cfg: MatchConfig,
    max_nodes: usize,
) -> Result<bool, RefinementError> {
    let (m1, m2) = (Matcher::new(q1, g, cfg)?, Matcher::new(q2, g, cfg)?);
    for s in enumerate_subgraphs(g, all_subgraphs(g, cfg, max_nodes)) {
        let s = s?;
        if m1.matches(&s)? && !m2.matches(&s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Refinement in both directions, checked in a single pass.
pub fn equivalent_oracle(
    q1: &Query,
    q2: &Query,
    g: &GeneralizedGraph,
    cfg: MatchConfig,
    max_nodes: usize,
) -> Result<bool, RefinementError> {
    let (m1, m2) = (Matcher::new(q1, g, cfg)?, Matcher::new(q2, g, cfg)?);
    for s in enumerate_subgraphs(g, all_subgraphs(g, cfg, max_nodes)) {
        let s = s?;
        if m1.matches(&s)? != m2.matches(&s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `q1` extends `q2` without constraining the negative nodes of
/// `q2` further: `q2` is contained in `q1` with equal signs and predicates,
/// and every `q1` edge at a negative node of `q2` has a `q2` edge at that
/// node imposing the same restriction (same sign, same direction, and
/// equivalent edge and far-end predicates).
pub fn is_conservative_extension(q2: &Query, q1: &Query) -> bool {
    if !q2.is_subquery_of(q1) {
        return false;
    }
    q2.nodes().filter(|n| n.sign == Sign::Neg).all(|n| {
        q1.incident(&n.id).all(|e| {
            q2.incident(&n.id)
                .any(|f| same_restriction(&n.id, e, q1, f, q2))
        })
    })
}

fn same_restriction(n: &str, e: &QueryEdge, qe: &Query, f: &QueryEdge, qf: &Query) -> bool {
    if e.sign != f.sign || e.is_loop() != f.is_loop() || !syntactic_equiv(&e.theta, &f.theta) {
        return false;
    }
    if e.is_loop() {
        return true;
    }
    let outgoing = e.from == n;
    if outgoing != (f.from == n) {
        return false;
    }
    let far_theta = |q: &Query, edge: &QueryEdge| {
        normalize(&q.node(edge.other_end(n)).expect("endpoint").theta)
    };
    far_theta(qe, e) == far_theta(qf, f)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionViolation {
    /// A member matches a subgraph its parent does not.
    NotRefining { member: usize, subgraph: String },
    /// The parent matches but no member does.
    Uncovered { subgraph: String },
    /// The parent matches and several members do.
    MultiplyCovered {
        members: Vec<usize>,
        subgraph: String,
    },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::NotRefining { member, subgraph } => {
                write!(
                    f,
                    "member {member} matches {subgraph} but the parent does not"
                )
            }
            PartitionViolation::Uncovered { subgraph } => write!(f, "no member matches {subgraph}"),
            PartitionViolation::MultiplyCovered { members, subgraph } => {
                write!(f, "members {members:?} all match {subgraph}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartitionReport {
    pub subgraphs_checked: usize,
    pub parent_matches: usize,
    pub violations: Vec<PartitionViolation>,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for PartitionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} subgraphs checked, {} match the parent, {} violations",
            self.subgraphs_checked,
            self.parent_matches,
            self.violations.len()
        )?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Checks both refinement-set conditions on every subgraph.
pub fn verify_refinement_set(
    r: &RefinementSet,
    g: &GeneralizedGraph,
    cfg: MatchConfig,
    max_nodes: usize,
) -> Result<PartitionReport, RefinementError> {
    verify_partition(&r.parent, &r.members, g, cfg, max_nodes)
}

/// The same check for a parent and a list of candidate members.
pub fn verify_partition(
    parent: &Query,
    members: &[Query],
    g: &GeneralizedGraph,
    cfg: MatchConfig,
    max_nodes: usize,
) -> Result<PartitionReport, RefinementError> {
    let parent_m = Matcher::new(parent, g, cfg)?;
    let member_m = members
        .iter()
        .map(|q| Matcher::new(q, g, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = PartitionReport::default();
    for s in enumerate_subgraphs(g, all_subgraphs(g, cfg, max_nodes)) {
        let s: SubgraphRef = s?;
        report.subgraphs_checked += 1;
        let in_parent = parent_m.matches(&s)?;
        let mut hits = Vec::new();
        for (i, m) in member_m.iter().enumerate() {
            if m.matches(&s)? {
                hits.push(i);
            }
        }
        let describe = || s.describe(g);
        if in_parent {
            report.parent_matches += 1;
            match hits.len() {
                0 => report.violations.push(PartitionViolation::Uncovered {
                    subgraph: describe(),
                }),
                1 => {}
                _ => report.violations.push(PartitionViolation::MultiplyCovered {
                    members: hits,
                    subgraph: describe(),
                }),
            }
        } else {
            for member in hits {
                report.violations.push(PartitionViolation::NotRefining {
                    member,
                    subgraph: describe(),
                });
            }
        }
    }
    Ok(report)
}
