use crate::predicate::{normalize, syntactic_equiv, syntactic_implies};
use crate::query::{Query, QueryEdge, Sign};

use super::RefinementSet;

/// Removes redundant parallel edges and redundant positive nodes until
/// nothing changes.
///
/// * Of two positive edges `n → m` between positive nodes, one whose
///   predicate is syntactically implied by the other's is dropped.
/// * A positive node `n` is dropped when another node `m` of the same sign
///   and equivalent predicate has, for every edge of `n`, an edge of the
///   same sign and predicate obtained by replacing `n` with `m`.
pub fn simplify(q: &Query) -> Query {
    let mut q = q.clone();
    loop {
        if let Some(e) = redundant_edge(&q) {
            q.remove_edge(&e).expect("edge exists");
            continue;
        }
        if let Some(n) = redundant_node(&q) {
            q.remove_node(&n).expect("node exists");
            continue;
        }
        return q;
    }
}

fn redundant_edge(q: &Query) -> Option<String> {
    let positive = |id: &str| q.node(id).is_some_and(|n| n.sign == Sign::Pos);
    let candidates: Vec<&QueryEdge> = q
        .edges()
        .filter(|e| e.sign == Sign::Pos && positive(&e.from) && positive(&e.to))
        .collect();
    for e in &candidates {
        for f in &candidates {
            if e.id == f.id || e.from != f.from || e.to != f.to {
                continue;
            }
            if syntactic_implies(&e.theta, &f.theta) {
                // With mutual implication keep the smaller id.
                if syntactic_implies(&f.theta, &e.theta) && f.id < e.id {
                    continue;
                }
                return Some(f.id.clone());
            }
        }
    }
    None
}

fn substitute(end: &str, n: &str, m: &str) -> String {
    if end == n {
        m.to_string()
    } else {
        end.to_string()
    }
}

fn redundant_node(q: &Query) -> Option<String> {
    for n in q.nodes().filter(|n| n.sign == Sign::Pos) {
        for m in q.nodes() {
            if m.id == n.id || m.sign != n.sign || !syntactic_equiv(&m.theta, &n.theta) {
                continue;
            }
            let covered = q.incident(&n.id).all(|e| {
                let (from, to) = (
                    substitute(&e.from, &n.id, &m.id),
                    substitute(&e.to, &n.id, &m.id),
                );
                let theta = normalize(&e.theta);
                q.incident(&m.id).any(|f| {
                    f.from == from && f.to == to && f.sign == e.sign && normalize(&f.theta) == theta
                })
            });
            if covered {
                return Some(n.id.clone());
            }
        }
    }
    None
}

/// `simplify` applied to every member.
pub fn simplified_refinement(set: &RefinementSet) -> RefinementSet {
    RefinementSet {
        members: set.members.iter().map(simplify).collect(),
        simplified: true,
        ..set.clone()
    }
}
