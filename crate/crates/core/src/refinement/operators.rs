use std::collections::{BTreeMap, BTreeSet};

use crate::ids::numbered_id;
use crate::predicate::{conjoin, Formula, NodePredicate, PathPredicate};
use crate::query::{Query, QueryEdge, QueryNode, Sign};

use super::clone::clone_query;
use super::{Operator, RefinementError, RefinementSet};

const SIGNS: [Sign; 2] = [Sign::Pos, Sign::Neg];

fn require_positive_node(q: &Query, id: &str) -> Result<(), RefinementError> {
    match q.node(id) {
        None => Err(crate::query::QueryError::UnknownNode(id.to_string()).into()),
        Some(n) if n.sign == Sign::Neg => Err(RefinementError::NegativeAnchor(id.to_string())),
        Some(_) => Ok(()),
    }
}

/// Every sign assignment over `ids`, all-positive first, in lexicographic
/// order with `+` before `-`.
fn assignments(ids: &[String]) -> Vec<Vec<(String, Sign)>> {
    let mut out = vec![Vec::new()];
    for id in ids {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<(String, Sign)>| {
                SIGNS.iter().map(move |&s| {
                    let mut next = prefix.clone();
                    next.push((id.clone(), s));
                    next
                })
            })
            .collect();
    }
    out
}

fn describe(assignment: &[(String, Sign)]) -> String {
    assignment
        .iter()
        .map(|(id, s)| format!("{id}={s}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Builds one member per sign assignment to `signed` on top of `base`.
fn members_over(
    base: &Query,
    signed: &[String],
) -> Result<(Vec<Query>, Vec<String>), RefinementError> {
    let mut members = Vec::new();
    let mut labels = Vec::new();
    for assignment in assignments(signed) {
        let mut m = base.clone();
        for (id, s) in &assignment {
            m.set_node_sign(id, *s)?;
        }
        members.push(m);
        labels.push(describe(&assignment));
    }
    Ok((members, labels))
}

/// `{Q + (m,+,true), Q + (m,-,true)}`.
pub fn refine_add_node(q: &Query, m: &str) -> Result<RefinementSet, RefinementError> {
    if q.has_node(m) {
        return Err(RefinementError::IdClash(m.to_string()));
    }
    let mut members = Vec::new();
    for s in SIGNS {
        let mut member = q.clone();
        member.add_node(QueryNode::new(m, s, Formula::True))?;
        members.push(member);
    }
    Ok(RefinementSet {
        parent: q.clone(),
        operator: Operator::AddNode {
            node: m.to_string(),
        },
        members,
        assignments: SIGNS.iter().map(|s| format!("{m}={s}")).collect(),
        clone_map: BTreeMap::new(),
        new_edge: None,
        simplified: false,
    })
}

/// Clones `{n, m}`, joins the copies by a new edge with predicate `theta`
/// and the given sign, and re-signs the copies in every way.
fn edge_between_clones(
    q: &Query,
    n: &str,
    m: &str,
    sign: Sign,
    theta: PathPredicate,
    operator: Operator,
) -> Result<RefinementSet, RefinementError> {
    let w: BTreeSet<String> = [n.to_string(), m.to_string()].into();
    let (mut base, clone_map) = clone_query(q, &w)?;
    let (n2, m2) = (clone_map[n].clone(), clone_map[m].clone());
    let edge_id = numbered_id("e", |c| base.has_edge(c));
    base.add_edge(QueryEdge::new(
        edge_id.clone(),
        n2.clone(),
        m2.clone(),
        sign,
        theta,
    ))?;
    let signed: Vec<String> = if n == m { vec![n2] } else { vec![n2, m2] };
    let (members, assignments) = members_over(&base, &signed)?;
    Ok(RefinementSet {
        parent: q.clone(),
        operator,
        members,
        assignments,
        clone_map,
        new_edge: Some(edge_id),
        simplified: false,
    })
}

/// Four members over the clone `Cl_Q^{n,m}` with a new tautological edge
/// `n' → m'`; two members when `n = m`.
pub fn refine_add_edge(
    q: &Query,
    n: &str,
    m: &str,
    edge_sign: Sign,
) -> Result<RefinementSet, RefinementError> {
    require_positive_node(q, n)?;
    require_positive_node(q, m)?;
    edge_between_clones(
        q,
        n,
        m,
        edge_sign,
        Formula::True,
        Operator::AddEdge {
            from: n.to_string(),
            to: m.to_string(),
            sign: edge_sign,
        },
    )
}

/// Clones the endpoints of positive edge `e` and adds a positive edge
/// between the copies carrying `θ_e ∧ φ`.
pub fn refine_add_edge_predicate(
    q: &Query,
    e: &str,
    phi: &PathPredicate,
) -> Result<RefinementSet, RefinementError> {
    let edge = q
        .edge(e)
        .ok_or_else(|| crate::query::QueryError::UnknownEdge(e.to_string()))?;
    if edge.sign == Sign::Neg {
        return Err(RefinementError::NegativeAnchor(e.to_string()));
    }
    require_positive_node(q, &edge.from)?;
    require_positive_node(q, &edge.to)?;
    edge_between_clones(
        q,
        &edge.from,
        &edge.to,
        Sign::Pos,
        conjoin(&edge.theta, phi),
        Operator::AddEdgePredicate {
            edge: e.to_string(),
            phi: phi.clone(),
        },
    )
}

/// Clones the environment `W = N_Q(n) ∪ {n}`, strengthens the copy of `n`
/// to `θ_n ∧ φ`, and re-signs the copies in every way. Copied edges joining
/// an original node to the copy of `n` are dropped.
pub fn refine_add_node_predicate(
    q: &Query,
    n: &str,
    phi: &NodePredicate,
) -> Result<RefinementSet, RefinementError> {
    require_positive_node(q, n)?;
    let mut w = q.neighbors(n);
    for u in &w {
        if q.node(u).is_some_and(|x| x.sign == Sign::Neg) {
            return Err(RefinementError::NegativeEnvironment {
                node: n.to_string(),
                neighbor: u.clone(),
            });
        }
    }
    w.insert(n.to_string());
    let (mut base, clone_map) = clone_query(q, &w)?;
    let n2 = clone_map[n].clone();
    let theta = conjoin(&q.node(n).expect("checked").theta, phi);
    base.set_node_theta(&n2, theta)?;
    let originals: BTreeSet<&str> = q.nodes().map(|x| x.id.as_str()).collect();
    let dropped: Vec<String> = base
        .edges()
        .filter(|e| !q.has_edge(&e.id))
        .filter(|e| {
            (e.from == n2 && originals.contains(e.to.as_str()))
                || (e.to == n2 && originals.contains(e.from.as_str()))
        })
        .map(|e| e.id.clone())
        .collect();
    for id in dropped {
        base.remove_edge(&id)?;
    }
    let signed: Vec<String> = clone_map.values().cloned().collect();
    let (members, assignments) = members_over(&base, &signed)?;
    Ok(RefinementSet {
        parent: q.clone(),
        operator: Operator::AddNodePredicate {
            node: n.to_string(),
            phi: phi.clone(),
        },
        members,
        assignments,
        clone_map,
        new_edge: None,
        simplified: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::{parse_node_predicate, parse_path_predicate};

    fn two_nodes() -> Query {
        let mut q = Query::new();
        q.add_node(QueryNode::new("a", Sign::Pos, Formula::True))
            .unwrap();
        q.add_node(QueryNode::new("b", Sign::Pos, Formula::True))
            .unwrap();
        q.add_edge(QueryEdge::new("e", "a", "b", Sign::Pos, Formula::True))
            .unwrap();
        q
    }

    #[test]
    fn member_counts() {
        let q = two_nodes();
        assert_eq!(refine_add_node(&q, "c").unwrap().len(), 2);
        assert_eq!(refine_add_edge(&q, "a", "b", Sign::Pos).unwrap().len(), 4);
        assert_eq!(refine_add_edge(&q, "a", "a", Sign::Neg).unwrap().len(), 2);
        let phi = parse_path_predicate("types =~ /T/").unwrap();
        assert_eq!(refine_add_edge_predicate(&q, "e", &phi).unwrap().len(), 4);
        let psi = parse_node_predicate("v in S").unwrap();
        assert_eq!(refine_add_node_predicate(&q, "a", &psi).unwrap().len(), 4);
    }

    #[test]
    fn isolated_node_predicate_has_two_members() {
        let mut q = Query::new();
        q.add_node(QueryNode::new("n", Sign::Pos, Formula::True))
            .unwrap();
        let r =
            refine_add_node_predicate(&q, "n", &parse_node_predicate("v in S").unwrap()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.assignments, ["n'=+", "n'=-"]);
        assert_eq!(
            r.members[0].node("n'").unwrap().theta,
            parse_node_predicate("v in S").unwrap()
        );
    }

    #[test]
    fn anchors_must_be_positive() {
        let mut q = two_nodes();
        assert!(matches!(
            refine_add_node(&q, "a"),
            Err(RefinementError::IdClash(_))
        ));
        q.set_node_sign("b", Sign::Neg).unwrap();
        assert!(matches!(
            refine_add_edge(&q, "a", "b", Sign::Pos),
            Err(RefinementError::NegativeAnchor(_))
        ));
        assert!(matches!(
            refine_add_node_predicate(&q, "a", &Formula::True),
            Err(RefinementError::NegativeEnvironment { .. })
        ));
    }

    #[test]
    fn add_edge_layout() {
        let r = refine_add_edge(&two_nodes(), "a", "b", Sign::Neg).unwrap();
        let e = r.new_edge.clone().unwrap();
        let first = &r.members[0];
        let edge = first.edge(&e).unwrap();
        assert_eq!(
            (edge.from.as_str(), edge.to.as_str(), edge.sign),
            ("a'", "b'", Sign::Neg)
        );
        assert_eq!(
            r.assignments,
            ["a'=+ b'=+", "a'=+ b'=-", "a'=- b'=+", "a'=- b'=-"]
        );
        assert_eq!(r.members[3].node("b'").unwrap().sign, Sign::Neg);
        assert_eq!(r.members[3].node("b").unwrap().sign, Sign::Pos);
    }
}
