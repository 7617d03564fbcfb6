use std::collections::{BTreeMap, BTreeSet};

use crate::ids::fresh_id;
use crate::query::{Query, QueryEdge, QueryError};

/// Adds a copy `n'` of every node in `w` and re-instantiates every edge
/// incident to `w` over originals and copies in all combinations: one new
/// edge for a boundary edge, three for an edge inside `w` (`u'→v`, `u→v'`,
/// `u'→v'`) and three for a loop (`n'→n'`, `n→n'`, `n'→n`).
///
/// Returns the clone and the map from each node of `w` to its copy.
pub fn clone_query(
    q: &Query,
    w: &BTreeSet<String>,
) -> Result<(Query, BTreeMap<String, String>), QueryError> {
    for n in w {
        if !q.has_node(n) {
            return Err(QueryError::UnknownNode(n.clone()));
        }
    }
    let mut out = q.clone();
    let mut copies = BTreeMap::new();
    for n in w {
        let fresh = fresh_id(n, |c| out.has_node(c));
        let mut node = q.node(n).expect("checked").clone();
        node.id = fresh.clone();
        out.add_node(node)?;
        copies.insert(n.clone(), fresh);
    }
    let copy = |id: &str| copies.get(id).cloned();
    for e in q.edges() {
        let pairs: Vec<(String, String)> = match (copy(&e.from), copy(&e.to)) {
            (None, None) => continue,
            (Some(f), None) => vec![(f, e.to.clone())],
            (None, Some(t)) => vec![(e.from.clone(), t)],
            (Some(f), Some(_)) if e.is_loop() => vec![
                (f.clone(), f.clone()),
                (e.from.clone(), f.clone()),
                (f, e.to.clone()),
            ],
            (Some(f), Some(t)) => vec![
                (f.clone(), e.to.clone()),
                (e.from.clone(), t.clone()),
                (f, t),
            ],
        };
        for (from, to) in pairs {
            let id = fresh_id(&e.id, |c| out.has_edge(c));
            out.add_edge(QueryEdge {
                id,
                from,
                to,
                ..e.clone()
            })?;
        }
    }
    Ok((out, copies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::Formula;
    use crate::query::{QueryNode, Sign};

    fn q(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Query {
        let mut q = Query::new();
        for n in nodes {
            q.add_node(QueryNode::new(*n, Sign::Pos, Formula::True))
                .unwrap();
        }
        for (id, a, b) in edges {
            q.add_edge(QueryEdge::new(*id, *a, *b, Sign::Pos, Formula::True))
                .unwrap();
        }
        q
    }

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_selection_is_identity() {
        let base = q(&["a", "b"], &[("e", "a", "b")]);
        assert_eq!(clone_query(&base, &BTreeSet::new()).unwrap().0, base);
    }

    #[test]
    fn boundary_edges_copy_once() {
        let base = q(&["a", "b", "c"], &[("e", "a", "b"), ("f", "c", "a")]);
        let (c, map) = clone_query(&base, &set(&["a"])).unwrap();
        assert_eq!(map["a"], "a'");
        assert_eq!((c.node_count(), c.edge_count()), (4, 4));
        assert_eq!(c.edge("e'").unwrap().from, "a'");
        assert_eq!(c.edge("f'").unwrap().to, "a'");
    }

    #[test]
    fn inner_edge_copies_three_times() {
        let base = q(&["u", "v"], &[("e", "u", "v")]);
        let (c, _) = clone_query(&base, &set(&["u", "v"])).unwrap();
        assert_eq!((c.node_count(), c.edge_count()), (4, 4));
        let ends: Vec<(String, String)> =
            c.edges().map(|e| (e.from.clone(), e.to.clone())).collect();
        assert!(ends.contains(&("u'".into(), "v".into())));
        assert!(ends.contains(&("u".into(), "v'".into())));
        assert!(ends.contains(&("u'".into(), "v'".into())));
    }

    #[test]
    fn loop_copies_three_times() {
        let base = q(&["n"], &[("l", "n", "n")]);
        let (c, _) = clone_query(&base, &set(&["n"])).unwrap();
        assert_eq!(c.edge_count(), 4);
        assert!(c.edges().any(|e| e.from == "n'" && e.to == "n'"));
    }

    #[test]
    fn unknown_node() {
        assert!(clone_query(&Query::new(), &set(&["x"])).is_err());
    }
}
