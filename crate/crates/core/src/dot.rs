//! Graphviz renderings of refinement trees and data graphs.

use std::fmt::Write;

use sha2::{Digest, Sha256};

use crate::graph::{GeneralizedGraph, IncidenceKind};
use crate::query::{store_query, Query};
use crate::refinement::RefinementTree;

/// First 12 hex digits of the SHA-256 of the stored query text.
pub fn query_digest(q: &Query) -> String {
    Sha256::digest(store_query(q).as_bytes())
        .iter()
        .take(6)
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One DOT node per tree node, labelled with the query digest and size.
/// Edges carry the member's sign assignment.
pub fn tree_to_dot(tree: &RefinementTree) -> String {
    let mut out = String::from("digraph refinements {\n  node [shape=box, fontname=monospace];\n");
    for (ix, node) in tree.nodes.iter().enumerate() {
        let label = format!(
            "{}\n{}N {}E",
            query_digest(&node.query),
            node.query.node_count(),
            node.query.edge_count()
        );
        let _ = writeln!(out, "  t{ix} [label={}];", quote(&label));
    }
    for (ix, node) in tree.nodes.iter().enumerate() {
        let Some(set) = &node.refinement else {
            continue;
        };
        for (i, &child) in node.children.iter().enumerate() {
            let label = format!("{}: {}", set.operator.tag(), set.assignments[i]);
            let _ = writeln!(out, "  t{ix} -> t{child} [label={}];", quote(&label));
        }
    }
    out.push_str("}\n");
    out
}

/// Nodes labelled with their display names, edges with their types.
/// Hyperedges get an auxiliary point node.
pub fn graph_to_dot(g: &GeneralizedGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for (ix, node) in g.nodes().iter().enumerate() {
        let _ = writeln!(
            out,
            "  {} [label={}];",
            quote(&node.id),
            quote(g.display_name(ix))
        );
    }
    for edge in g.edges() {
        let label = quote(edge.edge_type().unwrap_or(""));
        let members = edge.incidence.members();
        let undirected = edge.incidence.kind() == IncidenceKind::Unordered;
        let style = if undirected { ", dir=none" } else { "" };
        if members.len() == 2 {
            let _ = writeln!(
                out,
                "  {} -> {} [label={label}{style}];",
                quote(&members[0]),
                quote(&members[1])
            );
            continue;
        }
        let hub = quote(&format!("edge:{}", edge.id));
        let _ = writeln!(out, "  {hub} [shape=point, xlabel={label}];");
        for m in members {
            let _ = writeln!(
                out,
                "  {hub} -> {}{};",
                quote(m),
                if undirected { " [dir=none]" } else { "" }
            );
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load_fixture_starwars;
    use crate::refinement::{build_refinement_tree, P5Policy};

    #[test]
    fn single_node_tree() {
        let t = build_refinement_tree(&Query::new(), &mut P5Policy::new(), 0).unwrap();
        let dot = tree_to_dot(&t);
        assert_eq!(dot.matches("[label=").count(), 1);
        assert!(!dot.contains("->"));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(query_digest(&Query::new()), query_digest(&Query::new()));
        assert_eq!(query_digest(&Query::new()).len(), 12);
    }

    #[test]
    fn graph_uses_names() {
        let f = load_fixture_starwars();
        let dot = graph_to_dot(&f.graph);
        assert!(dot.contains("\"Luke Skywalker\""));
        assert!(dot.contains("TEACHES"));
    }
}
