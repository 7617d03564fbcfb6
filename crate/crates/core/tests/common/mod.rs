//! Random small graphs, queries and operator applications shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use ggq::graph::{props, GeneralizedGraph, Incidence, PropertyMap, PropertyValue};
use ggq::predicate::{
    parse_node_predicate, parse_path_predicate, NodePredicate, PathPredicate, TypeRegex,
};
use ggq::query::{Query, QueryEdge, QueryNode, Sign};
use ggq::refinement::{
    refine_add_edge, refine_add_edge_predicate, refine_add_node, refine_add_node_predicate,
    RefinementSet,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const NODE_PREDICATES: &[&str] = &[
    "true",
    "true",
    "v in S",
    "v not in S",
    r#"type(v) = "side""#,
    r#"type(v) != "side""#,
    "deg(v) >= 2",
    "deg_out(v) = 0",
    "reaches_S(v)",
    "reachable_from_S(v)",
    "age(v) > 3",
    "v in S and age(v) <= 5",
    r#"not type(v) = "person" or v in S"#,
];

pub const PATH_PREDICATES: &[&str] = &[
    "true",
    "true",
    "types =~ /A/",
    "types =~ /B/",
    "types =~ /A+/",
    "types =~ /A B?/",
    "types =~ /(A|B)* B/",
    "types =~ /./",
    "src in S",
    "dst not in S",
    "len <= 1",
    "len >= 2",
    "any weight > 1",
    "all weight <= 2",
    "types =~ /A*/ and dst in S",
    "types =~ /B/ or len = 2",
];

/// Regexes compiling to at most five states, for strategy comparisons.
pub const SMALL_REGEXES: &[&str] = &[
    "A", "B", ".", "A B", "A|B", "A*", "A+", "B?", "(A|B)+", "A B*", "A* B", "(A B)+", "A . B",
    "(A|B) A", ". .", "A? B?",
];

pub fn node_predicate(rng: &mut StdRng) -> NodePredicate {
    parse_node_predicate(NODE_PREDICATES.choose(rng).unwrap()).unwrap()
}

pub fn path_predicate(rng: &mut StdRng) -> PathPredicate {
    parse_path_predicate(PATH_PREDICATES.choose(rng).unwrap()).unwrap()
}

fn sign(rng: &mut StdRng, positive_bias: f64) -> Sign {
    if rng.gen_bool(positive_bias) {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

/// At most `max_nodes` nodes and `max_edges` edges, mostly binary with the
/// occasional loop, undirected edge, hyperedge or untyped edge.
pub fn random_graph(rng: &mut StdRng, max_nodes: usize, max_edges: usize) -> GeneralizedGraph {
    let n = rng.gen_range(1..=max_nodes);
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let nodes: Vec<(String, PropertyMap)> = ids
        .iter()
        .map(|id| {
            let kind = *["side", "person", "planet"].choose(rng).unwrap();
            let age: i64 = rng.gen_range(0..8);
            (
                id.clone(),
                props([("type", PropertyValue::from(kind)), ("age", age.into())]),
            )
        })
        .collect();
    let m = rng.gen_range(0..=max_edges);
    let mut edges = Vec::new();
    for i in 0..m {
        let a = ids.choose(rng).unwrap().clone();
        let b = ids.choose(rng).unwrap().clone();
        let incidence = match rng.gen_range(0..10) {
            0 => Incidence::unordered([a, b]),
            1 if n >= 3 => Incidence::ordered([a, b, ids.choose(rng).unwrap().clone()]),
            _ => Incidence::ordered([a, b]),
        };
        let weight: i64 = rng.gen_range(0..4);
        let mut p = props([("weight", PropertyValue::from(weight))]);
        if rng.gen_bool(0.9) {
            p.insert(
                "type".into(),
                PropertyValue::from(*["A", "B"].choose(rng).unwrap()),
            );
        }
        edges.push((format!("x{i}"), incidence, p));
    }
    GeneralizedGraph::build(nodes, edges).unwrap()
}

pub fn random_query(rng: &mut StdRng, max_nodes: usize) -> Query {
    let mut q = Query::new();
    let n = rng.gen_range(0..=max_nodes);
    let ids: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    for id in &ids {
        let theta = node_predicate(rng);
        q.add_node(QueryNode::new(id.clone(), sign(rng, 0.75), theta))
            .unwrap();
    }
    if n > 0 {
        for i in 0..rng.gen_range(0..=3) {
            let a = ids.choose(rng).unwrap().clone();
            let b = ids.choose(rng).unwrap().clone();
            let theta = path_predicate(rng);
            q.add_edge(QueryEdge::new(format!("f{i}"), a, b, sign(rng, 0.7), theta))
                .unwrap();
        }
    }
    q
}

/// Applies a random operator with valid arguments, or `None` when the
/// query offers no anchor for the chosen operator.
pub fn random_refinement(rng: &mut StdRng, q: &Query) -> Option<RefinementSet> {
    let positive: Vec<String> = q
        .nodes()
        .filter(|n| n.sign == Sign::Pos)
        .map(|n| n.id.clone())
        .collect();
    let is_pos = |id: &str| q.node(id).is_some_and(|n| n.sign == Sign::Pos);
    match rng.gen_range(0..4) {
        0 => Some(refine_add_node(q, "fresh").unwrap()),
        1 => {
            let n = positive.choose(rng)?;
            let m = positive.choose(rng)?;
            Some(refine_add_edge(q, n, m, sign(rng, 0.5)).unwrap())
        }
        2 => {
            let edges: Vec<&QueryEdge> = q
                .edges()
                .filter(|e| e.sign == Sign::Pos && is_pos(&e.from) && is_pos(&e.to))
                .collect();
            let e = edges.choose(rng)?;
            let phi = path_predicate(rng);
            Some(refine_add_edge_predicate(q, &e.id, &phi).unwrap())
        }
        _ => {
            let anchors: Vec<&String> = positive
                .iter()
                .filter(|n| q.neighbors(n).iter().all(|u| is_pos(u)))
                .collect();
            let n = anchors.choose(rng)?;
            let phi = node_predicate(rng);
            Some(refine_add_node_predicate(q, n, &phi).unwrap())
        }
    }
}

/// Operator triples for the partition and theorem checks: always yields
/// `count` entries, retrying until an operator applies.
pub fn triples(rng: &mut StdRng, count: usize) -> Vec<(GeneralizedGraph, Query, RefinementSet)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = random_graph(rng, 5, 6);
        let q = random_query(rng, 3);
        if let Some(r) = random_refinement(rng, &q) {
            out.push((g, q, r));
        }
    }
    out
}

/// Backtracking matcher written directly against the regex tree.
pub fn regex_oracle(re: &TypeRegex, seq: &[&str]) -> bool {
    fn go(re: &TypeRegex, seq: &[&str], i: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
        match re {
            TypeRegex::Symbol(s) => i < seq.len() && seq[i] == s && k(i + 1),
            TypeRegex::Any => i < seq.len() && k(i + 1),
            TypeRegex::Concat(xs) => match xs.split_first() {
                None => k(i),
                Some((head, rest)) => {
                    let rest = TypeRegex::Concat(rest.to_vec());
                    go(head, seq, i, &mut |j| go(&rest, seq, j, k))
                }
            },
            TypeRegex::Alt(xs) => xs.iter().any(|x| go(x, seq, i, k)),
            TypeRegex::Optional(x) => k(i) || go(x, seq, i, k),
            TypeRegex::Star(x) => k(i) || go(x, seq, i, &mut |j| j > i && go(re, seq, j, k)),
            TypeRegex::Plus(x) => go(x, seq, i, &mut |j| {
                k(j) || (j > i && go(&TypeRegex::Star(x.clone()), seq, j, k))
            }),
        }
    }
    go(re, seq, 0, &mut |j| j == seq.len())
}

/// Two query nodes joined by an edge whose predicate uses only a type regex
/// and endpoint atoms, so the exact product strategy applies.
pub fn strategy_query(rng: &mut StdRng, regex: &str) -> Query {
    let mut q = Query::new();
    let loop_edge = rng.gen_bool(0.2);
    let ends: &[&str] = if loop_edge { &["a"] } else { &["a", "b"] };
    for id in ends {
        let theta = parse_node_predicate(NODE_PREDICATES.choose(rng).unwrap()).unwrap();
        q.add_node(QueryNode::new(*id, sign(rng, 0.7), theta))
            .unwrap();
    }
    let extra = *["", " and src in S", " and dst not in S", " or dst in S"]
        .choose(rng)
        .unwrap();
    let theta = parse_path_predicate(&format!("types =~ /{regex}/{extra}")).unwrap();
    let to = ends[ends.len() - 1];
    q.add_edge(QueryEdge::new("e", "a", to, sign(rng, 0.7), theta))
        .unwrap();
    q
}

pub fn random_regex(rng: &mut StdRng, depth: usize) -> TypeRegex {
    let leaf = |rng: &mut StdRng| match rng.gen_range(0..4) {
        0 => TypeRegex::Any,
        i => TypeRegex::Symbol(["A", "B", "C"][i - 1].to_string()),
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let parts = |rng: &mut StdRng| {
        (0..rng.gen_range(2..=3))
            .map(|_| random_regex(rng, depth - 1))
            .collect()
    };
    match rng.gen_range(0..5) {
        0 => TypeRegex::Concat(parts(rng)),
        1 => TypeRegex::Alt(parts(rng)),
        2 => TypeRegex::Star(Box::new(random_regex(rng, depth - 1))),
        3 => TypeRegex::Plus(Box::new(random_regex(rng, depth - 1))),
        _ => TypeRegex::Optional(Box::new(random_regex(rng, depth - 1))),
    }
}

pub fn random_sequence(rng: &mut StdRng, max_len: usize) -> Vec<&'static str> {
    (0..rng.gen_range(0..=max_len))
        .map(|_| *["A", "B", "C"].choose(rng).unwrap())
        .collect()
}
