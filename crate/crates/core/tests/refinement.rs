mod common;

use ggq::fixtures::load_fixture_starwars;
use ggq::graph::{GeneralizedGraph, SubgraphRef};
use ggq::matcher::{matches, MatchConfig};
use ggq::predicate::{parse_node_predicate, parse_path_predicate, Formula};
use ggq::query::{load_query, Query, QueryEdge, QueryNode, Sign};
use ggq::refinement::{
    build_refinement_tree, clone_query, equivalent_oracle, is_conservative_extension,
    refine_add_edge, refine_add_edge_predicate, refine_add_node, refine_add_node_predicate,
    refines_oracle, simplified_refinement, simplify, verify_refinement_set, BfsPolicy, P5Policy,
    PartitionViolation,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn cfg() -> MatchConfig {
    MatchConfig::default()
}

fn single(id: &str, sign: Sign, theta: &str) -> Query {
    let mut q = Query::new();
    q.add_node(QueryNode::new(
        id,
        sign,
        parse_node_predicate(theta).unwrap(),
    ))
    .unwrap();
    q
}

#[test]
fn fixture_partitions_for_every_operator() {
    let f = load_fixture_starwars();
    let p1 = f.query("p1");
    let sets = [
        refine_add_node(p1, "extra").unwrap(),
        refine_add_edge(p1, "teacher", "jedi", Sign::Neg).unwrap(),
        refine_add_edge(p1, "student", "student", Sign::Pos).unwrap(),
        refine_add_edge_predicate(p1, "teaches", &parse_path_predicate("len = 1").unwrap())
            .unwrap(),
        refine_add_node_predicate(p1, "student", &parse_node_predicate("v in S").unwrap()).unwrap(),
    ];
    for set in &sets {
        let report = verify_refinement_set(set, &f.graph, cfg(), 2).unwrap();
        assert!(report.passed(), "{}: {report}", set.operator);
        let simple = simplified_refinement(set);
        let report = verify_refinement_set(&simple, &f.graph, cfg(), 2).unwrap();
        assert!(report.passed(), "simplified {}: {report}", set.operator);
    }
}

#[test]
fn dropping_a_member_is_reported() {
    let f = load_fixture_starwars();
    // On a non-empty graph the positive member carries every match.
    let mut set = refine_add_node(f.query("p5"), "extra").unwrap();
    set.members.remove(0);
    let report = verify_refinement_set(&set, &f.graph, cfg(), 1).unwrap();
    assert!(!report.passed());
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, PartitionViolation::Uncovered { .. })));
}

#[test]
fn add_node_roles_swap_on_the_empty_graph() {
    let q = single("a", Sign::Neg, "v in S");
    let set = refine_add_node(&q, "m").unwrap();
    let empty = GeneralizedGraph::empty();
    let s = SubgraphRef::empty();
    assert!(matches(&s, &q, &empty, cfg()).unwrap());
    assert!(!matches(&s, &set.members[0], &empty, cfg()).unwrap());
    assert!(matches(&s, &set.members[1], &empty, cfg()).unwrap());
    assert!(verify_refinement_set(&set, &empty, cfg(), 0)
        .unwrap()
        .passed());
}

#[test]
fn independent_constraints_are_incomparable() {
    let nodes = ["a", "b"]
        .map(|id| (id.to_string(), Default::default()))
        .to_vec();
    let g = GeneralizedGraph::build(nodes, Vec::new()).unwrap();
    let inside = single("n", Sign::Pos, "v in S");
    let outside = single("n", Sign::Pos, "v not in S");
    assert!(!refines_oracle(&inside, &outside, &g, cfg(), 2).unwrap());
    assert!(!refines_oracle(&outside, &inside, &g, cfg(), 2).unwrap());
}

#[test]
fn tautology_node_adds_nothing_on_nonempty_graphs() {
    let f = load_fixture_starwars();
    let q = f.query("p2").clone();
    let mut bigger = q.clone();
    bigger
        .add_node(QueryNode::new("extra", Sign::Pos, Formula::True))
        .unwrap();
    assert!(equivalent_oracle(&q, &bigger, &f.graph, cfg(), 2).unwrap());
}

#[test]
fn conservative_extension_of_a_negative_node() {
    let mut q2 = Query::new();
    q2.add_node(QueryNode::new("a", Sign::Pos, Formula::True))
        .unwrap();
    q2.add_node(QueryNode::new(
        "b",
        Sign::Neg,
        parse_node_predicate("v in S").unwrap(),
    ))
    .unwrap();
    let mut q1 = q2.clone();
    q1.add_node(QueryNode::new(
        "c",
        Sign::Pos,
        parse_node_predicate("deg(v) >= 1").unwrap(),
    ))
    .unwrap();
    q1.add_edge(QueryEdge::new(
        "e",
        "a",
        "c",
        Sign::Pos,
        parse_path_predicate("types =~ /A/").unwrap(),
    ))
    .unwrap();
    assert!(is_conservative_extension(&q2, &q2));
    assert!(is_conservative_extension(&q2, &q1));
    let mut restricted = q1.clone();
    restricted
        .add_edge(QueryEdge::new("r", "c", "b", Sign::Pos, Formula::True))
        .unwrap();
    assert!(!is_conservative_extension(&q2, &restricted));

    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..20 {
        let g = common::random_graph(&mut rng, 4, 5);
        assert!(refines_oracle(&q1, &q2, &g, cfg(), 4).unwrap());
    }
}

#[test]
fn random_sets_partition_and_simplify_preserves_meaning() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for (g, q, set) in common::triples(&mut rng, 40) {
        let report = verify_refinement_set(&set, &g, cfg(), 5).unwrap();
        assert!(report.passed(), "{q} / {}: {report}", set.operator);
        assert!(
            equivalent_oracle(&simplify(&q), &q, &g, cfg(), 5).unwrap(),
            "{q}"
        );
    }
}

#[test]
fn clones_over_positive_nodes_are_equivalent() {
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..40 {
        let g = common::random_graph(&mut rng, 4, 5);
        let q = common::random_query(&mut rng, 3);
        let w = q
            .nodes()
            .filter(|n| n.sign == Sign::Pos)
            .map(|n| n.id.clone())
            .collect();
        let (c, _) = clone_query(&q, &w).unwrap();
        assert!(equivalent_oracle(&c, &q, &g, cfg(), 4).unwrap(), "{q}");
    }
}

#[test]
fn p5_replay_matches_the_bundled_query() {
    let f = load_fixture_starwars();
    let tree = build_refinement_tree(&Query::new(), &mut P5Policy::new(), 5).unwrap();
    assert_eq!(tree.height(), 5);
    let leaf = &tree.deepest_leaf().query;
    assert!(equivalent_oracle(leaf, f.query("p5"), &f.graph, cfg(), 2).unwrap());
    // The replayed query round-trips through the stored format.
    let text = ggq::query::store_query(leaf);
    assert_eq!(&load_query(&text).unwrap().normalized(), &leaf.normalized());
}

#[test]
fn tree_children_partition_their_parent() {
    let mut rng = StdRng::seed_from_u64(5);
    let g = common::random_graph(&mut rng, 4, 4);
    let tree = build_refinement_tree(&Query::new(), &mut BfsPolicy::default(), 3).unwrap();
    for node in &tree.nodes {
        if let Some(set) = &node.refinement {
            let report = verify_refinement_set(set, &g, cfg(), 4).unwrap();
            assert!(report.passed(), "{}: {report}", set.operator);
        }
    }
}
