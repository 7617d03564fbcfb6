use ggq::fixtures::load_fixture_starwars;
use ggq::graph::{EnumerateOptions, SubgraphRef};
use ggq::matcher::{
    enumerate_matches, explain_match, matches, EdgeEnd, Explanation, MatchConfig, Matcher,
    NodeOutcome,
};
use ggq::query::{store_query, validate_query, Query, QueryDocument};

fn cfg() -> MatchConfig {
    MatchConfig::default()
}

#[test]
fn bundled_queries_validate() {
    for (name, text) in ggq::fixtures::QUERY_JSON {
        let doc: QueryDocument = serde_json::from_str(text).unwrap();
        assert!(validate_query(&doc).is_valid(), "{name}");
    }
}

#[test]
fn s1_matches_p1() {
    let fx = load_fixture_starwars();
    assert!(matches(&fx.s1(), fx.query("p1"), &fx.graph, cfg()).unwrap());
    // Without Yoda nobody old enough is in S.
    let luke = fx.induced(&["luke_skywalker"]);
    assert!(!matches(&luke, fx.query("p1"), &fx.graph, cfg()).unwrap());
}

#[test]
fn s1_witness_names_the_old_teacher() {
    let fx = load_fixture_starwars();
    let Explanation::Match(w) = explain_match(&fx.s1(), fx.query("p1"), &fx.graph, cfg()).unwrap()
    else {
        panic!("S1 should match P1");
    };
    let teacher = w
        .nodes
        .iter()
        .find_map(|n| match n {
            NodeOutcome::Witnessed(nw) if nw.query_node == "teacher" => Some(nw),
            _ => None,
        })
        .unwrap();
    assert_eq!(teacher.data_node, "yoda");
    assert_eq!(teacher.edges.len(), 2);
}

#[test]
fn s2_matches_p2() {
    let fx = load_fixture_starwars();
    assert!(matches(&fx.s2(), fx.query("p2"), &fx.graph, cfg()).unwrap());
    let without_vader = fx.induced(&["luke_skywalker", "tatooine"]);
    assert!(!matches(&without_vader, fx.query("p2"), &fx.graph, cfg()).unwrap());
}

#[test]
fn friend_triangles_match_p3() {
    let fx = load_fixture_starwars();
    let p3 = fx.query("p3");
    for tri in [
        ["luke_skywalker", "r2d2", "c3po"],
        ["han_solo", "princess_leia", "chewbaka"],
    ] {
        assert!(
            matches(&fx.induced(&tri), p3, &fx.graph, cfg()).unwrap(),
            "{tri:?}"
        );
    }
    // Nodes are matched independently, so one friendship inside S already
    // closes the cycle through its two directions.
    assert!(matches(&fx.induced(&["yoda", "r2d2", "c3po"]), p3, &fx.graph, cfg()).unwrap());
    let not_friends = fx.induced(&["yoda", "r2d2", "tatooine"]);
    assert!(!matches(&not_friends, p3, &fx.graph, cfg()).unwrap());
}

#[test]
fn luke_or_obi_wan_match_p4() {
    let fx = load_fixture_starwars();
    let p4 = fx.query("p4");
    for ids in [
        vec!["luke_skywalker"],
        vec!["obi_wan_kenobi"],
        vec!["luke_skywalker", "r2d2", "tatooine"],
        vec!["obi_wan_kenobi", "darth_vader", "stewjon"],
    ] {
        assert!(
            matches(&fx.induced(&ids), p4, &fx.graph, cfg()).unwrap(),
            "{ids:?}"
        );
    }
    assert!(!matches(&fx.induced(&["yoda"]), p4, &fx.graph, cfg()).unwrap());
}

#[test]
fn p5_singletons_are_the_sides() {
    let fx = load_fixture_starwars();
    let found: Vec<String> =
        enumerate_matches(&fx.graph, fx.query("p5"), cfg(), EnumerateOptions::up_to(1))
            .unwrap()
            .map(|s| s.unwrap().describe(&fx.graph))
            .collect();
    assert_eq!(found, ["{dark_side}", "{light_side}"]);
}

#[test]
fn lineage_matches_p6() {
    let fx = load_fixture_starwars();
    assert!(matches(&fx.lineage(), fx.query("p6"), &fx.graph, cfg()).unwrap());
    assert!(!matches(
        &fx.induced(&["yoda", "luke_skywalker"]),
        fx.query("p6"),
        &fx.graph,
        cfg()
    )
    .unwrap());
}

#[test]
fn yoda_teaches_edge_predicate() {
    let fx = load_fixture_starwars();
    let q = ggq::query::load_query(
        r#"{"nodes":[{"id":"a","sign":"+"},{"id":"b","sign":"+"}],
            "edges":[{"id":"t","from":"a","to":"b","sign":"+","theta":"types =~ /TEACHES/"}]}"#,
    )
    .unwrap();
    let m = Matcher::new(&q, &fx.graph, cfg()).unwrap();
    let yoda = fx.graph.node_ix("yoda").unwrap();
    let tatooine = fx.graph.node_ix("tatooine").unwrap();
    let s = SubgraphRef::empty();
    assert!(m.edge_qpredicate("t", EdgeEnd::Origin, yoda, &s).unwrap());
    assert!(!m
        .edge_qpredicate("t", EdgeEnd::Origin, tatooine, &s)
        .unwrap());
}

#[test]
fn explain_names_the_failing_node() {
    let fx = load_fixture_starwars();
    let e = explain_match(&SubgraphRef::empty(), fx.query("p1"), &fx.graph, cfg()).unwrap();
    match e {
        Explanation::Failure(f) => assert_eq!(f.query_node, "jedi"),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn empty_query_matches_everything() {
    let fx = load_fixture_starwars();
    let count = enumerate_matches(&fx.graph, &Query::new(), cfg(), EnumerateOptions::up_to(1))
        .unwrap()
        .count();
    assert_eq!(count, fx.graph.node_count() + 1);
}

#[test]
fn stored_fixture_queries_round_trip() {
    let fx = load_fixture_starwars();
    for q in fx.queries.values() {
        let text = store_query(q);
        let again = ggq::query::load_query(&text).unwrap();
        assert_eq!(store_query(&again), text);
    }
    assert!(store_query(fx.query("p4")).contains("(FRIENDS|TEACHES)+"));
}
