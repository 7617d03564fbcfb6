//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//! Run with `cargo test -p ggq --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ggq::fixtures::load_fixture_starwars;
use ggq::graph::{
    enumerate_subgraphs, EnumerateOptions, GeneralizedGraph, PropertyValue, SubgraphRef,
};
use ggq::matcher::{enumerate_matches, matches, EdgeEnd, MatchConfig, Matcher};
use ggq::predicate::{parse_type_regex, TypeNfa};
use ggq::query::{Query, Sign};
use ggq::refinement::{
    build_refinement_tree, clone_query, equivalent_oracle, is_conservative_extension,
    refine_add_edge, refine_add_node, refines_oracle, simplified_refinement, simplify,
    verify_refinement_set, P5Policy,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

const SEED: u64 = 20_240_601;
const CORPUS_SIZE: usize = 200;
const REGRESSION_BUDGET: Duration = Duration::from_secs(5);
const PARTITION_BUDGET: Duration = Duration::from_secs(60);
const MIN_REGEX_PAIRS: usize = 1000;
const MAX_NFA_STATES: usize = 5;
const P5_MAX_NODES: usize = 3;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn cfg() -> MatchConfig {
    MatchConfig::default()
}

fn corpus() -> Vec<(GeneralizedGraph, Query, ggq::refinement::RefinementSet)> {
    common::triples(&mut StdRng::seed_from_u64(SEED), CORPUS_SIZE)
}

fn regression() -> Result<Outcome, Box<dyn std::error::Error>> {
    let start = Instant::now();
    let fx = load_fixture_starwars();
    let g = &fx.graph;
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };
    check("S1 |= P1", matches(&fx.s1(), fx.query("p1"), g, cfg())?);
    check("S2 |= P2", matches(&fx.s2(), fx.query("p2"), g, cfg())?);
    for tri in [
        ["luke_skywalker", "r2d2", "c3po"],
        ["han_solo", "princess_leia", "chewbaka"],
    ] {
        check(
            &format!("{tri:?} |= P3"),
            matches(&fx.induced(&tri), fx.query("p3"), g, cfg())?,
        );
    }
    for ids in [
        vec!["luke_skywalker"],
        vec!["obi_wan_kenobi"],
        vec!["luke_skywalker", "r2d2", "tatooine"],
        vec!["obi_wan_kenobi", "darth_vader", "stewjon"],
    ] {
        check(
            &format!("{ids:?} |= P4"),
            matches(&fx.induced(&ids), fx.query("p4"), g, cfg())?,
        );
    }
    let sides: Vec<String> = g
        .nodes()
        .iter()
        .filter(|n| n.props.get("type") == Some(&PropertyValue::from("side")))
        .map(|n| format!("{{{}}}", n.id))
        .collect();
    let found: Vec<String> =
        enumerate_matches(g, fx.query("p5"), cfg(), EnumerateOptions::up_to(1))?
            .map(|s| s.map(|s| s.describe(g)))
            .collect::<Result<_, _>>()?;
    check(
        "P5 singletons are the sides",
        !sides.is_empty() && found == sides,
    );
    check(
        "lineage |= P6",
        matches(&fx.lineage(), fx.query("p6"), g, cfg())?,
    );
    let elapsed = start.elapsed();
    check("time budget", elapsed < REGRESSION_BUDGET);
    let detail = if failures.is_empty() {
        format!("10 facts hold in {elapsed:.2?}")
    } else {
        format!("failed: {}", failures.join(", "))
    };
    Ok(Outcome::new(failures.is_empty(), detail))
}

fn partition() -> Result<Outcome, Box<dyn std::error::Error>> {
    let start = Instant::now();
    let mut violations = 0;
    let mut checked = 0;
    let mut first = None;
    for (g, q, set) in corpus() {
        for variant in [set.clone(), simplified_refinement(&set)] {
            let report = verify_refinement_set(&variant, &g, cfg(), g.node_count())?;
            checked += report.subgraphs_checked;
            if !report.passed() {
                violations += report.violations.len();
                first.get_or_insert_with(|| format!("{q} / {}: {report}", variant.operator));
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = violations == 0 && elapsed < PARTITION_BUDGET;
    let mut detail = format!(
        "{CORPUS_SIZE} triples plus simplified variants, {checked} subgraph checks, {violations} violations in {elapsed:.2?}"
    );
    if let Some(f) = first {
        detail.push_str(&format!("; first: {f}"));
    }
    Ok(Outcome::new(passed, detail))
}

fn theorems() -> Result<Outcome, Box<dyn std::error::Error>> {
    let mut failures: Vec<String> = Vec::new();
    let mut counts = [0usize; 5];
    for (g, q, set) in corpus() {
        let max = g.node_count();
        let positive = q
            .nodes()
            .filter(|n| n.sign == Sign::Pos)
            .map(|n| n.id.clone())
            .collect();
        let (cloned, _) = clone_query(&q, &positive)?;
        counts[0] += 1;
        if !equivalent_oracle(&cloned, &q, &g, cfg(), max)? {
            failures.push(format!("clone of {q}"));
        }

        let simple = simplify(&q);
        counts[1] += 1;
        if !equivalent_oracle(&simple, &q, &g, cfg(), max)? {
            failures.push(format!("simplify of {q}"));
        }

        let mut family = vec![q.clone(), simple, cloned];
        family.extend(set.members.iter().cloned());
        let n = family.len();
        let mut refines = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                refines[i][j] = refines_oracle(&family[i], &family[j], &g, cfg(), max)?;
            }
        }
        for i in 0..n {
            counts[2] += 1;
            if !refines[i][i] {
                failures.push(format!("reflexivity of {}", family[i]));
            }
            for j in 0..n {
                if is_conservative_extension(&family[j], &family[i]) {
                    counts[3] += 1;
                    if !refines[i][j] {
                        failures.push(format!("conservative {} over {}", family[i], family[j]));
                    }
                }
                counts[4] += 1;
                let mutual = refines[i][j] && refines[j][i];
                if mutual != equivalent_oracle(&family[i], &family[j], &g, cfg(), max)? {
                    failures.push(format!("equivalence of {} and {}", family[i], family[j]));
                }
                for k in 0..n {
                    if refines[i][j] && refines[j][k] && !refines[i][k] {
                        failures.push(format!("transitivity through {}", family[j]));
                    }
                }
            }
        }
    }
    let detail = format!(
        "{} clones, {} simplifications, {} reflexive, {} conservative pairs, {} equivalence pairs; {} violations{}",
        counts[0],
        counts[1],
        counts[2],
        counts[3],
        counts[4],
        failures.len(),
        failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
    );
    Ok(Outcome::new(failures.is_empty(), detail))
}

fn matches_nothing(q: &Query, g: &GeneralizedGraph) -> Result<bool, Box<dyn std::error::Error>> {
    for s in enumerate_subgraphs(g, EnumerateOptions::up_to(g.node_count())) {
        if matches(&s?, q, g, cfg())? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn add_node_corners() -> Result<Outcome, Box<dyn std::error::Error>> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 4);
    let empty = GeneralizedGraph::empty();
    let mut failures = Vec::new();
    let rounds = 50;
    for _ in 0..rounds {
        let g = common::random_graph(&mut rng, 4, 5);
        let q = common::random_query(&mut rng, 3);
        let set = refine_add_node(&q, "fresh")?;
        let (plus, minus) = (&set.members[0], &set.members[1]);
        if !equivalent_oracle(plus, &q, &g, cfg(), g.node_count())? || !matches_nothing(minus, &g)?
        {
            failures.push(format!("non-empty graph, {q}"));
        }
        if !equivalent_oracle(minus, &q, &empty, cfg(), 0)? || !matches_nothing(plus, &empty)? {
            failures.push(format!("empty graph, {q}"));
        }
        if !verify_refinement_set(&set, &empty, cfg(), 0)?.passed() {
            failures.push(format!("empty-graph partition, {q}"));
        }
    }
    let detail = format!(
        "{rounds} queries on random and empty graphs, {} violations{}",
        failures.len(),
        failures
            .first()
            .map(|f| format!("; first: {f}"))
            .unwrap_or_default()
    );
    Ok(Outcome::new(failures.is_empty(), detail))
}

fn p5_replay() -> Result<Outcome, Box<dyn std::error::Error>> {
    let start = Instant::now();
    let fx = load_fixture_starwars();
    let tree = build_refinement_tree(&Query::new(), &mut P5Policy::new(), 5)?;
    let leaf = &tree.deepest_leaf().query;
    let equivalent = equivalent_oracle(leaf, fx.query("p5"), &fx.graph, cfg(), P5_MAX_NODES)?;
    let detail = format!(
        "tree of {} nodes, leaf with {} nodes and {} edges, equivalent up to {P5_MAX_NODES} nodes: {equivalent} ({:.2?})",
        tree.len(),
        leaf.node_count(),
        leaf.edge_count(),
        start.elapsed()
    );
    Ok(Outcome::new(equivalent && tree.height() == 5, detail))
}

fn strategy_agreement() -> Result<Outcome, Box<dyn std::error::Error>> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 6);
    let mut regexes: Vec<String> = common::SMALL_REGEXES
        .iter()
        .map(|s| s.to_string())
        .collect();
    while regexes.len() < 40 {
        let re = common::random_regex(&mut rng, 2);
        if TypeNfa::compile(&re).state_count() <= MAX_NFA_STATES {
            regexes.push(re.to_string());
        }
    }
    let mut comparisons = 0usize;
    let mut disagreements = Vec::new();
    for round in 0..CORPUS_SIZE {
        let g = common::random_graph(&mut rng, 5, 6);
        let re = &regexes[round % regexes.len()];
        let states = TypeNfa::compile(&parse_type_regex(re)?).state_count();
        if states > MAX_NFA_STATES {
            return Ok(Outcome::new(false, format!("/{re}/ has {states} states")));
        }
        let q = common::strategy_query(&mut rng, re);
        let exact = Matcher::new(&q, &g, cfg())?;
        let bounded = Matcher::new(
            &q,
            &g,
            MatchConfig {
                max_walk_len: (g.node_count() * states).max(1),
                oracle_mode: true,
                ..cfg()
            },
        )?;
        if exact.is_bounded("e")? || !bounded.is_bounded("e")? {
            return Ok(Outcome::new(
                false,
                format!("strategy selection wrong for {q}"),
            ));
        }
        for s in enumerate_subgraphs(&g, EnumerateOptions::up_to(g.node_count())) {
            let s: SubgraphRef = s?;
            for v in 0..g.node_count() {
                for end in [EdgeEnd::Origin, EdgeEnd::Terminus] {
                    comparisons += 1;
                    if exact.edge_qpredicate("e", end, v, &s)?
                        != bounded.edge_qpredicate("e", end, v, &s)?
                    {
                        disagreements.push(format!(
                            "{q} at {} in {}",
                            g.node(v).id,
                            s.describe(&g)
                        ));
                    }
                }
            }
            comparisons += 1;
            if exact.matches(&s)? != bounded.matches(&s)? {
                disagreements.push(format!("{q} on {}", s.describe(&g)));
            }
        }
    }
    let detail =
        format!(
        "{} regexes over {CORPUS_SIZE} graphs, {comparisons} verdicts compared, {} disagreements{}",
        regexes.len(),
        disagreements.len(),
        disagreements.first().map(|d| format!("; first: {d}")).unwrap_or_default()
    );
    Ok(Outcome::new(disagreements.is_empty(), detail))
}

fn all_sequences(max_len: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|seq: &Vec<&'static str>| {
                ["A", "B", "C"].map(|s| {
                    let mut next = seq.clone();
                    next.push(s);
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn regex_engine() -> Result<Outcome, Box<dyn std::error::Error>> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 7);
    let sequences = all_sequences(4);
    let mut pairs = 0usize;
    let mut disagreements = Vec::new();
    for _ in 0..150 {
        let re = common::random_regex(&mut rng, 3);
        let nfa = TypeNfa::compile(&re);
        for seq in &sequences {
            pairs += 1;
            if nfa.accepts(seq) != common::regex_oracle(&re, seq) {
                disagreements.push(format!("/{re}/ on {seq:?}"));
            }
        }
    }
    let passed = disagreements.is_empty() && pairs >= MIN_REGEX_PAIRS;
    let detail = format!(
        "{pairs} regex/sequence pairs, {} disagreements{}",
        disagreements.len(),
        disagreements
            .first()
            .map(|d| format!("; first: {d}"))
            .unwrap_or_default()
    );
    Ok(Outcome::new(passed, detail))
}

fn loop_case() -> Result<Outcome, Box<dyn std::error::Error>> {
    let fx = load_fixture_starwars();
    let mut failures = Vec::new();
    let mut runs = 0;
    for sign in [Sign::Pos, Sign::Neg] {
        let set = refine_add_edge(fx.query("p1"), "student", "student", sign)?;
        runs += 1;
        if set.len() != 2 || !verify_refinement_set(&set, &fx.graph, cfg(), 2)?.passed() {
            failures.push(format!("fixture, {sign}"));
        }
    }
    let mut rng = StdRng::seed_from_u64(SEED ^ 8);
    while runs < 50 {
        let g = common::random_graph(&mut rng, 5, 6);
        let q = common::random_query(&mut rng, 3);
        let Some(n) = q
            .nodes()
            .find(|n| n.sign == Sign::Pos)
            .map(|n| n.id.clone())
        else {
            continue;
        };
        let sign = if runs % 2 == 0 { Sign::Pos } else { Sign::Neg };
        let set = refine_add_edge(&q, &n, &n, sign)?;
        runs += 1;
        if set.len() != 2 || !verify_refinement_set(&set, &g, cfg(), g.node_count())?.passed() {
            failures.push(format!("{q} at {n}"));
        }
    }
    let detail = format!(
        "{runs} loop refinements, {} failures{}",
        failures.len(),
        failures
            .first()
            .map(|f| format!("; first: {f}"))
            .unwrap_or_default()
    );
    Ok(Outcome::new(failures.is_empty(), detail))
}

type Criterion = fn() -> Result<Outcome, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("fixture regression", regression),
        ("refinement-set partition", partition),
        ("theorem echoes", theorems),
        ("add-node corner cases", add_node_corners),
        ("P5 construction replay", p5_replay),
        ("exact vs bounded path strategy", strategy_agreement),
        ("regex engine vs backtracking", regex_engine),
        ("loop edge refinement", loop_case),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "[{verdict}] {} {name}: {} [{:.2?}]",
            i + 1,
            outcome.detail,
            start.elapsed()
        );
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
