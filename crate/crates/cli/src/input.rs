use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use ggq::fixtures::{load_fixture_starwars, NAMED_SUBGRAPHS};
use ggq::graph::{GeneralizedGraph, SubgraphRef};
use ggq::query::{load_query, Query};

const BUILTIN: &str = "builtin:";

/// A graph file, or `builtin:starwars`.
pub fn graph(arg: &str) -> Result<GeneralizedGraph> {
    if let Some(name) = arg.strip_prefix(BUILTIN) {
        return match name {
            "starwars" => Ok(load_fixture_starwars().graph),
            _ => bail!("unknown builtin graph `{name}` (expected starwars)"),
        };
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading graph {arg}"))?;
    GeneralizedGraph::from_json(&text).with_context(|| format!("loading graph {arg}"))
}

/// A query file, `builtin:p1` to `builtin:p6`, or `builtin:empty`.
pub fn query(arg: &str) -> Result<Query> {
    if let Some(name) = arg.strip_prefix(BUILTIN) {
        if name == "empty" {
            return Ok(Query::new());
        }
        let mut fixture = load_fixture_starwars();
        return fixture
            .queries
            .remove(name)
            .ok_or_else(|| anyhow!("unknown builtin query `{name}` (expected p1..p6 or empty)"));
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading query {arg}"))?;
    load_query(&text).with_context(|| format!("loading query {arg}"))
}

/// `S1`, `S2` or `lineage`; `a,b` for the subgraph induced by nodes `a` and
/// `b`; `a,b|e` for nodes `a`, `b` and edge `e` only. Braces and spaces are
/// ignored, so the `{a, b | e}` rendering of a subgraph reads back.
pub fn subgraph(g: &GeneralizedGraph, spec: &str) -> Result<SubgraphRef> {
    if let Some((_, ids)) = NAMED_SUBGRAPHS.iter().find(|(name, _)| *name == spec) {
        return SubgraphRef::induced(g, ids.iter().copied())
            .with_context(|| format!("resolving {spec}"));
    }
    let cleaned: String = spec
        .chars()
        .filter(|c| !matches!(c, '{' | '}' | ' '))
        .collect();
    let split = |part: &str| -> Vec<String> {
        part.split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    };
    let s = match cleaned.split_once('|') {
        None => SubgraphRef::induced(g, split(&cleaned))?,
        Some((nodes, edges)) => SubgraphRef::from_ids(g, split(nodes), split(edges))?,
    };
    if let Some(v) = s.violations(g).first() {
        bail!("`{spec}` is not a subgraph: {v:?}");
    }
    Ok(s)
}
