use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ggq::dot::{graph_to_dot, query_digest, tree_to_dot};
use ggq::graph::{GeneralizedGraph, SubgraphRef};
use ggq::matcher::{enumerate_matches, explain_match};
use ggq::predicate::{parse_node_predicate, parse_path_predicate};
use ggq::query::{store_query, Query, Sign};
use ggq::refinement::{
    build_refinement_tree, equivalent_oracle, refine_add_edge, refine_add_edge_predicate,
    refine_add_node, refine_add_node_predicate, refines_oracle, simplified_refinement, simplify,
    verify_partition, verify_refinement_set, BfsPolicy, P5Policy, RefinementPolicy, RefinementSet,
    RefinementTree,
};
use serde_json::json;

use crate::config::{CliConfig, OutputFormat, Overrides};
use crate::{input, Command, OperatorArg, OracleKind, PolicyArg};

pub fn run(command: Command, overrides: &Overrides) -> Result<bool> {
    let cfg = CliConfig::resolve(overrides)?;
    match command {
        Command::Match {
            graph,
            query,
            subgraph,
        } => {
            let g = input::graph(&graph)?;
            let q = input::query(&query)?;
            let s = input::subgraph(&g, &subgraph)?;
            let e = explain_match(&s, &q, &g, cfg.match_config())?;
            match cfg.format {
                OutputFormat::Json => println!(
                    "{}",
                    json!({"subgraph": s.describe(&g), "matches": e.is_match(), "explanation": e.to_string()})
                ),
                _ => println!("{e}"),
            }
            Ok(e.is_match())
        }
        Command::Enumerate { graph, query } => {
            let g = input::graph(&graph)?;
            let q = input::query(&query)?;
            let mut found = 0usize;
            for s in enumerate_matches(&g, &q, cfg.match_config(), cfg.enumerate_options())? {
                let s = s?;
                found += 1;
                match cfg.format {
                    OutputFormat::Json => println!("{}", subgraph_json(&g, &s)),
                    _ => println!("{}", s.describe(&g)),
                }
            }
            if cfg.format == OutputFormat::Text {
                eprintln!("{found} matching subgraphs");
            }
            Ok(found > 0)
        }
        Command::Refine {
            query,
            op,
            args,
            out,
            simplify: simple,
        } => {
            let q = input::query(&query)?;
            let mut set = refine(&q, op, &args)?;
            if simple {
                set = simplified_refinement(&set);
            }
            write_members(&set, &out, cfg.format)?;
            Ok(true)
        }
        Command::Simplify { query } => {
            let q = input::query(&query)?;
            println!("{}", store_query(&simplify(&q)));
            Ok(true)
        }
        Command::VerifySet {
            graph,
            parent,
            members,
        } => {
            let g = input::graph(&graph)?;
            let parent = input::query(&parent)?;
            let members = members
                .iter()
                .map(|m| input::query(m))
                .collect::<Result<Vec<_>>>()?;
            let report =
                verify_partition(&parent, &members, &g, cfg.match_config(), cfg.max_nodes)?;
            match cfg.format {
                OutputFormat::Json => println!(
                    "{}",
                    json!({
                        "passed": report.passed(),
                        "subgraphs_checked": report.subgraphs_checked,
                        "parent_matches": report.parent_matches,
                        "violations": report.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    })
                ),
                _ => println!(
                    "{} {report}",
                    if report.passed() { "pass:" } else { "FAIL:" }
                ),
            }
            Ok(report.passed())
        }
        Command::Oracle {
            kind,
            graph,
            q1,
            q2,
        } => {
            let g = input::graph(&graph)?;
            let (a, b) = (input::query(&q1)?, input::query(&q2)?);
            let verdict = match kind {
                OracleKind::Refines => {
                    refines_oracle(&a, &b, &g, cfg.match_config(), cfg.max_nodes)?
                }
                OracleKind::Equiv => {
                    equivalent_oracle(&a, &b, &g, cfg.match_config(), cfg.max_nodes)?
                }
            };
            match cfg.format {
                OutputFormat::Json => println!("{}", json!({ "verdict": verdict })),
                _ => println!("{verdict}"),
            }
            Ok(verdict)
        }
        Command::Tree {
            graph,
            root,
            policy,
            depth,
            dot,
            check,
        } => {
            let g = input::graph(&graph)?;
            let q0 = input::query(&root)?;
            let mut policy: Box<dyn RefinementPolicy> = match policy {
                PolicyArg::P5 => Box::new(P5Policy::new()),
                PolicyArg::Bfs => Box::new(BfsPolicy::default()),
            };
            let tree = build_refinement_tree(&q0, policy.as_mut(), depth)?;
            if let Some(path) = dot {
                fs::write(&path, tree_to_dot(&tree))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            print_tree(&tree, cfg.format);
            if check {
                return check_tree(&tree, &g, &cfg);
            }
            Ok(true)
        }
        Command::Dot { graph } => {
            print!("{}", graph_to_dot(&input::graph(&graph)?));
            Ok(true)
        }
    }
}

fn subgraph_json(g: &GeneralizedGraph, s: &SubgraphRef) -> serde_json::Value {
    let nodes: Vec<&str> = s.nodes.iter().map(|&n| g.node(n).id.as_str()).collect();
    let edges: Vec<&str> = s.edges.iter().map(|&e| g.edge(e).id.as_str()).collect();
    json!({ "nodes": nodes, "edges": edges })
}

fn refine(q: &Query, op: OperatorArg, args: &[String]) -> Result<RefinementSet> {
    let set = match (op, args) {
        (OperatorArg::AddNode, [id]) => refine_add_node(q, id)?,
        (OperatorArg::AddEdge, [from, to]) => refine_add_edge(q, from, to, Sign::Pos)?,
        (OperatorArg::AddEdge, [from, to, sign]) => {
            let Some(sign) = Sign::parse(sign) else {
                bail!("edge sign must be + or -, got `{sign}`");
            };
            refine_add_edge(q, from, to, sign)?
        }
        (OperatorArg::AddEdgePred, [edge, phi]) => {
            refine_add_edge_predicate(q, edge, &parse_path_predicate(phi)?)?
        }
        (OperatorArg::AddNodePred, [node, phi]) => {
            refine_add_node_predicate(q, node, &parse_node_predicate(phi)?)?
        }
        (op, args) => bail!("wrong arguments for {op:?}: {args:?}"),
    };
    Ok(set)
}

fn write_members(set: &RefinementSet, out: &Path, format: OutputFormat) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut listing = Vec::new();
    for (i, member) in set.members.iter().enumerate() {
        let path = out.join(format!("member-{i}.json"));
        fs::write(&path, store_query(member))
            .with_context(|| format!("writing {}", path.display()))?;
        listing.push((path.display().to_string(), set.assignments[i].clone()));
    }
    match format {
        OutputFormat::Json => println!(
            "{}",
            json!({
                "operator": set.operator.to_string(),
                "simplified": set.simplified,
                "new_edge": set.new_edge,
                "members": listing
                    .iter()
                    .map(|(file, assignment)| json!({"file": file, "assignment": assignment}))
                    .collect::<Vec<_>>(),
            })
        ),
        _ => {
            println!("{} ({} members)", set.operator, set.len());
            for (file, assignment) in listing {
                println!("  {file}  {assignment}");
            }
        }
    }
    Ok(())
}

fn print_tree(tree: &RefinementTree, format: OutputFormat) {
    match format {
        OutputFormat::Dot => print!("{}", tree_to_dot(tree)),
        OutputFormat::Json => {
            let nodes: Vec<serde_json::Value> = tree
                .nodes
                .iter()
                .enumerate()
                .map(|(ix, n)| {
                    json!({
                        "index": ix,
                        "parent": n.parent,
                        "depth": n.depth,
                        "digest": query_digest(&n.query),
                        "operator": n.refinement.as_ref().map(|r| r.operator.to_string()),
                        "children": n.children,
                        "query": n.query.to_document(),
                    })
                })
                .collect();
            println!("{}", serde_json::Value::Array(nodes));
        }
        OutputFormat::Text => {
            for (ix, n) in tree.nodes.iter().enumerate() {
                let assignment = n
                    .parent
                    .zip(n.member)
                    .and_then(|(p, m)| {
                        tree.nodes[p]
                            .refinement
                            .as_ref()
                            .map(|r| r.assignments[m].clone())
                    })
                    .unwrap_or_default();
                let op = n
                    .refinement
                    .as_ref()
                    .map(|r| format!(" -> {r}", r = r.operator))
                    .unwrap_or_default();
                println!(
                    "{}#{ix} {} {}N {}E {assignment}{op}",
                    "  ".repeat(n.depth),
                    query_digest(&n.query),
                    n.query.node_count(),
                    n.query.edge_count()
                );
            }
        }
    }
}

fn check_tree(tree: &RefinementTree, g: &GeneralizedGraph, cfg: &CliConfig) -> Result<bool> {
    let mut ok = true;
    for (ix, n) in tree.nodes.iter().enumerate() {
        if let Some(set) = &n.refinement {
            let report = verify_refinement_set(set, g, cfg.match_config(), cfg.max_nodes)?;
            eprintln!("#{ix} {}: {report}", set.operator);
            ok &= report.passed();
        }
    }
    Ok(ok)
}
