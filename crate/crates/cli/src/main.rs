//! `ggq`: match, enumerate and refine generalized graph queries.
//!
//! Exit status is 0 for success or a true verdict, 1 for a false verdict
//! or no match, and 2 for errors.

mod commands;
mod config;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::Overrides;

#[derive(Debug, Parser)]
#[command(name = "ggq", version, about = "Generalized graph queries")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    AddNode,
    AddEdge,
    AddEdgePred,
    AddNodePred,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Refines,
    Equiv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    P5,
    Bfs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a subgraph matches a query and explain why.
    Match {
        graph: String,
        query: String,
        /// `S1`, `S2`, `lineage`, `a,b` (induced) or `a,b|e1,e2`.
        #[arg(long)]
        subgraph: String,
    },
    /// List every matching subgraph up to the node bound.
    Enumerate { graph: String, query: String },
    /// Apply one refinement operator and write the members as files.
    Refine {
        query: String,
        #[arg(long, value_enum)]
        op: OperatorArg,
        /// add-node: ID; add-edge: FROM TO [+|-]; add-edge-pred: EDGE PHI;
        /// add-node-pred: NODE PHI.
        #[arg(long, num_args = 1..)]
        args: Vec<String>,
        /// Directory receiving `member-<i>.json`.
        #[arg(long)]
        out: PathBuf,
        /// Simplify every member before writing it.
        #[arg(long)]
        simplify: bool,
    },
    /// Remove redundant nodes and edges.
    Simplify { query: String },
    /// Check that the members partition the parent's matches.
    VerifySet {
        graph: String,
        parent: String,
        #[arg(required = true)]
        members: Vec<String>,
    },
    /// Brute-force refinement or equivalence check.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        graph: String,
        q1: String,
        q2: String,
    },
    /// Grow a refinement tree from a root query.
    Tree {
        graph: String,
        root: String,
        #[arg(long, value_enum, default_value = "p5")]
        policy: PolicyArg,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Also write the tree as Graphviz.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Verify the partition at every internal node against the graph.
        #[arg(long)]
        check: bool,
    },
    /// Render a data graph as Graphviz.
    Dot { graph: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.overrides) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
