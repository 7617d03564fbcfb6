//! The bundled Star Wars graph and the six example queries over it.
//!
//! The graph holds the main characters, their home planets, the two clans,
//! the two sides of the Force and two institutions. Edges:
//!
//! * `FRIENDS` (undirected): the triangles Luke/R2D2/C3PO and
//!   Han/Leia/Chewbaka, joined by Luke–Leia.
//! * `TEACHES`: Yoda → Luke, and the lineage Yoda → Dooku → Qui Gong Jin →
//!   Obi Wan → Vader, plus Obi Wan → Luke.
//! * `FROM`: characters to planets (Luke and Vader share Tatooine, Leia is
//!   the only one from Alderaan).
//! * `DEVOTED_TO`: characters to clans, sides and one institution; no
//!   character is the target of a devotion, so among non-clan,
//!   non-institution nodes only the sides have devotees.
//! * `MEMBER_OF`: Luke and Leia to the Rebel Alliance, which gives Luke an
//!   out-degree of four.

use std::collections::BTreeMap;

use crate::graph::{GeneralizedGraph, SubgraphRef};
use crate::query::{load_query, Query};

pub const STARWARS_JSON: &str = include_str!("../fixtures/starwars.json");

/// Query documents `p1` to `p6`.
pub const QUERY_JSON: [(&str, &str); 6] = [
    ("p1", include_str!("../fixtures/p1.json")),
    ("p2", include_str!("../fixtures/p2.json")),
    ("p3", include_str!("../fixtures/p3.json")),
    ("p4", include_str!("../fixtures/p4.json")),
    ("p5", include_str!("../fixtures/p5.json")),
    ("p6", include_str!("../fixtures/p6.json")),
];

pub const S1_NODES: &[&str] = &["yoda", "luke_skywalker"];
pub const S2_NODES: &[&str] = &["darth_vader", "luke_skywalker", "tatooine"];
pub const LINEAGE_NODES: &[&str] = &[
    "yoda",
    "count_dooku",
    "qui_gong_jin",
    "obi_wan_kenobi",
    "darth_vader",
];

/// Named subgraphs of the fixture, each induced by its node ids.
pub const NAMED_SUBGRAPHS: [(&str, &[&str]); 3] = [
    ("S1", S1_NODES),
    ("S2", S2_NODES),
    ("lineage", LINEAGE_NODES),
];

pub struct Fixture {
    pub graph: GeneralizedGraph,
    pub queries: BTreeMap<String, Query>,
}

impl Fixture {
    pub fn query(&self, name: &str) -> &Query {
        &self.queries[name]
    }

    /// Yoda, Luke and the lesson between them.
    pub fn s1(&self) -> SubgraphRef {
        self.induced(S1_NODES)
    }

    /// Darth Vader, Luke and their home planet.
    pub fn s2(&self) -> SubgraphRef {
        self.induced(S2_NODES)
    }

    /// The teaching lineage from Yoda down to Darth Vader.
    pub fn lineage(&self) -> SubgraphRef {
        self.induced(LINEAGE_NODES)
    }

    pub fn induced(&self, ids: &[&str]) -> SubgraphRef {
        SubgraphRef::induced(&self.graph, ids.iter().copied()).expect("fixture node ids")
    }
}

pub fn load_fixture_starwars() -> Fixture {
    let graph = GeneralizedGraph::from_json(STARWARS_JSON).expect("bundled graph is valid");
    let queries = QUERY_JSON
        .iter()
        .map(|(name, text)| {
            (
                name.to_string(),
                load_query(text).expect("bundled query is valid"),
            )
        })
        .collect();
    Fixture { graph, queries }
}
