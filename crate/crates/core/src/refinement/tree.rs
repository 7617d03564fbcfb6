use std::collections::VecDeque;

use crate::ids::numbered_id;
use crate::predicate::{parse_node_predicate, parse_path_predicate, NodePredicate, PathPredicate};
use crate::query::{Query, Sign};

use super::operators::{
    refine_add_edge, refine_add_edge_predicate, refine_add_node, refine_add_node_predicate,
};
use super::{RefinementError, RefinementSet};

/// A refinement set chosen for a tree node, plus the member indices to
/// expand further. Members not listed become leaves.
#[derive(Debug, Clone)]
pub struct PolicyChoice {
    pub set: RefinementSet,
    pub expand: Vec<usize>,
}

/// Picks the refinement set to apply at a tree node. `Ok(None)` leaves the
/// node as a leaf.
pub trait RefinementPolicy {
    fn choose(&mut self, q: &Query, depth: usize) -> Result<Option<PolicyChoice>, RefinementError>;
}

impl<F> RefinementPolicy for F
where
    F: FnMut(&Query, usize) -> Result<Option<PolicyChoice>, RefinementError>,
{
    fn choose(&mut self, q: &Query, depth: usize) -> Result<Option<PolicyChoice>, RefinementError> {
        self(q, depth)
    }
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub query: Query,
    pub parent: Option<usize>,
    pub depth: usize,
    /// Position of this query among its parent's refinement set.
    pub member: Option<usize>,
    /// The refinement set whose members are the children.
    pub refinement: Option<RefinementSet>,
    pub children: Vec<usize>,
}

/// Nodes in breadth-first order; index 0 is the root.
#[derive(Debug, Clone)]
pub struct RefinementTree {
    pub nodes: Vec<TreeNode>,
}

impl RefinementTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, &TreeNode)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.children.is_empty())
    }

    /// The deepest leaf, ties broken by the smallest index.
    pub fn deepest_leaf(&self) -> &TreeNode {
        let depth = self.height();
        self.nodes
            .iter()
            .find(|n| n.depth == depth)
            .expect("root exists")
    }
}

/// Expands `q0` breadth-first, asking `policy` for a refinement set at every
/// node shallower than `depth`.
pub fn build_refinement_tree(
    q0: &Query,
    policy: &mut dyn RefinementPolicy,
    depth: usize,
) -> Result<RefinementTree, RefinementError> {
    let mut nodes = vec![TreeNode {
        query: q0.clone(),
        parent: None,
        depth: 0,
        member: None,
        refinement: None,
        children: Vec::new(),
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(ix) = queue.pop_front() {
        let level = nodes[ix].depth;
        if level >= depth {
            continue;
        }
        let Some(choice) = policy.choose(&nodes[ix].query, level)? else {
            continue;
        };
        for &i in &choice.expand {
            if i >= choice.set.len() {
                return Err(RefinementError::Policy(format!(
                    "member {i} requested but the set has {}",
                    choice.set.len()
                )));
            }
        }
        for (i, member) in choice.set.members.iter().enumerate() {
            let child = nodes.len();
            nodes.push(TreeNode {
                query: member.clone(),
                parent: Some(ix),
                depth: level + 1,
                member: Some(i),
                refinement: None,
                children: Vec::new(),
            });
            nodes[ix].children.push(child);
            if choice.expand.contains(&i) {
                queue.push_back(child);
            }
        }
        nodes[ix].refinement = Some(choice.set);
    }
    Ok(RefinementTree { nodes })
}

/// Replays the five refinements that build the "sides" pattern from the
/// empty query, always keeping the all-positive member:
///
/// 1. add node `n1`;
/// 2. restrict `n1` to sides inside `S`;
/// 3. add node `n2`;
/// 4. add a positive edge from `n2` to the restricted copy of `n1`;
/// 5. require that edge to be a `DEVOTED_TO` step.
#[derive(Debug, Clone, Default)]
pub struct P5Policy {
    restricted: Option<String>,
    edge: Option<String>,
}

pub const P5_SIDE_PREDICATE: &str = r#"v in S and type(v) != "institution" and type(v) != "clan""#;
pub const P5_EDGE_PREDICATE: &str = "types =~ /DEVOTED_TO/";

impl P5Policy {
    pub fn new() -> Self {
        Self::default()
    }

    fn expect(field: &Option<String>, what: &str) -> Result<String, RefinementError> {
        field
            .clone()
            .ok_or_else(|| RefinementError::Policy(format!("{what} is not known yet")))
    }
}

impl RefinementPolicy for P5Policy {
    fn choose(&mut self, q: &Query, depth: usize) -> Result<Option<PolicyChoice>, RefinementError> {
        let set = match depth {
            0 => refine_add_node(q, "n1")?,
            1 => {
                let phi = parse_node_predicate(P5_SIDE_PREDICATE)
                    .map_err(|e| RefinementError::Policy(e.to_string()))?;
                let set = refine_add_node_predicate(q, "n1", &phi)?;
                self.restricted = Some(set.clone_map["n1"].clone());
                set
            }
            2 => refine_add_node(q, "n2")?,
            3 => {
                let target = Self::expect(&self.restricted, "the restricted copy of n1")?;
                let set = refine_add_edge(q, "n2", &target, Sign::Pos)?;
                self.edge = set.new_edge.clone();
                set
            }
            4 => {
                let edge = Self::expect(&self.edge, "the new edge")?;
                let phi = parse_path_predicate(P5_EDGE_PREDICATE)
                    .map_err(|e| RefinementError::Policy(e.to_string()))?;
                refine_add_edge_predicate(q, &edge, &phi)?
            }
            _ => return Ok(None),
        };
        Ok(Some(PolicyChoice {
            set,
            expand: vec![0],
        }))
    }
}

/// Cycles through the four operators by depth and expands every member.
/// When the operator of the current level has no valid anchor, a fresh node
/// is added instead.
#[derive(Debug, Clone)]
pub struct BfsPolicy {
    pub node_phi: NodePredicate,
    pub path_phi: PathPredicate,
}

impl Default for BfsPolicy {
    fn default() -> Self {
        BfsPolicy {
            node_phi: parse_node_predicate("v in S").expect("valid"),
            path_phi: parse_path_predicate("src in S").expect("valid"),
        }
    }
}

impl BfsPolicy {
    fn positive_nodes(q: &Query) -> Vec<String> {
        q.nodes()
            .filter(|n| n.sign.is_pos())
            .map(|n| n.id.clone())
            .collect()
    }

    fn try_operator(&self, q: &Query, op: usize) -> Result<Option<RefinementSet>, RefinementError> {
        let positive = Self::positive_nodes(q);
        let is_pos = |id: &str| q.node(id).is_some_and(|n| n.sign.is_pos());
        match op {
            1 => match positive.as_slice() {
                [] => Ok(None),
                [n] => refine_add_edge(q, n, n, Sign::Pos).map(Some),
                [n, m, ..] => refine_add_edge(q, n, m, Sign::Pos).map(Some),
            },
            2 => {
                let edge = q
                    .edges()
                    .find(|e| e.sign.is_pos() && is_pos(&e.from) && is_pos(&e.to));
                match edge {
                    Some(e) => refine_add_edge_predicate(q, &e.id, &self.path_phi).map(Some),
                    None => Ok(None),
                }
            }
            3 => {
                let anchor = positive
                    .iter()
                    .find(|n| q.neighbors(n).iter().all(|u| is_pos(u)));
                match anchor {
                    Some(n) => refine_add_node_predicate(q, n, &self.node_phi).map(Some),
                    None => Ok(None),
                }
            }
            _ => Ok(None),
        }
    }
}

impl RefinementPolicy for BfsPolicy {
    fn choose(&mut self, q: &Query, depth: usize) -> Result<Option<PolicyChoice>, RefinementError> {
        let set = match self.try_operator(q, depth % 4)? {
            Some(set) => set,
            None => refine_add_node(q, &numbered_id("n", |c| q.has_node(c)))?,
        };
        let expand = (0..set.len()).collect();
        Ok(Some(PolicyChoice { set, expand }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_is_root_only() {
        let t = build_refinement_tree(&Query::new(), &mut P5Policy::new(), 0).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.root().refinement.is_none());
    }

    #[test]
    fn p5_replay_is_a_chain() {
        let t = build_refinement_tree(&Query::new(), &mut P5Policy::new(), 10).unwrap();
        assert_eq!(t.height(), 5);
        // Sizes 2, 2, 2, 4, 4 with one member expanded per level.
        assert_eq!(t.len(), 1 + 2 + 2 + 2 + 4 + 4);
        let expanded = t.nodes.iter().filter(|n| !n.children.is_empty()).count();
        assert_eq!(expanded, 5);
        let leaf = t.deepest_leaf();
        assert!(leaf.query.nodes().all(|n| n.sign == Sign::Pos));
    }

    #[test]
    fn closure_policies_are_accepted() {
        let mut never = |_: &Query, _: usize| Ok(None);
        let t = build_refinement_tree(&Query::new(), &mut never, 3).unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn bfs_expands_everything() {
        let t = build_refinement_tree(&Query::new(), &mut BfsPolicy::default(), 2).unwrap();
        // add_node gives 2; then add_edge: loop on the positive member (2),
        // fallback add_node on the negative member (2).
        assert_eq!(t.len(), 1 + 2 + 4);
    }
}
