//! Tree decompositions of the underlying graph: representation, validation,
//! elimination-order heuristics, nice form and the distance-2 augmentation.

mod heuristic;
mod nice;
mod square;

pub use heuristic::{heuristic_decompose, Heuristic};
pub use nice::{make_nice, NiceKind, NiceNode, NiceTreeDecomposition};
pub use square::{square_augment, square_graph};

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::game::{AshgInstance, Vertex};

/// Bags indexed by node id plus the tree edges between nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<Vertex>>,
    edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoBags,
    /// The node graph is not a tree (cycle, disconnected, or bad endpoint).
    NotATree,
    UnknownVertex(Vertex),
    VertexUncovered(Vertex),
    EdgeUncovered(Vertex, Vertex),
    /// The bags holding this vertex do not form a connected subtree.
    Disconnected(Vertex),
    /// A nice decomposition breaks a node-type rule.
    InvalidNiceNode(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoBags => write!(f, "decomposition has no bags"),
            Violation::NotATree => write!(f, "bag graph is not a tree"),
            Violation::UnknownVertex(v) => write!(f, "bag mentions unknown vertex {}", v + 1),
            Violation::VertexUncovered(v) => write!(f, "vertex {} is in no bag", v + 1),
            Violation::EdgeUncovered(u, v) => write!(f, "edge {}-{} is in no bag", u + 1, v + 1),
            Violation::Disconnected(v) => write!(f, "bags containing vertex {} are not connected", v + 1),
            Violation::InvalidNiceNode(msg) => write!(f, "nice decomposition: {msg}"),
        }
    }
}

impl TreeDecomposition {
    /// Bag contents are sorted and deduplicated; edges are stored as given.
    pub fn new(bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, edges }
    }

    pub fn bags(&self) -> &[Vec<Vertex>] {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> &[Vertex] {
        &self.bags[node]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Max bag size minus one; an all-empty decomposition reports 0.
    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    /// Adjacency lists of the node tree, or `None` if the edges do not form a
    /// tree on the nodes.
    pub(crate) fn tree_adjacency(&self) -> Option<Vec<Vec<usize>>> {
        let k = self.bags.len();
        if k == 0 || self.edges.len() != k - 1 {
            return None;
        }
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in &self.edges {
            if a >= k || b >= k || a == b {
                return None;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        (count == k).then_some(adj)
    }

    /// Checks the tree shape and the three decomposition axioms against the
    /// instance's underlying graph. An empty list means the decomposition is
    /// valid.
    pub fn validate(&self, instance: &AshgInstance) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.bags.is_empty() {
            out.push(Violation::NoBags);
            return out;
        }
        let Some(adj) = self.tree_adjacency() else {
            out.push(Violation::NotATree);
            return out;
        };
        let n = instance.n();
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (node, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    out.push(Violation::UnknownVertex(v));
                } else {
                    holders[v].push(node);
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (v, h) in holders.iter().enumerate() {
            if h.is_empty() {
                out.push(Violation::VertexUncovered(v));
            }
        }
        for (u, held) in holders.iter().enumerate() {
            for &v in instance.neighbors(u) {
                if u < v && !held.iter().any(|&b| self.bags[b].binary_search(&v).is_ok()) {
                    out.push(Violation::EdgeUncovered(u, v));
                }
            }
        }
        for (v, nodes) in holders.iter().enumerate() {
            if nodes.len() <= 1 {
                continue;
            }
            // BFS restricted to bags containing v
            let mut seen = vec![false; self.bags.len()];
            let mut queue = VecDeque::from([nodes[0]]);
            seen[nodes[0]] = true;
            let mut reached = 1;
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if !seen[y] && self.bags[y].binary_search(&v).is_ok() {
                        seen[y] = true;
                        reached += 1;
                        queue.push_back(y);
                    }
                }
            }
            if reached != nodes.len() {
                out.push(Violation::Disconnected(v));
            }
        }
        out
    }

    pub fn is_valid(&self, instance: &AshgInstance) -> bool {
        self.validate(instance).is_empty()
    }

    pub fn ensure_valid(&self, instance: &AshgInstance) -> Result<()> {
        match self.validate(instance).first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidDecomposition(v.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> AshgInstance {
        AshgInstance::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    #[test]
    fn valid_path_decomposition() {
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        assert!(td.is_valid(&path3()));
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn uncovered_edge_is_reported() {
        let g = path3().with_added_arcs([(0, 2, 1)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        assert_eq!(td.validate(&g), vec![Violation::EdgeUncovered(0, 2)]);
    }

    #[test]
    fn non_contiguous_bags_are_reported() {
        // 0's bags are nodes 0 and 2, separated by node 1
        let td = TreeDecomposition::new(vec![vec![0], vec![1, 2], vec![0, 2]], vec![(0, 1), (1, 2)]);
        let violations = td.validate(&path3());
        assert!(violations.contains(&Violation::Disconnected(0)));
        assert!(violations.contains(&Violation::EdgeUncovered(0, 1)));
    }

    #[test]
    fn shape_errors() {
        let g = path3();
        assert_eq!(TreeDecomposition::new(vec![], vec![]).validate(&g), vec![Violation::NoBags]);
        let cyc = TreeDecomposition::new(vec![vec![0, 1, 2]; 3], vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(cyc.validate(&g), vec![Violation::NotATree]);
        let forest = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![]);
        assert_eq!(forest.validate(&g), vec![Violation::NotATree]);
        let missing = TreeDecomposition::new(vec![vec![0, 1]], vec![]);
        assert!(missing.validate(&g).contains(&Violation::VertexUncovered(2)));
        let unknown = TreeDecomposition::new(vec![vec![0, 1, 2, 5]], vec![]);
        assert_eq!(unknown.validate(&g), vec![Violation::UnknownVertex(5)]);
    }

    #[test]
    fn empty_graph_single_empty_bag() {
        let td = TreeDecomposition::new(vec![vec![]], vec![]);
        assert!(td.is_valid(&AshgInstance::empty(0)));
        assert_eq!(td.width(), 0);
    }
}
