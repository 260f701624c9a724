use std::collections::VecDeque;

use super::{TreeDecomposition, Violation};
use crate::error::{Error, Result};
use crate::game::{AshgInstance, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted bag contents.
    pub bag: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// A rooted nice tree decomposition. Nodes are stored children-first, so
/// iterating ids in ascending order is a valid bottom-up schedule and the
/// root (empty bag) is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_bag_size(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0)
    }

    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    /// Parent of every node; the root maps to `None`.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                parent[c] = Some(id);
            }
        }
        parent
    }

    /// The vertex set `B↓`: everything in the bag of `id` or below it.
    pub fn subtree_vertices(&self, id: usize) -> Vec<Vertex> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            out.extend_from_slice(&self.nodes[x].bag);
            stack.extend_from_slice(&self.nodes[x].children);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks the node-type rules and, viewed as an ordinary decomposition,
    /// the three axioms against `instance`.
    pub fn validate(&self, instance: &AshgInstance) -> Vec<Violation> {
        if let Err(e) = self.check_structure() {
            return vec![Violation::InvalidNiceNode(e)];
        }
        self.to_tree_decomposition().validate(instance)
    }

    fn check_structure(&self) -> std::result::Result<(), String> {
        if self.nodes.is_empty() {
            return Err("no nodes".into());
        }
        let root = self.root();
        if !self.nodes[root].bag.is_empty() {
            return Err("root bag is not empty".into());
        }
        let mut parent_count = vec![0usize; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                if c >= id {
                    return Err(format!("node {id} has child {c} that is not stored before it"));
                }
                parent_count[c] += 1;
            }
            let child_bag = |i: usize| &self.nodes[node.children[i]].bag;
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NiceKind::Introduce(v) => {
                    node.children.len() == 1 && {
                        let mut expect = child_bag(0).clone();
                        !expect.contains(&v) && {
                            expect.push(v);
                            expect.sort_unstable();
                            expect == node.bag
                        }
                    }
                }
                NiceKind::Forget(v) => {
                    node.children.len() == 1 && {
                        let mut expect = node.bag.clone();
                        !expect.contains(&v) && {
                            expect.push(v);
                            expect.sort_unstable();
                            &expect == child_bag(0)
                        }
                    }
                }
                NiceKind::Join => node.children.len() == 2 && child_bag(0) == &node.bag && child_bag(1) == &node.bag,
            };
            if !ok {
                return Err(format!("node {id} violates the {:?} rule", node.kind));
            }
        }
        if parent_count[..root].iter().any(|&c| c != 1) || parent_count[root] != 0 {
            return Err("nodes do not form a single rooted tree".into());
        }
        Ok(())
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges =
            self.nodes.iter().enumerate().flat_map(|(id, n)| n.children.iter().map(move |&c| (c, id))).collect();
        TreeDecomposition::new(bags, edges)
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NiceKind, bag: Vec<Vertex>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Forgets `bag \ target` then introduces `target \ bag`, each in
    /// ascending vertex order. Returns the new top node.
    fn morph(&mut self, mut top: usize, target: &[Vertex]) -> usize {
        let mut bag = self.nodes[top].bag.clone();
        let leaving: Vec<Vertex> = bag.iter().copied().filter(|v| target.binary_search(v).is_err()).collect();
        for v in leaving {
            bag.retain(|&x| x != v);
            top = self.push(NiceKind::Forget(v), bag.clone(), vec![top]);
        }
        let entering: Vec<Vertex> = target.iter().copied().filter(|v| bag.binary_search(v).is_err()).collect();
        for v in entering {
            let pos = bag.binary_search(&v).unwrap_err();
            bag.insert(pos, v);
            top = self.push(NiceKind::Introduce(v), bag.clone(), vec![top]);
        }
        top
    }
}

/// Converts a decomposition into nice form rooted at bag 0. The width is
/// unchanged; joins are binary and left-deep in child order.
pub fn make_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    let adj = td.tree_adjacency().ok_or_else(|| Error::InvalidDecomposition("bag graph is not a tree".into()))?;
    let k = td.len();

    let mut order = Vec::with_capacity(k);
    let mut parent = vec![usize::MAX; k];
    let mut queue = VecDeque::from([0]);
    parent[0] = 0;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut children = vec![Vec::new(); k];
    for &x in &order[1..] {
        children[parent[x]].push(x);
    }

    let mut b = Builder { nodes: Vec::new() };
    let mut top = vec![usize::MAX; k];
    for &x in order.iter().rev() {
        let bag = td.bag(x);
        let tops: Vec<usize> = children[x].iter().map(|&c| b.morph(top[c], bag)).collect();
        let mut acc = match tops.first() {
            Some(&t) => t,
            None => {
                let leaf = b.push(NiceKind::Leaf, Vec::new(), Vec::new());
                b.morph(leaf, bag)
            }
        };
        for &t in tops.iter().skip(1) {
            acc = b.push(NiceKind::Join, bag.to_vec(), vec![acc, t]);
        }
        top[x] = acc;
    }
    let root = b.morph(top[0], &[]);
    debug_assert_eq!(root, b.nodes.len() - 1);
    Ok(NiceTreeDecomposition { nodes: b.nodes })
}
