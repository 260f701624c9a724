use std::collections::BTreeSet;

use super::TreeDecomposition;
use crate::game::{AshgInstance, Vertex};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Heuristic {
    #[default]
    MinDegree,
    MinFill,
}

fn fill_in(adj: &[BTreeSet<Vertex>], v: Vertex) -> usize {
    let nbrs: Vec<Vertex> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Builds a decomposition from a greedy elimination ordering. Ties go to the
/// lowest vertex id, so the output is a deterministic function of the
/// instance and the strategy.
pub fn heuristic_decompose(instance: &AshgInstance, strategy: Heuristic) -> TreeDecomposition {
    let n = instance.n();
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], Vec::new());
    }
    let mut adj: Vec<BTreeSet<Vertex>> = (0..n).map(|v| instance.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut position = vec![0usize; n];
    let mut bags: Vec<Vec<Vertex>> = Vec::with_capacity(n);

    for step in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| match strategy {
                Heuristic::MinDegree => (adj[v].len(), v),
                Heuristic::MinFill => (fill_in(&adj, v), v),
            })
            .expect("a vertex remains while step < n");
        let nbrs: Vec<Vertex> = adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj[v].clear();
        alive[v] = false;
        position[v] = step;
        let mut bag = nbrs;
        bag.push(v);
        bags.push(bag);
    }

    // The bag of v hangs below the bag of its earliest-eliminated later
    // neighbour; isolated pieces hang below the next bag to keep one tree.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for (step, bag) in bags.iter().enumerate() {
        let own = bag[bag.len() - 1];
        let next = bag.iter().filter(|&&u| u != own).map(|&u| position[u]).min();
        parent[step] = match next {
            Some(p) => Some(p),
            None if step + 1 < n => Some(step + 1),
            None => None,
        };
    }

    contract_subset_bags(bags, parent)
}

/// Repeatedly merges a bag into a tree neighbour that contains it.
fn contract_subset_bags(bags: Vec<Vec<Vertex>>, parent: Vec<Option<usize>>) -> TreeDecomposition {
    let k = bags.len();
    let bags: Vec<Vec<Vertex>> = bags
        .into_iter()
        .map(|mut b| {
            b.sort_unstable();
            b
        })
        .collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            adj[i].insert(p);
            adj[p].insert(i);
        }
    }
    let mut alive = vec![true; k];
    let mut changed = true;
    while changed {
        changed = false;
        for a in 0..k {
            if !alive[a] {
                continue;
            }
            let Some(b) = adj[a].iter().copied().find(|&b| is_subset(&bags[a], &bags[b])) else { continue };
            let others: Vec<usize> = adj[a].iter().copied().filter(|&x| x != b).collect();
            for x in others {
                adj[x].remove(&a);
                adj[x].insert(b);
                adj[b].insert(x);
            }
            adj[b].remove(&a);
            adj[a].clear();
            alive[a] = false;
            changed = true;
        }
    }
    let mut new_id = vec![usize::MAX; k];
    let mut out_bags = Vec::new();
    for i in (0..k).filter(|&i| alive[i]) {
        new_id[i] = out_bags.len();
        out_bags.push(bags[i].clone());
    }
    let mut edges = Vec::new();
    for i in (0..k).filter(|&i| alive[i]) {
        for &j in adj[i].iter().filter(|&&j| j > i) {
            edges.push((new_id[i], new_id[j]));
        }
    }
    TreeDecomposition::new(out_bags, edges)
}

fn is_subset(a: &[Vertex], b: &[Vertex]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}
