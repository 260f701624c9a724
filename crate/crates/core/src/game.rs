//! Additively separable hedonic games: the instance model, coalition
//! partitions, utilities and ground-truth stability checks.
//!
//! Vertices are dense `0..n` indices. File formats and the CLI present them
//! 1-based; everything inside the library is 0-based.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type Weight = i64;

/// All DP utilities live in `[-nW, nW]`; keeping `nW` four times below the
/// integer range means sums of a few such values never overflow.
const WEIGHT_GUARD: i64 = i64::MAX / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub from: Vertex,
    pub to: Vertex,
    pub weight: Weight,
}

/// A weighted digraph whose arcs encode additive preferences.
///
/// Zero-weight arcs are kept: they contribute nothing to any utility but are
/// edges of the underlying graph, so they matter for connectivity and for
/// tree decompositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AshgInstance {
    n: usize,
    arcs: Vec<Arc>,
    out: Vec<Vec<(Vertex, Weight)>>,
    adj: Vec<Vec<Vertex>>,
    max_degree: usize,
    max_abs_weight: Weight,
}

impl AshgInstance {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (Vertex, Vertex, Weight)>) -> Result<Self> {
        let mut list: Vec<Arc> = Vec::new();
        for (from, to, weight) in arcs {
            for v in [from, to] {
                if v >= n {
                    return Err(Error::UnknownVertex { vertex: v, n });
                }
            }
            if from == to {
                return Err(Error::SelfArc(from));
            }
            list.push(Arc { from, to, weight });
        }
        list.sort_unstable();
        for pair in list.windows(2) {
            if pair[0].from == pair[1].from && pair[0].to == pair[1].to {
                return Err(Error::DuplicateArc(pair[0].from, pair[0].to));
            }
        }

        let max_abs_weight = list.iter().map(|a| a.weight.saturating_abs()).max().unwrap_or(0);
        let guard_ok = (n as i64).checked_mul(max_abs_weight).is_some_and(|nw| nw <= WEIGHT_GUARD);
        if !guard_ok {
            return Err(Error::WeightOverflow { n, max_abs_weight });
        }

        let mut out = vec![Vec::new(); n];
        let mut adj = vec![Vec::new(); n];
        for a in &list {
            out[a.from].push((a.to, a.weight));
            adj[a.from].push(a.to);
            adj[a.to].push(a.from);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);

        Ok(AshgInstance { n, arcs: list, out, adj, max_degree, max_abs_weight })
    }

    pub fn empty(n: usize) -> Self {
        AshgInstance::new(n, []).expect("an arc-free instance is always valid")
    }

    /// A new instance with `extra` arcs added; Δ and W are recomputed.
    pub fn with_added_arcs(&self, extra: impl IntoIterator<Item = (Vertex, Vertex, Weight)>) -> Result<Self> {
        let arcs = self.arcs.iter().map(|a| (a.from, a.to, a.weight)).chain(extra);
        AshgInstance::new(self.n, arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Arcs sorted by `(from, to)`.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Out-arcs of `v` as `(target, weight)`, sorted by target.
    pub fn out_arcs(&self, v: Vertex) -> &[(Vertex, Weight)] {
        &self.out[v]
    }

    /// Neighbours of `v` in the underlying undirected graph.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        self.out[u].binary_search_by_key(&v, |&(t, _)| t).is_ok()
    }

    /// `w(u, v)`, zero when there is no arc.
    pub fn weight(&self, u: Vertex, v: Vertex) -> Weight {
        match self.out[u].binary_search_by_key(&v, |&(t, _)| t) {
            Ok(i) => self.out[u][i].1,
            Err(_) => 0,
        }
    }

    /// Maximum degree Δ of the underlying graph.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Largest absolute arc weight W.
    pub fn max_abs_weight(&self) -> Weight {
        self.max_abs_weight
    }

    /// Number of underlying undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::UnknownVertex { vertex: v, n: self.n })
        }
    }
}

/// An assignment of every vertex to exactly one coalition.
///
/// Class ids are dense and numbered in order of first appearance, so two
/// partitions are equal iff they group the vertices identically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    class_of: Vec<usize>,
    num_classes: usize,
}

impl Partition {
    /// Builds a partition from arbitrary per-vertex labels; vertices with equal
    /// labels share a coalition.
    pub fn from_labels<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Self {
        let mut ids = rustc_hash::FxHashMap::default();
        let class_of = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(*l).or_insert(next)
            })
            .collect();
        Partition { class_of, num_classes: ids.len() }
    }

    /// Builds a partition of `0..n` from explicit coalitions. Every vertex must
    /// appear exactly once; empty coalitions are dropped.
    pub fn from_coalitions(n: usize, coalitions: &[Vec<Vertex>]) -> Result<Self> {
        let mut label = vec![usize::MAX; n];
        for (c, members) in coalitions.iter().enumerate() {
            for &v in members {
                if v >= n {
                    return Err(Error::UnknownVertex { vertex: v, n });
                }
                if label[v] != usize::MAX {
                    return Err(Error::DuplicateMember(v));
                }
                label[v] = c;
            }
        }
        if let Some(v) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::MissingMember(v));
        }
        Ok(Partition::from_labels(&label))
    }

    pub fn singletons(n: usize) -> Self {
        Partition { class_of: (0..n).collect(), num_classes: n }
    }

    pub fn grand(n: usize) -> Self {
        Partition { class_of: vec![0; n], num_classes: usize::from(n > 0) }
    }

    /// Number of vertices covered.
    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn class_of(&self, v: Vertex) -> usize {
        self.class_of[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.class_of
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn coalitions(&self) -> Vec<Vec<Vertex>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (v, &c) in self.class_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn members(&self, class: usize) -> Vec<Vertex> {
        (0..self.len()).filter(|&v| self.class_of[v] == class).collect()
    }

    pub fn same_coalition(&self, u: Vertex, v: Vertex) -> bool {
        self.class_of[u] == self.class_of[v]
    }

    fn check_covers(&self, instance: &AshgInstance) -> Result<()> {
        if self.len() == instance.n() {
            Ok(())
        } else {
            Err(Error::PartitionSize { expected: instance.n(), got: self.len() })
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.coalitions().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (j, v) in c.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", v + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeviationTarget {
    /// An existing class (coalition id, or color for colorings).
    Class(usize),
    Singleton,
}

/// A machine-checkable certificate that a vertex wants to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeviationWitness {
    pub vertex: Vertex,
    pub current_utility: Weight,
    pub target: DeviationTarget,
    pub target_utility: Weight,
}

impl fmt::Display for DeviationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.target {
            DeviationTarget::Class(c) => write!(
                f,
                "vertex {} gains by joining coalition {} ({} -> {})",
                self.vertex + 1,
                c + 1,
                self.current_utility,
                self.target_utility
            ),
            DeviationTarget::Singleton => {
                write!(f, "vertex {} gains by leaving for a singleton ({} -> 0)", self.vertex + 1, self.current_utility)
            }
        }
    }
}

/// `p_v(S)` where `S` is `v`'s own coalition.
pub fn utility(instance: &AshgInstance, partition: &Partition, v: Vertex) -> Result<Weight> {
    instance.check_vertex(v)?;
    partition.check_covers(instance)?;
    let own = partition.class_of(v);
    Ok(instance.out_arcs(v).iter().filter(|&&(u, _)| partition.class_of(u) == own).map(|&(_, w)| w).sum())
}

/// `Σ_{u ∈ coalition \ {v}} w(v, u)`; duplicates in `coalition` count once.
pub fn utility_toward(instance: &AshgInstance, v: Vertex, coalition: &[Vertex]) -> Result<Weight> {
    instance.check_vertex(v)?;
    let mut members = coalition.to_vec();
    for &u in &members {
        instance.check_vertex(u)?;
    }
    members.sort_unstable();
    members.dedup();
    Ok(instance.out_arcs(v).iter().filter(|(u, _)| members.binary_search(u).is_ok()).map(|&(_, w)| w).sum())
}

/// Payoffs of `v` toward every class that holds one of its out-neighbours,
/// as `(class, payoff)` sorted by class.
pub(crate) fn class_payoffs(instance: &AshgInstance, labels: &[usize], v: Vertex) -> Vec<(usize, Weight)> {
    let mut sums: Vec<(usize, Weight)> = Vec::with_capacity(instance.out_arcs(v).len());
    for &(u, w) in instance.out_arcs(v) {
        let c = labels[u];
        match sums.iter_mut().find(|(cc, _)| *cc == c) {
            Some(entry) => entry.1 += w,
            None => sums.push((c, w)),
        }
    }
    sums.sort_unstable_by_key(|&(c, _)| c);
    sums
}

/// The best strictly improving move for `v` under `labels`, if any.
/// Candidates are other classes in ascending id, then a fresh singleton;
/// the first candidate with maximum payoff wins.
pub(crate) fn best_response(instance: &AshgInstance, labels: &[usize], v: Vertex) -> Option<DeviationWitness> {
    let own_class = labels[v];
    let payoffs = class_payoffs(instance, labels, v);
    let own = payoffs.iter().find(|(c, _)| *c == own_class).map_or(0, |&(_, w)| w);
    let mut best: Option<(DeviationTarget, Weight)> = None;
    let candidates = payoffs
        .iter()
        .filter(|(c, _)| *c != own_class)
        .map(|&(c, w)| (DeviationTarget::Class(c), w))
        .chain(std::iter::once((DeviationTarget::Singleton, 0)));
    for (target, payoff) in candidates {
        if payoff > own && best.is_none_or(|(_, b)| payoff > b) {
            best = Some((target, payoff));
        }
    }
    best.map(|(target, target_utility)| DeviationWitness { vertex: v, current_utility: own, target, target_utility })
}

/// The first-in-order strictly improving move for `v`.
pub(crate) fn first_response(instance: &AshgInstance, labels: &[usize], v: Vertex) -> Option<DeviationWitness> {
    let own_class = labels[v];
    let payoffs = class_payoffs(instance, labels, v);
    let own = payoffs.iter().find(|(c, _)| *c == own_class).map_or(0, |&(_, w)| w);
    payoffs
        .iter()
        .filter(|(c, _)| *c != own_class)
        .map(|&(c, w)| (DeviationTarget::Class(c), w))
        .chain(std::iter::once((DeviationTarget::Singleton, 0)))
        .find(|&(_, payoff)| payoff > own)
        .map(|(target, target_utility)| DeviationWitness { vertex: v, current_utility: own, target, target_utility })
}

/// Raw-label stability check used by the oracles; labels need not be dense.
pub(crate) fn first_deviation_labels(instance: &AshgInstance, labels: &[usize]) -> Option<DeviationWitness> {
    (0..instance.n()).find_map(|v| best_response(instance, labels, v))
}

/// Returns the lowest-numbered vertex that can strictly improve, together
/// with its best move, or `None` when the partition is Nash stable.
pub fn nash_deviation(instance: &AshgInstance, partition: &Partition) -> Result<Option<DeviationWitness>> {
    partition.check_covers(instance)?;
    Ok(first_deviation_labels(instance, partition.labels()))
}

pub fn is_nash_stable(instance: &AshgInstance, partition: &Partition) -> Result<bool> {
    Ok(nash_deviation(instance, partition)?.is_none())
}

/// The first coalition (by id) that is disconnected in the underlying graph.
pub fn disconnected_coalition(instance: &AshgInstance, partition: &Partition) -> Result<Option<Vec<Vertex>>> {
    partition.check_covers(instance)?;
    Ok(first_disconnected_labels(instance, partition.labels(), partition.num_classes()))
}

pub fn is_connected_partition(instance: &AshgInstance, partition: &Partition) -> Result<bool> {
    Ok(disconnected_coalition(instance, partition)?.is_none())
}

pub(crate) fn first_disconnected_labels(
    instance: &AshgInstance,
    labels: &[usize],
    classes: usize,
) -> Option<Vec<Vertex>> {
    let n = instance.n();
    let mut seen = vec![false; n];
    let mut class_seen = vec![false; classes];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let c = labels[start];
        if class_seen[c] {
            // a second component of an already visited class
            return Some((0..n).filter(|&v| labels[v] == c).collect());
        }
        class_seen[c] = true;
        seen[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &x in instance.neighbors(u) {
                if !seen[x] && labels[x] == c {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
    }
    None
}

/// Splits every coalition into the groups that are linked by underlying-graph
/// distance at most two. Nash stability is preserved: a coalition part at
/// distance three or more from the rest shares no out-neighbour relation with
/// it, so no payoff changes and no new option appears.
pub fn split_far_components(instance: &AshgInstance, partition: &Partition) -> Result<Partition> {
    partition.check_covers(instance)?;
    let n = instance.n();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let c = partition.class_of(start);
        label[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &x in instance.neighbors(u) {
                let second = std::iter::once(x).chain(instance.neighbors(x).iter().copied());
                for y in second {
                    if label[y] == usize::MAX && partition.class_of(y) == c {
                        label[y] = next;
                        queue.push_back(y);
                    }
                }
            }
        }
        next += 1;
    }
    Ok(Partition::from_labels(&label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(wuv: Weight, wvu: Weight) -> AshgInstance {
        AshgInstance::new(2, [(0, 1, wuv), (1, 0, wvu)]).unwrap()
    }

    #[test]
    fn rejects_malformed_arcs() {
        assert_eq!(AshgInstance::new(2, [(0, 0, 1)]), Err(Error::SelfArc(0)));
        assert_eq!(AshgInstance::new(2, [(0, 1, 1), (0, 1, 2)]), Err(Error::DuplicateArc(0, 1)));
        assert!(matches!(AshgInstance::new(2, [(0, 2, 1)]), Err(Error::UnknownVertex { vertex: 2, .. })));
        assert!(matches!(AshgInstance::new(8, [(0, 1, i64::MAX / 8)]), Err(Error::WeightOverflow { .. })));
    }

    #[test]
    fn derived_quantities() {
        let g = AshgInstance::new(4, [(0, 1, 3), (1, 0, -5), (0, 2, 0), (3, 0, 1)]).unwrap();
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.max_abs_weight(), 5);
        assert_eq!(g.edge_count(), 3);
        assert!(g.adjacent(2, 0));
        assert_eq!(g.weight(0, 2), 0);
        assert_eq!(g.weight(2, 0), 0);
        let h = g.with_added_arcs([(2, 3, -9)]).unwrap();
        assert_eq!(h.max_abs_weight(), 9);
    }

    #[test]
    fn utility_examples() {
        let single = AshgInstance::empty(1);
        assert_eq!(utility(&single, &Partition::grand(1), 0).unwrap(), 0);

        let g = AshgInstance::new(2, [(0, 1, 3)]).unwrap();
        assert_eq!(utility(&g, &Partition::grand(2), 0).unwrap(), 3);

        let g = AshgInstance::new(3, [(0, 1, 3), (0, 2, -2)]).unwrap();
        let p = Partition::from_coalitions(3, &[vec![0, 1], vec![2]]).unwrap();
        assert_eq!(utility(&g, &p, 0).unwrap(), 3);
        assert!(utility(&g, &p, 3).is_err());
        assert!(utility(&g, &Partition::grand(2), 0).is_err());
    }

    #[test]
    fn utility_toward_examples() {
        let g = AshgInstance::new(3, [(0, 1, 1), (0, 2, -4)]).unwrap();
        assert_eq!(utility_toward(&g, 0, &[]).unwrap(), 0);
        assert_eq!(utility_toward(&g, 0, &[1]).unwrap(), 1);
        assert_eq!(utility_toward(&g, 0, &[1, 2]).unwrap(), -3);
        assert_eq!(utility_toward(&g, 0, &[0, 1]).unwrap(), 1);
        assert!(utility_toward(&g, 0, &[7]).is_err());
    }

    #[test]
    fn stability_examples() {
        let friends = pair(1, 1);
        assert!(is_nash_stable(&friends, &Partition::grand(2)).unwrap());

        let stalker = pair(1, -1);
        let w = nash_deviation(&stalker, &Partition::grand(2)).unwrap().unwrap();
        assert_eq!(w.vertex, 1);
        assert_eq!(w.target, DeviationTarget::Singleton);
        assert_eq!(w.current_utility, -1);

        let w = nash_deviation(&stalker, &Partition::singletons(2)).unwrap().unwrap();
        assert_eq!(w.vertex, 0);
        assert_eq!(w.target, DeviationTarget::Class(1));
        assert_eq!(w.target_utility, 1);

        assert!(is_nash_stable(&stalker, &Partition::singletons(3)).is_err());
    }

    #[test]
    fn connectivity_examples() {
        let path = AshgInstance::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        assert!(is_connected_partition(&path, &Partition::grand(3)).unwrap());
        let p = Partition::from_coalitions(3, &[vec![0, 2], vec![1]]).unwrap();
        assert_eq!(disconnected_coalition(&path, &p).unwrap(), Some(vec![0, 2]));
        assert!(is_connected_partition(&path, &Partition::singletons(3)).unwrap());
    }

    #[test]
    fn zero_weight_arcs_connect() {
        let g = AshgInstance::new(2, [(0, 1, 0)]).unwrap();
        assert!(is_connected_partition(&g, &Partition::grand(2)).unwrap());
        assert!(!is_connected_partition(&AshgInstance::empty(2), &Partition::grand(2)).unwrap());
    }

    #[test]
    fn partition_normalization() {
        let p = Partition::from_labels(&[7, 3, 7, 9]);
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(p.num_classes(), 3);
        assert_eq!(p.coalitions(), vec![vec![0, 2], vec![1], vec![3]]);
        assert_eq!(Partition::from_coalitions(2, &[vec![0]]), Err(Error::MissingMember(1)));
        assert_eq!(Partition::from_coalitions(2, &[vec![0, 1], vec![1]]), Err(Error::DuplicateMember(1)));
        assert_eq!(Partition::grand(0).num_classes(), 0);
        assert_eq!(format!("{}", p), "{{1,3}, {2}, {4}}");
    }

    #[test]
    fn split_far_components_separates_distant_parts() {
        // path 0-1-2-3-4: 0 and 4 are at distance 4, 0 and 2 at distance 2
        let path = AshgInstance::new(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
        let p = Partition::from_coalitions(5, &[vec![0, 4], vec![1, 3], vec![2]]).unwrap();
        let split = split_far_components(&path, &p).unwrap();
        assert_eq!(split.num_classes(), 4);
        assert!(split.same_coalition(1, 3));
        assert!(!split.same_coalition(0, 4));
    }
}
