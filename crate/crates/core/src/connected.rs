//! The pseudo-polynomial DP deciding connected Nash stability on graphs of
//! bounded treewidth.
//!
//! A signature at a bag `B` summarises a partial solution on `B↓`: the
//! coalition partition of `B` (pi1), which bag vertices are already linked
//! inside their coalition (pi2), every bag vertex's payoff toward each pi1
//! class, and its best payoff toward coalitions that are already complete.
//! A vertex's stability is decided once, when it is forgotten.

use rustc_hash::FxHashMap;

use crate::decomposition::{NiceKind, NiceTreeDecomposition};
use crate::dp::{canonicalize, reconstruct, run_bottom_up, stats_of, Back, SigTable, SolveStats, SolverConfig};
use crate::error::{Error, Result};
use crate::game::{first_deviation_labels, first_disconnected_labels, AshgInstance, Partition, Vertex, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConnectedSignature {
    /// Restricted-growth coalition labels of the bag positions.
    pi1: Vec<u8>,
    /// Restricted-growth labels of the linked groups; refines `pi1`.
    pi2: Vec<u8>,
    /// Row-major `bag × pi1-classes` payoffs counted over `B↓`.
    util: Vec<Weight>,
    /// Best payoff toward a completed coalition, floored at 0.
    best: Vec<Weight>,
}

impl ConnectedSignature {
    fn classes(&self) -> usize {
        self.pi1.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    pub fn bag_size(&self) -> usize {
        self.pi1.len()
    }

    pub fn pi1(&self) -> &[u8] {
        &self.pi1
    }

    pub fn pi2(&self) -> &[u8] {
        &self.pi2
    }

    /// Payoff of bag position `x` toward pi1 class `class`.
    pub fn toward_class(&self, x: usize, class: usize) -> Weight {
        self.util[x * self.classes() + class]
    }

    pub fn own_utility(&self, x: usize) -> Weight {
        self.toward_class(x, self.pi1[x] as usize)
    }

    /// Payoff of `x` if it joined `y`'s coalition; `None` when they already
    /// share one.
    pub fn cross_utility(&self, x: usize, y: usize) -> Option<Weight> {
        (self.pi1[x] != self.pi1[y]).then(|| self.toward_class(x, self.pi1[y] as usize))
    }

    pub fn best_complete(&self, x: usize) -> Weight {
        self.best[x]
    }

    /// Builds the canonical form from raw labels. `util` has `raw_classes`
    /// columns; columns of classes absent from `pi1` are dropped.
    fn finish(mut pi1: Vec<u8>, mut pi2: Vec<u8>, util: &[Weight], raw_classes: usize, best: Vec<Weight>) -> Self {
        let b = pi1.len();
        let mut map = vec![u8::MAX; raw_classes];
        let mut next = 0u8;
        for l in pi1.iter_mut() {
            let slot = &mut map[*l as usize];
            if *slot == u8::MAX {
                *slot = next;
                next += 1;
            }
            *l = *slot;
        }
        let m = next as usize;
        let mut out = vec![0; b * m];
        for x in 0..b {
            for (c, &mc) in map.iter().enumerate() {
                if mc != u8::MAX {
                    out[x * m + mc as usize] = util[x * raw_classes + c];
                }
            }
        }
        canonicalize(&mut pi2);
        ConnectedSignature { pi1, pi2, util: out, best }
    }
}

/// Bag-local arc data of one nice node.
struct Local {
    /// Row-major `w(bag[x], bag[y])`.
    w: Vec<Weight>,
    /// Row-major underlying adjacency.
    adj: Vec<bool>,
}

fn local_data(instance: &AshgInstance, ntd: &NiceTreeDecomposition) -> Vec<Local> {
    ntd.nodes()
        .iter()
        .map(|node| {
            let b = node.bag.len();
            let mut w = vec![0; b * b];
            let mut adj = vec![false; b * b];
            for (x, &u) in node.bag.iter().enumerate() {
                for (y, &v) in node.bag.iter().enumerate() {
                    if x != y {
                        w[x * b + y] = instance.weight(u, v);
                        adj[x * b + y] = instance.adjacent(u, v);
                    }
                }
            }
            Local { w, adj }
        })
        .collect()
}

fn introduce(sig: &ConnectedSignature, pos: usize, local: &Local, out: &mut Vec<ConnectedSignature>) {
    let m = sig.classes();
    let b = sig.pi1.len() + 1;
    let raw = m + 1;
    let fresh_group = sig.pi2.iter().map(|&g| g + 1).max().unwrap_or(0);
    for c in 0..=m {
        let mut pi1 = sig.pi1.clone();
        pi1.insert(pos, c as u8);
        let mut pi2 = sig.pi2.clone();
        pi2.insert(pos, fresh_group);
        let mut util = vec![0; b * raw];
        for x in 0..b {
            if x == pos {
                continue;
            }
            let old = x - usize::from(x > pos);
            util[x * raw..x * raw + m].copy_from_slice(&sig.util[old * m..old * m + m]);
            util[x * raw + c] += local.w[x * b + pos];
        }
        for y in 0..b {
            if y != pos {
                util[pos * raw + pi1[y] as usize] += local.w[pos * b + y];
                if pi1[y] as usize == c && local.adj[pos * b + y] {
                    let g = pi2[y];
                    if g != fresh_group {
                        pi2.iter_mut().filter(|l| **l == g).for_each(|l| *l = fresh_group);
                    }
                }
            }
        }
        let mut best = sig.best.clone();
        best.insert(pos, 0);
        out.push(ConnectedSignature::finish(pi1, pi2, &util, raw, best));
    }
}

fn forget(sig: &ConnectedSignature, pos: usize) -> Option<ConnectedSignature> {
    let m = sig.classes();
    let b = sig.pi1.len();
    let own = sig.own_utility(pos);
    let row = &sig.util[pos * m..pos * m + m];
    if own < 0 || row.iter().any(|&u| u > own) || sig.best[pos] > own {
        return None;
    }
    let class = sig.pi1[pos];
    let mates = (0..b).filter(|&y| y != pos && sig.pi1[y] == class).count();
    let linked = (0..b).any(|y| y != pos && sig.pi2[y] == sig.pi2[pos]);
    if mates > 0 && !linked {
        return None;
    }
    let mut best = sig.best.clone();
    if mates == 0 {
        for (y, slot) in best.iter_mut().enumerate() {
            if y != pos {
                *slot = (*slot).max(sig.util[y * m + class as usize]);
            }
        }
    }
    best.remove(pos);
    let mut pi1 = sig.pi1.clone();
    pi1.remove(pos);
    let mut pi2 = sig.pi2.clone();
    pi2.remove(pos);
    let mut util = Vec::with_capacity((b - 1) * m);
    for x in (0..b).filter(|&x| x != pos) {
        util.extend_from_slice(&sig.util[x * m..x * m + m]);
    }
    Some(ConnectedSignature::finish(pi1, pi2, &util, m, best))
}

/// Payoffs of bag vertices toward pi1 classes counting bag members only;
/// both join children include them, so one copy is subtracted.
fn inner_util(pi1: &[u8], local: &Local) -> Vec<Weight> {
    let b = pi1.len();
    let m = pi1.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut inner = vec![0; b * m];
    for x in 0..b {
        for y in 0..b {
            if x != y {
                inner[x * m + pi1[y] as usize] += local.w[x * b + y];
            }
        }
    }
    inner
}

fn join(l: &ConnectedSignature, r: &ConnectedSignature, inner: &[Weight]) -> ConnectedSignature {
    let b = l.pi1.len();
    // union of the two linkage relations, closed transitively
    let mut group: Vec<usize> = (0..b).collect();
    fn find(g: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while g[r] != r {
            r = g[r];
        }
        g[x] = r;
        r
    }
    for x in 0..b {
        for y in x + 1..b {
            if l.pi2[x] == l.pi2[y] || r.pi2[x] == r.pi2[y] {
                let (a, c) = (find(&mut group, x), find(&mut group, y));
                group[a.max(c)] = a.min(c);
            }
        }
    }
    let pi2: Vec<u8> = (0..b).map(|x| find(&mut group, x) as u8).collect();
    let util = l.util.iter().zip(&r.util).zip(inner).map(|((a, c), i)| a + c - i).collect();
    let best = l.best.iter().zip(&r.best).map(|(a, c)| *a.max(c)).collect();
    let mut pi2 = pi2;
    canonicalize(&mut pi2);
    ConnectedSignature { pi1: l.pi1.clone(), pi2, util, best }
}

/// All DP tables of one run, kept for reconstruction and trace checks.
pub struct ConnectedRun {
    tables: Vec<SigTable<ConnectedSignature>>,
    partition: Option<Partition>,
    stats: SolveStats,
}

impl ConnectedRun {
    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn into_partition(self) -> Option<Partition> {
        self.partition
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    pub fn table_size(&self, node: usize) -> usize {
        self.tables[node].len()
    }

    /// Whether `sig` survived into the table of `node`.
    pub fn contains(&self, node: usize, sig: &ConnectedSignature) -> bool {
        self.tables[node].contains(sig)
    }

    pub fn signatures(&self, node: usize) -> impl Iterator<Item = &ConnectedSignature> {
        self.tables[node].iter().map(|(_, s)| s)
    }
}

/// Decides whether a connected Nash stable partition exists and returns one
/// if so. `ntd` is a nice decomposition of the underlying graph itself.
pub fn solve_connected_nash(
    instance: &AshgInstance,
    ntd: &NiceTreeDecomposition,
    cfg: &SolverConfig,
) -> Result<Option<Partition>> {
    run_connected_dp(instance, ntd, cfg).map(ConnectedRun::into_partition)
}

pub fn run_connected_dp(
    instance: &AshgInstance,
    ntd: &NiceTreeDecomposition,
    cfg: &SolverConfig,
) -> Result<ConnectedRun> {
    if let Some(v) = ntd.validate(instance).first() {
        return Err(Error::InvalidDecomposition(v.to_string()));
    }
    if ntd.max_bag_size() > usize::from(u8::MAX) {
        return Err(Error::ResourceLimit { cap: cfg.signature_cap });
    }
    let locals = local_data(instance, ntd);
    let bound = instance.n() as Weight * instance.max_abs_weight();

    let tables = run_bottom_up::<ConnectedSignature, _>(ntd, cfg, |id, kids| {
        let node = ntd.node(id);
        let mut table = SigTable::new();
        match node.kind {
            NiceKind::Leaf => {
                table.insert(ConnectedSignature { pi1: vec![], pi2: vec![], util: vec![], best: vec![] }, Back::Leaf)
            }
            NiceKind::Introduce(v) => {
                let pos = node.bag.binary_search(&v).expect("introduced vertex is in the bag");
                let mut buf = Vec::new();
                for (i, sig) in kids[0].iter() {
                    buf.clear();
                    introduce(sig, pos, &locals[id], &mut buf);
                    for s in buf.drain(..) {
                        table.insert(s, Back::One(i as u32));
                    }
                }
            }
            NiceKind::Forget(v) => {
                let pos =
                    ntd.node(node.children[0]).bag.binary_search(&v).expect("forgotten vertex is in the child bag");
                for (i, sig) in kids[0].iter() {
                    if let Some(s) = forget(sig, pos) {
                        table.insert(s, Back::One(i as u32));
                    }
                }
            }
            NiceKind::Join => {
                let mut by_pi1: FxHashMap<&[u8], Vec<usize>> = FxHashMap::default();
                for (j, sig) in kids[1].iter() {
                    by_pi1.entry(sig.pi1.as_slice()).or_default().push(j);
                }
                let mut inner_cache: FxHashMap<&[u8], Vec<Weight>> = FxHashMap::default();
                for (i, l) in kids[0].iter() {
                    let Some(partners) = by_pi1.get(l.pi1.as_slice()) else { continue };
                    let inner = inner_cache.entry(l.pi1.as_slice()).or_insert_with(|| inner_util(&l.pi1, &locals[id]));
                    for &j in partners {
                        let r = kids[1].entry(j).0;
                        table.insert(join(l, r, inner), Back::Two(i as u32, j as u32));
                    }
                    if table.len() > cfg.signature_cap {
                        return Err(Error::ResourceLimit { cap: cfg.signature_cap });
                    }
                }
            }
        }
        debug_assert!(table.iter().all(|(_, s)| s.util.iter().all(|u| u.abs() <= bound)));
        debug_assert!(table.iter().all(|(_, s)| s.best.iter().all(|&u| (0..=bound).contains(&u))));
        Ok(table)
    })?;

    let stats = stats_of(ntd, &tables, 0);
    let partition = (tables[ntd.root()].len() > 0).then(|| {
        let labels = reconstruct(ntd, &tables, instance.n(), |s: &ConnectedSignature| s.pi1.as_slice());
        Partition::from_labels(&labels)
    });
    if let Some(p) = &partition {
        debug_assert!(first_deviation_labels(instance, p.labels()).is_none());
        debug_assert!(first_disconnected_labels(instance, p.labels(), p.num_classes()).is_none());
    }
    Ok(ConnectedRun { tables, partition, stats })
}

/// The signature a partition induces at `node`, computed straight from the
/// definitions. A test oracle for the DP transitions.
pub fn signature_of(
    instance: &AshgInstance,
    ntd: &NiceTreeDecomposition,
    node: usize,
    partition: &Partition,
) -> Result<ConnectedSignature> {
    if node >= ntd.len() {
        return Err(Error::Precondition(format!("node {node} is not in a decomposition of {} nodes", ntd.len())));
    }
    if partition.len() != instance.n() {
        return Err(Error::PartitionSize { expected: instance.n(), got: partition.len() });
    }
    let n = instance.n();
    let bag = &ntd.node(node).bag;
    let mut below = vec![false; n];
    for v in ntd.subtree_vertices(node) {
        below[v] = true;
    }
    let class = |v: Vertex| partition.class_of(v);

    let pi1: Vec<usize> = bag.iter().map(|&v| class(v)).collect();
    let mut component = vec![usize::MAX; n];
    let mut pi2 = Vec::with_capacity(bag.len());
    for (i, &start) in bag.iter().enumerate() {
        if component[start] == usize::MAX {
            component[start] = i;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &x in instance.neighbors(u) {
                    if below[x] && component[x] == usize::MAX && class(x) == class(start) {
                        component[x] = i;
                        stack.push(x);
                    }
                }
            }
        }
        pi2.push(component[start] as u8);
    }

    let mut raw_ids: Vec<usize> = pi1.clone();
    raw_ids.sort_unstable();
    raw_ids.dedup();
    let raw = raw_ids.len();
    let column = |c: usize| raw_ids.binary_search(&c).ok();
    // coalitions that meet B↓ but also reach above it are not complete
    let mut escapes = vec![false; partition.num_classes()];
    for v in 0..n {
        if !below[v] {
            escapes[class(v)] = true;
        }
    }

    let mut util = vec![0; bag.len() * raw];
    let mut best = vec![0; bag.len()];
    for (x, &u) in bag.iter().enumerate() {
        let mut complete: FxHashMap<usize, Weight> = FxHashMap::default();
        for &(t, w) in instance.out_arcs(u) {
            if !below[t] {
                continue;
            }
            let c = class(t);
            if let Some(col) = column(c) {
                util[x * raw + col] += w;
            } else if !escapes[c] {
                *complete.entry(c).or_default() += w;
            }
        }
        best[x] = complete.values().copied().max().unwrap_or(0).max(0);
    }
    let pi1_raw: Vec<u8> = pi1.iter().map(|&c| column(c).expect("bag class has a column") as u8).collect();
    Ok(ConnectedSignature::finish(pi1_raw, pi2, &util, raw, best))
}
