//! Bottom-up driver shared by the two dynamic programs over nice tree
//! decompositions, plus the signature tables and the top-down reconstruction
//! they both use.

use std::hash::Hash;
use std::sync::OnceLock;

use indexmap::IndexMap;
use rustc_hash::FxBuildHasher;

use crate::decomposition::{NiceKind, NiceTreeDecomposition};
use crate::error::{Error, Result};

/// Largest table any single node may hold before a solver gives up.
pub const DEFAULT_SIGNATURE_CAP: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub signature_cap: usize,
    /// Process independent subtrees on the rayon pool. Answers and returned
    /// partitions are identical to sequential mode.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { signature_cap: DEFAULT_SIGNATURE_CAP, parallel: false }
    }
}

impl SolverConfig {
    pub fn sequential() -> Self {
        SolverConfig::default()
    }

    pub fn parallel() -> Self {
        SolverConfig { parallel: true, ..SolverConfig::default() }
    }

    pub fn with_cap(self, signature_cap: usize) -> Self {
        SolverConfig { signature_cap, ..self }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nice_nodes: usize,
    /// Max bag size of the decomposition the DP actually ran on.
    pub max_bag_size: usize,
    /// Color budget; zero for the connected DP.
    pub colors: usize,
    pub peak_table_size: usize,
    pub total_signatures: usize,
}

/// How a signature was derived from the child table(s).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Back {
    Leaf,
    One(u32),
    Two(u32, u32),
}

/// Deduplicating signature set that remembers the first derivation of each
/// entry. Insertion order is deterministic, which makes reconstruction
/// deterministic too.
#[derive(Clone, Debug)]
pub(crate) struct SigTable<S> {
    entries: IndexMap<S, Back, FxBuildHasher>,
}

impl<S: Hash + Eq> SigTable<S> {
    pub(crate) fn new() -> Self {
        SigTable { entries: IndexMap::default() }
    }

    pub(crate) fn insert(&mut self, sig: S, back: Back) {
        self.entries.entry(sig).or_insert(back);
    }

    pub(crate) fn len(&self) -> usize {
        self.entries.len()
    }

    pub(crate) fn contains(&self, sig: &S) -> bool {
        self.entries.contains_key(sig)
    }

    pub(crate) fn get_index_of(&self, sig: &S) -> Option<usize> {
        self.entries.get_index_of(sig)
    }

    pub(crate) fn entry(&self, i: usize) -> (&S, Back) {
        let (s, b) = self.entries.get_index(i).expect("back-pointer in range");
        (s, *b)
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.entries.keys().enumerate()
    }
}

/// Computes one table per nice node, children before parents. `step` gets the
/// node id and its children's tables in child order.
pub(crate) fn run_bottom_up<S, F>(ntd: &NiceTreeDecomposition, cfg: &SolverConfig, step: F) -> Result<Vec<SigTable<S>>>
where
    S: Hash + Eq + Send + Sync,
    F: Fn(usize, &[&SigTable<S>]) -> Result<SigTable<S>> + Sync,
{
    if !cfg.parallel {
        let mut done: Vec<SigTable<S>> = Vec::with_capacity(ntd.len());
        for id in 0..ntd.len() {
            let kids: Vec<&SigTable<S>> = ntd.node(id).children.iter().map(|&c| &done[c]).collect();
            let t = checked(step(id, &kids), cfg)?;
            done.push(t);
        }
        return Ok(done);
    }

    let slots: Vec<OnceLock<SigTable<S>>> = (0..ntd.len()).map(|_| OnceLock::new()).collect();
    fill_parallel(ntd, ntd.root(), &slots, cfg, &step)?;
    Ok(slots.into_iter().map(|s| s.into_inner().expect("every node filled")).collect())
}

fn checked<S: Hash + Eq>(table: Result<SigTable<S>>, cfg: &SolverConfig) -> Result<SigTable<S>> {
    let table = table?;
    if table.len() > cfg.signature_cap {
        return Err(Error::ResourceLimit { cap: cfg.signature_cap });
    }
    Ok(table)
}

fn fill_parallel<S, F>(
    ntd: &NiceTreeDecomposition,
    top: usize,
    slots: &[OnceLock<SigTable<S>>],
    cfg: &SolverConfig,
    step: &F,
) -> Result<()>
where
    S: Hash + Eq + Send + Sync,
    F: Fn(usize, &[&SigTable<S>]) -> Result<SigTable<S>> + Sync,
{
    // descend the single-child chain iteratively; recurse only at joins
    let mut chain = vec![top];
    let mut cur = top;
    while let [only] = ntd.node(cur).children[..] {
        cur = only;
        chain.push(cur);
    }
    if let [a, b] = ntd.node(cur).children[..] {
        let (ra, rb) =
            rayon::join(|| fill_parallel(ntd, a, slots, cfg, step), || fill_parallel(ntd, b, slots, cfg, step));
        ra?;
        rb?;
    }
    for &id in chain.iter().rev() {
        let kids: Vec<&SigTable<S>> =
            ntd.node(id).children.iter().map(|&c| slots[c].get().expect("child computed first")).collect();
        let t = checked(step(id, &kids), cfg)?;
        let _ = slots[id].set(t);
    }
    Ok(())
}

pub(crate) fn stats_of<S>(ntd: &NiceTreeDecomposition, tables: &[SigTable<S>], colors: usize) -> SolveStats {
    SolveStats {
        nice_nodes: ntd.len(),
        max_bag_size: ntd.max_bag_size(),
        colors,
        peak_table_size: tables.iter().map(|t| t.entries.len()).max().unwrap_or(0),
        total_signatures: tables.iter().map(|t| t.entries.len()).sum(),
    }
}

/// Restricted-growth relabelling in place: the first class seen becomes 0,
/// the next new one 1, and so on. Returns the number of classes.
pub(crate) fn canonicalize(labels: &mut [u8]) -> usize {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    for l in labels.iter_mut() {
        let slot = &mut map[*l as usize];
        if *slot == u8::MAX {
            *slot = next;
            next += 1;
        }
        *l = *slot;
    }
    next as usize
}

/// Walks back-pointers from the root and assigns global coalition labels.
/// `classes` exposes, for a signature, the class of every bag position in
/// restricted-growth form; equal classes in one bag share a label.
pub(crate) fn reconstruct<S, F>(ntd: &NiceTreeDecomposition, tables: &[SigTable<S>], n: usize, classes: F) -> Vec<usize>
where
    S: Hash + Eq,
    F: Fn(&S) -> &[u8],
{
    let mut label = vec![usize::MAX; n];
    let mut fresh = 0usize;
    // (node, entry index, label per class of that entry)
    let mut stack: Vec<(usize, usize, Vec<usize>)> = vec![(ntd.root(), 0, Vec::new())];
    while let Some((id, idx, class_label)) = stack.pop() {
        let node = ntd.node(id);
        let (sig, back) = tables[id].entry(idx);
        let cls = classes(sig);
        for (pos, &v) in node.bag.iter().enumerate() {
            label[v] = class_label[cls[pos] as usize];
        }
        match (node.kind, back) {
            (NiceKind::Leaf, _) => {}
            (NiceKind::Join, Back::Two(a, b)) => {
                stack.push((node.children[0], a as usize, class_label.clone()));
                stack.push((node.children[1], b as usize, class_label));
            }
            (_, Back::One(c)) => {
                let child = node.children[0];
                let (csig, _) = tables[child].entry(c as usize);
                let ccls = classes(csig);
                let cbag = &ntd.node(child).bag;
                let mut child_label = vec![usize::MAX; ccls.iter().map(|&x| x as usize + 1).max().unwrap_or(0)];
                for (cpos, &v) in cbag.iter().enumerate() {
                    let slot = &mut child_label[ccls[cpos] as usize];
                    if *slot == usize::MAX {
                        *slot = match node.bag.binary_search(&v) {
                            Ok(pos) => class_label[cls[pos] as usize],
                            Err(_) => usize::MAX,
                        };
                    }
                }
                for slot in &mut child_label {
                    if *slot == usize::MAX {
                        *slot = n + fresh;
                        fresh += 1;
                    }
                }
                stack.push((child, c as usize, child_label));
            }
            (kind, back) => unreachable!("{kind:?} node with back-pointer {back:?}"),
        }
    }
    debug_assert!(label.iter().all(|&l| l != usize::MAX), "every vertex is forgotten once");
    label
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_first_occurrence() {
        let mut l = [3, 3, 1, 0, 1];
        assert_eq!(canonicalize(&mut l), 3);
        assert_eq!(l, [0, 0, 1, 2, 1]);
        let mut empty: [u8; 0] = [];
        assert_eq!(canonicalize(&mut empty), 0);
    }

    #[test]
    fn table_keeps_first_derivation() {
        let mut t = SigTable::new();
        t.insert(vec![0u8], Back::One(4));
        t.insert(vec![0u8], Back::One(9));
        t.insert(vec![1u8], Back::Leaf);
        assert_eq!(t.len(), 2);
        assert_eq!(t.entry(0), (&vec![0u8], Back::One(4)));
        assert_eq!(t.get_index_of(&vec![1u8]), Some(1));
    }
}
