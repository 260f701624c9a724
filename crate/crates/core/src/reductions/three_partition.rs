//! 3-Partition to Nash stability on a star.

use super::GadgetBuilder;
use crate::error::{Error, Result};
use crate::game::{AshgInstance, Partition, Weight};

/// A 3-Partition instance in normal form: `3q` items, each strictly between
/// `T/4` and `T/2`, summing to `q·T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreePartition {
    items: Vec<u64>,
    target: u64,
}

impl ThreePartition {
    pub fn new(items: Vec<u64>, target: u64) -> Result<Self> {
        let bad = |msg: String| Err(Error::Precondition(format!("3-partition normal form: {msg}")));
        if !items.len().is_multiple_of(3) {
            return bad(format!("{} items is not a multiple of 3", items.len()));
        }
        if let Some(a) = items.iter().find(|&&a| 4 * a as u128 <= target as u128 || 2 * a as u128 >= target as u128) {
            return bad(format!("item {a} is not strictly between T/4 and T/2 for T = {target}"));
        }
        let total: u128 = items.iter().map(|&a| a as u128).sum();
        let want = (items.len() / 3) as u128 * target as u128;
        if total != want {
            return bad(format!("items sum to {total}, expected {want}"));
        }
        if target > (i64::MAX / 8) as u64 {
            return bad(format!("target {target} exceeds the arithmetic guard"));
        }
        Ok(ThreePartition { items, target })
    }

    /// Brings an arbitrary instance with total `q·T` into normal form by
    /// adding `T` to every item and using `4T` as the target.
    pub fn normalized(items: Vec<u64>, target: u64) -> Result<Self> {
        if let Some(a) = items.iter().find(|&&a| a == 0 || a >= target) {
            return Err(Error::Precondition(format!("item {a} must lie in 1..{target}")));
        }
        let big = target
            .checked_mul(4)
            .ok_or_else(|| Error::Precondition(format!("target {target} exceeds the arithmetic guard")))?;
        ThreePartition::new(items.iter().map(|a| a + target).collect(), big)
    }

    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn triples(&self) -> usize {
        self.items.len() / 3
    }

    /// A partition into triples of sum `T`, found by exhaustive search.
    pub fn solve(&self) -> Option<Vec<[usize; 3]>> {
        let mut used = vec![false; self.items.len()];
        let mut out = Vec::new();
        self.extend(&mut used, &mut out).then_some(out)
    }

    fn extend(&self, used: &mut [bool], out: &mut Vec<[usize; 3]>) -> bool {
        let Some(a) = used.iter().position(|u| !u) else {
            return true;
        };
        used[a] = true;
        for b in a + 1..used.len() {
            if used[b] {
                continue;
            }
            for c in b + 1..used.len() {
                if used[c] || self.items[a] + self.items[b] + self.items[c] != self.target {
                    continue;
                }
                used[b] = true;
                used[c] = true;
                out.push([a, b, c]);
                if self.extend(used, out) {
                    return true;
                }
                out.pop();
                used[b] = false;
                used[c] = false;
            }
        }
        used[a] = false;
        false
    }

    /// Checks that `triples` is a partition of the items into triples of
    /// sum `T`.
    pub fn check_certificate(&self, triples: &[[usize; 3]]) -> Result<()> {
        let mut seen = vec![false; self.items.len()];
        for t in triples {
            for &x in t {
                if x >= seen.len() || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Precondition(format!("item {x} is missing or used twice")));
                }
            }
            let sum: u64 = t.iter().map(|&x| self.items[x]).sum();
            if sum != self.target {
                return Err(Error::Precondition(format!("triple {t:?} sums to {sum}, not {}", self.target)));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Precondition("certificate does not cover every item".into()));
        }
        Ok(())
    }
}

/// Items are vertices `0..3q`, the bin vertices `3q..4q`, then the stalker
/// `s` and its helper `s'`. Every arc touches `s`.
pub fn gen_three_partition_star(tp: &ThreePartition) -> Result<AshgInstance> {
    let q = tp.triples();
    let t = tp.target as Weight;
    let mut b = GadgetBuilder::new();
    let items: Vec<_> = tp.items.iter().map(|&a| (b.vertex(()), a as Weight)).collect();
    let bins: Vec<_> = (0..q).map(|_| b.vertex(())).collect();
    let s = b.vertex(());
    let helper = b.vertex(());
    for &(x, a) in &items {
        b.arc(x, s, -1);
        b.arc(s, x, -a);
    }
    for &x in &bins {
        b.arc(x, s, -1);
        b.arc(s, x, 2 * t);
    }
    b.arc(s, helper, t);
    b.arc(helper, s, 1);
    b.finish().map(|(g, _)| g)
}

/// `s` with `s'`, and triple `i` together with bin vertex `i`.
pub fn witness_three_partition(tp: &ThreePartition, triples: &[[usize; 3]]) -> Result<Partition> {
    tp.check_certificate(triples)?;
    let q = tp.triples();
    let mut label = vec![q; 4 * q + 2];
    for (i, t) in triples.iter().enumerate() {
        for &x in t {
            label[x] = i;
        }
        label[3 * q + i] = i;
    }
    Ok(Partition::from_labels(&label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_nash_stable;
    use crate::oracle::brute_force_nash;

    #[test]
    fn one_triple_star() {
        let tp = ThreePartition::new(vec![3, 3, 3], 9).unwrap();
        let g = gen_three_partition_star(&tp).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.degree(4), 5);
        assert!(brute_force_nash(&g).unwrap().is_some());
        let w = witness_three_partition(&tp, &tp.solve().unwrap()).unwrap();
        assert!(is_nash_stable(&g, &w).unwrap());
    }

    #[test]
    fn normal_form_is_enforced() {
        assert!(ThreePartition::new(vec![3, 3, 3, 3, 3, 4], 9).is_err());
        assert!(ThreePartition::new(vec![2, 3, 4], 9).is_err());
        assert!(ThreePartition::new(vec![3, 3], 6).is_err());
    }

    #[test]
    fn normalization_shifts_items() {
        let tp = ThreePartition::normalized(vec![1, 2, 3, 2, 2, 2], 6).unwrap();
        assert_eq!(tp.target(), 24);
        assert_eq!(tp.items(), &[7, 8, 9, 8, 8, 8]);
        assert!(tp.solve().is_some());
    }

    #[test]
    fn infeasible_instance_has_no_stable_partition() {
        // triple sums are 24, 28, 32 or 36
        let tp = ThreePartition::new(vec![8, 8, 8, 12, 12, 12], 30).unwrap();
        assert!(tp.solve().is_none());
        let g = gen_three_partition_star(&tp).unwrap();
        assert_eq!(brute_force_nash(&g).unwrap(), None);
    }

    #[test]
    fn bad_certificate_is_rejected() {
        let tp = ThreePartition::new(vec![3, 3, 3], 9).unwrap();
        assert!(witness_three_partition(&tp, &[[0, 1, 1]]).is_err());
        assert!(witness_three_partition(&tp, &[]).is_err());
    }
}
