//! Exhaustive ground truth for small instances.

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::game::{first_deviation_labels, first_disconnected_labels, AshgInstance, Partition};

/// Largest `n` the partition oracles accept by default.
pub const DEFAULT_PARTITION_CAP: usize = 12;

/// Iterates set partitions of `0..n` as restricted-growth strings in
/// lexicographic order, optionally limited to at most `max_classes` blocks.
#[derive(Clone, Debug)]
pub struct PartitionEnumerator {
    rgs: Vec<usize>,
    /// `prefix_max[i]` is the largest label among `rgs[..=i]`.
    prefix_max: Vec<usize>,
    max_classes: usize,
    done: bool,
}

impl PartitionEnumerator {
    pub fn new(n: usize) -> Self {
        Self::with_max_classes(n, n.max(1))
    }

    pub fn with_max_classes(n: usize, max_classes: usize) -> Self {
        PartitionEnumerator { rgs: vec![0; n], prefix_max: vec![0; n], max_classes, done: max_classes == 0 && n > 0 }
    }

    /// The current string; valid until the next call to `advance`.
    pub fn current(&self) -> Option<&[usize]> {
        (!self.done).then_some(self.rgs.as_slice())
    }

    /// Moves to the next string; returns false once exhausted.
    pub fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        for i in (1..n).rev() {
            let limit = self.prefix_max[i - 1] + 1;
            if self.rgs[i] < limit && self.rgs[i] + 1 < self.max_classes {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
        }
        self.done = true;
        false
    }
}

impl Iterator for PartitionEnumerator {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let out = Partition::from_labels(self.current()?);
        self.advance();
        Some(out)
    }
}

/// Every set partition of `0..n`, each exactly once.
pub fn enumerate_partitions(n: usize) -> Result<PartitionEnumerator> {
    check_cap(n, DEFAULT_PARTITION_CAP)?;
    Ok(PartitionEnumerator::new(n))
}

/// Bell number via the Bell triangle; exact for `n ≤ 25`.
pub fn bell(n: usize) -> u128 {
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("rows are nonempty"));
        for &x in &row {
            let prev = *next.last().expect("just pushed");
            next.push(prev + x);
        }
        row = next;
    }
    row[0]
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded(format!("{n} vertices is above the oracle cap of {cap}")))
    } else {
        Ok(())
    }
}

fn first_partition(
    instance: &AshgInstance,
    cap: usize,
    max_classes: usize,
    accept: impl Fn(&[usize]) -> bool,
) -> Result<Option<Vec<usize>>> {
    check_cap(instance.n(), cap)?;
    let mut it = PartitionEnumerator::with_max_classes(instance.n(), max_classes);
    while let Some(rgs) = it.current() {
        if accept(rgs) {
            return Ok(Some(rgs.to_vec()));
        }
        it.advance();
    }
    Ok(None)
}

/// The first Nash stable partition in enumeration order.
pub fn brute_force_nash(instance: &AshgInstance) -> Result<Option<Partition>> {
    brute_force_nash_capped(instance, DEFAULT_PARTITION_CAP)
}

pub fn brute_force_nash_capped(instance: &AshgInstance, cap: usize) -> Result<Option<Partition>> {
    let n = instance.n();
    let found = first_partition(instance, cap, n.max(1), |rgs| first_deviation_labels(instance, rgs).is_none())?;
    Ok(found.map(|l| Partition::from_labels(&l)))
}

/// The first partition that is both connected and Nash stable.
pub fn brute_force_connected_nash(instance: &AshgInstance) -> Result<Option<Partition>> {
    brute_force_connected_nash_capped(instance, DEFAULT_PARTITION_CAP)
}

pub fn brute_force_connected_nash_capped(instance: &AshgInstance, cap: usize) -> Result<Option<Partition>> {
    let n = instance.n();
    let found = first_partition(instance, cap, n.max(1), |rgs| {
        let classes = rgs.iter().max().map_or(0, |m| m + 1);
        first_disconnected_labels(instance, rgs, classes).is_none() && first_deviation_labels(instance, rgs).is_none()
    })?;
    Ok(found.map(|l| Partition::from_labels(&l)))
}

/// The first stable coloring with at most `k` colors.
///
/// Stability of a coloring does not change when colors are permuted, so
/// only colorings in restricted-growth form are tried: one per set partition
/// with at most `k` blocks. The cap therefore bounds `n`, not `k^n`.
pub fn brute_force_stable_coloring(instance: &AshgInstance, k: usize) -> Result<Option<Coloring>> {
    brute_force_stable_coloring_capped(instance, k, DEFAULT_PARTITION_CAP)
}

pub fn brute_force_stable_coloring_capped(instance: &AshgInstance, k: usize, cap: usize) -> Result<Option<Coloring>> {
    if k == 0 {
        return Err(Error::Precondition("a coloring needs at least one color".into()));
    }
    let found = first_partition(instance, cap, k, |rgs| first_deviation_labels(instance, rgs).is_none())?;
    found.map(|l| Coloring::new(l.iter().map(|c| c + 1).collect(), k)).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::is_stable_coloring;
    use crate::game::{is_connected_partition, is_nash_stable, Weight};
    use std::collections::HashSet;

    fn pair(a: Weight, b: Weight) -> AshgInstance {
        AshgInstance::new(2, [(0, 1, a), (1, 0, b)]).unwrap()
    }

    #[test]
    fn counts_match_bell_numbers() {
        assert_eq!(enumerate_partitions(0).unwrap().count(), 1);
        assert_eq!(enumerate_partitions(3).unwrap().count(), 5);
        assert_eq!(enumerate_partitions(6).unwrap().count(), 203);
        for n in 0..=9 {
            assert_eq!(PartitionEnumerator::new(n).count() as u128, bell(n), "n = {n}");
        }
        assert!(enumerate_partitions(13).is_err());
    }

    #[test]
    fn bell_recurrence() {
        // B(n+1) = sum_k C(n, k) B(k)
        let binom = |n: u128, k: u128| (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1));
        for n in 0..15u128 {
            let rhs: u128 = (0..=n).map(|k| binom(n, k) * bell(k as usize)).sum();
            assert_eq!(bell(n as usize + 1), rhs);
        }
        assert_eq!(bell(6), 203);
    }

    #[test]
    fn partitions_are_distinct() {
        let all: HashSet<Partition> = PartitionEnumerator::new(6).collect();
        assert_eq!(all.len(), 203);
    }

    #[test]
    fn bounded_class_count() {
        // Stirling numbers S(5,1) + S(5,2) = 1 + 15
        assert_eq!(PartitionEnumerator::with_max_classes(5, 2).count(), 16);
        assert_eq!(PartitionEnumerator::with_max_classes(3, 1).count(), 1);
        assert_eq!(PartitionEnumerator::with_max_classes(0, 1).count(), 1);
    }

    #[test]
    fn nash_oracle_examples() {
        assert_eq!(brute_force_nash(&pair(1, -1)).unwrap(), None);
        let p = brute_force_nash(&pair(1, 1)).unwrap().unwrap();
        assert!(is_nash_stable(&pair(1, 1), &p).unwrap());
        assert_eq!(brute_force_nash(&AshgInstance::empty(1)).unwrap(), Some(Partition::grand(1)));
        assert!(brute_force_nash(&AshgInstance::empty(20)).is_err());
    }

    #[test]
    fn connected_oracle_examples() {
        assert_eq!(brute_force_connected_nash(&pair(1, -1)).unwrap(), None);
        let tri = AshgInstance::new(3, [(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1), (0, 2, 1), (2, 0, 1)]).unwrap();
        assert_eq!(brute_force_connected_nash(&tri).unwrap(), Some(Partition::grand(3)));
        let iso = AshgInstance::empty(2);
        let p = brute_force_connected_nash(&iso).unwrap().unwrap();
        assert_eq!(p, Partition::singletons(2));
        assert!(is_connected_partition(&iso, &p).unwrap());
    }

    #[test]
    fn coloring_oracle_examples() {
        let c = brute_force_stable_coloring(&pair(1, 1), 2).unwrap().unwrap();
        assert_eq!(c.colors(), &[1, 1]);
        assert_eq!(brute_force_stable_coloring(&pair(1, -1), 4).unwrap(), None);
        let c = brute_force_stable_coloring(&AshgInstance::empty(3), 1).unwrap().unwrap();
        assert!(is_stable_coloring(&AshgInstance::empty(3), &c).unwrap());
        assert!(brute_force_stable_coloring(&pair(1, 1), 0).is_err());
    }

    #[test]
    fn stalker_exhaustive_over_all_colorings() {
        // the symmetry reduction must agree with trying all 16 colorings
        let g = pair(1, -1);
        for a in 1..=4 {
            for b in 1..=4 {
                assert!(!is_stable_coloring(&g, &Coloring::new(vec![a, b], 4).unwrap()).unwrap());
            }
        }
    }
}
