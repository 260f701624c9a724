//! Bin Packing to connected Nash stability. Without the unit-weight
//! expansion the bin vertices form a vertex cover of size `k`.

use super::GadgetBuilder;
use crate::error::{Error, Result};
use crate::game::{AshgInstance, Partition, Vertex, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinPacking {
    items: Vec<u64>,
    capacity: u64,
    bins: usize,
}

impl BinPacking {
    pub fn new(items: Vec<u64>, capacity: u64, bins: usize) -> Result<Self> {
        if capacity == 0 || bins == 0 {
            return Err(Error::Precondition("bin packing needs a positive capacity and bin count".into()));
        }
        if items.contains(&0) {
            return Err(Error::Precondition("bin packing items must be positive".into()));
        }
        if capacity > (i64::MAX / 8) as u64 || items.iter().any(|&a| a > (i64::MAX / 8) as u64) {
            return Err(Error::Precondition("bin packing values exceed the arithmetic guard".into()));
        }
        Ok(BinPacking { items, capacity, bins })
    }

    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    fn total(&self) -> u128 {
        self.items.iter().map(|&a| a as u128).sum()
    }

    /// Appends unit items until the total is exactly `k·B`.
    pub fn padded(&self) -> Result<BinPacking> {
        let full = self.bins as u128 * self.capacity as u128;
        let total = self.total();
        if total > full {
            return Err(Error::Precondition(format!(
                "items total {total} exceeds k·B = {full}; padding cannot fix that"
            )));
        }
        let pad = usize::try_from(full - total)
            .map_err(|_| Error::Precondition(format!("{} unit items of padding is too many", full - total)))?;
        let mut items = self.items.clone();
        items.extend(std::iter::repeat_n(1, pad));
        Ok(BinPacking { items, ..self.clone() })
    }

    /// A bin for every item with no bin over capacity, by exhaustive search.
    /// Empty bins are opened in order, so equivalent bins are tried once.
    pub fn solve(&self) -> Option<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.items.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.items[i]));
        let mut load = vec![0u64; self.bins];
        let mut bin = vec![usize::MAX; self.items.len()];
        self.place(&order, 0, &mut load, &mut bin).then_some(bin)
    }

    fn place(&self, order: &[usize], at: usize, load: &mut [u64], bin: &mut [usize]) -> bool {
        let Some(&item) = order.get(at) else {
            return true;
        };
        let a = self.items[item];
        for b in 0..self.bins {
            if load[b] + a <= self.capacity {
                load[b] += a;
                bin[item] = b;
                if self.place(order, at + 1, load, bin) {
                    return true;
                }
                load[b] -= a;
            }
            if load[b] == 0 {
                break;
            }
        }
        false
    }

    pub fn check_certificate(&self, bin: &[usize]) -> Result<()> {
        if bin.len() != self.items.len() {
            return Err(Error::Precondition(format!(
                "certificate has {} entries for {} items",
                bin.len(),
                self.items.len()
            )));
        }
        let mut load = vec![0u64; self.bins];
        for (&b, &a) in bin.iter().zip(&self.items) {
            if b >= self.bins {
                return Err(Error::Precondition(format!("bin {} does not exist", b + 1)));
            }
            load[b] += a;
        }
        match load.iter().position(|&l| l > self.capacity) {
            Some(b) => Err(Error::Precondition(format!("bin {} holds {} > {}", b + 1, load[b], self.capacity))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BinPackingReduction {
    pub instance: AshgInstance,
    /// The source instance after padding; its items are the item vertices.
    pub padded: BinPacking,
    pub bin_vertices: Vec<Vertex>,
    pub helper_vertices: Vec<Vertex>,
    pub item_vertices: Vec<Vertex>,
    /// For each vertex added by the unit-weight expansion, the head of the
    /// arc it replaced. Vertex `base + t` corresponds to entry `t`.
    pub expansion_heads: Vec<Vertex>,
}

/// Replaces every arc `(u, v)` of weight `w` by `|w|` fresh vertices `e` with
/// `w(e, v) = 1` and `w(u, e) = sgn(w)`. Returns the new instance and the
/// replaced head for each fresh vertex.
pub fn expand_unit_weights(instance: &AshgInstance) -> Result<(AshgInstance, Vec<Vertex>)> {
    let n = instance.n();
    let mut heads = Vec::new();
    let mut arcs = Vec::new();
    for a in instance.arcs() {
        for _ in 0..a.weight.unsigned_abs() {
            let e = n + heads.len();
            heads.push(a.to);
            arcs.push((e, a.to, 1));
            arcs.push((a.from, e, a.weight.signum()));
        }
    }
    Ok((AshgInstance::new(n + heads.len(), arcs)?, heads))
}

/// Vertices: bins `b_1..b_k`, helpers `b_1'..b_k'`, then one vertex per
/// padded item, then the expansion vertices if `unit_weights` is set.
pub fn gen_bin_packing(bp: &BinPacking, unit_weights: bool) -> Result<BinPackingReduction> {
    let padded = bp.padded()?;
    let k = padded.bins;
    let mut b = GadgetBuilder::new();
    let bins: Vec<Vertex> = (0..k).map(|_| b.vertex(())).collect();
    let helpers: Vec<Vertex> = (0..k).map(|_| b.vertex(())).collect();
    let items: Vec<Vertex> = padded.items.iter().map(|_| b.vertex(())).collect();
    for (&bi, &hi) in bins.iter().zip(&helpers) {
        b.arc(bi, hi, padded.capacity as Weight);
    }
    for (&v, &a) in items.iter().zip(&padded.items) {
        for &bj in &bins {
            b.arc(v, bj, 1);
            b.arc(bj, v, -(a as Weight));
        }
    }
    let (mut instance, _) = b.finish()?;
    let mut expansion_heads = Vec::new();
    if unit_weights {
        (instance, expansion_heads) = expand_unit_weights(&instance)?;
    }
    Ok(BinPackingReduction {
        instance,
        padded,
        bin_vertices: bins,
        helper_vertices: helpers,
        item_vertices: items,
        expansion_heads,
    })
}

/// Coalition `i` holds `b_i`, `b_i'` and the items packed into bin `i`.
/// `bin` covers the original items; padding units fill the remaining slack.
pub fn witness_bin_packing(bp: &BinPacking, unit_weights: bool, bin: &[usize]) -> Result<Partition> {
    bp.check_certificate(bin)?;
    let red = gen_bin_packing(bp, unit_weights)?;
    let mut load = vec![0u64; bp.bins];
    for (&b, &a) in bin.iter().zip(&bp.items) {
        load[b] += a;
    }
    let mut label: Vec<usize> = (0..red.instance.n()).map(|v| v % bp.bins).collect();
    for (b, (&bv, &hv)) in red.bin_vertices.iter().zip(&red.helper_vertices).enumerate() {
        label[bv] = b;
        label[hv] = b;
    }
    let mut slack = load.iter().enumerate().flat_map(|(b, &l)| std::iter::repeat_n(b, (bp.capacity - l) as usize));
    for (t, &v) in red.item_vertices.iter().enumerate() {
        label[v] = match bin.get(t) {
            Some(&b) => b,
            None => slack.next().expect("padding equals the total slack"),
        };
    }
    let base = red.instance.n() - red.expansion_heads.len();
    for (t, &head) in red.expansion_heads.iter().enumerate() {
        label[base + t] = label[head];
    }
    Ok(Partition::from_labels(&label))
}
