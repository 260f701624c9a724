//! Stable k-colorings and the coloring DP that decides Nash stability on
//! graphs of bounded treewidth and degree.
//!
//! The DP runs on the square of the underlying graph, where every closed
//! neighbourhood is a clique and so sits inside a single bag. A vertex is
//! checked at every node whose bag holds it together with all its
//! out-neighbours; signatures failing the check are dropped.

use crate::decomposition::{make_nice, square_augment, NiceKind, NiceTreeDecomposition, TreeDecomposition};
use crate::dp::{canonicalize, reconstruct, run_bottom_up, stats_of, Back, SigTable, SolveStats, SolverConfig};
use crate::error::{Error, Result};
use crate::game::{first_deviation_labels, AshgInstance, DeviationTarget, DeviationWitness, Partition, Vertex, Weight};

/// A total map from vertices to colors `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    color_of: Vec<usize>,
    k: usize,
}

impl Coloring {
    pub fn new(color_of: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&color) = color_of.iter().find(|&&c| c == 0 || c > k) {
            return Err(Error::ColorOutOfRange { color, k });
        }
        Ok(Coloring { color_of, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.color_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.color_of.is_empty()
    }

    pub fn color_of(&self, v: Vertex) -> usize {
        self.color_of[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color_of
    }
}

/// The smallest color budget for which a Nash stable partition always has a
/// stable coloring, given the max bag size of a decomposition of the
/// original graph.
pub fn choose_k(max_bag_size: usize, max_degree: usize) -> usize {
    (max_bag_size * max_degree).max(1)
}

/// The lowest vertex whose weight into its own color is beaten by some other
/// color or by the empty color `k + 1` (reported as `Singleton`). Class
/// targets carry 0-based color indices.
pub fn coloring_deviation(instance: &AshgInstance, coloring: &Coloring) -> Result<Option<DeviationWitness>> {
    if coloring.len() != instance.n() {
        return Err(Error::PartitionSize { expected: instance.n(), got: coloring.len() });
    }
    let labels: Vec<usize> = coloring.colors().iter().map(|c| c - 1).collect();
    Ok(first_deviation_labels(instance, &labels))
}

pub fn is_stable_coloring(instance: &AshgInstance, coloring: &Coloring) -> Result<bool> {
    Ok(coloring_deviation(instance, coloring)?.is_none())
}

/// Nonempty color classes become coalitions.
pub fn coloring_to_partition(coloring: &Coloring) -> Partition {
    Partition::from_labels(coloring.colors())
}

/// Vertex `pos` of a bag together with its out-arcs as `(bag position, w)`.
struct Check {
    pos: usize,
    arcs: Vec<(usize, Weight)>,
}

fn checks_for(instance: &AshgInstance, ntd: &NiceTreeDecomposition) -> Vec<Vec<Check>> {
    ntd.nodes()
        .iter()
        .map(|node| {
            node.bag
                .iter()
                .enumerate()
                .filter_map(|(pos, &u)| {
                    let arcs: Option<Vec<(usize, Weight)>> = instance
                        .out_arcs(u)
                        .iter()
                        .map(|&(x, w)| node.bag.binary_search(&x).ok().map(|p| (p, w)))
                        .collect();
                    arcs.map(|arcs| Check { pos, arcs })
                })
                .collect()
        })
        .collect()
}

fn all_stable(checks: &[Check], sig: &[u8], classes: usize) -> bool {
    let mut toward: Vec<Weight> = vec![0; classes];
    checks.iter().all(|check| {
        toward.iter_mut().for_each(|t| *t = 0);
        for &(p, w) in &check.arcs {
            toward[sig[p] as usize] += w;
        }
        let own = toward[sig[check.pos] as usize];
        own >= 0 && toward.iter().all(|&t| t <= own)
    })
}

fn class_count(sig: &[u8]) -> usize {
    sig.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

/// Decides whether a Nash stable partition exists and returns one if so.
///
/// `td` must be a decomposition of the instance's underlying graph; the
/// squaring and nice conversion happen internally.
pub fn solve_nash_via_coloring(
    instance: &AshgInstance,
    td: &TreeDecomposition,
    cfg: &SolverConfig,
) -> Result<Option<Partition>> {
    solve_nash_via_coloring_with_stats(instance, td, cfg).map(|(p, _)| p)
}

pub fn solve_nash_via_coloring_with_stats(
    instance: &AshgInstance,
    td: &TreeDecomposition,
    cfg: &SolverConfig,
) -> Result<(Option<Partition>, SolveStats)> {
    td.ensure_valid(instance)?;
    let k = choose_k(td.max_bag_size(), instance.max_degree());
    let (_, squared_td) = square_augment(instance, td)?;
    let ntd = make_nice(&squared_td)?;
    if ntd.max_bag_size() > usize::from(u8::MAX) {
        return Err(Error::ResourceLimit { cap: cfg.signature_cap });
    }
    let checks = checks_for(instance, &ntd);

    let tables = run_bottom_up::<Vec<u8>, _>(&ntd, cfg, |id, kids| {
        let node = ntd.node(id);
        let checks = &checks[id];
        let mut table = SigTable::new();
        match node.kind {
            NiceKind::Leaf => table.insert(Vec::new(), Back::Leaf),
            NiceKind::Introduce(v) => {
                let pos = node.bag.binary_search(&v).expect("introduced vertex is in the bag");
                for (i, sig) in kids[0].iter() {
                    let used = class_count(sig);
                    for c in 0..(used + 1).min(k) {
                        let mut next = Vec::with_capacity(sig.len() + 1);
                        next.extend_from_slice(&sig[..pos]);
                        next.push(c as u8);
                        next.extend_from_slice(&sig[pos..]);
                        let classes = canonicalize(&mut next);
                        if all_stable(checks, &next, classes) {
                            table.insert(next, Back::One(i as u32));
                        }
                    }
                }
            }
            NiceKind::Forget(v) => {
                let child_bag = &ntd.node(node.children[0]).bag;
                let pos = child_bag.binary_search(&v).expect("forgotten vertex is in the child bag");
                for (i, sig) in kids[0].iter() {
                    let mut next = sig.clone();
                    next.remove(pos);
                    let classes = canonicalize(&mut next);
                    if all_stable(checks, &next, classes) {
                        table.insert(next, Back::One(i as u32));
                    }
                }
            }
            NiceKind::Join => {
                for (i, sig) in kids[0].iter() {
                    if let Some(j) = kids[1].get_index_of(sig) {
                        if all_stable(checks, sig, class_count(sig)) {
                            table.insert(sig.clone(), Back::Two(i as u32, j as u32));
                        }
                    }
                }
            }
        }
        Ok(table)
    })?;

    let stats = stats_of(&ntd, &tables, k);
    if tables[ntd.root()].len() == 0 {
        return Ok((None, stats));
    }
    let labels = reconstruct(&ntd, &tables, instance.n(), |s: &Vec<u8>| s.as_slice());
    let partition = Partition::from_labels(&labels);
    debug_assert!(first_deviation_labels(instance, partition.labels()).is_none());
    Ok((Some(partition), stats))
}

/// Convenience for reporting: the color class a deviation points at, 1-based.
pub fn deviation_color(witness: &DeviationWitness, k: usize) -> usize {
    match witness.target {
        DeviationTarget::Class(c) => c + 1,
        DeviationTarget::Singleton => k + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{heuristic_decompose, Heuristic};
    use crate::game::is_nash_stable;

    fn pair(a: Weight, b: Weight) -> AshgInstance {
        AshgInstance::new(2, [(0, 1, a), (1, 0, b)]).unwrap()
    }

    fn solve(g: &AshgInstance) -> Option<Partition> {
        let td = heuristic_decompose(g, Heuristic::MinDegree);
        solve_nash_via_coloring(g, &td, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn stable_coloring_examples() {
        let friends = pair(1, 1);
        assert!(is_stable_coloring(&friends, &Coloring::new(vec![1, 1], 2).unwrap()).unwrap());
        let w = coloring_deviation(&friends, &Coloring::new(vec![1, 2], 2).unwrap()).unwrap().unwrap();
        assert_eq!((w.vertex, w.target, w.target_utility), (0, DeviationTarget::Class(1), 1));
        assert_eq!(deviation_color(&w, 2), 2);

        let stalker = pair(1, -1);
        for a in 1..=2 {
            for b in 1..=2 {
                assert!(!is_stable_coloring(&stalker, &Coloring::new(vec![a, b], 2).unwrap()).unwrap());
            }
        }
        let w = coloring_deviation(&stalker, &Coloring::new(vec![1, 1], 2).unwrap()).unwrap().unwrap();
        assert_eq!(deviation_color(&w, 2), 3);
    }

    #[test]
    fn coloring_rejects_bad_input() {
        assert_eq!(Coloring::new(vec![1, 3], 2), Err(Error::ColorOutOfRange { color: 3, k: 2 }));
        assert!(Coloring::new(vec![0], 2).is_err());
        let c = Coloring::new(vec![1], 1).unwrap();
        assert!(is_stable_coloring(&pair(1, 1), &c).is_err());
    }

    #[test]
    fn choose_k_examples() {
        assert_eq!(choose_k(2, 2), 4);
        assert_eq!(choose_k(1, 0), 1);
        assert_eq!(choose_k(3, 4), 12);
    }

    #[test]
    fn coloring_to_partition_examples() {
        let p = coloring_to_partition(&Coloring::new(vec![1, 1], 1).unwrap());
        assert_eq!(p, Partition::grand(2));
        let p = coloring_to_partition(&Coloring::new(vec![1, 2], 2).unwrap());
        assert_eq!(p, Partition::singletons(2));
        let p = coloring_to_partition(&Coloring::new(vec![1, 2, 1], 2).unwrap());
        assert_eq!(p.coalitions(), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn solver_small_cases() {
        assert_eq!(solve(&pair(1, -1)), None);
        let p = solve(&pair(1, 1)).unwrap();
        assert!(is_nash_stable(&pair(1, 1), &p).unwrap());
        assert_eq!(p, Partition::grand(2));

        let path = AshgInstance::new(6, (0..5).flat_map(|i| [(i, i + 1, 1), (i + 1, i, 1)])).unwrap();
        let p = solve(&path).unwrap();
        assert!(is_nash_stable(&path, &p).unwrap());

        assert_eq!(solve(&AshgInstance::empty(0)), Some(Partition::singletons(0)));
        let p = solve(&AshgInstance::empty(3)).unwrap();
        assert!(is_nash_stable(&AshgInstance::empty(3), &p).unwrap());
    }

    #[test]
    fn stalker_inside_larger_graph_is_none() {
        // the stalker pair is a component, so nothing else can rescue it
        let g = AshgInstance::new(5, [(0, 1, 1), (1, 0, -1), (2, 3, 2), (3, 4, 1), (4, 2, 1)]).unwrap();
        assert_eq!(solve(&g), None);
    }

    #[test]
    fn invalid_decomposition_is_an_error() {
        let g = pair(1, 1);
        let td = TreeDecomposition::new(vec![vec![0], vec![1]], vec![(0, 1)]);
        assert!(matches!(
            solve_nash_via_coloring(&g, &td, &SolverConfig::default()),
            Err(Error::InvalidDecomposition(_))
        ));
    }

    #[test]
    fn cap_is_reported() {
        let path = AshgInstance::new(6, (0..5).flat_map(|i| [(i, i + 1, 1), (i + 1, i, 1)])).unwrap();
        let td = heuristic_decompose(&path, Heuristic::MinDegree);
        let cfg = SolverConfig::default().with_cap(2);
        assert_eq!(solve_nash_via_coloring(&path, &td, &cfg), Err(Error::ResourceLimit { cap: 2 }));
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = AshgInstance::new(
            7,
            [
                (0, 1, 2),
                (1, 0, 1),
                (0, 2, -1),
                (2, 0, 3),
                (0, 3, 1),
                (3, 4, -2),
                (4, 3, 2),
                (2, 5, 1),
                (5, 6, 1),
                (6, 5, 1),
            ],
        )
        .unwrap();
        let td = heuristic_decompose(&g, Heuristic::MinFill);
        let seq = solve_nash_via_coloring_with_stats(&g, &td, &SolverConfig::sequential()).unwrap();
        let par = solve_nash_via_coloring_with_stats(&g, &td, &SolverConfig::parallel()).unwrap();
        assert_eq!(seq, par);
    }
}
