use super::TreeDecomposition;
use crate::error::Result;
use crate::game::{AshgInstance, Vertex};

/// The square of the underlying graph, realised by adding a pair of
/// zero-weight arcs between every two vertices at distance exactly two.
/// No utility changes.
pub fn square_graph(instance: &AshgInstance) -> AshgInstance {
    let mut extra: Vec<(Vertex, Vertex)> = Vec::new();
    for v in 0..instance.n() {
        let nbrs = instance.neighbors(v);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if !instance.adjacent(a, b) {
                    extra.push((a, b));
                }
            }
        }
    }
    extra.sort_unstable();
    extra.dedup();
    instance
        .with_added_arcs(extra.into_iter().flat_map(|(a, b)| [(a, b, 0), (b, a, 0)]))
        .expect("zero-weight arcs between non-adjacent vertices keep the instance valid")
}

/// Returns the squared instance and the decomposition obtained by adding
/// to each bag the neighbours of all its vertices. Bag sizes grow by at most
/// a factor of Δ + 1.
pub fn square_augment(instance: &AshgInstance, td: &TreeDecomposition) -> Result<(AshgInstance, TreeDecomposition)> {
    td.ensure_valid(instance)?;
    let bags = td
        .bags()
        .iter()
        .map(|bag| {
            let mut out = bag.clone();
            for &v in bag {
                out.extend_from_slice(instance.neighbors(v));
            }
            out
        })
        .collect();
    Ok((square_graph(instance), TreeDecomposition::new(bags, td.edges().to_vec())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{heuristic_decompose, Heuristic};
    use crate::game::{utility, Partition};

    #[test]
    fn path_gains_the_distance_two_edge() {
        let g = AshgInstance::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        let (g2, td2) = square_augment(&g, &td).unwrap();
        assert!(g2.has_arc(0, 2) && g2.has_arc(2, 0));
        assert_eq!(g2.weight(0, 2), 0);
        assert_eq!(td2.bags(), &[vec![0, 1, 2], vec![0, 1, 2]]);
        assert!(td2.is_valid(&g2));
    }

    #[test]
    fn single_vertex_unchanged() {
        let g = AshgInstance::empty(1);
        let td = TreeDecomposition::new(vec![vec![0]], vec![]);
        let (g2, td2) = square_augment(&g, &td).unwrap();
        assert_eq!(g2, g);
        assert_eq!(td2, td);
    }

    #[test]
    fn star_becomes_clique() {
        let g = AshgInstance::new(4, [(0, 1, 2), (2, 0, -1), (0, 3, 1)]).unwrap();
        let td = heuristic_decompose(&g, Heuristic::MinDegree);
        let (g2, td2) = square_augment(&g, &td).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                if u != v {
                    assert!(g2.adjacent(u, v));
                }
            }
        }
        for bag in td2.bags() {
            if bag.contains(&0) {
                assert_eq!(bag, &vec![0, 1, 2, 3]);
            }
        }
        assert!(td2.is_valid(&g2));
        let p = Partition::from_labels(&[0, 0, 1, 1]);
        for v in 0..4 {
            assert_eq!(utility(&g, &p, v).unwrap(), utility(&g2, &p, v).unwrap());
        }
    }

    #[test]
    fn invalid_decomposition_rejected() {
        let g = AshgInstance::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![]);
        assert!(square_augment(&g, &td).is_err());
    }
}
