//! Instance generators for the hardness constructions, each paired with a
//! witness builder that turns a certificate of the source problem into a
//! Nash stable partition of the generated game.

pub mod bin_packing;
pub mod cnf;
pub mod sat_bounded_degree;
pub mod sat_high_degree;
pub mod three_partition;

use std::fmt;

pub use bin_packing::{gen_bin_packing, witness_bin_packing, BinPacking, BinPackingReduction};
pub use cnf::{CnfFormula, Literal};
pub use sat_bounded_degree::{gen_sat_bounded_degree, witness_sat_bounded_degree, BoundedDegreeReduction};
pub use sat_high_degree::{gen_sat_high_degree, witness_sat_high_degree, HighDegreeReduction};
pub use three_partition::{gen_three_partition_star, witness_three_partition, ThreePartition};

use crate::decomposition::square_graph;
use crate::error::Result;
use crate::game::{split_far_components, AshgInstance, Partition, Vertex, Weight};

/// Coarse gadget family of a generated vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RoleClass {
    Selection,
    Consistency,
    Clause,
    Palette,
}

impl fmt::Display for RoleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoleClass::Selection => "selection",
            RoleClass::Consistency => "consistency",
            RoleClass::Clause => "clause",
            RoleClass::Palette => "palette",
        })
    }
}

/// Adds a zero-weight arc pair between every two vertices at distance two.
/// Connected Nash stability of the result is equivalent to plain Nash
/// stability of the input.
pub fn square_zero_arcs(instance: &AshgInstance) -> AshgInstance {
    square_graph(instance)
}

/// Turns a Nash stable partition of `instance` into a connected Nash stable
/// partition of `square_zero_arcs(instance)`.
pub fn witness_square(instance: &AshgInstance, stable: &Partition) -> Result<Partition> {
    split_far_components(instance, stable)
}

/// Vertices are numbered in creation order; `roles[v]` describes vertex `v`.
pub(crate) struct GadgetBuilder<R> {
    roles: Vec<R>,
    arcs: Vec<(Vertex, Vertex, Weight)>,
}

impl<R> GadgetBuilder<R> {
    pub(crate) fn new() -> Self {
        GadgetBuilder { roles: Vec::new(), arcs: Vec::new() }
    }

    pub(crate) fn vertex(&mut self, role: R) -> Vertex {
        self.roles.push(role);
        self.roles.len() - 1
    }

    pub(crate) fn arc(&mut self, from: Vertex, to: Vertex, weight: Weight) {
        self.arcs.push((from, to, weight));
    }

    pub(crate) fn finish(self) -> Result<(AshgInstance, Vec<R>)> {
        let instance = AshgInstance::new(self.roles.len(), self.arcs)?;
        Ok((instance, self.roles))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{is_connected_partition, is_nash_stable};

    #[test]
    fn squaring_examples() {
        let path = AshgInstance::new(3, [(0, 1, 1), (1, 2, -1)]).unwrap();
        let sq = square_zero_arcs(&path);
        assert_eq!(sq.weight(0, 2), 0);
        assert!(sq.has_arc(0, 2) && sq.has_arc(2, 0));

        let k3 = AshgInstance::new(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        assert_eq!(square_zero_arcs(&k3), k3);

        let stalker = AshgInstance::new(3, [(0, 1, 1), (1, 0, -1)]).unwrap();
        assert_eq!(square_zero_arcs(&stalker), stalker);
    }

    #[test]
    fn square_witness_is_connected() {
        // 0 and 3 are far apart yet share a coalition
        let g = AshgInstance::new(5, [(0, 1, -1), (1, 2, -1), (2, 3, -1), (3, 4, -1)]).unwrap();
        let p = Partition::from_labels(&[0, 1, 2, 0, 1]);
        assert!(is_nash_stable(&g, &p).unwrap());
        let sq = square_zero_arcs(&g);
        assert!(!is_connected_partition(&sq, &p).unwrap());
        let w = witness_square(&g, &p).unwrap();
        assert!(is_nash_stable(&sq, &w).unwrap());
        assert!(is_connected_partition(&sq, &w).unwrap());
    }
}
