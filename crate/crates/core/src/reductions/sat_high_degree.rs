//! 3-SAT to Nash stability with degree `O(Δ)`, pathwidth
//! `O(n / (Δ log Δ))` and weights up to `4^Δ`.
//!
//! Selection vertices `u(i1, i2, j)` come in blocks `i1 ∈ 0..=I` with
//! `I = ⌈n / (Δ log Δ)⌉`; block `I` is the palette. A selection vertex
//! outside the palette encodes `log Δ` variables by the palette row it joins.

use std::fmt;

use super::cnf::CnfFormula;
use super::{GadgetBuilder, RoleClass};
use crate::error::{Error, Result};
use crate::game::{AshgInstance, Partition, Vertex, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HdRole {
    Selection { i1: usize, i2: usize, j: usize },
    Consistency { i1: usize, j: usize },
    ClauseHub { j: usize },
    ClauseHelper { j: usize },
    Literal { j: usize, alpha: usize },
    Palette,
    PaletteHelper,
}

impl HdRole {
    pub fn class(&self) -> RoleClass {
        match self {
            HdRole::Selection { .. } => RoleClass::Selection,
            HdRole::Consistency { .. } => RoleClass::Consistency,
            HdRole::ClauseHub { .. } | HdRole::ClauseHelper { .. } | HdRole::Literal { .. } => RoleClass::Clause,
            HdRole::Palette | HdRole::PaletteHelper => RoleClass::Palette,
        }
    }
}

impl fmt::Display for HdRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HdRole::Selection { i1, i2, j } => write!(f, "selection u({i1},{i2},{j})"),
            HdRole::Consistency { i1, j } => write!(f, "consistency c({i1},{j})"),
            HdRole::ClauseHub { j } => write!(f, "clause s({j})"),
            HdRole::ClauseHelper { j } => write!(f, "clause s'({j})"),
            HdRole::Literal { j, alpha } => write!(f, "clause l({j},{alpha})"),
            HdRole::Palette => write!(f, "palette p"),
            HdRole::PaletteHelper => write!(f, "palette p'"),
        }
    }
}

/// Where variable `x_k` lives: bit `i3` of the palette row joined by the
/// selection vertices `u(i1, i2, ·)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HdSlot {
    pub i1: usize,
    pub i2: usize,
    pub i3: usize,
}

#[derive(Clone, Debug)]
pub struct HighDegreeReduction {
    pub instance: AshgInstance,
    pub roles: Vec<HdRole>,
    /// `encoding[k]` is the slot of `x_k`.
    pub encoding: Vec<HdSlot>,
    /// The degree parameter after rounding up to a power of two.
    pub delta: usize,
    /// Index `I` of the palette block.
    pub palette_block: usize,
}

struct Layout {
    delta: usize,
    log_delta: usize,
    blocks: usize,
    m: usize,
    /// indexed by `(i1 * delta + i2) * m + (j - 1)`
    selection: Vec<Vertex>,
    clause: Vec<ClauseVertices>,
    palette: (Vertex, Vertex),
}

#[derive(Clone, Copy)]
struct ClauseVertices {
    hub: Vertex,
    helper: Vertex,
    literals: [Vertex; 3],
}

impl Layout {
    fn u(&self, i1: usize, i2: usize, j: usize) -> Vertex {
        self.selection[(i1 * self.delta + i2) * self.m + (j - 1)]
    }

    fn slot(&self, k: usize) -> HdSlot {
        let per_block = self.delta * self.log_delta;
        let i1 = k / per_block;
        let i2 = (k - i1 * per_block) / self.log_delta;
        HdSlot { i1, i2, i3: k - i1 * per_block - i2 * self.log_delta }
    }

    /// Row index whose bits spell the assignment of the variables in
    /// `u(i1, i2, ·)`; variables beyond `n` read as false.
    fn row_of(&self, i1: usize, i2: usize, assignment: &[bool]) -> usize {
        let first = (i1 * self.delta + i2) * self.log_delta;
        (0..self.log_delta).filter(|&b| assignment.get(first + b).copied().unwrap_or(false)).map(|b| 1 << b).sum()
    }
}

fn build(phi: &CnfFormula, delta: usize) -> Result<(HighDegreeReduction, Layout)> {
    if delta < 2 {
        return Err(Error::Precondition(format!("degree parameter must be at least 2, got {delta}")));
    }
    let delta = delta
        .checked_next_power_of_two()
        .ok_or_else(|| Error::Precondition(format!("degree parameter {delta} is too large")))?;
    let big = u32::try_from(delta)
        .ok()
        .and_then(|d| 4i64.checked_pow(d))
        .ok_or_else(|| Error::Precondition(format!("weight 4^{delta} exceeds the arithmetic guard")))?;
    let log_delta = delta.trailing_zeros() as usize;
    let n = phi.num_vars();
    let m = phi.num_clauses();
    let blocks = n.div_ceil(delta * log_delta);

    let mut b = GadgetBuilder::new();
    let mut selection = Vec::with_capacity((blocks + 1) * delta * m);
    for i1 in 0..=blocks {
        for i2 in 0..delta {
            for j in 1..=m {
                selection.push(b.vertex(HdRole::Selection { i1, i2, j }));
            }
        }
    }
    let mut layout = Layout { delta, log_delta, blocks, m, selection, clause: Vec::with_capacity(m), palette: (0, 0) };

    for i1 in 0..=blocks {
        for j in 1..m {
            let c = b.vertex(HdRole::Consistency { i1, j });
            for i2 in 0..delta {
                let w = 4i64.pow(i2 as u32);
                let (here, next) = (layout.u(i1, i2, j), layout.u(i1, i2, j + 1));
                b.arc(c, here, w);
                b.arc(c, next, -w);
                b.arc(here, c, -big);
                b.arc(next, c, -big);
            }
        }
    }

    for (j, clause) in (1..=m).zip(phi.clauses()) {
        let hub = b.vertex(HdRole::ClauseHub { j });
        let helper = b.vertex(HdRole::ClauseHelper { j });
        b.arc(hub, helper, 2);
        let literals = [1, 2, 3].map(|alpha| b.vertex(HdRole::Literal { j, alpha }));
        for (&l, lit) in literals.iter().zip(clause) {
            b.arc(l, hub, 2);
            b.arc(hub, l, -1);
            let slot = layout.slot(lit.var);
            b.arc(l, layout.u(slot.i1, slot.i2, j), 1);
            for row in 0..delta {
                let w: Weight = if lit.satisfied_by(row >> slot.i3 & 1 == 1) { 1 } else { 0 };
                b.arc(l, layout.u(blocks, row, j), w);
            }
        }
        layout.clause.push(ClauseVertices { hub, helper, literals });
    }

    let p = b.vertex(HdRole::Palette);
    let q = b.vertex(HdRole::PaletteHelper);
    b.arc(p, q, 1);
    b.arc(q, p, 1);
    if m > 0 {
        // palette anchors sit in column 1
        for row in 0..delta {
            let anchor = layout.u(blocks, row, 1);
            b.arc(p, anchor, 1);
            b.arc(anchor, p, -1);
        }
    }
    layout.palette = (p, q);

    let (instance, roles) = b.finish()?;
    let encoding = (0..n).map(|k| layout.slot(k)).collect();
    Ok((HighDegreeReduction { instance, roles, encoding, delta, palette_block: blocks }, layout))
}

/// Builds the game for `phi` with degree parameter `delta`, rounded up to a
/// power of two.
pub fn gen_sat_high_degree(phi: &CnfFormula, delta: usize) -> Result<HighDegreeReduction> {
    build(phi, delta).map(|(r, _)| r)
}

/// The stable partition encoding a satisfying `assignment`.
pub fn witness_sat_high_degree(phi: &CnfFormula, delta: usize, assignment: &[bool]) -> Result<Partition> {
    phi.check_assignment(assignment)?;
    let (red, layout) = build(phi, delta)?;
    let n = red.instance.n();
    let delta = layout.delta;
    let mut label = vec![usize::MAX; n];
    // rows are coalitions 0..Δ, the palette pair is Δ, the rest are fresh
    let mut fresh = delta + 1;

    for i1 in 0..=layout.blocks {
        for i2 in 0..delta {
            let row = if i1 == layout.blocks { i2 } else { layout.row_of(i1, i2, assignment) };
            for j in 1..=layout.m {
                label[layout.u(i1, i2, j)] = row;
            }
        }
    }
    label[layout.palette.0] = delta;
    label[layout.palette.1] = delta;

    for (j, (cv, clause)) in (1..=layout.m).zip(layout.clause.iter().zip(phi.clauses())) {
        let chosen = clause.iter().position(|l| l.eval(assignment)).expect("assignment was checked");
        let gadget = fresh;
        fresh += 1;
        label[cv.hub] = gadget;
        label[cv.helper] = gadget;
        for (alpha, &l) in cv.literals.iter().enumerate() {
            label[l] = if alpha == chosen {
                let slot = layout.slot(clause[alpha].var);
                label[layout.u(slot.i1, slot.i2, j)]
            } else {
                gadget
            };
        }
    }

    for l in label.iter_mut().filter(|l| **l == usize::MAX) {
        *l = fresh;
        fresh += 1;
    }
    Ok(Partition::from_labels(&label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_nash_stable;
    use crate::oracle::brute_force_nash_capped;
    use crate::reductions::cnf::Literal;

    fn count(red: &HighDegreeReduction, class: RoleClass) -> usize {
        red.roles.iter().filter(|r| r.class() == class).count()
    }

    #[test]
    fn single_variable_counts() {
        let phi = CnfFormula::new(1, [vec![Literal::pos(0)]]).unwrap();
        let red = gen_sat_high_degree(&phi, 2).unwrap();
        assert_eq!(count(&red, RoleClass::Selection), 4);
        assert_eq!(count(&red, RoleClass::Consistency), 0);
        assert_eq!(count(&red, RoleClass::Clause), 5);
        assert_eq!(count(&red, RoleClass::Palette), 2);
        assert_eq!(red.instance.max_abs_weight(), 2);
        let w = witness_sat_high_degree(&phi, 2, &[true]).unwrap();
        assert!(is_nash_stable(&red.instance, &w).unwrap());
    }

    #[test]
    fn consistency_weights_and_degree() {
        let phi = CnfFormula::new(2, [vec![Literal::pos(0), Literal::neg(1)], vec![Literal::pos(1)]]).unwrap();
        let red = gen_sat_high_degree(&phi, 2).unwrap();
        assert_eq!(red.instance.max_abs_weight(), 16);
        for (v, role) in red.roles.iter().enumerate() {
            if let HdRole::Consistency { .. } = role {
                assert_eq!(red.instance.out_arcs(v).len(), 4);
                let incoming = red.instance.arcs().iter().filter(|a| a.to == v).count();
                assert_eq!(incoming, 4);
            }
        }
        let w = witness_sat_high_degree(&phi, 2, &[true, true]).unwrap();
        assert!(is_nash_stable(&red.instance, &w).unwrap());
    }

    #[test]
    fn rounds_delta_up() {
        let phi = CnfFormula::new(3, [vec![Literal::pos(0), Literal::pos(1), Literal::neg(2)]]).unwrap();
        let red = gen_sat_high_degree(&phi, 3).unwrap();
        assert_eq!(red.delta, 4);
        assert_eq!(red.encoding[2], HdSlot { i1: 0, i2: 1, i3: 0 });
        let w = witness_sat_high_degree(&phi, 3, &[false, false, false]).unwrap();
        assert!(is_nash_stable(&red.instance, &w).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        let phi = CnfFormula::new(1, [vec![Literal::pos(0)]]).unwrap();
        assert!(gen_sat_high_degree(&phi, 1).is_err());
        assert!(gen_sat_high_degree(&phi, 64).is_err());
        assert_eq!(witness_sat_high_degree(&phi, 2, &[false]), Err(Error::UnsatisfiedClause(0)));
    }

    #[test]
    fn oracle_finds_stable_partition_on_micro_instance() {
        let phi = CnfFormula::new(1, [vec![Literal::pos(0)]]).unwrap();
        let red = gen_sat_high_degree(&phi, 2).unwrap();
        assert_eq!(red.instance.n(), 11);
        assert!(brute_force_nash_capped(&red.instance, 11).unwrap().is_some());
    }
}
