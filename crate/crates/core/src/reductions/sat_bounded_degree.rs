//! 3-SAT to Nash stability with constant degree and weights in
//! `{-2, -1, 1, 2}`, pathwidth `O(n / log n)`.
//!
//! With `n` padded to a power of four, there are `√n` palette paths and
//! `⌊2n / log n⌋ + 1` selection paths, all of length `m + n`. Selection path
//! `i` encodes `(log n) / 2` variables by the palette path it joins.

use std::fmt;

use super::cnf::CnfFormula;
use super::{GadgetBuilder, RoleClass};
use crate::error::Result;
use crate::game::{AshgInstance, Partition, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BdRole {
    PalettePath { i: usize, j: usize },
    SelectionPath { i: usize, j: usize },
    ConsistencyA { j: usize },
    ConsistencyB { j: usize },
    Indegree { j: usize, alpha: usize, beta: usize },
    Checker { j: usize, alpha: usize, i: usize },
    Or { j: usize, k: usize },
    OrPrime { j: usize, k: usize },
    OrDoublePrime { j: usize, k: usize },
}

impl BdRole {
    pub fn class(&self) -> RoleClass {
        match self {
            BdRole::PalettePath { .. } => RoleClass::Palette,
            BdRole::SelectionPath { .. } => RoleClass::Selection,
            BdRole::ConsistencyA { .. } | BdRole::ConsistencyB { .. } => RoleClass::Consistency,
            _ => RoleClass::Clause,
        }
    }
}

impl fmt::Display for BdRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BdRole::PalettePath { i, j } => write!(f, "palette p({i},{j})"),
            BdRole::SelectionPath { i, j } => write!(f, "selection u({i},{j})"),
            BdRole::ConsistencyA { j } => write!(f, "consistency a({j})"),
            BdRole::ConsistencyB { j } => write!(f, "consistency b({j})"),
            BdRole::Indegree { j, alpha, beta } => write!(f, "clause l({j},{alpha},{beta})"),
            BdRole::Checker { j, alpha, i } => write!(f, "clause c({j},{alpha},{i})"),
            BdRole::Or { j, k } => write!(f, "clause r({j},{k})"),
            BdRole::OrPrime { j, k } => write!(f, "clause r'({j},{k})"),
            BdRole::OrDoublePrime { j, k } => write!(f, "clause r''({j},{k})"),
        }
    }
}

/// Variable `x_k` is bit `bit` of the palette index joined by selection
/// path `path`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BdSlot {
    pub path: usize,
    pub bit: usize,
}

#[derive(Clone, Debug)]
pub struct BoundedDegreeReduction {
    pub instance: AshgInstance,
    pub roles: Vec<BdRole>,
    /// `encoding[k]` is the slot of `x_k`, dummy variables included.
    pub encoding: Vec<BdSlot>,
    /// Variable count after padding to a power of four.
    pub padded_vars: usize,
    pub palette_paths: usize,
    pub selection_paths: usize,
    pub path_length: usize,
}

struct ClauseLayout {
    /// `indegree[alpha][beta]`
    indegree: [Vec<Vertex>; 3],
    /// `(alpha, palette index, vertex)` in creation order; entry `t` is
    /// wired to `or[t]`.
    checkers: Vec<(usize, usize, Vertex)>,
    /// `(r_k, r_k', r_k'')`
    or: Vec<(Vertex, Vertex, Vertex)>,
}

struct Layout {
    half: usize,
    palette: Vec<Vec<Vertex>>,
    selection: Vec<Vec<Vertex>>,
    /// `(i, a_j, b_j)`; `a_j` likes palette path `i`.
    consistency: Vec<(usize, Vertex, Vertex)>,
    clauses: Vec<ClauseLayout>,
}

impl Layout {
    fn slot(&self, k: usize) -> BdSlot {
        BdSlot { path: k / self.half, bit: k % self.half }
    }

    fn row_of(&self, path: usize, assignment: &[bool]) -> usize {
        let first = path * self.half;
        (0..self.half).filter(|&b| assignment.get(first + b).copied().unwrap_or(false)).map(|b| 1 << b).sum()
    }
}

fn padded(n: usize) -> usize {
    let mut p = 4;
    while p < n {
        p *= 4;
    }
    p
}

fn build(phi: &CnfFormula) -> Result<(BoundedDegreeReduction, Layout)> {
    let nn = padded(phi.num_vars());
    let log_n = nn.trailing_zeros() as usize;
    let half = log_n / 2;
    let s = 1usize << half;
    let sel_paths = 2 * nn / log_n + 1;
    let m = phi.num_clauses();
    let len = m + nn;

    let mut b = GadgetBuilder::new();
    let path = |b: &mut GadgetBuilder<BdRole>, role: &dyn Fn(usize) -> BdRole| -> Vec<Vertex> {
        let vs: Vec<Vertex> = (1..=len).map(|j| b.vertex(role(j))).collect();
        for w in vs.windows(2) {
            b.arc(w[1], w[0], 1);
        }
        vs
    };
    let palette: Vec<Vec<Vertex>> = (0..s).map(|i| path(&mut b, &|j| BdRole::PalettePath { i, j })).collect();
    let selection: Vec<Vec<Vertex>> =
        (0..sel_paths).map(|i| path(&mut b, &|j| BdRole::SelectionPath { i, j })).collect();

    let mut consistency = Vec::new();
    let pairs = (0..s).flat_map(|i| (i + 1..s).map(move |i2| (i, i2)));
    for ((i, i2), j) in pairs.zip(m + 1..m + nn) {
        let a = b.vertex(BdRole::ConsistencyA { j });
        let bb = b.vertex(BdRole::ConsistencyB { j });
        let (pi, pi2) = (palette[i][j - 1], palette[i2][j - 1]);
        b.arc(a, pi, 1);
        b.arc(a, pi2, -1);
        b.arc(a, bb, 1);
        b.arc(bb, a, -1);
        b.arc(bb, pi, -1);
        b.arc(bb, pi2, -1);
        consistency.push((i, a, bb));
    }

    let mut layout = Layout { half, palette, selection, consistency, clauses: Vec::with_capacity(m) };

    for (j, clause) in (1..=m).zip(phi.clauses()) {
        let indegree = [1, 2, 3].map(|alpha| {
            let vs: Vec<Vertex> = (0..s).map(|beta| b.vertex(BdRole::Indegree { j, alpha, beta })).collect();
            for w in vs.windows(2) {
                b.arc(w[0], w[1], 1);
            }
            vs
        });
        let mut checkers = Vec::new();
        for (a, lit) in clause.iter().enumerate() {
            let slot = layout.slot(lit.var);
            b.arc(indegree[a][s - 1], layout.selection[slot.path][j - 1], 1);
            for i in (0..s).filter(|i| lit.satisfied_by(i >> slot.bit & 1 == 1)) {
                let c = b.vertex(BdRole::Checker { j, alpha: a + 1, i });
                b.arc(c, layout.palette[i][j - 1], 1);
                b.arc(c, indegree[a][i], 1);
                checkers.push((a, i, c));
            }
        }
        let or: Vec<(Vertex, Vertex, Vertex)> = (1..=checkers.len())
            .map(|k| {
                let r = b.vertex(BdRole::Or { j, k });
                let r1 = b.vertex(BdRole::OrPrime { j, k });
                let r2 = b.vertex(BdRole::OrDoublePrime { j, k });
                b.arc(r, r1, 1);
                b.arc(r, r2, -2);
                (r, r1, r2)
            })
            .collect();
        for w in or.windows(2) {
            b.arc(w[0].0, w[1].0, 2);
            b.arc(w[1].0, w[0].0, -1);
        }
        for (t, &(_, _, c)) in checkers.iter().enumerate() {
            let r = or[t].0;
            b.arc(r, c, if t == 0 { -2 } else { -1 });
            b.arc(c, r, 2);
        }
        layout.clauses.push(ClauseLayout { indegree, checkers, or });
    }

    let (instance, roles) = b.finish()?;
    let encoding = (0..nn).map(|k| layout.slot(k)).collect();
    let red = BoundedDegreeReduction {
        instance,
        roles,
        encoding,
        padded_vars: nn,
        palette_paths: s,
        selection_paths: sel_paths,
        path_length: len,
    };
    Ok((red, layout))
}

/// Builds the game for `phi`, padding the variable count to a power of four
/// (at least 4).
pub fn gen_sat_bounded_degree(phi: &CnfFormula) -> Result<BoundedDegreeReduction> {
    build(phi).map(|(r, _)| r)
}

/// The stable partition encoding a satisfying `assignment`; dummy variables
/// are set to false.
pub fn witness_sat_bounded_degree(phi: &CnfFormula, assignment: &[bool]) -> Result<Partition> {
    phi.check_assignment(assignment)?;
    let (red, layout) = build(phi)?;
    let mut label = vec![usize::MAX; red.instance.n()];
    // palette path i is coalition i; everything else is fresh
    let mut fresh = red.palette_paths;
    let mut new_label = || {
        fresh += 1;
        fresh - 1
    };

    for (i, path) in layout.palette.iter().enumerate() {
        for &v in path {
            label[v] = i;
        }
    }
    let rows: Vec<usize> = (0..red.selection_paths).map(|p| layout.row_of(p, assignment)).collect();
    for (path, &row) in layout.selection.iter().zip(&rows) {
        for &v in path {
            label[v] = row;
        }
    }
    for &(i, a, b) in &layout.consistency {
        label[a] = i;
        label[b] = new_label();
    }

    for (cl, clause) in layout.clauses.iter().zip(phi.clauses()) {
        for (a, lit) in clause.iter().enumerate() {
            let row = rows[layout.slot(lit.var).path];
            for &v in &cl.indegree[a] {
                label[v] = row;
            }
        }
        let alpha = clause.iter().position(|l| l.eval(assignment)).expect("assignment was checked");
        let row = rows[layout.slot(clause[alpha].var).path];
        let k0 = cl
            .checkers
            .iter()
            .position(|&(a, i, _)| a == alpha && i == row)
            .expect("a true literal has a checker for the row it sits in");

        let chain = new_label();
        for (t, &(r, r1, r2)) in cl.or.iter().enumerate() {
            if t <= k0 {
                label[r] = chain;
                label[r1] = chain;
            }
            if t < k0 || t + 1 == cl.or.len() {
                label[r2] = new_label();
            } else {
                // r''_t opens the coalition of r_{t+1}
                let next = new_label();
                label[r2] = next;
                label[cl.or[t + 1].0] = next;
                label[cl.or[t + 1].1] = next;
            }
        }
        for (t, &(_, _, c)) in cl.checkers.iter().enumerate() {
            label[c] = if t == k0 { row } else { label[cl.or[t].0] };
        }
    }

    debug_assert!(label.iter().all(|&l| l != usize::MAX));
    Ok(Partition::from_labels(&label))
}
