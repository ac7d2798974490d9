//! Boundary-matrix reductions and the relations extracted from them.
//!
//! Three reductions of the same ordered mod-2 boundary matrix:
//!
//! * the standard left-to-right column reduction of persistent homology,
//! * a bottom-to-top column reduction that records its column additions in
//!   `U1`, and
//! * a left-to-right row reduction that records its row additions in `U2`.
//!
//! All three produce the same birth-death pairs. Off-diagonal entries of
//! `U1` between death cells are the arcs of the death relation; entries of
//! `U2` between birth cells are the arcs of the birth relation. The two
//! recorders satisfy `D = R1 * U1` and `D = U2 * R2` when deletions are
//! ignored, which is how they are tested.

use std::collections::BTreeSet;

use crate::complex::{CellIdx, LefschetzComplex};
use crate::depth::PairRelation;
use crate::error::{Error, Result};
use crate::filter::{CellOrder, Filter};
use crate::matrix::{Mod2Cols, Mod2Rows};
use crate::Rational;

/// A birth-death pair; `degree` is the dimension of the birth cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BirthDeathPair {
    pub birth: CellIdx,
    pub death: CellIdx,
    pub degree: i32,
}

/// The boundary matrix of a complex with rows and columns in filter order.
/// Strictly upper-triangular because facets precede cofacets.
#[derive(Clone, Debug)]
pub struct OrderedBoundaryMatrix {
    pub cols: Mod2Cols,
    pub dims: Vec<i32>,
    pub cells: Vec<CellIdx>,
}

impl OrderedBoundaryMatrix {
    pub fn new(complex: &LefschetzComplex, order: &CellOrder) -> Self {
        let m = order.len();
        assert_eq!(m, complex.len());
        let mut cols = Mod2Cols::zero(m);
        let mut dims = vec![0; m];
        let mut cells = vec![0; m];
        for pos in 0..m {
            let c = order.cell_at(pos);
            cells[pos] = c;
            dims[pos] = complex.dim(c);
            for &f in complex.facets(c) {
                let fp = order.position(f);
                debug_assert!(fp < pos, "facets must precede cofacets");
                cols.toggle(fp, pos);
            }
        }
        OrderedBoundaryMatrix { cols, dims, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Pairs and essential cells of a reduction, in matrix positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    /// `(birth position, death position)`, sorted by death position.
    pub pairs: Vec<(usize, usize)>,
    /// Positions that are neither a pivot row nor a pivot column.
    pub essential: Vec<usize>,
}

fn pairing_from_pivots(m: usize, mut pivots: Vec<(usize, usize)>) -> Pairing {
    pivots.sort_by_key(|&(_, d)| d);
    let mut in_pair = vec![false; m];
    for &(b, d) in &pivots {
        in_pair[b] = true;
        in_pair[d] = true;
    }
    Pairing {
        pairs: pivots,
        essential: (0..m).filter(|&p| !in_pair[p]).collect(),
    }
}

/// Classic left-to-right column reduction.
pub fn standard_reduce(delta: &OrderedBoundaryMatrix) -> Pairing {
    let m = delta.len();
    let mut r = delta.cols.clone();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; m];
    let mut pivots = Vec::new();
    for j in 0..m {
        while let Some(x) = r.col_low(j) {
            match pivot_of_row[x] {
                Some(k) => r.add_col(k, j),
                None => {
                    pivot_of_row[x] = Some(j);
                    pivots.push((x, j));
                    break;
                }
            }
        }
    }
    pairing_from_pivots(m, pivots)
}

/// Bottom-to-top column reduction. Processes the leftmost entry of the
/// lowest nonzero row, clears that row to the right while recording each
/// addition in `U1`, then masks the row and column out.
pub fn reduce_alg1(delta: &OrderedBoundaryMatrix) -> (Pairing, Mod2Cols) {
    let m = delta.len();
    let mut r1 = delta.cols.clone();
    let mut u1 = Mod2Cols::identity(m);
    let mut col_alive = vec![true; m];
    let mut lows: Vec<Option<usize>> = (0..m).map(|j| r1.col_low(j)).collect();
    let mut pivots = Vec::new();
    loop {
        let mut x = None;
        for j in 0..m {
            if col_alive[j] {
                if let Some(low) = lows[j] {
                    if x.map_or(true, |best| low > best) {
                        x = Some(low);
                    }
                }
            }
        }
        let Some(x) = x else { break };
        let y = (0..m)
            .find(|&j| col_alive[j] && lows[j] == Some(x))
            .expect("a column attains the lowest nonzero row");
        pivots.push((x, y));
        for b in y + 1..m {
            if col_alive[b] && r1.get(x, b) {
                r1.add_col(y, b);
                u1.toggle(y, b);
                lows[b] = r1.col_low(b);
            }
        }
        col_alive[y] = false;
    }
    (pairing_from_pivots(m, pivots), u1)
}

/// Left-to-right row reduction. Processes the lowest entry of the leftmost
/// nonzero column, clears that column upward while recording each addition
/// in `U2`, then masks the row and column out.
pub fn reduce_alg2(delta: &OrderedBoundaryMatrix) -> (Pairing, Mod2Rows) {
    let m = delta.len();
    let mut r2 = delta.cols.to_rows();
    let mut u2 = Mod2Rows::identity(m);
    let mut row_alive = vec![true; m];
    let mut firsts: Vec<Option<usize>> = (0..m).map(|i| r2.row_first(i)).collect();
    let mut pivots = Vec::new();
    loop {
        let mut y = None;
        for i in 0..m {
            if row_alive[i] {
                if let Some(first) = firsts[i] {
                    if y.map_or(true, |best| first < best) {
                        y = Some(first);
                    }
                }
            }
        }
        let Some(y) = y else { break };
        let x = (0..m)
            .rfind(|&i| row_alive[i] && firsts[i] == Some(y))
            .expect("a row attains the leftmost nonzero column");
        pivots.push((x, y));
        for a in 0..x {
            if row_alive[a] && r2.get(a, y) {
                r2.add_row(x, a);
                u2.toggle(a, x);
                firsts[a] = r2.row_first(a);
            }
        }
        row_alive[x] = false;
    }
    (pairing_from_pivots(m, pivots), u2)
}

/// Everything both reductions produce for one filter, plus position lookups.
#[derive(Clone, Debug)]
pub struct ReductionState {
    pub delta: OrderedBoundaryMatrix,
    pub pairs: Vec<BirthDeathPair>,
    /// `(birth position, death position)` per pair, aligned with `pairs`.
    pub pair_positions: Vec<(usize, usize)>,
    /// Essential cells, by cell index, in filter order.
    pub essential: Vec<CellIdx>,
    pub u1: Mod2Cols,
    pub u2: Mod2Rows,
    /// `pair_at[pos]` is the pair index the cell at `pos` belongs to.
    pair_at: Vec<Option<usize>>,
    /// True at positions holding a birth cell of some pair.
    is_birth: Vec<bool>,
    /// Position of each cell index in this state's order.
    pos_of: Vec<u32>,
    /// Retained final reduced matrices, when requested.
    pub r1_final: Option<Mod2Cols>,
    pub r2_final: Option<Mod2Rows>,
}

impl ReductionState {
    pub fn compute(complex: &LefschetzComplex, order: &CellOrder) -> Self {
        Self::compute_inner(complex, order, false)
    }

    /// Also retains the reduced matrices `R1`, `R2` for factorization checks.
    pub fn compute_retaining(complex: &LefschetzComplex, order: &CellOrder) -> Self {
        Self::compute_inner(complex, order, true)
    }

    fn compute_inner(complex: &LefschetzComplex, order: &CellOrder, retain: bool) -> Self {
        let delta = OrderedBoundaryMatrix::new(complex, order);
        let (pairing1, u1) = reduce_alg1(&delta);
        let (pairing2, u2) = reduce_alg2(&delta);
        assert_eq!(
            pairing1, pairing2,
            "column and row reductions must agree on the pairing"
        );
        let (r1_final, r2_final) = if retain {
            (
                Some(replay_r1(&delta, &pairing1)),
                Some(replay_r2(&delta, &pairing1)),
            )
        } else {
            (None, None)
        };

        let m = delta.len();
        let mut pair_at = vec![None; m];
        let mut is_birth = vec![false; m];
        let mut pairs = Vec::with_capacity(pairing1.pairs.len());
        for (i, &(b, d)) in pairing1.pairs.iter().enumerate() {
            pair_at[b] = Some(i);
            pair_at[d] = Some(i);
            is_birth[b] = true;
            pairs.push(BirthDeathPair {
                birth: delta.cells[b],
                death: delta.cells[d],
                degree: delta.dims[b],
            });
        }
        let essential = pairing1.essential.iter().map(|&p| delta.cells[p]).collect();
        let mut pos_of = vec![0u32; m];
        for (pos, &c) in delta.cells.iter().enumerate() {
            pos_of[c as usize] = pos as u32;
        }
        ReductionState {
            delta,
            pairs,
            pair_positions: pairing1.pairs,
            essential,
            u1,
            u2,
            pair_at,
            is_birth,
            pos_of,
            r1_final,
            r2_final,
        }
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    /// Pair index owning the cell at `pos`, if paired.
    pub fn pair_of_position(&self, pos: usize) -> Option<usize> {
        self.pair_at[pos]
    }

    /// Position of cell `c` in this state's order.
    pub fn position_of(&self, c: CellIdx) -> usize {
        self.pos_of[c as usize] as usize
    }

    pub fn cell_at(&self, pos: usize) -> CellIdx {
        self.delta.cells[pos]
    }

    pub fn dim_at(&self, pos: usize) -> i32 {
        self.delta.dims[pos]
    }

    pub fn is_birth_position(&self, pos: usize) -> bool {
        self.is_birth[pos]
    }

    pub fn is_death_position(&self, pos: usize) -> bool {
        self.pair_at[pos].is_some() && !self.is_birth[pos]
    }

    pub fn pair_set(&self) -> BTreeSet<BirthDeathPair> {
        self.pairs.iter().copied().collect()
    }

    pub fn find_pair(&self, birth: CellIdx, death: CellIdx) -> Option<usize> {
        self.pairs
            .iter()
            .position(|p| p.birth == birth && p.death == death)
    }
}

fn replay_r1(delta: &OrderedBoundaryMatrix, pairing: &Pairing) -> Mod2Cols {
    // R1 with deletions ignored: rerun the column additions on full size.
    let m = delta.len();
    let mut r1 = delta.cols.clone();
    let mut order: Vec<(usize, usize)> = pairing.pairs.clone();
    order.sort_by_key(|&(b, _)| std::cmp::Reverse(b));
    let mut col_alive = vec![true; m];
    for &(x, y) in &order {
        for b in y + 1..m {
            if col_alive[b] && r1.get(x, b) {
                r1.add_col(y, b);
            }
        }
        col_alive[y] = false;
    }
    r1
}

fn replay_r2(delta: &OrderedBoundaryMatrix, pairing: &Pairing) -> Mod2Rows {
    let m = delta.len();
    let mut r2 = delta.cols.to_rows();
    let mut order: Vec<(usize, usize)> = pairing.pairs.clone();
    order.sort_by_key(|&(_, d)| d);
    let mut row_alive = vec![true; m];
    for &(x, y) in &order {
        for a in 0..x {
            if row_alive[a] && r2.get(a, y) {
                r2.add_row(x, a);
            }
        }
        row_alive[x] = false;
    }
    r2
}

/// Arcs `((x,y),(a,b))` with `y != b` and `U1[y,b] = 1`, over pairs only.
pub fn death_relation(state: &ReductionState) -> PairRelation {
    let m = state.len();
    let mut arcs = BTreeSet::new();
    for b_pos in 0..m {
        let Some(target) = state.pair_at[b_pos] else {
            continue;
        };
        if state.is_birth[b_pos] {
            continue;
        }
        for y_pos in state.u1.col_ones(b_pos) {
            if y_pos == b_pos || !state.is_death_position(y_pos) {
                continue;
            }
            let source = state.pair_at[y_pos].unwrap();
            arcs.insert((source, target));
        }
    }
    PairRelation::new(state.pairs.clone(), arcs)
}

/// Arcs `((x,y),(a,b))` with `x != a` and `U2[a,x] = 1`, over pairs only.
pub fn birth_relation(state: &ReductionState) -> PairRelation {
    let m = state.len();
    let mut arcs = BTreeSet::new();
    for a_pos in 0..m {
        let Some(target) = state.pair_at[a_pos] else {
            continue;
        };
        if !state.is_birth[a_pos] {
            continue;
        }
        for x_pos in state.u2.row_ones(a_pos) {
            if x_pos == a_pos || !state.is_birth[x_pos] || state.pair_at[x_pos].is_none() {
                continue;
            }
            let source = state.pair_at[x_pos].unwrap();
            arcs.insert((source, target));
        }
    }
    PairRelation::new(state.pairs.clone(), arcs)
}

/// Predecessor and successor sets of one pair in the death and birth
/// relations, as pair indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredSucc {
    pub pred1: BTreeSet<usize>,
    pub pred2: BTreeSet<usize>,
    pub succ1: BTreeSet<usize>,
    pub succ2: BTreeSet<usize>,
}

/// Reads the four sets of `psi` from column/row `b` of `U1` and row/column
/// `a` of `U2`, excluding the diagonal and anything that is not a pair.
pub fn pred_succ_sets(state: &ReductionState, psi: usize) -> Result<PredSucc> {
    let &(a_pos, b_pos) = state
        .pair_positions
        .get(psi)
        .ok_or_else(|| Error::UnknownPair(psi.to_string(), String::new()))?;
    let mut out = PredSucc::default();
    for y in state.u1.col_ones(b_pos) {
        if y != b_pos && state.is_death_position(y) {
            out.pred1.insert(state.pair_at[y].unwrap());
        }
    }
    for y in state.u1.row_ones(b_pos) {
        if y != b_pos && state.is_death_position(y) {
            out.succ1.insert(state.pair_at[y].unwrap());
        }
    }
    for x in state.u2.row_ones(a_pos) {
        if x != a_pos && state.is_birth[x] && state.pair_at[x].is_some() {
            out.pred2.insert(state.pair_at[x].unwrap());
        }
    }
    for x in state.u2.col_ones(a_pos) {
        if x != a_pos && state.is_birth[x] && state.pair_at[x].is_some() {
            out.succ2.insert(state.pair_at[x].unwrap());
        }
    }
    Ok(out)
}

/// The degree-`p` persistence diagram: one `(f(birth), f(death))` point per
/// degree-`p` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistenceDiagram {
    pub degree: i32,
    pub points: Vec<(Rational, Rational)>,
}

pub fn persistence_diagram(
    state: &ReductionState,
    filter: &Filter,
    degree: i32,
) -> PersistenceDiagram {
    let mut points: Vec<(Rational, Rational)> = state
        .pairs
        .iter()
        .filter(|p| p.degree == degree)
        .map(|p| (filter.value(p.birth).clone(), filter.value(p.death).clone()))
        .collect();
    points.sort();
    PersistenceDiagram { degree, points }
}

/// Checks `D = R1 * U1` and `D = U2 * R2` exactly over Z/2; requires a
/// state computed with [`ReductionState::compute_retaining`].
pub fn factorization_holds(state: &ReductionState) -> bool {
    let Some(r1) = &state.r1_final else {
        return false;
    };
    let Some(r2) = &state.r2_final else {
        return false;
    };
    let lhs1 = r1.multiply(&state.u1);
    if lhs1 != state.delta.cols {
        return false;
    }
    let lhs2 = state.u2.multiply(r2);
    lhs2.to_cols() == state.delta.cols
}
