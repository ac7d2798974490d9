//! Lefschetz complexes: cells with a mod-2 facet relation between
//! consecutive dimensions.
//!
//! Cells are abstract; only the facet lists matter. Construction validates
//! dimensions and that the mod-2 boundary squares to zero. All operations
//! are pure: cancellation returns a new complex.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::filter::CellOrder;

/// Index of a cell inside one complex. Stable for the complex it came from.
pub type CellIdx = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
struct CellData {
    id: String,
    dim: i32,
}

/// A finite Lefschetz complex with Z/2 incidence between consecutive
/// dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LefschetzComplex {
    cells: Vec<CellData>,
    index: BTreeMap<String, CellIdx>,
    facets: Vec<Vec<CellIdx>>,
    cofacets: Vec<Vec<CellIdx>>,
}

impl LefschetzComplex {
    /// Builds and validates a complex from `(id, dim)` specs and per-cell
    /// facet sets. Facet lists are sets: even multiplicities cannot be
    /// encoded in the input, they only arise through cancellation.
    pub fn build(
        cell_specs: &[(String, i32)],
        facet_lists: &BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(cell_specs.len());
        let mut index = BTreeMap::new();
        for (id, dim) in cell_specs {
            if *dim < -1 {
                return Err(Error::DimensionMismatch {
                    facet: id.clone(),
                    facet_dim: *dim,
                    cofacet: id.clone(),
                    cofacet_dim: *dim,
                });
            }
            if index.insert(id.clone(), cells.len() as CellIdx).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
            cells.push(CellData {
                id: id.clone(),
                dim: *dim,
            });
        }
        let mut facets = vec![Vec::new(); cells.len()];
        for (id, list) in facet_lists {
            let &c = index.get(id).ok_or_else(|| Error::UnknownId(id.clone()))?;
            for fid in list {
                let &f = index.get(fid).ok_or_else(|| Error::UnknownId(fid.clone()))?;
                if cells[f as usize].dim != cells[c as usize].dim - 1 {
                    return Err(Error::DimensionMismatch {
                        facet: fid.clone(),
                        facet_dim: cells[f as usize].dim,
                        cofacet: id.clone(),
                        cofacet_dim: cells[c as usize].dim,
                    });
                }
                facets[c as usize].push(f);
            }
            facets[c as usize].sort_unstable();
            facets[c as usize].dedup();
        }
        let complex = Self::assemble(cells, index, facets);
        complex.check_boundary_squares_to_zero()?;
        Ok(complex)
    }

    fn assemble(
        cells: Vec<CellData>,
        index: BTreeMap<String, CellIdx>,
        facets: Vec<Vec<CellIdx>>,
    ) -> Self {
        let mut cofacets = vec![Vec::new(); cells.len()];
        for (c, list) in facets.iter().enumerate() {
            for &f in list {
                cofacets[f as usize].push(c as CellIdx);
            }
        }
        for list in &mut cofacets {
            list.sort_unstable();
        }
        LefschetzComplex {
            cells,
            index,
            facets,
            cofacets,
        }
    }

    fn check_boundary_squares_to_zero(&self) -> Result<()> {
        let mut counts: BTreeMap<CellIdx, u32> = BTreeMap::new();
        for c in 0..self.len() {
            counts.clear();
            for &f in &self.facets[c] {
                for &g in &self.facets[f as usize] {
                    *counts.entry(g).or_insert(0) += 1;
                }
            }
            if counts.values().any(|&n| n % 2 == 1) {
                return Err(Error::BoundaryNotSquaredZero(self.cells[c].id.clone()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn id(&self, c: CellIdx) -> &str {
        &self.cells[c as usize].id
    }

    pub fn dim(&self, c: CellIdx) -> i32 {
        self.cells[c as usize].dim
    }

    pub fn lookup(&self, id: &str) -> Result<CellIdx> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn facets(&self, c: CellIdx) -> &[CellIdx] {
        &self.facets[c as usize]
    }

    pub fn cofacets(&self, c: CellIdx) -> &[CellIdx] {
        &self.cofacets[c as usize]
    }

    pub fn is_facet(&self, f: CellIdx, c: CellIdx) -> bool {
        self.facets[c as usize].binary_search(&f).is_ok()
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = CellIdx> + '_ {
        0..self.len() as CellIdx
    }

    /// Number of (facet, cofacet) incidences.
    pub fn incidence_count(&self) -> usize {
        self.facets.iter().map(|l| l.len()).sum()
    }

    /// Re-checks that the mod-2 boundary squares to zero.
    pub fn validate(&self) -> Result<()> {
        self.check_boundary_squares_to_zero()
    }

    /// True iff `a` is the last facet of `b` and `b` is the first cofacet of
    /// `a` under `order`.
    pub fn is_shallow_pair(&self, order: &CellOrder, a: CellIdx, b: CellIdx) -> Result<bool> {
        if !self.is_facet(a, b) {
            return Err(Error::NotIncident(
                self.id(a).to_string(),
                self.id(b).to_string(),
            ));
        }
        let last_facet = self.facets[b as usize]
            .iter()
            .max_by_key(|&&f| order.position(f))
            .copied();
        let first_cofacet = self.cofacets[a as usize]
            .iter()
            .min_by_key(|&&c| order.position(c))
            .copied();
        Ok(last_facet == Some(a) && first_cofacet == Some(b))
    }

    /// All shallow pairs, sorted by the position of the death-giving cell.
    /// Nonempty whenever the incidence relation is nonempty.
    pub fn shallow_pairs(&self, order: &CellOrder) -> Vec<(CellIdx, CellIdx)> {
        let mut out = Vec::new();
        for b in self.iter_cells() {
            let last_facet = self.facets[b as usize]
                .iter()
                .max_by_key(|&&f| order.position(f))
                .copied();
            if let Some(a) = last_facet {
                let first_cofacet = self.cofacets[a as usize]
                    .iter()
                    .min_by_key(|&&c| order.position(c))
                    .copied();
                if first_cofacet == Some(b) {
                    out.push((a, b));
                }
            }
        }
        out.sort_by_key(|&(_, b)| order.position(b));
        out
    }

    /// Cancels the shallow pair `(a, b)`: removes both cells and toggles the
    /// incidence between every remaining facet of `b` and cofacet of `a`.
    /// Returns the new complex and the order with `a`, `b` deleted; cell ids
    /// survive, indices do not.
    pub fn cancel_shallow_pair(
        &self,
        order: &CellOrder,
        a: CellIdx,
        b: CellIdx,
    ) -> Result<(LefschetzComplex, CellOrder)> {
        if !self.is_shallow_pair(order, a, b)? {
            return Err(Error::NotShallow(
                self.id(a).to_string(),
                self.id(b).to_string(),
            ));
        }

        // Map old indices to new, skipping a and b.
        let mut remap = vec![u32::MAX; self.len()];
        let mut cells = Vec::with_capacity(self.len() - 2);
        let mut index = BTreeMap::new();
        for c in self.iter_cells() {
            if c == a || c == b {
                continue;
            }
            remap[c as usize] = cells.len() as CellIdx;
            index.insert(self.cells[c as usize].id.clone(), cells.len() as CellIdx);
            cells.push(self.cells[c as usize].clone());
        }

        let mut facet_sets: Vec<BTreeSet<CellIdx>> = Vec::with_capacity(cells.len());
        for c in self.iter_cells() {
            if c == a || c == b {
                continue;
            }
            let set: BTreeSet<CellIdx> = self.facets[c as usize]
                .iter()
                .filter(|&&f| f != a && f != b)
                .map(|&f| remap[f as usize])
                .collect();
            facet_sets.push(set);
        }
        for &p in self.facets[b as usize].iter().filter(|&&p| p != a) {
            for &q in self.cofacets[a as usize].iter().filter(|&&q| q != b) {
                let np = remap[p as usize];
                let nq = remap[q as usize] as usize;
                if !facet_sets[nq].remove(&np) {
                    facet_sets[nq].insert(np);
                }
            }
        }

        let facets: Vec<Vec<CellIdx>> = facet_sets
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let complex = Self::assemble(cells, index, facets);
        debug_assert!(complex.check_boundary_squares_to_zero().is_ok());

        let sequence: Vec<CellIdx> = order
            .iter()
            .filter(|&c| c != a && c != b)
            .map(|c| remap[c as usize])
            .collect();
        Ok((complex, CellOrder::from_sequence(sequence)))
    }
}
