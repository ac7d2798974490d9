//! Filters: injective rational cell maps that grow along the facet relation.

use std::collections::BTreeMap;

use crate::complex::{CellIdx, LefschetzComplex};
use crate::error::{Error, Result};
use crate::Rational;

/// A total order on the cells of one complex, as induced by a filter.
/// Always a linear extension of the facet relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellOrder {
    sequence: Vec<CellIdx>,
    position: Vec<u32>,
}

impl CellOrder {
    pub fn from_sequence(sequence: Vec<CellIdx>) -> Self {
        let mut position = vec![0; sequence.len()];
        for (p, &c) in sequence.iter().enumerate() {
            position[c as usize] = p as u32;
        }
        CellOrder { sequence, position }
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn cell_at(&self, pos: usize) -> CellIdx {
        self.sequence[pos]
    }

    pub fn position(&self, c: CellIdx) -> usize {
        self.position[c as usize] as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = CellIdx> + '_ {
        self.sequence.iter().copied()
    }

    /// Swaps the cells at positions `k` and `k + 1`.
    pub fn transpose(&mut self, k: usize) {
        let (a, b) = (self.sequence[k], self.sequence[k + 1]);
        self.sequence[k] = b;
        self.sequence[k + 1] = a;
        self.position[a as usize] = (k + 1) as u32;
        self.position[b as usize] = k as u32;
    }
}

/// An injective rational filter together with the cell order it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filter {
    values: Vec<Rational>,
    order: CellOrder,
}

impl Filter {
    /// Validates injectivity and monotonicity on the facet relation, then
    /// sorts the cells by value.
    pub fn new(complex: &LefschetzComplex, values: &BTreeMap<String, Rational>) -> Result<Self> {
        let mut by_idx = Vec::with_capacity(complex.len());
        for c in complex.iter_cells() {
            let v = values
                .get(complex.id(c))
                .ok_or_else(|| Error::MissingValue(complex.id(c).to_string()))?;
            by_idx.push(v.clone());
        }
        Self::from_values(complex, by_idx)
    }

    /// Like [`Filter::new`] but takes `(id, value)` pairs; handy in tests.
    pub fn from_pairs(complex: &LefschetzComplex, pairs: &[(&str, Rational)]) -> Result<Self> {
        let map: BTreeMap<String, Rational> = pairs
            .iter()
            .map(|(id, v)| (id.to_string(), v.clone()))
            .collect();
        Self::new(complex, &map)
    }

    /// Values indexed by cell index, in the complex's internal order.
    pub fn from_values(complex: &LefschetzComplex, values: Vec<Rational>) -> Result<Self> {
        assert_eq!(values.len(), complex.len());
        for c in complex.iter_cells() {
            for &f in complex.facets(c) {
                if values[f as usize] >= values[c as usize] {
                    return Err(Error::NotMonotone {
                        facet: complex.id(f).to_string(),
                        cofacet: complex.id(c).to_string(),
                    });
                }
            }
        }
        let mut sequence: Vec<CellIdx> = complex.iter_cells().collect();
        sequence.sort_by(|&a, &b| values[a as usize].cmp(&values[b as usize]));
        for pair in sequence.windows(2) {
            if values[pair[0] as usize] == values[pair[1] as usize] {
                return Err(Error::NotInjective(
                    complex.id(pair[0]).to_string(),
                    complex.id(pair[1]).to_string(),
                ));
            }
        }
        Ok(Filter {
            values,
            order: CellOrder::from_sequence(sequence),
        })
    }

    pub fn value(&self, c: CellIdx) -> &Rational {
        &self.values[c as usize]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn order(&self) -> CellOrder {
        self.order.clone()
    }

    pub fn order_ref(&self) -> &CellOrder {
        &self.order
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ratio;

    #[test]
    fn free_pair_orders_vertex_first() {
        let (complex, filter) = fixtures::free_pair();
        let order = filter.order();
        assert_eq!(complex.id(order.cell_at(0)), "v");
        assert_eq!(complex.id(order.cell_at(1)), "e");
    }

    #[test]
    fn non_monotone_is_rejected() {
        let (complex, _) = fixtures::free_pair();
        let result = Filter::from_pairs(&complex, &[("v", ratio(2, 1)), ("e", ratio(1, 1))]);
        match result {
            Err(Error::NotMonotone { facet, cofacet }) => {
                assert_eq!(facet, "v");
                assert_eq!(cofacet, "e");
            }
            other => panic!("expected NotMonotone, got {other:?}"),
        }
    }

    #[test]
    fn reversed_vertex_values_reverse_the_order() {
        let (complex, _) = fixtures::circle();
        let filter = Filter::from_pairs(
            &complex,
            &[
                ("u", ratio(1, 1)),
                ("v", ratio(0, 1)),
                ("e1", ratio(2, 1)),
                ("e2", ratio(3, 1)),
            ],
        )
        .unwrap();
        let ids: Vec<&str> = filter.order().iter().map(|c| complex.id(c)).collect();
        assert_eq!(ids, ["v", "u", "e1", "e2"]);
    }

    #[test]
    fn non_injective_is_rejected() {
        let (complex, _) = fixtures::circle();
        let result = Filter::from_pairs(
            &complex,
            &[
                ("u", ratio(0, 1)),
                ("v", ratio(0, 1)),
                ("e1", ratio(2, 1)),
                ("e2", ratio(3, 1)),
            ],
        );
        assert!(matches!(result, Err(Error::NotInjective(_, _))));
    }

    #[test]
    fn missing_value_is_rejected() {
        let (complex, _) = fixtures::free_pair();
        let result = Filter::from_pairs(&complex, &[("v", ratio(0, 1))]);
        assert!(matches!(result, Err(Error::MissingValue(_))));
    }

    #[test]
    fn order_is_a_linear_extension() {
        let (complex, filter) = fixtures::pillow();
        let order = filter.order();
        for c in complex.iter_cells() {
            for &f in complex.facets(c) {
                assert!(order.position(f) < order.position(c));
            }
        }
    }

    #[test]
    fn transpose_updates_positions() {
        let (_, filter) = fixtures::circle();
        let mut order = filter.order();
        let a = order.cell_at(1);
        let b = order.cell_at(2);
        order.transpose(1);
        assert_eq!(order.cell_at(1), b);
        assert_eq!(order.cell_at(2), a);
        assert_eq!(order.position(a), 2);
        assert_eq!(order.position(b), 1);
    }
}
