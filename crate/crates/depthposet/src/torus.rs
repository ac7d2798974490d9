//! The cubical d-torus K(n, d): the unit-cube subdivision of (R/nZ)^d plus
//! 2^d extra cells that kill all homology.
//!
//! The extra cells are the empty set as the sole (-1)-cell (a facet of every
//! vertex) and, for every nonempty axis subset S, one (|S|+1)-cell whose
//! facets are the |S|-cubes of the coordinate sub-torus through the origin
//! spanned by S. Every cell of the result is paired under every filter.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::LefschetzComplex;
use crate::error::{Error, Result};

pub const EMPTY_CELL_ID: &str = "empty";

/// Cell id of a cube with the given anchor and spanned axes.
pub fn cube_id(anchor: &[usize], axes: u32) -> String {
    let coords: Vec<String> = anchor.iter().map(|c| c.to_string()).collect();
    let mut id = format!("c{}", coords.join("."));
    if axes != 0 {
        id.push('_');
        for i in 0..8 {
            if axes >> i & 1 == 1 {
                id.push((b'0' + i) as char);
            }
        }
    }
    id
}

/// Cell id of the extra cell capping the coordinate sub-torus spanned by
/// `axes`.
pub fn extra_id(axes: u32) -> String {
    let mut id = String::from("t");
    for i in 0..8 {
        if axes >> i & 1 == 1 {
            id.push((b'0' + i) as char);
        }
    }
    id
}

fn anchors(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * n);
        for a in &out {
            for c in 0..n {
                let mut b = a.clone();
                b.push(c);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Anchors restricted to the sub-torus spanned by `axes` (zero elsewhere).
fn sub_anchors(n: usize, d: usize, axes: u32) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; d]];
    for i in 0..d {
        if axes >> i & 1 == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * n);
        for a in &out {
            for c in 0..n {
                let mut b = a.clone();
                b[i] = c;
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Builds K(n, d) for d in {1, 2, 3} and n >= 2.
pub fn cubical_torus(n: usize, d: usize) -> Result<LefschetzComplex> {
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if n < 2 {
        return Err(Error::NTooSmall(n));
    }

    let mut subsets: Vec<u32> = (0..1u32 << d).collect();
    subsets.sort_by_key(|s| (s.count_ones(), extra_id(*s)));

    let mut cells: Vec<(String, i32)> = vec![(EMPTY_CELL_ID.to_string(), -1)];
    let mut facets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();

    for &axes in &subsets {
        let p = axes.count_ones() as i32;
        for anchor in anchors(n, d) {
            let id = cube_id(&anchor, axes);
            let mut fs = BTreeSet::new();
            if axes == 0 {
                fs.insert(EMPTY_CELL_ID.to_string());
            } else {
                for i in 0..d {
                    if axes >> i & 1 == 0 {
                        continue;
                    }
                    let sub = axes & !(1 << i);
                    fs.insert(cube_id(&anchor, sub));
                    let mut shifted = anchor.clone();
                    shifted[i] = (shifted[i] + 1) % n;
                    fs.insert(cube_id(&shifted, sub));
                }
            }
            cells.push((id.clone(), p));
            facets.insert(id, fs);
        }
    }

    for &axes in &subsets {
        if axes == 0 {
            continue;
        }
        let p = axes.count_ones() as i32;
        let id = extra_id(axes);
        let fs: BTreeSet<String> = sub_anchors(n, d, axes)
            .iter()
            .map(|a| cube_id(a, axes))
            .collect();
        cells.push((id.clone(), p + 1));
        facets.insert(id, fs);
    }

    LefschetzComplex::build(&cells, &facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts() {
        // 2 vertices + 2 edges + 2 extra cells
        assert_eq!(cubical_torus(2, 1).unwrap().len(), 6);
        // 16 vertices + 32 edges + 16 squares + 4 extra cells
        assert_eq!(cubical_torus(4, 2).unwrap().len(), 68);
        // 8 n^3 cubes + 8 extra cells
        assert_eq!(cubical_torus(2, 3).unwrap().len(), 8 * 8 + 8);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(cubical_torus(1, 1), Err(Error::NTooSmall(1))));
        assert!(matches!(
            cubical_torus(2, 4),
            Err(Error::UnsupportedDimension(4))
        ));
        assert!(matches!(
            cubical_torus(2, 0),
            Err(Error::UnsupportedDimension(0))
        ));
    }

    #[test]
    fn empty_cell_is_a_facet_of_every_vertex() {
        let t = cubical_torus(3, 2).unwrap();
        let empty = t.lookup(EMPTY_CELL_ID).unwrap();
        assert_eq!(t.dim(empty), -1);
        for c in t.iter_cells() {
            if t.dim(c) == 0 {
                assert_eq!(t.facets(c), &[empty]);
            }
        }
    }

    #[test]
    fn extra_cells_cap_their_sub_tori() {
        let t = cubical_torus(3, 2).unwrap();
        let full = t.lookup("t01").unwrap();
        assert_eq!(t.dim(full), 3);
        assert_eq!(t.facets(full).len(), 9); // all squares
        let loop0 = t.lookup("t0").unwrap();
        assert_eq!(t.dim(loop0), 2);
        assert_eq!(t.facets(loop0).len(), 3); // the axis-0 circle of edges
    }

    #[test]
    fn every_edge_has_two_distinct_vertices() {
        let t = cubical_torus(2, 2).unwrap();
        for c in t.iter_cells() {
            if t.dim(c) == 1 {
                assert_eq!(t.facets(c).len(), 2);
            }
        }
    }
}
