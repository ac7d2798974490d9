//! Small hand-built complexes used by tests, the CLI oracle check, and the
//! documentation.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::LefschetzComplex;
use crate::filter::Filter;
use crate::ratio;

fn build(
    cells: &[(&str, i32)],
    facets: &[(&str, &[&str])],
    values: &[(&str, i64)],
) -> (LefschetzComplex, Filter) {
    let specs: Vec<(String, i32)> = cells.iter().map(|(id, d)| (id.to_string(), *d)).collect();
    let mut lists = BTreeMap::new();
    for (id, fs) in facets {
        lists.insert(
            id.to_string(),
            fs.iter().map(|f| f.to_string()).collect::<BTreeSet<_>>(),
        );
    }
    let complex = LefschetzComplex::build(&specs, &lists).expect("fixture must be valid");
    let pairs: Vec<(&str, crate::Rational)> =
        values.iter().map(|(id, v)| (*id, ratio(*v, 1))).collect();
    let filter = Filter::from_pairs(&complex, &pairs).expect("fixture filter must be valid");
    (complex, filter)
}

/// A vertex and an edge attached to it once: the smallest shallow pair.
pub fn free_pair() -> (LefschetzComplex, Filter) {
    build(
        &[("v", 0), ("e", 1)],
        &[("e", &["v"])],
        &[("v", 0), ("e", 1)],
    )
}

/// Two vertices joined by two parallel edges, ordered (u, v, e1, e2).
pub fn circle() -> (LefschetzComplex, Filter) {
    build(
        &[("u", 0), ("v", 0), ("e1", 1), ("e2", 1)],
        &[("e1", &["u", "v"]), ("e2", &["u", "v"])],
        &[("u", 0), ("v", 1), ("e1", 2), ("e2", 3)],
    )
}

/// Two disjoint free pairs, interleaved as (v1, e1, v2, e2).
pub fn two_free_pairs() -> (LefschetzComplex, Filter) {
    build(
        &[("v1", 0), ("v2", 0), ("e1", 1), ("e2", 1)],
        &[("e1", &["v1"]), ("e2", &["v2"])],
        &[("v1", 0), ("e1", 1), ("v2", 2), ("e2", 3)],
    )
}

/// A path on three vertices, w - y - x - b - a by cell name, ordered
/// (w, a, x, y, b). Its two birth-death pairs (x, y) and (a, b) are nested
/// and comparable; transposing a and x makes them incomparable.
pub fn path3() -> (LefschetzComplex, Filter) {
    build(
        &[("w", 0), ("a", 0), ("x", 0), ("y", 1), ("b", 1)],
        &[("y", &["w", "x"]), ("b", &["a", "x"])],
        &[("w", 0), ("a", 1), ("x", 2), ("y", 3), ("b", 4)],
    )
}

/// The pillow complex: four vertices, five edges, three triangles, and one
/// 3-cell. Triangles `alpha` and `beta` have identical boundaries and are
/// capped by the 3-cell `sigma`; the third triangle `gamma` hangs off the
/// edge `d`.
///
/// With the filter below, the reduction pairs
/// `(A,a) (B,b) (C,c) (e,alpha) (d,gamma) (beta,sigma)` and leaves `D`
/// essential. The death and birth relations carry exactly one arc each,
/// `(B,b) -> (C,c)` and `(e,alpha) -> (d,gamma)`, so `(e,alpha)` is the sole
/// predecessor of `(d,gamma)` in the depth poset. Transposing the adjacent
/// edges `c` and `d` is a BD-type switch that produces the pairs `(C,d)` and
/// `(c,gamma)` and empties both relations.
pub fn pillow() -> (LefschetzComplex, Filter) {
    build(
        &[
            ("D", 0),
            ("A", 0),
            ("C", 0),
            ("B", 0),
            ("a", 1),
            ("b", 1),
            ("c", 1),
            ("d", 1),
            ("e", 1),
            ("alpha", 2),
            ("beta", 2),
            ("gamma", 2),
            ("sigma", 3),
        ],
        &[
            ("a", &["A", "D"]),
            ("b", &["B", "D"]),
            ("c", &["B", "C"]),
            ("d", &["C", "D"]),
            ("e", &["A", "C"]),
            ("alpha", &["a", "d", "e"]),
            ("beta", &["a", "d", "e"]),
            ("gamma", &["b", "c", "d"]),
            ("sigma", &["alpha", "beta"]),
        ],
        &[
            ("D", 0),
            ("A", 1),
            ("C", 2),
            ("B", 3),
            ("a", 4),
            ("b", 5),
            ("c", 6),
            ("d", 7),
            ("e", 8),
            ("alpha", 9),
            ("beta", 10),
            ("gamma", 11),
            ("sigma", 12),
        ],
    )
}

/// The pillow filter with the values of `c` and `d` exchanged, so the two
/// edges appear in the opposite order.
pub fn pillow_cd_transposed() -> (LefschetzComplex, Filter) {
    let (complex, _) = pillow();
    let filter = Filter::from_pairs(
        &complex,
        &[
            ("D", ratio(0, 1)),
            ("A", ratio(1, 1)),
            ("C", ratio(2, 1)),
            ("B", ratio(3, 1)),
            ("a", ratio(4, 1)),
            ("b", ratio(5, 1)),
            ("c", ratio(7, 1)),
            ("d", ratio(6, 1)),
            ("e", ratio(8, 1)),
            ("alpha", ratio(9, 1)),
            ("beta", ratio(10, 1)),
            ("gamma", ratio(11, 1)),
            ("sigma", ratio(12, 1)),
        ],
    )
    .expect("transposed pillow filter must be valid");
    (complex, filter)
}
