//! Property tests: structural invariants over random inputs.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use depthposet::depth::PairRelation;
use depthposet::random::{random_filter_on, SplitMix64};
use depthposet::reduction::{BirthDeathPair, ReductionState};
use depthposet::torus::cubical_torus;
use depthposet::{CellOrder, Filter, LefschetzComplex};

fn arb_dag() -> impl Strategy<Value = PairRelation> {
    // Random arcs oriented low -> high index are automatically acyclic.
    (2usize..12, proptest::collection::vec((0usize..12, 0usize..12), 0..40)).prop_map(
        |(n, raw)| {
            let nodes = (0..n)
                .map(|i| BirthDeathPair {
                    birth: 2 * i as u32,
                    death: (2 * i + 1) as u32,
                    degree: 0,
                })
                .collect();
            let arcs: BTreeSet<(usize, usize)> = raw
                .into_iter()
                .filter_map(|(a, b)| {
                    let (a, b) = (a % n, b % n);
                    (a != b).then(|| (a.min(b), a.max(b)))
                })
                .collect();
            PairRelation::new(nodes, arcs)
        },
    )
}

proptest! {
    #[test]
    fn closure_of_reduction_is_closure(rel in arb_dag()) {
        let closure = rel.transitive_closure().unwrap();
        let reduction = rel.transitive_reduction().unwrap();
        let reclosed = reduction.transitive_closure().unwrap();
        prop_assert_eq!(&reclosed.arcs, &closure.arcs);
        // The reduction is minimal: dropping any arc loses reachability.
        for &(u, w) in &reduction.arcs {
            let mut fewer = reduction.clone();
            fewer.arcs.remove(&(u, w));
            let smaller = fewer.transitive_closure().unwrap();
            prop_assert!(!smaller.arcs.contains(&(u, w)));
        }
    }

    #[test]
    fn closure_is_idempotent(rel in arb_dag()) {
        let once = rel.transitive_closure().unwrap();
        let twice = once.transitive_closure().unwrap();
        prop_assert_eq!(&once.arcs, &twice.arcs);
    }
}

/// Torus with extra cells stripped and a random subset of top cubes
/// removed; still a valid complex, now with essential cells.
fn random_subcomplex(n: usize, d: usize, seed: u64) -> (LefschetzComplex, Filter) {
    let torus = cubical_torus(n, d).unwrap();
    let mut rng = SplitMix64::new(seed);
    let mut cells = Vec::new();
    let mut facets = BTreeMap::new();
    for c in torus.iter_cells() {
        let id = torus.id(c).to_string();
        if id.starts_with('t') || id == "empty" {
            continue;
        }
        if torus.dim(c) == d as i32 && rng.next_u64() % 2 == 0 {
            continue;
        }
        let fs: BTreeSet<String> = torus
            .facets(c)
            .iter()
            .map(|&f| torus.id(f).to_string())
            .filter(|f| f != "empty")
            .collect();
        cells.push((id.clone(), torus.dim(c)));
        facets.insert(id, fs);
    }
    let complex = LefschetzComplex::build(&cells, &facets).unwrap();
    let filter = random_filter_on(&complex, rng.next_u64()).unwrap();
    (complex, filter)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cancellation_preserves_double_boundary(seed in 0u64..10_000) {
        let (complex, filter) = random_subcomplex(3, 2, seed);
        let order = filter.order();
        let shallow = complex.shallow_pairs(&order);
        if let Some(&(a, b)) = shallow.first() {
            let (next, _) = complex.cancel_shallow_pair(&order, a, b).unwrap();
            prop_assert!(next.validate().is_ok());
        }
    }

    #[test]
    fn cancellation_drops_exactly_the_canceled_pair(seed in 0u64..10_000) {
        let (complex, filter) = random_subcomplex(2, 2, seed);
        let order = filter.order();
        let state = ReductionState::compute(&complex, &order);
        let shallow = complex.shallow_pairs(&order);
        prop_assume!(!shallow.is_empty());
        let &(a, b) = shallow.last().unwrap();
        let (next, next_order) = complex.cancel_shallow_pair(&order, a, b).unwrap();
        let next_state = ReductionState::compute(&next, &next_order);

        let keyed = |cx: &LefschetzComplex, ps: &[BirthDeathPair]| -> BTreeSet<(String, String)> {
            ps.iter()
                .map(|p| (cx.id(p.birth).to_string(), cx.id(p.death).to_string()))
                .collect()
        };
        let mut expected = keyed(&complex, &state.pairs);
        expected.remove(&(complex.id(a).to_string(), complex.id(b).to_string()));
        prop_assert_eq!(keyed(&next, &next_state.pairs), expected);

        // Essential cells are untouched by a cancellation.
        let ess = |cx: &LefschetzComplex, cells: &[depthposet::CellIdx]| -> BTreeSet<String> {
            cells.iter().map(|&c| cx.id(c).to_string()).collect()
        };
        prop_assert_eq!(ess(&next, &next_state.essential), ess(&complex, &state.essential));
    }
}

/// Cancel every pair with pivot below `row` or left of `col`, following two
/// different shallow orders; the remaining complexes must be identical.
#[test]
fn prepared_complexes_are_order_independent() {
    for seed in 0..12u64 {
        let (complex, filter) = {
            let torus = cubical_torus(3, 2).unwrap();
            let filter = random_filter_on(&torus, seed).unwrap();
            (torus, filter)
        };
        let order = filter.order();
        let state = ReductionState::compute(&complex, &order);
        let m = order.len();
        let (row_cut, col_cut) = (m / 2, m / 3);

        let target: BTreeSet<(String, String)> = state
            .pairs
            .iter()
            .zip(&state.pair_positions)
            .filter(|(_, &(bp, dp))| bp > row_cut || dp < col_cut)
            .map(|(p, _)| {
                (
                    complex.id(p.birth).to_string(),
                    complex.id(p.death).to_string(),
                )
            })
            .collect();

        let prepare = |pick_last: bool| -> LefschetzComplex {
            let mut current = complex.clone();
            let mut ord: CellOrder = order.clone();
            let mut remaining = target.clone();
            while !remaining.is_empty() {
                let shallow = current.shallow_pairs(&ord);
                let candidates: Vec<_> = shallow
                    .into_iter()
                    .filter(|&(a, b)| {
                        remaining
                            .contains(&(current.id(a).to_string(), current.id(b).to_string()))
                    })
                    .collect();
                let &(a, b) = if pick_last {
                    candidates.last().expect("a target pair must be shallow")
                } else {
                    candidates.first().expect("a target pair must be shallow")
                };
                remaining.remove(&(current.id(a).to_string(), current.id(b).to_string()));
                let (c, o) = current.cancel_shallow_pair(&ord, a, b).unwrap();
                current = c;
                ord = o;
            }
            current
        };

        let first = prepare(false);
        let last = prepare(true);
        // Same cells and same incidence, regardless of cancellation order.
        let snapshot = |cx: &LefschetzComplex| -> BTreeSet<(String, Vec<String>)> {
            cx.iter_cells()
                .map(|c| {
                    (
                        cx.id(c).to_string(),
                        cx.facets(c).iter().map(|&f| cx.id(f).to_string()).collect(),
                    )
                })
                .collect()
        };
        assert_eq!(snapshot(&first), snapshot(&last), "seed {seed}");
    }
}

/// An incident vertex-edge pair on the 2-torus is shallow with probability
/// 1/8 (sample-mean check).
#[test]
fn vertex_edge_shallow_probability() {
    let n = 8usize;
    let complex = cubical_torus(n, 2).unwrap();
    let mut shallow_count = 0usize;
    let mut incident_count = 0usize;
    for seed in 0..50u64 {
        let filter = random_filter_on(&complex, seed).unwrap();
        let order = filter.order();
        for (a, b) in complex.shallow_pairs(&order) {
            if complex.dim(a) == 0 && complex.dim(b) == 1 {
                shallow_count += 1;
            }
        }
        incident_count += 4 * n * n;
    }
    let fraction = shallow_count as f64 / incident_count as f64;
    assert!(
        (fraction - 0.125).abs() < 0.015,
        "vertex-edge shallow fraction {fraction} is not near 1/8"
    );
}
