//! Batch experiment drivers: poset statistics on random torus filters,
//! transposition statistics on random straight-line homotopies, and the
//! oracle consistency check.
//!
//! All trials are seeded deterministically from the base seed, run in
//! parallel, and collected in input order, so every emitted CSV is
//! byte-identical across runs with the same configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::depth::{brute_force_depth_poset, depth_poset, poset_stats, ArcSet, StatsRow};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::homotopy::{run_homotopy, HomotopyConfig};
use crate::io::decimal_12;
use crate::random::{derive_seed, random_filter_pair, random_torus_filter};
use crate::reduction::{birth_relation, death_relation, ReductionState};
use crate::{ratio, Rational};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub d: usize,
    pub ns: Vec<usize>,
    pub repeats: u32,
    pub base_seed: u64,
    pub verify: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repeats < 1 {
            return Err(Error::Parse {
                kind: "config",
                line: 0,
                msg: "repeats must be at least 1".into(),
            });
        }
        if self.ns.iter().any(|&n| n < 2) {
            return Err(Error::NTooSmall(*self.ns.iter().min().unwrap()));
        }
        Ok(())
    }
}

const STATIC_HEADER: &str =
    "n,d,seed,relation,p,nodes,arcs_closure,arcs_reduction,components,min_nodes,max_nodes,height,cycles\n";
const STATIC_MEANS_HEADER: &str =
    "n,d,relation,p,nodes,arcs_closure,arcs_reduction,components,min_nodes,max_nodes,height,cycles\n";

fn stats_fields(row: &StatsRow) -> [i64; 8] {
    [
        row.nodes as i64,
        row.arcs_closure as i64,
        row.arcs_reduction as i64,
        row.components as i64,
        row.min_nodes as i64,
        row.max_nodes as i64,
        row.height as i64,
        row.cycles,
    ]
}

/// One static trial: all stats rows for the three relations of one filter.
fn static_trial(n: usize, d: usize, seed: u64) -> Result<Vec<(String, i32, [i64; 8])>> {
    let (complex, filter) = random_torus_filter(n, d, seed)?;
    let state = ReductionState::compute(&complex, filter.order_ref());
    let dr = death_relation(&state);
    let br = birth_relation(&state);
    let depth = crate::depth::depth_poset_from_state(&state);

    let mut rows = Vec::new();
    // The depth poset is its own closure, so its cycle count is taken over
    // the transitive reduction; the raw arc sets are used for DR and BR.
    for (name, rel, arcset) in [
        ("depth", &depth, ArcSet::Reduction),
        ("dr", &dr, ArcSet::AsGiven),
        ("br", &br, ArcSet::AsGiven),
    ] {
        let stats = poset_stats(rel, arcset)?;
        for (p, row) in &stats.per_degree {
            rows.push((name.to_string(), *p, stats_fields(row)));
        }
        rows.push((name.to_string(), i32::MAX, stats_fields(&stats.total)));
    }
    Ok(rows)
}

fn degree_label(p: i32) -> String {
    if p == i32::MAX {
        "total".to_string()
    } else {
        p.to_string()
    }
}

/// Runs the static experiment; returns `(raw_csv, means_csv)`.
pub fn experiment_static(config: &ExperimentConfig) -> Result<(String, String)> {
    config.validate()?;
    let d = config.d;
    let trials: Vec<(usize, u64)> = config
        .ns
        .iter()
        .flat_map(|&n| {
            (0..config.repeats)
                .map(move |rep| (n, derive_seed(config.base_seed, &[n as u64, rep as u64, 0])))
        })
        .collect();

    let results: Vec<Result<Vec<(String, i32, [i64; 8])>>> = trials
        .par_iter()
        .map(|&(n, seed)| static_trial(n, d, seed))
        .collect();

    let mut raw = String::from(STATIC_HEADER);
    // (n, relation, p) -> (sum per field, count)
    let mut sums: BTreeMap<(usize, String, i32), ([i64; 8], i64)> = BTreeMap::new();
    for (&(n, seed), result) in trials.iter().zip(results) {
        for (relation, p, fields) in result? {
            writeln!(
                raw,
                "{},{},{},{},{},{}",
                n,
                d,
                seed,
                relation,
                degree_label(p),
                fields.map(|v| v.to_string()).join(","),
            )
            .unwrap();
            let entry = sums
                .entry((n, relation, p))
                .or_insert(([0; 8], 0));
            for (acc, v) in entry.0.iter_mut().zip(fields) {
                *acc += v;
            }
            entry.1 += 1;
        }
    }

    let mut means = String::from(STATIC_MEANS_HEADER);
    for ((n, relation, p), (fields, count)) in &sums {
        let rendered: Vec<String> = fields
            .iter()
            .map(|&v| decimal_12(&(ratio(v, 1) / ratio(*count, 1))))
            .collect();
        writeln!(
            means,
            "{},{},{},{},{}",
            n,
            d,
            relation,
            degree_label(*p),
            rendered.join(",")
        )
        .unwrap();
    }
    Ok((raw, means))
}

const HOMOTOPY_HEADER: &str =
    "n,d,seed,dim_low,dim_high,case,switch,events,arcs_changed_closure,arcs_changed_reduction\n";
const HOMOTOPY_MEANS_HEADER: &str =
    "n,d,dim_low,dim_high,case,switch,mean_events_per_run,mean_arcs_closure_per_event,mean_arcs_reduction_per_event\n";

type HomotopyKey = (i32, i32, &'static str, &'static str);

fn homotopy_trial(
    n: usize,
    d: usize,
    seed: u64,
    verify: bool,
) -> Result<BTreeMap<HomotopyKey, (u64, u64, u64)>> {
    let (complex, f0, f1) = random_filter_pair(n, d, seed)?;
    let config = HomotopyConfig {
        verify,
        verify_deep: false,
        arc_deltas: true,
        trace: false,
    };
    let run = run_homotopy(&complex, &f0, &f1, &config)?;
    if !run.summary.violations.is_empty() {
        return Err(Error::MismatchFound(run.summary.violations.join("; ")));
    }
    let mut table: BTreeMap<HomotopyKey, (u64, u64, u64)> = BTreeMap::new();
    for e in &run.events {
        let key = (
            e.dim_low,
            e.dim_high,
            e.case_label.as_str(),
            e.switch_type.as_str(),
        );
        let entry = table.entry(key).or_insert((0, 0, 0));
        entry.0 += 1;
        entry.1 += e.arcs_changed_closure.unwrap_or(0) as u64;
        entry.2 += e.arcs_changed_reduction.unwrap_or(0) as u64;
    }
    Ok(table)
}

/// Runs the homotopy experiment; returns `(raw_csv, means_csv)`.
pub fn experiment_homotopy(config: &ExperimentConfig) -> Result<(String, String)> {
    config.validate()?;
    let d = config.d;
    let trials: Vec<(usize, u64)> = config
        .ns
        .iter()
        .flat_map(|&n| {
            (0..config.repeats)
                .map(move |rep| (n, derive_seed(config.base_seed, &[n as u64, rep as u64, 1])))
        })
        .collect();

    let results: Vec<Result<BTreeMap<HomotopyKey, (u64, u64, u64)>>> = trials
        .par_iter()
        .map(|&(n, seed)| homotopy_trial(n, d, seed, config.verify))
        .collect();

    let mut raw = String::from(HOMOTOPY_HEADER);
    let mut sums: BTreeMap<(usize, HomotopyKey), (u64, u64, u64, u64)> = BTreeMap::new();
    let mut runs_per_n: BTreeMap<usize, u64> = BTreeMap::new();
    for (&(n, seed), result) in trials.iter().zip(results) {
        *runs_per_n.entry(n).or_insert(0) += 1;
        for (key, (events, clo, red)) in result? {
            writeln!(
                raw,
                "{},{},{},{},{},{},{},{},{},{}",
                n, d, seed, key.0, key.1, key.2, key.3, events, clo, red
            )
            .unwrap();
            let entry = sums.entry((n, key)).or_insert((0, 0, 0, 0));
            entry.0 += events;
            entry.1 += clo;
            entry.2 += red;
            entry.3 += 1;
        }
    }

    let mut means = String::from(HOMOTOPY_MEANS_HEADER);
    for ((n, key), (events, clo, red, _)) in &sums {
        let runs = runs_per_n[n];
        let per_run = decimal_12(&(ratio(*events as i64, 1) / ratio(runs as i64, 1)));
        let per_event_clo = decimal_12(&(ratio(*clo as i64, 1) / ratio(*events as i64, 1)));
        let per_event_red = decimal_12(&(ratio(*red as i64, 1) / ratio(*events as i64, 1)));
        writeln!(
            means,
            "{},{},{},{},{},{},{},{},{}",
            n, d, key.0, key.1, key.2, key.3, per_run, per_event_clo, per_event_red
        )
        .unwrap();
    }
    Ok((raw, means))
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub checked: usize,
    pub skipped: Vec<String>,
    pub mismatches: Vec<String>,
}

/// Compares the matrix-reduction depth poset with the brute-force oracle on
/// random torus instances and the pillow fixture.
pub fn oracle_check(
    ns: &[usize],
    ds: &[usize],
    repeats: u32,
    base_seed: u64,
) -> Result<OracleReport> {
    let mut report = OracleReport::default();

    let mut instances: Vec<(usize, usize, u64)> = Vec::new();
    for &d in ds {
        for &n in ns {
            // The brute-force guard is 10 pairs; the torus has
            // (cells / 2) pairs since everything is paired.
            let cells = match d {
                1 => 2 * n + 2,
                2 => 4 * n * n + 4,
                3 => 8 * n * n * n + 8,
                _ => return Err(Error::UnsupportedDimension(d)),
            };
            if cells / 2 > crate::depth::BRUTE_FORCE_GUARD {
                report.skipped.push(format!(
                    "torus({n},{d}): {} pairs exceed the brute-force guard",
                    cells / 2
                ));
                continue;
            }
            for rep in 0..repeats {
                instances.push((n, d, derive_seed(base_seed, &[n as u64, rep as u64, 2])));
            }
        }
    }

    let outcomes: Vec<Result<Option<String>>> = instances
        .par_iter()
        .map(|&(n, d, seed)| {
            let (complex, filter) = random_torus_filter(n, d, seed)?;
            let fast = depth_poset(&complex, &filter);
            let brute = brute_force_depth_poset(&complex, &filter)?;
            if fast.normalized() == brute.normalized() {
                Ok(None)
            } else {
                Ok(Some(format!("torus({n},{d}) seed {seed}")))
            }
        })
        .collect();
    for outcome in outcomes {
        report.checked += 1;
        if let Some(m) = outcome? {
            report.mismatches.push(m);
        }
    }

    // The hand-built fixture, including its documented facts.
    let (complex, filter) = fixtures::pillow();
    let fast = depth_poset(&complex, &filter);
    let brute = brute_force_depth_poset(&complex, &filter)?;
    report.checked += 1;
    if fast.normalized() != brute.normalized() {
        report.mismatches.push("pillow fixture".to_string());
    }

    Ok(report)
}

/// Sample mean of a sequence of exact counts.
pub fn mean(counts: &[usize]) -> Rational {
    let sum: i64 = counts.iter().map(|&c| c as i64).sum();
    ratio(sum, counts.len() as i64)
}
