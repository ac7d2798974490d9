//! Scratch survey: how often does each update equation hold, and what do
//! the set differences look like when it does not (debugging aid).

use std::collections::BTreeMap;

use depthposet::homotopy::{run_homotopy, HomotopyConfig};
use depthposet::random::random_filter_pair;

fn main() {
    let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for seed in 0..12u64 {
        let (complex, f0, f1) = random_filter_pair(3, 2, seed).unwrap();
        let run = run_homotopy(
            &complex,
            &f0,
            &f1,
            &HomotopyConfig {
                verify: true,
                verify_deep: false,
                arc_deltas: false,
                trace: false,
            },
        )
        .unwrap();
        for v in &run.summary.violations {
            if let Some(idx) = v.find("equation failed: ") {
                let name = v[idx + "equation failed: ".len()..].to_string();
                tally.entry(name).or_insert((0, 0)).0 += 1;
            }
        }
        let _ = tally
            .entry(format!("(events seed {seed})"))
            .or_insert((run.summary.events, run.summary.switches));
    }
    for (name, (fails, _)) in &tally {
        println!("{fails:5}  {name}");
    }
}
