use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use depthposet::depth::{depth_poset_from_state, poset_stats, ArcSet};
use depthposet::experiments::{
    experiment_homotopy, experiment_static, oracle_check, ExperimentConfig,
};
use depthposet::homotopy::{run_homotopy, HomotopyConfig};
use depthposet::io;
use depthposet::random::random_filter_on;
use depthposet::reduction::ReductionState;
use depthposet::torus::cubical_torus;
use depthposet::{Error, LefschetzComplex};

/// Depth posets of filtered Lefschetz complexes.
#[derive(Parser)]
#[command(name = "depthposet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the cubical d-torus complex K(n, d) to a file.
    GenTorus {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a seeded random filter on K(n, d) to a file.
    GenFilter {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce a filtered complex; emit pairs and both relations as JSON.
    Reduce {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the depth poset; emit JSON, optional stats CSV and DOT.
    Depth {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Print a stats CSV (per degree and total) to stdout.
        #[arg(long)]
        stats: bool,
        /// Write the transitive reduction as a DOT digraph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Walk the straight-line homotopy between two filters.
    Homotopy {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        f0: PathBuf,
        #[arg(long)]
        f1: PathBuf,
        /// Events CSV output path.
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        verify: bool,
        /// Also evaluate case conditions on prepared complexes.
        #[arg(long)]
        verify_deep: bool,
        /// Vineyard trace CSV output path.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Depth poset statistics over random torus filters.
    StaticStats(StatsArgs),
    /// Transposition statistics over random straight-line homotopies.
    HomotopyStats(StatsArgs),
    /// Compare the depth poset against the brute-force oracle.
    OracleCheck {
        /// Grid sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        n: Vec<usize>,
        /// Torus dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        d: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        repeats: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct StatsArgs {
    /// Grid sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    repeats: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    verify: bool,
    /// Output directory for the raw and means CSV files.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

fn load_complex(path: &PathBuf) -> Result<LefschetzComplex, Error> {
    io::read_complex(&fs::read_to_string(path)?)
}

fn set_jobs(jobs: Option<usize>) {
    if let Some(jobs) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
}

fn run() -> Result<i32, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::GenTorus { n, d, out } => {
            let complex = cubical_torus(n, d)?;
            fs::write(out, io::write_complex(&complex))?;
        }
        Command::GenFilter { n, d, seed, out } => {
            let complex = cubical_torus(n, d)?;
            let filter = random_filter_on(&complex, seed)?;
            fs::write(out, io::write_filter(&complex, &filter))?;
        }
        Command::Reduce {
            complex,
            filter,
            out,
        } => {
            let complex = load_complex(&complex)?;
            let filter = io::read_filter(&complex, &fs::read_to_string(filter)?)?;
            let state = ReductionState::compute(&complex, filter.order_ref());
            let json = io::reduce_json(&complex, &state);
            fs::write(out, format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))?;
        }
        Command::Depth {
            complex,
            filter,
            out,
            stats,
            dot,
        } => {
            let complex = load_complex(&complex)?;
            let filter = io::read_filter(&complex, &fs::read_to_string(filter)?)?;
            let state = ReductionState::compute(&complex, filter.order_ref());
            let closure = depth_poset_from_state(&state);
            let reduction = closure.transitive_reduction()?;
            let json = io::depth_json(&complex, &closure, &reduction);
            fs::write(out, format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))?;
            if stats {
                let s = poset_stats(&closure, ArcSet::Reduction)?;
                println!("p,nodes,arcs_closure,arcs_reduction,components,min_nodes,max_nodes,height,cycles");
                for (p, row) in &s.per_degree {
                    println!(
                        "{},{},{},{},{},{},{},{},{}",
                        p,
                        row.nodes,
                        row.arcs_closure,
                        row.arcs_reduction,
                        row.components,
                        row.min_nodes,
                        row.max_nodes,
                        row.height,
                        row.cycles
                    );
                }
                let t = &s.total;
                println!(
                    "total,{},{},{},{},{},{},{},{}",
                    t.nodes,
                    t.arcs_closure,
                    t.arcs_reduction,
                    t.components,
                    t.min_nodes,
                    t.max_nodes,
                    t.height,
                    t.cycles
                );
            }
            if let Some(dot_path) = dot {
                fs::write(dot_path, io::dot_digraph(&complex, &reduction))?;
            }
        }
        Command::Homotopy {
            complex,
            f0,
            f1,
            events,
            verify,
            verify_deep,
            trace,
        } => {
            let complex = load_complex(&complex)?;
            let f0 = io::read_filter(&complex, &fs::read_to_string(f0)?)?;
            let f1 = io::read_filter(&complex, &fs::read_to_string(f1)?)?;
            let config = HomotopyConfig {
                verify: verify || verify_deep,
                verify_deep,
                arc_deltas: true,
                trace: trace.is_some(),
            };
            let run = run_homotopy(&complex, &f0, &f1, &config)?;
            fs::write(events, io::events_csv(&complex, &run.events))?;
            if let Some(trace_path) = trace {
                if let Some(t) = &run.trace {
                    fs::write(trace_path, io::trace_csv(&complex, t))?;
                }
            }
            eprintln!(
                "{} events, {} switches",
                run.summary.events, run.summary.switches
            );
            for d in &run.summary.divergences {
                eprintln!("divergence: {d}");
            }
            if !run.summary.violations.is_empty() {
                for v in &run.summary.violations {
                    eprintln!("violation: {v}");
                }
                return Ok(3);
            }
        }
        Command::StaticStats(args) => {
            set_jobs(args.jobs);
            let config = ExperimentConfig {
                d: args.d,
                ns: args.n.clone(),
                repeats: args.repeats,
                base_seed: args.seed,
                verify: args.verify,
            };
            let (raw, means) = experiment_static(&config)?;
            fs::create_dir_all(&args.out)?;
            fs::write(args.out.join("static_raw.csv"), raw)?;
            fs::write(args.out.join("static_means.csv"), means)?;
        }
        Command::HomotopyStats(args) => {
            set_jobs(args.jobs);
            let config = ExperimentConfig {
                d: args.d,
                ns: args.n.clone(),
                repeats: args.repeats,
                base_seed: args.seed,
                verify: args.verify,
            };
            let (raw, means) = experiment_homotopy(&config)?;
            fs::create_dir_all(&args.out)?;
            fs::write(args.out.join("homotopy_raw.csv"), raw)?;
            fs::write(args.out.join("homotopy_means.csv"), means)?;
        }
        Command::OracleCheck {
            n,
            d,
            repeats,
            seed,
            jobs,
        } => {
            set_jobs(jobs);
            let report = oracle_check(&n, &d, repeats, seed)?;
            println!("checked {} instances", report.checked);
            for s in &report.skipped {
                println!("skipped: {s}");
            }
            if !report.mismatches.is_empty() {
                for m in &report.mismatches {
                    eprintln!("mismatch: {m}");
                }
                return Ok(3);
            }
            println!("all instances agree with the brute-force oracle");
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(Error::MismatchFound(msg)) => {
            eprintln!("error: oracle mismatch: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
