use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand};
use qaccel_core::cqasm::parse;
use qaccel_core::genomics::{align, AlignmentInstance, Diffusion, GenomicsError, OracleMode};
use qaccel_core::mapper::{build_topology, map_circuit, PlacementStrategy, TopologyKind};
use qaccel_harness::bench::{self, BenchResult, SkipMode, DEFAULT_DEPTHS, DEPTH_KINDS};
use qaccel_harness::record::{RunConfig, RunRecord, DEFAULT_SHOTS, DEFAULT_TOP_K};
use qaccel_harness::run::{cli_run, RunError};
use qaccel_harness::store::{Filter, Store, DEFAULT_STORE, STORE_ENV};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uuid::Uuid;

#[derive(Parser)]
#[command(name = "qaccel", version, about = "Quantum accelerator toolchain: simulate, map, align, benchmark")]
struct Cli {
    /// JSON-lines run store.
    #[arg(long, global = true, env = STORE_ENV, default_value = DEFAULT_STORE)]
    store: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a cQASM file and append a run record to the store.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Depolarizing probability per operand after each gate.
        #[arg(long)]
        noise_p: Option<f64>,
        /// Device topology, e.g. `line:4`, `ring:5`, `grid:2x3`, `full:3`.
        #[arg(long)]
        topology: Option<TopologyKind>,
        #[arg(long, default_value = "identity")]
        placement: PlacementStrategy,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        /// Comma-separated bitstrings counted as success; defaults to the
        /// support of the ideal output.
        #[arg(long, value_delimiter = ',')]
        success: Option<Vec<String>>,
        /// Print the full record as JSON.
        #[arg(long)]
        json: bool,
        /// Skip appending to the store.
        #[arg(long)]
        no_store: bool,
    },
    /// Map a cQASM file onto a topology and print the routed program.
    Map {
        file: PathBuf,
        #[arg(long)]
        topology: TopologyKind,
        #[arg(long, default_value = "identity")]
        placement: PlacementStrategy,
    },
    /// Align a read against a reference with the Grover search circuit.
    Align {
        reference: String,
        read: String,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        #[arg(long, default_value = "joint")]
        diffusion: Diffusion,
        /// `exact`, `auto` or a Hamming threshold.
        #[arg(long, default_value = "exact")]
        oracle: OracleMode,
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also print the generated cQASM.
        #[arg(long)]
        emit: bool,
    },
    /// Timing suites; CSV files go to `--out-dir`.
    Bench {
        #[command(subcommand)]
        suite: BenchSuite,
        #[arg(long, global = true, default_value = "bench-out")]
        out_dir: PathBuf,
    },
    /// Inspect the run store.
    Metrics {
        #[command(subcommand)]
        action: MetricsAction,
    },
}

#[derive(Subcommand)]
enum BenchSuite {
    /// Per-gate application time.
    Gates,
    /// EPR-chain time against register size.
    Qubits {
        #[arg(long, default_value_t = 10)]
        n_min: usize,
        #[arg(long, default_value_t = 22)]
        n_max: usize,
        #[arg(long, default_value = "both")]
        skip: SkipMode,
    },
    /// Two-qubit circuit time against gate count.
    Depth {
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
    },
}

#[derive(Subcommand)]
enum MetricsAction {
    /// Print matching records as JSON lines.
    Query {
        #[arg(long)]
        run_id: Option<Uuid>,
        #[arg(long)]
        circuit_hash: Option<String>,
        /// RFC 3339 lower bound on the timestamp.
        #[arg(long)]
        since: Option<DateTime<Utc>>,
        /// RFC 3339 upper bound on the timestamp.
        #[arg(long)]
        until: Option<DateTime<Utc>>,
    },
}

/// A failure with its exit status.
struct Failure(i32, String);

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

impl From<bench::BenchError> for Failure {
    fn from(e: bench::BenchError) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

impl From<GenomicsError> for Failure {
    fn from(e: GenomicsError) -> Self {
        let code = if matches!(e, GenomicsError::QubitBudget { .. }) { 3 } else { 1 };
        Failure(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let store = Store::new(&cli.store);
    match cli.command {
        Command::Run {
            file,
            shots,
            seed,
            noise_p,
            topology,
            placement,
            top_k,
            success,
            json,
            no_store,
        } => {
            let config = RunConfig {
                shots,
                seed,
                noise_p,
                topology: topology.map(|t| t.to_string()),
                placement,
                top_k,
                success_set: success,
            };
            let record = cli_run(&file, &config, (!no_store).then_some(&store))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&record).map_err(|e| Failure(1, e.to_string()))?);
            } else {
                print_summary(&record);
            }
        }
        Command::Map {
            file,
            topology,
            placement,
        } => {
            let program = read_program(&file)?;
            let topology = build_topology(topology).map_err(|e| Failure(2, e.to_string()))?;
            let mapped = map_circuit(&program, &topology, placement).map_err(|e| Failure(2, e.to_string()))?;
            print!("{}", mapped.text);
            let r = mapped.report;
            eprintln!(
                "gates {} -> {}, swaps {}, depth {} -> {}",
                r.gates_before, r.gates_after, r.added_swaps, r.depth_before, r.depth_after
            );
        }
        Command::Align {
            reference,
            read,
            iterations,
            diffusion,
            oracle,
            shots,
            seed,
            emit,
        } => {
            let a = AlignmentInstance::new(&reference, &read)?
                .with_iterations(iterations)
                .with_diffusion(diffusion)
                .with_oracle(oracle);
            let result = align(&a, shots, &mut ChaCha8Rng::seed_from_u64(seed))?;
            if emit {
                print!("{}", qaccel_core::emit(&result.program));
            }
            println!(
                "{} qubits, threshold {}, sentinel mass {:.6}",
                a.total_qubits(),
                result.threshold,
                result.sentinel_mass
            );
            println!("{:>8}  {:>12}  {:>8}  {:>6}", "position", "probability", "distance", "shots");
            for r in &result.ranking {
                let hits = result.counts.get(&r.position).copied().unwrap_or(0);
                println!("{:>8}  {:>12.6}  {:>8}  {:>6}", r.position, r.probability, r.hamming_distance, hits);
            }
        }
        Command::Bench { suite, out_dir } => {
            let result = match suite {
                BenchSuite::Gates => bench::bench_gates(),
                BenchSuite::Qubits { n_min, n_max, skip } => bench::bench_qubit_scaling(n_min, n_max, skip)?,
                BenchSuite::Depth { depths } => {
                    bench::bench_depth_scaling(depths.as_deref().unwrap_or(&DEFAULT_DEPTHS), &DEPTH_KINDS)?
                }
            };
            report_bench(&result, &out_dir)?;
        }
        Command::Metrics {
            action:
                MetricsAction::Query {
                    run_id,
                    circuit_hash,
                    since,
                    until,
                },
        } => {
            let filter = Filter {
                run_id,
                circuit_hash,
                since,
                until,
            };
            let result = store.query(&filter).map_err(|e| Failure(1, e.to_string()))?;
            if result.skipped > 0 {
                eprintln!("warning: skipped {} unreadable line(s) in {}", result.skipped, store.path().display());
            }
            for r in &result.records {
                println!("{}", serde_json::to_string(r).map_err(|e| Failure(1, e.to_string()))?);
            }
        }
    }
    Ok(())
}

fn read_program(path: &Path) -> Result<qaccel_core::Program, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(1, format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn print_summary(r: &RunRecord) {
    let m = &r.metrics;
    println!("run {}  circuit {}", r.run_id, &r.circuit_hash[..16]);
    println!(
        "qubits {} (simulated {}), gates {}, depth {}, peak state {} B, {:.3} ms",
        r.num_qubits,
        r.simulated_qubits,
        m.total_gates,
        m.depth,
        r.peak_state_bytes,
        r.wall_time_ns as f64 / 1e6
    );
    if let Some(map) = &r.mapping {
        println!("mapping: {} swaps added, depth {} -> {}", map.added_swaps, map.depth_before, map.depth_after);
    }
    let show = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.6}"));
    println!("fidelity {}, success probability {}", show(m.fidelity), show(m.success_probability));
    for s in &r.final_states {
        match s.amplitude {
            Some(a) => println!("  |{}⟩  p={:.6}  amp={:+.6}{:+.6}i", s.bitstring, s.probability, a.re, a.im),
            None => println!("  |{}⟩  p={:.6}", s.bitstring, s.probability),
        }
    }
}

fn report_bench(result: &BenchResult, out_dir: &Path) -> Result<(), Failure> {
    print!("{result}");
    if result.suite == "qubits" {
        for (n, ratio) in result.ratios(bench::skip_series(true), bench::skip_series(false)) {
            println!("  n={n}: skip-on / skip-off = {ratio:.3}");
        }
    }
    for path in result.write_csv(out_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
