//! `oracleforge` command-line tool.
//!
//! ```bash
//! oracleforge compile fixtures/majority.xag -o majority.qc
//! oracleforge verify majority.qc fixtures/majority.xag
//! oracleforge pebble fixtures/majority.xag --sweep 3..4 --out-dir out/
//! oracleforge bench fixtures/bristol
//! ```

mod bench;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use oracleforge::compile::{CompileOptions, TieBreak};
use oracleforge::pebble::{
    encode, pareto_csv, pareto_svg, sweep, CdclSolver, CnfFormula, FinalMode, PebbleOptions, PointOutcome, SatSolver,
    SolveResult,
};
use oracleforge::qir::Circuit;
use oracleforge::verify::{check_oracle, Mode, Verdict, DEFAULT_SAMPLES, DEFAULT_SEED};
use oracleforge::xag::{parse_bristol, parse_native, XagNetwork};

use bench::BenchRow;

#[derive(Parser)]
#[command(version, about = "Compile XOR-AND graphs into quantum oracle circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a network into a circuit and print its cost row
    Compile {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Strategy::Heuristic)]
        strategy: Strategy,
        /// Circuit file; without it the circuit goes to stdout and the row to stderr
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Tie::Lowest)]
        tie_break: Tie,
        /// Disable the included-fan-in CNOT saving
        #[arg(long)]
        no_inclusion: bool,
    },
    /// Check that a circuit computes a network as an oracle
    Verify {
        circuit: PathBuf,
        network: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        /// Enumerate every basis state (the default when n + m <= 14)
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Check this many random basis states instead
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Search pebbling schedules under a pebble bound and replay them
    Pebble {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        /// Single pebble bound
        #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
        pebbles: Option<usize>,
        /// Range of pebble bounds, `L1..L2` (inclusive)
        #[arg(long, value_parser = parse_range)]
        sweep: Option<(usize, usize)>,
        /// Step cap of the search
        #[arg(long, default_value_t = 32)]
        steps: usize,
        /// Solver seeds, comma separated
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seed: Vec<u64>,
        /// Conflicts per SAT call, 0 for unlimited
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = Final::RoundTrip)]
        mode: Final,
        /// Keep the first schedule instead of minimizing AND placements
        #[arg(long)]
        no_minimize: bool,
        /// Directory for schedules, circuits and the scatter plot
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Write the CNF of one unrolling in DIMACS format
    Encode {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        #[arg(long)]
        pebbles: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Final::RoundTrip)]
        mode: Final,
    },
    /// Compile and verify every network in a directory, one CSV row each
    Bench {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::Heuristic)]
        strategy: Strategy,
        /// Write 0 in the wall-time column so the output is reproducible
        #[arg(long)]
        no_timing: bool,
    },
    /// Print size statistics of a network
    Stats {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
    },
    /// Solve a DIMACS CNF file (`-` for stdin) with the bundled solver
    Sat {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// By extension: `.bristol` and `.txt` are Bristol, anything else native
    Auto,
    Native,
    Bristol,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Heuristic,
    Bennett,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tie {
    Lowest,
    Highest,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Final {
    RoundTrip,
    OutputsPebbled,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected `L1..L2`")?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad bound `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad bound `{b}`"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

/// Failures that are answers rather than errors (exit code 1).
struct Negative(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Negative(message))) => {
            eprintln!("{message}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub(crate) fn is_bristol(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("bristol" | "txt"))
}

pub(crate) fn read_network(path: &Path, format: Format) -> Result<XagNetwork> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let bristol = match format {
        Format::Auto => is_bristol(path),
        Format::Native => false,
        Format::Bristol => true,
    };
    let network = if bristol { parse_bristol(&text) } else { parse_native(&text) };
    let network = network.with_context(|| format!("{}", path.display()))?;
    Ok(network.normalize())
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    text.parse().with_context(|| format!("{}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn run(cli: Cli) -> Result<Option<Negative>> {
    match cli.command {
        Command::Compile { input, format, strategy, output, tie_break, no_inclusion } => {
            let network = read_network(&input, format)?;
            let options = CompileOptions {
                use_inclusion_optimization: !no_inclusion,
                tie_break: match tie_break {
                    Tie::Lowest => TieBreak::Lowest,
                    Tie::Highest => TieBreak::Highest,
                },
            };
            let (circuit, row) = bench::compile_row(&file_name(&input), &network, strategy, options, true)?;
            let report = format!("{}\n{}\n", BenchRow::HEADER, row.to_csv());
            match output {
                Some(path) => {
                    write_file(&path, &circuit.to_string())?;
                    print!("{report}");
                }
                None => {
                    print!("{circuit}");
                    eprint!("{report}");
                }
            }
            Ok(None)
        }
        Command::Verify { circuit, network, format, exhaustive, samples, seed } => {
            let c = read_circuit(&circuit)?;
            let net = read_network(&network, format)?;
            let mode = match (exhaustive, samples) {
                (true, _) => Mode::Exhaustive,
                (false, Some(samples)) => Mode::Sampled { samples, seed },
                (false, None) if net.num_inputs() + net.num_outputs() <= 14 => Mode::Exhaustive,
                (false, None) => Mode::Sampled { samples: DEFAULT_SAMPLES, seed },
            };
            match check_oracle(&c, &net, mode)? {
                Verdict::Pass { cases } => {
                    println!("pass ({cases} cases)");
                    Ok(None)
                }
                Verdict::Fail(cex) => Ok(Some(Negative(format!("fail {cex}: {}", cex.reason)))),
            }
        }
        Command::Pebble { input, format, pebbles, sweep: range, steps, seed, budget, mode, no_minimize, out_dir } => {
            let network = read_network(&input, format)?;
            let (lo, hi) = range.unwrap_or_else(|| {
                let l = pebbles.expect("clap requires --pebbles or --sweep");
                (l, l)
            });
            let base = PebbleOptions {
                step_cap: steps,
                conflict_budget: (budget > 0).then_some(budget),
                mode: match mode {
                    Final::RoundTrip => FinalMode::RoundTrip,
                    Final::OutputsPebbled => FinalMode::OutputsPebbled,
                },
                minimize_and_moves: !no_minimize,
                ..PebbleOptions::new(lo)
            };
            let points = sweep(&network, lo..=hi, &seed, &base)?;
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
                for p in &points {
                    if let PointOutcome::Found(r) = &p.outcome {
                        let stem = format!("L{}_seed{}", p.max_pebbles, p.seed);
                        write_file(&dir.join(format!("schedule_{stem}.csv")), &r.schedule.to_csv())?;
                        write_file(&dir.join(format!("circuit_{stem}.qc")), &r.circuit.to_string())?;
                    }
                }
                write_file(&dir.join("pareto.csv"), &pareto_csv(&points))?;
                write_file(&dir.join("pareto.svg"), &pareto_svg(&points))?;
            }
            print!("{}", pareto_csv(&points));
            if pebbles.is_some() && points.iter().all(|p| p.result().is_none()) {
                return Ok(Some(Negative(format!("no schedule with {lo} pebbles within {steps} steps"))));
            }
            Ok(None)
        }
        Command::Encode { input, format, pebbles, steps, mode } => {
            let network = read_network(&input, format)?;
            let mode = match mode {
                Final::RoundTrip => FinalMode::RoundTrip,
                Final::OutputsPebbled => FinalMode::OutputsPebbled,
            };
            let enc = encode(&network, pebbles, steps, mode)?;
            print!("c pebble variables 1..{}\n{}", enc.pebble_vars, enc.formula.to_dimacs());
            Ok(None)
        }
        Command::Bench { dir, strategy, no_timing } => {
            let rows = bench::bench_dir(&dir, strategy, !no_timing)?;
            let mut out = io::stdout().lock();
            writeln!(out, "{}", BenchRow::HEADER)?;
            for row in rows {
                writeln!(out, "{}", row.to_csv())?;
            }
            Ok(None)
        }
        Command::Stats { input, format } => {
            let n = read_network(&input, format)?;
            println!("inputs {}", n.num_inputs());
            println!("outputs {}", n.num_outputs());
            println!("steps {}", n.num_steps());
            println!("and {}", n.and_count());
            println!("xor {}", n.xor_count());
            println!("dead {}", n.num_steps() - n.without_dead_nodes().num_steps());
            Ok(None)
        }
        Command::Sat { input, seed } => {
            let mut text = String::new();
            if input.as_os_str() == "-" {
                io::stdin().read_to_string(&mut text)?;
            } else {
                text = fs::read_to_string(&input).with_context(|| format!("cannot read {}", input.display()))?;
            }
            let formula = CnfFormula::from_dimacs(&text)?;
            let mut solver = CdclSolver::from_formula(&formula, seed);
            match solver.solve(&[]) {
                SolveResult::Sat => {
                    let model = solver.model().expect("model after a satisfiable call");
                    let lits: Vec<String> =
                        model.iter().enumerate().map(|(i, &b)| format!("{}", if b { i as i64 + 1 } else { -(i as i64 + 1) })).collect();
                    println!("s SATISFIABLE");
                    println!("v {} 0", lits.join(" "));
                }
                SolveResult::Unsat => println!("s UNSATISFIABLE"),
                SolveResult::Unknown => bail!("solver gave up"),
            }
            Ok(None)
        }
    }
}
