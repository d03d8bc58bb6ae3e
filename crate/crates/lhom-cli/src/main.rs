//! Command-line frontend for the list-homomorphism solver toolkit.
//!
//! Exit codes: 0 = found / ok, 1 = none / failed check, 2 = input error,
//! 3 = oracle budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lhom_cli::format::{
    map_lines, parse_json, parse_map_lines, parse_table_lines, table_lines, to_canonical_json,
    CounterexampleFile, FormatError, HyperInstanceFile, HypergraphFile, InstanceFile, NamesFile,
};
use lhom_core::conjecture::{build_triple_maltsev_with, StepPattern, TripleMaltsevOutcome};
use lhom_core::generators::{linear_instance, worked_example_system, random_planted_system};
use lhom_core::graph::{verify_homomorphism, Homomorphism, Instance};
use lhom_core::oracle;
use lhom_core::reductions::{detect_maltsev, hyper_to_graph};
use lhom_core::solver::{solve, SolverOptions};

const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Parser)]
#[command(
    name = "lhom",
    version,
    about = "List-homomorphism solver for digraph instances, CSP reductions, and brute-force oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Canonical compact JSON (byte-stable).
    Json,
    /// Indented JSON for reading; not canonical.
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a list-homomorphism instance.
    Solve {
        instance: PathBuf,
        /// Cross-check every removal decision against the brute-force oracle
        /// (slow; only sensible on small instances).
        #[arg(long)]
        debug_oracle: bool,
        /// With `no`, annotate NONE answers with the correctness caveat.
        #[arg(long, value_enum, default_value = "yes")]
        assume_maltsev: YesNo,
    },
    /// Verify a map against an instance, or a table against a structure.
    Verify {
        /// Instance file (list-homomorphism check).
        instance: Option<PathBuf>,
        /// Map file produced by `solve`.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Hypergraph file (Maltsev table check).
        #[arg(long)]
        maltsev: Option<PathBuf>,
        /// Table file produced by `detect-maltsev`.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Decide whether a relational structure admits a Maltsev polymorphism.
    DetectMaltsev { hypergraph: PathBuf },
    /// Encode a hypergraph list-homomorphism instance as a graph instance.
    ReduceCsp {
        hyper_instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Emit the graph instance of a parity-equation system over Z2.
    GenLinear(GenLinearArgs),
    /// Run a brute-force oracle on an instance.
    Oracle {
        #[command(subcommand)]
        which: OracleKind,
    },
    /// Run the structural-characterization harness on planted instances.
    CheckConjecture(CheckConjectureArgs),
}

#[derive(Args)]
struct GenLinearArgs {
    /// Use the fixed ten-equation worked system.
    #[arg(long, conflicts_with = "equations")]
    worked_example: bool,
    /// Number of equations of a random planted system.
    #[arg(long)]
    equations: Option<u32>,
    #[arg(long, default_value_t = 4)]
    max_vars: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Break the planted system's satisfiability.
    #[arg(long)]
    inconsistent: bool,
    /// Pin one vertex list to a single target vertex, e.g. `alpha=1`.
    #[arg(long, value_name = "NAME=ID")]
    pin: Vec<String>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum OracleKind {
    /// Exhaustive backtracking homomorphism search.
    Hom {
        instance: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Reference pair-list fixpoint; prints the lists.
    Pairs { instance: PathBuf },
    /// Exhaustive Maltsev list-polymorphism search.
    Maltsev {
        instance: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Exhaustive majority list-polymorphism search.
    Majority {
        instance: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Args)]
struct CheckConjectureArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of planted instances to run.
    #[arg(long, default_value_t = 20)]
    count: u32,
    #[arg(long, default_value_t = 4)]
    equations: u32,
    #[arg(long, default_value_t = 3)]
    max_vars: u32,
    /// Treat first-equals-third triples like every other triple.
    #[arg(long)]
    general_triples: bool,
    /// Directory for counterexample reports.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Re-run a serialized counterexample and compare the trace.
    #[arg(long, conflicts_with_all = ["count", "out_dir"])]
    replay: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|e| FormatError::Malformed(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<(Instance, Option<NamesFile>), FormatError> {
    let text = read_file(path)?;
    let file: InstanceFile = parse_json(&text)?;
    file.into_instance()
}

fn budget_from(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| {
            std::env::var("MALTSEV_HOM_BUDGET")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_BUDGET)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), FormatError> {
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| FormatError::Malformed(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render<T: serde::Serialize>(value: &T, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_canonical_json(value),
        OutputFormat::Pretty => {
            let mut s = serde_json::to_string_pretty(value).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, FormatError> {
    match cmd {
        Command::Solve {
            instance,
            debug_oracle,
            assume_maltsev,
        } => {
            let (inst, names) = load_instance(&instance)?;
            let opts = SolverOptions {
                debug_oracle,
                ..SolverOptions::default()
            };
            let report = solve(&inst, &opts);
            for finding in &report.debug_findings {
                eprintln!("debug-oracle: {finding}");
            }
            match report.homomorphism {
                Some(h) => {
                    assert!(verify_homomorphism(&inst, &h), "unverified answer");
                    println!("HOM");
                    print!("{}", map_lines(&h.map, names.as_ref()));
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("NONE");
                    if assume_maltsev == YesNo::No {
                        println!(
                            "note: NONE is only guaranteed when the instance admits a Maltsev list polymorphism"
                        );
                    }
                    if report.verification_failed {
                        println!(
                            "note: final singleton lists failed verification; the Maltsev precondition may be violated"
                        );
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Verify {
            instance,
            map,
            maltsev,
            table,
        } => match (instance, map, maltsev, table) {
            (Some(inst_path), Some(map_path), None, None) => {
                let (inst, names) = load_instance(&inst_path)?;
                let text = read_file(&map_path)?;
                let map = parse_map_lines(&text, inst.g.n(), names.as_ref())?;
                if verify_homomorphism(&inst, &Homomorphism::new(map)) {
                    println!("OK");
                    Ok(ExitCode::SUCCESS)
                } else {
                    println!("FAIL");
                    Ok(ExitCode::from(1))
                }
            }
            (None, None, Some(hg_path), Some(table_path)) => {
                let hg: HypergraphFile = parse_json(&read_file(&hg_path)?)?;
                let hg = hg.into_hypergraph()?;
                let table = parse_table_lines(&read_file(&table_path)?, hg.domain())?;
                if oracle::verify_maltsev_table(&hg, &table) {
                    println!("OK");
                    Ok(ExitCode::SUCCESS)
                } else {
                    println!("FAIL");
                    Ok(ExitCode::from(1))
                }
            }
            _ => Err(FormatError::Malformed(
                "use `verify <instance> --map <file>` or `verify --maltsev <hypergraph> --table <file>`"
                    .into(),
            )),
        },
        Command::DetectMaltsev { hypergraph } => {
            let hg: HypergraphFile = parse_json(&read_file(&hypergraph)?)?;
            let hg = hg.into_hypergraph()?;
            match detect_maltsev(&hg) {
                Some(t) => {
                    print!("{}", table_lines(&t));
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("NONE");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::ReduceCsp {
            hyper_instance,
            out,
            format,
        } => {
            let hi: HyperInstanceFile = parse_json(&read_file(&hyper_instance)?)?;
            let hi = hi.into_hyper_instance()?;
            let red = hyper_to_graph(&hi).map_err(FormatError::Hypergraph)?;
            let file = InstanceFile::from_instance(&red.instance, None);
            emit(&render(&file, format), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenLinear(args) => {
            let sys = if args.worked_example {
                worked_example_system()
            } else {
                let n = args.equations.ok_or_else(|| {
                    FormatError::Malformed("need --worked-example or --equations N".into())
                })?;
                random_planted_system(args.seed, n, args.max_vars, !args.inconsistent)
            };
            let named = linear_instance(&sys);
            let names = NamesFile {
                g: named.g_names.clone(),
                h: named.h_names.clone(),
            };
            let mut file = InstanceFile::from_instance(&named.instance, Some(names));
            for pin in &args.pin {
                apply_pin(&mut file, pin)?;
            }
            emit(&render(&file, args.format), args.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { which } => run_oracle(which),
        Command::CheckConjecture(args) => run_conjecture(args),
    }
}

fn apply_pin(file: &mut InstanceFile, pin: &str) -> Result<(), FormatError> {
    let (name, id) = pin
        .split_once('=')
        .ok_or_else(|| FormatError::Malformed(format!("bad pin: {pin}")))?;
    let names = file
        .names
        .as_ref()
        .ok_or_else(|| FormatError::Malformed("pinning needs a named instance".into()))?;
    let x = names
        .g
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| FormatError::Malformed(format!("unknown vertex: {name}")))?;
    let id: u32 = id
        .trim()
        .parse()
        .map_err(|_| FormatError::Malformed(format!("bad target id: {id}")))?;
    if !file.lists[x].contains(&id) {
        return Err(FormatError::Malformed(format!(
            "target {id} is not in the list of {name}"
        )));
    }
    file.lists[x] = vec![id];
    Ok(())
}

fn run_oracle(which: OracleKind) -> Result<ExitCode, FormatError> {
    match which {
        OracleKind::Hom { instance, budget } => {
            let (inst, names) = load_instance(&instance)?;
            match oracle::brute_force_hom(&inst, budget_from(budget)) {
                Ok(Some(h)) => {
                    println!("HOM");
                    print!("{}", map_lines(&h.map, names.as_ref()));
                    Ok(ExitCode::SUCCESS)
                }
                Ok(None) => {
                    println!("NONE");
                    Ok(ExitCode::from(1))
                }
                Err(_) => {
                    eprintln!("error: search node budget exceeded");
                    Ok(ExitCode::from(3))
                }
            }
        }
        OracleKind::Pairs { instance } => {
            let (inst, _) = load_instance(&instance)?;
            let np = oracle::brute_force_pairs(&inst);
            for (x, l) in np.unary.iter().enumerate() {
                println!("L({x}) = {:?}", l.iter().collect::<Vec<_>>());
            }
            for ((x, y), set) in &np.pairs {
                println!("L({x},{y}) = {:?}", set.iter().collect::<Vec<_>>());
            }
            Ok(if np.has_empty_list() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        OracleKind::Maltsev { instance, budget } => {
            let (inst, _) = load_instance(&instance)?;
            run_polymorphism_oracle(oracle::brute_force_list_maltsev(&inst, budget_from(budget)))
        }
        OracleKind::Majority { instance, budget } => {
            let (inst, _) = load_instance(&instance)?;
            run_polymorphism_oracle(oracle::brute_force_list_majority(&inst, budget_from(budget)))
        }
    }
}

fn run_polymorphism_oracle(
    result: Result<Option<oracle::ListPolymorphism>, oracle::BudgetExceeded>,
) -> Result<ExitCode, FormatError> {
    match result {
        Ok(Some(h)) => {
            println!("FOUND");
            for ((x, t), v) in h.entries() {
                println!("h({x}; {},{},{}) = {v}", t[0], t[1], t[2]);
            }
            Ok(ExitCode::SUCCESS)
        }
        Ok(None) => {
            println!("NONE");
            Ok(ExitCode::from(1))
        }
        Err(_) => {
            eprintln!("error: search node budget exceeded");
            Ok(ExitCode::from(3))
        }
    }
}

fn run_conjecture(args: CheckConjectureArgs) -> Result<ExitCode, FormatError> {
    let pattern = if args.general_triples {
        StepPattern::GeneralTriples
    } else {
        StepPattern::AsWritten
    };

    if let Some(replay_path) = args.replay {
        let file: CounterexampleFile = parse_json(&read_file(&replay_path)?)?;
        let (inst, _) = file.instance.clone().into_instance()?;
        return match build_triple_maltsev_with(&inst, pattern) {
            TripleMaltsevOutcome::Counterexample(report) => {
                let again = CounterexampleFile::from_report(&report);
                if again.trace == file.trace && again.failure == file.failure {
                    println!("REPLAY MATCH");
                    Ok(ExitCode::SUCCESS)
                } else {
                    println!("REPLAY MISMATCH");
                    Ok(ExitCode::from(1))
                }
            }
            other => {
                println!("REPLAY MISMATCH: run produced {}", outcome_name(&other));
                Ok(ExitCode::from(1))
            }
        };
    }

    let mut counterexamples = 0u32;
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i as u64);
        let sys = random_planted_system(seed, args.equations, args.max_vars, true);
        let inst = linear_instance(&sys).instance;
        let outcome = build_triple_maltsev_with(&inst, pattern);
        println!("seed {seed}: {}", outcome_name(&outcome));
        if let TripleMaltsevOutcome::Counterexample(report) = outcome {
            counterexamples += 1;
            if let Some(dir) = &args.out_dir {
                fs::create_dir_all(dir)
                    .map_err(|e| FormatError::Malformed(format!("{}: {e}", dir.display())))?;
                let path = dir.join(format!("counterexample-{seed}.json"));
                let file = CounterexampleFile::from_report(&report);
                fs::write(&path, to_canonical_json(&file))
                    .map_err(|e| FormatError::Malformed(format!("{}: {e}", path.display())))?;
                println!("  written to {}", path.display());
            }
        }
    }
    println!("counterexamples: {counterexamples}");
    Ok(ExitCode::SUCCESS)
}

fn outcome_name(o: &TripleMaltsevOutcome) -> &'static str {
    match o {
        TripleMaltsevOutcome::Verified(_) => "verified",
        TripleMaltsevOutcome::Counterexample(_) => "counterexample",
        TripleMaltsevOutcome::NotApplicable => "not-applicable",
    }
}
