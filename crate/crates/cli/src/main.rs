//! `daa`: check, translate, explore, time and render distributed
//! asynchronous automata and the Petri nets that generate them.

use std::collections::VecDeque;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use daa_core::{
    dot, parse_daa, parse_pnet, DaaDocument, DistributedAutomaton, PetriError, PnetDocument, Time,
    TimeRange, TimedError, UpperBound,
};

const DEFAULT_BOUND: u64 = 10_000;

#[derive(Parser)]
#[command(
    name = "daa",
    version,
    about = "Distributed asynchronous automata toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check determinism, the diamond axiom and the full-square condition.
    Check { file: PathBuf },
    /// Translate a `.pnet` net into a `.daa` automaton over its reachable markings.
    Translate {
        file: PathBuf,
        /// Maximum number of reachable markings.
        #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List reachable markings (`.pnet`) or states (`.daa`) in BFS order.
    Reach {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
    },
    /// Minimum and maximum time to reach a target state.
    Times {
        file: PathBuf,
        #[arg(long)]
        target: String,
        /// Maximum number of firings per run.
        #[arg(long)]
        depth: usize,
        /// Cross-check with a grid search using this time step.
        #[arg(long, value_name = "STEP")]
        oracle: Option<Time>,
    },
    /// Render an automaton as a Graphviz digraph.
    Dot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Failure of a command, mapped onto the exit code.
enum Failure {
    /// Axiom violation, infeasibility, limit or oracle mismatch.
    Analysis(String),
    /// Parse, I/O or usage error.
    Input(String),
}

impl Failure {
    fn input(err: impl Display) -> Self {
        Failure::Input(err.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check { file } => check(&file),
        Command::Translate {
            file,
            bound,
            output,
        } => translate(&file, bound as usize, output.as_deref()),
        Command::Reach { file, bound } => reach(&file, bound as usize),
        Command::Times {
            file,
            target,
            depth,
            oracle,
        } => times(&file, &target, depth, oracle),
        Command::Dot { file, output } => render(&file, output.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Analysis(msg)) => {
            if !msg.is_empty() {
                eprintln!("daa: {msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("daa: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn is_pnet(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "pnet")
}

fn load_daa(path: &Path) -> Result<DaaDocument, Failure> {
    let text = read(path)?;
    parse_daa(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_pnet(path: &Path) -> Result<PnetDocument, Failure> {
    let text = read(path)?;
    parse_pnet(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn limit_failure(err: PetriError) -> Failure {
    match err {
        PetriError::LimitExceeded(bound) => Failure::Analysis(format!(
            "more than {bound} reachable markings (--bound {bound})"
        )),
        other => Failure::Analysis(other.to_string()),
    }
}

fn check(path: &Path) -> Outcome {
    let text = read(path)?;
    let doc = DaaDocument::parse_permissive(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let aut = &doc.automaton;
    let report = |name: &str, result: Result<(), String>| {
        match &result {
            Ok(()) => println!("{name}: ok"),
            Err(w) => println!("{name}: FAIL {w}"),
        }
        result.is_ok()
    };
    let deterministic = report(
        "determinism",
        aut.check_determinism().map_err(|w| w.to_string()),
    );
    let diamond = report("diamond", aut.check_diamond().map_err(|w| w.to_string()));
    report("goubault", aut.check_goubault().map_err(|w| w.to_string()));
    if deterministic && diamond {
        Ok(())
    } else {
        Err(Failure::Analysis(String::new()))
    }
}

fn translate(path: &Path, bound: usize, output: Option<&Path>) -> Outcome {
    let doc = load_pnet(path)?;
    let daa = doc.to_daa(bound).map_err(limit_failure)?;
    write_out(output, &daa.serialize())
}

fn reach(path: &Path, bound: usize) -> Outcome {
    if is_pnet(path) {
        let doc = load_pnet(path)?;
        for m in doc.net.reachable_markings(bound).map_err(limit_failure)? {
            println!("{m}");
        }
    } else {
        let doc = load_daa(path)?;
        let aut = &doc.automaton;
        for s in reachable_states(aut, bound)? {
            println!("{}", aut.states()[s]);
        }
    }
    Ok(())
}

fn reachable_states(aut: &DistributedAutomaton, bound: usize) -> Result<Vec<usize>, Failure> {
    let start = aut.initial_index();
    let mut seen = vec![false; aut.states().len()];
    seen[start] = true;
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for a in aut.enabled_events_index(s) {
            for &next in aut.successors_index(s, a) {
                if !seen[next] {
                    seen[next] = true;
                    order.push(next);
                    queue.push_back(next);
                }
            }
        }
    }
    if order.len() > bound {
        return Err(Failure::Analysis(format!(
            "more than {bound} reachable states (--bound {bound})"
        )));
    }
    Ok(order)
}

fn times(path: &Path, target: &str, depth: usize, oracle: Option<Time>) -> Outcome {
    let doc = if is_pnet(path) {
        load_pnet(path)?
            .to_daa(DEFAULT_BOUND as usize)
            .map_err(limit_failure)?
    } else {
        load_daa(path)?
    };
    let ta = doc.timed().map_err(Failure::input)?;
    let timing = |e: TimedError| match e {
        TimedError::UnknownState(_)
        | TimedError::InvalidStep(_)
        | TimedError::GridMismatch { .. } => Failure::input(e),
        other => Failure::Analysis(other.to_string()),
    };
    let exact = ta.reach_time_bounds(target, depth).map_err(timing)?;
    let Some(exact) = exact else {
        return Err(Failure::Analysis(format!(
            "{target} is not reachable within {depth} firings"
        )));
    };
    println!("min {}", exact.min);
    println!("max {}", exact.max);

    let Some(step) = oracle else { return Ok(()) };
    let Some(grid) = ta.oracle_time_bounds(target, depth, step).map_err(timing)? else {
        return Err(Failure::Analysis(format!(
            "oracle found no run reaching {target}"
        )));
    };
    println!("oracle-min {}", grid.min);
    println!("oracle-max {}", grid.max);
    if agree(&exact, &grid) {
        Ok(())
    } else {
        Err(Failure::Analysis(
            "exact bounds and grid oracle disagree".into(),
        ))
    }
}

/// The grid maximum is capped by its horizon, so only finite maxima are compared.
fn agree(exact: &TimeRange, grid: &TimeRange) -> bool {
    exact.min == grid.min
        && match exact.max {
            UpperBound::Finite(_) => exact.max == grid.max,
            UpperBound::Infinite => true,
        }
}

fn render(path: &Path, output: Option<&Path>) -> Outcome {
    let doc = load_daa(path)?;
    write_out(output, &dot::to_dot(&doc.automaton, &doc.name))
}
