//! `mms`: exact maximin-share guarantees, allocations and verification from the command line.
//!
//! Exit codes: 0 success, 1 verification failed, 2 input error, 3 search
//! budget exhausted, 4 uncovered case left unresolved, 5 internal error.

mod formats;
mod trace;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mms_core::oracle::{self, SearchBudget};
use mms_core::{generate, solve, verify_mms, Allocation, GenSpec, MmsError, Profile, SolveOptions, SolveStatus};

use crate::formats::{read_allocation, read_instance, to_pretty_json, AllocationFile, InputError, InstanceFile};
use crate::trace::TraceFile;

#[derive(Parser)]
#[command(name = "mms", version, about = "Maximin-share allocations of goods and chores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print each agent's guarantee and an optimal partition.
    Guarantee {
        instance: PathBuf,
        /// Only this agent (0-based).
        #[arg(long)]
        agent: Option<usize>,
        #[arg(long, default_value_t = SearchBudget::DEFAULT_NODES)]
        budget: u64,
    },
    /// Compute an allocation that meets every agent's guarantee.
    Solve {
        instance: PathBuf,
        /// Write the allocation here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the reduction trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Check every reduction step against the oracle.
        #[arg(long)]
        paranoid: bool,
        #[arg(long, default_value_t = SearchBudget::DEFAULT_NODES)]
        budget: u64,
        /// Accept more than n+5 items by running the exhaustive search.
        #[arg(long)]
        allow_fallback: bool,
    },
    /// Check an allocation against freshly computed guarantees.
    Verify {
        instance: PathBuf,
        allocation: PathBuf,
        #[arg(long, default_value_t = SearchBudget::DEFAULT_NODES)]
        budget: u64,
    },
    /// Write a seeded random instance.
    Generate {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        items: usize,
        /// goods, chores, mixed, negative-mixed-only or with-nonnegative-agent.
        #[arg(long)]
        profile: String,
        /// Inclusive utility bounds as LO:HI.
        #[arg(long, default_value = "-9:9", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild an allocation from a solve trace and compare it with the recorded one.
    Replay {
        instance: PathBuf,
        trace: PathBuf,
        #[arg(long, default_value_t = SearchBudget::DEFAULT_NODES)]
        budget: u64,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Failure {
        Failure::new(2, e.to_string())
    }
}

impl From<MmsError> for Failure {
    fn from(e: MmsError) -> Failure {
        let code = match e {
            MmsError::BudgetExceeded { .. } => 3,
            MmsError::Internal(_) => 5,
            MmsError::Index(_) | MmsError::Argument(_) | MmsError::Generation { .. } | MmsError::Parse(_) => 2,
        };
        Failure::new(code, e.to_string())
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::new(2, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn show_partition(p: &Allocation) -> String {
    p.bundles()
        .iter()
        .map(|b| format!("{{{}}}", b.items().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_guarantee(instance: &Path, agent: Option<usize>, budget: SearchBudget) -> Result<u8, Failure> {
    let inst = read_instance(instance)?;
    let agents: Vec<usize> = match agent {
        Some(a) if a >= inst.num_agents() => {
            return Err(Failure::new(2, format!("agent {a} out of range for {} agents", inst.num_agents())))
        }
        Some(a) => vec![a],
        None => (0..inst.num_agents()).collect(),
    };
    println!("agent\tguarantee\twitness");
    for a in agents {
        let cert = oracle::mms_guarantee_within(&inst, a, inst.num_agents(), budget)?;
        println!("{a}\t{}\t{}", cert.guarantee, show_partition(&cert.witness));
    }
    Ok(0)
}

fn cmd_solve(
    instance: &Path,
    out: Option<&Path>,
    trace: Option<&Path>,
    opts: SolveOptions,
) -> Result<u8, Failure> {
    let inst = read_instance(instance)?;
    let outcome = solve(&inst, opts)?;
    if let Some(path) = trace {
        write_output(Some(path), &to_pretty_json(&TraceFile::from_outcome(&outcome)))?;
    }
    eprintln!("status {} covered by {}", outcome.status, outcome.covered_by);
    match outcome.status {
        SolveStatus::Solved => {
            let alloc = outcome.allocation.as_ref().expect("solved outcomes carry an allocation");
            write_output(out, &to_pretty_json(&AllocationFile::from_allocation(alloc)))?;
            Ok(0)
        }
        SolveStatus::BudgetExceeded => Err(Failure::new(3, "search budget exhausted before an allocation was found")),
        SolveStatus::UnknownUncoveredCase if outcome.proven_nonexistent => {
            Err(Failure::new(4, "uncovered case: exhaustive search shows no MMS allocation exists"))
        }
        SolveStatus::UnknownUncoveredCase => Err(Failure::new(4, "uncovered case: no allocation found")),
    }
}

fn cmd_verify(instance: &Path, allocation: &Path, budget: SearchBudget) -> Result<u8, Failure> {
    let inst = read_instance(instance)?;
    let alloc = read_allocation(allocation, &inst)?;
    let report = verify_mms(&inst, &alloc, budget)?;
    println!("agent\tutility\tguarantee\tmargin\tsatisfied");
    for r in &report.per_agent {
        println!("{}\t{}\t{}\t{}\t{}", r.agent, r.utility, r.guarantee, r.margin(), r.satisfied);
    }
    if report.satisfied {
        println!("allocation is MMS");
        Ok(0)
    } else {
        println!("allocation is not MMS: agents {:?} fall short", report.unsatisfied_agents());
        Ok(1)
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::new(2, format!("range {s:?} is not LO:HI"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn cmd_generate(spec: GenSpec, out: Option<&Path>) -> Result<u8, Failure> {
    let inst = generate(&spec)?;
    write_output(out, &to_pretty_json(&InstanceFile::from_instance(&inst)))?;
    Ok(0)
}

fn cmd_replay(instance: &Path, trace_path: &Path, budget: SearchBudget) -> Result<u8, Failure> {
    let inst = read_instance(instance)?;
    let text = std::fs::read_to_string(trace_path).map_err(|e| Failure::new(2, format!("{}: {e}", trace_path.display())))?;
    let file: TraceFile = serde_json::from_str(&text).map_err(|e| {
        Failure::new(2, format!("{}:{}:{}: {e}", trace_path.display(), e.line(), e.column()))
    })?;
    let replayed = trace::replay(&inst, &file, budget)?;
    print!("{}", to_pretty_json(&AllocationFile::from_allocation(&replayed)));
    match &file.allocation {
        Some(recorded) if recorded.to_allocation() == replayed => Ok(0),
        Some(_) => Err(Failure::new(1, "replayed allocation differs from the recorded one")),
        None => Ok(0),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Guarantee { instance, agent, budget } => cmd_guarantee(&instance, agent, SearchBudget::new(budget)),
        Command::Solve { instance, out, trace, paranoid, budget, allow_fallback } => {
            let opts = SolveOptions { budget: SearchBudget::new(budget), paranoid, allow_fallback };
            cmd_solve(&instance, out.as_deref(), trace.as_deref(), opts)
        }
        Command::Verify { instance, allocation, budget } => cmd_verify(&instance, &allocation, SearchBudget::new(budget)),
        Command::Generate { agents, items, profile, range, seed, out } => {
            let profile: Profile = profile.parse()?;
            let spec = GenSpec { num_agents: agents, num_items: items, profile, value_range: parse_range(&range)?, seed };
            cmd_generate(spec, out.as_deref())
        }
        Command::Replay { instance, trace, budget } => cmd_replay(&instance, &trace, SearchBudget::new(budget)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
