//! `disprop`: batch front end over the JSON instance and division formats.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid input (including
//! unmet preconditions and exhausted budgets), 3 verification failure,
//! 64 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use disprop_core::baseline::{common_denominator, sliding_knife_equal};
use disprop_core::conjecture::{search_witness, stress_campaign, CampaignConfig, SearchOptions};
use disprop_core::division::{canonical_json, read_division, read_instance, write_division, write_instance};
use disprop_core::instances::{
    lower_bound_instance, oracle_min_cuts_with, random_instance, BestCuts, LowerBoundParams,
    OracleOptions,
};
use disprop_core::pair::{candidate_arcs, solve_pair_explained};
use disprop_core::solver::{check_trace, solve};
use disprop_core::{cut_count_bound, verify, Error, Instance, Rational};

const EXIT_INTERNAL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Candidate arcs beyond this count are not listed by `pair --explain`.
const EXPLAIN_LIMIT: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "disprop", version, about = "Exact disproportionate cake division")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with at most 3n − 4 cuts.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the recursion trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Re-verify the division and replay the trace.
        #[arg(long)]
        check: bool,
    },
    /// Check a division against an instance.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        div: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-agent division through the circle lemma.
    Pair {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also list the pigeonhole candidate arcs.
        #[arg(long)]
        explain: bool,
    },
    /// Classical baseline procedures.
    Baseline {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: BaselineMethod,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated instance.
    Generate(GenerateArgs),
    /// Brute-force minimal cut count on a finite grid.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        max_cuts: usize,
        #[arg(long, default_value_t = 1)]
        refine: usize,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        /// Add the cuts of this division to the grid.
        #[arg(long)]
        with_cuts: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-interval circle partition search.
    Conjecture {
        #[command(subcommand)]
        action: ConjectureCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineMethod {
    Sliding,
    Denominator,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Lowerbound,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    out: PathBuf,
    /// Required for the random family.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 6)]
    segments: usize,
    /// Support half-width of the lower-bound family (default 1/(10n²)).
    #[arg(long)]
    eps: Option<Rational>,
    /// Slack of the lower-bound family (default ε²).
    #[arg(long)]
    delta: Option<Rational>,
}

#[derive(Subcommand)]
enum ConjectureCommand {
    Search {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        refine: usize,
        #[arg(long, default_value_t = 20_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Campaign {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        segments: usize,
        #[arg(long, default_value_t = 1)]
        refine: usize,
        #[arg(long, default_value_t = 20_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// JSON-lines report, one record per instance.
        #[arg(long)]
        out: PathBuf,
        /// Directory for full `CERTIFIED_NONE` instances.
        #[arg(long)]
        counterexamples: Option<PathBuf>,
    },
}

enum Failure {
    Invalid(String),
    Verify(String),
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Invalid(m) => (EXIT_INVALID, m),
                Failure::Verify(m) => (EXIT_VERIFY, m),
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Internal(m) => (EXIT_INTERNAL, m),
            };
            eprintln!("disprop: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path, strict: bool) -> Result<Instance, Failure> {
    let text = read_text(path)?;
    read_instance(&text, strict).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(path: Option<&Path>, value: &T) -> Outcome {
    let text = canonical_json(value);
    match path {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Solve { input, out, trace, check } => {
            let inst = load_instance(&input, true)?;
            let sol = solve(&inst)?;
            let report = verify(&inst, &sol.division)?;
            let bound = cut_count_bound(inst.n())?;
            if let Some(p) = &out {
                write_file(p, &write_division(&sol.division))?;
            }
            if let Some(p) = &trace {
                emit(Some(p), &sol.trace)?;
            }
            let cases: Vec<String> = sol.trace.case_counts().iter().map(|(t, c)| format!("{t}×{c}")).collect();
            println!(
                "n = {}, cuts = {} (bound {bound}), valid = {}, cases: {}",
                inst.n(),
                sol.division.cut_count(),
                report.valid,
                cases.join(" ")
            );
            if out.is_none() {
                print!("{}", write_division(&sol.division));
            }
            if check {
                if !report.valid || sol.division.cut_count() > bound {
                    return Err(Failure::Verify("solver output failed verification".into()));
                }
                check_trace(&inst, &sol.trace).map_err(|e| Failure::Verify(e.to_string()))?;
                println!("check: division verified, trace replayed");
            }
            Ok(())
        }
        Command::Verify { input, div, out } => {
            let inst = load_instance(&input, false)?;
            let division = read_division(&read_text(&div)?)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", div.display())))?;
            let report = verify(&inst, &division).map_err(|e| Failure::Verify(e.to_string()))?;
            emit(out.as_deref(), &report)?;
            if out.is_some() {
                let surplus: Vec<String> = report.surplus.iter().map(|s| s.to_string()).collect();
                println!(
                    "valid = {}, cuts = {}, surplus = [{}]",
                    report.valid,
                    report.cut_count,
                    surplus.join(", ")
                );
            }
            if report.valid {
                Ok(())
            } else {
                Err(Failure::Verify("division does not meet every demand".into()))
            }
        }
        Command::Pair { input, out, explain } => {
            let inst = load_instance(&input, true)?;
            let sol = solve_pair_explained(&inst)?;
            let mut value = serde_json::to_value(&sol).map_err(|e| Failure::Internal(e.to_string()))?;
            if explain {
                if let Some(lemma) = &sol.lemma {
                    let alpha = Rational::one() - &inst.demands[1];
                    if lemma.q > EXPLAIN_LIMIT.into() {
                        eprintln!("disprop: q = {} exceeds {EXPLAIN_LIMIT}; candidates not listed", lemma.q);
                    } else {
                        let arcs = candidate_arcs(&inst.measures[1], &alpha)?;
                        let rows: Vec<_> = arcs
                            .iter()
                            .map(|a| {
                                json!({
                                    "arc": a,
                                    "eq_mass": inst.measures[1].arc_mass(a),
                                    "ge_mass": inst.measures[0].arc_mass(a),
                                })
                            })
                            .collect();
                        value["candidates"] = json!(rows);
                    }
                }
            }
            emit(out.as_deref(), &value)?;
            if out.is_some() {
                match &sol.lemma {
                    Some(l) => println!(
                        "α = {}/{}, chosen candidate {}, certificate Σ = {}, cuts = {}",
                        l.p,
                        l.q,
                        l.index,
                        l.candidate_mass_sum,
                        sol.division.cut_count()
                    ),
                    None => println!("a zero demand: cuts = 0"),
                }
            }
            Ok(())
        }
        Command::Baseline { input, method, out } => {
            let inst = load_instance(&input, true)?;
            let division = match method {
                BaselineMethod::Sliding => sliding_knife_equal(&inst)?,
                BaselineMethod::Denominator => common_denominator(&inst)?,
            };
            let report = verify(&inst, &division)?;
            match &out {
                Some(p) => write_file(p, &write_division(&division))?,
                None => print!("{}", write_division(&division)),
            }
            println!("cuts = {}, valid = {}", report.cut_count, report.valid);
            if report.valid {
                Ok(())
            } else {
                Err(Failure::Verify("baseline division failed verification".into()))
            }
        }
        Command::Generate(args) => generate(args),
        Command::Oracle {
            input,
            max_cuts,
            refine,
            budget,
            with_cuts,
            out,
        } => {
            let inst = load_instance(&input, true)?;
            let mut opts = OracleOptions::new(max_cuts, refine);
            opts.budget = budget;
            if let Some(p) = &with_cuts {
                let d = read_division(&read_text(p)?).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
                opts.extra_points = d.cuts;
            }
            let result = oracle_min_cuts_with(&inst, &opts)?;
            emit(out.as_deref(), &result)?;
            if out.is_some() {
                match result.best_cuts {
                    BestCuts::Cuts(k) => println!("best cuts on grid: {k}"),
                    BestCuts::InfeasibleOnGrid => {
                        println!("infeasible-on-grid for at most {max_cuts} cuts (evidence only)")
                    }
                }
            }
            Ok(())
        }
        Command::Conjecture { action } => conjecture(action),
    }
}

fn generate(args: GenerateArgs) -> Outcome {
    let inst = match args.family {
        Family::Lowerbound => {
            let params = match (args.eps, args.delta) {
                (None, None) => LowerBoundParams::practical(args.n)?,
                (Some(eps), delta) => {
                    let delta = delta.unwrap_or_else(|| &eps * &eps);
                    LowerBoundParams::new(args.n, eps, delta)?
                }
                (None, Some(_)) => return Err(Failure::Usage("--delta needs --eps".into())),
            };
            let inst = lower_bound_instance(&params)?;
            println!(
                "lower-bound instance: n = {}, ε = {}, δ = {}",
                params.n(),
                params.eps(),
                params.delta()
            );
            inst
        }
        Family::Random => {
            let seed = args
                .seed
                .ok_or_else(|| Failure::Usage("--family random requires --seed".into()))?;
            random_instance(args.n, args.segments, seed)?
        }
    };
    write_file(&args.out, &write_instance(&inst))
}

fn conjecture(action: ConjectureCommand) -> Outcome {
    match action {
        ConjectureCommand::Search {
            input,
            refine,
            budget,
            out,
        } => {
            let inst = load_instance(&input, true)?;
            let result = search_witness(&inst, &SearchOptions { refine, budget })?;
            emit(out.as_deref(), &result)?;
            if out.is_some() {
                match result.outcome.witness() {
                    Some(w) => println!(
                        "witness: P = {:?}, Q = {:?}, arc start {} length {}{}",
                        w.p,
                        w.q,
                        w.arc.start,
                        w.arc.length,
                        if w.degenerate { " (degenerate)" } else { "" }
                    ),
                    None => println!("CERTIFIED_NONE"),
                }
            }
            Ok(())
        }
        ConjectureCommand::Campaign {
            n,
            count,
            seed,
            segments,
            refine,
            budget,
            jobs,
            out,
            counterexamples,
        } => {
            let cfg = CampaignConfig {
                n,
                count,
                seed,
                max_segments: segments,
                search: SearchOptions { refine, budget },
                jobs,
            };
            let report = stress_campaign(&cfg)?;
            write_file(&out, &report.to_json_lines())?;
            if let Some(dir) = &counterexamples {
                fs::create_dir_all(dir).map_err(|e| Failure::Invalid(format!("{}: {e}", dir.display())))?;
                for r in &report.records {
                    if let Some(inst) = &r.instance {
                        write_file(&dir.join(format!("instance_{:05}.json", r.index)), &write_instance(inst))?;
                    }
                }
            }
            println!(
                "{} instances: {} witnesses, {} CERTIFIED_NONE, {} budget-exceeded",
                report.records.len(),
                report.witnesses,
                report.certified_none,
                report.budget_exceeded
            );
            Ok(())
        }
    }
}
