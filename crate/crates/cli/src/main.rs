use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use sufgt::bench::{self, Config};
use sufgt::solver::{SolverCmd, DEFAULT_TIMEOUT};
use sufgt_core::analysis::format_solution;
use sufgt_core::eliminate::{simplify, CMax, SimplifyConfig, SimplifyResult};
use sufgt_core::model::{check_lifted, lift_model, read_any_model, write_model, Domain};
use sufgt_core::smtlib::{parse_script, print_script, Script};

const USAGE: u8 = 1;
const PARSE: u8 = 2;
const DIAGNOSTIC: u8 = 3;

#[derive(Parser)]
#[command(name = "sufgt", version, about = "Eliminate quantified variables with finite sufficient ground term sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the simplified script.
    Simplify {
        input: PathBuf,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Print a key=value stats line on standard error.
        #[arg(long)]
        stats: bool,
    },
    /// Print the solved ground term sets.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Also list the constraints.
        #[arg(long)]
        verbose: bool,
    },
    /// Lift a model of the simplified script to the original one.
    Lift {
        input: PathBuf,
        /// Model of the simplified script, in the native format or as solver output.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Assignments checked per formula before switching to sampling.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time a solver on original and simplified inputs; CSV on standard output.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Thresholds to run besides complete elimination.
        #[arg(long, value_delimiter = ',')]
        cmax: Vec<u128>,
    },
    /// Report sat/unsat disagreements between original and simplified inputs.
    Difftest {
        dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_parser = parse_cmax, default_value = "unlimited")]
        cmax: CMax,
    },
}

#[derive(Args)]
struct PipelineArgs {
    /// Elimination threshold: a number or `unlimited`.
    #[arg(long, value_parser = parse_cmax, default_value = "unlimited")]
    cmax: CMax,
    /// Largest ground term set built before a set counts as infinite.
    #[arg(long, default_value_t = sufgt_core::analysis::DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct SolverArgs {
    /// Command template with `{file}`; defaults to $SUFGT_SOLVER, then `z3 {file}`.
    #[arg(long)]
    solver: Option<String>,
    /// Per-run timeout in seconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs_f64())]
    timeout: f64,
    /// Solver processes run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for preprocessed scripts and results; a fresh one per run by default.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn parse_cmax(s: &str) -> Result<CMax, String> {
    if s == "unlimited" {
        return Ok(None);
    }
    s.parse::<u128>().map(Some).map_err(|_| format!("expected a number or `unlimited`, got `{s}`"))
}

/// Exit status with a message already printed.
struct Fail(u8);

fn fail(code: u8, msg: impl std::fmt::Display) -> Fail {
    eprintln!("sufgt: {msg}");
    Fail(code)
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| fail(USAGE, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Script, Fail> {
    parse_script(&read(path)?).map_err(|e| fail(PARSE, format!("{}:{e}", path.display())))
}

fn run_pipeline(script: &Script, args: &PipelineArgs) -> Result<(Script, SimplifyResult), Fail> {
    simplify(script, SimplifyConfig { c_max: args.cmax, cap: args.cap }).map_err(|e| fail(PARSE, e))
}

/// Diagnostics from the solver (iteration cap) go to stderr and set exit 3.
fn diagnostics(res: &SimplifyResult) -> Result<(), Fail> {
    for d in &res.solution.diagnostics {
        eprintln!("sufgt: {d}");
    }
    if res.solution.diagnostics.is_empty() {
        Ok(())
    } else {
        Err(Fail(DIAGNOSTIC))
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| fail(USAGE, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solver_setup(args: &SolverArgs, dir: &Path) -> Result<(SolverCmd, Vec<PathBuf>, PathBuf), Fail> {
    if !(args.timeout > 0.0 && args.timeout.is_finite()) {
        return Err(fail(USAGE, "timeout must be positive"));
    }
    let timeout = Duration::from_secs_f64(args.timeout);
    let solver = match &args.solver {
        Some(t) => SolverCmd::parse(t, timeout),
        None => SolverCmd::from_env(timeout),
    }
    .map_err(|e| fail(USAGE, e))?;
    solver.locate().map_err(|e| fail(USAGE, e))?;
    let inputs = bench::list_inputs(dir).map_err(|e| fail(USAGE, e))?;
    let out_dir = args.out_dir.clone().unwrap_or_else(|| {
        let t = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis());
        PathBuf::from("sufgt-runs").join(format!("run-{t}-{}", std::process::id()))
    });
    Ok((solver, inputs, out_dir))
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Simplify { input, output, pipeline, stats } => {
            let (out, res) = run_pipeline(&load(&input)?, &pipeline)?;
            write_out(output.as_deref(), &print_script(&out))?;
            if stats {
                eprintln!("{}", res.stats.line());
            }
            diagnostics(&res)
        }
        Cmd::Analyze { input, pipeline, verbose } => {
            let (_, res) = run_pipeline(&load(&input)?, &pipeline)?;
            print!("{}", format_solution(&res.solution, &res.system, verbose));
            diagnostics(&res)
        }
        Cmd::Lift { input, model, pipeline, samples, seed } => {
            let (out, res) = run_pipeline(&load(&input)?, &pipeline)?;
            let m = read_any_model(&read(&model)?, &out).map_err(|e| fail(PARSE, format!("{}: {e}", model.display())))?;
            let lifted = lift_model(&m, &res.solution, &res.skolemized.funs, &res.elimination_order)
                .map_err(|e| fail(PARSE, e))?;
            let mut ground = Vec::new();
            for a in &res.skolemized.assertions {
                for (_, atom) in a.atoms() {
                    ground.extend(sufgt_core::ast::ground_terms_of(atom));
                }
            }
            let table = lifted.materialize(&Domain::for_model(&m, &ground)).map_err(|e| fail(PARSE, e))?;
            print!("{}", write_model(&table));
            let report = check_lifted(&lifted, &res.skolemized.assertions, &res.solution, samples, seed)
                .map_err(|e| fail(PARSE, e))?;
            print!("{report}");
            if !report.is_ok() {
                return Err(fail(DIAGNOSTIC, format!("{} check violations", report.violations.len())));
            }
            diagnostics(&res)
        }
        Cmd::Bench { dir, solver, cmax } => {
            let (cmd, inputs, out_dir) = solver_setup(&solver, &dir)?;
            let rows = bench::run_bench(&inputs, &cmd, &bench::configs(&cmax), &out_dir, solver.jobs)
                .map_err(|e| fail(USAGE, e))?;
            let mut csv = Vec::new();
            bench::write_csv(&rows, &mut csv).map_err(|e| fail(USAGE, e))?;
            let results = out_dir.join("results.csv");
            fs::write(&results, &csv).map_err(|e| fail(USAGE, format!("{}: {e}", results.display())))?;
            print!("{}", String::from_utf8_lossy(&csv));
            eprintln!("sufgt: artifacts in {}", out_dir.display());
            Ok(())
        }
        Cmd::Difftest { dir, solver, cmax } => {
            let (cmd, inputs, out_dir) = solver_setup(&solver, &dir)?;
            let config = cmax.map_or(Config::Complete, Config::CMax);
            let report = bench::difftest(&inputs, &cmd, config, &out_dir, solver.jobs).map_err(|e| fail(USAGE, e))?;
            print!("{report}");
            let n = report.conflicts().len();
            if n > 0 {
                return Err(fail(DIAGNOSTIC, format!("{n} conflicts")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code)) => ExitCode::from(code),
    }
}
