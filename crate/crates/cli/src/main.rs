use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stodars::bench::{self, ExperimentPlan};
use stodars::diagnostics::{self, Suite};
use stodars::problems::lookup;
use stodars::solver::{run, SolverConfig};
use stodars::{Error, Parallelism};

/// Stochastic direct search in random subspaces.
#[derive(Parser, Debug)]
#[command(name = "stodars", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the solver on one problem instance and write its trace as CSV.
    Solve {
        /// Instance name, e.g. ext_rosenbrock_n8_add_normal.
        #[arg(long)]
        problem: String,
        /// Config file with `solver.<key> = <value>` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = "STODARS_SEED", default_value_t = 0)]
        seed: u64,
        /// Trace destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the effective config and exit.
        #[arg(long)]
        dump_config: bool,
    },
    /// Run Monte-Carlo checks of the sampling geometry.
    Verify {
        /// all, haar, sphere, jlt or acute.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, env = "STODARS_SEED", default_value_t = 0)]
        seed: u64,
        /// CSV report destination; the text report always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute an experiment plan and write traces, manifest and profiles.
    Bench {
        #[arg(long)]
        plan_file: PathBuf,
        /// Worker threads; 1 runs sequentially.
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compute a data profile from a trace directory.
    Profile {
        #[arg(long)]
        trace_dir: PathBuf,
        #[arg(long, default_value_t = 1e-2)]
        tolerance: f64,
        /// Profile CSV destination.
        #[arg(long)]
        out: PathBuf,
        /// Spacing of the budget grid, in units of n + 1 evaluations.
        #[arg(long, default_value_t = 10)]
        budget_step: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e @ Error::Config { .. }) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> stodars::Result<ExitCode> {
    match command {
        Command::Solve {
            problem,
            config,
            seed,
            out,
            dump_config,
        } => solve(&problem, config.as_deref(), seed, out.as_deref(), dump_config),
        Command::Verify { suite, trials, seed, out } => verify(&suite, trials, seed, out.as_deref()),
        Command::Bench {
            plan_file,
            parallelism,
            out_dir,
        } => bench_cmd(&plan_file, parallelism, &out_dir),
        Command::Profile {
            trace_dir,
            tolerance,
            out,
            budget_step,
        } => profile(&trace_dir, tolerance, &out, budget_step),
    }
}

fn read(path: &Path) -> stodars::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn sink(out: Option<&Path>) -> stodars::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(fs::File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn solve(problem: &str, config: Option<&Path>, seed: u64, out: Option<&Path>, dump: bool) -> stodars::Result<ExitCode> {
    let config = match config {
        Some(path) => SolverConfig::parse(&read(path)?)?,
        None => SolverConfig::default(),
    };
    if dump {
        let mut w = sink(out)?;
        w.write_all(config.to_config_string().as_bytes())?;
        w.flush()?;
        return Ok(ExitCode::SUCCESS);
    }
    let problem = lookup(problem)?;
    let trace = run(&problem, &config, seed)?;
    let mut w = sink(out)?;
    trace.write_csv(&mut w)?;
    w.flush()?;
    if out.is_some() {
        let last = trace.last();
        eprintln!(
            "{}: {} iterations, {} evaluations, f = {:.6e} (start {:.6e})",
            trace.problem,
            trace.iterations(),
            last.evals_cumulative,
            last.f_true,
            trace.initial().f_true
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(suite: &str, trials: usize, seed: u64, out: Option<&Path>) -> stodars::Result<ExitCode> {
    let suite: Suite = suite.parse()?;
    let reports = diagnostics::run_suite(suite, trials, seed, Parallelism::Threads(0))?;
    diagnostics::write_text(&reports, io::stdout().lock())?;
    if let Some(path) = out {
        let mut w = sink(Some(path))?;
        diagnostics::write_csv(&reports, &mut w)?;
        w.flush()?;
    }
    Ok(if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench_cmd(plan_file: &Path, parallelism: usize, out_dir: &Path) -> stodars::Result<ExitCode> {
    let plan = ExperimentPlan::parse(&read(plan_file)?)?;
    let result = bench::run_plan(&plan, Parallelism::from_threads(parallelism))?;
    bench::persist(&plan, &result, out_dir)?;
    let grid = bench::budget_grid(plan.budget_multiplier, 10);
    let curves = bench::write_profiles(&result.traces, &plan.tolerances, &grid, out_dir)?;
    println!("{} runs, {} failed", plan.run_count(), result.failures.len());
    for c in &curves {
        println!("tau={:e} {}: endpoint {:.4}", c.tolerance, c.solver, c.endpoint());
    }
    for (key, err) in &result.failures {
        eprintln!("run {} failed: {err}", key.file_name());
    }
    Ok(ExitCode::SUCCESS)
}

fn profile(trace_dir: &Path, tolerance: f64, out: &Path, budget_step: u64) -> stodars::Result<ExitCode> {
    if !(tolerance > 0.0 && tolerance <= 1.0) {
        return Err(Error::Config {
            key: "tolerance".into(),
            message: "must lie in (0, 1]".into(),
        });
    }
    let traces = bench::load_traces(trace_dir)?;
    let max = traces
        .values()
        .map(|t| t.last().evals_cumulative.div_ceil(t.dim as u64 + 1))
        .max()
        .unwrap_or(0);
    let grid = bench::budget_grid(max, budget_step);
    let f_stars = bench::best_found_by_instance(&traces);
    let curves = bench::data_profile(&traces, &f_stars, tolerance, &grid);
    let mut w = sink(Some(out))?;
    bench::write_profile_csv(&curves, &mut w)?;
    w.flush()?;
    if let Some(dir) = out.parent() {
        let dir = if dir.as_os_str().is_empty() { Path::new(".") } else { dir };
        fs::write(dir.join("plot_profiles.py"), bench::PLOT_SCRIPT)?;
    }
    for c in &curves {
        println!("{}: endpoint {:.4}", c.solver, c.endpoint());
    }
    Ok(ExitCode::SUCCESS)
}
