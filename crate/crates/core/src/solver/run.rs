//! The iteration loop and its trace.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use super::automaton::{IndexAutomaton, Outcome, StepSize};
use super::config::SolverConfig;
use super::poll::{order_directions, poll, PollContext, PollSetBuilder};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, MonteCarloEstimator};
use crate::problems::{NoisyProblem, SmoothProblem};
use crate::rng::{StreamKind, Streams};

/// Solver state at the start of iteration `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationState {
    pub k: usize,
    pub x: Vec<f64>,
    pub step: StepSize,
    pub index: IndexAutomaton,
    pub last_success_dir: Option<Vec<f64>>,
    pub eval_count: u64,
}

impl IterationState {
    pub fn new(x0: Vec<f64>, config: &SolverConfig) -> Self {
        Self {
            k: 0,
            x: x0,
            step: StepSize::new(config.delta0, config.tau, config.j_max),
            index: IndexAutomaton::default(),
            last_success_dir: None,
            eval_count: 0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.step.delta()
    }

    /// Applies the stepsize, `ℓ` and `t` updates. On success the incumbent
    /// moves along `direction` by the pre-update stepsize.
    pub fn advance(&mut self, outcome: Outcome, direction: Option<&[f64]>) {
        if outcome.is_success() {
            let d = direction.expect("successful iteration needs a direction");
            let delta = self.delta();
            self.x.iter_mut().zip(d).for_each(|(x, u)| *x += delta * u);
            self.last_success_dir = Some(d.to_vec());
        }
        self.step.update(outcome);
        self.index.update(outcome);
        self.k += 1;
    }
}

/// Outcome column of a trace row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TraceOutcome {
    Init,
    Step(Outcome),
}

impl fmt::Display for TraceOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceOutcome::Init => f.write_str("init"),
            TraceOutcome::Step(o) => write!(f, "{}", o.symbol()),
        }
    }
}

impl FromStr for TraceOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "init" => Ok(TraceOutcome::Init),
            "S" => Ok(TraceOutcome::Step(Outcome::Success)),
            "F" => Ok(TraceOutcome::Step(Outcome::Failure)),
            _ => Err(Error::Parse(format!("unknown outcome `{s}`"))),
        }
    }
}

/// State after `k` iterations. `delta`, `ell` and `t` are the values the
/// next iteration will use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub outcome: TraceOutcome,
    pub delta: f64,
    pub ell: i64,
    pub t: u64,
    pub f_true: f64,
    pub f_est_incumbent: f64,
    pub evals_cumulative: u64,
}

pub const TRACE_HEADER: &str = "k,outcome,delta,ell,t,f_true,f_est_incumbent,evals_cumulative";

/// Everything a run leaves behind.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub problem: String,
    pub solver: String,
    pub seed: u64,
    pub dim: usize,
    pub records: Vec<TraceRecord>,
    pub final_x: Vec<f64>,
    /// The budget ran out in the middle of a poll; that iteration is not
    /// recorded.
    pub truncated: bool,
}

impl RunTrace {
    pub fn initial(&self) -> &TraceRecord {
        &self.records[0]
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("trace has an initial record")
    }

    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    pub fn deltas(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.delta)
    }

    pub fn min_f_true(&self) -> f64 {
        self.records.iter().map(|r| r.f_true).fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# problem={}", self.problem)?;
        writeln!(w, "# solver={}", self.solver)?;
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# dim={}", self.dim)?;
        writeln!(w, "# truncated={}", self.truncated)?;
        writeln!(w, "{TRACE_HEADER}")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.k, r.outcome, r.delta, r.ell, r.t, r.f_true, r.f_est_incumbent, r.evals_cumulative
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads a trace written by [`RunTrace::write_csv`]. `final_x` is not
    /// stored in the file and comes back empty.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut trace = RunTrace {
            problem: String::new(),
            solver: String::new(),
            seed: 0,
            dim: 0,
            records: Vec::new(),
            final_x: Vec::new(),
            truncated: false,
        };
        let bad = |line: usize, what: &str| Error::Parse(format!("trace line {line}: {what}"));
        let mut saw_header = false;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta.trim().split_once('=').ok_or_else(|| bad(lineno, "bad metadata"))?;
                match key {
                    "problem" => trace.problem = value.to_string(),
                    "solver" => trace.solver = value.to_string(),
                    "seed" => trace.seed = value.parse().map_err(|_| bad(lineno, "bad seed"))?,
                    "dim" => trace.dim = value.parse().map_err(|_| bad(lineno, "bad dim"))?,
                    "truncated" => trace.truncated = value.parse().map_err(|_| bad(lineno, "bad flag"))?,
                    _ => {}
                }
                continue;
            }
            if !saw_header {
                if line.trim() != TRACE_HEADER {
                    return Err(bad(lineno, "expected header"));
                }
                saw_header = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(bad(lineno, "expected 8 fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(lineno, "bad number"));
            trace.records.push(TraceRecord {
                k: f[0].parse().map_err(|_| bad(lineno, "bad k"))?,
                outcome: f[1].parse()?,
                delta: num(f[2])?,
                ell: f[3].parse().map_err(|_| bad(lineno, "bad ell"))?,
                t: f[4].parse().map_err(|_| bad(lineno, "bad t"))?,
                f_true: num(f[5])?,
                f_est_incumbent: num(f[6])?,
                evals_cumulative: f[7].parse().map_err(|_| bad(lineno, "bad evals"))?,
            });
        }
        if trace.records.is_empty() {
            return Err(Error::Parse("trace has no records".into()));
        }
        Ok(trace)
    }
}

/// Runs the solver with Monte-Carlo estimates of a noisy problem. Noise
/// comes from the `Noise` stream of `seed`, frames and PSSs from its
/// `Matrix` and `Pss` streams.
pub fn run(problem: &NoisyProblem, config: &SolverConfig, seed: u64) -> Result<RunTrace> {
    let streams = Streams::new(seed);
    let mut estimator = MonteCarloEstimator::new(problem, streams.stream(StreamKind::Noise, 0));
    let mut trace = run_with_estimator(problem.base(), &mut estimator, config, seed)?;
    trace.problem = problem.name();
    Ok(trace)
}

/// Runs the solver with any estimator. `problem` supplies `x0`, the
/// feasibility predicate and the true objective recorded in the trace.
pub fn run_with_estimator(
    problem: &SmoothProblem,
    estimator: &mut dyn Estimator,
    config: &SolverConfig,
    seed: u64,
) -> Result<RunTrace> {
    let n = problem.dim();
    config.validate_for_dim(n)?;
    if !problem.is_feasible(problem.x0()) {
        return Err(Error::InfeasibleStart);
    }
    let budget = config.budget.resolve(n);
    let mut builder = PollSetBuilder::new(config, n, Streams::new(seed))?;
    let mut state = IterationState::new(problem.x0().to_vec(), config);
    let mut trace = RunTrace {
        problem: problem.name(),
        solver: config.variant.to_string(),
        seed,
        dim: n,
        records: Vec::new(),
        final_x: Vec::new(),
        truncated: false,
    };
    let record = |state: &IterationState, outcome, f_est| -> Result<TraceRecord> {
        Ok(TraceRecord {
            k: state.k,
            outcome,
            delta: state.delta(),
            ell: state.index.ell(),
            t: state.index.t(),
            f_true: problem.eval_true(&state.x)?,
            f_est_incumbent: f_est,
            evals_cumulative: state.eval_count,
        })
    };

    let n0 = config.nk_schedule.count(state.delta());
    if (n0 as u64) > budget {
        trace.records.push(record(&state, TraceOutcome::Init, f64::NAN)?);
        trace.final_x = state.x;
        return Ok(trace);
    }
    estimator.set_iteration(0);
    estimator.start(&state.x, n0)?;
    state.eval_count = n0 as u64;
    let f0 = estimator.incumbent(&state.x, state.delta());
    trace.records.push(record(&state, TraceOutcome::Init, f0)?);

    loop {
        estimator.set_iteration(state.k);
        let delta = state.delta();
        let nk = config.nk_schedule.count(delta);
        let (_, dirs) = builder.build(state.index.t())?;
        let dirs = if config.sort_by_last_success {
            order_directions(&dirs, state.last_success_dir.as_deref())
        } else {
            dirs
        };
        let ctx = PollContext {
            problem,
            x: &state.x,
            delta,
            samples: nk,
            remaining: budget - state.eval_count,
        };
        let outcome = poll(ctx, config, &dirs, estimator)?;
        state.eval_count += outcome.evals_used;
        if outcome.budget_exhausted {
            trace.truncated = true;
            break;
        }
        let result = if outcome.success { Outcome::Success } else { Outcome::Failure };
        state.advance(result, outcome.accepted_direction.as_deref());

        let next = config.nk_schedule.count(state.delta());
        let can_update = state.eval_count + next as u64 <= budget;
        if can_update {
            match outcome.accepted_estimate {
                Some(trial) => estimator.promote(&state.x, trial, next)?,
                None => estimator.refine(&state.x, next)?,
            }
            state.eval_count += next as u64;
        }
        let f_est = estimator.incumbent(&state.x, state.delta());
        trace.records.push(record(&state, TraceOutcome::Step(result), f_est)?);
        if !can_update || state.eval_count >= budget {
            break;
        }
    }
    trace.final_x = state.x;
    Ok(trace)
}
