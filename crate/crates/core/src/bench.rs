//! Batch runs and data profiles.
//!
//! A plan crosses problem instances, solver configurations and seeds. Each
//! run leaves a trace; profiles are computed from traces alone, so they can
//! be rebuilt later from a trace directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Parallelism};
use crate::problems::{default_suite, lookup, NoisyProblem, Scale};
use crate::solver::{run, Budget, RunTrace, SolverConfig};

pub const DEFAULT_BUDGET_MULTIPLIER: u64 = 1500;
pub const DEFAULT_TOLERANCES: [f64; 2] = [1e-2, 1e-3];

/// Problems × solvers × seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub problems: Vec<NoisyProblem>,
    /// `(label, config)`; the config's budget is replaced by the plan's.
    pub solvers: Vec<(String, SolverConfig)>,
    pub seeds: Vec<u64>,
    pub budget_multiplier: u64,
    pub tolerances: Vec<f64>,
}

const PLAN_KEYS: [&str; 8] = [
    "suite",
    "families",
    "dims",
    "problems",
    "seeds",
    "budget_multiplier",
    "tolerances",
    "solvers",
];

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_seeds(value: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((a, b)) = value.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| "bad range start")?;
        let b: u64 = b.trim().parse().map_err(|_| "bad range end")?;
        return Ok((a..b).collect());
    }
    list(value)
        .map(|s| s.parse().map_err(|_| format!("bad seed `{s}`")))
        .collect()
}

impl ExperimentPlan {
    pub fn new(problems: Vec<NoisyProblem>, solvers: Vec<(String, SolverConfig)>, seeds: Vec<u64>) -> Self {
        Self {
            problems,
            solvers,
            seeds,
            budget_multiplier: DEFAULT_BUDGET_MULTIPLIER,
            tolerances: DEFAULT_TOLERANCES.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::config("plan.problems", "no problems selected"));
        }
        if self.solvers.is_empty() {
            return Err(Error::config("plan.solvers", "no solvers given"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("plan.seeds", "no seeds given"));
        }
        if self.budget_multiplier == 0 {
            return Err(Error::config("plan.budget_multiplier", "must be >= 1"));
        }
        if self.tolerances.is_empty() || self.tolerances.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(Error::config("plan.tolerances", "need values in (0, 1]"));
        }
        let mut labels = BTreeSet::new();
        for (label, config) in &self.solvers {
            if !labels.insert(label) {
                return Err(Error::config("plan.solvers", format!("duplicate label `{label}`")));
            }
            for p in &self.problems {
                config.validate_for_dim(p.dim()).map_err(|e| match e {
                    Error::Config { key, message } => Error::config(
                        key.replacen("solver.", &format!("{label}."), 1),
                        format!("{message} (problem {})", p.name()),
                    ),
                    e => e,
                })?;
            }
        }
        Ok(())
    }

    /// Config actually used for a run: the plan budget replaces the solver's.
    pub fn effective_config(&self, config: &SolverConfig) -> SolverConfig {
        SolverConfig {
            budget: Budget::PerDimension(self.budget_multiplier),
            ..config.clone()
        }
    }

    pub fn run_count(&self) -> usize {
        self.problems.len() * self.solvers.len() * self.seeds.len()
    }

    /// Parses plan text.
    ///
    /// ```text
    /// plan.suite = desk              # or large
    /// plan.dims = 8,16               # optional filters on the suite
    /// plan.families = ext_rosenbrock
    /// plan.problems = sphere_n4_add_normal   # explicit list, replaces suite
    /// plan.seeds = 0..20             # or 1,5,9
    /// plan.budget_multiplier = 1500
    /// plan.tolerances = 1e-2,1e-3
    /// plan.solvers = stodars5,sdds
    /// stodars5.p = 5                 # per-label solver keys
    /// sdds.variant = sdds_minimal
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        let plan = kv.section("plan");
        for key in plan.keys() {
            if !PLAN_KEYS.contains(&key) {
                return Err(Error::config(format!("plan.{key}"), "unknown key"));
            }
        }
        let problems = match plan.get("problems") {
            Some(names) => list(names).map(lookup).collect::<Result<Vec<_>>>()?,
            None => {
                let scale = match plan.get("suite").unwrap_or("desk") {
                    "desk" => Scale::Desk,
                    "large" => Scale::Large,
                    other => return Err(Error::config("plan.suite", format!("unknown suite `{other}`"))),
                };
                let dims: Option<Vec<usize>> = plan
                    .get("dims")
                    .map(|v| list(v).map(|d| d.parse().map_err(|_| Error::config("plan.dims", format!("bad dimension `{d}`")))).collect())
                    .transpose()?;
                let families: Option<Vec<&str>> = plan.get("families").map(|v| list(v).collect());
                default_suite(scale)
                    .into_iter()
                    .filter(|p| dims.as_ref().is_none_or(|d| d.contains(&p.dim())))
                    .filter(|p| families.as_ref().is_none_or(|f| f.contains(&p.base().family().name())))
                    .collect()
            }
        };
        let seeds = match plan.get("seeds") {
            Some(v) => parse_seeds(v).map_err(|e| Error::config("plan.seeds", e))?,
            None => (0..20).collect(),
        };
        let budget_multiplier = plan.parsed("budget_multiplier")?.unwrap_or(DEFAULT_BUDGET_MULTIPLIER);
        let tolerances = match plan.get("tolerances") {
            Some(v) => list(v)
                .map(|t| t.parse().map_err(|_| Error::config("plan.tolerances", format!("bad tolerance `{t}`"))))
                .collect::<Result<Vec<f64>>>()?,
            None => DEFAULT_TOLERANCES.to_vec(),
        };
        let labels: Vec<&str> = plan.get("solvers").map(|v| list(v).collect()).unwrap_or_default();
        let mut solvers = Vec::new();
        for &label in &labels {
            let mut section = KeyValues::default();
            for key in kv.section(label).keys() {
                if key == "budget" {
                    return Err(Error::config(format!("{label}.budget"), "set plan.budget_multiplier instead"));
                }
                section.insert(format!("solver.{key}"), kv.get(&format!("{label}.{key}")).unwrap_or_default());
            }
            let config = SolverConfig::from_key_values(&section).map_err(|e| match e {
                Error::Config { key, message } => Error::config(key.replacen("solver.", &format!("{label}."), 1), message),
                e => e,
            })?;
            solvers.push((label.to_string(), config));
        }
        for key in kv.keys() {
            let prefix = key.split('.').next().unwrap_or(key);
            if prefix != "plan" && !labels.contains(&prefix) {
                return Err(Error::config(key, "not a plan key or listed solver label"));
            }
        }
        let plan = ExperimentPlan {
            problems,
            solvers,
            seeds,
            budget_multiplier,
            tolerances,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Plan text that parses back to the same plan (problems listed
    /// explicitly).
    pub fn to_text(&self) -> String {
        let mut kv = KeyValues::default();
        let names: Vec<String> = self.problems.iter().map(NoisyProblem::name).collect();
        kv.insert("plan.problems", names.join(","));
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        kv.insert("plan.seeds", seeds.join(","));
        kv.insert("plan.budget_multiplier", self.budget_multiplier);
        let tols: Vec<String> = self.tolerances.iter().map(f64::to_string).collect();
        kv.insert("plan.tolerances", tols.join(","));
        let labels: Vec<&str> = self.solvers.iter().map(|(l, _)| l.as_str()).collect();
        kv.insert("plan.solvers", labels.join(","));
        let mut text = kv.to_text();
        for (label, config) in &self.solvers {
            for (key, value) in config.to_key_values().section("solver").entries() {
                if key != "budget" {
                    text.push_str(&format!("{label}.{key} = {value}\n"));
                }
            }
        }
        text
    }
}

/// Identifies one run.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RunKey {
    pub problem: String,
    pub solver: String,
    pub seed: u64,
}

impl RunKey {
    pub fn of(trace: &RunTrace) -> Self {
        Self {
            problem: trace.problem.clone(),
            solver: trace.solver.clone(),
            seed: trace.seed,
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}__{}__s{}.csv", self.problem, self.solver, self.seed)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlanResult {
    pub traces: BTreeMap<RunKey, RunTrace>,
    pub failures: Vec<(RunKey, String)>,
}

/// Executes every run of the plan. Runs use the plan seed directly, so a
/// bench trace can be reproduced with a single `run`. Failed runs are
/// recorded and skipped.
pub fn run_plan(plan: &ExperimentPlan, parallelism: Parallelism) -> Result<PlanResult> {
    plan.validate()?;
    let mut jobs = Vec::with_capacity(plan.run_count());
    for problem in &plan.problems {
        for (label, config) in &plan.solvers {
            for &seed in &plan.seeds {
                jobs.push((problem, label, plan.effective_config(config), seed));
            }
        }
    }
    let outcomes = map_indexed(jobs.len(), parallelism, |i| {
        let (problem, label, config, seed) = &jobs[i];
        let key = RunKey {
            problem: problem.name(),
            solver: (*label).clone(),
            seed: *seed,
        };
        let result = run(problem, config, *seed).map(|mut t| {
            t.solver = (*label).clone();
            t
        });
        (key, result)
    });
    let mut out = PlanResult::default();
    for (key, result) in outcomes {
        match result {
            Ok(trace) => {
                out.traces.insert(key, trace);
            }
            Err(e) => out.failures.push((key, e.to_string())),
        }
    }
    Ok(out)
}

pub const TRACE_DIR: &str = "traces";
pub const MANIFEST: &str = "manifest.txt";

/// Writes `dir/traces/<run>.csv` for every trace and `dir/manifest.txt`
/// holding the plan and the status of each run.
pub fn persist(plan: &ExperimentPlan, result: &PlanResult, dir: &Path) -> Result<()> {
    let traces = dir.join(TRACE_DIR);
    fs::create_dir_all(&traces)?;
    for (key, trace) in &result.traces {
        let mut f = std::io::BufWriter::new(fs::File::create(traces.join(key.file_name()))?);
        trace.write_csv(&mut f)?;
        f.flush()?;
    }
    let mut m = fs::File::create(dir.join(MANIFEST))?;
    m.write_all(plan.to_text().as_bytes())?;
    writeln!(m, "# runs: {} ok, {} failed", result.traces.len(), result.failures.len())?;
    for (key, trace) in &result.traces {
        writeln!(m, "# ok {} evals={}", key.file_name(), trace.last().evals_cumulative)?;
    }
    for (key, err) in &result.failures {
        writeln!(m, "# failed {} {}", key.file_name(), err.replace('\n', " "))?;
    }
    Ok(())
}

/// Reads every `*.csv` trace in `dir` (or in `dir/traces` if it exists).
pub fn load_traces(dir: &Path) -> Result<BTreeMap<RunKey, RunTrace>> {
    let nested = dir.join(TRACE_DIR);
    let dir: PathBuf = if nested.is_dir() { nested } else { dir.to_path_buf() };
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for path in paths {
        let trace = RunTrace::read_csv(BufReader::new(fs::File::open(&path)?))
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        out.insert(RunKey::of(&trace), trace);
    }
    if out.is_empty() {
        return Err(Error::Parse(format!("no traces found in {}", dir.display())));
    }
    Ok(out)
}

/// First evaluation count `N` with `f(x_N) ≤ f* + τ(f(x₀) − f*)`, using the
/// true objective. The start point itself counts as `N = 0`.
pub fn convergence_test(trace: &RunTrace, f_star: f64, f0: f64, tau: f64) -> Option<u64> {
    let target = f_star + tau * (f0 - f_star);
    trace
        .records
        .iter()
        .enumerate()
        .find(|(_, r)| r.f_true <= target)
        .map(|(i, r)| if i == 0 { 0 } else { r.evals_cumulative })
}

/// Least true objective value over every incumbent of every trace.
pub fn best_found<'a>(traces: impl IntoIterator<Item = &'a RunTrace>) -> Option<f64> {
    traces.into_iter().map(RunTrace::min_f_true).reduce(f64::min)
}

/// A problem instance: problem (including its noise model) and seed.
pub type InstanceKey = (String, u64);

/// `f*` per instance, over all solvers.
pub fn best_found_by_instance(traces: &BTreeMap<RunKey, RunTrace>) -> BTreeMap<InstanceKey, f64> {
    let mut out: BTreeMap<InstanceKey, f64> = BTreeMap::new();
    for (key, trace) in traces {
        let f = trace.min_f_true();
        out.entry((key.problem.clone(), key.seed))
            .and_modify(|v| *v = v.min(f))
            .or_insert(f);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileCurve {
    pub solver: String,
    pub tolerance: f64,
    /// `(N/(n+1), fraction solved)`.
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    pub fn endpoint(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }
}

/// Budgets `0, step, 2·step, …, max` in units of `n + 1`.
pub fn budget_grid(max: u64, step: u64) -> Vec<f64> {
    let step = step.max(1);
    let mut g: Vec<f64> = (0..=max / step).map(|i| (i * step) as f64).collect();
    if !max.is_multiple_of(step) {
        g.push(max as f64);
    }
    g
}

/// Fraction of instances each solver solves within each budget. Instances
/// are the union over solvers; a missing run counts as unsolved.
pub fn data_profile(
    traces: &BTreeMap<RunKey, RunTrace>,
    f_stars: &BTreeMap<InstanceKey, f64>,
    tau: f64,
    budgets: &[f64],
) -> Vec<ProfileCurve> {
    let instances: BTreeSet<InstanceKey> = traces.keys().map(|k| (k.problem.clone(), k.seed)).collect();
    let solvers: BTreeSet<&str> = traces.keys().map(|k| k.solver.as_str()).collect();
    let total = instances.len().max(1) as f64;
    solvers
        .into_iter()
        .map(|solver| {
            let needed: Vec<f64> = instances
                .iter()
                .filter_map(|(problem, seed)| {
                    let key = RunKey {
                        problem: problem.clone(),
                        solver: solver.to_string(),
                        seed: *seed,
                    };
                    let trace = traces.get(&key)?;
                    let f_star = f_stars.get(&(problem.clone(), *seed)).copied().unwrap_or(trace.min_f_true());
                    let n = convergence_test(trace, f_star, trace.initial().f_true, tau)?;
                    Some(n as f64 / (trace.dim as f64 + 1.0))
                })
                .collect();
            let points = budgets
                .iter()
                .map(|&b| (b, needed.iter().filter(|&&x| x <= b).count() as f64 / total))
                .collect();
            ProfileCurve {
                solver: solver.to_string(),
                tolerance: tau,
                points,
            }
        })
        .collect()
}

pub fn write_profile_csv<W: Write>(curves: &[ProfileCurve], mut w: W) -> Result<()> {
    writeln!(w, "solver,normalized_budget,fraction")?;
    for c in curves {
        for (b, f) in &c.points {
            writeln!(w, "{},{},{}", c.solver, b, f)?;
        }
    }
    Ok(())
}

pub fn profile_file_name(tau: f64) -> String {
    format!("profile_tau{tau:e}.csv")
}

/// Plots every `profile_tau*.csv` in a directory with matplotlib.
pub const PLOT_SCRIPT: &str = include_str!("../assets/plot_profiles.py");

/// Profiles for each tolerance from a trace collection, written as
/// `profile_tau<τ>.csv` plus `plot_profiles.py` in `out`.
pub fn write_profiles(
    traces: &BTreeMap<RunKey, RunTrace>,
    tolerances: &[f64],
    budgets: &[f64],
    out: &Path,
) -> Result<Vec<ProfileCurve>> {
    fs::create_dir_all(out)?;
    let f_stars = best_found_by_instance(traces);
    let mut all = Vec::new();
    for &tau in tolerances {
        let curves = data_profile(traces, &f_stars, tau, budgets);
        write_profile_csv(&curves, fs::File::create(out.join(profile_file_name(tau)))?)?;
        all.extend(curves);
    }
    fs::write(out.join("plot_profiles.py"), PLOT_SCRIPT)?;
    Ok(all)
}
