use std::fmt;
use std::str::FromStr;

use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::estimator::SampleSchedule;

/// Which poll-set construction the solver uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Positive spanning set of a random `p`-dimensional subspace.
    StoDars,
    /// Minimal positive basis of the full space (identity embedding).
    SddsMinimal,
    /// `±` columns of a Haar matrix: 2n full-space directions without a
    /// mesh (a mesh-free stand-in for StoMADS polling).
    Fullspace2n,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::StoDars => "stodars",
            Variant::SddsMinimal => "sdds_minimal",
            Variant::Fullspace2n => "fullspace_2n",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "stodars" => Ok(Variant::StoDars),
            "sdds_minimal" => Ok(Variant::SddsMinimal),
            "fullspace_2n" => Ok(Variant::Fullspace2n),
            _ => Err("expected stodars, sdds_minimal or fullspace_2n".into()),
        }
    }
}

/// Subspace dimension, either fixed or equal to the problem dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubspaceDim {
    Fixed(usize),
    Full,
}

impl SubspaceDim {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            SubspaceDim::Fixed(p) => p,
            SubspaceDim::Full => n,
        }
    }
}

impl fmt::Display for SubspaceDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspaceDim::Fixed(p) => write!(f, "{p}"),
            SubspaceDim::Full => f.write_str("n"),
        }
    }
}

impl FromStr for SubspaceDim {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "n" {
            return Ok(SubspaceDim::Full);
        }
        s.parse().map(SubspaceDim::Fixed).map_err(|_| "expected a positive integer or `n`".into())
    }
}

/// Size of the positive spanning set of `R^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PssSize {
    /// `m = p + 1`.
    Minimal,
    /// `m = 2p`.
    Maximal,
}

impl fmt::Display for PssSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PssSize::Minimal => "minimal",
            PssSize::Maximal => "maximal",
        })
    }
}

impl FromStr for PssSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "minimal" => Ok(PssSize::Minimal),
            "maximal" => Ok(PssSize::Maximal),
            _ => Err("expected minimal or maximal".into()),
        }
    }
}

/// Evaluation budget of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Budget {
    Evaluations(u64),
    /// `multiplier · (n + 1)` evaluations.
    PerDimension(u64),
}

impl Budget {
    pub fn resolve(self, n: usize) -> u64 {
        match self {
            Budget::Evaluations(b) => b,
            Budget::PerDimension(m) => m * (n as u64 + 1),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Evaluations(b) => write!(f, "{b}"),
            Budget::PerDimension(m) => write!(f, "{m}(n+1)"),
        }
    }
}

impl FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || "expected an evaluation count or `<multiplier>(n+1)`".to_string();
        match s.strip_suffix("(n+1)") {
            Some(m) => m.trim().parse().map(Budget::PerDimension).map_err(|_| bad()),
            None => s.parse().map(Budget::Evaluations).map_err(|_| bad()),
        }
    }
}

fn schedule_to_string(s: &SampleSchedule) -> String {
    match s {
        SampleSchedule::Fixed(n) => format!("fixed:{n}"),
        SampleSchedule::InverseQuartic { c, max } => format!("quartic:{c}:{max}"),
    }
}

fn parse_schedule(s: &str) -> std::result::Result<SampleSchedule, String> {
    let bad = || "expected `fixed:<n>` or `quartic:<c>:<max>`".to_string();
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["fixed", n] => n.parse().map(SampleSchedule::Fixed).map_err(|_| bad()),
        ["quartic", c, max] => Ok(SampleSchedule::InverseQuartic {
            c: c.parse().map_err(|_| bad())?,
            max: max.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// Algorithmic parameters of one solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    pub gamma: f64,
    pub eps_f: f64,
    pub tau: f64,
    pub delta0: f64,
    pub j_max: u32,
    pub p: SubspaceDim,
    pub pss: PssSize,
    pub nk_schedule: SampleSchedule,
    pub opportunistic: bool,
    pub sort_by_last_success: bool,
    pub budget: Budget,
    /// Also estimate at infeasible poll points (never accepted). Off in
    /// production; exists to inspect estimator behaviour.
    pub estimate_infeasible: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            variant: Variant::StoDars,
            gamma: 4.0,
            eps_f: 0.25,
            tau: 0.5,
            delta0: 1.0,
            j_max: 10,
            p: SubspaceDim::Fixed(2),
            pss: PssSize::Minimal,
            nk_schedule: SampleSchedule::Fixed(4),
            opportunistic: true,
            sort_by_last_success: true,
            budget: Budget::PerDimension(1500),
            estimate_infeasible: false,
        }
    }
}

const KEYS: [&str; 13] = [
    "variant",
    "gamma",
    "eps_f",
    "tau",
    "delta0",
    "j_max",
    "p",
    "pss",
    "nk_schedule",
    "opportunistic",
    "sort_by_last_success",
    "budget",
    "estimate_infeasible",
];

impl SolverConfig {
    pub fn stodars(p: SubspaceDim) -> Self {
        Self {
            p,
            ..Self::default()
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// Upper bound on `τ`: `√((γ − 2)/(γ + 2))`.
    pub fn tau_bound(&self) -> f64 {
        ((self.gamma - 2.0) / (self.gamma + 2.0)).sqrt()
    }

    /// `δ_max = τ^{−j_max} δ_0`.
    pub fn delta_max(&self) -> f64 {
        self.delta0 * self.tau.powi(-(self.j_max as i32))
    }

    /// The acceptance product `γ ε_f`.
    pub fn acceptance_product(&self) -> f64 {
        self.gamma * self.eps_f
    }

    /// Checks dimension-free invariants. Errors name the key as written in a
    /// config file (`solver.<field>`).
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 2.0 && self.gamma.is_finite()) {
            return Err(Error::config("solver.gamma", "gamma must satisfy gamma > 2"));
        }
        if !(self.eps_f > 0.0 && self.eps_f.is_finite()) {
            return Err(Error::config("solver.eps_f", "eps_f must be positive"));
        }
        let bound = self.tau_bound();
        if !(self.tau > 0.0 && self.tau < bound) {
            return Err(Error::config(
                "solver.tau",
                format!("tau must lie in (0, sqrt((gamma-2)/(gamma+2))) = (0, {bound:.6})"),
            ));
        }
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(Error::config("solver.delta0", "delta0 must be positive"));
        }
        if self.p == SubspaceDim::Fixed(0) {
            return Err(Error::config("solver.p", "subspace dimension must be >= 1"));
        }
        self.nk_schedule.validate()?;
        if self.budget.resolve(0) == 0 {
            return Err(Error::config("solver.budget", "budget must be >= 1"));
        }
        Ok(())
    }

    /// Checks invariants that depend on the problem dimension.
    pub fn validate_for_dim(&self, n: usize) -> Result<()> {
        self.validate()?;
        let p = self.p.resolve(n);
        if self.variant == Variant::StoDars && p > n {
            return Err(Error::config("solver.p", format!("p = {p} exceeds n = {n}")));
        }
        Ok(())
    }

    /// Poll set size `m` for dimension `n`.
    pub fn poll_size(&self, n: usize) -> usize {
        match self.variant {
            Variant::StoDars => match self.pss {
                PssSize::Minimal => self.p.resolve(n) + 1,
                PssSize::Maximal => 2 * self.p.resolve(n),
            },
            Variant::SddsMinimal => n + 1,
            Variant::Fullspace2n => 2 * n,
        }
    }

    /// Reads `solver.*` keys; unknown keys are rejected.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let section = kv.section("solver");
        for key in section.keys() {
            if !KEYS.contains(&key) {
                return Err(Error::config(format!("solver.{key}"), "unknown key"));
            }
        }
        let mut c = Self::default();
        let full = |k: &str| format!("solver.{k}");
        macro_rules! read {
            ($field:ident) => {
                if let Some(v) = kv.parsed(&full(stringify!($field)))? {
                    c.$field = v;
                }
            };
        }
        read!(variant);
        read!(gamma);
        read!(eps_f);
        read!(tau);
        read!(delta0);
        read!(j_max);
        read!(p);
        read!(pss);
        read!(opportunistic);
        read!(sort_by_last_success);
        read!(budget);
        read!(estimate_infeasible);
        if let Some(v) = kv.get("solver.nk_schedule") {
            c.nk_schedule = parse_schedule(v).map_err(|e| Error::config("solver.nk_schedule", e))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_key_values(&KeyValues::parse(text)?)
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.insert("solver.variant", self.variant);
        kv.insert("solver.gamma", self.gamma);
        kv.insert("solver.eps_f", self.eps_f);
        kv.insert("solver.tau", self.tau);
        kv.insert("solver.delta0", self.delta0);
        kv.insert("solver.j_max", self.j_max);
        kv.insert("solver.p", self.p);
        kv.insert("solver.pss", self.pss);
        kv.insert("solver.nk_schedule", schedule_to_string(&self.nk_schedule));
        kv.insert("solver.opportunistic", self.opportunistic);
        kv.insert("solver.sort_by_last_success", self.sort_by_last_success);
        kv.insert("solver.budget", self.budget);
        kv.insert("solver.estimate_infeasible", self.estimate_infeasible);
        kv
    }

    pub fn to_config_string(&self) -> String {
        self.to_key_values().to_text()
    }
}
