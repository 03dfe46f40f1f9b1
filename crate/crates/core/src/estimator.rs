//! Monte-Carlo function estimates with sample reuse at the incumbent.
//!
//! The incumbent estimate aggregates `π_k` samples. After a successful
//! iteration the accepted trial estimate (`n_k` samples) becomes the new
//! incumbent and is topped up with `n_{k+1}` fresh samples, so
//! `π_{k+1} = n_k + n_{k+1}`. After an unsuccessful one the incumbent is
//! unchanged and `n_{k+1}` fresh samples are added, `π_{k+1} = π_k + n_{k+1}`.
//! Trial estimates are always fresh.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::problems::{NoisyProblem, SmoothProblem};
use crate::rng::StreamRng;

/// Accuracy target `|f_k − f| <= ε_f δ²`, held with probability `β_f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccuracyParams {
    pub eps_f: f64,
    pub beta_f: f64,
}

impl AccuracyParams {
    pub fn new(eps_f: f64, beta_f: f64) -> Result<Self> {
        if !(eps_f > 0.0 && eps_f.is_finite()) {
            return Err(Error::config("eps_f", "must be positive"));
        }
        if !(beta_f > 0.0 && beta_f < 1.0) {
            return Err(Error::config("beta_f", "must lie in (0, 1)"));
        }
        Ok(Self { eps_f, beta_f })
    }

    /// Half-width of the accuracy band at stepsize `delta`.
    pub fn band(&self, delta: f64) -> f64 {
        self.eps_f * delta * delta
    }
}

/// Number of samples `n_k` per new estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleSchedule {
    Fixed(usize),
    /// `n_k = clamp(⌈c / δ_k⁴⌉, 1, max)`, the order required for
    /// probabilistic accuracy. Intended for diagnostics.
    InverseQuartic { c: f64, max: usize },
}

impl SampleSchedule {
    pub fn count(&self, delta: f64) -> usize {
        match *self {
            SampleSchedule::Fixed(n) => n,
            SampleSchedule::InverseQuartic { c, max } => {
                let raw = (c / delta.powi(4)).ceil();
                if raw.is_finite() {
                    (raw as usize).clamp(1, max.max(1))
                } else {
                    max.max(1)
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SampleSchedule::Fixed(0) => Err(Error::config("solver.nk_schedule", "sample count must be >= 1")),
            SampleSchedule::InverseQuartic { c, max } if !(c > 0.0) || max == 0 => Err(Error::config(
                "solver.nk_schedule",
                "quartic schedule needs c > 0 and max >= 1",
            )),
            _ => Ok(()),
        }
    }
}

/// A sample mean and the number of samples behind it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub count: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::ZeroSampleCount);
        }
        Ok(Self {
            mean: samples.iter().sum::<f64>() / samples.len() as f64,
            count: samples.len(),
        })
    }
}

/// Mean of `count` fresh noisy samples at `x`.
pub fn fresh_estimate<R: Rng + ?Sized>(p: &NoisyProblem, x: &[f64], count: usize, rng: &mut R) -> Result<Estimate> {
    let samples = draw_samples(p, x, count, rng)?;
    Estimate::from_samples(&samples)
}

fn draw_samples<R: Rng + ?Sized>(p: &NoisyProblem, x: &[f64], count: usize, rng: &mut R) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::ZeroSampleCount);
    }
    (0..count).map(|_| p.eval_noisy(x, rng)).collect()
}

/// Sample-reuse state for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateCache {
    incumbent_sum: f64,
    incumbent_count: usize,
    last_trial: Option<Estimate>,
}

impl EstimateCache {
    /// Initial incumbent estimate from `π_0 = n_0` samples.
    pub fn new(samples: &[f64]) -> Result<Self> {
        let first = Estimate::from_samples(samples)?;
        Ok(Self {
            incumbent_sum: samples.iter().sum(),
            incumbent_count: first.count,
            last_trial: None,
        })
    }

    pub fn incumbent(&self) -> Estimate {
        Estimate {
            mean: self.incumbent_mean(),
            count: self.incumbent_count,
        }
    }

    pub fn incumbent_mean(&self) -> f64 {
        self.incumbent_sum / self.incumbent_count as f64
    }

    /// `π_k`.
    pub fn incumbent_count(&self) -> usize {
        self.incumbent_count
    }

    pub fn last_trial(&self) -> Option<Estimate> {
        self.last_trial
    }

    pub fn record_trial(&mut self, trial: Estimate) {
        self.last_trial = Some(trial);
    }

    /// The accepted trial becomes the incumbent, topped up with `fresh`.
    pub fn promote_on_success(&mut self, trial: Estimate, fresh: &[f64]) -> Result<()> {
        if fresh.is_empty() || trial.count == 0 {
            return Err(Error::ZeroSampleCount);
        }
        self.incumbent_sum = trial.mean * trial.count as f64 + fresh.iter().sum::<f64>();
        self.incumbent_count = trial.count + fresh.len();
        self.last_trial = None;
        Ok(())
    }

    /// Adds `fresh` samples at the unchanged incumbent.
    pub fn refine_on_failure(&mut self, fresh: &[f64]) -> Result<()> {
        if fresh.is_empty() {
            return Err(Error::ZeroSampleCount);
        }
        self.incumbent_sum += fresh.iter().sum::<f64>();
        self.incumbent_count += fresh.len();
        self.last_trial = None;
        Ok(())
    }
}

/// One logged noisy sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRecord {
    pub iteration: usize,
    pub point_hash: u64,
    pub value: f64,
}

/// Line-oriented log of every noisy sample drawn in a run:
/// `iteration<TAB>point-hash<TAB>value`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleLog {
    pub records: Vec<SampleRecord>,
}

impl SampleLog {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.records {
            writeln!(w, "{}\t{:016x}\t{}", r.iteration, r.point_hash, r.value)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut records = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("sample log line {}: `{line}`", lineno + 1));
            let mut fields = line.split('\t');
            let (Some(it), Some(hash), Some(value), None) = (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad());
            };
            records.push(SampleRecord {
                iteration: it.parse().map_err(|_| bad())?,
                point_hash: u64::from_str_radix(hash, 16).map_err(|_| bad())?,
                value: value.parse().map_err(|_| bad())?,
            });
        }
        Ok(Self { records })
    }

    /// All logged values at a point.
    pub fn values_at(&self, x: &[f64]) -> Vec<f64> {
        let h = point_hash(x);
        self.records.iter().filter(|r| r.point_hash == h).map(|r| r.value).collect()
    }
}

/// FNV-1a over the bit patterns of the coordinates.
pub fn point_hash(x: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in x {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Source of function estimates for the solver.
///
/// The solver owns the evaluation budget and passes the number of samples
/// each request may consume.
pub trait Estimator {
    /// Builds the first incumbent estimate at `x0` from `count` samples.
    fn start(&mut self, x0: &[f64], count: usize) -> Result<()>;

    /// Current incumbent estimate `f_k(0)` for stepsize `delta`.
    fn incumbent(&mut self, x: &[f64], delta: f64) -> f64;

    /// Trial estimate `f_k(u)` at a poll point.
    fn trial(&mut self, x: &[f64], delta: f64, count: usize) -> Result<Estimate>;

    /// `x_new` with trial estimate `trial` is the new incumbent.
    fn promote(&mut self, x_new: &[f64], trial: Estimate, count: usize) -> Result<()>;

    /// The incumbent `x` survives an unsuccessful iteration.
    fn refine(&mut self, x: &[f64], count: usize) -> Result<()>;

    /// Iteration counter for logging; optional.
    fn set_iteration(&mut self, _k: usize) {}
}

/// Monte-Carlo estimates from a noisy problem with sample reuse.
pub struct MonteCarloEstimator<'p> {
    problem: &'p NoisyProblem,
    rng: StreamRng,
    cache: Option<EstimateCache>,
    log: Option<SampleLog>,
    iteration: usize,
}

impl<'p> MonteCarloEstimator<'p> {
    pub fn new(problem: &'p NoisyProblem, rng: StreamRng) -> Self {
        Self {
            problem,
            rng,
            cache: None,
            log: None,
            iteration: 0,
        }
    }

    /// Keeps every drawn sample in a [`SampleLog`].
    pub fn with_log(mut self) -> Self {
        self.log = Some(SampleLog::default());
        self
    }

    pub fn cache(&self) -> Option<&EstimateCache> {
        self.cache.as_ref()
    }

    pub fn take_log(&mut self) -> Option<SampleLog> {
        self.log.take()
    }

    fn samples(&mut self, x: &[f64], count: usize) -> Result<Vec<f64>> {
        let samples = draw_samples(self.problem, x, count, &mut self.rng)?;
        if let Some(log) = &mut self.log {
            let h = point_hash(x);
            log.records.extend(samples.iter().map(|&value| SampleRecord {
                iteration: self.iteration,
                point_hash: h,
                value,
            }));
        }
        Ok(samples)
    }

    fn cache_mut(&mut self) -> &mut EstimateCache {
        self.cache.as_mut().expect("estimator used before start()")
    }
}

impl Estimator for MonteCarloEstimator<'_> {
    fn start(&mut self, x0: &[f64], count: usize) -> Result<()> {
        let samples = self.samples(x0, count)?;
        self.cache = Some(EstimateCache::new(&samples)?);
        Ok(())
    }

    fn incumbent(&mut self, _x: &[f64], _delta: f64) -> f64 {
        self.cache_mut().incumbent_mean()
    }

    fn trial(&mut self, x: &[f64], _delta: f64, count: usize) -> Result<Estimate> {
        let samples = self.samples(x, count)?;
        let est = Estimate::from_samples(&samples)?;
        self.cache_mut().record_trial(est);
        Ok(est)
    }

    fn promote(&mut self, x_new: &[f64], trial: Estimate, count: usize) -> Result<()> {
        let fresh = self.samples(x_new, count)?;
        self.cache_mut().promote_on_success(trial, &fresh)
    }

    fn refine(&mut self, x: &[f64], count: usize) -> Result<()> {
        let fresh = self.samples(x, count)?;
        self.cache_mut().refine_on_failure(&fresh)
    }

    fn set_iteration(&mut self, k: usize) {
        self.iteration = k;
    }
}

/// How an [`OracleEstimator`] places its estimates relative to `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Returns `f` itself.
    Exact,
    /// On the edge of the accuracy band, against acceptance soundness:
    /// incumbent `f + ε_f δ²`, trial `f − ε_f δ²`.
    WorstCaseGood,
    /// Outside the band (`±3 ε_f δ²`), so accepted steps may increase `f`.
    AdversarialBad,
}

/// Deterministic estimator built from the true objective.
#[derive(Clone, Debug)]
pub struct OracleEstimator {
    problem: SmoothProblem,
    eps_f: f64,
    mode: OracleMode,
}

impl OracleEstimator {
    pub fn new(problem: SmoothProblem, eps_f: f64, mode: OracleMode) -> Self {
        Self { problem, eps_f, mode }
    }

    fn offset(&self, delta: f64) -> f64 {
        let band = self.eps_f * delta * delta;
        match self.mode {
            OracleMode::Exact => 0.0,
            OracleMode::WorstCaseGood => band,
            OracleMode::AdversarialBad => 3.0 * band,
        }
    }

    pub fn incumbent_estimate(&self, x: &[f64], delta: f64) -> Result<f64> {
        Ok(self.problem.eval_true(x)? + self.offset(delta))
    }

    pub fn trial_estimate(&self, x: &[f64], delta: f64) -> Result<f64> {
        Ok(self.problem.eval_true(x)? - self.offset(delta))
    }
}

impl Estimator for OracleEstimator {
    fn start(&mut self, x0: &[f64], _count: usize) -> Result<()> {
        self.problem.eval_true(x0).map(|_| ())
    }

    fn incumbent(&mut self, x: &[f64], delta: f64) -> f64 {
        self.incumbent_estimate(x, delta).unwrap_or(f64::NAN)
    }

    fn trial(&mut self, x: &[f64], delta: f64, count: usize) -> Result<Estimate> {
        Ok(Estimate {
            mean: self.trial_estimate(x, delta)?,
            count,
        })
    }

    fn promote(&mut self, _x_new: &[f64], _trial: Estimate, _count: usize) -> Result<()> {
        Ok(())
    }

    fn refine(&mut self, _x: &[f64], _count: usize) -> Result<()> {
        Ok(())
    }
}
