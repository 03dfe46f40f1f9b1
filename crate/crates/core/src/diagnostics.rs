//! Monte-Carlo checks of the geometric and probabilistic facts the solver
//! relies on, plus the `Φ_k` trend of a finished run.
//!
//! Every check draws trial `i` from its own stream, so results do not depend
//! on the degree of parallelism.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{cosine_measure, minimal_positive_basis, norm, sample_haar_frame, FrameSampler};
use crate::par::{map_indexed, Parallelism};
use crate::rng::{StreamKind, Streams};
use crate::solver::RunTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Informational,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Informational => "info",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticReport {
    pub name: String,
    pub trials: usize,
    pub empirical: f64,
    pub reference: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl DiagnosticReport {
    /// Pass iff `|empirical − reference| ≤ tolerance`.
    fn banded(name: String, trials: usize, empirical: f64, reference: f64, tolerance: f64) -> Self {
        let verdict = if (empirical - reference).abs() <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name,
            trials,
            empirical,
            reference: Some(reference),
            tolerance,
            verdict,
            note: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

impl fmt::Display for DiagnosticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} trials={} empirical={:.6}", self.verdict, self.name, self.trials, self.empirical)?;
        if let Some(r) = self.reference {
            write!(f, " reference={r:.6}")?;
        }
        write!(f, " tolerance={:.3e}", self.tolerance)?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

/// Half-width `1.96 √(p̂(1 − p̂)/N)` of a frequency estimate.
pub fn frequency_error(p_hat: f64, trials: usize) -> f64 {
    1.96 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt()
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

fn unit_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm(&v);
        if r > 0.0 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

fn check_trials(trials: usize, min: usize) -> Result<()> {
    if trials < min {
        return Err(Error::InvalidDimension(format!("need at least {min} trials, got {trials}")));
    }
    Ok(())
}

const JLT: u32 = 1;
const ACUTE: u32 = 2;
const HAAR: u32 = 3;
const SPHERE: u32 = 4;

/// In-band frequency `P[(1 − ε)‖x‖ ≤ ‖Qᵀx‖ ≤ (1 + ε)‖x‖]` for each `p`,
/// with `x` a fresh random unit vector per trial.
///
/// Reports come back sorted by `p`. A report passes when its frequency is
/// not below the previous one by more than two error bars, and, at `p = n`,
/// when the frequency is at least 0.99.
pub fn check_jlt(
    n: usize,
    p_list: &[usize],
    eps_q: f64,
    trials: usize,
    seed: u64,
    parallelism: Parallelism,
) -> Result<Vec<DiagnosticReport>> {
    check_trials(trials, 1)?;
    if !(eps_q > 0.0) {
        return Err(Error::config("eps_q", "must be positive"));
    }
    let mut ps = p_list.to_vec();
    ps.sort_unstable();
    ps.dedup();
    let streams = Streams::new(seed);
    let mut reports = Vec::with_capacity(ps.len());
    let mut prev: Option<(f64, f64)> = None;
    for &p in &ps {
        let sampler = FrameSampler::new(n, p, streams.child(JLT as u64 * 1000 + p as u64))?;
        let hits = map_indexed(trials, parallelism, |i| {
            let mut rng = streams.stream(StreamKind::Diagnostic(JLT), i as u64);
            let x = unit_gaussian(n, &mut rng);
            let r = norm(&sampler.sample(i as u64).sketch(&x));
            (1.0 - eps_q..=1.0 + eps_q).contains(&r)
        });
        let freq = hits.iter().filter(|&&h| h).count() as f64 / trials as f64;
        let err = frequency_error(freq, trials);
        let mut ok = prev.is_none_or(|(pf, pe)| freq >= pf - 2.0 * pe.max(err));
        let mut note = String::new();
        if p == n {
            ok &= freq >= 0.99;
            note = "full dimension".into();
        }
        reports.push(DiagnosticReport {
            name: format!("jlt_n{n}_p{p}_eps{eps_q}"),
            trials,
            empirical: freq,
            reference: None,
            tolerance: 2.0 * err,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            note,
        });
        prev = Some((freq, err));
    }
    Ok(reports)
}

/// Acute-angle frequency against well-alignment frequency for `v = e₁`.
///
/// Each trial draws a frame and a minimal positive basis of `R^p`. The
/// cosine measure of such a basis is invariant under the random rotation,
/// so it is computed once from the first draw.
pub fn check_acute_angle(
    n: usize,
    p: usize,
    alpha_q: f64,
    trials: usize,
    seed: u64,
    parallelism: Parallelism,
) -> Result<DiagnosticReport> {
    check_trials(trials, 1)?;
    if !(alpha_q > 0.0 && alpha_q < 0.5) {
        return Err(Error::config("alpha_q", "must lie in (0, 1/2)"));
    }
    let streams = Streams::new(seed);
    let sampler = FrameSampler::new(n, p, streams.child(ACUTE as u64))?;
    let pss = |i: usize| {
        let mut rng = streams.stream(StreamKind::Diagnostic(ACUTE), i as u64);
        minimal_positive_basis(p, &mut rng)
    };
    let kappa = cosine_measure(&pss(0)?)?;
    acute_angle_from(n, alpha_q, kappa, trials, parallelism, |i| {
        Ok((sampler.sample(i as u64), pss(i)?))
    })
}

/// Shared body of the acute-angle check; `draw(i)` yields trial `i`'s frame
/// and subspace PSS.
pub fn acute_angle_from<F>(
    n: usize,
    alpha_q: f64,
    kappa: f64,
    trials: usize,
    parallelism: Parallelism,
    draw: F,
) -> Result<DiagnosticReport>
where
    F: Fn(usize) -> Result<(crate::geometry::SubspaceFrame, crate::geometry::DirectionSet)> + Sync + Send,
{
    let name = format!("acute_angle_n{n}_alpha{alpha_q}");
    if kappa <= 0.0 {
        return Ok(DiagnosticReport {
            name,
            trials: 0,
            empirical: kappa,
            reference: None,
            tolerance: 0.0,
            verdict: Verdict::Informational,
            note: "cosine measure not positive; check skipped".into(),
        });
    }
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    let outcomes = map_indexed(trials, parallelism, |i| -> Result<(bool, bool)> {
        let (frame, d) = draw(i)?;
        let sketch = frame.sketch(&v);
        let aligned = norm(&sketch) >= alpha_q;
        // ⟨v, Q d⟩ = ⟨Qᵀv, d⟩
        let best = d
            .iter()
            .map(|di| di.iter().zip(&sketch).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((aligned, best >= alpha_q * kappa))
    });
    let mut aligned = 0usize;
    let mut acute = 0usize;
    for o in outcomes {
        let (a, b) = o?;
        aligned += a as usize;
        acute += b as usize;
    }
    let fa = aligned as f64 / trials as f64;
    let fb = acute as f64 / trials as f64;
    let err = frequency_error(fa, trials).max(frequency_error(fb, trials));
    Ok(DiagnosticReport {
        name,
        trials,
        empirical: fb,
        reference: Some(fa),
        tolerance: 2.0 * err,
        verdict: if fb >= fa - 2.0 * err { Verdict::Pass } else { Verdict::Fail },
        note: format!("kappa={kappa:.6}, well-aligned frequency={fa:.6}"),
    })
}

/// Sample moments of `U₁₁`: mean against 0 and second moment against `1/n`,
/// each within four standard errors.
pub fn check_haar_moments(n: usize, trials: usize, seed: u64, parallelism: Parallelism) -> Result<Vec<DiagnosticReport>> {
    check_trials(trials, 2)?;
    let streams = Streams::new(seed);
    // U₁₁ only depends on the first column, which the thin sampler draws
    // exactly as the full one does
    let sampler = FrameSampler::new(n, 1, streams.child(HAAR as u64))?;
    let u11 = map_indexed(trials, parallelism, |i| sampler.sample(i as u64).columns()[(0, 0)]);
    let sq: Vec<f64> = u11.iter().map(|x| x * x).collect();
    let (m1, s1) = mean_and_stderr(&u11);
    let (m2, s2) = mean_and_stderr(&sq);
    Ok(vec![
        DiagnosticReport::banded(format!("haar_mean_u11_n{n}"), trials, m1, 0.0, 4.0 * s1),
        DiagnosticReport::banded(format!("haar_mean_u11_sq_n{n}"), trials, m2, 1.0 / n as f64, 4.0 * s2),
    ])
}

/// `u = U d` for a random frame and a uniform `d` on the sphere of `R^p`:
/// unit norm every time, first coordinate with mean 0 and second moment
/// `1/n`.
pub fn check_sphere_uniformity(
    n: usize,
    p: usize,
    trials: usize,
    seed: u64,
    parallelism: Parallelism,
) -> Result<Vec<DiagnosticReport>> {
    check_trials(trials, 2)?;
    let streams = Streams::new(seed);
    let draws = map_indexed(trials, parallelism, |i| -> Result<(f64, f64)> {
        let mut rng = streams.stream(StreamKind::Diagnostic(SPHERE), i as u64);
        let frame = sample_haar_frame(n, p, &mut rng)?;
        let d = unit_gaussian(p, &mut rng);
        let u = frame.embed(&d);
        Ok(((norm(&u) - 1.0).abs(), u[0]))
    });
    let mut worst = 0.0f64;
    let mut first = Vec::with_capacity(trials);
    for d in draws {
        let (dev, u1) = d?;
        worst = worst.max(dev);
        first.push(u1);
    }
    let sq: Vec<f64> = first.iter().map(|x| x * x).collect();
    let (m1, s1) = mean_and_stderr(&first);
    let (m2, s2) = mean_and_stderr(&sq);
    Ok(vec![
        DiagnosticReport::banded(format!("sphere_norm_n{n}_p{p}"), trials, worst, 0.0, 1e-12),
        DiagnosticReport::banded(format!("sphere_mean_u1_n{n}_p{p}"), trials, m1, 0.0, 4.0 * s1),
        DiagnosticReport::banded(format!("sphere_mean_u1_sq_n{n}_p{p}"), trials, m2, 1.0 / n as f64, 4.0 * s2),
    ])
}

pub const PHI_WINDOW: usize = 50;

/// `Φ_k = (ν/ε_f)(f(x_k) − f_min) + (1 − ν)δ_k²` along a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSummary {
    pub phi: Vec<f64>,
    pub sum_delta_sq: f64,
    /// Medians of consecutive windows of [`PHI_WINDOW`] iterations (the last
    /// window may be shorter).
    pub window_medians: Vec<f64>,
    pub windowed_nonincreasing: bool,
    pub report: DiagnosticReport,
}

impl PhiSummary {
    pub fn final_median_below_initial(&self) -> bool {
        self.window_medians.last().is_some_and(|&m| m < self.phi[0])
    }
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Always informational: one sample path of a supermartingale may rise.
pub fn supermartingale_trace(trace: &RunTrace, nu: f64, eps_f: f64, f_min: f64) -> Result<PhiSummary> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::config("nu", "must lie in (0, 1)"));
    }
    if !(eps_f > 0.0) {
        return Err(Error::config("eps_f", "must be positive"));
    }
    let phi: Vec<f64> = trace
        .records
        .iter()
        .map(|r| nu / eps_f * (r.f_true - f_min) + (1.0 - nu) * r.delta * r.delta)
        .collect();
    let sum_delta_sq = trace.records.iter().map(|r| r.delta * r.delta).sum();
    let window_medians: Vec<f64> = phi.chunks(PHI_WINDOW).map(median).collect();
    let windowed_nonincreasing = window_medians.windows(2).all(|w| w[1] <= w[0]);
    let last = *window_medians.last().expect("trace has an initial record");
    let report = DiagnosticReport {
        name: format!("phi_trend_{}_{}_seed{}", trace.problem, trace.solver, trace.seed),
        trials: trace.records.len(),
        empirical: last,
        reference: Some(phi[0]),
        tolerance: 0.0,
        verdict: Verdict::Informational,
        note: format!("sum delta^2={sum_delta_sq:.6}, windowed nonincreasing={windowed_nonincreasing}"),
    };
    Ok(PhiSummary {
        phi,
        sum_delta_sq,
        window_medians,
        windowed_nonincreasing,
        report,
    })
}

/// Which checks `verify` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    All,
    Haar,
    Sphere,
    Jlt,
    Acute,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "haar" => Ok(Suite::Haar),
            "sphere" => Ok(Suite::Sphere),
            "jlt" => Ok(Suite::Jlt),
            "acute" => Ok(Suite::Acute),
            _ => Err(Error::config("suite", format!("unknown suite `{s}` (all, haar, sphere, jlt, acute)"))),
        }
    }
}

/// Runs a suite at the given trial count.
pub fn run_suite(suite: Suite, trials: usize, seed: u64, parallelism: Parallelism) -> Result<Vec<DiagnosticReport>> {
    let mut out = Vec::new();
    let want = |s: Suite| suite == Suite::All || suite == s;
    if want(Suite::Haar) {
        for n in [2, 10, 100] {
            out.extend(check_haar_moments(n, trials, seed, parallelism)?);
        }
    }
    if want(Suite::Sphere) {
        out.extend(check_sphere_uniformity(10, 3, trials, seed, parallelism)?);
        out.extend(check_sphere_uniformity(10, 1, trials, seed, parallelism)?);
    }
    if want(Suite::Jlt) {
        out.extend(check_jlt(100, &[5, 20, 50, 100], 0.5, trials, seed, parallelism)?);
    }
    if want(Suite::Acute) {
        out.push(check_acute_angle(50, 10, 0.1, trials, seed, parallelism)?);
    }
    Ok(out)
}

pub fn write_text<W: Write>(reports: &[DiagnosticReport], mut w: W) -> Result<()> {
    for r in reports {
        writeln!(w, "{r}")?;
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    writeln!(w, "{} checks, {} failed", reports.len(), failed)?;
    Ok(())
}

pub fn write_csv<W: Write>(reports: &[DiagnosticReport], mut w: W) -> Result<()> {
    writeln!(w, "name,trials,empirical,reference,tolerance,verdict")?;
    for r in reports {
        let reference = r.reference.map(|x| x.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{},{}", r.name, r.trials, r.empirical, reference, r.tolerance, r.verdict)?;
    }
    Ok(())
}
