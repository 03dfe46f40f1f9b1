//! Poll-set construction, ordering and the poll loop.

use std::collections::BTreeMap;

use super::config::{PssSize, SolverConfig, Variant};
use crate::error::Result;
use crate::estimator::Estimator;
use crate::geometry::{
    dot, map_to_fullspace, maximal_positive_basis_from, minimal_positive_basis, sample_haar_frame,
    sample_haar_orthogonal, DirectionSet, DirectionTag, SubspaceFrame,
};
use crate::problems::SmoothProblem;
use crate::rng::{StreamKind, Streams};

const MEMO_CAPACITY: usize = 64;

/// Builds the poll directions for matrix index `t`.
///
/// Frame and PSS for index `t` come from the streams `(Matrix, t)` and
/// `(Pss, t)`, so revisiting a `t` yields the same directions. Recent sets
/// are memoized; evicted ones are regenerated bit-for-bit.
#[derive(Debug)]
pub struct PollSetBuilder {
    n: usize,
    p: usize,
    variant: Variant,
    pss: PssSize,
    streams: Streams,
    memo: BTreeMap<u64, (SubspaceFrame, DirectionSet)>,
}

impl PollSetBuilder {
    pub fn new(config: &SolverConfig, n: usize, streams: Streams) -> Result<Self> {
        config.validate_for_dim(n)?;
        let p = match config.variant {
            Variant::StoDars => config.p.resolve(n),
            Variant::SddsMinimal | Variant::Fullspace2n => n,
        };
        Ok(Self {
            n,
            p,
            variant: config.variant,
            pss: config.pss,
            streams,
            memo: BTreeMap::new(),
        })
    }

    /// Frame and full-space poll directions for index `t`.
    pub fn build(&mut self, t: u64) -> Result<(SubspaceFrame, DirectionSet)> {
        if let Some(hit) = self.memo.get(&t) {
            return Ok(hit.clone());
        }
        let built = self.generate(t)?;
        if self.memo.len() >= MEMO_CAPACITY {
            self.memo.pop_last();
        }
        self.memo.insert(t, built.clone());
        Ok(built)
    }

    fn generate(&self, t: u64) -> Result<(SubspaceFrame, DirectionSet)> {
        let mut matrix_rng = self.streams.stream(StreamKind::Matrix, t);
        let mut pss_rng = self.streams.stream(StreamKind::Pss, t);
        match self.variant {
            Variant::StoDars => {
                let frame = sample_haar_frame(self.n, self.p, &mut matrix_rng)?.with_origin(t);
                let d = match self.pss {
                    PssSize::Minimal => minimal_positive_basis(self.p, &mut pss_rng)?,
                    PssSize::Maximal => {
                        let b = sample_haar_orthogonal(self.p, &mut pss_rng)?;
                        maximal_positive_basis_from(b.matrix(), DirectionTag::PssSubspace)?
                    }
                };
                let dirs = map_to_fullspace(&frame, &d)?;
                Ok((frame, dirs))
            }
            Variant::SddsMinimal => {
                let frame = SubspaceFrame::coordinate(self.n, self.n)?.with_origin(t);
                let d = minimal_positive_basis(self.n, &mut pss_rng)?;
                let dirs = map_to_fullspace(&frame, &d)?;
                Ok((frame, dirs))
            }
            Variant::Fullspace2n => {
                let u = sample_haar_orthogonal(self.n, &mut matrix_rng)?;
                let frame = SubspaceFrame::new(u.matrix().clone())?.with_origin(t);
                let dirs = maximal_positive_basis_from(u.matrix(), DirectionTag::PollFullspace)?;
                Ok((frame, dirs))
            }
        }
    }
}

/// Sorts by descending `⟨d, last_success⟩`, keeping the original order among
/// ties. Without a last success the order is unchanged.
pub fn order_directions(dirs: &DirectionSet, last_success: Option<&[f64]>) -> DirectionSet {
    let Some(s) = last_success else {
        return dirs.clone();
    };
    let scores: Vec<f64> = dirs.iter().map(|d| dot(d, s)).collect();
    let mut perm: Vec<usize> = (0..dirs.len()).collect();
    perm.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    dirs.permuted(&perm)
}

/// Result of one poll step.
#[derive(Clone, Debug, PartialEq)]
pub struct PollOutcome {
    pub success: bool,
    pub accepted_direction: Option<Vec<f64>>,
    /// `f_k(u) − f_k(0)` of the accepted point.
    pub decrease_value: Option<f64>,
    /// Trial estimate at the accepted point.
    pub accepted_estimate: Option<crate::estimator::Estimate>,
    pub evals_used: u64,
    pub trials: usize,
    /// The budget ran out before the poll finished.
    pub budget_exhausted: bool,
}

/// Everything the poll needs besides the estimator.
#[derive(Clone, Copy, Debug)]
pub struct PollContext<'a> {
    pub problem: &'a SmoothProblem,
    pub x: &'a [f64],
    pub delta: f64,
    pub samples: usize,
    /// Evaluations still available.
    pub remaining: u64,
}

/// Polls `x + δ u` for `u` in `dirs`, in order.
///
/// Infeasible points are skipped without estimates unless
/// `estimate_infeasible` is set, in which case they are estimated but never
/// accepted.
pub fn poll(ctx: PollContext<'_>, config: &SolverConfig, dirs: &DirectionSet, estimator: &mut dyn Estimator) -> Result<PollOutcome> {
    let threshold = -config.acceptance_product() * ctx.delta * ctx.delta;
    let incumbent = estimator.incumbent(ctx.x, ctx.delta);
    let mut out = PollOutcome {
        success: false,
        accepted_direction: None,
        decrease_value: None,
        accepted_estimate: None,
        evals_used: 0,
        trials: 0,
        budget_exhausted: false,
    };
    let mut point = vec![0.0; ctx.x.len()];
    for u in dirs.iter() {
        point.iter_mut().zip(ctx.x.iter().zip(u)).for_each(|(p, (x, d))| *p = x + ctx.delta * d);
        let feasible = ctx.problem.is_feasible(&point);
        if !feasible && !config.estimate_infeasible {
            continue;
        }
        if out.evals_used + ctx.samples as u64 > ctx.remaining {
            out.budget_exhausted = true;
            break;
        }
        let est = estimator.trial(&point, ctx.delta, ctx.samples)?;
        out.evals_used += ctx.samples as u64;
        out.trials += 1;
        if !feasible {
            continue;
        }
        let decrease = est.mean - incumbent;
        if decrease <= threshold && out.decrease_value.is_none_or(|best| decrease < best) {
            out.success = true;
            out.accepted_direction = Some(u.to_vec());
            out.decrease_value = Some(decrease);
            out.accepted_estimate = Some(est);
            if config.opportunistic {
                break;
            }
        }
    }
    Ok(out)
}
