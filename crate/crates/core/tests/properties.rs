use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stodars::estimator::{fresh_estimate, SampleSchedule};
use stodars::geometry::{norm, DirectionSet, DirectionTag};
use stodars::problems::{lookup, Family, NoiseDist, NoiseKind, NoiseModel, NoisyProblem, SmoothProblem};
use stodars::solver::{order_directions, run, IndexAutomaton, Outcome, SolverConfig, StepSize, SubspaceDim};
use stodars::diagnostics::supermartingale_trace;

fn outcome(b: bool) -> Outcome {
    if b {
        Outcome::Success
    } else {
        Outcome::Failure
    }
}

proptest! {
    #[test]
    fn step_stays_on_lattice(seq in prop::collection::vec(any::<bool>(), 0..300), j_max in 0u32..12) {
        let (delta0, tau) = (0.7, 0.5);
        let mut s = StepSize::new(delta0, tau, j_max);
        for b in seq {
            s.update(outcome(b));
            let delta = s.delta();
            prop_assert!(delta <= s.delta_max() * (1.0 + 1e-12));
            prop_assert!(s.exponent() >= -(j_max as i32));
            let expected = delta0 * tau.powi(s.exponent());
            prop_assert!((delta - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn ell_moves_by_one_and_fresh_t_increase(seq in prop::collection::vec(any::<bool>(), 1..400)) {
        let mut a = IndexAutomaton::default();
        let mut last_fresh: Option<u64> = None;
        for b in seq {
            let before = a.ell();
            a.update(outcome(b));
            prop_assert_eq!(a.ell() - before, if b { -1 } else { 1 });
            if a.last_was_fresh() {
                prop_assert!(last_fresh.is_none_or(|l| a.t() > l));
                prop_assert!(a.t() == a.max_t());
                last_fresh = Some(a.t());
            }
        }
    }

    #[test]
    fn ordering_is_a_stable_permutation(
        raw in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 1..12),
        s in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let vecs: Vec<Vec<f64>> = raw.into_iter().filter(|v| norm(v) > 1e-3).collect();
        prop_assume!(!vecs.is_empty() && norm(&s) > 1e-3);
        let d = DirectionSet::normalized(vecs, DirectionTag::PollFullspace).unwrap();
        let sn: Vec<f64> = s.iter().map(|x| x / norm(&s)).collect();
        let o = order_directions(&d, Some(&sn));
        prop_assert_eq!(o.len(), d.len());
        let score = |v: &[f64]| v.iter().zip(&sn).map(|(a, b)| a * b).sum::<f64>();
        for w in o.directions().windows(2) {
            prop_assert!(score(&w[0]) >= score(&w[1]));
        }
        for v in d.iter() {
            prop_assert!(o.iter().any(|u| u == v));
        }
    }
}

#[test]
fn rosenbrock_n2_at_origin_matches_reference() {
    // independent evaluation: 100(x2 − x1²)² + (1 − x1)²
    let reference = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
    let p = SmoothProblem::new(Family::ExtendedRosenbrock, 2).unwrap();
    for x in [[0.0, 0.0], [-1.2, 1.0], [0.3, -2.0]] {
        assert!((p.eval_true(&x).unwrap() - reference(&x)).abs() < 1e-12);
    }
    assert_eq!(p.eval_true(&[0.0, 0.0]).unwrap(), 1.0);
}

#[test]
fn estimate_variance_scales_inversely_with_samples() {
    let base = SmoothProblem::new(Family::ExtendedPowell, 8).unwrap();
    let problem = NoisyProblem::new(base.clone(), NoiseModel::new(NoiseKind::Additive, NoiseDist::Normal, 1e-3).unwrap());
    let x = base.x0().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let counts = [4usize, 16, 64, 256];
    let logs: Vec<(f64, f64)> = counts
        .iter()
        .map(|&nk| {
            let means: Vec<f64> = (0..2000).map(|_| fresh_estimate(&problem, &x, nk, &mut rng).unwrap().mean).collect();
            let m = means.iter().sum::<f64>() / means.len() as f64;
            let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
            ((nk as f64).ln(), var.ln())
        })
        .collect();
    let n = logs.len() as f64;
    let (sx, sy) = logs.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() <= 0.15, "slope {slope}");
}

#[test]
fn additive_bias_at_several_points() {
    for name in ["ext_powell_n8_add_normal", "broyden_tridiagonal_n8_add_uniform"] {
        let problem = lookup(name).unwrap();
        let m = problem.base().residual_count() as f64;
        let sigma2 = problem.noise().sigma.powi(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for shift in [0.0, 0.1, -0.3] {
            let x: Vec<f64> = problem.base().x0().iter().map(|v| v + shift).collect();
            let f = problem.base().eval_true(&x).unwrap();
            let samples: Vec<f64> = (0..100_000).map(|_| problem.eval_noisy(&x, &mut rng).unwrap()).collect();
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let sd = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64).sqrt();
            let se = sd / (samples.len() as f64).sqrt();
            assert!((mean - f - m * sigma2).abs() <= 4.0 * se, "{name} shift {shift}");
            assert!((problem.expected_value(&x).unwrap() - f - m * sigma2).abs() < 1e-12);
        }
    }
}

#[test]
fn quadratic_phi_trend() {
    let problem = lookup("sphere_n8_add_normal").unwrap();
    let config = SolverConfig::stodars(SubspaceDim::Fixed(2));
    let below = (0..20)
        .filter(|&seed| {
            let trace = run(&problem, &config, seed).unwrap();
            let s = supermartingale_trace(&trace, 0.5, config.eps_f, 0.0).unwrap();
            assert!(s.phi.iter().all(|&p| p > 0.0));
            s.final_median_below_initial()
        })
        .count();
    assert!(below >= 18, "{below}/20");
}

#[test]
fn quartic_schedule_runs_to_budget() {
    let problem = lookup("sphere_n4_mul_normal").unwrap();
    let config = SolverConfig {
        nk_schedule: SampleSchedule::InverseQuartic { c: 0.01, max: 200 },
        ..SolverConfig::stodars(SubspaceDim::Fixed(2))
    };
    let trace = run(&problem, &config, 4).unwrap();
    assert!(trace.last().evals_cumulative <= config.budget.resolve(4));
    assert!(trace.last().f_true < trace.initial().f_true);
}
