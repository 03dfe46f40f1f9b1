mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use common::{grid_cosine_measure, vertex_cosine_measure};
use stodars::diagnostics::{check_acute_angle, check_sphere_uniformity, Verdict};
use stodars::geometry::{
    cosine_measure, cosine_measure_witness, dot, empirical_min_alignment, map_to_fullspace, maximal_positive_basis_from, minimal_positive_basis,
    minimal_positive_basis_from, sample_haar_frame, sample_haar_orthogonal, take_frame, DirectionSet, DirectionTag,
    FrameSampler, Matrix,
};
use stodars::rng::{StreamKind, Streams};
use stodars::Parallelism;

fn random_set(rng: &mut ChaCha8Rng, m: usize, q: usize) -> DirectionSet {
    let v = (0..m).map(|_| (0..q).map(|_| rng.sample(StandardNormal)).collect()).collect();
    DirectionSet::normalized(v, DirectionTag::PollFullspace).unwrap()
}

#[test]
fn coordinate_maximal_basis_r4_is_one_half() {
    let d = maximal_positive_basis_from(&Matrix::identity(4), DirectionTag::PssSubspace).unwrap();
    assert!((vertex_cosine_measure(d.directions()) - 0.5).abs() < 1e-12);
    assert!((cosine_measure(&d).unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn identity_minimal_basis_r2_matches_grid() {
    let d = minimal_positive_basis_from(&Matrix::identity(2)).unwrap();
    let grid = grid_cosine_measure(d.directions());
    assert!((cosine_measure(&d).unwrap() - grid).abs() < 1e-6, "grid {grid}");
}

#[test]
fn random_low_dimensional_sets_match_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for q in [2, 3] {
        for _ in 0..6 {
            let m = rng.random_range(q + 1..=2 * q + 2);
            let d = random_set(&mut rng, m, q);
            let grid = grid_cosine_measure(d.directions());
            let got = cosine_measure(&d).unwrap();
            assert!((got - grid).abs() < 1e-6, "q={q} m={m}: {got} vs {grid}");
        }
    }
}

#[test]
fn higher_dimensional_sets_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for q in 4..=6 {
        for trial in 0..4 {
            let d = if trial == 0 {
                minimal_positive_basis(q, &mut rng).unwrap()
            } else {
                random_set(&mut rng, 2 * q + 1, q)
            };
            let exact = vertex_cosine_measure(d.directions());
            let (got, w) = cosine_measure_witness(&d).unwrap();
            let attained = d.iter().map(|v| dot(v, &w)).fold(f64::NEG_INFINITY, f64::max);
            assert!((attained - got).abs() < 1e-9);
            assert!((got - exact).abs() < 1e-6, "q={q}: {got} vs {exact}");
        }
    }
}

#[test]
fn minimal_basis_closed_form() {
    // κ of the minimal basis {b_j} ∪ {−Σb/‖Σb‖} is 1/√(p² + 2(p−1)√p)
    for p in 2..=8usize {
        let d = minimal_positive_basis_from(&Matrix::identity(p)).unwrap();
        let pf = p as f64;
        let closed = 1.0 / (pf * pf + 2.0 * (pf - 1.0) * pf.sqrt()).sqrt();
        assert!((vertex_cosine_measure(d.directions()) - closed).abs() < 1e-12);
        assert!((cosine_measure(&d).unwrap() - closed).abs() < 1e-6);
    }
}

#[test]
fn non_spanning_sets_are_not_positive() {
    let d = DirectionSet::from_unit_vectors(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], DirectionTag::PollFullspace).unwrap();
    assert!(cosine_measure(&d).unwrap().abs() < 1e-8);
    assert!(grid_cosine_measure(d.directions()).abs() < 1e-8);
}

#[test]
fn haar_sign_frequency_for_n1() {
    let streams = Streams::new(1);
    let positive = (0..10_000u64)
        .filter(|&s| sample_haar_orthogonal(1, &mut streams.stream(StreamKind::Matrix, s)).unwrap().matrix()[(0, 0)] > 0.0)
        .count();
    assert!((positive as f64 / 1e4 - 0.5).abs() <= 0.02);
}

#[test]
fn frames_from_haar_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = sample_haar_orthogonal(5, &mut rng).unwrap();
    let full = take_frame(&u, 5).unwrap();
    assert_eq!(full.columns(), u.matrix());
    assert_eq!(full.scale(), 1.0);
    let frame = sample_haar_frame(100, 5, &mut rng).unwrap();
    assert!(frame.columns().orthonormality_residual() < 1e-10);
    assert!((frame.scale() * frame.scale() * 5.0 - 100.0).abs() < 1e-9);
}

#[test]
fn mapping_preserves_inner_products() {
    let streams = Streams::new(9);
    let frame = sample_haar_frame(10, 3, &mut streams.stream(StreamKind::Matrix, 0)).unwrap();
    let d = minimal_positive_basis(3, &mut streams.stream(StreamKind::Pss, 0)).unwrap();
    let mapped = map_to_fullspace(&frame, &d).unwrap();
    let (a, b) = (d.gram(), mapped.gram());
    for i in 0..4 {
        for j in 0..4 {
            assert!((a[(i, j)] - b[(i, j)]).abs() < 1e-10);
        }
    }
}

#[test]
fn alignment_probabilities() {
    let mut e1 = vec![0.0; 100];
    e1[0] = 1.0;
    let s = |p| FrameSampler::new(100, p, Streams::new(21)).unwrap();
    let p20 = empirical_min_alignment(&s(20), &e1, 0.1, 10_000, Parallelism::Threads(0)).unwrap();
    assert!(p20 >= 0.95, "{p20}");
    let p5 = empirical_min_alignment(&s(5), &e1, 0.3, 4000, Parallelism::Threads(0)).unwrap();
    let p50 = empirical_min_alignment(&s(50), &e1, 0.3, 4000, Parallelism::Threads(0)).unwrap();
    assert!(p50 >= p5, "{p5} {p50}");
}

#[test]
fn acute_angle_n50_p10() {
    let r = check_acute_angle(50, 10, 0.1, 10_000, 7, Parallelism::Threads(0)).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r}");
}

#[test]
fn sphere_uniformity_n10_p3() {
    for r in check_sphere_uniformity(10, 3, 100_000, 12, Parallelism::Threads(0)).unwrap() {
        assert_eq!(r.verdict, Verdict::Pass, "{r}");
    }
}
