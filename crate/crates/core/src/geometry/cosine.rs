//! Cosine measure `κ(D) = min_{‖w‖=1} max_{d∈D} ⟨w, d⟩`.
//!
//! There is no closed form for arbitrary sets. The minimum is searched by
//! multistart local minimization over the sphere: each start is driven down
//! a log-sum-exp smoothing of the max with a decreasing temperature, then
//! polished by solving for the point that equalizes the near-active
//! directions. Starts are the normalized negative sums of direction subsets
//! of size at most `q` plus 200 random unit vectors, all from fixed seeds.

use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::directions::{DirectionSet, DirectionTag};
use super::haar::SubspaceFrame;
use super::matrix::{dot, norm};
use crate::error::{Error, Result};

const RANDOM_STARTS: usize = 200;
const SUBSET_LIMIT: usize = 4096;
const REFINED_STARTS: usize = 64;
const TOLERANCE: f64 = 1e-8;

/// Cosine measure of `d`. Values `<= 0` mean `d` does not positively span.
pub fn cosine_measure(d: &DirectionSet) -> Result<f64> {
    cosine_measure_witness(d).map(|(value, _)| value)
}

/// Cosine measure together with a minimizing unit vector.
pub fn cosine_measure_witness(d: &DirectionSet) -> Result<(f64, Vec<f64>)> {
    if d.is_empty() {
        return Err(Error::EmptyDirectionSet);
    }
    let dirs = d.directions();
    let q = d.ambient_dim();

    let mut starts = subset_starts(dirs, q);
    let mut rng = ChaCha8Rng::seed_from_u64(0xc051_e5ed);
    for _ in 0..RANDOM_STARTS {
        if let Some(w) = unit(random_gaussian(q, &mut rng)) {
            starts.push(w);
        }
    }

    let mut scored: Vec<(f64, Vec<f64>)> = starts.into_iter().map(|w| (max_dot(dirs, &w), w)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored.truncate(REFINED_STARTS);

    let mut best = scored[0].clone();
    for (_, w) in scored {
        let refined = refine(dirs, w);
        if refined.0 < best.0 {
            best = refined;
        }
    }
    Ok(best)
}

/// Cosine measure of mapped directions inside the column space of `frame`,
/// computed on their subspace coordinates `Uᵀu`.
pub fn restricted_cosine_measure(frame: &SubspaceFrame, mapped: &DirectionSet) -> Result<f64> {
    if mapped.ambient_dim() != frame.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.ambient_dim(),
            got: mapped.ambient_dim(),
        });
    }
    let coords = mapped.iter().map(|u| frame.columns().tr_mul_vec(u)).collect();
    cosine_measure(&DirectionSet::normalized(coords, DirectionTag::PssSubspace)?)
}

fn max_dot(dirs: &[Vec<f64>], w: &[f64]) -> f64 {
    dirs.iter().map(|d| dot(d, w)).fold(f64::NEG_INFINITY, f64::max)
}

fn unit(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let len = norm(&v);
    if len < 1e-14 || !len.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= len);
    Some(v)
}

fn random_gaussian<R: Rng>(q: usize, rng: &mut R) -> Vec<f64> {
    (0..q).map(|_| rng.sample(StandardNormal)).collect()
}

fn subset_count(m: usize, q: usize, cap: usize) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize;
    for s in 1..=q.min(m) {
        binom = binom.saturating_mul(m + 1 - s) / s;
        total = total.saturating_add(binom);
        if total > cap {
            return usize::MAX;
        }
    }
    total
}

fn negative_sum_start(dirs: &[Vec<f64>], subset: &[usize], q: usize) -> Option<Vec<f64>> {
    let mut s = vec![0.0; q];
    for &i in subset {
        s.iter_mut().zip(&dirs[i]).for_each(|(a, b)| *a -= b);
    }
    unit(s)
}

fn subset_starts(dirs: &[Vec<f64>], q: usize) -> Vec<Vec<f64>> {
    let m = dirs.len();
    let mut starts = Vec::new();
    if subset_count(m, q, SUBSET_LIMIT) <= SUBSET_LIMIT {
        for size in 1..=q.min(m) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                starts.extend(negative_sum_start(dirs, &idx, q));
                // next combination in lexicographic order
                let mut i = size;
                while i > 0 && idx[i - 1] == m - size + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                idx[i - 1] += 1;
                for j in i..size {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x05ab_5e75);
        for _ in 0..SUBSET_LIMIT {
            let size = rng.random_range(1..=q.min(m));
            let subset = sample(&mut rng, m, size).into_vec();
            starts.extend(negative_sum_start(dirs, &subset, q));
        }
    }
    starts
}

/// Smoothed descent followed by active-set polishing.
fn refine(dirs: &[Vec<f64>], start: Vec<f64>) -> (f64, Vec<f64>) {
    let mut w = start;
    let mut temperature = 1e-1;
    while temperature >= 1e-10 {
        w = smoothed_descent(dirs, w, temperature);
        temperature *= 0.1;
    }
    let mut best = (max_dot(dirs, &w), w);
    for threshold in [1e-3, 1e-5, 1e-7, 1e-9] {
        for candidate in polish(dirs, &best.1, threshold) {
            let value = max_dot(dirs, &candidate);
            if value < best.0 - 1e-15 {
                best = (value, candidate);
            }
        }
    }
    best
}

fn smoothed(dirs: &[Vec<f64>], w: &[f64], t: f64) -> (f64, Vec<f64>) {
    let values: Vec<f64> = dirs.iter().map(|d| dot(d, w)).collect();
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = values.iter().map(|v| ((v - top) / t).exp()).collect();
    let total: f64 = weights.iter().sum();
    let value = top + t * total.ln();
    let mut grad = vec![0.0; w.len()];
    for (d, wt) in dirs.iter().zip(&weights) {
        let pi = wt / total;
        grad.iter_mut().zip(d).for_each(|(g, x)| *g += pi * x);
    }
    // project onto the tangent space of the sphere
    let radial = dot(&grad, w);
    grad.iter_mut().zip(w).for_each(|(g, x)| *g -= radial * x);
    (value, grad)
}

fn smoothed_descent(dirs: &[Vec<f64>], mut w: Vec<f64>, t: f64) -> Vec<f64> {
    let mut step = 1.0;
    let (mut value, mut grad) = smoothed(dirs, &w, t);
    for _ in 0..500 {
        let gnorm = norm(&grad);
        if gnorm < TOLERANCE * 1e-2 {
            break;
        }
        let mut accepted = false;
        while step > 1e-16 {
            let trial: Vec<f64> = w.iter().zip(&grad).map(|(x, g)| x - step * g).collect();
            let Some(trial) = unit(trial) else {
                step *= 0.5;
                continue;
            };
            let (tv, tg) = smoothed(dirs, &trial, t);
            if tv <= value - 1e-4 * step * gnorm * gnorm {
                let gain = value - tv;
                w = trial;
                value = tv;
                grad = tg;
                accepted = true;
                step *= 2.0;
                if gain < 1e-15 {
                    return w;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    w
}

/// Candidates equalizing `⟨w, d⟩` over the directions within `threshold`
/// of the current max. A linearly independent subset `S` of the active
/// directions is chosen and `y` solves `D_Sᵀ y = 1` inside `span(S)`.
fn polish(dirs: &[Vec<f64>], w: &[f64], threshold: f64) -> Vec<Vec<f64>> {
    let q = w.len();
    let values: Vec<f64> = dirs.iter().map(|d| dot(d, w)).collect();
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut active: Vec<usize> = (0..dirs.len()).filter(|&i| top - values[i] <= threshold).collect();
    active.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    // greedy independent subset via Gram-Schmidt
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    for &i in &active {
        if chosen.len() == q {
            break;
        }
        let mut r = dirs[i].clone();
        for b in &basis {
            let c = dot(&r, b);
            r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let len = norm(&r);
        if len > 1e-8 {
            r.iter_mut().for_each(|x| *x /= len);
            basis.push(r);
            chosen.push(i);
        }
    }
    if chosen.is_empty() {
        return Vec::new();
    }

    let k = chosen.len();
    let mut gram = vec![vec![0.0; k + 1]; k];
    for a in 0..k {
        for b in 0..k {
            gram[a][b] = dot(&dirs[chosen[a]], &dirs[chosen[b]]);
        }
        gram[a][k] = 1.0;
    }
    let Some(coef) = solve(gram) else {
        return Vec::new();
    };
    let mut y = vec![0.0; q];
    for (c, &i) in coef.iter().zip(&chosen) {
        y.iter_mut().zip(&dirs[i]).for_each(|(a, b)| *a += c * b);
    }
    match unit(y) {
        Some(y) => {
            let neg = y.iter().map(|x| -x).collect();
            vec![y, neg]
        }
        None => Vec::new(),
    }
}

/// Gaussian elimination with partial pivoting on an augmented system.
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[pivot][k].abs() < 1e-14 {
            return None;
        }
        a.swap(k, pivot);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..=n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (a[k][n] - s) / a[k][k];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::directions::{maximal_positive_basis_from, minimal_positive_basis_from};
    use crate::geometry::matrix::Matrix;

    fn set(v: Vec<Vec<f64>>) -> DirectionSet {
        DirectionSet::normalized(v, DirectionTag::PssSubspace).unwrap()
    }

    #[test]
    fn coordinate_maximal_basis_in_r4() {
        let d = maximal_positive_basis_from(&Matrix::identity(4), DirectionTag::PssSubspace).unwrap();
        let (k, w) = cosine_measure_witness(&d).unwrap();
        assert!((k - 0.5).abs() < 1e-8, "kappa = {k}");
        for x in w {
            assert!((x.abs() - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn plus_minus_e1_in_r2_is_not_spanning() {
        let k = cosine_measure(&set(vec![vec![1.0, 0.0], vec![-1.0, 0.0]])).unwrap();
        assert!(k.abs() < 1e-8, "kappa = {k}");
    }

    #[test]
    fn single_direction_is_negative() {
        let k = cosine_measure(&set(vec![vec![0.0, 1.0]])).unwrap();
        assert!((k + 1.0).abs() < 1e-8);
    }

    #[test]
    fn empty_rejected() {
        let empty = DirectionSet::normalized(vec![vec![1.0]], DirectionTag::PssSubspace)
            .unwrap()
            .permuted(&[]);
        assert!(matches!(cosine_measure(&empty), Err(Error::EmptyDirectionSet)));
    }

    #[test]
    fn minimal_basis_r2_closed_form() {
        // largest angular gap is 135°, so κ = cos(67.5°)
        let d = minimal_positive_basis_from(&Matrix::identity(2)).unwrap();
        let k = cosine_measure(&d).unwrap();
        assert!((k - (67.5f64).to_radians().cos()).abs() < 1e-9);
    }

    #[test]
    fn one_dimensional() {
        assert!((cosine_measure(&set(vec![vec![1.0], vec![-1.0]])).unwrap() - 1.0).abs() < 1e-12);
        assert!((cosine_measure(&set(vec![vec![1.0]])).unwrap() + 1.0).abs() < 1e-12);
    }
}
