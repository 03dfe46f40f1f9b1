//! Independent reference computations for the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_dot(dirs: &[Vec<f64>], w: &[f64]) -> f64 {
    dirs.iter().map(|d| dot(d, w)).fold(f64::NEG_INFINITY, f64::max)
}

fn normalize(v: &mut [f64]) {
    let r = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= r);
}

/// Cosine measure by exhaustive sphere grid (at least 10⁶ points for
/// `q ≥ 2`) followed by repeated local zooming around the best cells.
/// A plain grid cannot resolve the kink at the minimizer to 1e-6; zooming
/// shrinks the local spacing geometrically.
pub fn grid_cosine_measure(dirs: &[Vec<f64>]) -> f64 {
    let q = dirs[0].len();
    match q {
        1 => max_dot(dirs, &[1.0]).min(max_dot(dirs, &[-1.0])),
        2 => grid_2d(dirs),
        3 => grid_3d(dirs),
        _ => panic!("grid oracle only covers q <= 3"),
    }
}

fn grid_2d(dirs: &[Vec<f64>]) -> f64 {
    const N: usize = 1_000_000;
    let f = |a: f64| max_dot(dirs, &[a.cos(), a.sin()]);
    let mut cells: Vec<(f64, f64)> = (0..N)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / N as f64;
            (f(a), a)
        })
        .collect();
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = cells[0].0;
    for &(_, a0) in cells.iter().take(16) {
        let (mut center, mut radius) = (a0, 2.0 * PI / N as f64);
        for _ in 0..30 {
            let mut local = (f(center), center);
            for k in -20..=20 {
                let a = center + radius * k as f64 / 20.0;
                let v = f(a);
                if v < local.0 {
                    local = (v, a);
                }
            }
            center = local.1;
            best = best.min(local.0);
            radius *= 0.25;
        }
    }
    best
}

fn grid_3d(dirs: &[Vec<f64>]) -> f64 {
    // Fibonacci lattice: near-uniform points on S²
    const N: usize = 1_000_000;
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut cells: Vec<(f64, [f64; 3])> = (0..N)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / N as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            let w = [r * t.cos(), r * t.sin(), z];
            (max_dot(dirs, &w), w)
        })
        .collect();
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
    let spacing = (4.0 * PI / N as f64).sqrt();
    let mut best = cells[0].0;
    for &(_, w0) in cells.iter().take(32) {
        let mut center = w0;
        let mut radius = 2.0 * spacing;
        for _ in 0..30 {
            // orthonormal tangent basis at center
            let helper = if center[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let mut e1: Vec<f64> = (0..3).map(|i| helper[i] - dot(&helper, &center) * center[i]).collect();
            normalize(&mut e1);
            let e2 = [
                center[1] * e1[2] - center[2] * e1[1],
                center[2] * e1[0] - center[0] * e1[2],
                center[0] * e1[1] - center[1] * e1[0],
            ];
            let mut local = (max_dot(dirs, &center), center);
            for a in -12..=12 {
                for b in -12..=12 {
                    let (s, t) = (radius * a as f64 / 12.0, radius * b as f64 / 12.0);
                    let mut w: Vec<f64> = (0..3).map(|i| center[i] + s * e1[i] + t * e2[i]).collect();
                    normalize(&mut w);
                    let v = max_dot(dirs, &w);
                    if v < local.0 {
                        local = (v, [w[0], w[1], w[2]]);
                    }
                }
            }
            center = local.1;
            best = best.min(local.0);
            radius *= 0.3;
        }
    }
    best
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= m * a[c][k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Exact cosine measure of a positive spanning set.
///
/// At the minimizer `w*` the active directions `S` have equal inner
/// products with `w*`, and `w*` is a nonnegative combination of them; by
/// Carathéodory a linearly independent subset suffices. Enumerating every
/// independent subset of size at most `q`, taking the equal-angle unit
/// vector in its span and keeping those that no other direction beats gives
/// the minimum exactly. When `D` does not positively span, the minimizer is
/// the negated equal-angle vector and the value is negative.
pub fn vertex_cosine_measure(dirs: &[Vec<f64>]) -> f64 {
    let m = dirs.len();
    let q = dirs[0].len();
    let mut best = f64::INFINITY;
    let mut subset = Vec::new();
    fn rec(start: usize, m: usize, q: usize, subset: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if !subset.is_empty() {
            visit(subset);
        }
        if subset.len() == q {
            return;
        }
        for i in start..m {
            subset.push(i);
            rec(i + 1, m, q, subset, visit);
            subset.pop();
        }
    }
    let mut visit = |s: &[usize]| {
        let k = s.len();
        let gram: Vec<Vec<f64>> = s.iter().map(|&i| s.iter().map(|&j| dot(&dirs[i], &dirs[j])).collect()).collect();
        let Some(y) = solve(gram, vec![1.0; k]) else { return };
        // combination coefficients must be nonnegative for w in the cone
        if y.iter().any(|&c| c < -1e-12) {
            return;
        }
        let mut w = vec![0.0; q];
        for (c, &i) in y.iter().zip(s) {
            w.iter_mut().zip(&dirs[i]).for_each(|(a, b)| *a += c * b);
        }
        let r = dot(&w, &w).sqrt();
        if r < 1e-14 {
            return;
        }
        w.iter_mut().for_each(|x| *x /= r);
        // the negated point is the candidate when the set does not positively span
        for sign in [1.0, -1.0] {
            let v: Vec<f64> = w.iter().map(|x| sign * x).collect();
            let value = sign / r;
            if max_dot(dirs, &v) <= value + 1e-12 {
                best = best.min(value);
            }
        }
    };
    rec(0, m, q, &mut subset, &mut visit);
    best
}

/// Reference outcome string for the index automaton and its `ℓ` and `t` rows.
pub const AUTOMATON_OUTCOMES: &str = "SSSFFSFFFFFSFSSSFFSFFSFFSFFSFF";
pub const AUTOMATON_ELL: [i64; 30] = [
    -1, -2, -3, -2, -1, -2, -1, 0, 1, 2, 3, 2, 3, 2, 1, 0, 1, 2, 1, 2, 3, 2, 3, 4, 3, 4, 5, 4, 5, 6,
];
pub const AUTOMATON_T: [u64; 30] = [
    1, 2, 3, 4, 5, 6, 7, 0, 1, 2, 3, 8, 3, 9, 10, 11, 12, 13, 14, 15, 3, 16, 3, 4, 17, 4, 5, 18, 5, 6,
];

/// Prints and returns one acceptance line.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!("ACCEPTANCE {id} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    pass
}
