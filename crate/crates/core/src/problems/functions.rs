//! Sums-of-squares test families from the Moré–Garbow–Hillstrom collection
//! and its extended variants.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    ExtendedRosenbrock,
    ExtendedPowell,
    Trigonometric,
    BroydenTridiagonal,
    DiscreteBoundaryValue,
    PenaltyI,
    VariablyDimensioned,
    ChainedWood,
    /// `‖x‖²`, residuals `x_i`. Not part of the benchmark suites.
    Sphere,
}

const PENALTY_I_A: f64 = 1e-5;

impl Family {
    pub const SUITE: [Family; 8] = [
        Family::ExtendedRosenbrock,
        Family::ExtendedPowell,
        Family::Trigonometric,
        Family::BroydenTridiagonal,
        Family::DiscreteBoundaryValue,
        Family::PenaltyI,
        Family::VariablyDimensioned,
        Family::ChainedWood,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ExtendedRosenbrock => "ext_rosenbrock",
            Family::ExtendedPowell => "ext_powell",
            Family::Trigonometric => "trigonometric",
            Family::BroydenTridiagonal => "broyden_tridiagonal",
            Family::DiscreteBoundaryValue => "discrete_boundary_value",
            Family::PenaltyI => "penalty1",
            Family::VariablyDimensioned => "variably_dimensioned",
            Family::ChainedWood => "chained_wood",
            Family::Sphere => "sphere",
        }
    }

    pub fn supports_dim(self, n: usize) -> bool {
        match self {
            Family::ExtendedRosenbrock => n >= 2 && n.is_multiple_of(2),
            Family::ExtendedPowell => n >= 4 && n.is_multiple_of(4),
            Family::ChainedWood => n >= 4 && n.is_multiple_of(2),
            _ => n >= 1,
        }
    }

    pub fn residual_count(self, n: usize) -> usize {
        match self {
            Family::PenaltyI => n + 1,
            Family::VariablyDimensioned => n + 2,
            Family::ChainedWood => 6 * (n / 2 - 1),
            _ => n,
        }
    }

    pub fn start(self, n: usize) -> Vec<f64> {
        let nf = n as f64;
        (0..n)
            .map(|i| {
                let j = (i + 1) as f64;
                match self {
                    Family::ExtendedRosenbrock => {
                        if i % 2 == 0 {
                            -1.2
                        } else {
                            1.0
                        }
                    }
                    Family::ExtendedPowell => [3.0, -1.0, 0.0, 1.0][i % 4],
                    Family::Trigonometric => 1.0 / nf,
                    Family::BroydenTridiagonal => -1.0,
                    Family::DiscreteBoundaryValue => {
                        let t = j / (nf + 1.0);
                        t * (t - 1.0)
                    }
                    Family::PenaltyI => j,
                    Family::VariablyDimensioned => 1.0 - j / nf,
                    Family::ChainedWood => {
                        if i % 2 == 0 {
                            -3.0
                        } else {
                            -1.0
                        }
                    }
                    Family::Sphere => 1.0,
                }
            })
            .collect()
    }

    /// Global minimum value, when documented.
    pub fn known_fmin(self) -> Option<f64> {
        match self {
            Family::PenaltyI => None,
            _ => Some(0.0),
        }
    }

    /// A minimizer known in closed form.
    pub fn exact_minimizer(self, n: usize) -> Option<Vec<f64>> {
        match self {
            Family::ExtendedRosenbrock | Family::VariablyDimensioned | Family::ChainedWood => Some(vec![1.0; n]),
            Family::ExtendedPowell | Family::Trigonometric | Family::Sphere => Some(vec![0.0; n]),
            _ => None,
        }
    }

    /// Writes the residuals at `x` into `out` (length `residual_count`).
    pub fn residuals_into(self, x: &[f64], out: &mut [f64]) {
        let n = x.len();
        match self {
            Family::ExtendedRosenbrock => {
                for i in (0..n).step_by(2) {
                    out[i] = 10.0 * (x[i + 1] - x[i] * x[i]);
                    out[i + 1] = 1.0 - x[i];
                }
            }
            Family::ExtendedPowell => {
                let (s5, s10) = (5f64.sqrt(), 10f64.sqrt());
                for i in (0..n).step_by(4) {
                    out[i] = x[i] + 10.0 * x[i + 1];
                    out[i + 1] = s5 * (x[i + 2] - x[i + 3]);
                    out[i + 2] = (x[i + 1] - 2.0 * x[i + 2]).powi(2);
                    out[i + 3] = s10 * (x[i] - x[i + 3]).powi(2);
                }
            }
            Family::Trigonometric => {
                let cos_sum: f64 = x.iter().map(|v| v.cos()).sum();
                for i in 0..n {
                    let j = (i + 1) as f64;
                    out[i] = n as f64 - cos_sum + j * (1.0 - x[i].cos()) - x[i].sin();
                }
            }
            Family::BroydenTridiagonal => {
                for i in 0..n {
                    let prev = if i > 0 { x[i - 1] } else { 0.0 };
                    let next = if i + 1 < n { x[i + 1] } else { 0.0 };
                    out[i] = (3.0 - 2.0 * x[i]) * x[i] - prev - 2.0 * next + 1.0;
                }
            }
            Family::DiscreteBoundaryValue => {
                let h = 1.0 / (n as f64 + 1.0);
                for i in 0..n {
                    let t = (i + 1) as f64 * h;
                    let prev = if i > 0 { x[i - 1] } else { 0.0 };
                    let next = if i + 1 < n { x[i + 1] } else { 0.0 };
                    out[i] = 2.0 * x[i] - prev - next + h * h * (x[i] + t + 1.0).powi(3) / 2.0;
                }
            }
            Family::PenaltyI => {
                let sa = PENALTY_I_A.sqrt();
                for i in 0..n {
                    out[i] = sa * (x[i] - 1.0);
                }
                out[n] = x.iter().map(|v| v * v).sum::<f64>() - 0.25;
            }
            Family::VariablyDimensioned => {
                let s: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * (v - 1.0)).sum();
                for i in 0..n {
                    out[i] = x[i] - 1.0;
                }
                out[n] = s;
                out[n + 1] = s * s;
            }
            Family::ChainedWood => {
                let (s90, s10) = (90f64.sqrt(), 10f64.sqrt());
                for (block, j) in (0..n - 3).step_by(2).enumerate() {
                    let r = &mut out[6 * block..6 * block + 6];
                    r[0] = 10.0 * (x[j + 1] - x[j] * x[j]);
                    r[1] = 1.0 - x[j];
                    r[2] = s90 * (x[j + 3] - x[j + 2] * x[j + 2]);
                    r[3] = 1.0 - x[j + 2];
                    r[4] = s10 * (x[j + 1] + x[j + 3] - 2.0);
                    r[5] = (x[j + 1] - x[j + 3]) / s10;
                }
            }
            Family::Sphere => out[..n].copy_from_slice(x),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::SUITE
            .iter()
            .chain(std::iter::once(&Family::Sphere))
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}
