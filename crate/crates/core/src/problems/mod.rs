//! Deterministic sums-of-squares objectives, stochastic noise wrappers and
//! feasibility predicates.

mod functions;
mod noise;
mod suite;

pub use functions::Family;
pub use noise::{NoiseDist, NoiseKind, NoiseModel, NoisyProblem};
pub use suite::{default_suite, lookup, Scale, DEFAULT_SIGMA};

use crate::error::{Error, Result};

/// The feasible set `X`.
#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Unconstrained,
    /// Componentwise `lower <= x <= upper`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl Feasibility {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Feasibility::Unconstrained => true,
            Feasibility::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi),
        }
    }
}

/// `f(x) = Σ f_i(x)²` with a start point and feasibility predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothProblem {
    family: Family,
    dim: usize,
    x0: Vec<f64>,
    feasibility: Feasibility,
}

impl SmoothProblem {
    pub fn new(family: Family, dim: usize) -> Result<Self> {
        if !family.supports_dim(dim) {
            return Err(Error::InvalidDimension(format!("{family} does not support n = {dim}")));
        }
        Ok(Self {
            family,
            dim,
            x0: family.start(dim),
            feasibility: Feasibility::Unconstrained,
        })
    }

    /// Restricts the problem to a feasible set; the start must stay feasible.
    pub fn with_feasibility(mut self, feasibility: Feasibility) -> Result<Self> {
        if let Feasibility::Box { lower, upper } = &feasibility {
            if lower.len() != self.dim || upper.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: lower.len().min(upper.len()),
                });
            }
        }
        if !feasibility.contains(&self.x0) {
            return Err(Error::InfeasibleStart);
        }
        self.feasibility = feasibility;
        Ok(self)
    }

    pub fn with_start(mut self, x0: Vec<f64>) -> Result<Self> {
        self.check_dim(&x0)?;
        if !self.feasibility.contains(&x0) {
            return Err(Error::InfeasibleStart);
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn name(&self) -> String {
        format!("{}_n{}", self.family, self.dim)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn residual_count(&self) -> usize {
        self.family.residual_count(self.dim)
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn known_fmin(&self) -> Option<f64> {
        self.family.known_fmin()
    }

    pub fn exact_minimizer(&self) -> Option<Vec<f64>> {
        self.family.exact_minimizer(self.dim)
    }

    pub fn feasibility(&self) -> &Feasibility {
        &self.feasibility
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.feasibility.contains(x)
    }

    pub fn residuals(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.residual_count()];
        self.family.residuals_into(x, &mut out);
        Ok(out)
    }

    /// `f(x)`, without noise.
    pub fn eval_true(&self, x: &[f64]) -> Result<f64> {
        Ok(self.residuals(x)?.iter().map(|r| r * r).sum())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_checks() {
        let p = SmoothProblem::new(Family::ExtendedRosenbrock, 4).unwrap();
        assert!(matches!(p.eval_true(&[1.0; 3]), Err(Error::DimensionMismatch { .. })));
        assert!(SmoothProblem::new(Family::ExtendedPowell, 6).is_err());
        assert!(SmoothProblem::new(Family::ExtendedRosenbrock, 3).is_err());
    }

    #[test]
    fn global_minimizers() {
        let r = SmoothProblem::new(Family::ExtendedRosenbrock, 8).unwrap();
        assert_eq!(r.eval_true(&[1.0; 8]).unwrap(), 0.0);
        let p = SmoothProblem::new(Family::ExtendedPowell, 8).unwrap();
        assert_eq!(p.eval_true(&[0.0; 8]).unwrap(), 0.0);
    }

    #[test]
    fn box_feasibility() {
        let p = SmoothProblem::new(Family::Sphere, 2).unwrap();
        let boxed = p
            .clone()
            .with_feasibility(Feasibility::Box {
                lower: vec![0.0, 0.0],
                upper: vec![2.0, 2.0],
            })
            .unwrap();
        assert!(boxed.is_feasible(&[1.0, 1.0]));
        assert!(!boxed.is_feasible(&[-0.1, 1.0]));
        assert!(matches!(
            p.with_feasibility(Feasibility::Box {
                lower: vec![3.0, 3.0],
                upper: vec![4.0, 4.0],
            }),
            Err(Error::InfeasibleStart)
        ));
    }
}
