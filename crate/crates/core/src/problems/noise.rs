use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use super::SmoothProblem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// `Σ (f_i(x) + θ_i)²` with independent `θ_i` per residual.
    Additive,
    /// `f(x)(1 + θ)` with a single draw.
    Multiplicative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseDist {
    /// Uniform on `[−√3σ, √3σ]`.
    Uniform,
    Normal,
}

/// Zero-mean noise with standard deviation `sigma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub dist: NoiseDist,
    pub sigma: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, dist: NoiseDist, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::config("sigma", "must be positive and finite"));
        }
        Ok(Self { kind, dist, sigma })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.dist {
            NoiseDist::Normal => self.sigma * rng.sample::<f64, _>(StandardNormal),
            NoiseDist::Uniform => {
                let half_width = 3f64.sqrt() * self.sigma;
                half_width * (2.0 * rng.random::<f64>() - 1.0)
            }
        }
    }

    /// Short label used in instance names, e.g. `add_normal`.
    pub fn label(&self) -> String {
        let kind = match self.kind {
            NoiseKind::Additive => "add",
            NoiseKind::Multiplicative => "mul",
        };
        let dist = match self.dist {
            NoiseDist::Uniform => "uniform",
            NoiseDist::Normal => "normal",
        };
        format!("{kind}_{dist}")
    }
}

/// A smooth problem observed through noise.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyProblem {
    base: SmoothProblem,
    noise: NoiseModel,
}

impl NoisyProblem {
    pub fn new(base: SmoothProblem, noise: NoiseModel) -> Self {
        Self { base, noise }
    }

    pub fn base(&self) -> &SmoothProblem {
        &self.base
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Registry name, `<family>_n<dim>_<add|mul>_<uniform|normal>`.
    pub fn name(&self) -> String {
        format!("{}_{}", self.base.name(), self.noise.label())
    }

    /// One noisy sample `f_θ(x)`. Fresh draws on every call.
    pub fn eval_noisy<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<f64> {
        let residuals = self.base.residuals(x)?;
        Ok(match self.noise.kind {
            NoiseKind::Additive => residuals
                .iter()
                .map(|r| {
                    let v = r + self.noise.draw(rng);
                    v * v
                })
                .sum(),
            NoiseKind::Multiplicative => {
                let f: f64 = residuals.iter().map(|r| r * r).sum();
                f * (1.0 + self.noise.draw(rng))
            }
        })
    }

    /// `E[f_θ(x)]`: `f(x) + mσ²` for additive noise, `f(x)` otherwise.
    pub fn expected_value(&self, x: &[f64]) -> Result<f64> {
        let f = self.base.eval_true(x)?;
        Ok(match self.noise.kind {
            NoiseKind::Additive => f + self.base.residual_count() as f64 * self.noise.sigma.powi(2),
            NoiseKind::Multiplicative => f,
        })
    }
}

impl fmt::Display for NoisyProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
