use super::{Family, NoiseDist, NoiseKind, NoiseModel, NoisyProblem, SmoothProblem};
use crate::error::{Error, Result};

pub const DEFAULT_SIGMA: f64 = 1e-3;

/// Size of the benchmark suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// `n ∈ {8, 16, 32, 64}`.
    Desk,
    /// `n ∈ {100, 120}`, inside the 98..=125 range of the original study.
    Large,
}

impl Scale {
    pub fn dims(self) -> &'static [usize] {
        match self {
            Scale::Desk => &[8, 16, 32, 64],
            Scale::Large => &[100, 120],
        }
    }
}

const NOISES: [(NoiseKind, NoiseDist); 4] = [
    (NoiseKind::Additive, NoiseDist::Uniform),
    (NoiseKind::Additive, NoiseDist::Normal),
    (NoiseKind::Multiplicative, NoiseDist::Uniform),
    (NoiseKind::Multiplicative, NoiseDist::Normal),
];

/// Every suite family at every dimension of `scale`, crossed with the four
/// noise models at `σ = 1e-3`.
pub fn default_suite(scale: Scale) -> Vec<NoisyProblem> {
    let mut out = Vec::new();
    for family in Family::SUITE {
        for &n in scale.dims() {
            if !family.supports_dim(n) {
                continue;
            }
            let base = SmoothProblem::new(family, n).expect("dimension checked");
            for (kind, dist) in NOISES {
                let noise = NoiseModel::new(kind, dist, DEFAULT_SIGMA).expect("positive sigma");
                out.push(NoisyProblem::new(base.clone(), noise));
            }
        }
    }
    out
}

/// Resolves a registry name such as `ext_rosenbrock_n8_add_normal`.
pub fn lookup(name: &str) -> Result<NoisyProblem> {
    let unknown = || Error::UnknownProblem(name.to_string());
    let (rest, dist) = name.rsplit_once('_').ok_or_else(unknown)?;
    let (rest, kind) = rest.rsplit_once('_').ok_or_else(unknown)?;
    let (family, dim) = rest.rsplit_once("_n").ok_or_else(unknown)?;

    let dist = match dist {
        "uniform" => NoiseDist::Uniform,
        "normal" => NoiseDist::Normal,
        _ => return Err(unknown()),
    };
    let kind = match kind {
        "add" => NoiseKind::Additive,
        "mul" => NoiseKind::Multiplicative,
        _ => return Err(unknown()),
    };
    let family: Family = family.parse().map_err(|_| unknown())?;
    let dim: usize = dim.parse().map_err(|_| unknown())?;
    let base = SmoothProblem::new(family, dim)?;
    Ok(NoisyProblem::new(base, NoiseModel::new(kind, dist, DEFAULT_SIGMA)?))
}
