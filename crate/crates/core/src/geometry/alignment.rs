use super::haar::{sample_haar_frame, SubspaceFrame};
use super::matrix::norm;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Parallelism};
use crate::rng::{StreamKind, Streams};

/// Draws Haar frames of a fixed shape; frame `i` comes from matrix stream `i`.
#[derive(Clone, Copy, Debug)]
pub struct FrameSampler {
    n: usize,
    p: usize,
    streams: Streams,
}

impl FrameSampler {
    pub fn new(n: usize, p: usize, streams: Streams) -> Result<Self> {
        if n == 0 || p == 0 || p > n {
            return Err(Error::InvalidDimension(format!(
                "subspace dimension {p} must lie in [1, {n}]"
            )));
        }
        Ok(Self { n, p, streams })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn subspace_dim(&self) -> usize {
        self.p
    }

    pub fn sample(&self, index: u64) -> SubspaceFrame {
        let mut rng = self.streams.stream(StreamKind::Matrix, index);
        sample_haar_frame(self.n, self.p, &mut rng)
            .expect("dimensions validated at construction")
            .with_origin(index)
    }
}

/// Fraction of sampled frames with `‖Qᵀv‖ ≥ α_Q‖v‖`.
pub fn empirical_min_alignment(
    sampler: &FrameSampler,
    v: &[f64],
    alpha_q: f64,
    trials: usize,
    parallelism: Parallelism,
) -> Result<f64> {
    if v.len() != sampler.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: sampler.ambient_dim(),
            got: v.len(),
        });
    }
    let v_norm = norm(v);
    if v_norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if trials == 0 {
        return Err(Error::InvalidDimension("trials must be at least 1".into()));
    }
    if !(alpha_q > 0.0 && alpha_q < 0.5) {
        return Err(Error::config("alpha_q", "must lie in (0, 1/2)"));
    }
    let hits = map_indexed(trials, parallelism, |i| {
        let frame = sampler.sample(i as u64);
        norm(&frame.sketch(v)) >= alpha_q * v_norm
    });
    Ok(hits.iter().filter(|&&h| h).count() as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_dimension_always_aligned() {
        let sampler = FrameSampler::new(6, 6, Streams::new(1)).unwrap();
        let v = [0.3, -1.0, 2.0, 0.0, 0.5, 1.0];
        let prob = empirical_min_alignment(&sampler, &v, 0.4, 200, Parallelism::Sequential).unwrap();
        assert_eq!(prob, 1.0);
    }

    #[test]
    fn errors() {
        let sampler = FrameSampler::new(3, 1, Streams::new(1)).unwrap();
        assert!(matches!(
            empirical_min_alignment(&sampler, &[0.0; 3], 0.1, 10, Parallelism::Sequential),
            Err(Error::ZeroVector)
        ));
        assert!(empirical_min_alignment(&sampler, &[1.0; 2], 0.1, 10, Parallelism::Sequential).is_err());
        assert!(FrameSampler::new(3, 4, Streams::new(1)).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let sampler = FrameSampler::new(30, 3, Streams::new(5)).unwrap();
        let mut v = vec![0.0; 30];
        v[0] = 1.0;
        let a = empirical_min_alignment(&sampler, &v, 0.3, 300, Parallelism::Sequential).unwrap();
        let b = empirical_min_alignment(&sampler, &v, 0.3, 300, Parallelism::Threads(4)).unwrap();
        assert_eq!(a, b);
    }
}
