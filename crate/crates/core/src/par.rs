//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature, work is spread over a rayon pool; without
//! it every call runs in order on the calling thread. Results are always
//! returned in index order, so reductions over them are deterministic.

/// How a batch of independent jobs is executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    #[default]
    Sequential,
    /// Number of worker threads; `0` lets rayon decide.
    Threads(usize),
}

impl Parallelism {
    pub fn from_threads(threads: usize) -> Self {
        if threads == 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Threads(threads)
        }
    }
}

/// Evaluates `f(0..len)` and returns the results in index order.
pub fn map_indexed<T, F>(len: usize, parallelism: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match parallelism {
        Parallelism::Sequential => (0..len).map(f).collect(),
        Parallelism::Threads(threads) => parallel_map(len, threads, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(len: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| (0..len).into_par_iter().map(&f).collect()),
        // pool creation only fails on resource exhaustion
        Err(_) => (0..len).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(len: usize, _threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_indexed(100, Parallelism::Sequential, |i| i * i);
        let par = map_indexed(100, Parallelism::Threads(4), |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }

    #[test]
    fn one_thread_is_sequential() {
        assert_eq!(Parallelism::from_threads(1), Parallelism::Sequential);
        assert_eq!(Parallelism::from_threads(8), Parallelism::Threads(8));
    }
}
