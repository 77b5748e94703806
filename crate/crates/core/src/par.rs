//! Data-parallel map over index ranges, with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool.
//! Without it every [`Parallelism`] setting runs on the calling thread.
//! Results always come back in index order, so reductions done afterwards
//! are independent of the worker count.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Parallelism {
    /// Run on the calling thread.
    Sequential,
    /// A dedicated pool with this many workers. `Threads(1)` is sequential.
    Threads(usize),
    /// The global rayon pool.
    #[default]
    Auto,
}

impl Parallelism {
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            None => Parallelism::Auto,
            Some(0 | 1) => Parallelism::Sequential,
            Some(n) => Parallelism::Threads(n),
        }
    }

    /// Number of workers this setting resolves to on this machine.
    pub fn workers(self) -> usize {
        match self {
            Parallelism::Sequential => 1,
            Parallelism::Threads(n) => n.max(1),
            #[cfg(feature = "parallel")]
            Parallelism::Auto => rayon::current_num_threads(),
            #[cfg(not(feature = "parallel"))]
            Parallelism::Auto => 1,
        }
    }
}

/// `(0..n).map(f)` collected in order. `init` builds per-worker scratch state.
pub fn map_indexed<T, S, I, F>(par: Parallelism, n: usize, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Send + Sync,
    F: Fn(&mut S, usize) -> T + Send + Sync,
{
    match par {
        #[cfg(feature = "parallel")]
        Parallelism::Auto => parallel::map(n, init, f),
        #[cfg(feature = "parallel")]
        Parallelism::Threads(k) if k > 1 => {
            match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(|| parallel::map(n, init, f)),
                Err(_) => sequential(n, init, f),
            }
        }
        _ => sequential(n, init, f),
    }
}

fn sequential<T, S, I, F>(n: usize, init: I, f: F) -> Vec<T>
where
    I: Fn() -> S,
    F: Fn(&mut S, usize) -> T,
{
    let mut scratch = init();
    (0..n).map(|i| f(&mut scratch, i)).collect()
}

#[cfg(feature = "parallel")]
mod parallel {
    use rayon::prelude::*;

    pub(super) fn map<T, S, I, F>(n: usize, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Send + Sync,
        F: Fn(&mut S, usize) -> T + Send + Sync,
    {
        (0..n).into_par_iter().map_init(init, f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for par in [
            Parallelism::Sequential,
            Parallelism::Threads(1),
            Parallelism::Threads(3),
            Parallelism::Auto,
        ] {
            let out = map_indexed(par, 1000, || 0usize, |calls, i| {
                *calls += 1;
                i * i
            });
            assert_eq!(out, (0..1000).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn thread_flag_mapping() {
        assert_eq!(Parallelism::from_threads(None), Parallelism::Auto);
        assert_eq!(Parallelism::from_threads(Some(1)), Parallelism::Sequential);
        assert_eq!(Parallelism::from_threads(Some(8)), Parallelism::Threads(8));
        assert_eq!(Parallelism::Threads(8).workers(), 8);
    }
}
