//! Data-parallel helpers.
//!
//! With the `parallel` feature these run on a rayon pool; without it, or
//! with [`Executor::sequential`], they run on the calling thread. Results are
//! always returned in input order so callers see identical output either way.

#[cfg(feature = "parallel")]
use std::sync::Arc;

#[derive(Clone)]
pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
    parallel: bool,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor").field("parallel", &self.parallel).finish()
    }
}

impl Default for Executor {
    fn default() -> Self {
        Executor::with_jobs(0)
    }
}

impl Executor {
    pub fn sequential() -> Executor {
        Executor {
            #[cfg(feature = "parallel")]
            pool: None,
            parallel: false,
        }
    }

    /// `jobs == 0` uses the global pool, `jobs == 1` is sequential, larger
    /// values build a dedicated pool of that many threads.
    pub fn with_jobs(jobs: usize) -> Executor {
        #[cfg(feature = "parallel")]
        {
            match jobs {
                1 => Executor::sequential(),
                0 => Executor { pool: None, parallel: true },
                n => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => Executor { pool: Some(Arc::new(pool)), parallel: true },
                    Err(_) => Executor { pool: None, parallel: true },
                },
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = jobs;
            Executor::sequential()
        }
    }

    pub fn is_parallel(&self) -> bool {
        self.parallel
    }

    #[cfg(feature = "parallel")]
    fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }

    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel {
            use rayon::prelude::*;
            return self.install(|| items.par_iter().map(f).collect());
        }
        items.iter().map(f).collect()
    }

    /// Maps over `0..n` in chunks and returns per-chunk results in order.
    pub fn map_range<R, F>(&self, n: u64, chunk: u64, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(std::ops::Range<u64>) -> R + Sync + Send,
    {
        let chunk = chunk.max(1);
        let ranges: Vec<std::ops::Range<u64>> =
            (0..n.div_ceil(chunk)).map(|i| i * chunk..((i + 1) * chunk).min(n)).collect();
        self.map(&ranges, |r| f(r.clone()))
    }

    /// The first `Some` in input order.
    pub fn find_map_first<T, R, F>(&self, items: &[T], f: F) -> Option<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Option<R> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel {
            use rayon::prelude::*;
            return self.install(|| items.par_iter().find_map_first(f));
        }
        items.iter().find_map(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Executor::sequential().map(&items, |x| x * x);
        let par = Executor::with_jobs(4).map(&items, |x| x * x);
        assert_eq!(seq, par);
        let f = |x: &u64| if x % 97 == 96 { Some(*x) } else { None };
        assert_eq!(Executor::sequential().find_map_first(&items, f), Some(96));
        assert_eq!(Executor::with_jobs(0).find_map_first(&items, f), Some(96));
        let sums = Executor::with_jobs(3).map_range(10, 3, |r| r.sum::<u64>());
        assert_eq!(sums, vec![3, 12, 21, 9]);
    }
}
