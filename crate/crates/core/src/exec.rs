//! Sequential or thread-pool execution of order-preserving maps.

use crate::error::{Error, Result};

/// How enumeration work is scheduled. Results never depend on the policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecPolicy {
    workers: usize,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        ExecPolicy { workers: 1 }
    }
}

impl ExecPolicy {
    pub fn sequential() -> Self {
        ExecPolicy { workers: 1 }
    }

    /// `workers == 0` is rejected; `1` runs on the calling thread.
    pub fn with_workers(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::precondition("worker count must be at least 1"));
        }
        Ok(ExecPolicy { workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Applies `f` to every item and returns the results in input order.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.workers > 1 {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.workers)
                .build()
                .expect("failed to start worker pool");
            return pool.install(|| items.par_iter().map(&f).collect());
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = ExecPolicy::sequential().map(&items, |x| x * x);
        let par = ExecPolicy::with_workers(4).unwrap().map(&items, |x| x * x);
        assert_eq!(seq, par);
        assert!(ExecPolicy::with_workers(0).is_err());
    }
}
