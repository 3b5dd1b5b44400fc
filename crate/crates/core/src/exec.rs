//! Batch execution policy. Every batch is a pure function of its index,
//! and results come back in index order, so the reduction that follows is
//! the same no matter how many threads ran the batches.

/// How independent batches are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// One batch after another on the calling thread.
    Sequential,
    /// Rayon work stealing. `threads == 0` uses the global pool; any other
    /// value runs on a dedicated pool of that width. Without the `parallel`
    /// feature this behaves like [`Execution::Sequential`].
    Parallel { threads: usize },
    /// `Parallel` on the global pool when the `parallel` feature is on,
    /// `Sequential` otherwise.
    #[default]
    Auto,
}

impl Execution {
    /// Evaluates `f(0..count)` and returns the results in index order.
    pub fn map<T, F>(self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..count).map(f).collect(),
            Execution::Parallel { threads } => par_map(threads, count, f),
            Execution::Auto => par_map(0, count, f),
        }
    }

    /// True when this policy can actually use more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Execution::Sequential)
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(threads: usize, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
    if threads == 0 {
        return run();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(run),
        // A pool that cannot be built is not worth failing a simulation over.
        Err(_) => (0..count).map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(_threads: usize, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let want: Vec<u64> = (0..1000).map(|i| i * i).collect();
        for ex in [
            Execution::Sequential,
            Execution::Auto,
            Execution::Parallel { threads: 1 },
            Execution::Parallel { threads: 3 },
        ] {
            assert_eq!(ex.map(1000, |i| i * i), want);
        }
        assert!(Execution::Sequential.map(0, |i| i).is_empty());
    }
}
