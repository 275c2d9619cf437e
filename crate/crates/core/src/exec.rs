//! Replication engine.
//!
//! Work is a pure function of the replication index, and results come back
//! in index order, so every execution mode produces identical output. With
//! the `parallel` feature disabled, parallel requests run sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Worker count; `None` uses rayon's global pool.
    Parallel(Option<usize>),
}

impl Default for Execution {
    fn default() -> Self {
        Execution::Parallel(None)
    }
}

impl Execution {
    /// `Some(1)` maps to sequential, `Some(0)` and `None` to the global pool.
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            Some(1) => Execution::Sequential,
            Some(0) | None => Execution::Parallel(None),
            Some(n) => Execution::Parallel(Some(n)),
        }
    }

    pub fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match *self {
            Execution::Sequential => (0..count).map(f).collect(),
            Execution::Parallel(workers) => parallel_map(workers, count, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(workers: Option<usize>, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    match workers {
        None => (0..count).into_par_iter().map(f).collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| (0..count).into_par_iter().map(f).collect()),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool ({e}); using the global pool");
                (0..count).into_par_iter().map(f).collect()
            }
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(_workers: Option<usize>, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_canonical() {
        let f = |i: usize| (i as f64).sqrt();
        let seq = Execution::Sequential.map(1000, f);
        for exec in [Execution::Parallel(None), Execution::Parallel(Some(3)), Execution::from_workers(Some(1))] {
            assert_eq!(exec.map(1000, f), seq);
        }
    }
}
