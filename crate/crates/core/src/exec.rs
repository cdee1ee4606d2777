//! Data-parallel map over independent work items.
//!
//! Results always come back in input order, so anything seeded per item (path
//! index, draw index) is identical under both execution modes. Without the
//! `parallel` feature, [`Execution::Parallel`] quietly runs sequentially.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `items.map(f)` in order, fanned out over the rayon pool when parallel.
pub fn par_map<T, R, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}

/// `(0..n).map(f)` in order.
pub fn par_map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    par_map(exec, (0..n).collect(), f)
}

/// Splits `0..total` into `parts` contiguous, nearly equal ranges.
pub fn chunks(total: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let parts = parts.clamp(1, total.max(1));
    (0..parts)
        .map(|g| g * total / parts..(g + 1) * total / parts)
        .collect()
}
