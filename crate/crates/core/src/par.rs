//! Execution strategy for the data-parallel kernels.
//!
//! With the `parallel` feature the helpers fan out over rayon's pool; without
//! it they run on the calling thread. Either way results are collected in
//! index order and reduced sequentially by the caller, so outputs do not
//! depend on the worker count.

use std::ops::Range;

/// Which strategy a kernel should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` when the crate was built with the `parallel` feature.
    pub fn auto() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }

    fn effective(self) -> Self {
        if cfg!(feature = "parallel") {
            self
        } else {
            Execution::Serial
        }
    }
}

/// Map `f` over `range`, collecting in order.
pub fn map_range<R, F>(exec: Execution, range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec.effective() {
        Execution::Serial => range.map(f).collect(),
        Execution::Parallel => parallel::map_range(range, f),
    }
}

/// Map `f` over a slice, collecting in order.
pub fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec.effective() {
        Execution::Serial => items.iter().map(f).collect(),
        Execution::Parallel => parallel::map_slice(items, f),
    }
}

#[cfg(feature = "parallel")]
mod parallel {
    use rayon::prelude::*;
    use std::ops::Range;

    pub fn map_range<R: Send, F: Fn(usize) -> R + Sync + Send>(range: Range<usize>, f: F) -> Vec<R> {
        range.into_par_iter().map(f).collect()
    }

    pub fn map_slice<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
        items.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
mod parallel {
    use std::ops::Range;

    pub fn map_range<R, F: Fn(usize) -> R>(range: Range<usize>, f: F) -> Vec<R> {
        range.map(f).collect()
    }

    pub fn map_slice<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serial_and_parallel_agree() {
        let a = map_range(Execution::Serial, 0..1000, |i| (i * i) as u64);
        let b = map_range(Execution::Parallel, 0..1000, |i| (i * i) as u64);
        assert_eq!(a, b);
    }
}
