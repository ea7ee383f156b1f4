//! Data-parallel helpers with a sequential fallback.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutionMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecutionMode {
    /// Whether parallel execution is actually available in this build.
    pub fn effective(self) -> ExecutionMode {
        if cfg!(feature = "parallel") {
            self
        } else {
            ExecutionMode::Sequential
        }
    }
}

/// Map over a slice, preserving input order in the output.
pub fn map<T, R, F>(mode: ExecutionMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode.effective() {
        ExecutionMode::Sequential => items.iter().map(f).collect(),
        ExecutionMode::Parallel => par_map(items, f),
    }
}

/// Map over `0..n`, preserving order.
pub fn map_range<R, F>(mode: ExecutionMode, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    let idx: Vec<usize> = (0..n).collect();
    map(mode, &idx, |&i| f(i))
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(ExecutionMode::Parallel, &xs, |x| x * x);
        let b = map(ExecutionMode::Sequential, &xs, |x| x * x);
        assert_eq!(a, b);
    }
}
