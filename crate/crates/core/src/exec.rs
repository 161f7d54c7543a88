//! Data-parallel map over sample indices, with a sequential fallback.
//!
//! Each sample draws from its own seeded stream, so both strategies return
//! identical results in identical order. Without the `parallel` feature
//! [`Exec::Parallel`] quietly runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// `f(0), ..., f(n - 1)` in order.
    pub fn map<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Applies `f` to every item of a slice, in order.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.map(items.len(), |i| f(&items[i]))
    }

    /// First failing index (smallest), with its error payload.
    pub fn find_failure<E, F>(self, n: usize, f: F) -> Option<(usize, E)>
    where
        E: Send,
        F: Fn(usize) -> Option<E> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().filter_map(|i| f(i).map(|e| (i, e))).min_by_key(|(i, _)| *i),
            _ => (0..n).find_map(|i| f(i).map(|e| (i, e))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let f = |i: usize| i * i + 1;
        assert_eq!(Exec::Sequential.map(100, f), Exec::Parallel.map(100, f));
        let g = |i: usize| (i % 7 == 3 && i > 10).then_some(i);
        assert_eq!(Exec::Sequential.find_failure(100, g), Some((17, 17)));
        assert_eq!(Exec::Parallel.find_failure(100, g), Some((17, 17)));
    }
}
