//! Execution policy for the data-parallel sweeps.
//!
//! With the `parallel` feature (default) the `Parallel` policy runs on the
//! rayon global pool. Without it every policy degrades to a plain sequential
//! loop with identical output order.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.into_par_iter().map(f).collect()
            }
            _ => items.into_iter().map(f).collect(),
        }
    }

    /// Maps `f` over `0..len` and concatenates the resulting vectors in index order.
    pub fn flat_map_range<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> Vec<R> + Sync + Send,
    {
        self.map((0..len).collect(), f).into_iter().flatten().collect()
    }

    /// True when `pred` holds for every index in `0..len`.
    pub fn all_range<F>(self, len: u64, pred: F) -> bool
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().all(pred)
            }
            _ => (0..len).all(pred),
        }
    }
}
