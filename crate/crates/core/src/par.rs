//! Data-parallel map helpers.
//!
//! With the `parallel` feature (the default) these fan out over rayon;
//! without it they run sequentially. Only independent per-index work goes
//! through here — reductions stay sequential over the collected vectors, so
//! both configurations produce bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Collect `f(0), …, f(n−1)`, possibly in parallel.
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
