//! Execution helpers: order-preserving parallel map with a sequential
//! fallback.
//!
//! Hot loops (sample-grid scans, per-edge kernels) go through [`map_range`].
//! With the `parallel` feature the map runs on the rayon pool; results are
//! collected in index order and reductions happen sequentially afterwards, so
//! outputs are bitwise identical to the sequential path regardless of thread
//! count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, preserving index order.
///
/// `parallel = true` uses the rayon pool when the `parallel` feature is
/// enabled; otherwise (or with `parallel = false`) the map is sequential.
pub fn map_range<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}
