//! Thin wrappers over the optional rayon dependency.
//!
//! Every data-parallel site in the crate goes through these helpers, so the
//! `parallel` feature is the single switch between threaded and sequential
//! execution. All call sites are order-preserving maps over independent
//! inputs, which keeps outputs identical under either mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving input order in the output.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over the index range `0..n`, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
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

/// Always-sequential variant of [`map_slice`], used by the benchmarks as the
/// single-threaded baseline regardless of enabled features.
pub fn map_slice_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Caps the global thread pool at `jobs` threads (0 = one per core).
///
/// Must run before any parallel work; later calls are ignored by rayon, so
/// the CLI invokes this once at startup. A no-op in sequential builds.
pub fn configure_jobs(jobs: usize) {
    #[cfg(feature = "parallel")]
    {
        if jobs > 0 {
            // Ignore the error: the pool may already be initialized (e.g. in
            // tests that configure it twice); rayon keeps the first setting.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
    }
}
