//! Order-preserving maps over replicate indices.
//!
//! With the `parallel` feature (on by default) work is spread over a rayon
//! pool; without it everything runs on the calling thread. Results are always
//! returned in index order, so output never depends on scheduling.

/// Maps `f` over `0..len` on the current thread.
pub fn map_sequential<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

/// Maps `f` over `0..len` on the active rayon pool.
#[cfg(feature = "parallel")]
pub fn map_parallel<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

/// Parallel when the feature is enabled, sequential otherwise.
pub fn map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(len, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(len, f)
    }
}

/// Runs `f` with at most `workers` threads; `0` keeps the global default.
/// A no-op wrapper in sequential builds.
pub fn with_workers<R, F>(workers: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        if workers == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}

/// Whether this build runs replicates in parallel.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
