//! Scoped worker pools.

/// Runs `f` on a dedicated pool of `workers` threads, or on the global rayon
/// pool when `workers == 0`.
pub fn install<T: Send>(
    workers: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, rayon::ThreadPoolBuildError> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    Ok(pool.install(f))
}
