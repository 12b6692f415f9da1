//! Batch processing for working on many programs at once.
//!
//! [`map_batch`] applies a job to every item and returns the results in
//! input order. With the `parallel` feature (on by default) the work is
//! spread over a rayon thread pool; without it, or with `jobs` set to 1,
//! everything runs sequentially on the calling thread. Results are
//! identical either way — per-run state never crosses items.

/// Apply `work` to every item. `jobs` selects the worker count: `1` forces
/// sequential execution, `0` uses one worker per core, any other value
/// sizes the pool explicitly. Built without the `parallel` feature, every
/// setting runs sequentially.
pub fn map_batch<T, R, F>(items: Vec<T>, jobs: usize, work: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    if jobs == 1 {
        return map_sequential(items, work);
    }
    map_possibly_parallel(items, jobs, work)
}

fn map_sequential<T, R, F>(items: Vec<T>, work: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(work).collect()
}

#[cfg(feature = "parallel")]
fn map_possibly_parallel<T, R, F>(items: Vec<T>, jobs: usize, work: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("building a thread pool cannot fail with these settings");
    pool.install(|| items.into_par_iter().map(work).collect())
}

#[cfg(not(feature = "parallel"))]
fn map_possibly_parallel<T, R, F>(items: Vec<T>, _jobs: usize, work: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    map_sequential(items, work)
}
