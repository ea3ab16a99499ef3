//! Data-parallel map with a sequential fallback.
//!
//! With the default `parallel` feature the sweep loops fan out over a rayon
//! pool; without it the same code path degrades to a plain iterator, which
//! keeps results byte-identical between the two builds.

/// Applies `f` to every item, preserving input order in the output.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Applies `f` to every item, preserving input order in the output.
#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Caps the worker pool at `threads` (ignored in sequential builds). Must be
/// called before the first parallel operation; later calls have no effect.
#[cfg(feature = "parallel")]
pub fn limit_threads(threads: usize) {
    if threads >= 1 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

/// Caps the worker pool at `threads` (ignored in sequential builds). Must be
/// called before the first parallel operation; later calls have no effect.
#[cfg(not(feature = "parallel"))]
pub fn limit_threads(_threads: usize) {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let out = par_map((0..1000).collect::<Vec<i64>>(), |x| x * x);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, (i * i) as i64);
        }
    }
}
