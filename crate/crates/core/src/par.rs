//! Data-parallel helpers. With the `parallel` feature they run on rayon;
//! otherwise sequentially. Output order always follows input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T: Sync, U: Send>(xs: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    xs.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T: Sync, U: Send>(xs: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    xs.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn flat_map<T: Sync, U: Send>(xs: &[T], f: impl Fn(&T) -> Vec<U> + Sync + Send) -> Vec<U> {
    xs.par_iter().map(f).collect::<Vec<_>>().into_iter().flatten().collect()
}

#[cfg(not(feature = "parallel"))]
pub fn flat_map<T: Sync, U: Send>(xs: &[T], f: impl Fn(&T) -> Vec<U> + Sync + Send) -> Vec<U> {
    xs.iter().flat_map(f).collect()
}

/// Sequential map regardless of the feature; used by benches as a baseline.
pub fn map_seq<T, U>(xs: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    xs.iter().map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Run `f` inside a pool with `jobs` threads (0 = rayon default).
#[cfg(feature = "parallel")]
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    if jobs == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R: Send>(_jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}
