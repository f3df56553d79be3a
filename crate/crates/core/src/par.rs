//! Fan-out helper for the independent identity checks run by the verifiers.
//!
//! With the `parallel` feature (the default) checks run on rayon; without it,
//! or when `ExecMode::Sequential` is requested, they run in order on the
//! calling thread. Results are returned in index order either way, so reports
//! are deterministic. The `FACTOPERAD_THREADS` environment variable caps the
//! rayon pool size; it is read once per process.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

#[cfg(feature = "parallel")]
fn configure_pool() {
    use std::sync::Once;
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        if let Ok(v) = std::env::var("FACTOPERAD_THREADS") {
            if let Ok(n) = v.trim().parse::<usize>() {
                if n >= 1 {
                    // ignore failure: the global pool may already exist
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    });
}

/// Applies `f` to `0..count`, collecting results in index order.
pub fn run_indexed<T, F>(count: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            configure_pool();
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_index_order() {
        let seq = run_indexed(32, ExecMode::Sequential, |i| i * i);
        let par = run_indexed(32, ExecMode::Parallel, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[5], 25);
    }
}
