//! Data-parallel primitives with a sequential fallback.
//!
//! Purpose
//! - Single switch point for the `parallel` feature. The heavy loops
//!   (direction sweeps, grid-row updates, residual scans) call these helpers
//!   and never mention rayon directly, so `--no-default-features` builds the
//!   exact same numerics single-threaded.
//!
//! Why this shape
//! - Each helper is chosen so the parallel and sequential bodies are
//!   order-independent: maps write disjoint outputs, reductions are max/sum of
//!   floats computed per-index from scratch. Results are bit-identical across
//!   thread counts, which the artifact determinism tests rely on.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
pub fn map<T: Sync, U: Send, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U + Sync + Send,
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

/// Map `f` over an index range, preserving order.
pub fn map_range<U: Send, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U + Sync + Send,
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

/// Apply `f(row_index, row_slice)` to each `width`-sized row of `buf`.
/// Rows are disjoint, so this parallelizes without locks.
pub fn for_each_row<F>(buf: &mut [f64], width: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    debug_assert_eq!(buf.len() % width, 0);
    #[cfg(feature = "parallel")]
    {
        buf.par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        buf.chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
    }
}

/// Maximum of `f(i)` over `0..n`; `f64::NEG_INFINITY` when empty.
pub fn max_over<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Number of worker threads the feature-selected backend will use.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<i64> = (0..1000).collect();
        let ys = map(&xs, |x| x * x);
        assert!(ys.iter().zip(&xs).all(|(y, x)| *y == x * x));
    }

    #[test]
    fn row_update_touches_every_row_once() {
        let mut buf = vec![0.0; 8 * 5];
        for_each_row(&mut buf, 5, |i, row| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (i * 5 + j) as f64;
            }
        });
        assert!(buf.iter().enumerate().all(|(k, v)| *v == k as f64));
    }

    #[test]
    fn max_over_matches_sequential_fold() {
        // A spiky function; max must not depend on reduction order.
        let f = |i: usize| ((i as f64 * 0.37).sin() * 100.0).abs();
        let par = max_over(10_000, f);
        let seq = (0..10_000).map(f).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(par, seq);
    }
}
