//! Deterministic execution helpers.
//!
//! Every parallel loop in this crate maps an index range to a vector in index
//! order and reduces sequentially afterwards, so results are bit-identical
//! across thread counts. The `parallel` feature swaps the map for a rayon
//! one; the sequential implementations are always compiled so benchmarks can
//! compare both.

/// Sequential indexed map, always available.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync,
    T: Send,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indexed_par<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Indexed map over `0..n`, parallel when the `parallel` feature is enabled.
///
/// Output order is the index order regardless of scheduling.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    #[cfg(feature = "parallel")]
    {
        map_indexed_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(n, f)
    }
}

/// Pairwise (cascade) summation: deterministic and accurate independent of
/// how the inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}
