//! Thin indirection over rayon so every data-parallel loop in the crate has a
//! sequential fallback. With the default `parallel` feature the `*_auto`
//! functions dispatch to rayon; without it they alias the sequential path.
//! The sequential implementations are always compiled so benchmarks can
//! compare both.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sequential reduction of f(0) + ... + f(n-1).
pub fn sum_indices_seq<F>(n: usize, f: F) -> u128
where
    F: Fn(usize) -> u128 + Sync + Send,
{
    (0..n).map(f).sum()
}

#[cfg(feature = "parallel")]
pub fn sum_indices<F>(n: usize, f: F) -> u128
where
    F: Fn(usize) -> u128 + Sync + Send,
{
    (0..n).into_par_iter().map(f).sum()
}

/// Sequential map into a Vec.
pub fn map_indices_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn sum_indices<F>(n: usize, f: F) -> u128
where
    F: Fn(usize) -> u128 + Sync + Send,
{
    sum_indices_seq(n, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indices_seq(n, f)
}

/// Sequential f64 sum (used by quadrature and spectral grids).
pub fn sum_f64_seq<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..n).map(f).sum()
}

#[cfg(feature = "parallel")]
pub fn sum_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..n).into_par_iter().map(f).sum()
}

#[cfg(not(feature = "parallel"))]
pub fn sum_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    sum_f64_seq(n, f)
}
