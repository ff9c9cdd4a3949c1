//! Data-parallel primitives with a sequential fallback.
//!
//! With the `parallel` feature (default) the heavy inner loops -- k-sweeps and
//! the O(n^2) Volterra convolutions -- run on rayon. Reductions are chunked at
//! fixed boundaries and the partial sums are combined sequentially, so results
//! are bitwise identical whatever the thread count. Without the feature the
//! same entry points run the plain loops.

use crate::C64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
const CHUNK: usize = 16_384;
// The reversed dot is memory-bound; splitting it only pays for very long
// convolution tails (see benches/parallel.rs for the crossover).
#[cfg(feature = "parallel")]
const PAR_MIN: usize = 1 << 20;

/// Map over 0..n producing an ordered Vec.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n >= 64 {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// Sequential reversed dot product: sum_i a[i] * b[len-1-i].
pub fn dot_rev_seq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter().rev()).map(|(x, y)| x * y).sum()
}

/// Sequential reversed dot with a complex second factor.
pub fn dot_rev_c_seq(a: &[f64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter().rev())
        .map(|(x, y)| y * *x)
        .fold(C64::new(0.0, 0.0), |acc, v| acc + v)
}

/// Reversed dot product, parallel over fixed chunks when large.
pub fn dot_rev(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    {
        let n = a.len();
        if n >= PAR_MIN {
            let partials: Vec<f64> = (0..n.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let lo = c * CHUNK;
                    let hi = (lo + CHUNK).min(n);
                    let mut acc = 0.0;
                    for i in lo..hi {
                        acc += a[i] * b[n - 1 - i];
                    }
                    acc
                })
                .collect();
            return partials.iter().sum();
        }
    }
    dot_rev_seq(a, b)
}

/// Reversed dot with complex second factor, parallel over fixed chunks.
pub fn dot_rev_c(a: &[f64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    {
        let n = a.len();
        if n >= PAR_MIN {
            let partials: Vec<C64> = (0..n.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let lo = c * CHUNK;
                    let hi = (lo + CHUNK).min(n);
                    let mut acc = C64::new(0.0, 0.0);
                    for i in lo..hi {
                        acc += b[n - 1 - i] * a[i];
                    }
                    acc
                })
                .collect();
            return partials.iter().fold(C64::new(0.0, 0.0), |s, v| s + v);
        }
    }
    dot_rev_c_seq(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rev_dot_matches_naive() {
        let a: Vec<f64> = (0..100_000).map(|i| (i as f64 * 0.001).sin()).collect();
        let b: Vec<f64> = (0..100_000).map(|i| (i as f64 * 0.002).cos()).collect();
        let naive: f64 = a
            .iter()
            .enumerate()
            .map(|(i, x)| x * b[b.len() - 1 - i])
            .sum();
        assert!((dot_rev(&a, &b) - naive).abs() < 1e-9 * naive.abs().max(1.0));
        assert_eq!(dot_rev_seq(&a, &b), naive);
    }
}
