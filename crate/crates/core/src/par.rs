//! Internal helpers that switch between rayon and sequential execution.
//!
//! Every parallel loop here writes disjoint output rows, and scalar
//! reductions are always summed sequentially over an indexed buffer, so
//! results are bit-identical regardless of worker count or whether the
//! `parallel` feature is enabled.

use ndarray::{Array2, ArrayView2, Axis};

#[cfg(feature = "parallel")]
use ndarray::parallel::prelude::*;

/// Dense matrix product with row-parallel execution.
#[cfg(feature = "parallel")]
pub(crate) fn matmul(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    let (m, _) = a.dim();
    let n = b.dim().1;
    let mut out = Array2::zeros((m, n));
    let chunk = (m / rayon::current_num_threads().max(1)).max(16);
    out.axis_chunks_iter_mut(Axis(0), chunk)
        .into_par_iter()
        .enumerate()
        .for_each(|(k, mut rows)| {
            let lo = k * chunk;
            let hi = (lo + rows.dim().0).min(m);
            rows.assign(&a.slice(ndarray::s![lo..hi, ..]).dot(&b));
        });
    out
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn matmul(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    a.dot(&b)
}

/// Builds an `nrows × ncols` matrix, one row per call of `fill(i, row)`.
#[cfg(feature = "parallel")]
pub(crate) fn build_rows<F>(nrows: usize, ncols: usize, fill: F) -> Array2<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let mut out = Array2::zeros((nrows, ncols));
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| fill(i, row.as_slice_mut().expect("contiguous row")));
    out
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn build_rows<F>(nrows: usize, ncols: usize, fill: F) -> Array2<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let mut out = Array2::zeros((nrows, ncols));
    for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        fill(i, row.as_slice_mut().expect("contiguous row"));
    }
    out
}
