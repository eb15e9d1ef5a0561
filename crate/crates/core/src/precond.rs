//! Stiffness-inverse preconditioners via per-axis generalized
//! eigendecompositions.
//!
//! The r = 2 part of every energy is `uᵀKu/2` with
//! `K = Sx⊗Wy + Wx⊗Sy` on the interior tensor grid, where `S` is a per-axis
//! stiffness and `W` the lumped trapezoid mass. Solving the generalized
//! problem `S v = λ W v` per axis diagonalizes `K`, so `K⁻¹` costs two dense
//! transforms per application. Two stiffness choices are exposed:
//!
//! - `Fractional`: `S = Dₗᵀ W Dₗ` with the actual ψ-Hilfer derivative — the
//!   exact Hessian of the quadratic modular, making r = 2 inner solves
//!   near-direct at any α;
//! - `Classical`: the P1 finite-element stiffness of −d²/dξ², the α → 1
//!   limit of the above.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{s, Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::space::{Space1D, Space2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecondKind {
    Fractional,
    Classical,
    Identity,
}

/// One axis of the tensor factorization: W-orthonormal eigenvectors and
/// eigenvalues of the generalized problem `S v = λ W v`.
#[derive(Debug, Clone)]
struct AxisFactor {
    q: Array2<f64>,
    lambda: Array1<f64>,
    /// w^{-1/2} on interior nodes.
    wh: Array1<f64>,
}

fn axis_factor(stiffness: &Array2<f64>, weights: &Array1<f64>) -> AxisFactor {
    let n = weights.len();
    let wh = weights.mapv(|w| 1.0 / w.sqrt());
    // B = W^{-1/2} S W^{-1/2}, symmetrized against roundoff.
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] = wh[i] * stiffness[[i, j]] * wh[j];
        }
    }
    let b = (&b + b.transpose()) * 0.5;
    let eig = SymmetricEigen::new(b);
    let max_l = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v));
    let floor = 1e-14 * max_l.max(1.0);
    let lambda = Array1::from_iter(eig.eigenvalues.iter().map(|&v| v.max(floor)));
    let q = Array2::from_shape_fn((n, n), |(i, j)| eig.eigenvectors[(i, j)]);
    AxisFactor { q, lambda, wh }
}

/// Interior block of `Dᵀ diag(w) D` for a full-grid operator matrix `d`.
fn interior_gram(d: &Array2<f64>, w_all: &Array1<f64>) -> Array2<f64> {
    let m = d.nrows();
    let n = m - 2;
    let d_int = d.slice(s![.., 1..m - 1]);
    let mut scaled = d_int.to_owned();
    for (mut row, &wi) in scaled.rows_mut().into_iter().zip(w_all.iter()) {
        row.mapv_inplace(|v| v * wi);
    }
    let mut g = d_int.t().dot(&scaled);
    debug_assert_eq!(g.dim(), (n, n));
    // symmetrize
    let gt = g.t().to_owned();
    g += &gt;
    g.mapv_inplace(|v| 0.5 * v);
    g
}

/// P1 finite-element stiffness of −u″ on the interior nodes.
fn classical_stiffness(grid: &crate::grid::Grid1D) -> Array2<f64> {
    let x = grid.nodes();
    let n = grid.interior();
    let mut s_mat = Array2::zeros((n, n));
    for i in 0..n {
        let hl = x[i + 1] - x[i];
        let hr = x[i + 2] - x[i + 1];
        s_mat[[i, i]] = 1.0 / hl + 1.0 / hr;
        if i + 1 < n {
            s_mat[[i, i + 1]] = -1.0 / hr;
            s_mat[[i + 1, i]] = -1.0 / hr;
        }
    }
    s_mat
}

enum Imp<F> {
    Identity,
    Solve(Box<dyn Fn(&F) -> F + Send + Sync>),
}

/// A positive-definite approximate inverse applied to gradient fields.
pub struct Precond<F> {
    imp: Imp<F>,
    kind: PrecondKind,
}

impl<F: Clone> Precond<F> {
    pub fn identity() -> Self {
        Precond {
            imp: Imp::Identity,
            kind: PrecondKind::Identity,
        }
    }

    pub fn apply(&self, g: &F) -> F {
        match &self.imp {
            Imp::Identity => g.clone(),
            Imp::Solve(f) => f(g),
        }
    }

    pub fn kind(&self) -> PrecondKind {
        self.kind
    }
}

fn interior_weights(w: &Array1<f64>) -> Array1<f64> {
    w.slice(s![1..w.len() - 1]).to_owned()
}

pub(crate) fn for_space1d(
    space: &Space1D,
    kind: PrecondKind,
) -> crate::Result<Precond<Array1<f64>>> {
    if kind == PrecondKind::Identity {
        return Ok(Precond::identity());
    }
    let w_all = space.weights().clone();
    let w_int = interior_weights(&w_all);
    let stiff = match kind {
        PrecondKind::Fractional => interior_gram(&space.ops().d_left().to_owned(), &w_all),
        PrecondKind::Classical => classical_stiffness(space.grid()),
        PrecondKind::Identity => unreachable!(),
    };
    let f = axis_factor(&stiff, &w_int);
    let m = space.grid().len();
    let apply = move |g: &Array1<f64>| -> Array1<f64> {
        let gi = g.slice(s![1..m - 1]).to_owned();
        // z = W^{-1/2} Q Λ⁻¹ Qᵀ W^{-1/2} g
        let g1 = &gi * &f.wh;
        let mut c = f.q.t().dot(&g1);
        c.zip_mut_with(&f.lambda, |v, &l| *v /= l);
        let z = f.q.dot(&c) * &f.wh;
        let mut out = Array1::zeros(m);
        out.slice_mut(s![1..m - 1]).assign(&z);
        out
    };
    Ok(Precond {
        imp: Imp::Solve(Box::new(apply)),
        kind,
    })
}

pub(crate) fn for_space2d(
    space: &Space2D,
    kind: PrecondKind,
) -> crate::Result<Precond<Array2<f64>>> {
    if kind == PrecondKind::Identity {
        return Ok(Precond::identity());
    }
    let (wx_all, wy_all) = space.axis_weights();
    let (stiff_x, stiff_y) = match kind {
        PrecondKind::Fractional => (
            interior_gram(&space.ops_x().d_left().to_owned(), wx_all),
            interior_gram(&space.ops_y().d_left().to_owned(), wy_all),
        ),
        PrecondKind::Classical => (
            classical_stiffness(space.grid_x()),
            classical_stiffness(space.grid_y()),
        ),
        PrecondKind::Identity => unreachable!(),
    };
    let fx = axis_factor(&stiff_x, &interior_weights(wx_all));
    let fy = axis_factor(&stiff_y, &interior_weights(wy_all));
    let (mx, my) = space.shape();
    let apply = move |g: &Array2<f64>| -> Array2<f64> {
        let gi = g.slice(s![1..mx - 1, 1..my - 1]).to_owned();
        // scale by W^{-1/2} on both axes
        let mut g1 = gi;
        for (mut row, &w) in g1.rows_mut().into_iter().zip(fx.wh.iter()) {
            row.mapv_inplace(|v| v * w);
        }
        for (mut col, &w) in g1.columns_mut().into_iter().zip(fy.wh.iter()) {
            col.mapv_inplace(|v| v * w);
        }
        // rotate to the eigenbasis, divide by λx + λy, rotate back
        let mut z = fx.q.t().dot(&g1).dot(&fy.q);
        for ((i, j), v) in z.indexed_iter_mut() {
            *v /= fx.lambda[i] + fy.lambda[j];
        }
        let mut z2 = fx.q.dot(&z).dot(&fy.q.t());
        for (mut row, &w) in z2.rows_mut().into_iter().zip(fx.wh.iter()) {
            row.mapv_inplace(|v| v * w);
        }
        for (mut col, &w) in z2.columns_mut().into_iter().zip(fy.wh.iter()) {
            col.mapv_inplace(|v| v * w);
        }
        let mut out = Array2::zeros((mx, my));
        out.slice_mut(s![1..mx - 1, 1..my - 1]).assign(&z2);
        out
    };
    Ok(Precond {
        imp: Imp::Solve(Box::new(apply)),
        kind,
    })
}
