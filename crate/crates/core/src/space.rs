//! Discretized operator workspaces on `[0,T]` and `[0,T]²`.
//!
//! A space bundles the grid(s), the ψ-map, the assembled ψ-Hilfer operator
//! matrices per axis, and trapezoid quadrature. It exposes the handful of
//! energy primitives every solver is built from: per-axis gradients, the
//! modular ρ_r(u) = Σᵢ ∫ |Dᵢu|^r dξ, the weak pairing, and the gradient of
//! u ↦ ρ_r(u)/r with respect to interior nodal values (which is exactly the
//! weak-residual vector against the interior hat test cone).

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::Error;
use crate::fracops::{FracParams, OperatorMatrices1D};
use crate::grid::Grid1D;
use crate::par;
use crate::precond::{Precond, PrecondKind};
use crate::psi::PsiMap;

/// Elementwise vector operations shared by 1D and 2D nodal fields.
pub trait FieldOps: Clone + Send + Sync {
    fn inner(&self, other: &Self) -> f64;
    /// self += a·x
    fn axpy(&mut self, a: f64, x: &Self);
    fn scale(&mut self, a: f64);
    fn map_inplace(&mut self, f: &dyn Fn(f64) -> f64);
    fn sup_abs(&self) -> f64;
    fn max_value(&self) -> f64;
    fn min_value(&self) -> f64;
    fn len(&self) -> usize;
}

impl FieldOps for Array1<f64> {
    fn inner(&self, other: &Self) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        self.zip_mut_with(x, |s, &v| *s += a * v);
    }
    fn scale(&mut self, a: f64) {
        self.mapv_inplace(|v| v * a);
    }
    fn map_inplace(&mut self, f: &dyn Fn(f64) -> f64) {
        self.mapv_inplace(f);
    }
    fn sup_abs(&self) -> f64 {
        self.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
    fn max_value(&self) -> f64 {
        self.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
    fn min_value(&self) -> f64 {
        self.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }
    fn len(&self) -> usize {
        self.dim()
    }
}

impl FieldOps for Array2<f64> {
    fn inner(&self, other: &Self) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        self.zip_mut_with(x, |s, &v| *s += a * v);
    }
    fn scale(&mut self, a: f64) {
        self.mapv_inplace(|v| v * a);
    }
    fn map_inplace(&mut self, f: &dyn Fn(f64) -> f64) {
        self.mapv_inplace(f);
    }
    fn sup_abs(&self) -> f64 {
        self.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
    fn max_value(&self) -> f64 {
        self.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
    fn min_value(&self) -> f64 {
        self.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }
    fn len(&self) -> usize {
        self.dim().0 * self.dim().1
    }
}

/// sign(g)·|g|^{r−1}, the integrand of the r-Laplacian nonlinearity.
/// Well-defined at g = 0 for every r > 1.
pub(crate) fn odd_power(g: f64, r: f64) -> f64 {
    if g == 0.0 {
        0.0
    } else {
        g.signum() * g.abs().powf(r - 1.0)
    }
}

/// Result of scanning the eigenfunction against a boundary strip of width δ.
#[derive(Debug, Clone)]
pub struct BarrierScan<F> {
    /// min over strip nodes of the gap field.
    pub gap_min: f64,
    /// min over non-strip interior nodes of the eigenfunction.
    pub floor_min: f64,
    /// 1.0 on strip nodes (interior, distance ≤ δ), 0.0 elsewhere.
    pub strip_mask: F,
    pub strip_nodes: usize,
    pub outside_nodes: usize,
}

/// Shared surface of the 1D and 2D workspaces, enough to express the
/// eigen/torsion solvers and barrier scans once for both dimensions.
pub trait Space {
    type Field: FieldOps;

    fn zeros(&self) -> Self::Field;
    /// Wq ⊙ f with boundary entries zeroed (the load vector of ∫ f·w).
    fn mass(&self, f: &Self::Field) -> Self::Field;
    /// ρ_r(u) = Σᵢ ∫ |Dᵢ u|^r dξ.
    fn modular(&self, u: &Self::Field, r: f64) -> f64;
    /// Gradient of u ↦ ρ_r(u)/r w.r.t. interior nodal values; boundary zero.
    fn energy_grad(&self, u: &Self::Field, r: f64) -> Self::Field;
    /// ⟨Σᵢ |Dᵢu|^{r−2}Dᵢu, Dᵢv⟩ under the tensor quadrature.
    fn pairing(&self, u: &Self::Field, v: &Self::Field, r: f64) -> f64;
    /// ∫ |u|^r dξ.
    fn lr_norm_pow(&self, u: &Self::Field, r: f64) -> f64;
    /// ∫ u dξ.
    fn integral(&self, u: &Self::Field) -> f64;
    /// Nodal field Σᵢ |Dᵢu|^r.
    fn grad_pow_sum(&self, u: &Self::Field, r: f64) -> Self::Field;
    fn clip_negative(&self, u: &mut Self::Field);
    fn zero_boundary(&self, u: &mut Self::Field);
    fn random_interior(&self, rng: &mut dyn rand::RngCore) -> Self::Field;
    fn interior_min(&self, u: &Self::Field) -> f64;
    /// True if the maximizing node sits in the first interior ring.
    fn max_touches_boundary(&self, u: &Self::Field) -> bool;
    fn barrier_scan(
        &self,
        gap: &Self::Field,
        theta: &Self::Field,
        delta: f64,
    ) -> crate::Result<BarrierScan<Self::Field>>;
    fn build_precond(&self, kind: PrecondKind) -> crate::Result<Precond<Self::Field>>;
    /// Domain length T.
    fn domain_length(&self) -> f64;
    /// Interior degrees of freedom.
    fn dofs(&self) -> usize;
}

// ---------------------------------------------------------------------------
// 1D workspace
// ---------------------------------------------------------------------------

/// Operators and quadrature on a single grid over `[0,T]`; used for the
/// classical-limit reduction runs and endpoint checks.
#[derive(Debug, Clone)]
pub struct Space1D {
    grid: Grid1D,
    psi: PsiMap,
    params: FracParams,
    ops: OperatorMatrices1D,
    w: Array1<f64>,
    dist: Array1<f64>,
}

impl Space1D {
    pub fn new(psi: PsiMap, params: FracParams, grid: Grid1D) -> crate::Result<Self> {
        let ops = OperatorMatrices1D::assemble(&psi, &grid, &params)?;
        let w = Array1::from(grid.trapezoid_weights());
        let dist = Array1::from(grid.boundary_distance());
        Ok(Space1D {
            grid,
            psi,
            params,
            ops,
            w,
            dist,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn psi(&self) -> &PsiMap {
        &self.psi
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }

    pub fn ops(&self) -> &OperatorMatrices1D {
        &self.ops
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.w
    }

    /// Left Hilfer derivative of nodal samples.
    pub fn d_left(&self, u: &Array1<f64>) -> Array1<f64> {
        self.ops.d_left().dot(u)
    }

    /// Strong-form r-Laplacian: D_right(|D_left u|^{r−2} D_left u).
    pub fn apply_strong(&self, u: &Array1<f64>, r: f64) -> Array1<f64> {
        let g = self.d_left(u).mapv(|v| odd_power(v, r));
        self.ops.d_right().dot(&g)
    }
}

impl Space for Space1D {
    type Field = Array1<f64>;

    fn zeros(&self) -> Array1<f64> {
        Array1::zeros(self.grid.len())
    }

    fn mass(&self, f: &Array1<f64>) -> Array1<f64> {
        let mut out = f * &self.w;
        self.zero_boundary(&mut out);
        out
    }

    fn modular(&self, u: &Array1<f64>, r: f64) -> f64 {
        let g = self.d_left(u);
        g.iter()
            .zip(self.w.iter())
            .map(|(&gi, &wi)| wi * gi.abs().powf(r))
            .sum()
    }

    fn energy_grad(&self, u: &Array1<f64>, r: f64) -> Array1<f64> {
        let g = self.d_left(u).mapv(|v| odd_power(v, r));
        let mut out = self.ops.d_left().t().dot(&(&g * &self.w));
        self.zero_boundary(&mut out);
        out
    }

    fn pairing(&self, u: &Array1<f64>, v: &Array1<f64>, r: f64) -> f64 {
        let gu = self.d_left(u).mapv(|x| odd_power(x, r));
        let gv = self.d_left(v);
        gu.iter()
            .zip(gv.iter())
            .zip(self.w.iter())
            .map(|((&a, &b), &wi)| wi * a * b)
            .sum()
    }

    fn lr_norm_pow(&self, u: &Array1<f64>, r: f64) -> f64 {
        u.iter()
            .zip(self.w.iter())
            .map(|(&ui, &wi)| wi * ui.abs().powf(r))
            .sum()
    }

    fn integral(&self, u: &Array1<f64>) -> f64 {
        u.iter().zip(self.w.iter()).map(|(&ui, &wi)| wi * ui).sum()
    }

    fn grad_pow_sum(&self, u: &Array1<f64>, r: f64) -> Array1<f64> {
        self.d_left(u).mapv(|v| v.abs().powf(r))
    }

    fn clip_negative(&self, u: &mut Array1<f64>) {
        u.mapv_inplace(|v| v.max(0.0));
    }

    fn zero_boundary(&self, u: &mut Array1<f64>) {
        let m = u.len();
        u[0] = 0.0;
        u[m - 1] = 0.0;
    }

    fn random_interior(&self, rng: &mut dyn rand::RngCore) -> Array1<f64> {
        let mut u = self.zeros();
        for i in 1..u.len() - 1 {
            u[i] = rng.random_range(0.1..1.0);
        }
        u
    }

    fn interior_min(&self, u: &Array1<f64>) -> f64 {
        u.iter()
            .skip(1)
            .take(u.len() - 2)
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }

    fn max_touches_boundary(&self, u: &Array1<f64>) -> bool {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, &v) in u.iter().enumerate() {
            if v > best.0 {
                best = (v, i);
            }
        }
        best.1 <= 1 || best.1 >= u.len() - 2
    }

    fn barrier_scan(
        &self,
        gap: &Array1<f64>,
        theta: &Array1<f64>,
        delta: f64,
    ) -> crate::Result<BarrierScan<Array1<f64>>> {
        let mut scan = BarrierScan {
            gap_min: f64::INFINITY,
            floor_min: f64::INFINITY,
            strip_mask: self.zeros(),
            strip_nodes: 0,
            outside_nodes: 0,
        };
        for i in 1..self.grid.len() - 1 {
            if self.dist[i] <= delta {
                scan.gap_min = scan.gap_min.min(gap[i]);
                scan.strip_mask[i] = 1.0;
                scan.strip_nodes += 1;
            } else {
                scan.floor_min = scan.floor_min.min(theta[i]);
                scan.outside_nodes += 1;
            }
        }
        if scan.outside_nodes == 0 {
            return Err(Error::StripTooWide { delta });
        }
        Ok(scan)
    }

    fn build_precond(&self, kind: PrecondKind) -> crate::Result<Precond<Array1<f64>>> {
        crate::precond::for_space1d(self, kind)
    }

    fn domain_length(&self) -> f64 {
        self.grid.length()
    }

    fn dofs(&self) -> usize {
        self.grid.interior()
    }
}

// ---------------------------------------------------------------------------
// 2D workspace
// ---------------------------------------------------------------------------

/// Operators and quadrature on the tensor grid over `Ω = [0,T]²`.
///
/// Fields are `(nx+2)×(ny+2)` arrays with x along rows. Per-axis operators
/// act by dense matrix products: `Dx u = Dₗ·u`, `Dy u = u·Dₗᵀ`.
#[derive(Debug, Clone)]
pub struct Space2D {
    gx: Grid1D,
    gy: Grid1D,
    psi: PsiMap,
    params: FracParams,
    ops_x: OperatorMatrices1D,
    ops_y: OperatorMatrices1D,
    wx: Array1<f64>,
    wy: Array1<f64>,
    wq: Array2<f64>,
    dist: Array2<f64>,
}

impl Space2D {
    pub fn new(psi: PsiMap, params: FracParams, gx: Grid1D, gy: Grid1D) -> crate::Result<Self> {
        let ops_x = OperatorMatrices1D::assemble(&psi, &gx, &params)?;
        let ops_y = if gx == gy {
            ops_x.clone()
        } else {
            OperatorMatrices1D::assemble(&psi, &gy, &params)?
        };
        let wx = Array1::from(gx.trapezoid_weights());
        let wy = Array1::from(gy.trapezoid_weights());
        let wq = Array2::from_shape_fn((gx.len(), gy.len()), |(i, j)| wx[i] * wy[j]);
        let dx = gx.boundary_distance();
        let dy = gy.boundary_distance();
        let dist = Array2::from_shape_fn((gx.len(), gy.len()), |(i, j)| dx[i].min(dy[j]));
        Ok(Space2D {
            gx,
            gy,
            psi,
            params,
            ops_x,
            ops_y,
            wx,
            wy,
            wq,
            dist,
        })
    }

    /// Same grid on both axes.
    pub fn square(psi: PsiMap, params: FracParams, grid: Grid1D) -> crate::Result<Self> {
        let gy = grid.clone();
        Self::new(psi, params, grid, gy)
    }

    pub fn grid_x(&self) -> &Grid1D {
        &self.gx
    }

    pub fn grid_y(&self) -> &Grid1D {
        &self.gy
    }

    pub fn psi(&self) -> &PsiMap {
        &self.psi
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.gx.len(), self.gy.len())
    }

    pub fn quad_weights(&self) -> &Array2<f64> {
        &self.wq
    }

    pub(crate) fn check_shape(&self, u: &Array2<f64>) -> crate::Result<()> {
        if u.dim() != self.shape() {
            return Err(Error::GridMismatch {
                field: u.dim(),
                grid: self.shape(),
            });
        }
        Ok(())
    }

    /// Per-axis left Hilfer derivatives.
    pub fn dx(&self, u: &Array2<f64>) -> Array2<f64> {
        par::matmul(self.ops_x.d_left(), u.view())
    }

    pub fn dy(&self, u: &Array2<f64>) -> Array2<f64> {
        par::matmul(u.view(), self.ops_x_or_y().d_left().t())
    }

    fn ops_x_or_y(&self) -> &OperatorMatrices1D {
        &self.ops_y
    }

    /// Adjoints of the per-axis derivatives under the plain dot product.
    pub fn dx_t(&self, g: &Array2<f64>) -> Array2<f64> {
        par::matmul(self.ops_x.d_left().t(), g.view())
    }

    pub fn dy_t(&self, g: &Array2<f64>) -> Array2<f64> {
        par::matmul(g.view(), self.ops_y.d_left())
    }

    /// Per-axis right Hilfer derivatives (strong-form compositions).
    pub fn dx_right(&self, g: &Array2<f64>) -> Array2<f64> {
        par::matmul(self.ops_x.d_right(), g.view())
    }

    pub fn dy_right(&self, g: &Array2<f64>) -> Array2<f64> {
        par::matmul(g.view(), self.ops_y.d_right().t())
    }

    /// Weak residual field against the interior hat cone:
    /// `coeff·∂(ρ_r/r)/∂u − Wq⊙rhs` at interior nodes, zero on the boundary.
    pub fn weak_residual_field(
        &self,
        u: &Array2<f64>,
        r: f64,
        coeff: f64,
        rhs: &Array2<f64>,
    ) -> Array2<f64> {
        let mut res = self.energy_grad(u, r);
        res.scale(coeff);
        res.axpy(-1.0, &self.mass(rhs));
        res
    }

    pub(crate) fn ops_x(&self) -> &OperatorMatrices1D {
        &self.ops_x
    }

    pub(crate) fn ops_y(&self) -> &OperatorMatrices1D {
        &self.ops_y
    }

    pub(crate) fn axis_weights(&self) -> (&Array1<f64>, &Array1<f64>) {
        (&self.wx, &self.wy)
    }
}

impl Space for Space2D {
    type Field = Array2<f64>;

    fn zeros(&self) -> Array2<f64> {
        Array2::zeros(self.shape())
    }

    fn mass(&self, f: &Array2<f64>) -> Array2<f64> {
        let mut out = f * &self.wq;
        self.zero_boundary(&mut out);
        out
    }

    fn modular(&self, u: &Array2<f64>, r: f64) -> f64 {
        let gx = self.dx(u);
        let gy = self.dy(u);
        let mut total = 0.0;
        for ((a, b), w) in gx.iter().zip(gy.iter()).zip(self.wq.iter()) {
            total += w * (a.abs().powf(r) + b.abs().powf(r));
        }
        total
    }

    fn energy_grad(&self, u: &Array2<f64>, r: f64) -> Array2<f64> {
        let gx = self.dx(u).mapv(|v| odd_power(v, r)) * &self.wq;
        let gy = self.dy(u).mapv(|v| odd_power(v, r)) * &self.wq;
        let mut out = self.dx_t(&gx);
        out.axpy(1.0, &self.dy_t(&gy));
        self.zero_boundary(&mut out);
        out
    }

    fn pairing(&self, u: &Array2<f64>, v: &Array2<f64>, r: f64) -> f64 {
        let gxu = self.dx(u);
        let gyu = self.dy(u);
        let gxv = self.dx(v);
        let gyv = self.dy(v);
        let mut total = 0.0;
        for (((&au, &av), (&bu, &bv)), &w) in gxu
            .iter()
            .zip(gxv.iter())
            .zip(gyu.iter().zip(gyv.iter()))
            .zip(self.wq.iter())
        {
            total += w * (odd_power(au, r) * av + odd_power(bu, r) * bv);
        }
        total
    }

    fn lr_norm_pow(&self, u: &Array2<f64>, r: f64) -> f64 {
        u.iter()
            .zip(self.wq.iter())
            .map(|(&ui, &wi)| wi * ui.abs().powf(r))
            .sum()
    }

    fn integral(&self, u: &Array2<f64>) -> f64 {
        u.iter().zip(self.wq.iter()).map(|(&ui, &wi)| wi * ui).sum()
    }

    fn grad_pow_sum(&self, u: &Array2<f64>, r: f64) -> Array2<f64> {
        let gx = self.dx(u);
        let gy = self.dy(u);
        Array2::from_shape_fn(self.shape(), |idx| {
            gx[idx].abs().powf(r) + gy[idx].abs().powf(r)
        })
    }

    fn clip_negative(&self, u: &mut Array2<f64>) {
        u.mapv_inplace(|v| v.max(0.0));
    }

    fn zero_boundary(&self, u: &mut Array2<f64>) {
        let (mx, my) = u.dim();
        u.row_mut(0).fill(0.0);
        u.row_mut(mx - 1).fill(0.0);
        u.column_mut(0).fill(0.0);
        u.column_mut(my - 1).fill(0.0);
    }

    fn random_interior(&self, rng: &mut dyn rand::RngCore) -> Array2<f64> {
        let mut u = self.zeros();
        let (mx, my) = u.dim();
        for i in 1..mx - 1 {
            for j in 1..my - 1 {
                u[[i, j]] = rng.random_range(0.1..1.0);
            }
        }
        u
    }

    fn interior_min(&self, u: &Array2<f64>) -> f64 {
        let (mx, my) = u.dim();
        let mut m = f64::INFINITY;
        for i in 1..mx - 1 {
            for j in 1..my - 1 {
                m = m.min(u[[i, j]]);
            }
        }
        m
    }

    fn max_touches_boundary(&self, u: &Array2<f64>) -> bool {
        let (mx, my) = u.dim();
        let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
        for i in 0..mx {
            for j in 0..my {
                if u[[i, j]] > best.0 {
                    best = (u[[i, j]], i, j);
                }
            }
        }
        best.1 <= 1 || best.1 >= mx - 2 || best.2 <= 1 || best.2 >= my - 2
    }

    fn barrier_scan(
        &self,
        gap: &Array2<f64>,
        theta: &Array2<f64>,
        delta: f64,
    ) -> crate::Result<BarrierScan<Array2<f64>>> {
        let (mx, my) = self.shape();
        let mut scan = BarrierScan {
            gap_min: f64::INFINITY,
            floor_min: f64::INFINITY,
            strip_mask: self.zeros(),
            strip_nodes: 0,
            outside_nodes: 0,
        };
        for i in 1..mx - 1 {
            for j in 1..my - 1 {
                if self.dist[[i, j]] <= delta {
                    scan.gap_min = scan.gap_min.min(gap[[i, j]]);
                    scan.strip_mask[[i, j]] = 1.0;
                    scan.strip_nodes += 1;
                } else {
                    scan.floor_min = scan.floor_min.min(theta[[i, j]]);
                    scan.outside_nodes += 1;
                }
            }
        }
        if scan.outside_nodes == 0 {
            return Err(Error::StripTooWide { delta });
        }
        Ok(scan)
    }

    fn build_precond(&self, kind: PrecondKind) -> crate::Result<Precond<Array2<f64>>> {
        crate::precond::for_space2d(self, kind)
    }

    fn domain_length(&self) -> f64 {
        self.gx.length()
    }

    fn dofs(&self) -> usize {
        self.gx.interior() * self.gy.interior()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn classical_space(n: usize) -> Space2D {
        let grid = Grid1D::uniform(1.0, n).unwrap();
        let params = FracParams::new(0.999, 0.0, 2.0).unwrap();
        Space2D::square(PsiMap::identity(), params, grid).unwrap()
    }

    fn sinsin(space: &Space2D) -> Array2<f64> {
        let nx = space.grid_x().nodes().to_vec();
        let ny = space.grid_y().nodes().to_vec();
        Array2::from_shape_fn(space.shape(), |(i, j)| {
            (PI * nx[i]).sin() * (PI * ny[j]).sin()
        })
    }

    #[test]
    fn modular_of_zero_and_scaling() {
        let s = classical_space(16);
        let z = s.zeros();
        assert_eq!(s.modular(&z, 2.0), 0.0);
        let u = sinsin(&s);
        let m1 = s.modular(&u, 3.0);
        let mut u2 = u.clone();
        u2.scale(2.0);
        let m2 = s.modular(&u2, 3.0);
        assert_abs_diff_eq!(m2, 8.0 * m1, epsilon = 1e-10 * m1.abs());
    }

    #[test]
    fn classical_dirichlet_energy() {
        // ∫|∇(sin πx sin πy)|² over the unit square = π²/2, split evenly
        // across the two axes (analytic oracle: π²/4 per axis).
        let s = classical_space(96);
        let u = sinsin(&s);
        let m = s.modular(&u, 2.0);
        let expected = PI * PI / 2.0;
        assert!(
            (m - expected).abs() / expected < 0.01,
            "modular {m} vs {expected}"
        );
    }

    #[test]
    fn energy_grad_is_fd_derivative_of_modular() {
        let s = classical_space(8);
        let u = sinsin(&s);
        let r = 3.0;
        let g = s.energy_grad(&u, r);
        // central differences in a few interior directions
        for &(i, j) in &[(1usize, 1usize), (3, 4), (5, 2)] {
            let h = 1e-6;
            let mut up = u.clone();
            let mut dn = u.clone();
            up[[i, j]] += h;
            dn[[i, j]] -= h;
            let fd = (s.modular(&up, r) / r - s.modular(&dn, r) / r) / (2.0 * h);
            assert_abs_diff_eq!(g[[i, j]], fd, epsilon = 1e-5 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn energy_grad_boundary_is_zero() {
        let s = classical_space(8);
        let u = sinsin(&s);
        let g = s.energy_grad(&u, 2.0);
        let (mx, my) = g.dim();
        for i in 0..mx {
            assert_eq!(g[[i, 0]], 0.0);
            assert_eq!(g[[i, my - 1]], 0.0);
        }
        for j in 0..my {
            assert_eq!(g[[0, j]], 0.0);
            assert_eq!(g[[mx - 1, j]], 0.0);
        }
    }

    #[test]
    fn pairing_of_u_with_u_is_modular() {
        let s = classical_space(12);
        let u = sinsin(&s);
        for r in [2.0, 3.0] {
            let p = s.pairing(&u, &u, r);
            let m = s.modular(&u, r);
            assert_abs_diff_eq!(p, m, epsilon = 1e-12 * m.abs());
        }
    }

    #[test]
    fn integral_and_norm() {
        let s = classical_space(64);
        let u = sinsin(&s);
        // ∫ sin πx sin πy = (2/π)² over the unit square
        let v = s.integral(&u);
        assert!((v - 4.0 / (PI * PI)).abs() < 1e-3, "integral {v}");
        let n = s.lr_norm_pow(&u, 2.0);
        assert!((n - 0.25).abs() < 1e-3, "L2^2 {n}");
    }

    #[test]
    fn barrier_scan_strip_accounting() {
        let s = classical_space(9);
        let gap = Array2::from_elem(s.shape(), 2.0);
        let theta = Array2::from_elem(s.shape(), 0.5);
        let scan = s.barrier_scan(&gap, &theta, 0.15).unwrap();
        assert!(scan.strip_nodes > 0 && scan.outside_nodes > 0);
        assert_eq!(scan.strip_nodes + scan.outside_nodes, 81);
        assert_eq!(scan.gap_min, 2.0);
        assert_eq!(scan.floor_min, 0.5);
        assert!(s.barrier_scan(&gap, &theta, 0.6).is_err());
    }
}
