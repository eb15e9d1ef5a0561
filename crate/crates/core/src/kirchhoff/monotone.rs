//! Monotone iteration inside the verified ordered bracket: freeze the
//! nonlinearities and the Kirchhoff coefficients at the previous iterate,
//! add a nondecreasing shift g to both sides, and solve the resulting
//! strictly convex frozen problems until the iterates settle.

use ndarray::Array2;
use serde::Serialize;

use crate::error::Error;
use crate::field2d::GridField2D;
use crate::minimize::{minimize, MinimizeOptions};
use crate::space::{FieldOps, Space};

use super::verify::system_residuals;
use super::{rhs_field, KirchhoffInstance, Problem, SubSuperPair};

/// Which end of the bracket seeds the iteration. Starting from the
/// subsolution yields nondecreasing iterates toward the minimal solution;
/// starting from the supersolution yields nonincreasing iterates toward the
/// maximal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartFrom {
    Sub,
    Super,
}

/// The auxiliary shift g(s) = λ·|s|^{ν−2}s with ν = min(p,q).
#[derive(Debug, Clone, Copy)]
pub enum AuxShift {
    /// λ estimated as a local Lipschitz constant of ζ‖a‖∞f (and ζ‖b‖∞χ)
    /// over the bracket range.
    Auto,
    Linear { lambda: f64 },
}

#[derive(Debug, Clone)]
pub struct MonotoneOptions {
    /// Stop when sup|u_{k+1}−u_k| and sup|v_{k+1}−v_k| drop below this.
    pub tol: f64,
    pub max_iter: usize,
    pub start: StartFrom,
    pub shift: AuxShift,
    /// Gradient tolerance of the inner solves; defaults to tol/10.
    pub inner_tol: Option<f64>,
    pub inner_max_iter: usize,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        MonotoneOptions {
            tol: 1e-6,
            max_iter: 400,
            start: StartFrom::Sub,
            shift: AuxShift::Auto,
            inner_tol: None,
            inner_max_iter: 4000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterRecord {
    pub du: f64,
    pub dv: f64,
    /// min over nodes of the signed increment (≥ −tol when monotone).
    pub min_increment_u: f64,
    pub min_increment_v: f64,
}

#[derive(Debug, Clone)]
pub struct BracketSolution {
    pub u: GridField2D,
    pub v: GridField2D,
    /// Sup-norms of the two weak residuals of the system at (u, v).
    pub residual_norms: [f64; 2],
    pub iterations: usize,
    pub trace: Vec<IterRecord>,
    pub lambda_shift: f64,
    pub start: StartFrom,
}

fn estimate_shift(
    inst: &KirchhoffInstance,
    (a0, a_sup): (f64, f64),
    (b0, b_sup): (f64, f64),
    pair: &SubSuperPair,
) -> f64 {
    let hi = pair.sup.0.sup() + pair.sup.1.sup();
    let lo = 1e-3 * (1.0 + hi);
    let mut lambda = 0.0f64;
    for k in 0..=32 {
        let s = lo + (hi - lo) * k as f64 / 32.0;
        let h = 1e-6 * (1.0 + s);
        let slope = |nl: &super::Nonlinearity, floor: f64| {
            let ds = (nl.eval_ext(s + h, s, floor) - nl.eval_ext(s - h, s, floor)) / (2.0 * h);
            let dt = (nl.eval_ext(s, s + h, floor) - nl.eval_ext(s, s - h, floor)) / (2.0 * h);
            ds.abs().max(dt.abs())
        };
        lambda = lambda
            .max(inst.zeta * a_sup * slope(&inst.f, inst.f_floor(a0)))
            .max(inst.zeta * b_sup * slope(&inst.chi, inst.chi_floor(b0)));
    }
    lambda
}

/// Runs the monotone scheme from one end of the bracket.
///
/// Each step solves, for the frozen data (u_k, v_k),
///
/// ```text
/// M₁(ρ_p(u_k))·A_p u + g(u) = ζ a f(u_k, v_k) + g(u_k)
/// M₂(ρ_q(v_k))·A_q v + g(v) = ζ b χ(u_k, v_k) + g(v_k)
/// ```
///
/// by convex energy minimization; the two frozen problems are independent
/// and run concurrently when the `parallel` feature is enabled.
pub fn monotone_iteration(
    problem: &Problem,
    inst: &KirchhoffInstance,
    pair: &SubSuperPair,
    opts: &MonotoneOptions,
) -> crate::Result<BracketSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::parameter("tol", opts.tol, "(0, inf)"));
    }
    let space = problem.space();
    let (a0, a_sup) = inst.a.bounds_on(space);
    let (b0, b_sup) = inst.b.bounds_on(space);
    let nu = inst.p.min(inst.q);
    let lambda = match opts.shift {
        AuxShift::Auto => estimate_shift(inst, (a0, a_sup), (b0, b_sup), pair),
        AuxShift::Linear { lambda } => {
            if !(lambda >= 0.0) {
                return Err(Error::parameter("lambda", lambda, "[0, inf)"));
            }
            lambda
        }
    };
    let g = |s: f64| lambda * crate::space::odd_power(s, nu);
    let g_prim = |s: f64| lambda * s.abs().powf(nu) / nu;

    let sign = match opts.start {
        StartFrom::Sub => 1.0,
        StartFrom::Super => -1.0,
    };
    let mut u = match opts.start {
        StartFrom::Sub => pair.sub.0.values().clone(),
        StartFrom::Super => pair.sup.0.values().clone(),
    };
    let mut v = match opts.start {
        StartFrom::Sub => pair.sub.1.values().clone(),
        StartFrom::Super => pair.sup.1.values().clone(),
    };

    let inner_opts = MinimizeOptions {
        grad_tol: opts.inner_tol.unwrap_or(opts.tol * 0.1),
        max_iter: opts.inner_max_iter,
        ..Default::default()
    };
    let bracket_tol_u = opts.tol * (1.0 + pair.sup.0.sup());
    let bracket_tol_v = opts.tol * (1.0 + pair.sup.1.sup());

    let mut trace = Vec::new();
    for iteration in 1..=opts.max_iter {
        let coeff_u = inst.m1.eval(space.modular(&u, inst.p));
        let coeff_v = inst.m2.eval(space.modular(&v, inst.q));
        let mut rhs_u = rhs_field(space, inst.zeta, &inst.a, &inst.f, inst.f_floor(a0), &u, &v);
        rhs_u.zip_mut_with(&u, |r, &s| *r += g(s));
        let mut rhs_v = rhs_field(
            space,
            inst.zeta,
            &inst.b,
            &inst.chi,
            inst.chi_floor(b0),
            &u,
            &v,
        );
        rhs_v.zip_mut_with(&v, |r, &s| *r += g(s));

        let solve = |r: f64, coeff: f64, rhs: &Array2<f64>, warm: &Array2<f64>| {
            let b = space.mass(rhs);
            let eval = |w: &Array2<f64>| {
                let shift_energy: f64 = w
                    .iter()
                    .zip(space.quad_weights().iter())
                    .map(|(&s, &wq)| wq * g_prim(s))
                    .sum();
                let value = coeff * space.modular(w, r) / r + shift_energy - b.inner(w);
                let mut grad = space.energy_grad(w, r);
                grad.scale(coeff);
                grad.axpy(1.0, &space.mass(&w.mapv(g)));
                grad.axpy(-1.0, &b);
                (value, grad)
            };
            minimize(warm.clone(), eval, problem.precond(), &inner_opts).map(|m| m.x)
        };

        #[cfg(feature = "parallel")]
        let (next_u, next_v) = rayon::join(
            || solve(inst.p, coeff_u, &rhs_u, &u),
            || solve(inst.q, coeff_v, &rhs_v, &v),
        );
        #[cfg(not(feature = "parallel"))]
        let (next_u, next_v) = (
            solve(inst.p, coeff_u, &rhs_u, &u),
            solve(inst.q, coeff_v, &rhs_v, &v),
        );
        let (next_u, next_v) = (next_u?, next_v?);

        let mut record = IterRecord {
            du: 0.0,
            dv: 0.0,
            min_increment_u: f64::INFINITY,
            min_increment_v: f64::INFINITY,
        };
        for (a, b) in next_u.iter().zip(u.iter()) {
            let inc = sign * (a - b);
            record.du = record.du.max((a - b).abs());
            record.min_increment_u = record.min_increment_u.min(inc);
        }
        for (a, b) in next_v.iter().zip(v.iter()) {
            let inc = sign * (a - b);
            record.dv = record.dv.max((a - b).abs());
            record.min_increment_v = record.min_increment_v.min(inc);
        }

        // The monotone direction is a defining property of the scheme.
        let worst_increment = record.min_increment_u.min(record.min_increment_v);
        if worst_increment < -opts.tol {
            return Err(Error::InvariantViolation {
                what: "monotone increment direction".into(),
                worst: worst_increment,
                iteration,
            });
        }
        // Bracket containment signals sufficient resolution.
        let escape = bracket_escape(&next_u, pair.sub.0.values(), pair.sup.0.values())
            .max(bracket_escape(&next_v, pair.sub.1.values(), pair.sup.1.values()));
        if escape > bracket_tol_u.max(bracket_tol_v) {
            return Err(Error::InvariantViolation {
                what: "bracket containment".into(),
                worst: escape,
                iteration,
            });
        }

        u = next_u;
        v = next_v;
        let done = record.du < opts.tol && record.dv < opts.tol;
        trace.push(record);
        if done {
            let residual_norms = system_residuals(problem, inst, &u, &v);
            let gx = space.grid_x().clone();
            let gy = space.grid_y().clone();
            return Ok(BracketSolution {
                u: GridField2D::from_solver(gx.clone(), gy.clone(), u),
                v: GridField2D::from_solver(gx, gy, v),
                residual_norms,
                iterations: iteration,
                trace,
                lambda_shift: lambda,
                start: opts.start,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "monotone iteration",
        iterations: opts.max_iter,
        residual: trace.last().map(|r| r.du.max(r.dv)).unwrap_or(f64::NAN),
    })
}

fn bracket_escape(w: &Array2<f64>, lo: &Array2<f64>, hi: &Array2<f64>) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for ((&x, &l), &h) in w.iter().zip(lo.iter()).zip(hi.iter()) {
        worst = worst.max(l - x).max(x - h);
    }
    worst
}
