//! The torsion problem: `A e = 1` with zero trace, solved by minimizing the
//! strictly convex energy `J(e) = ρ_r(e)/r − ∫ e dξ`, plus the sup-norm
//! `l_r = ‖e_r‖_∞` consumed by the supersolution construction.

use serde::Serialize;

use crate::error::Error;
use crate::minimize::{minimize, MinimizeOptions};
use crate::precond::PrecondKind;
use crate::space::{FieldOps, Space};

#[derive(Debug, Clone)]
pub struct TorsionOptions {
    /// Sup-norm threshold on the discrete gradient of J.
    pub tol: f64,
    pub max_iter: usize,
    pub precond: PrecondKind,
}

impl Default for TorsionOptions {
    fn default() -> Self {
        TorsionOptions {
            tol: 1e-9,
            max_iter: 4000,
            precond: PrecondKind::Fractional,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TorsionSolution<F> {
    pub e: F,
    /// l_r = ‖e_r‖_∞.
    pub l: f64,
    pub r: f64,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    /// Energy after each accepted descent step.
    pub energy_history: Vec<f64>,
}

/// Solves the torsion problem on `space`, optionally from a caller-supplied
/// start (the default zero start is deterministic).
pub fn solve_torsion<S: Space>(
    space: &S,
    r: f64,
    opts: &TorsionOptions,
    start: Option<S::Field>,
) -> crate::Result<TorsionSolution<S::Field>> {
    if !(r > 1.0) {
        return Err(Error::parameter("r", r, "(1, inf)"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::parameter("tol", opts.tol, "(0, inf)"));
    }
    let precond = space.build_precond(opts.precond)?;
    let mut ones = space.zeros();
    ones.map_inplace(&|_| 1.0);
    let b = space.mass(&ones);
    let eval = |w: &S::Field| {
        let value = space.modular(w, r) / r - b.inner(w);
        let mut grad = space.energy_grad(w, r);
        grad.axpy(-1.0, &b);
        (value, grad)
    };
    let x0 = match start {
        Some(mut s0) => {
            // zero-trace projection of the supplied start
            let mut z = space.zeros();
            z.axpy(1.0, &s0);
            space_zero_boundary(space, &mut z);
            s0 = z;
            s0
        }
        None => space.zeros(),
    };
    let solved = minimize(
        x0,
        eval,
        &precond,
        &MinimizeOptions {
            grad_tol: opts.tol,
            max_iter: opts.max_iter,
            ..Default::default()
        },
    )?;
    Ok(TorsionSolution {
        l: solved.x.max_value(),
        r,
        iterations: solved.iterations,
        final_gradient_norm: solved.grad_sup,
        energy_history: solved.energy_history,
        e: solved.x,
    })
}

fn space_zero_boundary<S: Space>(space: &S, f: &mut S::Field) {
    space.zero_boundary(f);
}

/// JSON-facing summary of a torsion run.
#[derive(Debug, Clone, Serialize)]
pub struct TorsionReport {
    pub r: f64,
    pub l: f64,
    pub iterations: usize,
    pub final_gradient_norm: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::FracParams;
    use crate::grid::Grid1D;
    use crate::psi::PsiMap;
    use crate::space::{Space1D, Space2D};

    fn classical_1d(t: f64, n: usize) -> Space1D {
        let g = Grid1D::uniform(t, n).unwrap();
        Space1D::new(
            PsiMap::identity(),
            FracParams::new(0.999, 0.0, 2.0).unwrap(),
            g,
        )
        .unwrap()
    }

    #[test]
    fn classical_1d_torsion_profile() {
        // −e″ = 1 on [0,1]: e = x(1−x)/2, l = 1/8.
        let s = classical_1d(1.0, 256);
        let sol = solve_torsion(&s, 2.0, &TorsionOptions::default(), None).unwrap();
        assert!((sol.l - 0.125).abs() / 0.125 < 0.01, "l = {}", sol.l);
        let mut err = 0.0f64;
        for (i, &x) in s.grid().nodes().iter().enumerate() {
            err = err.max((sol.e[i] - 0.5 * x * (1.0 - x)).abs());
        }
        assert!(err < 1.5e-3, "profile sup err {err}");
        assert!(s.interior_min(&sol.e) > 0.0);
        assert!(!s.max_touches_boundary(&sol.e));
    }

    #[test]
    fn domain_scaling_of_sup_norm() {
        // On [0,T] in the classical limit l = T²/8.
        let s = classical_1d(2.0, 256);
        let sol = solve_torsion(&s, 2.0, &TorsionOptions::default(), None).unwrap();
        assert!((sol.l - 0.5).abs() / 0.5 < 0.01, "l = {}", sol.l);
    }

    #[test]
    fn defining_residual_and_energy_descent() {
        let g = Grid1D::uniform(1.0, 24).unwrap();
        let s = Space2D::square(
            PsiMap::identity(),
            FracParams::new(0.75, 0.5, 3.0).unwrap(),
            g,
        )
        .unwrap();
        let opts = TorsionOptions {
            tol: 1e-8,
            ..Default::default()
        };
        let sol = solve_torsion(&s, 3.0, &opts, None).unwrap();
        // weak residual of A e = 1 is the minimized gradient
        let mut ones = s.zeros();
        ones.mapv_inplace(|_| 1.0);
        let res = s.weak_residual_field(&sol.e, 3.0, 1.0, &ones);
        assert!(res.sup_abs() <= 10.0 * opts.tol);
        for w in sol.energy_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        assert!(s.interior_min(&sol.e) > 0.0);
        assert!(!s.max_touches_boundary(&sol.e));
    }

    #[test]
    fn uniqueness_from_random_starts() {
        use rand::SeedableRng;
        let g = Grid1D::uniform(1.0, 16).unwrap();
        let s = Space2D::square(
            PsiMap::identity(),
            FracParams::new(0.75, 0.5, 2.0).unwrap(),
            g,
        )
        .unwrap();
        let mut rng1 = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let s1 = solve_torsion(
            &s,
            2.0,
            &TorsionOptions::default(),
            Some(s.random_interior(&mut rng1)),
        )
        .unwrap();
        let s2 = solve_torsion(
            &s,
            2.0,
            &TorsionOptions::default(),
            Some(s.random_interior(&mut rng2)),
        )
        .unwrap();
        let mut diff = s1.e.clone();
        diff.axpy(-1.0, &s2.e);
        assert!(diff.sup_abs() < 1e-6, "starts disagree by {}", diff.sup_abs());
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = classical_1d(1.0, 8);
        assert!(solve_torsion(&s, 1.0, &TorsionOptions::default(), None).is_err());
        let opts = TorsionOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(solve_torsion(&s, 2.0, &opts, None).is_err());
    }
}
