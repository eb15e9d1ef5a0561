//! Verification of the four weak inequalities defining the sub/supersolution
//! pair, plus the nodewise ordering Φᵢ ≤ Ψᵢ.

use serde::Serialize;

use crate::field2d::{inequality_tol, GridField2D};
use crate::space::{FieldOps, Space};

use super::{rhs_field, KirchhoffInstance, Problem, SubSuperPair};

/// One inequality verdict. For subsolution lines the worst value is the
/// largest residual (must stay ≤ tol); for supersolution lines it is the
/// smallest residual (must stay ≥ −tol). `margin` ≥ 0 means pass.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictLine {
    pub name: &'static str,
    pub pass: bool,
    pub worst_value: f64,
    pub tol: f64,
    pub worst_node: (usize, usize),
    pub margin: f64,
    pub coeff: f64,
}

/// Nodewise ordering verdict.
#[derive(Debug, Clone, Serialize)]
pub struct OrderLine {
    pub name: &'static str,
    pub pass: bool,
    /// max(Φ − Ψ) over nodes; ≤ 0 when ordered.
    pub worst_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairVerdict {
    pub sub1: VerdictLine,
    pub sub2: VerdictLine,
    pub sup1: VerdictLine,
    pub sup2: VerdictLine,
    pub ordered1: OrderLine,
    pub ordered2: OrderLine,
}

impl PairVerdict {
    pub fn all_pass(&self) -> bool {
        self.sub1.pass
            && self.sub2.pass
            && self.sup1.pass
            && self.sup2.pass
            && self.ordered1.pass
            && self.ordered2.pass
    }

    pub fn lines(&self) -> [&VerdictLine; 4] {
        [&self.sub1, &self.sub2, &self.sup1, &self.sup2]
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        for line in self.lines() {
            if !line.pass {
                return Some(line.name);
            }
        }
        if !self.ordered1.pass {
            return Some(self.ordered1.name);
        }
        if !self.ordered2.pass {
            return Some(self.ordered2.name);
        }
        None
    }

    /// Smallest margin across the four inequality lines.
    pub fn worst_margin(&self) -> f64 {
        self.lines()
            .iter()
            .map(|l| l.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

fn interior_extreme(
    field: &ndarray::Array2<f64>,
    take_max: bool,
) -> (f64, (usize, usize)) {
    let (mx, my) = field.dim();
    let mut best = (if take_max { f64::NEG_INFINITY } else { f64::INFINITY }, (0, 0));
    for i in 1..mx - 1 {
        for j in 1..my - 1 {
            let v = field[[i, j]];
            if (take_max && v > best.0) || (!take_max && v < best.0) {
                best = (v, (i, j));
            }
        }
    }
    best
}

/// Runs the four weak-residual checks at coefficients M₁(ρ_p(·)), M₂(ρ_q(·))
/// with the instance's nonlinearities frozen at the pair itself.
/// `tol_scale` loosens the default scale-aware tolerance (used by the
/// refinement-invariance checks, which double it per refinement level).
pub fn verify_pair(
    problem: &Problem,
    inst: &KirchhoffInstance,
    pair: &SubSuperPair,
    tol_scale: f64,
) -> crate::Result<PairVerdict> {
    let space = problem.space();
    let (a0, _) = inst.a.bounds_on(space);
    let (b0, _) = inst.b.bounds_on(space);
    let f_floor = inst.f_floor(a0);
    let chi_floor = inst.chi_floor(b0);

    let (phi1, phi2) = (&pair.sub.0, &pair.sub.1);
    let (psi1, psi2) = (&pair.sup.0, &pair.sup.1);

    let line = |name: &'static str,
                    u: &GridField2D,
                    partner: &GridField2D,
                    r: f64,
                    coeff_fn: &crate::plap::Coefficient,
                    weight: &super::Weight,
                    nl: &super::Nonlinearity,
                    floor: f64,
                    first_arg: bool,
                    sub_side: bool|
     -> crate::Result<VerdictLine> {
        let rho = space.modular(u.values(), r);
        let coeff = coeff_fn.eval(rho);
        let (uu, vv) = if first_arg {
            (u.values(), partner.values())
        } else {
            (partner.values(), u.values())
        };
        let rhs = rhs_field(space, inst.zeta, weight, nl, floor, uu, vv);
        let residual = space.weak_residual_field(u.values(), r, coeff, &rhs);
        let tol = tol_scale * inequality_tol(coeff);
        let (worst_value, worst_node) = interior_extreme(&residual, sub_side);
        let margin = if sub_side {
            tol - worst_value
        } else {
            worst_value + tol
        };
        Ok(VerdictLine {
            name,
            pass: margin >= 0.0,
            worst_value,
            tol,
            worst_node,
            margin,
            coeff,
        })
    };

    let sub1 = line(
        "subsolution eq1", phi1, phi2, inst.p, &inst.m1, &inst.a, &inst.f, f_floor, true, true,
    )?;
    let sub2 = line(
        "subsolution eq2", phi2, phi1, inst.q, &inst.m2, &inst.b, &inst.chi, chi_floor, false,
        true,
    )?;
    let sup1 = line(
        "supersolution eq1", psi1, psi2, inst.p, &inst.m1, &inst.a, &inst.f, f_floor, true, false,
    )?;
    let sup2 = line(
        "supersolution eq2", psi2, psi1, inst.q, &inst.m2, &inst.b, &inst.chi, chi_floor, false,
        false,
    )?;

    let order_tol1 = tol_scale * 1e-8 * (1.0 + psi1.sup());
    let order_tol2 = tol_scale * 1e-8 * (1.0 + psi2.sup());
    let excess1 = pair.sub.0.max_excess_over(&pair.sup.0);
    let excess2 = pair.sub.1.max_excess_over(&pair.sup.1);
    let ordered1 = OrderLine {
        name: "ordering phi1 <= psi1",
        pass: excess1 <= order_tol1,
        worst_excess: excess1,
    };
    let ordered2 = OrderLine {
        name: "ordering phi2 <= psi2",
        pass: excess2 <= order_tol2,
        worst_excess: excess2,
    };

    Ok(PairVerdict {
        sub1,
        sub2,
        sup1,
        sup2,
        ordered1,
        ordered2,
    })
}

/// Sup-norms of the two weak residual fields of the system at (u, v):
/// used both for bracket solutions and for standalone residual reporting.
pub(crate) fn system_residuals(
    problem: &Problem,
    inst: &KirchhoffInstance,
    u: &ndarray::Array2<f64>,
    v: &ndarray::Array2<f64>,
) -> [f64; 2] {
    let space = problem.space();
    let (a0, _) = inst.a.bounds_on(space);
    let (b0, _) = inst.b.bounds_on(space);
    let rho_u = space.modular(u, inst.p);
    let rho_v = space.modular(v, inst.q);
    let rhs1 = rhs_field(
        space,
        inst.zeta,
        &inst.a,
        &inst.f,
        inst.f_floor(a0),
        u,
        v,
    );
    let rhs2 = rhs_field(
        space,
        inst.zeta,
        &inst.b,
        &inst.chi,
        inst.chi_floor(b0),
        u,
        v,
    );
    let r1 = space.weak_residual_field(u, inst.p, inst.m1.eval(rho_u), &rhs1);
    let r2 = space.weak_residual_field(v, inst.q, inst.m2.eval(rho_v), &rhs2);
    [r1.sup_abs(), r2.sup_abs()]
}
