//! Explicit sub- and supersolution fields from the eigen/torsion data.

use serde::Serialize;

use crate::error::Error;
use crate::field2d::GridField2D;
use crate::space::Space2D;

use super::{AuxSolves, KirchhoffInstance};

/// The constants a pair was built from, carried into every certificate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Provenance {
    pub zeta: f64,
    pub c: f64,
    pub m: f64,
    pub delta: f64,
    pub sigma: f64,
    pub l_p: f64,
    pub l_q: f64,
    pub lambda1p: f64,
    pub lambda1q: f64,
}

/// A constructed (Φ₁, Φ₂) / (Ψ₁, Ψ₂) quadruple.
#[derive(Debug, Clone)]
pub struct SubSuperPair {
    pub sub: (GridField2D, GridField2D),
    pub sup: (GridField2D, GridField2D),
    pub provenance: Provenance,
}

impl SubSuperPair {
    /// Largest nodewise violation of Φᵢ ≤ Ψᵢ (negative when ordered).
    pub fn worst_order_excess(&self) -> f64 {
        self.sub
            .0
            .max_excess_over(&self.sup.0)
            .max(self.sub.1.max_excess_over(&self.sup.1))
    }
}

fn wrap(space: &Space2D, values: ndarray::Array2<f64>) -> GridField2D {
    GridField2D::from_solver(space.grid_x().clone(), space.grid_y().clone(), values)
}

/// Φ₁ = ((p−1)/p)·[ζk₀/(m·m₁)]^{1/(p−1)}·Θ_{1,p}^{p/(p−1)} and the analogous
/// Φ₂ with (q, m₂); m is the joint strip gap, m₁/m₂ the coefficient floors.
pub fn construct_subsolution(
    inst: &KirchhoffInstance,
    aux: &AuxSolves,
    space: &Space2D,
) -> crate::Result<(GridField2D, GridField2D)> {
    if !(aux.m > 0.0) {
        return Err(Error::Hypothesis(format!(
            "barrier gap m = {} is not positive",
            aux.m
        )));
    }
    let phi = |theta: &ndarray::Array2<f64>, r: f64, m_floor: f64| {
        let prefactor =
            (r - 1.0) / r * (inst.zeta * inst.k0 / (aux.m * m_floor)).powf(1.0 / (r - 1.0));
        theta.mapv(|v| prefactor * v.max(0.0).powf(r / (r - 1.0)))
    };
    let phi1 = phi(&aux.eig_p.theta1, inst.p, inst.m1.lower_bound());
    let phi2 = phi(&aux.eig_q.theta1, inst.q, inst.m2.lower_bound());
    Ok((wrap(space, phi1), wrap(space, phi2)))
}

/// Ψ₁ = (c/l_p)(ζ‖a‖∞)^{1/(p−1)}·e_p,
/// Ψ₂ = [χ(cζ^{1/(p−1)}, cζ^{1/(p−1)})]^{1/(q−1)}·(ζ‖b‖∞/m₂)^{1/(q−1)}·e_q.
pub fn construct_supersolution(
    inst: &KirchhoffInstance,
    aux: &AuxSolves,
    space: &Space2D,
    c: f64,
) -> crate::Result<(GridField2D, GridField2D)> {
    if !(c > 0.0) {
        return Err(Error::parameter("c", c, "(0, inf)"));
    }
    let (_, a_sup) = inst.a.bounds_on(space);
    let (b0, b_sup) = inst.b.bounds_on(space);
    let x = c * inst.zeta.powf(1.0 / (inst.p - 1.0));
    let chi_xx = inst.chi.eval_ext(x, x, inst.chi_floor(b0));
    if !(chi_xx > 0.0) {
        return Err(Error::Construction {
            at: x,
            value: chi_xx,
        });
    }
    let s1 = c / aux.tor_p.l * (inst.zeta * a_sup).powf(1.0 / (inst.p - 1.0));
    let s2 = chi_xx.powf(1.0 / (inst.q - 1.0))
        * (inst.zeta * b_sup / inst.m2.lower_bound()).powf(1.0 / (inst.q - 1.0));
    let psi1 = aux.tor_p.e.mapv(|v| s1 * v);
    let psi2 = aux.tor_q.e.mapv(|v| s2 * v);
    Ok((wrap(space, psi1), wrap(space, psi2)))
}

/// Builds both sides and records the provenance constants.
pub fn construct_pair(
    inst: &KirchhoffInstance,
    aux: &AuxSolves,
    space: &Space2D,
    c: f64,
) -> crate::Result<SubSuperPair> {
    let sub = construct_subsolution(inst, aux, space)?;
    let sup = construct_supersolution(inst, aux, space, c)?;
    Ok(SubSuperPair {
        sub,
        sup,
        provenance: Provenance {
            zeta: inst.zeta,
            c,
            m: aux.m,
            delta: aux.delta,
            sigma: aux.sigma,
            l_p: aux.tor_p.l,
            l_q: aux.tor_q.l,
            lambda1p: aux.eig_p.lambda1,
            lambda1q: aux.eig_q.lambda1,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::FracParams;
    use crate::grid::Grid1D;
    use crate::psi::PsiMap;
    use crate::space::{FieldOps, Space};
    use crate::spectral::EigenPair;
    use crate::torsion::TorsionSolution;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    /// Hand-built auxiliary data with analytic placeholder fields, so the
    /// construction formulas can be checked without running solvers.
    fn synthetic_aux(space: &Space2D) -> AuxSolves {
        let bump = |scale: f64| {
            let nx = space.grid_x().nodes().to_vec();
            let ny = space.grid_y().nodes().to_vec();
            let mut f = Array2::from_shape_fn(space.shape(), |(i, j)| {
                scale
                    * (std::f64::consts::PI * nx[i]).sin()
                    * (std::f64::consts::PI * ny[j]).sin()
            });
            space.zero_boundary(&mut f);
            f
        };
        let theta = bump(1.0);
        let e = bump(0.125);
        AuxSolves {
            eig_p: EigenPair {
                lambda1: 21.0,
                theta1: theta.clone(),
                r: 3.0,
                iterations: 1,
                residual: 0.0,
                quotient_history: vec![21.0],
            },
            eig_q: EigenPair {
                lambda1: 14.0,
                theta1: theta,
                r: 2.0,
                iterations: 1,
                residual: 0.0,
                quotient_history: vec![14.0],
            },
            m: 2.0,
            delta: 0.1,
            sigma: 0.3,
            strip_mask: space.zeros(),
            tor_p: TorsionSolution {
                l: e.max_value(),
                e: e.clone(),
                r: 3.0,
                iterations: 1,
                final_gradient_norm: 0.0,
                energy_history: vec![],
            },
            tor_q: TorsionSolution {
                l: e.max_value(),
                e,
                r: 2.0,
                iterations: 1,
                final_gradient_norm: 0.0,
                energy_history: vec![],
            },
        }
    }

    fn setup() -> (KirchhoffInstance, Space2D) {
        let inst = KirchhoffInstance::demo();
        let grid = Grid1D::uniform(1.0, 17).unwrap();
        let space = Space2D::square(
            inst.psi,
            FracParams::new(inst.alpha, inst.beta, inst.p).unwrap(),
            grid,
        )
        .unwrap();
        (inst, space)
    }

    #[test]
    fn subsolution_prefactor_and_sup() {
        let (mut inst, space) = setup();
        inst.p = 2.0;
        inst.q = 1.5;
        let aux = synthetic_aux(&space);
        let (phi1, _) = construct_subsolution(&inst, &aux, &space).unwrap();
        // (p−1)/p = 1/2 for p = 2, and sup Θ = 1 so
        // sup Φ₁ = 0.5·(ζk₀/(m·m₁))^{1/(p−1)}.
        let want = 0.5 * (inst.zeta * inst.k0 / (aux.m * 2.0)).powf(1.0);
        assert_abs_diff_eq!(phi1.sup(), want, epsilon = 1e-12 * want);
    }

    #[test]
    fn subsolution_zeta_scaling() {
        let (inst, space) = setup();
        let aux = synthetic_aux(&space);
        let (phi1, _) = construct_subsolution(&inst, &aux, &space).unwrap();
        let (phi1_doubled, _) =
            construct_subsolution(&inst.with_zeta(2.0 * inst.zeta), &aux, &space).unwrap();
        let factor = 2f64.powf(1.0 / (inst.p - 1.0));
        for (a, b) in phi1_doubled.values().iter().zip(phi1.values().iter()) {
            assert_abs_diff_eq!(*a, factor * b, epsilon = 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn supersolution_sup_and_linearity_in_c() {
        let (inst, space) = setup();
        let aux = synthetic_aux(&space);
        let c = 3.0;
        let (psi1, psi2) = construct_supersolution(&inst, &aux, &space, c).unwrap();
        // sup Ψ₁ = c(ζ‖a‖∞)^{1/(p−1)} by l_p-normalization of e_p.
        let want = c * (inst.zeta * 1.0).powf(1.0 / (inst.p - 1.0));
        assert_abs_diff_eq!(psi1.sup(), want, epsilon = 1e-12 * want);
        let (psi1_doubled, _) = construct_supersolution(&inst, &aux, &space, 2.0 * c).unwrap();
        for (a, b) in psi1_doubled.values().iter().zip(psi1.values().iter()) {
            assert_abs_diff_eq!(*a, 2.0 * b, epsilon = 1e-12 * (1.0 + b.abs()));
        }
        // Ψ₂/e_q is the constant [χ(cζ^{1/(p−1)}·2, …)]^{1/(q−1)}·(ζ‖b‖∞/m₂)^{1/(q−1)}
        let x = c * inst.zeta.powf(0.5);
        let expected = inst.chi.eval_raw(x, x).powf(1.0) * (inst.zeta * 1.0 / 1.0).powf(1.0);
        let idx = (space.shape().0 / 2, space.shape().1 / 2);
        let ratio = psi2.values()[[idx.0, idx.1]] / aux.tor_q.e[[idx.0, idx.1]];
        assert_abs_diff_eq!(ratio, expected, epsilon = 1e-10 * expected);
    }

    #[test]
    fn supersolution_rejects_nonpositive_chi() {
        let (mut inst, space) = setup();
        inst.chi = crate::kirchhoff::Nonlinearity::Constant { c: 0.0 };
        let aux = synthetic_aux(&space);
        assert!(matches!(
            construct_supersolution(&inst, &aux, &space, 1.0),
            Err(Error::Construction { .. })
        ));
    }

    #[test]
    fn pair_provenance_records_inputs() {
        let (inst, space) = setup();
        let aux = synthetic_aux(&space);
        let pair = construct_pair(&inst, &aux, &space, 4.0).unwrap();
        assert_eq!(pair.provenance.zeta, inst.zeta);
        assert_eq!(pair.provenance.c, 4.0);
        assert_eq!(pair.provenance.m, aux.m);
        assert_eq!(pair.provenance.l_p, aux.tor_p.l);
    }
}
