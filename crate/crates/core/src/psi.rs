//! The kernel map ψ appearing in ψ-Riemann-Liouville integrals and
//! ψ-Hilfer derivatives.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::grid::Grid1D;

/// The increasing kernel function ψ with its derivative ψ′.
///
/// All variants satisfy ψ(0) = 0 and ψ′ > 0 on `[0, ∞)`, so the same map can
/// be paired with any grid starting at the origin. The power kind is shifted,
/// `ψ(ξ) = (1+ξ)^γ − 1`, to keep ψ′ bounded away from zero at ξ = 0 (the
/// derivative compositions divide by ψ′ at every node, including endpoints).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiMap {
    /// ψ(ξ) = ξ — the classical Riemann-Liouville / Hilfer kernel.
    Identity,
    /// ψ(ξ) = (1+ξ)^γ − 1 with γ > 0.
    Power { gamma: f64 },
    /// ψ(ξ) = ln(1+ξ) — the Hadamard-type kernel.
    Log,
}

impl PsiMap {
    pub fn identity() -> Self {
        PsiMap::Identity
    }

    pub fn power(gamma: f64) -> crate::Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::parameter("gamma", gamma, "(0, inf)"));
        }
        Ok(PsiMap::Power { gamma })
    }

    pub fn log() -> Self {
        PsiMap::Log
    }

    /// ψ(ξ)
    pub fn eval(&self, xi: f64) -> f64 {
        match *self {
            PsiMap::Identity => xi,
            PsiMap::Power { gamma } => (1.0 + xi).powf(gamma) - 1.0,
            PsiMap::Log => (1.0 + xi).ln(),
        }
    }

    /// ψ′(ξ)
    pub fn deriv(&self, xi: f64) -> f64 {
        match *self {
            PsiMap::Identity => 1.0,
            PsiMap::Power { gamma } => gamma * (1.0 + xi).powf(gamma - 1.0),
            PsiMap::Log => 1.0 / (1.0 + xi),
        }
    }

    /// Checks strict monotonicity of ψ across the nodes of `grid`: every
    /// transformed node must strictly increase and ψ′ must be positive at
    /// every node. Violations mean the singular kernel (ψ(ξ)−ψ(s))^{μ−1}
    /// leaves its domain.
    pub fn validate_on(&self, grid: &Grid1D) -> crate::Result<()> {
        let nodes = grid.nodes();
        for &xi in nodes {
            let d = self.deriv(xi);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::KernelDomain { xi, deriv: d });
            }
        }
        for w in nodes.windows(2) {
            if !(self.eval(w[1]) > self.eval(w[0])) {
                return Err(Error::KernelDomain {
                    xi: w[1],
                    deriv: self.eval(w[1]) - self.eval(w[0]),
                });
            }
        }
        Ok(())
    }

    /// Short name used in reports.
    pub fn label(&self) -> String {
        match *self {
            PsiMap::Identity => "identity".into(),
            PsiMap::Power { gamma } => format!("power({gamma})"),
            PsiMap::Log => "log".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_exact() {
        let psi = PsiMap::identity();
        for xi in [0.0, 0.3, 1.0, 7.5] {
            assert_eq!(psi.eval(xi), xi);
            assert_eq!(psi.deriv(xi), 1.0);
        }
    }

    #[test]
    fn power_positive_derivative_at_origin() {
        let psi = PsiMap::power(2.0).unwrap();
        assert!(psi.deriv(0.0) > 0.0);
        assert_eq!(psi.eval(0.0), 0.0);
        // d/dxi [(1+xi)^2 - 1] = 2(1+xi)
        assert!((psi.deriv(0.5) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn power_rejects_nonpositive_exponent() {
        assert!(PsiMap::power(0.0).is_err());
        assert!(PsiMap::power(-1.0).is_err());
    }

    #[test]
    fn log_map_values() {
        let psi = PsiMap::log();
        assert_eq!(psi.eval(0.0), 0.0);
        assert!((psi.eval(1.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((psi.deriv(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validate_on_grid() {
        let g = Grid1D::uniform(1.0, 16).unwrap();
        for psi in [PsiMap::identity(), PsiMap::power(2.0).unwrap(), PsiMap::log()] {
            psi.validate_on(&g).unwrap();
        }
    }
}
