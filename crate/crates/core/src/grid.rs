//! 1D grids over `[0, T]`, optionally graded toward the left endpoint.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A 1D grid `0 = ξ₀ < ξ₁ < … < ξ_{n+1} = T` with `n` interior nodes.
///
/// Graded grids place nodes at `ξ_i = T·(i/(n+1))^g`; `g = 1` is uniform,
/// `g > 1` clusters nodes near the origin where the fractional kernels are
/// singular and eigen/torsion fields develop boundary layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    length: f64,
    interior: usize,
    grading: f64,
    nodes: Vec<f64>,
}

impl Grid1D {
    /// Uniform grid with `n` interior nodes.
    pub fn uniform(length: f64, n: usize) -> crate::Result<Self> {
        Self::graded(length, n, 1.0)
    }

    /// Graded grid `ξ_i = T·(i/(n+1))^g`.
    pub fn graded(length: f64, n: usize, grading: f64) -> crate::Result<Self> {
        if !(length > 0.0) {
            return Err(Error::parameter("T", length, "(0, inf)"));
        }
        if !(grading > 0.0) {
            return Err(Error::parameter("grading", grading, "(0, inf)"));
        }
        if n < 1 {
            return Err(Error::GridSize { needed: 1, got: n });
        }
        let m = n + 1;
        let mut nodes: Vec<f64> = (0..=m)
            .map(|i| length * (i as f64 / m as f64).powf(grading))
            .collect();
        // Pin the endpoints exactly; powf can leave them off by an ulp.
        nodes[0] = 0.0;
        nodes[m] = length;
        let g = Grid1D {
            length,
            interior: n,
            grading,
            nodes,
        };
        g.validate()?;
        Ok(g)
    }

    /// Builds a grid from explicit nodes. Endpoints must be exactly 0 and T.
    pub fn from_nodes(nodes: Vec<f64>) -> crate::Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::GridSize {
                needed: 1,
                got: nodes.len().saturating_sub(2),
            });
        }
        let g = Grid1D {
            length: *nodes.last().unwrap(),
            interior: nodes.len() - 2,
            grading: f64::NAN,
            nodes,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> crate::Result<()> {
        if self.nodes[0] != 0.0 {
            return Err(Error::GridNodes(format!(
                "left endpoint {} is not 0",
                self.nodes[0]
            )));
        }
        if *self.nodes.last().unwrap() != self.length || !(self.length > 0.0) {
            return Err(Error::GridNodes(format!(
                "right endpoint {} is not T = {}",
                self.nodes.last().unwrap(),
                self.length
            )));
        }
        for w in self.nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::GridNodes(format!(
                    "nodes not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    /// Domain length T.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of interior nodes n.
    pub fn interior(&self) -> usize {
        self.interior
    }

    /// Total node count n + 2.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grading exponent (NaN for grids built from explicit nodes).
    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// All nodes including both endpoints.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Trapezoid quadrature weights over all nodes.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let m = self.nodes.len();
        let mut w = vec![0.0; m];
        w[0] = 0.5 * (self.nodes[1] - self.nodes[0]);
        w[m - 1] = 0.5 * (self.nodes[m - 1] - self.nodes[m - 2]);
        for i in 1..m - 1 {
            w[i] = 0.5 * (self.nodes[i + 1] - self.nodes[i - 1]);
        }
        w
    }

    /// Distance of each node to the nearest endpoint.
    pub fn boundary_distance(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|&x| x.min(self.length - x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_nodes_and_weights() {
        let g = Grid1D::uniform(1.0, 3).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let w = g.trapezoid_weights();
        assert_eq!(w, vec![0.125, 0.25, 0.25, 0.25, 0.125]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn graded_grid_clusters_left() {
        let g = Grid1D::graded(1.0, 7, 2.0).unwrap();
        let n = g.nodes();
        assert_eq!(n[0], 0.0);
        assert_eq!(*n.last().unwrap(), 1.0);
        // spacing grows toward the right for g > 1
        assert!(n[1] - n[0] < n[7] - n[6]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid1D::uniform(-1.0, 4).is_err());
        assert!(Grid1D::uniform(1.0, 0).is_err());
        assert!(Grid1D::graded(1.0, 4, 0.0).is_err());
        assert!(Grid1D::from_nodes(vec![0.0, 0.5, 0.4, 1.0]).is_err());
        assert!(Grid1D::from_nodes(vec![0.1, 0.5, 1.0]).is_err());
    }

    #[test]
    fn weights_integrate_linear_exactly() {
        let g = Grid1D::graded(2.0, 13, 1.7).unwrap();
        let w = g.trapezoid_weights();
        let integral: f64 = g
            .nodes()
            .iter()
            .zip(&w)
            .map(|(&x, &wi)| wi * (3.0 * x + 1.0))
            .sum();
        // ∫₀² (3x+1) dx = 8
        assert!((integral - 8.0).abs() < 1e-12);
    }
}
