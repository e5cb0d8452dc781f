use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Uniform one-dimensional grid.
///
/// Spatial grids put nodes on both endpoints. Cdf grids over `[0, 1]` are
/// cell-centered: nodes sit half a cell away from 0 and 1 so that quantities
/// like `1/rho` are never evaluated at the exact tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1d<S> {
    pub lo: S,
    pub hi: S,
    pub n: usize,
    pub centered: bool,
}

impl<S: Scalar> Grid1d<S> {
    /// Node-on-endpoint grid for the spatial variable.
    pub fn uniform(lo: S, hi: S, n: usize) -> Result<Self> {
        let g = Grid1d { lo, hi, n, centered: false };
        g.validate()?;
        Ok(g)
    }

    /// Cell-centered grid over `[0, 1]` for the cdf variable.
    pub fn cdf(n: usize) -> Result<Self> {
        let g = Grid1d { lo: S::zero(), hi: S::one(), n, centered: true };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hi > self.lo) {
            return Err(CoreError::InvalidGrid(format!(
                "hi ({}) must exceed lo ({})",
                self.hi, self.lo
            )));
        }
        if self.n < 8 {
            return Err(CoreError::InvalidGrid(format!("n = {} < 8", self.n)));
        }
        Ok(())
    }

    /// Node spacing.
    #[inline]
    pub fn spacing(&self) -> S {
        let width = self.hi - self.lo;
        if self.centered {
            width / S::from_usize(self.n).unwrap()
        } else {
            width / S::from_usize(self.n - 1).unwrap()
        }
    }

    #[inline]
    pub fn node(&self, j: usize) -> S {
        let h = self.spacing();
        if self.centered {
            self.lo + h * (S::from_usize(j).unwrap() + S::c(0.5))
        } else {
            self.lo + h * S::from_usize(j).unwrap()
        }
    }

    pub fn nodes(&self) -> Vec<S> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n == other.n
            && self.centered == other.centered
            && (self.lo - other.lo).abs() <= S::c(1e-14) * (S::one() + self.lo.abs())
            && (self.hi - other.hi).abs() <= S::c(1e-14) * (S::one() + self.hi.abs())
    }

    pub fn require_same(&self, other: &Self, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(CoreError::GridMismatch(format!(
                "{what}: {:?} vs {:?}",
                (self.lo.as_f64(), self.hi.as_f64(), self.n, self.centered),
                (other.lo.as_f64(), other.hi.as_f64(), other.n, other.centered)
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_nodes_hit_endpoints() {
        let g = Grid1d::<f64>::uniform(-2.0, 3.0, 11).unwrap();
        assert_eq!(g.node(0), -2.0);
        assert!((g.node(10) - 3.0).abs() < 1e-15);
        assert!((g.spacing() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cdf_grid_is_cell_centered() {
        let g = Grid1d::<f64>::cdf(8).unwrap();
        assert!((g.node(0) - 1.0 / 16.0).abs() < 1e-16);
        assert!((g.node(7) - 15.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(Grid1d::<f64>::uniform(0.0, 1.0, 4).is_err());
        assert!(Grid1d::<f64>::uniform(1.0, 0.0, 32).is_err());
    }
}
