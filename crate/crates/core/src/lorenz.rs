use crate::error::{CoreError, Result};
use crate::grid::Grid1d;
use crate::numerics::{
    deriv1, deriv2, extrapolate_left_edge, extrapolate_right_edge, midpoint,
};
use crate::scalar::Scalar;

/// Curvature floor below which a Lorenz curve counts as degenerate
/// (its density would exceed `1/EPS_CURV`).
pub const EPS_CURV: f64 = 1e-10;

/// Lorenz-curve samples on a cell-centered cdf grid, with cached first and
/// second derivatives and the right-endpoint value `L(1)` (the first moment
/// of the underlying density).
#[derive(Clone, Debug)]
pub struct LorenzCurve<S> {
    grid: Grid1d<S>,
    values: Vec<S>,
    lf: Vec<S>,
    lff: Vec<S>,
    l1: S,
}

impl<S: Scalar> LorenzCurve<S> {
    /// Assemble from precomputed parts (the transform module and analytic
    /// presets use this); validates the class invariants.
    pub fn from_parts(
        grid: Grid1d<S>,
        values: Vec<S>,
        lf: Vec<S>,
        lff: Vec<S>,
        l1: S,
    ) -> Result<Self> {
        let c = LorenzCurve { grid, values, lf, lff, l1 };
        c.validate()?;
        Ok(c)
    }

    /// Build from values alone, with derivatives by finite differences.
    /// This is how PDE-evolved snapshots are packaged; the end-node second
    /// derivative uses the reciprocal-linear extrapolation described in the
    /// flows module.
    pub fn from_values_fd(grid: Grid1d<S>, values: Vec<S>, l1: S) -> Result<Self> {
        let h = grid.spacing();
        let lf = deriv1(&values, h);
        let lff = curvature_fd(&values, h);
        Self::from_parts(grid, values, lf, lff, l1)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !self.grid.centered {
            return Err(CoreError::InvalidCurve(
                "Lorenz curves live on cell-centered cdf grids".into(),
            ));
        }
        let n = self.grid.n;
        if self.values.len() != n || self.lf.len() != n || self.lff.len() != n {
            return Err(CoreError::InvalidCurve("field lengths disagree".into()));
        }
        for (j, &w) in self.lff.iter().enumerate() {
            if !(w > S::zero()) {
                return Err(CoreError::InvalidCurve(format!(
                    "L_ff not positive at node {j}: {w:e}"
                )));
            }
        }
        for j in 1..n {
            if self.lf[j] < self.lf[j - 1] {
                return Err(CoreError::InvalidCurve(format!(
                    "L_f not monotone between nodes {} and {}",
                    j - 1,
                    j
                )));
            }
        }
        // anchor: the curve must extrapolate to L(0) = 0. The bound is loose
        // on purpose; near f = 0 the exact curve bends at the scale of the
        // left quantile.
        let anchored = extrapolate_left_edge(&self.values).abs();
        let f0 = self.grid.node(0);
        let scale = self.lf[0].abs() + self.lf[n - 1].abs() + S::c(1e-9);
        if anchored > S::c(8.0) * f0 * scale {
            return Err(CoreError::InvalidCurve(format!(
                "L(0) anchor residual {anchored:e} too large"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn grid(&self) -> &Grid1d<S> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Cached first derivative; equals the inverse cdf of the underlying
    /// density.
    #[inline]
    pub fn lf(&self) -> &[S] {
        &self.lf
    }

    /// Cached second derivative; the reciprocal of the density at the
    /// quantile.
    #[inline]
    pub fn lff(&self) -> &[S] {
        &self.lff
    }

    /// Right-endpoint value `L(1)`.
    #[inline]
    pub fn l1(&self) -> S {
        self.l1
    }

    /// Scaled Gini functional of this curve: `int (f L(1) - L) df`.
    pub fn gini_area(&self) -> S {
        let h = self.grid.spacing();
        let integrand: Vec<S> = (0..self.grid.n)
            .map(|j| self.grid.node(j) * self.l1 - self.values[j])
            .collect();
        midpoint(&integrand, h)
    }

    /// `L + eps * eta` with derivative caches updated by finite differences
    /// of the perturbation and `L(1)` by right-edge extrapolation of `eta`.
    pub fn perturbed(&self, eta: &[S], eps: S) -> Result<Self> {
        let h = self.grid.spacing();
        let deta = deriv1(eta, h);
        let ddeta = deriv2(eta, h);
        let values: Vec<S> = self.values.iter().zip(eta).map(|(&a, &e)| a + eps * e).collect();
        let lf: Vec<S> = self.lf.iter().zip(&deta).map(|(&a, &e)| a + eps * e).collect();
        let lff: Vec<S> = self.lff.iter().zip(&ddeta).map(|(&a, &e)| a + eps * e).collect();
        let l1 = self.l1 + eps * extrapolate_right_edge(eta);
        Self::from_parts(self.grid, values, lf, lff, l1)
    }

    /// Residual of the `L(0) = 0` anchor under linear extrapolation.
    pub fn anchor_residual(&self) -> S {
        extrapolate_left_edge(&self.values)
    }
}

/// Second differences with the end nodes filled by linear extrapolation of
/// the reciprocal (the density is nearly linear in `f` at the tails, the
/// curvature is not). Floors at `EPS_CURV`.
pub fn curvature_fd<S: Scalar>(values: &[S], h: S) -> Vec<S> {
    let n = values.len();
    let h2 = h * h;
    let mut lff = vec![S::zero(); n];
    for j in 1..n - 1 {
        lff[j] = (values[j + 1] - S::c(2.0) * values[j] + values[j - 1]) / h2;
    }
    let floor = S::c(EPS_CURV);
    for j in 1..n - 1 {
        if lff[j] < floor {
            lff[j] = floor;
        }
    }
    let rho1 = (lff[1]).recip();
    let rho2 = (lff[2]).recip();
    lff[0] = (S::c(2.0) * rho1 - rho2).max(S::c(crate::density::EPS_POS)).recip();
    let rho1 = (lff[n - 2]).recip();
    let rho2 = (lff[n - 3]).recip();
    lff[n - 1] = (S::c(2.0) * rho1 - rho2).max(S::c(crate::density::EPS_POS)).recip();
    lff
}

/// Analytic curve `L(f) = f^2` (the Lorenz curve of the uniform density on
/// `[0, 2]`); used across the test suites.
pub fn parabola_curve<S: Scalar>(n: usize) -> LorenzCurve<S> {
    let grid = Grid1d::cdf(n).unwrap();
    let f = grid.nodes();
    let values: Vec<S> = f.iter().map(|&x| x * x).collect();
    let lf: Vec<S> = f.iter().map(|&x| S::c(2.0) * x).collect();
    let lff = vec![S::c(2.0); n];
    LorenzCurve::from_parts(grid, values, lf, lff, S::one()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_gini_is_one_sixth() {
        let c = parabola_curve::<f64>(256);
        // int_0^1 (f - f^2) df = 1/6, midpoint rule is exact here up to h^2
        assert!((c.gini_area() - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonconvex() {
        let grid = Grid1d::cdf(16).unwrap();
        let f = grid.nodes();
        let values: Vec<f64> = f.iter().map(|&x| x * x).collect();
        let mut lf: Vec<f64> = f.iter().map(|&x| 2.0 * x).collect();
        lf[7] = lf[8] + 1.0;
        let lff = vec![2.0; 16];
        assert!(LorenzCurve::from_parts(grid, values, lf, lff, 1.0).is_err());
    }

    #[test]
    fn fd_curvature_matches_analytic_inside() {
        let c = parabola_curve::<f64>(64);
        let lff = curvature_fd(c.values(), c.grid().spacing());
        for j in 0..64 {
            assert!((lff[j] - 2.0).abs() < 1e-9, "node {j}: {}", lff[j]);
        }
    }

    #[test]
    fn perturbation_moves_caches() {
        let c = parabola_curve::<f64>(64);
        let f = c.grid().nodes();
        let eta: Vec<f64> = f.iter().map(|&x| x * x * (1.0 - x) * (1.0 - x)).collect();
        let p = c.perturbed(&eta, 1e-3).unwrap();
        assert!((p.values()[30] - (c.values()[30] + 1e-3 * eta[30])).abs() < 1e-15);
        assert!(p.lff()[30] != c.lff()[30]);
    }
}
