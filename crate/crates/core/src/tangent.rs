use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid::Grid1d;
use crate::numerics::{deriv1, extrapolate_left_edge, remove_affine, remove_mean, sup_norm, trapz_weights};
use crate::scalar::Scalar;

/// Which of the two function spaces a quantity lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Density,
    Lorenz,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Density => "density",
            Side::Lorenz => "lorenz",
        }
    }
}

/// Admissible perturbation of a density (mean zero, optionally first-moment
/// zero for the C_D class) or of a Lorenz curve (vanishing value and slope
/// at f = 0 and vanishing slope at f = 1).
#[derive(Clone, Debug)]
pub struct TangentVector<S> {
    pub side: Side,
    pub grid: Grid1d<S>,
    pub values: Vec<S>,
    pub moment_constrained: bool,
}

impl<S: Scalar> TangentVector<S> {
    /// Density-side tangent; checks the vanishing moments to quadrature
    /// tolerance.
    pub fn density(grid: Grid1d<S>, values: Vec<S>, moment_constrained: bool) -> Result<Self> {
        let t = TangentVector { side: Side::Density, grid, values, moment_constrained };
        t.validate()?;
        Ok(t)
    }

    /// Density-side tangent obtained by projecting arbitrary samples onto
    /// the admissible class (mean zero, plus first moment zero when
    /// constrained).
    pub fn density_projected(
        grid: Grid1d<S>,
        values: Vec<S>,
        moment_constrained: bool,
    ) -> Result<Self> {
        let w = trapz_weights(grid.n, grid.spacing());
        let xs = grid.nodes();
        let projected = if moment_constrained {
            remove_affine_dual(&values, &xs, &w)
        } else {
            let wsum: S = w.iter().copied().sum();
            let mean = values.iter().zip(&w).map(|(&a, &b)| a * b).sum::<S>() / wsum;
            values.iter().map(|&a| a - mean).collect()
        };
        Self::density(grid, projected, moment_constrained)
    }

    /// Lorenz-side tangent in the class T (and T_0 when `values` also
    /// extrapolates to zero at f = 1; that is not enforced here).
    pub fn lorenz(grid: Grid1d<S>, values: Vec<S>) -> Result<Self> {
        let t = TangentVector { side: Side::Lorenz, grid, values, moment_constrained: false };
        t.validate()?;
        Ok(t)
    }

    /// Construct without validation; for operator outputs whose class
    /// membership is reported through diagnostics instead of assertions.
    pub fn raw(side: Side, grid: Grid1d<S>, values: Vec<S>) -> Self {
        TangentVector { side, grid, values, moment_constrained: false }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.values.len() != self.grid.n {
            return Err(CoreError::InvalidTangent("length mismatch".into()));
        }
        match self.side {
            Side::Density => {
                let w = trapz_weights(self.grid.n, self.grid.spacing());
                let scale = sup_norm(&self.values) + S::c(1e-30);
                let mass: S = self.values.iter().zip(&w).map(|(&a, &b)| a * b).sum();
                if mass.abs() > S::c(1e-10) * scale * (self.grid.hi - self.grid.lo) {
                    return Err(CoreError::InvalidTangent(format!(
                        "density tangent mass {mass:e} not zero"
                    )));
                }
                if self.moment_constrained {
                    let m1: S = self
                        .values
                        .iter()
                        .enumerate()
                        .map(|(j, &a)| w[j] * self.grid.node(j) * a)
                        .sum();
                    let xscale = self.grid.lo.abs().max(self.grid.hi.abs());
                    if m1.abs() > S::c(1e-9) * scale * xscale * (self.grid.hi - self.grid.lo) {
                        return Err(CoreError::InvalidTangent(format!(
                            "constrained tangent first moment {m1:e} not zero"
                        )));
                    }
                }
            }
            Side::Lorenz => {
                if !self.grid.centered {
                    return Err(CoreError::InvalidTangent(
                        "Lorenz tangents live on cdf grids".into(),
                    ));
                }
                let h = self.grid.spacing();
                let scale = sup_norm(&self.values) + S::c(1e-30);
                let anchor = extrapolate_left_edge(&self.values).abs();
                if anchor > S::c(10.0) * h * scale {
                    return Err(CoreError::InvalidTangent(format!(
                        "eta(0) residual {anchor:e} too large"
                    )));
                }
                let d = deriv1(&self.values, h);
                let slope_tol = S::c(10.0) * h * (sup_norm(&d) + S::c(1e-30));
                if d[0].abs() > slope_tol || d[self.grid.n - 1].abs() > slope_tol {
                    return Err(CoreError::InvalidTangent(format!(
                        "end slopes ({:e}, {:e}) violate the tangent class",
                        d[0],
                        d[self.grid.n - 1]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Remove both the mean and the first-moment component in the weighted
/// inner product (projection onto two vanishing moments).
fn remove_affine_dual<S: Scalar>(v: &[S], xs: &[S], w: &[S]) -> Vec<S> {
    // subtracting lambda0 * 1 + lambda1 * x so that both weighted moments
    // of the result vanish; this is the normal-equations solve of
    // remove_affine applied to the dual constraint
    remove_affine_dual_impl(v, xs, w)
}

fn remove_affine_dual_impl<S: Scalar>(v: &[S], xs: &[S], w: &[S]) -> Vec<S> {
    let w0: S = w.iter().copied().sum();
    let w1: S = xs.iter().zip(w).map(|(&x, &ww)| x * ww).sum();
    let w2: S = xs.iter().zip(w).map(|(&x, &ww)| x * x * ww).sum();
    let b0: S = v.iter().zip(w).map(|(&a, &ww)| a * ww).sum();
    let b1: S = v.iter().zip(xs).zip(w).map(|((&a, &x), &ww)| a * x * ww).sum();
    let det = w0 * w2 - w1 * w1;
    let l0 = (b0 * w2 - b1 * w1) / det;
    let l1 = (w0 * b1 - w1 * b0) / det;
    v.iter().zip(xs).map(|(&a, &x)| a - l0 - l1 * x).collect()
}

/// Gauge projections shared with the Frechet machinery: re-exported thin
/// wrappers so call sites read uniformly.
pub fn project_modulo_constant<S: Scalar>(v: &[S], weights: &[S]) -> Vec<S> {
    remove_mean(v, weights)
}

pub fn project_modulo_affine<S: Scalar>(v: &[S], xs: &[S], weights: &[S]) -> Vec<S> {
    remove_affine(v, xs, weights)
}
