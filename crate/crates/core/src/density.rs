use crate::error::{CoreError, Result};
use crate::grid::Grid1d;
use crate::numerics::{trapz, trapz_weights};
use crate::scalar::Scalar;

/// Positivity floor applied at construction (clamp-and-report).
pub const EPS_POS: f64 = 1e-12;

/// Mass tolerance for states that bypass renormalization.
pub const TAU_MASS: f64 = 1e-8;

/// Positive probability density sampled on a spatial grid.
///
/// Construction clamps values at the positivity floor (counting the clamps),
/// renormalizes the trapezoid mass to one, and caches the first moment.
#[derive(Clone, Debug)]
pub struct Density<S> {
    grid: Grid1d<S>,
    values: Vec<S>,
    first_moment: S,
    clamped: usize,
}

impl<S: Scalar> Density<S> {
    /// Build from raw samples: clamp, renormalize, cache moments.
    pub fn new(grid: Grid1d<S>, mut values: Vec<S>) -> Result<Self> {
        grid.validate()?;
        if grid.centered {
            return Err(CoreError::InvalidDensity(
                "densities live on endpoint (spatial) grids".into(),
            ));
        }
        if values.len() != grid.n {
            return Err(CoreError::InvalidDensity(format!(
                "{} values on a grid of {} nodes",
                values.len(),
                grid.n
            )));
        }
        let floor = S::c(EPS_POS);
        let mut clamped = 0usize;
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(CoreError::InvalidDensity("non-finite sample".into()));
            }
            if *v < floor {
                *v = floor;
                clamped += 1;
            }
        }
        let mass = trapz(&values, grid.spacing());
        if !(mass > S::zero()) {
            return Err(CoreError::InvalidDensity("zero total mass".into()));
        }
        for v in values.iter_mut() {
            *v = *v / mass;
        }
        let first_moment = moment1(&grid, &values);
        Ok(Density { grid, values, first_moment, clamped })
    }

    /// Accept already-normalized values without rescaling; the mass must lie
    /// within `TAU_MASS` of one. Used for flow steps and perturbations, where
    /// rescaling would mask conservation defects.
    pub fn from_normalized(grid: Grid1d<S>, values: Vec<S>) -> Result<Self> {
        let mass = trapz(&values, grid.spacing());
        if (mass - S::one()).abs() > S::c(TAU_MASS) {
            return Err(CoreError::InvalidDensity(format!(
                "mass {mass:e} departs from 1 beyond tolerance"
            )));
        }
        let floor = S::c(EPS_POS);
        let mut values = values;
        let mut clamped = 0usize;
        for v in values.iter_mut() {
            if *v < floor {
                *v = floor;
                clamped += 1;
            }
        }
        let first_moment = moment1(&grid, &values);
        Ok(Density { grid, values, first_moment, clamped })
    }

    #[inline]
    pub fn grid(&self) -> &Grid1d<S> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[S] {
        &self.values
    }

    #[inline]
    pub fn first_moment(&self) -> S {
        self.first_moment
    }

    /// Number of nodes clamped at the positivity floor during construction.
    #[inline]
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub fn mass(&self) -> S {
        trapz(&self.values, self.grid.spacing())
    }

    /// `rho + eps * v`, without renormalization. The perturbation is expected
    /// to be (discretely) mean-free so the mass invariant survives.
    pub fn perturbed(&self, v: &[S], eps: S) -> Result<Self> {
        let vals: Vec<S> = self
            .values
            .iter()
            .zip(v)
            .map(|(&r, &dv)| r + eps * dv)
            .collect();
        Self::from_normalized(self.grid, vals)
    }

    /// Largest sample; the scale used by relative tail thresholds.
    pub fn max_value(&self) -> S {
        self.values.iter().fold(S::zero(), |m, &a| m.max(a))
    }

    /// Multiplicative tilt pinning the first moment to `target`
    /// (fixed-point iteration on `rho * (1 + a (x - mu))`).
    pub fn with_first_moment(&self, target: S) -> Result<Self> {
        let mut rho = self.clone();
        for _ in 0..4 {
            let mu = rho.first_moment;
            let a = target - mu;
            let vals: Vec<S> = rho
                .values
                .iter()
                .enumerate()
                .map(|(j, &r)| r * (S::one() + a * (rho.grid.node(j) - mu)))
                .collect();
            rho = Density::new(rho.grid, vals)?;
        }
        Ok(rho)
    }
}

fn moment1<S: Scalar>(grid: &Grid1d<S>, values: &[S]) -> S {
    let w = trapz_weights(grid.n, grid.spacing());
    values
        .iter()
        .enumerate()
        .map(|(j, &v)| w[j] * grid.node(j) * v)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_density() -> Density<f64> {
        let g = Grid1d::uniform(0.0, 2.0, 64).unwrap();
        Density::new(g, vec![7.0; 64]).unwrap()
    }

    #[test]
    fn renormalizes_to_unit_mass() {
        let rho = uniform_density();
        assert!((rho.mass() - 1.0).abs() < 1e-14);
        assert!((rho.values()[10] - 0.5).abs() < 1e-14);
        assert!((rho.first_moment() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clamps_and_counts() {
        let g = Grid1d::uniform(0.0, 2.0, 64).unwrap();
        let mut vals = vec![1.0; 64];
        vals[3] = -5.0;
        vals[10] = 0.0;
        let rho = Density::new(g, vals).unwrap();
        assert_eq!(rho.clamped(), 2);
        assert!(rho.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn from_normalized_rejects_bad_mass() {
        let g = Grid1d::uniform(0.0, 2.0, 64).unwrap();
        assert!(Density::from_normalized(g, vec![0.7; 64]).is_err());
    }

    #[test]
    fn moment_tilt_hits_target() {
        let g = Grid1d::uniform(0.0, 2.0, 128).unwrap();
        let vals: Vec<f64> = (0..128)
            .map(|j| {
                let x = g.node(j);
                (-(x - 0.9f64).powi(2) / 0.05).exp()
            })
            .collect();
        let rho = Density::new(g, vals).unwrap();
        let tilted = rho.with_first_moment(0.95).unwrap();
        assert!((tilted.first_moment() - 0.95).abs() < 1e-12);
    }
}
