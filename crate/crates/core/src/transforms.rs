//! The (x, rho) <-> (f, L) dictionary: cdf, quantile function, Lorenz map and
//! its inverse, and the first-variation formulas for both.
//!
//! The cdf is stored as cumulative-trapezoid samples together with its nodal
//! slopes (the density itself); evaluation and inversion go through the
//! monotone cubic Hermite interpolant of that data. With trapezoid
//! increments the Fritsch-Carlson parameters of every cell sum to two, so
//! the interpolant is monotone unconditionally.

use crate::density::{Density, EPS_POS};
use crate::error::{CoreError, Result};
use crate::grid::Grid1d;
use crate::lorenz::{LorenzCurve, EPS_CURV};
use crate::numerics::{
    cum_from_zero_centered, cumtrapz, hermite_slope, hermite_value, lin_interp, upper_cell,
};
use crate::scalar::Scalar;
use crate::tangent::{Side, TangentVector};

/// Tail tolerance: the truncation window must capture all but this much of
/// the mass at each end.
pub const TAU_TAIL: f64 = 1e-6;

/// Cumulative distribution function of a density, with the density values
/// kept as Hermite slopes.
#[derive(Clone, Debug)]
pub struct Cdf<S> {
    grid: Grid1d<S>,
    values: Vec<S>,
    slopes: Vec<S>,
}

/// Quantile function samples on a cdf grid.
#[derive(Clone, Debug)]
pub struct InverseCdf<S> {
    pub grid: Grid1d<S>,
    pub values: Vec<S>,
}

impl<S: Scalar> Cdf<S> {
    #[inline]
    pub fn grid(&self) -> &Grid1d<S> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// C(x) by Hermite evaluation, clamped to [0, 1].
    pub fn value_at(&self, x: S) -> S {
        let (i, t) = self.locate(x);
        let h = self.grid.spacing();
        hermite_value(
            t,
            self.values[i],
            self.values[i + 1],
            self.slopes[i] * h,
            self.slopes[i + 1] * h,
        )
        .max(S::zero())
        .min(S::one())
    }

    /// The density as seen by the interpolant: dC/dx at x.
    pub fn density_at(&self, x: S) -> S {
        let (i, t) = self.locate(x);
        let h = self.grid.spacing();
        (hermite_slope(
            t,
            self.values[i],
            self.values[i + 1],
            self.slopes[i] * h,
            self.slopes[i + 1] * h,
        ) / h)
            .max(S::c(EPS_POS))
    }

    fn locate(&self, x: S) -> (usize, S) {
        let h = self.grid.spacing();
        let pos = (x - self.grid.lo) / h;
        let mut i = pos.to_usize().unwrap_or(0);
        if i >= self.grid.n - 1 {
            i = self.grid.n - 2;
        }
        let t = ((x - self.grid.node(i)) / h).max(S::zero()).min(S::one());
        (i, t)
    }

    /// Invert at a single f in (0, 1) by a safeguarded Newton iteration on
    /// the Hermite cell. Errors if the cdf is flat across more than one cell
    /// there (density collapsed to the floor over an interval).
    pub fn invert(&self, f: S) -> Result<S> {
        let n = self.grid.n;
        let h = self.grid.spacing();
        let i = upper_cell(&self.values, f);
        let dc = self.values[i + 1] - self.values[i];
        let flat = S::c(2.5) * S::c(EPS_POS);
        if self.slopes[i] <= flat && self.slopes[i + 1] <= flat {
            let left_flat = i > 0 && self.slopes[i - 1] <= flat;
            let right_flat = i + 2 < n && self.slopes[i + 2] <= flat;
            if left_flat || right_flat {
                return Err(CoreError::NonInvertibleCdf { f: f.as_f64() });
            }
        }
        if dc <= S::zero() {
            return Ok(self.grid.node(i) + h * S::c(0.5));
        }
        let target = f - self.values[i];
        let m0 = self.slopes[i] * h;
        let m1 = self.slopes[i + 1] * h;
        let c0 = S::zero();
        let c1 = dc;
        let mut t = (target / dc).max(S::zero()).min(S::one());
        let mut lo = S::zero();
        let mut hi = S::one();
        for _ in 0..64 {
            let val = hermite_value(t, c0, c1, m0, m1) - target;
            if val > S::zero() {
                hi = t;
            } else {
                lo = t;
            }
            let der = hermite_slope(t, c0, c1, m0, m1);
            let mut next = if der > S::c(1e-14) * dc { t - val / der } else { (lo + hi) * S::c(0.5) };
            if !(next >= lo && next <= hi) {
                next = (lo + hi) * S::c(0.5);
            }
            if (next - t).abs() <= S::c(1e-16) {
                t = next;
                break;
            }
            t = next;
        }
        Ok(self.grid.node(i) + h * t)
    }
}

/// Cumulative trapezoid cdf, clamped to [0, 1] with the final value pinned
/// at one.
pub fn cdf<S: Scalar>(rho: &Density<S>) -> Cdf<S> {
    let grid = *rho.grid();
    let mut values = cumtrapz(rho.values(), grid.spacing());
    let total = values[grid.n - 1];
    for v in values.iter_mut() {
        *v = (*v / total).max(S::zero()).min(S::one());
    }
    values[grid.n - 1] = S::one();
    Cdf { grid, values, slopes: rho.values().to_vec() }
}

/// Does the window capture the mass? `C(x_0) <= TAU_TAIL` and
/// `C(x_{n-1}) >= 1 - TAU_TAIL` measured before renormalization would be
/// trivial here, so the check is on the edge densities instead: both edge
/// samples must stay below `TAU_TAIL * max(rho)`.
pub fn truncation_captured<S: Scalar>(rho: &Density<S>) -> bool {
    let v = rho.values();
    let cap = S::c(TAU_TAIL) * rho.max_value();
    v[0] <= cap && v[v.len() - 1] <= cap
}

/// Quantile function on a cdf grid.
pub fn inverse_cdf<S: Scalar>(rho: &Density<S>, fgrid: &Grid1d<S>) -> Result<InverseCdf<S>> {
    let c = cdf(rho);
    inverse_from_cdf(&c, fgrid)
}

pub fn inverse_from_cdf<S: Scalar>(c: &Cdf<S>, fgrid: &Grid1d<S>) -> Result<InverseCdf<S>> {
    if !fgrid.centered {
        return Err(CoreError::GridMismatch("quantiles live on cdf grids".into()));
    }
    let mut values = Vec::with_capacity(fgrid.n);
    for j in 0..fgrid.n {
        values.push(c.invert(fgrid.node(j))?);
    }
    Ok(InverseCdf { grid: *fgrid, values })
}

/// The Lorenz map: `L(f_j) = int_0^{f_j} G`, with the derivative caches
/// `L_f = G` and `L_ff = 1/(rho o G)` and `L(1)` set to the first moment.
pub fn lorenz_map<S: Scalar>(rho: &Density<S>, fgrid: &Grid1d<S>) -> Result<LorenzCurve<S>> {
    let c = cdf(rho);
    let g = inverse_from_cdf(&c, fgrid)?;
    let values = cum_from_zero_centered(&g.values, fgrid.spacing());
    let lff: Vec<S> = g
        .values
        .iter()
        .map(|&x| c.density_at(x).max(S::c(EPS_POS)).recip())
        .collect();
    LorenzCurve::from_parts(*fgrid, values, g.values, lff, rho.first_moment())
}

/// Inverse of the Lorenz map: the density is the derivative of the monotone
/// Hermite interpolant through the quantile data `(L_f(f_j), f_j)` with
/// slopes `1/L_ff(f_j)`; beyond the outermost quantiles the tails decay
/// exponentially with the rate that carries exactly the unseen half-cell of
/// mass.
pub fn density_from_lorenz<S: Scalar>(curve: &LorenzCurve<S>, xgrid: &Grid1d<S>) -> Result<Density<S>> {
    let n = curve.grid().n;
    let xs = curve.lf();
    let f: Vec<S> = curve.grid().nodes();
    for j in 0..n {
        if curve.lff()[j] < S::c(EPS_CURV) {
            return Err(CoreError::DegenerateCurvature {
                index: j,
                value: curve.lff()[j].as_f64(),
            });
        }
    }
    for j in 1..n {
        if xs[j] <= xs[j - 1] {
            return Err(CoreError::InvalidCurve(format!(
                "quantile samples not strictly increasing at node {j}"
            )));
        }
    }
    let rs: Vec<S> = curve.lff().iter().map(|&w| w.recip()).collect();
    let half_cell = curve.grid().node(0); // mass beyond each outermost quantile
    let lam_left = rs[0] / half_cell;
    let lam_right = rs[n - 1] / half_cell;

    let mut out = Vec::with_capacity(xgrid.n);
    for i in 0..xgrid.n {
        let x = xgrid.node(i);
        let v = if x < xs[0] {
            rs[0] * (lam_left * (x - xs[0])).exp()
        } else if x > xs[n - 1] {
            rs[n - 1] * (-lam_right * (x - xs[n - 1])).exp()
        } else {
            let k = upper_cell(xs, x);
            let hx = xs[k + 1] - xs[k];
            let t = (x - xs[k]) / hx;
            let m0 = rs[k] * hx;
            let m1 = rs[k + 1] * hx;
            (hermite_slope(t, f[k], f[k + 1], m0, m1) / hx).max(S::c(EPS_POS))
        };
        out.push(v);
    }
    Density::new(*xgrid, out)
}

/// Time derivative of the quantile function under a density perturbation:
/// `-(int^{G(f)} h) / (rho o G)(f)`.
pub fn dt_inverse_cdf<S: Scalar>(
    rho: &Density<S>,
    h: &TangentVector<S>,
    fgrid: &Grid1d<S>,
) -> Result<Vec<S>> {
    require_density_tangent(rho, h)?;
    let c = cdf(rho);
    let g = inverse_from_cdf(&c, fgrid)?;
    let hx = cumtrapz(&h.values, rho.grid().spacing());
    let xs = rho.grid().nodes();
    Ok(g
        .values
        .iter()
        .map(|&x| {
            let num = lin_interp(&xs, &hx, x);
            -num / c.density_at(x)
        })
        .collect())
}

/// Time derivative of the Lorenz map under a density perturbation:
/// `int^{G} y h dy - G int^{G} h dy`, returned as a Lorenz-side tangent.
pub fn dt_lorenz<S: Scalar>(
    rho: &Density<S>,
    h: &TangentVector<S>,
    fgrid: &Grid1d<S>,
) -> Result<TangentVector<S>> {
    require_density_tangent(rho, h)?;
    let c = cdf(rho);
    let g = inverse_from_cdf(&c, fgrid)?;
    let hx = cumtrapz(&h.values, rho.grid().spacing());
    let xh: Vec<S> = h
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| rho.grid().node(i) * v)
        .collect();
    let ixh = cumtrapz(&xh, rho.grid().spacing());
    let xs = rho.grid().nodes();
    let values: Vec<S> = g
        .values
        .iter()
        .map(|&x| lin_interp(&xs, &ixh, x) - x * lin_interp(&xs, &hx, x))
        .collect();
    Ok(TangentVector::raw(Side::Lorenz, *fgrid, values))
}

fn require_density_tangent<S: Scalar>(rho: &Density<S>, h: &TangentVector<S>) -> Result<()> {
    if h.side != Side::Density {
        return Err(CoreError::SideMismatch { expected: "density", got: h.side.name() });
    }
    rho.grid().require_same(&h.grid, "density vs tangent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn uniform02(n: usize) -> Density<f64> {
        let g = Grid1d::uniform(0.0, 2.0, n).unwrap();
        Density::new(g, vec![1.0; n]).unwrap()
    }

    #[test]
    fn uniform_cdf_is_linear() {
        let rho = uniform02(128);
        let c = cdf(&rho);
        for i in 0..128 {
            let x = rho.grid().node(i);
            assert!((c.values()[i] - x / 2.0).abs() < 1e-12);
        }
        assert!(c.values()[0].abs() < 1e-15);
        assert!((c.values()[127] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_cdf_center_value() {
        // high-resolution quadrature oracle: C(0) = 1/2 for the even density
        let g = Grid1d::uniform(-6.0, 6.0, 257).unwrap();
        let rho = presets::gaussian(&g, 0.0, 1.0).unwrap();
        let c = cdf(&rho);
        assert!((c.value_at(0.0) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn uniform_quantiles_are_linear() {
        let rho = uniform02(128);
        let fg = Grid1d::cdf(128).unwrap();
        let g = inverse_cdf(&rho, &fg).unwrap();
        for j in 0..128 {
            assert!((g.values[j] - 2.0 * fg.node(j)).abs() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn inverse_composes_with_cdf() {
        let g = Grid1d::uniform(-6.0, 6.0, 256).unwrap();
        let rho = presets::gaussian(&g, 0.0, 1.0).unwrap();
        let c = cdf(&rho);
        let fg = Grid1d::cdf(256).unwrap();
        let q = inverse_from_cdf(&c, &fg).unwrap();
        // G(C(x)) = x on interior nodes within a couple of grid spacings
        for i in (40..216).step_by(7) {
            let x = g.node(i);
            let f = c.value_at(x);
            let back = c.invert(f).unwrap();
            assert!((back - x).abs() < 2.0 * g.spacing(), "i={i}");
        }
        // quantiles are monotone
        for j in 1..256 {
            assert!(q.values[j] >= q.values[j - 1]);
        }
    }

    #[test]
    fn gaussian_median_quantile() {
        let g = Grid1d::uniform(-6.0, 6.0, 512).unwrap();
        let rho = presets::gaussian(&g, 0.0, 1.0).unwrap();
        let c = cdf(&rho);
        assert!(c.invert(0.5).unwrap().abs() < 1e-4);
    }

    #[test]
    fn lorenz_of_uniform_is_f_squared() {
        let rho = uniform02(256);
        let fg = Grid1d::cdf(256).unwrap();
        let curve = lorenz_map(&rho, &fg).unwrap();
        for j in (0..256).step_by(13) {
            let f = fg.node(j);
            assert!((curve.values()[j] - f * f).abs() < 1e-9, "j={j}");
            assert!((curve.lff()[j] - 2.0).abs() < 1e-8);
        }
        assert!((curve.l1() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lorenz_of_unit_uniform_is_half_f_squared() {
        let g = Grid1d::uniform(0.0, 1.0, 256).unwrap();
        let rho = Density::new(g, vec![1.0; 256]).unwrap();
        let fg = Grid1d::cdf(256).unwrap();
        let curve = lorenz_map(&rho, &fg).unwrap();
        for j in (0..256).step_by(13) {
            let f = fg.node(j);
            assert!((curve.values()[j] - 0.5 * f * f).abs() < 1e-9);
        }
    }

    #[test]
    fn lorenz_l1_matches_first_moment() {
        let g = Grid1d::uniform(0.0, 2.0, 256).unwrap();
        let rho = presets::gaussian(&g, 1.0, 1.0 / 6.0).unwrap();
        let fg = Grid1d::cdf(256).unwrap();
        let curve = lorenz_map(&rho, &fg).unwrap();
        assert!((curve.l1() - rho.first_moment()).abs() < 1e-5);
        // convexity: lff positive everywhere, already validated on build
        assert!(curve.lff().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn parabola_curve_maps_back_to_uniform() {
        let curve = crate::lorenz::parabola_curve::<f64>(256);
        let xg = Grid1d::uniform(0.0, 2.0, 256).unwrap();
        let rho = density_from_lorenz(&curve, &xg).unwrap();
        for i in 8..248 {
            assert!((rho.values()[i] - 0.5).abs() < 1e-6, "i={i}: {}", rho.values()[i]);
        }
    }

    #[test]
    fn roundtrip_gaussian_below_tolerance() {
        let g = Grid1d::uniform(-6.0, 6.0, 256).unwrap();
        let rho = presets::gaussian(&g, 0.0, 1.0).unwrap();
        let fg = Grid1d::cdf(256).unwrap();
        let curve = lorenz_map(&rho, &fg).unwrap();
        let back = density_from_lorenz(&curve, &g).unwrap();
        let peak = rho.max_value();
        let err = crate::numerics::sup_diff(back.values(), rho.values()) / peak;
        assert!(err < 1e-3, "roundtrip rel error {err:e}");
    }

    #[test]
    fn dt_inverse_cdf_zero_for_zero_perturbation() {
        let g = Grid1d::uniform(-6.0, 6.0, 128).unwrap();
        let rho = presets::gaussian(&g, 0.0, 1.0).unwrap();
        let fg = Grid1d::cdf(128).unwrap();
        let h = TangentVector::density(g, vec![0.0; 128], false).unwrap();
        let out = dt_inverse_cdf(&rho, &h, &fg).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn translation_mode_shifts_all_quantiles() {
        // h = -rho' moves every quantile at unit speed
        let g = Grid1d::uniform(-6.0, 6.0, 512).unwrap();
        let rho = presets::gaussian(&g, 0.0, 1.0).unwrap();
        let xs = g.nodes();
        let minus_dr: Vec<f64> = xs.iter().zip(rho.values()).map(|(&x, &r)| x * r).collect();
        let h = TangentVector::density(g, minus_dr, false).unwrap();
        let fg = Grid1d::cdf(256).unwrap();
        let out = dt_inverse_cdf(&rho, &h, &fg).unwrap();
        // central-difference oracle: (G[rho_eps] - G[rho])/eps with the
        // translated density rho(x - eps)
        let eps = 1e-4;
        let shifted: Vec<f64> = xs
            .iter()
            .map(|&x| (-(x - eps) * (x - eps) / 2.0).exp())
            .collect();
        let rho_eps = Density::new(g, shifted).unwrap();
        let ge = inverse_cdf(&rho_eps, &fg).unwrap();
        let g0 = inverse_cdf(&rho, &fg).unwrap();
        for j in (10..246).step_by(11) {
            let fd = (ge.values[j] - g0.values[j]) / eps;
            assert!((out[j] - fd).abs() < 5e-3, "j={j}: {} vs {}", out[j], fd);
            assert!((out[j] - 1.0).abs() < 5e-3, "j={j}");
        }
    }

    #[test]
    fn dt_lorenz_lands_in_tangent_class() {
        let g = Grid1d::uniform(-6.0, 6.0, 256).unwrap();
        let rho = presets::gaussian(&g, 0.0, 1.0).unwrap();
        let fg = Grid1d::cdf(256).unwrap();
        // compactly supported interior bump, projected to mean zero
        let raw: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| (-(x - 0.8f64).powi(2) / 0.08).exp() - (-(x + 0.6f64).powi(2) / 0.1).exp())
            .collect();
        let h = TangentVector::density_projected(g, raw, false).unwrap();
        let eta = dt_lorenz(&rho, &h, &fg).unwrap();
        assert!(eta.validate().is_ok());
    }
}
