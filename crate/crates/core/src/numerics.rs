//! Shared 1D numerics: quadrature, cumulatives, difference stencils,
//! interpolation, and the isotonic projection.
//!
//! Everything quoted as second order assumes uniform spacing `h`.

use crate::scalar::Scalar;

/// Composite trapezoid integral on an endpoint grid.
pub fn trapz<S: Scalar>(v: &[S], h: S) -> S {
    let n = v.len();
    let interior: S = v[1..n - 1].iter().copied().sum();
    h * (interior + (v[0] + v[n - 1]) * S::c(0.5))
}

/// Trapezoid weights `h*(1/2, 1, ..., 1, 1/2)`; also the finite-volume cell
/// widths used by the conservative stencils.
pub fn trapz_weights<S: Scalar>(n: usize, h: S) -> Vec<S> {
    let mut w = vec![h; n];
    w[0] = h * S::c(0.5);
    w[n - 1] = h * S::c(0.5);
    w
}

/// Midpoint-rule integral on a cell-centered grid.
pub fn midpoint<S: Scalar>(v: &[S], h: S) -> S {
    let s: S = v.iter().copied().sum();
    h * s
}

/// Cumulative trapezoid anchored at the first node: `out[0] = 0`.
pub fn cumtrapz<S: Scalar>(v: &[S], h: S) -> Vec<S> {
    let half = S::c(0.5);
    let mut out = Vec::with_capacity(v.len());
    let mut acc = S::zero();
    out.push(acc);
    for i in 1..v.len() {
        acc += h * half * (v[i - 1] + v[i]);
        out.push(acc);
    }
    out
}

/// Cumulative integral from the left *domain edge* of a cell-centered grid:
/// `out[j] ~ int_0^{f_j} v`. The first half cell uses the linear extension of
/// `v`, which keeps the rule exact for affine integrands.
pub fn cum_from_zero_centered<S: Scalar>(v: &[S], h: S) -> Vec<S> {
    let half = S::c(0.5);
    let mut out = Vec::with_capacity(v.len());
    let mut acc = h * S::c(0.125) * (S::c(5.0) * v[0] - v[1]);
    out.push(acc);
    for j in 1..v.len() {
        acc += h * half * (v[j - 1] + v[j]);
        out.push(acc);
    }
    out
}

/// Linear extrapolation of a cell-centered array to the right domain edge.
pub fn extrapolate_right_edge<S: Scalar>(v: &[S]) -> S {
    let n = v.len();
    (S::c(3.0) * v[n - 1] - v[n - 2]) * S::c(0.5)
}

/// Linear extrapolation of a cell-centered array to the left domain edge.
pub fn extrapolate_left_edge<S: Scalar>(v: &[S]) -> S {
    (S::c(3.0) * v[0] - v[1]) * S::c(0.5)
}

/// First derivative: centered interior, one-sided O(h^2) at the ends.
pub fn deriv1<S: Scalar>(v: &[S], h: S) -> Vec<S> {
    let n = v.len();
    let two_h = h * S::c(2.0);
    let mut out = vec![S::zero(); n];
    for j in 1..n - 1 {
        out[j] = (v[j + 1] - v[j - 1]) / two_h;
    }
    out[0] = (-S::c(3.0) * v[0] + S::c(4.0) * v[1] - v[2]) / two_h;
    out[n - 1] = (S::c(3.0) * v[n - 1] - S::c(4.0) * v[n - 2] + v[n - 3]) / two_h;
    out
}

/// Second derivative: centered interior, one-sided O(h^2) four-point ends.
pub fn deriv2<S: Scalar>(v: &[S], h: S) -> Vec<S> {
    let n = v.len();
    let h2 = h * h;
    let mut out = vec![S::zero(); n];
    for j in 1..n - 1 {
        out[j] = (v[j + 1] - S::c(2.0) * v[j] + v[j - 1]) / h2;
    }
    out[0] = (S::c(2.0) * v[0] - S::c(5.0) * v[1] + S::c(4.0) * v[2] - v[3]) / h2;
    out[n - 1] =
        (S::c(2.0) * v[n - 1] - S::c(5.0) * v[n - 2] + S::c(4.0) * v[n - 3] - v[n - 4]) / h2;
    out
}

/// Piecewise-linear interpolation on sorted abscissae, clamped outside.
pub fn lin_interp<S: Scalar>(xs: &[S], ys: &[S], xq: S) -> S {
    let n = xs.len();
    if xq <= xs[0] {
        return ys[0];
    }
    if xq >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = upper_cell(xs, xq);
    let t = (xq - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// Index `i` with `xs[i] <= xq < xs[i+1]` (clamped to valid cells).
pub fn upper_cell<S: Scalar>(xs: &[S], xq: S) -> usize {
    let n = xs.len();
    let mut lo = 0usize;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if xs[mid] <= xq {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Cubic Hermite value on a unit cell: data `(f0, f1)`, scaled slopes
/// `(m0, m1) = h * (df/dx at the ends)`, local coordinate `t` in `[0, 1]`.
#[inline]
pub fn hermite_value<S: Scalar>(t: S, f0: S, f1: S, m0: S, m1: S) -> S {
    let df = f1 - f0;
    let a3 = m0 + m1 - S::c(2.0) * df;
    let a2 = S::c(3.0) * df - S::c(2.0) * m0 - m1;
    f0 + ((a3 * t + a2) * t + m0) * t
}

/// Derivative of [`hermite_value`] with respect to `t` (divide by `h` for
/// the derivative in `x`).
#[inline]
pub fn hermite_slope<S: Scalar>(t: S, f0: S, f1: S, m0: S, m1: S) -> S {
    let df = f1 - f0;
    (S::c(6.0) * t - S::c(6.0) * t * t) * df
        + (S::c(3.0) * t * t - S::c(4.0) * t + S::one()) * m0
        + (S::c(3.0) * t * t - S::c(2.0) * t) * m1
}

/// Logarithmic mean, `(a - b) / ln(a/b)`, continuous at `a = b`.
///
/// Used as the interface mobility so that the discrete W2 flux of the
/// Boltzmann entropy coincides with the plain heat flux.
pub fn log_mean<S: Scalar>(a: S, b: S) -> S {
    let d = a - b;
    if d.abs() <= S::c(1e-8) * (a + b) {
        // series around a = b keeps full accuracy where the log cancels
        let m = (a + b) * S::c(0.5);
        let r = d / (a + b);
        m * (S::one() - r * r * S::c(1.0 / 3.0))
    } else {
        d / (a / b).ln()
    }
}

/// Pool-adjacent-violators: weighted least-squares projection onto
/// nondecreasing sequences. In-place, O(n).
pub fn pava_nondecreasing<S: Scalar>(v: &mut [S], w: &[S]) {
    let n = v.len();
    // blocks as (value, weight, count)
    let mut vals: Vec<S> = Vec::with_capacity(n);
    let mut wts: Vec<S> = Vec::with_capacity(n);
    let mut cnt: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        vals.push(v[i]);
        wts.push(w[i]);
        cnt.push(1);
        while vals.len() > 1 && vals[vals.len() - 2] > vals[vals.len() - 1] {
            let (v1, w1, c1) = (vals.pop().unwrap(), wts.pop().unwrap(), cnt.pop().unwrap());
            let k = vals.len() - 1;
            let merged_w = wts[k] + w1;
            vals[k] = (vals[k] * wts[k] + v1 * w1) / merged_w;
            wts[k] = merged_w;
            cnt[k] += c1;
        }
    }
    let mut i = 0;
    for (b, &c) in cnt.iter().enumerate() {
        for _ in 0..c {
            v[i] = vals[b];
            i += 1;
        }
    }
}

/// Subtract the quadrature-weighted mean: representative of the
/// modulo-constant gauge class.
pub fn remove_mean<S: Scalar>(v: &[S], weights: &[S]) -> Vec<S> {
    let wsum: S = weights.iter().copied().sum();
    let mean = v.iter().zip(weights).map(|(&a, &b)| a * b).sum::<S>() / wsum;
    v.iter().map(|&a| a - mean).collect()
}

/// Subtract the best-fit affine part `a + b x` in the weighted inner
/// product: representative of the modulo-affine gauge class.
pub fn remove_affine<S: Scalar>(v: &[S], xs: &[S], weights: &[S]) -> Vec<S> {
    let w0: S = weights.iter().copied().sum();
    let w1: S = xs.iter().zip(weights).map(|(&x, &w)| x * w).sum();
    let w2: S = xs.iter().zip(weights).map(|(&x, &w)| x * x * w).sum();
    let b0: S = v.iter().zip(weights).map(|(&a, &w)| a * w).sum();
    let b1: S = v
        .iter()
        .zip(xs)
        .zip(weights)
        .map(|((&a, &x), &w)| a * x * w)
        .sum();
    let det = w0 * w2 - w1 * w1;
    let ca = (b0 * w2 - b1 * w1) / det;
    let cb = (w0 * b1 - w1 * b0) / det;
    v.iter().zip(xs).map(|(&a, &x)| a - ca - cb * x).collect()
}

pub fn sup_norm<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |m, &a| m.max(a.abs()))
}

pub fn sup_diff<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}
