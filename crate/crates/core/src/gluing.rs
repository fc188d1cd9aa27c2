//! Cutoff construction and curvature-controlled metric blending, plus the
//! chart-level symmetrization moves: dropping the angular cross term and
//! averaging over the circle action.
//!
//! Blending two metrics that agree to first order along an interface keeps a
//! common lower curvature bound up to an arbitrarily small loss, provided
//! the cutoff satisfies scale-invariant derivative bounds |x phi'| <= eps
//! and |x^2 phi''| <= eps. The log-scale smoothstep realizes those bounds.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bump::{smoothstep, smoothstep_d1, smoothstep_d2};
use crate::chart::ChartMetric;
use crate::error::{Error, Result};
use crate::tol;

fn smoothstep_derivative_sups() -> (f64, f64) {
    static SUPS: OnceLock<(f64, f64)> = OnceLock::new();
    *SUPS.get_or_init(|| {
        let mut s1: f64 = 0.0;
        let mut s2: f64 = 0.0;
        for i in 1..4096 {
            let u = i as f64 / 4096.0;
            s1 = s1.max(smoothstep_d1(u).abs());
            s2 = s2.max(smoothstep_d2(u).abs());
        }
        (s1, s2)
    })
}

/// Smooth cutoff: identically 1 on [0, delta], identically 0 on
/// [eps, infinity), with |x phi'(x)| <= eps and |x^2 phi''(x)| <= eps
/// everywhere. The inner radius delta is chosen by the construction.
#[derive(Clone, Debug)]
pub struct CutoffFunction {
    pub eps: f64,
    pub delta: f64,
    /// Logarithmic width ln(eps/delta).
    log_width: f64,
}

/// Margins of the two scale-invariant derivative bounds over a log-spaced
/// grid.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CutoffMargins {
    pub sup_x_d1: f64,
    pub sup_x2_d2: f64,
    pub eps: f64,
}

impl CutoffFunction {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.delta {
            1.0
        } else if x >= self.eps {
            0.0
        } else {
            smoothstep((self.eps.ln() - x.ln()) / self.log_width)
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        if x <= self.delta || x >= self.eps {
            0.0
        } else {
            let u = (self.eps.ln() - x.ln()) / self.log_width;
            -smoothstep_d1(u) / (x * self.log_width)
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        if x <= self.delta || x >= self.eps {
            0.0
        } else {
            let u = (self.eps.ln() - x.ln()) / self.log_width;
            smoothstep_d2(u) / (x * x * self.log_width * self.log_width)
                + smoothstep_d1(u) / (x * x * self.log_width)
        }
    }

    /// Worst values of |x phi'| and |x^2 phi''| over a log-spaced grid
    /// spanning well past both ends of the transition.
    pub fn margins(&self, n: usize) -> CutoffMargins {
        let lo = (self.delta * 1e-3).max(f64::MIN_POSITIVE);
        let hi = self.eps * 10.0;
        let ratio = (hi / lo).ln();
        let mut sup1: f64 = 0.0;
        let mut sup2: f64 = 0.0;
        for i in 0..=n {
            let x = lo * (ratio * i as f64 / n as f64).exp();
            sup1 = sup1.max((x * self.d1(x)).abs());
            sup2 = sup2.max((x * x * self.d2(x)).abs());
        }
        CutoffMargins {
            sup_x_d1: sup1,
            sup_x2_d2: sup2,
            eps: self.eps,
        }
    }
}

/// Builds the cutoff for a given eps in (0, 1). The inner radius solves the
/// derivative bounds: with logarithmic width L, |x phi'| <= sup|S'| / L and
/// |x^2 phi''| <= sup|S''| / L^2 + sup|S'| / L, so L is the positive root of
/// the resulting quadratic, padded by 5 percent.
pub fn build_cutoff(eps: f64) -> Result<CutoffFunction> {
    if !(0.0..1.0).contains(&eps) || eps == 0.0 {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "(0, 1)",
        });
    }
    let (s1, s2) = smoothstep_derivative_sups();
    let l = 1.05 * (s1 + (s1 * s1 + 4.0 * s2 * eps).sqrt()) / (2.0 * eps);
    let mut delta = eps * (-l).exp();
    if delta < f64::MIN_POSITIVE {
        // The bounds only improve with a wider transition; clamp to the
        // smallest positive normal.
        delta = f64::MIN_POSITIVE;
    }
    let log_width = (eps / delta).ln();
    Ok(CutoffFunction {
        eps,
        delta,
        log_width,
    })
}

/// Pointwise convex blend of two chart metrics driven by the cutoff of a
/// distance field: the result equals `g_tilde` where the field is below the
/// inner radius and `g` outside the eps-tube.
///
/// The inputs must agree to first order (values and first coefficient
/// derivatives) at the provided interface points, otherwise the curvature
/// loss of the blend is uncontrolled and the call is refused.
pub fn blend_metrics<D>(
    g: &ChartMetric,
    g_tilde: &ChartMetric,
    dist_to_interface: D,
    eps: f64,
    interface_points: &[Vec<f64>],
    tol_match: f64,
) -> Result<ChartMetric>
where
    D: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    if g.dim() != g_tilde.dim() {
        return Err(Error::Invalid(
            "blend requires charts of equal dimension".into(),
        ));
    }
    let deviation = first_order_deviation(g, g_tilde, interface_points);
    if deviation > tol_match {
        return Err(Error::FirstOrderMismatch {
            deviation,
            tol: tol_match,
        });
    }
    let cutoff = build_cutoff(eps)?;
    let ga = g.clone();
    let gb = g_tilde.clone();
    let coords = g.coords().to_vec();
    Ok(ChartMetric::new(coords, move |p: &[f64]| {
        let psi = cutoff.eval(dist_to_interface(p).max(0.0));
        if psi == 0.0 {
            ga.at(p)
        } else if psi == 1.0 {
            gb.at(p)
        } else {
            gb.at(p) * psi + ga.at(p) * (1.0 - psi)
        }
    })
    .with_h_fd(g.h_fd()))
}

/// Largest deviation of metric values and first derivatives between two
/// charts over the given points.
pub fn first_order_deviation(
    g: &ChartMetric,
    g_tilde: &ChartMetric,
    points: &[Vec<f64>],
) -> f64 {
    let h = g.h_fd();
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max((g.at(p) - g_tilde.at(p)).abs().max());
        for i in 0..g.dim() {
            let mut pp = p.clone();
            let mut pm = p.clone();
            pp[i] += h;
            pm[i] -= h;
            let da = (g.at(&pp) - g.at(&pm)) / (2.0 * h);
            let db = (g_tilde.at(&pp) - g_tilde.at(&pm)) / (2.0 * h);
            worst = worst.max((da - db).abs().max());
        }
    }
    worst
}

/// Constant-curvature metric of curvature kappa in geodesic normal
/// coordinates on [-extent, extent]^dim: the radial direction is unit and
/// the spherical part is scaled by (f(r)/r)^2 with f the kappa-warp.
pub fn constant_curvature_normal_chart(kappa: f64, dim: usize, extent: f64) -> ChartMetric {
    let coords = (0..dim)
        .map(|i| crate::chart::Coord::new(&format!("x{i}"), (-extent, extent)))
        .collect();
    ChartMetric::new(coords, move |p: &[f64]| {
        normal_form_matrix(kappa, p)
    })
}

fn warp_ratio_sq(kappa: f64, r: f64) -> f64 {
    // (f(r)/r)^2 for the kappa-warp f; series near zero avoids cancellation.
    let z2 = kappa * r * r;
    if z2.abs() < 1e-8 {
        return 1.0 - z2 / 3.0 + 2.0 * z2 * z2 / 45.0;
    }
    if kappa > 0.0 {
        let z = z2.sqrt();
        (z.sin() / z).powi(2)
    } else {
        let z = (-z2).sqrt();
        (z.sinh() / z).powi(2)
    }
}

fn normal_form_matrix(kappa: f64, p: &[f64]) -> DMatrix<f64> {
    let dim = p.len();
    let r2: f64 = p.iter().map(|x| x * x).sum();
    let r = r2.sqrt();
    let mut g = DMatrix::zeros(dim, dim);
    let ratio = warp_ratio_sq(kappa, r);
    for i in 0..dim {
        for j in 0..dim {
            let proj = if r2 > 0.0 { p[i] * p[j] / r2 } else { 0.0 };
            let kron = if i == j { 1.0 } else { 0.0 };
            g[(i, j)] = proj + ratio * (kron - proj);
        }
    }
    g
}

/// Replaces the metric near the chart center by the constant-curvature-kappa
/// model: the chart must present the metric in normal coordinates at the
/// origin (identity value, vanishing first derivatives), which is checked.
pub fn constant_curvature_cap(g: &ChartMetric, kappa: f64, eps: f64) -> Result<ChartMetric> {
    let dim = g.dim();
    let origin = vec![0.0; dim];
    let g0 = g.at(&origin);
    let id = DMatrix::identity(dim, dim);
    if (&g0 - &id).abs().max() > 1e-8 {
        return Err(Error::Invalid(
            "chart is not in normal coordinates: metric at the origin is not the identity".into(),
        ));
    }
    let h = g.h_fd();
    for i in 0..dim {
        let mut pp = origin.clone();
        let mut pm = origin.clone();
        pp[i] += h;
        pm[i] -= h;
        let d = (g.at(&pp) - g.at(&pm)) / (2.0 * h);
        if d.abs().max() > 1e-6 {
            return Err(Error::Invalid(
                "chart is not in normal coordinates: first derivatives do not vanish".into(),
            ));
        }
    }
    let cap = constant_curvature_normal_chart(kappa, dim, 1.0);
    blend_metrics(
        g,
        &cap,
        |p: &[f64]| p.iter().map(|x| x * x).sum::<f64>().sqrt(),
        eps,
        &[origin],
        tol::MATCH_CLOSED,
    )
}

/// Checks that a 3-chart with a trailing angular coordinate has
/// theta-independent coefficients; returns the worst variation seen.
pub fn circle_invariance_deviation(g: &ChartMetric, samples: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for base in g.interior_grid(3) {
        let reference = g.at(&base);
        for k in 1..samples {
            let mut q = base.clone();
            let last = q.len() - 1;
            q[last] += k as f64 * 2.0 * std::f64::consts::PI / samples as f64;
            worst = worst.max((g.at(&q) - &reference).abs().max());
        }
    }
    worst
}

/// Sets the cross terms between the angular coordinate and the others to
/// zero, turning a circle-invariant metric into a polar one. The input must
/// be independent of the angular (last) coordinate.
pub fn drop_cross_term(g: &ChartMetric) -> Result<ChartMetric> {
    if g.dim() != 3 {
        return Err(Error::Invalid("drop_cross_term expects a 3-chart".into()));
    }
    let variation = circle_invariance_deviation(g, 8);
    if variation > 1e-10 {
        return Err(Error::NotCircleInvariant { variation });
    }
    let inner = g.clone();
    Ok(ChartMetric::new(g.coords().to_vec(), move |p: &[f64]| {
        let mut m = inner.at(p);
        m[(0, 2)] = 0.0;
        m[(2, 0)] = 0.0;
        m[(1, 2)] = 0.0;
        m[(2, 1)] = 0.0;
        m
    })
    .with_h_fd(g.h_fd()))
}

/// Averages the coefficients of a chart metric over its trailing angular
/// coordinate with a fixed equispaced node set, so the result is exactly
/// angle-independent and the operation is idempotent bit for bit.
pub fn average_circle_action(g: &ChartMetric, nodes: usize) -> ChartMetric {
    let inner = g.clone();
    let nodes = nodes.max(2);
    ChartMetric::new(g.coords().to_vec(), move |p: &[f64]| {
        let dim = p.len();
        let mut acc = DMatrix::zeros(dim, dim);
        let mut q = p.to_vec();
        for k in 0..nodes {
            q[dim - 1] = k as f64 * 2.0 * std::f64::consts::PI / nodes as f64;
            acc += inner.at(&q);
        }
        acc / nodes as f64
    })
    .with_h_fd(g.h_fd())
}
