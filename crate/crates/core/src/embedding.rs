//! Isometric embedding of rotationally symmetric spheres of curvature at
//! least one into the round 3-sphere, transfer to flat space by central
//! projection, and convex mollification of the resulting cone graphs.
//!
//! A profile metric dr^2 + R^2 dtheta^2 with curv >= 1 satisfies
//! R'^2 + R^2 <= 1; writing the surface of revolution
//! (r, theta) -> (v(r), arcsin R(r), theta) inside the chart
//! cos^2 t ds^2 + dt^2 + sin^2 t dtheta^2 of the 3-sphere, the pullback is
//! isometric exactly when v' = sqrt((1 - R^2 - R'^2)) / (1 - R^2), a
//! first-order equation integrated here with classical fourth-order
//! Runge-Kutta. The tip distance pi is the rigidity case and is refused.

use std::f64::consts::PI;

use nalgebra::Vector4;
use serde::Serialize;

use crate::bump::{bump, smoothstep};
use crate::error::{Error, Result};
use crate::numerics::{gauss15_composite, interior_grid};
use crate::profile::ProfileFunction;
use crate::tol;

/// Rotationally symmetric sphere metric dr^2 + R(r)^2 dtheta^2 on [0, d]
/// with smooth tips (R'(0) = 1) and curvature at least one.
#[derive(Clone, Debug)]
pub struct RevolutionMetric {
    pub d: f64,
    profile: ProfileFunction,
}

impl RevolutionMetric {
    pub fn new(profile: ProfileFunction, d: f64) -> Result<Self> {
        if d >= PI - 1e-9 {
            let sup_r = interior_grid(0.0, d, 512)
                .into_iter()
                .map(|r| profile.eval(r))
                .fold(0.0, f64::max);
            return Err(Error::EmbeddingRigid { sup_r, d });
        }
        if profile.eval(0.0).abs() > 1e-9 || profile.eval(d).abs() > 1e-9 {
            return Err(Error::Invalid(
                "profile must vanish at both tips".into(),
            ));
        }
        if (profile.deriv(0.0, 1) - 1.0).abs() > 1e-6 {
            return Err(Error::Invalid(format!(
                "tip slope {} differs from 1; the tip is not smooth",
                profile.deriv(0.0, 1)
            )));
        }
        let m = Self { d, profile };
        let (sup_r, min_curv, max_clairaut) = m.grid_invariants(2048);
        if sup_r >= 1.0 {
            return Err(Error::EmbeddingRigid { sup_r, d });
        }
        if min_curv < 1.0 - 1e-6 {
            return Err(Error::Invalid(format!(
                "profile curvature drops to {min_curv}, below one"
            )));
        }
        if max_clairaut > 1.0 + tol::ENDPOINT_DERIV {
            return Err(Error::Invalid(format!(
                "R'^2 + R^2 reaches {max_clairaut}, above one"
            )));
        }
        Ok(m)
    }

    pub fn profile(&self) -> &ProfileFunction {
        &self.profile
    }

    /// (sup R, min -R''/R, max R'^2 + R^2) over an interior grid.
    pub fn grid_invariants(&self, n: usize) -> (f64, f64, f64) {
        let mut sup_r: f64 = 0.0;
        let mut min_curv = f64::INFINITY;
        let mut max_cl: f64 = 0.0;
        for r in interior_grid(0.0, self.d, n) {
            let v = self.profile.eval(r);
            let dv = self.profile.deriv(r, 1);
            sup_r = sup_r.max(v);
            max_cl = max_cl.max(dv * dv + v * v);
            if v > 1e-8 {
                min_curv = min_curv.min(-self.profile.deriv(r, 2) / v);
            }
        }
        (sup_r, min_curv, max_cl)
    }
}

/// Longitude function of the embedding, sampled on the integration grid.
#[derive(Clone, Debug)]
pub struct EmbeddingCurve {
    pub step: f64,
    pub rs: Vec<f64>,
    pub vs: Vec<f64>,
}

impl EmbeddingCurve {
    pub fn v_end(&self) -> f64 {
        *self.vs.last().unwrap()
    }

    /// Linear interpolation of the longitude.
    pub fn v_at(&self, r: f64) -> f64 {
        let n = self.rs.len();
        if r <= self.rs[0] {
            return self.vs[0];
        }
        if r >= self.rs[n - 1] {
            return self.vs[n - 1];
        }
        let idx = ((r - self.rs[0]) / self.step).floor() as usize;
        let idx = idx.min(n - 2);
        let u = (r - self.rs[idx]) / (self.rs[idx + 1] - self.rs[idx]);
        self.vs[idx] * (1.0 - u) + self.vs[idx + 1] * u
    }

    /// Monotonicity margin: the smallest forward difference of v.
    pub fn min_increment(&self) -> f64 {
        self.vs
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

fn slope(profile: &ProfileFunction, r: f64) -> Result<f64> {
    let rv = profile.eval(r);
    let dv = profile.deriv(r, 1);
    let one_minus = 1.0 - rv * rv;
    let rad = one_minus - dv * dv;
    if rad < -1e-12 {
        return Err(Error::NegativeRadicand { r, value: rad });
    }
    Ok(rad.max(0.0).sqrt() / one_minus)
}

/// Integrates the longitude equation on [0, r_end] with classical
/// fourth-order Runge-Kutta at a fixed step. Requires sup R < 1 on the
/// interval and a nonnegative radicand (up to rounding, which is clamped).
pub fn solve_embedding_ode_on(
    profile: &ProfileFunction,
    r_end: f64,
    step: f64,
) -> Result<EmbeddingCurve> {
    if step <= 0.0 || r_end <= 0.0 {
        return Err(Error::OutOfRange {
            name: "step/r_end",
            value: step.min(r_end),
            range: "(0, inf)",
        });
    }
    for r in interior_grid(0.0, r_end, 512) {
        let rv = profile.eval(r);
        if rv >= 1.0 {
            return Err(Error::EmbeddingRigid {
                sup_r: rv,
                d: r_end,
            });
        }
    }
    let n = (r_end / step).ceil() as usize;
    let mut rs = Vec::with_capacity(n + 1);
    let mut vs = Vec::with_capacity(n + 1);
    let mut r = 0.0;
    let mut v = 0.0;
    rs.push(r);
    vs.push(v);
    for i in 0..n {
        let h = (r_end - r).min(step);
        let k1 = slope(profile, r)?;
        let k2 = slope(profile, r + h / 2.0)?;
        let k3 = k2;
        let k4 = slope(profile, (r + h).min(r_end))?;
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        r = if i + 1 == n { r_end } else { r + h };
        rs.push(r);
        vs.push(v);
    }
    Ok(EmbeddingCurve { step, rs, vs })
}

/// Full-interval solve for a validated revolution metric.
pub fn solve_embedding_ode(metric: &RevolutionMetric, step: f64) -> Result<EmbeddingCurve> {
    solve_embedding_ode_on(&metric.profile, metric.d, step)
}

/// Largest pullback-isometry residual
/// |v'^2 (1 - R^2) + R'^2 / (1 - R^2) - 1| over the integration grid, with
/// v' reconstructed from the stored samples by five-point differences, so
/// the check does not reuse the integrand.
///
/// The ten samples adjacent to each tip are checked for finiteness only:
/// resolved profiles carry a corner-bridge window much narrower than any
/// practical step right at the tip, and no difference stencil wider than
/// that window can reconstruct v' across it.
pub fn pullback_check(metric: &RevolutionMetric, curve: &EmbeddingCurve) -> f64 {
    pullback_residual(&metric.profile, curve)
}

pub fn pullback_residual(profile: &ProfileFunction, curve: &EmbeddingCurve) -> f64 {
    let n = curve.rs.len();
    let h = curve.step;
    let mut worst: f64 = 0.0;
    let skip = 10;
    let stride = (n / 512).max(1);
    for i in (2..n.saturating_sub(3)).step_by(stride) {
        // Interior points keep a uniform step; five-point stencil.
        let vp = (-curve.vs[i + 2] + 8.0 * curve.vs[i + 1] - 8.0 * curve.vs[i - 1]
            + curve.vs[i - 2])
            / (12.0 * h);
        let r = curve.rs[i];
        let rv = profile.eval(r);
        let dv = profile.deriv(r, 1);
        let one_minus = 1.0 - rv * rv;
        let residual = (vp * vp * one_minus + dv * dv / one_minus - 1.0).abs();
        if !residual.is_finite() {
            return f64::INFINITY;
        }
        if i >= skip && i + skip < n {
            worst = worst.max(residual);
        }
    }
    worst
}

/// Central projection of the open hemisphere around `center` onto its
/// affine tangent 3-plane {x : <x, center> = 1}.
pub fn beltrami(center: &Vector4<f64>, q: &Vector4<f64>) -> Result<Vector4<f64>> {
    let inner = center.dot(q);
    if inner <= 1e-12 {
        return Err(Error::OutOfRange {
            name: "<q, center>",
            value: inner,
            range: "(0, 1]: q must lie in the open hemisphere",
        });
    }
    Ok(q / inner)
}

/// Inverse of the central projection: radial retraction to the sphere.
pub fn beltrami_inverse(x: &Vector4<f64>) -> Vector4<f64> {
    x / x.norm()
}

/// Immersion check of the revolution embedding: both differential columns
/// must keep full rank over the grid. Embeddedness beyond immersion is not
/// verified here.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ImmersionReport {
    pub min_radial_speed: f64,
    pub min_circle_radius: f64,
    pub immersed_away_from_tips: bool,
}

pub fn immersion_check(metric: &RevolutionMetric, curve: &EmbeddingCurve) -> ImmersionReport {
    let mut min_speed = f64::INFINITY;
    let mut min_radius = f64::INFINITY;
    for r in interior_grid(metric.d * 0.02, metric.d * 0.98, 512) {
        let rv = metric.profile.eval(r);
        let dv = metric.profile.deriv(r, 1);
        let vp = {
            let one_minus = 1.0 - rv * rv;
            ((one_minus - dv * dv).max(0.0)).sqrt() / one_minus
        };
        // Row speed of (v(r), arcsin R(r)) in the chart metric.
        let t = rv.asin();
        let arc_d = dv / (1.0 - rv * rv).sqrt();
        let speed = (vp * vp * t.cos() * t.cos() + arc_d * arc_d).sqrt();
        min_speed = min_speed.min(speed);
        min_radius = min_radius.min(rv);
        let _ = curve;
    }
    ImmersionReport {
        min_radial_speed: min_speed,
        min_circle_radius: min_radius,
        immersed_away_from_tips: min_speed > 1e-6 && min_radius > 0.0,
    }
}

/// Radial convex function on flat 3-space, given by its profile in the
/// radius. Convexity of the profile together with a nonnegative slope makes
/// the radial extension convex.
#[derive(Clone)]
pub struct RadialConvex {
    profile: ProfileFunction,
    r_max: f64,
}

impl RadialConvex {
    pub fn new(profile: ProfileFunction, r_max: f64) -> Result<Self> {
        let grid = interior_grid(0.0, r_max, 512);
        let h = r_max / 1024.0;
        let mut worst = f64::INFINITY;
        for &r in &grid {
            if r < h {
                continue;
            }
            let dd = profile.eval(r + h) - 2.0 * profile.eval(r) + profile.eval(r - h);
            worst = worst.min(dd / (h * h));
        }
        let slope0 = (profile.eval(h) - profile.eval(0.0)) / h;
        if worst < -1e-9 || slope0 < -1e-9 {
            return Err(Error::NotConvex { worst });
        }
        Ok(Self { profile, r_max })
    }

    /// Value with linear extension past the profile domain; the extension
    /// keeps the end slope, preserving convexity.
    pub fn eval(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        if rho <= self.r_max {
            self.profile.eval(rho)
        } else {
            let end_slope = (self.profile.eval(self.r_max)
                - self.profile.eval(self.r_max * (1.0 - 1e-6)))
                / (self.r_max * 1e-6);
            self.profile.eval(self.r_max) + end_slope * (rho - self.r_max)
        }
    }
}

/// Rotationally invariant mollification of a radial function on flat
/// 3-space: the spherical average collapses to a one-dimensional integral
/// against the chord variable, so the full convolution is a double
/// quadrature.
pub struct MollifiedRadial {
    f: RadialConvex,
    pub eps: f64,
}

impl MollifiedRadial {
    pub fn new(f: RadialConvex, eps: f64) -> Self {
        Self { f, eps }
    }

    fn kernel_mass(&self) -> f64 {
        // Integral of bump(|y|) over the unit ball of 3-space.
        gauss15_composite(&|u: f64| bump(u) * u * u, 0.0, 1.0, 32)
    }

    /// Convolution value at radius rho.
    pub fn eval(&self, rho: f64) -> f64 {
        let eps = self.eps;
        let mass = self.kernel_mass();
        if rho < 1e-12 {
            // At the center the spherical average is the value itself.
            return gauss15_composite(
                &|s: f64| bump(s / eps) / (mass * eps * eps * eps) * self.f.eval(s) * s * s,
                0.0,
                eps,
                32,
            );
        }
        let inner = |s: f64| {
            // Spherical average of f over the sphere of radius s about rho.
            if s < 1e-14 {
                return self.f.eval(rho);
            }
            gauss15_composite(
                &|w: f64| self.f.eval(w) * w,
                (rho - s).abs(),
                rho + s,
                8,
            ) / (2.0 * rho * s)
        };
        gauss15_composite(
            &|s: f64| bump(s / eps) / (mass * eps * eps * eps) * inner(s) * s * s,
            0.0,
            eps,
            32,
        )
    }
}

/// Mollified-and-blended radial function: the smoothed profile inside
/// radius r/2, the original outside radius r, a smooth blend between.
pub struct ConvexMollified {
    f: RadialConvex,
    smooth: MollifiedRadial,
    pub blend_radius: f64,
}

impl ConvexMollified {
    pub fn eval(&self, rho: f64) -> f64 {
        let j = 1.0 - smoothstep((rho - self.blend_radius / 2.0) / (self.blend_radius / 2.0));
        if j == 0.0 {
            return self.f.eval(rho);
        }
        j * self.smooth.eval(rho) + (1.0 - j) * self.f.eval(rho)
    }

    pub fn smoothed(&self) -> &MollifiedRadial {
        &self.smooth
    }

    pub fn original(&self) -> &RadialConvex {
        &self.f
    }
}

/// Mollifies a radial convex function at kernel width eps = 1/n and blends
/// it back outside radius r. The input must be convex; the blend equals the
/// original past r and the smoothed function inside r/2.
pub fn convex_mollify(f: RadialConvex, n: u32, r: f64) -> Result<ConvexMollified> {
    if n == 0 || r <= 0.0 {
        return Err(Error::OutOfRange {
            name: "n/r",
            value: r.min(n as f64),
            range: "n >= 1, r > 0",
        });
    }
    let eps = 1.0 / n as f64;
    let smooth = MollifiedRadial::new(f.clone(), eps);
    Ok(ConvexMollified {
        f,
        smooth,
        blend_radius: r,
    })
}

/// Radial graph profile of the tangent cone at the lower tip of an embedded
/// profile sphere: the cone over the embedded surface, centrally projected
/// from the tip image, is a surface of revolution whose graph slope is
/// constant in the radius exactly when the tip is conical.
#[derive(Clone, Debug, Serialize)]
pub struct ConeProfile {
    /// Radii in the tangent plane.
    pub xi: Vec<f64>,
    /// Graph heights.
    pub height: Vec<f64>,
    /// Fitted slope (mean of the samplewise slopes).
    pub slope: f64,
    /// Largest deviation of a samplewise slope from the fit.
    pub slope_deviation: f64,
}

impl ConeProfile {
    /// Convexity of the radial graph: the cone profile is linear, so its
    /// second differences vanish within tolerance.
    pub fn is_cone(&self, tolerance: f64) -> bool {
        self.slope_deviation <= tolerance * (1.0 + self.slope.abs())
    }
}

/// Computes the tangent-cone graph profile at the lower tip from the
/// embedding data of the profile sphere, sampling radii up to r_cap.
pub fn cone_from_tip(
    profile: &ProfileFunction,
    curve: &EmbeddingCurve,
    r_cap: f64,
    samples: usize,
) -> Result<ConeProfile> {
    if r_cap <= 0.0 {
        return Err(Error::OutOfRange {
            name: "r_cap",
            value: r_cap,
            range: "(0, d)",
        });
    }
    let mut xi = Vec::with_capacity(samples);
    let mut height = Vec::with_capacity(samples);
    let mut slopes = Vec::with_capacity(samples);
    for r in interior_grid(0.0, r_cap, samples) {
        let rv = profile.eval(r);
        let v = curve.v_at(r);
        let denom = (1.0 - rv * rv).sqrt() * v.cos();
        if denom <= 1e-12 {
            return Err(Error::Invalid(
                "projection reaches the equator; r_cap too large".into(),
            ));
        }
        let radius = rv / denom;
        let h = v.tan();
        xi.push(radius);
        height.push(h);
        if radius > 1e-12 {
            slopes.push(h / radius);
        }
    }
    let slope = slopes.iter().sum::<f64>() / slopes.len().max(1) as f64;
    let slope_deviation = slopes
        .iter()
        .map(|s| (s - slope).abs())
        .fold(0.0, f64::max);
    Ok(ConeProfile {
        xi,
        height,
        slope,
        slope_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::WeightedQuotientProfile;
    use crate::resolve::{build_eta, doubly_resolved_profile, SmoothingParams};
    use std::f64::consts::FRAC_PI_2;

    fn hopf_metric() -> RevolutionMetric {
        let q = WeightedQuotientProfile::new(1, 1).unwrap();
        RevolutionMetric::new(q.profile().clone(), FRAC_PI_2).unwrap()
    }

    fn resolved_metric(mm: u32, mp: u32) -> RevolutionMetric {
        let q = WeightedQuotientProfile::new(mm, mp).unwrap();
        let em = build_eta(
            SmoothingParams::new(0.3, 1e-3, SmoothingParams::quotient_weight(mm)).unwrap(),
        )
        .unwrap();
        let ep = build_eta(
            SmoothingParams::new(0.3, 1e-3, SmoothingParams::quotient_weight(mp)).unwrap(),
        )
        .unwrap();
        let both = doubly_resolved_profile(q.profile(), &em, &ep).unwrap();
        RevolutionMetric::new(both, FRAC_PI_2).unwrap()
    }

    #[test]
    fn clairaut_bound_holds_on_corpus() {
        for m in [
            hopf_metric(),
            resolved_metric(2, 3),
            resolved_metric(3, 4),
            resolved_metric(2, 5),
        ] {
            let (sup_r, min_curv, max_cl) = m.grid_invariants(2048);
            assert!(sup_r < 1.0);
            assert!(min_curv >= 1.0);
            assert!(max_cl <= 1.0 + tol::ENDPOINT_DERIV, "max = {max_cl}");
        }
    }

    #[test]
    fn rigidity_case_refused() {
        // Round sphere profile: tip distance pi.
        let sin = ProfileFunction::sin();
        assert!(matches!(
            RevolutionMetric::new(sin, PI),
            Err(Error::EmbeddingRigid { .. })
        ));
    }

    #[test]
    fn tip_slope_of_longitude_vanishes() {
        let m = hopf_metric();
        let c = solve_embedding_ode(&m, 1e-4).unwrap();
        // v'(0) = 0: the first increment is higher order in the step.
        assert!(c.vs[1] - c.vs[0] < 1e-6);
        assert!(c.min_increment() >= 0.0);
        assert!(c.v_end().is_finite());
    }

    #[test]
    fn pullback_residual_small_on_corpus() {
        for m in [hopf_metric(), resolved_metric(2, 3)] {
            let c = solve_embedding_ode(&m, 1e-4).unwrap();
            let res = pullback_check(&m, &c);
            assert!(res <= tol::ODE, "residual {res:.3e}");
        }
    }

    #[test]
    fn perturbed_longitude_fails_pullback() {
        let m = hopf_metric();
        let mut c = solve_embedding_ode(&m, 1e-4).unwrap();
        for v in &mut c.vs {
            *v *= 1.01;
        }
        let res = pullback_check(&m, &c);
        assert!(res > 1e-3, "residual {res:.3e}");
    }

    #[test]
    fn rk4_order_observed() {
        // Smooth profile: the end value converges at fourth order. A decade
        // of step should gain 1e4 in accuracy; allow a factor of 4 and a
        // rounding floor.
        let m = hopf_metric();
        let ends: Vec<f64> = [1e-1, 1e-2, 1e-4]
            .iter()
            .map(|&h| solve_embedding_ode(&m, h).unwrap().v_end())
            .collect();
        let e_coarse = (ends[0] - ends[2]).abs();
        let e_fine = ((ends[1] - ends[2]).abs()).max(1e-15);
        let gain = e_coarse / e_fine;
        assert!(
            gain > 2.5e3,
            "gain {gain:.3e} (errors {e_coarse:.3e}, {e_fine:.3e})"
        );
        // The pullback residual itself drops with the step as well.
        let res: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&h| {
                let c = solve_embedding_ode(&m, h).unwrap();
                pullback_check(&m, &c)
            })
            .collect();
        assert!(res[1] < res[0] / 100.0, "residuals {res:?}");
    }

    #[test]
    fn beltrami_examples_and_roundtrip() {
        let center = Vector4::new(1.0, 0.0, 0.0, 0.0);
        // The center itself is the plane origin.
        let b = beltrami(&center, &center).unwrap();
        assert!((b - center).norm() < 1e-15);
        // A point at angle pi/4 lands at distance tan(pi/4) = 1.
        let q = Vector4::new(FRAC_PI_2.sin() / 2f64.sqrt(), FRAC_PI_2.sin() / 2f64.sqrt(), 0.0, 0.0);
        let q = q / q.norm();
        let b = beltrami(&center, &q).unwrap();
        assert!(((b - center).norm() - 1.0).abs() < 1e-12);
        // Outside the hemisphere: refused.
        let far = Vector4::new(-1.0, 0.0, 0.0, 0.0);
        assert!(beltrami(&center, &far).is_err());
    }

    #[test]
    fn beltrami_maps_great_arc_to_segment() {
        let center = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let p0 = Vector4::new(0.9, 0.1, 0.3, 0.0).normalize();
        let p1 = Vector4::new(0.8, -0.2, 0.1, 0.4).normalize();
        // Three points on the great arc from p0 to p1.
        let geodesic = |t: f64| {
            let x = p0 * (1.0 - t) + p1 * t;
            x.normalize()
        };
        let b0 = beltrami(&center, &geodesic(0.0)).unwrap();
        let bm = beltrami(&center, &geodesic(0.5)).unwrap();
        let b1 = beltrami(&center, &geodesic(1.0)).unwrap();
        // Collinearity in the plane: the midpoint image lies on the chord.
        let chord = b1 - b0;
        let rel = bm - b0;
        let cross_norm = (rel - chord * (rel.dot(&chord) / chord.norm_squared())).norm();
        assert!(cross_norm < 1e-12, "collinearity residual {cross_norm:.3e}");
    }

    #[test]
    fn mollified_cone_is_smooth_and_positive_at_origin() {
        let cone = RadialConvex::new(
            ProfileFunction::from_fn((0.0, 2.0), |r| r.abs()),
            2.0,
        )
        .unwrap();
        let m = convex_mollify(cone, 4, 0.8).unwrap();
        // The mollified vertex is strictly positive: the kernel average of
        // |y| over the ball.
        let at0 = m.smoothed().eval(0.0);
        assert!(at0 > 0.0 && at0 < 0.25);
        // Radial slope at the origin vanishes after smoothing.
        let h = 1e-3;
        let slope0 = (m.smoothed().eval(h) - m.smoothed().eval(0.0)) / h;
        assert!(slope0.abs() < 0.05, "slope at origin {slope0}");
        // Untouched outside the blend radius.
        assert_eq!(m.eval(1.5), m.original().eval(1.5));
    }

    #[test]
    fn mollifier_consistency_order_on_smooth_input() {
        let f = RadialConvex::new(
            ProfileFunction::from_fn((0.0, 3.0), |r| r * r),
            3.0,
        )
        .unwrap();
        let sup_err = |n: u32| {
            let m = MollifiedRadial::new(f.clone(), 1.0 / n as f64);
            interior_grid(0.5, 1.5, 16)
                .into_iter()
                .map(|rho| (m.eval(rho) - rho * rho).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (sup_err(4), sup_err(8));
        assert!(e2 <= 0.6 * e1, "errors {e1:.3e}, {e2:.3e}");
    }

    #[test]
    fn convexity_retained_outside_annulus() {
        let cone = RadialConvex::new(
            ProfileFunction::from_fn((0.0, 2.0), |r| 1.5 * r.abs()),
            2.0,
        )
        .unwrap();
        let m = convex_mollify(cone, 6, 0.8).unwrap();
        // Inside r/2 and outside r the blend is convex; midpoint test on
        // radial triples.
        let check = |lo: f64, hi: f64| {
            let h = (hi - lo) / 64.0;
            let mut worst = f64::INFINITY;
            for r in interior_grid(lo + h, hi - h, 48) {
                let dd = m.eval(r + h) - 2.0 * m.eval(r) + m.eval(r - h);
                worst = worst.min(dd);
            }
            worst
        };
        assert!(check(0.0, 0.4) > -1e-10, "inner region convexity");
        assert!(check(0.85, 1.8) > -1e-10, "outer region convexity");
    }

    #[test]
    fn non_convex_input_refused() {
        let bad = RadialConvex::new(
            ProfileFunction::from_fn((0.0, 2.0), |r| -(r * r)),
            2.0,
        );
        assert!(matches!(bad, Err(Error::NotConvex { .. })));
    }

    #[test]
    fn zk_tip_projects_to_circular_cone() {
        // Orbifold profile sin(r)/k near the tip: radicand 1 - 1/k^2, the
        // projected graph is a circular cone of slope sqrt(k^2 - 1).
        for k in [2u32, 3] {
            let kf = k as f64;
            let profile = ProfileFunction::from_fn((0.0, 1.2), move |r| r.sin() / kf)
                .with_deriv(move |r| r.cos() / kf)
                .with_deriv(move |r| -r.sin() / kf);
            let curve = solve_embedding_ode_on(&profile, 1.0, 1e-4).unwrap();
            let cone = cone_from_tip(&profile, &curve, 0.9, 128).unwrap();
            assert!(cone.is_cone(1e-6), "k={k}: {:?}", cone.slope_deviation);
            let want = (kf * kf - 1.0).sqrt();
            assert!(
                (cone.slope - want).abs() < 1e-4,
                "k={k}: slope {} vs {want}",
                cone.slope
            );
        }
    }

    #[test]
    fn round_tip_projects_to_plane() {
        // k = 1: the radicand vanishes identically, the longitude is
        // constant and the graph is flat.
        let profile = ProfileFunction::from_fn((0.0, 1.2), |r| r.sin())
            .with_deriv(|r| r.cos())
            .with_deriv(|r| -r.sin());
        let curve = solve_embedding_ode_on(&profile, 1.0, 1e-4).unwrap();
        let cone = cone_from_tip(&profile, &curve, 0.9, 128).unwrap();
        // The radicand is zero up to rounding, so the longitude picks up at
        // most sqrt(rounding) per unit length.
        assert!(cone.slope.abs() < 1e-6, "slope {}", cone.slope);
        assert!(cone.height.iter().all(|h| h.abs() < 1e-6));
    }

    #[test]
    fn resolved_cone_profile_convex_after_mollify() {
        // Project the Z_2 cone, mollify, and verify the radial profile keeps
        // nonnegative second differences outside the blend annulus.
        let profile = ProfileFunction::from_fn((0.0, 1.2), |r| r.sin() / 2.0)
            .with_deriv(|r| r.cos() / 2.0)
            .with_deriv(|r| -r.sin() / 2.0);
        let curve = solve_embedding_ode_on(&profile, 1.0, 1e-4).unwrap();
        let cone = cone_from_tip(&profile, &curve, 0.9, 128).unwrap();
        let slope = cone.slope;
        let radial = RadialConvex::new(
            ProfileFunction::from_fn((0.0, 2.0), move |r| slope * r.abs()),
            2.0,
        )
        .unwrap();
        let m = convex_mollify(radial, 8, 0.6).unwrap();
        let h = 0.01;
        for r in interior_grid(0.62, 1.8, 64) {
            let dd = m.eval(r + h) - 2.0 * m.eval(r) + m.eval(r - h);
            assert!(dd >= -1e-10, "r={r}: dd={dd}");
        }
        for r in interior_grid(h, 0.28, 32) {
            let dd = m.eval(r + h) - 2.0 * m.eval(r) + m.eval(r - h);
            assert!(dd >= -1e-10, "r={r}: dd={dd}");
        }
    }

    #[test]
    fn immersion_away_from_tips() {
        let m = resolved_metric(2, 3);
        let c = solve_embedding_ode(&m, 1e-3).unwrap();
        let rep = immersion_check(&m, &c);
        assert!(rep.immersed_away_from_tips, "{rep:?}");
    }
}
