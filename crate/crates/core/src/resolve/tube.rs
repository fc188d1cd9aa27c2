//! Tube coordinates around a singular arc and the resolved tube metric.
//!
//! The model space is the spherical suspension of the quotient 2-sphere: a
//! positively curved 3-space whose two suspension tips are joined by the
//! singular arc {theta = 0} of length pi with constant isotropy Z_m. Fermi
//! coordinates (s, t) along the arc and ball coordinates (r, theta) at a tip
//! are related by the laws of spherical right triangles, because the section
//! of the circle action has constant curvature one.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chart::{ChartMetric, Coord};
use crate::error::{Error, Result};
use crate::numerics::{bisect, central_diff, interior_grid};
use crate::profile::ProfileFunction;
use crate::resolve::eta::EtaFunction;

/// Largest tube radius for which the latitude circle s = rho/2 stays inside
/// the ball of radius rho around the tip.
pub fn tube_t_max(rho: f64) -> f64 {
    (rho.cos() / (rho / 2.0).cos()).acos()
}

/// Ball coordinates and Jacobian entries at a Fermi point (s, t).
#[derive(Clone, Copy, Debug)]
pub struct CoordinateTransfer {
    pub r: f64,
    pub theta: f64,
    pub dr_ds: f64,
    pub dr_dt: f64,
    pub dtheta_ds: f64,
    pub dtheta_dt: f64,
}

/// Transfers Fermi coordinates (s, t) to ball coordinates (r, theta) through
/// cos r = cos s cos t, sin t = sin r sin theta, and returns the closed-form
/// Jacobian. The degenerate axis start s = t = 0 is rejected; s = 0 with
/// t > 0 lands on theta = pi/2 exactly.
pub fn coordinate_transfer(s: f64, t: f64) -> Result<CoordinateTransfer> {
    if s == 0.0 && t == 0.0 {
        return Err(Error::OutOfRange {
            name: "(s, t)",
            value: 0.0,
            range: "the tip itself has no ball coordinates",
        });
    }
    if !(0.0..=FRAC_PI_2).contains(&s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "[0, pi/2]",
        });
    }
    let r = (s.cos() * t.cos()).clamp(-1.0, 1.0).acos();
    let theta = t.sin().atan2(s.sin() * t.cos());
    let sr = r.sin();
    Ok(CoordinateTransfer {
        r,
        theta,
        dr_ds: s.sin() * t.cos() / sr,
        dr_dt: s.cos() * t.sin() / sr,
        dtheta_ds: -t.sin() * r.cos() / (sr * sr),
        dtheta_dt: s.sin() / (sr * sr),
    })
}

/// Residuals of the three spherical-triangle relations at (s, t).
pub fn transfer_relation_residual(s: f64, t: f64) -> Result<f64> {
    let ct = coordinate_transfer(s, t)?;
    let r1 = (ct.r.cos() - s.cos() * t.cos()).abs();
    let r2 = (t.sin() - ct.r.sin() * ct.theta.sin()).abs();
    let denom = (1.0 - s.cos().powi(2) * t.cos().powi(2)).sqrt();
    let r3 = if denom > 1e-12 {
        (ct.theta.cos() - t.cos() * s.sin() / denom).abs()
    } else {
        0.0
    };
    Ok(r1.max(r2).max(r3))
}

/// Signs of the transfer monotonicities over an interior grid, with one
/// finite-difference spot check of the closed-form Jacobian.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub grid_n: usize,
    pub min_dsinr_ds: f64,
    pub min_dsinr_dt: f64,
    pub min_dtheta_dt: f64,
    pub max_dtheta_ds: f64,
    pub jacobian_fd_deviation: f64,
    pub pass: bool,
}

pub fn monotonicity_check(rho: f64, t_max: f64, grid_n: usize) -> Result<MonotonicityReport> {
    let mut min_ds_ds = f64::INFINITY;
    let mut min_ds_dt = f64::INFINITY;
    let mut min_dth_dt = f64::INFINITY;
    let mut max_dth_ds = f64::NEG_INFINITY;
    for s in interior_grid(0.0, rho, grid_n) {
        for t in interior_grid(0.0, t_max, grid_n) {
            let ct = coordinate_transfer(s, t)?;
            min_ds_ds = min_ds_ds.min(ct.r.cos() * ct.dr_ds);
            min_ds_dt = min_ds_dt.min(ct.r.cos() * ct.dr_dt);
            min_dth_dt = min_dth_dt.min(ct.dtheta_dt);
            max_dth_ds = max_dth_ds.max(ct.dtheta_ds);
        }
    }
    // Spot check the closed-form Jacobian against central differences.
    let (s0, t0) = (rho * 0.43, t_max * 0.57);
    let ct = coordinate_transfer(s0, t0)?;
    let h = 1e-6;
    let fd_r_s = central_diff(&|x| coordinate_transfer(x, t0).unwrap().r, s0, h, 1);
    let fd_r_t = central_diff(&|x| coordinate_transfer(s0, x).unwrap().r, t0, h, 1);
    let fd_th_s = central_diff(&|x| coordinate_transfer(x, t0).unwrap().theta, s0, h, 1);
    let fd_th_t = central_diff(&|x| coordinate_transfer(s0, x).unwrap().theta, t0, h, 1);
    let dev = (ct.dr_ds - fd_r_s)
        .abs()
        .max((ct.dr_dt - fd_r_t).abs())
        .max((ct.dtheta_ds - fd_th_s).abs())
        .max((ct.dtheta_dt - fd_th_t).abs());
    let pass =
        min_ds_ds > 0.0 && min_ds_dt > 0.0 && min_dth_dt > 0.0 && max_dth_ds < 0.0 && dev < 1e-7;
    Ok(MonotonicityReport {
        grid_n,
        min_dsinr_ds: min_ds_ds,
        min_dsinr_dt: min_ds_dt,
        min_dtheta_dt: min_dth_dt,
        max_dtheta_ds: max_dth_ds,
        jacobian_fd_deviation: dev,
        pass,
    })
}

/// The spherical tube model around the singular arc: section warp
/// f = cos t, Killing length phi = sin(r) R(theta), both expressed in Fermi
/// coordinates.
#[derive(Clone, Debug)]
pub struct TubeModel {
    /// Isotropy order along the arc.
    pub m: u32,
    /// Quotient profile of the tip spaces of directions.
    pub profile: ProfileFunction,
    /// Ball radius around each tip.
    pub rho: f64,
    /// Arc length between the tips (pi in the suspension model).
    pub length: f64,
    /// Tube radius.
    pub t_max: f64,
}

impl TubeModel {
    pub fn new(m: u32, profile: ProfileFunction, rho: f64, length: f64) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&rho) || rho <= 0.0 {
            return Err(Error::OutOfRange {
                name: "rho",
                value: rho,
                range: "(0, pi/2)",
            });
        }
        if length <= rho {
            return Err(Error::OutOfRange {
                name: "length",
                value: length,
                range: "(rho, pi]",
            });
        }
        let t_max = tube_t_max(rho).min(0.98 * FRAC_PI_2);
        Ok(Self {
            m,
            profile,
            rho,
            length,
            t_max,
        })
    }

    /// Section warp coefficient.
    pub fn f(&self, _s: f64, t: f64) -> f64 {
        t.cos()
    }

    /// Killing length of the singular metric in Fermi coordinates. The
    /// mirror symmetry about length/2 uses the tip-side formula on each
    /// half.
    pub fn phi(&self, s: f64, t: f64) -> f64 {
        let s_eff = if s <= self.length / 2.0 {
            s
        } else {
            self.length - s
        };
        if t == 0.0 {
            return 0.0;
        }
        let ct = coordinate_transfer(s_eff, t).expect("interior tube point");
        ct.r.sin() * self.profile.eval(ct.theta)
    }

    /// Tip-side perturbation h(s, t) = sin(r) eta(theta).
    pub fn h_near(&self, eta: &EtaFunction, s: f64, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let ct = coordinate_transfer(s, t).expect("interior tube point");
        ct.r.sin() * eta.eval(ct.theta)
    }

    /// Far-tip perturbation, the mirror of [`Self::h_near`].
    pub fn h_far(&self, eta: &EtaFunction, s: f64, t: f64) -> f64 {
        self.h_near(eta, self.length - s, t)
    }

    /// Whether the Fermi point lies in the ball of radius rho at the near
    /// tip.
    pub fn in_near_ball(&self, s: f64, t: f64) -> bool {
        s.cos() * t.cos() > self.rho.cos()
    }

    /// The arc-constant extension: h evaluated on the latitude s = rho/2,
    /// as a profile in t with a closed-form first derivative.
    pub fn hbar(&self, eta: &EtaFunction) -> ProfileFunction {
        let rho2 = self.rho / 2.0;
        let e1 = eta.clone();
        let value = move |t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            let tt = t.abs();
            let ct = coordinate_transfer(rho2, tt).expect("latitude point");
            let v = ct.r.sin() * e1.eval(ct.theta);
            if t < 0.0 {
                -v
            } else {
                v
            }
        };
        let e2 = eta.clone();
        let d1 = move |t: f64| {
            let tt = t.abs().max(1e-300);
            let ct = coordinate_transfer(rho2, tt).expect("latitude point");
            ct.r.cos() * ct.dr_dt * e2.eval(ct.theta)
                + ct.r.sin() * e2.d1(ct.theta) * ct.dtheta_dt
        };
        let d1c = d1.clone();
        let d2 = move |t: f64| central_diff(&|x| d1c(x), t, 1e-5, 1);
        ProfileFunction::from_fn((0.0, self.t_max), value)
            .with_deriv(d1)
            .with_deriv(d2)
    }

    /// Largest t for which the latitude stays strictly inside the
    /// exact-sine region of the family, where hbar(t) = w sin t.
    pub fn hbar_sine_radius(&self, eta: &EtaFunction) -> f64 {
        let rho2 = self.rho / 2.0;
        let target = 0.9 * eta.tau_of_delta();
        let theta_at = |t: f64| coordinate_transfer(rho2, t).unwrap().theta;
        if theta_at(self.t_max * 0.999) < target {
            return self.t_max * 0.999;
        }
        bisect(
            &|t| theta_at(t) - target,
            1e-12,
            self.t_max * 0.999,
            80,
        )
        .unwrap_or(1e-3)
    }

    /// Resolved tube metric f^2 ds^2 + dt^2 + (phi + hbar)^2 dphi^2.
    pub fn tube_metric(&self, eta: &EtaFunction) -> Result<ChartMetric> {
        self.check_invariants()?;
        let hbar = self.hbar(eta);
        let model = self.clone();
        let coords = vec![
            Coord::new("s", (0.0, self.length)),
            Coord::new("t", (0.0, self.t_max)),
            Coord::periodic("phi", (0.0, 2.0 * std::f64::consts::PI)),
        ];
        Ok(ChartMetric::new(coords, move |p: &[f64]| {
            let f = model.f(p[0], p[1]);
            let k = model.phi(p[0], p[1]) + hbar.eval(p[1]);
            DMatrix::from_diagonal(&DVector::from_vec(vec![f * f, 1.0, k * k]))
        }))
    }

    /// Singular tube metric without the perturbation.
    pub fn singular_metric(&self) -> ChartMetric {
        let model = self.clone();
        let coords = vec![
            Coord::new("s", (0.0, self.length)),
            Coord::new("t", (0.0, self.t_max)),
            Coord::periodic("phi", (0.0, 2.0 * std::f64::consts::PI)),
        ];
        ChartMetric::new(coords, move |p: &[f64]| {
            let f = model.f(p[0], p[1]);
            let k = model.phi(p[0], p[1]);
            DMatrix::from_diagonal(&DVector::from_vec(vec![f * f, 1.0, k * k]))
        })
    }

    /// Section chart f^2 ds^2 + dt^2.
    pub fn section_metric(&self) -> ChartMetric {
        let model = self.clone();
        let coords = vec![
            Coord::new("s", (0.0, self.length)),
            Coord::new("t", (0.0, self.t_max)),
        ];
        ChartMetric::new(coords, move |p: &[f64]| {
            let f = model.f(p[0], p[1]);
            DMatrix::from_row_slice(2, 2, &[f * f, 0.0, 0.0, 1.0])
        })
    }

    /// Tube chart invariants: unit section warp on the arc, vanishing
    /// Killing length with radial slope 1/m.
    pub fn check_invariants(&self) -> Result<()> {
        for &s in &[self.rho * 0.7, self.length / 2.0, self.length - self.rho * 0.7] {
            if (self.f(s, 0.0) - 1.0).abs() > 1e-12 {
                return Err(Error::Invalid(format!(
                    "section warp f(s, 0) != 1 at s = {s}"
                )));
            }
            if self.phi(s, 0.0).abs() > 1e-12 {
                return Err(Error::Invalid(format!(
                    "killing length phi(s, 0) != 0 at s = {s}"
                )));
            }
            let slope = central_diff(&|t| self.phi(s, t.abs()) * t.signum(), 0.0, 1e-6, 1);
            if (slope - 1.0 / self.m as f64).abs() > 1e-6 {
                return Err(Error::Invalid(format!(
                    "radial Killing slope {slope} differs from 1/m at s = {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Smoothness surrogate at the arc: with xi = (phi + hbar)^2, the cartesian
/// coefficient of the angular block is 1 + zeta(s, t) y^2 with
/// zeta = (xi/t^2 - 1)/t^2. A smooth resolved metric forces zeta to stay
/// bounded with even symmetry in t.
#[derive(Clone, Debug, Serialize)]
pub struct ZetaReport {
    pub max_abs: f64,
    pub max_odd_deviation: f64,
    pub t_probe: f64,
    pub pass: bool,
}

pub fn zeta_smoothness_check(
    tube: &TubeModel,
    eta: &EtaFunction,
    s_samples: &[f64],
) -> Result<ZetaReport> {
    let hbar = tube.hbar(eta);
    let t_probe = tube.hbar_sine_radius(eta).min(tube.t_max * 0.5);
    let zeta = |s: f64, t: f64| {
        let k = tube.phi(s, t.abs()) * t.signum() + hbar.eval(t);
        let xi = k * k;
        (xi / (t * t) - 1.0) / (t * t)
    };
    let mut max_abs: f64 = 0.0;
    let mut max_odd: f64 = 0.0;
    for &s in s_samples {
        for t in interior_grid(t_probe * 0.05, t_probe, 24) {
            let zp = zeta(s, t);
            let zm = zeta(s, -t);
            max_abs = max_abs.max(zp.abs());
            // Odd part of an even function vanishes; the first odd
            // derivative at 0 is the limit of this ratio.
            max_odd = max_odd.max(((zp - zm) / (2.0 * t)).abs());
        }
    }
    Ok(ZetaReport {
        max_abs,
        max_odd_deviation: max_odd,
        t_probe,
        pass: max_abs.is_finite() && max_odd < 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::PlaneSection;
    use crate::curvature::{curvature_operator, hessian_scalar, sectional_curvature};
    use crate::quotient::WeightedQuotientProfile;
    use crate::resolve::eta::{build_eta, SmoothingParams};

    fn model_2_3() -> TubeModel {
        let q = WeightedQuotientProfile::new(2, 3).unwrap();
        TubeModel::new(2, q.profile().clone(), 0.8, std::f64::consts::PI).unwrap()
    }

    fn eta_2(tau: f64, delta: f64) -> EtaFunction {
        build_eta(SmoothingParams::new(tau, delta, SmoothingParams::quotient_weight(2)).unwrap())
            .unwrap()
    }

    #[test]
    fn transfer_axis_and_relations() {
        let ct = coordinate_transfer(0.7, 0.0).unwrap();
        assert!((ct.r - 0.7).abs() < 1e-15);
        assert_eq!(ct.theta, 0.0);
        // dtheta/dt on the axis is 1/sin(s).
        assert!((ct.dtheta_dt - 1.0 / 0.7f64.sin()).abs() < 1e-12);
        assert!(coordinate_transfer(0.0, 0.0).is_err());
        // s = 0 with t > 0: the latitude collapses to theta = pi/2.
        let edge = coordinate_transfer(0.0, 0.3).unwrap();
        assert!((edge.theta - FRAC_PI_2).abs() < 1e-15);
        assert!((edge.r - 0.3).abs() < 1e-15);
    }

    #[test]
    fn transfer_relations_hold_on_random_grid() {
        let mut worst: f64 = 0.0;
        for s in interior_grid(0.0, 1.2, 37) {
            for t in interior_grid(0.0, 0.5, 29) {
                worst = worst.max(transfer_relation_residual(s, t).unwrap());
            }
        }
        assert!(worst < 1e-12, "worst residual {worst:.3e}");
    }

    #[test]
    fn monotonicity_signs_hold() {
        let rep = monotonicity_check(0.8, tube_t_max(0.8), 256).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn tube_invariants_hold() {
        let tube = model_2_3();
        tube.check_invariants().unwrap();
    }

    #[test]
    fn killing_extension_slope_along_axis() {
        // d/dt [sin(r) eta(theta)] at t = 0 equals the weight.
        let tube = model_2_3();
        let eta = eta_2(0.3, 1e-2);
        let w = eta.weight();
        for &s in &[0.3, 0.5] {
            let slope = central_diff(
                &|t: f64| tube.h_near(&eta, s, t.abs()) * t.signum(),
                0.0,
                1e-6,
                1,
            );
            assert!((slope - w).abs() < 1e-8, "s={s}: slope={slope}");
        }
        // And the perturbation vanishes once theta passes tau.
        let ct_far = coordinate_transfer(0.05, 0.4).unwrap();
        assert!(ct_far.theta > 0.3);
        assert_eq!(tube.h_near(&eta, 0.05, 0.4), 0.0);
    }

    #[test]
    fn hbar_equals_weighted_sine_near_axis() {
        let tube = model_2_3();
        let eta = eta_2(0.3, 1e-2);
        let hbar = tube.hbar(&eta);
        let t_sine = tube.hbar_sine_radius(&eta);
        assert!(t_sine > 0.0);
        for t in interior_grid(0.0, t_sine, 16) {
            assert!(
                (hbar.eval(t) - eta.weight() * t.sin()).abs() < 1e-13,
                "t={t}"
            );
        }
        // Far latitude: theta(rho/2, t) past tau kills the perturbation.
        let t_far = tube.t_max * 0.98;
        let th = coordinate_transfer(0.4, t_far).unwrap().theta;
        if th > 0.3 {
            assert_eq!(hbar.eval(t_far), 0.0);
        }
    }

    #[test]
    fn tube_metric_matches_ball_suspension_through_transfer() {
        // Pulling back dr^2 + sin^2 r (dtheta^2 + R^2 dalpha^2) through the
        // transfer must reproduce cos^2 t ds^2 + dt^2 + phi^2 dphi^2.
        let tube = model_2_3();
        let q = WeightedQuotientProfile::new(2, 3).unwrap();
        let mut worst: f64 = 0.0;
        for s in interior_grid(0.05, 0.75, 7) {
            for t in interior_grid(0.01, tube.t_max * 0.9, 7) {
                let ct = coordinate_transfer(s, t).unwrap();
                let sr = ct.r.sin();
                let rr = q.eval(ct.theta);
                // Pullback of the ball metric block by the Jacobian.
                let g_ss = ct.dr_ds * ct.dr_ds + sr * sr * ct.dtheta_ds * ct.dtheta_ds;
                let g_st = ct.dr_ds * ct.dr_dt + sr * sr * ct.dtheta_ds * ct.dtheta_dt;
                let g_tt = ct.dr_dt * ct.dr_dt + sr * sr * ct.dtheta_dt * ct.dtheta_dt;
                let g_pp = sr * sr * rr * rr;
                let f = tube.f(s, t);
                let phi = tube.phi(s, t);
                worst = worst
                    .max((g_ss - f * f).abs())
                    .max(g_st.abs())
                    .max((g_tt - 1.0).abs())
                    .max((g_pp - phi * phi).abs());
            }
        }
        assert!(worst < 1e-10, "worst coefficient gap {worst:.3e}");
    }

    #[test]
    fn zeta_surrogate_finite_and_even() {
        let tube = model_2_3();
        let eta = eta_2(0.3, 1e-2);
        let rep = zeta_smoothness_check(&tube, &eta, &[0.5, 1.0, 2.0]).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn hessian_of_hbar_matches_block_formula() {
        // Hess(hbar) on the section = diag(f dt(hbar) dt(f), dtt(hbar)) in
        // (s, t) order.
        let tube = model_2_3();
        let eta = eta_2(0.3, 1e-2);
        let hbar = tube.hbar(&eta);
        let section = tube.section_metric();
        let mut worst: f64 = 0.0;
        for &s in &[0.5, 1.2, 2.0] {
            for &t in &[0.05, 0.12, 0.2] {
                let hess = hessian_scalar(&section, &|p: &[f64]| hbar.eval(p[1]), &[s, t]).unwrap();
                let f = tube.f(s, t);
                let df_dt = -t.sin();
                let want_ss = f * hbar.deriv(t, 1) * df_dt;
                let want_tt = hbar.deriv(t, 2);
                worst = worst
                    .max((hess[(0, 0)] - want_ss).abs())
                    .max((hess[(1, 1)] - want_tt).abs())
                    .max(hess[(0, 1)].abs());
            }
        }
        assert!(worst < 1e-5, "worst entry gap {worst:.3e}");
    }

    #[test]
    fn tube_curvature_operator_block_structure() {
        let tube = model_2_3();
        let eta = eta_2(0.3, 1e-2);
        let hbar = tube.hbar(&eta);
        let metric = tube.tube_metric(&eta).unwrap();
        let mut worst_rel: f64 = 0.0;
        for &(s, t) in &[(1.0, 0.15), (0.7, 0.1), (2.0, 0.2)] {
            let k = tube.phi(s, t) + hbar.eval(t);
            let f = tube.f(s, t);
            let frame = [
                vec![0.0, 0.0, 1.0 / k],
                vec![0.0, 1.0, 0.0],
                vec![1.0 / f, 0.0, 0.0],
            ];
            let (m, _) = curvature_operator(&metric, &[s, t, 0.3], &frame).unwrap();
            let norm = m.abs().max();
            let mixed = m[(0, 2)].abs().max(m[(1, 2)].abs());
            worst_rel = worst_rel.max(mixed / norm);
        }
        assert!(worst_rel < 1e-4, "mixed-block ratio {worst_rel:.3e}");
    }

    #[test]
    fn resolved_tube_positive_curvature_on_core() {
        let tube = model_2_3();
        let eta = eta_2(0.3, 1e-3);
        let metric = tube.tube_metric(&eta).unwrap();
        let mut min_sec = f64::INFINITY;
        for s in interior_grid(tube.rho / 4.0, tube.length - tube.rho / 4.0, 9) {
            for t in interior_grid(0.005, tube.t_max * 0.9, 9) {
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    let sec =
                        sectional_curvature(&metric, &PlaneSection::coordinate(vec![s, t, 0.4], i, j))
                            .unwrap();
                    min_sec = min_sec.min(sec);
                }
            }
        }
        assert!(min_sec > 0.0, "min sec = {min_sec}");
    }
}
