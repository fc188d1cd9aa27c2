//! The glued Killing-length profile on the section and its smoothing.
//!
//! The three resolved Killing lengths (near ball, tube middle, far ball) fit
//! together continuously along the latitudes s = rho/2 and s = l - rho/2.
//! Near the arc all three pieces collapse to phi + w sin t, so the seams are
//! invisible there; the non-smooth set is trapped in a compact band away
//! from the arc, where the profile is a minimum of concave functions and a
//! convolution smoothing preserves concavity.
//!
//! Concavity on the section always means concavity along its geodesics. In
//! Fermi coordinates the section is the round sphere (s longitude, t
//! latitude), so geodesic midpoints come from the unit-sphere embedding;
//! the flat geometry is kept for strip-shaped oracle tests.

use std::sync::Arc;

use serde::Serialize;

use crate::bump::{mollifier, smoothstep};
use crate::error::{Error, Result};
use crate::numerics::{gauss15_composite, interior_grid};
use crate::profile::ProfileFunction;
use crate::resolve::eta::EtaFunction;
use crate::resolve::tube::TubeModel;

/// Geometry of the parameter domain: governs geodesic midpoints for
/// concavity tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionGeometry {
    /// Plain strip: geodesics are straight chart lines.
    Flat,
    /// Unit sphere with s the longitude and t the latitude; the metric is
    /// cos^2 t ds^2 + dt^2.
    Sphere,
}

impl SectionGeometry {
    fn embed(self, s: f64, t: f64) -> [f64; 3] {
        match self {
            SectionGeometry::Flat => [s, t, 0.0],
            SectionGeometry::Sphere => [t.cos() * s.cos(), t.cos() * s.sin(), t.sin()],
        }
    }

    /// Geodesic midpoint of two chart points.
    pub fn midpoint(self, a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
        match self {
            SectionGeometry::Flat => ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0),
            SectionGeometry::Sphere => {
                let pa = self.embed(a.0, a.1);
                let pb = self.embed(b.0, b.1);
                let sum = [pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]];
                let norm = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
                let m = [sum[0] / norm, sum[1] / norm, sum[2] / norm];
                (m[1].atan2(m[0]), m[2].clamp(-1.0, 1.0).asin())
            }
        }
    }
}

/// Which formula is active at a section point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GluePiece {
    NearBall,
    Middle,
    FarBall,
}

/// Piecewise profile psi on the section: Killing length of the resolved
/// metric before smoothing.
#[derive(Clone)]
pub struct PsiGlue {
    tube: TubeModel,
    eta: EtaFunction,
    hbar: ProfileFunction,
}

impl PsiGlue {
    pub fn new(tube: TubeModel, eta: EtaFunction) -> Result<Self> {
        let hbar = tube.hbar(&eta);
        let glue = Self { tube, eta, hbar };
        let gap = glue.seam_continuity(64);
        if gap > crate::tol::SEAM {
            return Err(Error::SeamMismatch {
                location: "s = rho/2 and s = l - rho/2".into(),
                gap,
            });
        }
        Ok(glue)
    }

    pub fn tube(&self) -> &TubeModel {
        &self.tube
    }

    pub fn eta(&self) -> &EtaFunction {
        &self.eta
    }

    pub fn piece(&self, s: f64) -> GluePiece {
        if s <= self.tube.rho / 2.0 {
            GluePiece::NearBall
        } else if s < self.tube.length - self.tube.rho / 2.0 {
            GluePiece::Middle
        } else {
            GluePiece::FarBall
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let phi = self.tube.phi(s, t);
        match self.piece(s) {
            GluePiece::NearBall => phi + self.tube.h_near(&self.eta, s, t),
            GluePiece::Middle => phi + self.hbar.eval(t),
            GluePiece::FarBall => phi + self.tube.h_far(&self.eta, s, t),
        }
    }

    /// Worst value gap across both seams over a t-grid.
    pub fn seam_continuity(&self, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let s1 = self.tube.rho / 2.0;
        let s2 = self.tube.length - self.tube.rho / 2.0;
        for t in interior_grid(0.0, self.tube.t_max, n) {
            let near = self.tube.h_near(&self.eta, s1, t);
            let far = self.tube.h_far(&self.eta, s2, t);
            let mid = self.hbar.eval(t);
            worst = worst.max((near - mid).abs()).max((far - mid).abs());
        }
        worst
    }

    /// On the near ball, psi must agree with the pointwise minimum of the
    /// two concave ingredients phi + h and phi + hbar. Returns the worst
    /// deviation over a grid of ball points.
    pub fn min_identity_deviation(&self, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for s in interior_grid(0.0, self.tube.rho * 0.98, n) {
            for t in interior_grid(0.0, self.tube.t_max, n) {
                if !self.tube.in_near_ball(s, t) {
                    continue;
                }
                let phi = self.tube.phi(s, t);
                let a = phi + self.tube.h_near(&self.eta, s, t);
                let b = phi + self.hbar.eval(t);
                let min = a.min(b);
                let psi = self.eval(s, t);
                worst = worst.max((psi - min).abs());
            }
        }
        worst
    }

    /// Scans the derivative jump in s across the near seam. The middle piece
    /// is constant in s, so the jump is exactly the s-derivative of the
    /// near-ball perturbation along the seam latitude, which is a smooth
    /// formula differenced without any seam in the way. The band of
    /// significant jumps must sit strictly between the arc and the support
    /// angle of the smoothing family.
    pub fn seam_jump_report(&self, n: usize) -> SeamReport {
        let s1 = self.tube.rho / 2.0;
        let h = 1e-6;
        let mut jumps = Vec::with_capacity(n);
        let mut max_jump: f64 = 0.0;
        let t_sine = self.tube.hbar_sine_radius(&self.eta);
        let mut jump_inside_sine_region: f64 = 0.0;
        for t in interior_grid(0.0, self.tube.t_max, n) {
            let jump = ((self.tube.h_near(&self.eta, s1 + h, t)
                - self.tube.h_near(&self.eta, s1 - h, t))
                / (2.0 * h))
                .abs();
            if t < t_sine {
                jump_inside_sine_region = jump_inside_sine_region.max(jump);
            }
            jumps.push((t, jump));
            max_jump = max_jump.max(jump);
        }
        let threshold = (1e-3 * max_jump).max(1e-10);
        let mut t_lo = f64::INFINITY;
        let mut t_hi: f64 = 0.0;
        for &(t, jump) in &jumps {
            if jump > threshold {
                t_lo = t_lo.min(t);
                t_hi = t_hi.max(t);
            }
        }
        let theta_hi = if t_hi > 0.0 {
            crate::resolve::tube::coordinate_transfer(s1, t_hi)
                .map(|c| c.theta)
                .unwrap_or(0.0)
        } else {
            0.0
        };
        SeamReport {
            max_jump,
            threshold,
            band_t: (t_lo, t_hi),
            band_theta_hi: theta_hi,
            jump_inside_sine_region,
            tau: self.eta.tau(),
            tau_of_delta: self.eta.tau_of_delta(),
        }
    }
}

/// Location of the non-smooth seam band.
#[derive(Clone, Debug, Serialize)]
pub struct SeamReport {
    pub max_jump: f64,
    pub threshold: f64,
    pub band_t: (f64, f64),
    pub band_theta_hi: f64,
    pub jump_inside_sine_region: f64,
    pub tau: f64,
    pub tau_of_delta: f64,
}

impl SeamReport {
    /// The kinks live away from the arc, inside the support band of the
    /// smoothing family.
    pub fn localized(&self) -> bool {
        self.jump_inside_sine_region < 1e-10
            && self.band_t.0 > 0.0
            && (self.max_jump == 0.0 || self.band_theta_hi <= self.tau * 1.05)
    }
}

/// Axis-aligned rectangle in section coordinates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Rect {
    pub s0: f64,
    pub s1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Rect {
    pub fn contains(&self, s: f64, t: f64) -> bool {
        (self.s0..=self.s1).contains(&s) && (self.t0..=self.t1).contains(&t)
    }

    /// Distance from a point to the rectangle in chart coordinates.
    pub fn distance(&self, s: f64, t: f64) -> f64 {
        let ds = (self.s0 - s).max(0.0).max(s - self.s1);
        let dt = (self.t0 - t).max(0.0).max(t - self.t1);
        (ds * ds + dt * dt).sqrt()
    }

    pub fn grow(&self, pad: f64) -> Rect {
        Rect {
            s0: self.s0 - pad,
            s1: self.s1 + pad,
            t0: self.t0 - pad,
            t1: self.t1 + pad,
        }
    }
}

type Field = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Worst geodesic midpoint deficit of a field over a region: positive
/// values certify a concavity violation at the tested scale, negative
/// values a strict margin. The deficit is normalized by the squared step.
fn max_midpoint_deficit(
    field: &dyn Fn(f64, f64) -> f64,
    region: Rect,
    n: usize,
    step: f64,
    geometry: SectionGeometry,
) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let dirs = [
        (1.0, 0.0),
        (0.0, 1.0),
        (0.70710678118654752, 0.70710678118654752),
        (0.70710678118654752, -0.70710678118654752),
    ];
    for s in interior_grid(region.s0, region.s1, n) {
        for t in interior_grid(region.t0, region.t1, n) {
            for (ds, dt) in dirs {
                let a = (s - ds * step, t - dt * step);
                let b = (s + ds * step, t + dt * step);
                let m = geometry.midpoint(a, b);
                let deficit = field(a.0, a.1) + field(b.0, b.1) - 2.0 * field(m.0, m.1);
                worst = worst.max(deficit / (step * step));
            }
        }
    }
    worst
}

/// Convolution-smoothed blend: equals the mollified field near the kink set
/// and the original field outside its neighborhood, with the transition
/// driven by a smooth cutoff of the distance to the kink set.
#[derive(Clone)]
pub struct GreeneWuSmoothed {
    psi: Field,
    kink: Rect,
    /// Blend reach: smoothing is active within this distance of the kinks.
    eps: f64,
    /// Mollifier half-width.
    width: f64,
    geometry: SectionGeometry,
    /// Known kink line s = const; quadrature panels split there, since
    /// Gauss rules lose their accuracy on integrands with corners and the
    /// resulting error oscillates with the evaluation point.
    split_s: Option<f64>,
}

impl GreeneWuSmoothed {
    fn j(&self, s: f64, t: f64) -> f64 {
        let d = self.kink.distance(s, t);
        1.0 - smoothstep((d - self.eps / 2.0) / (self.eps / 2.0))
    }

    /// Tensor-product convolution with the compactly supported kernel.
    pub fn mollified(&self, s: f64, t: f64) -> f64 {
        let w = self.width;
        let psi = &self.psi;
        let inner = |a: f64| {
            gauss15_composite(&|b: f64| psi(s - a, t - b) * mollifier(b, w), -w, w, 2)
        };
        let outer = |a: f64| inner(a) * mollifier(a, w);
        match self.split_s {
            Some(line) => {
                let a_star = s - line;
                if a_star > -w && a_star < w {
                    gauss15_composite(&outer, -w, a_star, 2)
                        + gauss15_composite(&outer, a_star, w, 2)
                } else {
                    gauss15_composite(&outer, -w, w, 2)
                }
            }
            None => gauss15_composite(&outer, -w, w, 2),
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let j = self.j(s, t);
        if j == 0.0 {
            return (self.psi)(s, t);
        }
        j * self.mollified(s, t) + (1.0 - j) * (self.psi)(s, t)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Next member of the family: mollifier width halved.
    pub fn tighter(&self) -> Self {
        Self {
            psi: self.psi.clone(),
            kink: self.kink,
            eps: self.eps,
            width: self.width / 2.0,
            geometry: self.geometry,
            split_s: self.split_s,
        }
    }

    /// Worst geodesic midpoint deficit of the smoothed field; negative
    /// certifies concavity at the tested scale.
    pub fn max_second_difference(&self, region: Rect, n: usize, step: f64) -> f64 {
        max_midpoint_deficit(&|s, t| self.eval(s, t), region, n, step, self.geometry)
    }
}

/// Smooths a continuous, piecewise-smooth, concave field around its kink
/// set by compactly supported convolution blended back into the original.
///
/// The input must be concave along geodesics of the chosen geometry on the
/// padded kink region (geodesic midpoint test), otherwise the concavity of
/// the blend cannot be preserved and the call is refused.
pub fn greene_wu_smooth<F>(
    psi: F,
    kink: Rect,
    eps: f64,
    width: f64,
    geometry: SectionGeometry,
    split_s: Option<f64>,
) -> Result<GreeneWuSmoothed>
where
    F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
{
    if eps <= 0.0 || width <= 0.0 {
        return Err(Error::OutOfRange {
            name: "eps/width",
            value: eps.min(width),
            range: "(0, inf)",
        });
    }
    let region = kink.grow(eps + width);
    let step = width * 0.5;
    let worst = max_midpoint_deficit(&psi, region, 24, step, geometry);
    if worst >= 0.0 {
        return Err(Error::NotConcave { worst });
    }
    Ok(GreeneWuSmoothed {
        psi: Arc::new(psi),
        kink,
        eps,
        width,
        geometry,
        split_s,
    })
}
