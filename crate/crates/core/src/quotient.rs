//! Closed-form model geometries of the weighted circle quotient: the profile
//! of the quotient 2-sphere, spaces of directions with finite isotropy,
//! metric cones and spherical suspensions.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use crate::chart::{ChartMetric, Coord};
use crate::error::{Error, Result};
use crate::numerics::interior_grid;
use crate::profile::ProfileFunction;

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Validates a weight pair: both positive and coprime, otherwise the circle
/// action is not effective.
pub fn validate_weights(m_minus: u32, m_plus: u32) -> Result<()> {
    if m_minus == 0 || m_plus == 0 {
        return Err(Error::OutOfRange {
            name: "weights",
            value: 0.0,
            range: "integers >= 1",
        });
    }
    if gcd(m_minus, m_plus) != 1 {
        return Err(Error::NonCoprimeWeights { m_minus, m_plus });
    }
    Ok(())
}

/// Orbit-space profile of the weighted circle action on the round 3-sphere:
/// the quotient is a 2-sphere with metric dtheta^2 + R(theta)^2 dalpha^2 on
/// [0, pi/2], where
///
/// R(theta) = sin(theta) cos(theta) / sqrt(m+^2 sin^2 + m-^2 cos^2).
///
/// The endpoints are cone points of angle 2 pi / m and the sectional
/// curvature has the closed form of [`quotient_curvature`].
#[derive(Clone, Debug)]
pub struct WeightedQuotientProfile {
    pub m_minus: u32,
    pub m_plus: u32,
    profile: ProfileFunction,
}

fn normalizer_sq(a: f64, b: f64, theta: f64) -> f64 {
    let s = theta.sin();
    a + (b - a) * s * s
}

/// R(theta) for weights (m-, m+). Exactly zero at the representable
/// endpoint values 0 and pi/2.
pub fn quotient_profile(m_minus: u32, m_plus: u32, theta: f64) -> Result<f64> {
    validate_weights(m_minus, m_plus)?;
    if !(-0.5..=FRAC_PI_2 + 0.5).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, pi/2] (with a small evaluation pad)",
        });
    }
    Ok(profile_value(m_minus, m_plus, theta))
}

fn profile_value(m_minus: u32, m_plus: u32, theta: f64) -> f64 {
    if theta == 0.0 || theta == FRAC_PI_2 {
        return 0.0;
    }
    let a = (m_minus as f64).powi(2);
    let b = (m_plus as f64).powi(2);
    theta.sin() * theta.cos() / normalizer_sq(a, b, theta).sqrt()
}

fn profile_d1(a: f64, b: f64, theta: f64) -> f64 {
    let w = normalizer_sq(a, b, theta);
    let u = (2.0 * theta).sin();
    let v = (2.0 * theta).cos();
    v / w.sqrt() - (b - a) * u * u / (4.0 * w.powf(1.5))
}

fn profile_d2(a: f64, b: f64, theta: f64) -> f64 {
    let w = normalizer_sq(a, b, theta);
    let u = (2.0 * theta).sin();
    let v = (2.0 * theta).cos();
    let d = b - a;
    -2.0 * u / w.sqrt() - 1.5 * d * u * v / w.powf(1.5) + 0.375 * d * d * u * u * u / w.powf(2.5)
}

impl WeightedQuotientProfile {
    pub fn new(m_minus: u32, m_plus: u32) -> Result<Self> {
        validate_weights(m_minus, m_plus)?;
        let a = (m_minus as f64).powi(2);
        let b = (m_plus as f64).powi(2);
        let profile = ProfileFunction::from_fn((0.0, FRAC_PI_2), move |t| {
            profile_value(m_minus, m_plus, t)
        })
        .with_deriv(move |t| profile_d1(a, b, t))
        .with_deriv(move |t| profile_d2(a, b, t));
        Ok(Self {
            m_minus,
            m_plus,
            profile,
        })
    }

    pub fn profile(&self) -> &ProfileFunction {
        &self.profile
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.profile.eval(theta)
    }

    /// Closed-form sectional curvature, finite on the closed interval.
    pub fn sec(&self, theta: f64) -> f64 {
        curvature_value(self.m_minus, self.m_plus, theta)
    }

    /// Doubled profile 2R: the two-fold cover branched over both cone
    /// points, whose tips have slope 2/m instead of 1/m. Used with the
    /// branched-cover resolution weight 1 - 2/m.
    pub fn branched_double(&self) -> ProfileFunction {
        self.profile.scale(2.0)
    }
}

fn curvature_value(m_minus: u32, m_plus: u32, theta: f64) -> f64 {
    let a = (m_minus as f64).powi(2);
    let b = (m_plus as f64).powi(2);
    let w = normalizer_sq(a, b, theta);
    1.0 + 3.0 * a * b / (w * w)
}

/// Closed-form sectional curvature of the quotient profile metric at an
/// interior angle:
///
/// sec(theta) = 1 + 3 m-^2 m+^2 / (m-^2 cos^2 + m+^2 sin^2)^2.
///
/// The closed form is finite at the endpoints but the defining ratio
/// -R''/R is 0/0 there, so endpoint evaluation is rejected; use
/// [`WeightedQuotientProfile::sec`] for the closed-interval closed form.
pub fn quotient_curvature(m_minus: u32, m_plus: u32, theta: f64) -> Result<f64> {
    validate_weights(m_minus, m_plus)?;
    if theta <= 0.0 || theta >= FRAC_PI_2 {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "(0, pi/2) open: the ratio -R''/R is 0/0 at the tips",
        });
    }
    Ok(curvature_value(m_minus, m_plus, theta))
}

/// Positive excess a with sec >= 1 + a over the open interval, realized as
/// the grid minimum of the closed-form curvature minus one.
pub fn curvature_gap(m_minus: u32, m_plus: u32, grid_n: usize) -> Result<f64> {
    validate_weights(m_minus, m_plus)?;
    let gap = interior_grid(0.0, FRAC_PI_2, grid_n.max(16))
        .into_iter()
        .map(|t| curvature_value(m_minus, m_plus, t) - 1.0)
        .fold(f64::INFINITY, f64::min);
    Ok(gap)
}

/// Space of directions along an arc of isotropy Z_k: the spherical
/// suspension of a circle of perimeter 2 pi / k, as the chart metric
/// dr^2 + k^-2 sin^2(r) dtheta^2 on [0, pi] x [0, 2 pi].
pub fn zk_directions_metric(k: u32) -> Result<ChartMetric> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: 0.0,
            range: "integers >= 1",
        });
    }
    let kf = k as f64;
    let coords = vec![
        Coord::new("r", (0.0, PI)),
        Coord::periodic("theta", (0.0, 2.0 * PI)),
    ];
    Ok(ChartMetric::new(coords, move |p: &[f64]| {
        let w = p[0].sin() / kf;
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, w * w]))
    }))
}

/// Cone angle at the tip of the Z_k space of directions, estimated as the
/// limit of circumference over radius, Richardson-extrapolated in the
/// radius.
pub fn zk_tip_cone_angle(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: 0.0,
            range: "integers >= 1",
        });
    }
    let kf = k as f64;
    let circumference = |r: f64| 2.0 * PI * r.sin() / kf;
    let ratio = |r: f64| circumference(r) / r;
    let (r1, r2) = (1e-3, 5e-4);
    // ratio(r) = L - c r^2 + O(r^4): eliminate the quadratic term.
    Ok((4.0 * ratio(r2) - ratio(r1)) / 3.0)
}

/// Distance in the spherical suspension S(X):
/// cos d = cos t cos s + sin t sin s cos(d_X(x, y)).
pub fn suspension_distance(d_base: f64, t: f64, s: f64) -> Result<f64> {
    if d_base > PI + 1e-12 {
        return Err(Error::BaseDistanceTooLarge { value: d_base });
    }
    if !(0.0..=PI).contains(&t) || !(0.0..=PI).contains(&s) {
        return Err(Error::OutOfRange {
            name: "suspension parameter",
            value: if (0.0..=PI).contains(&t) { s } else { t },
            range: "[0, pi]",
        });
    }
    let c = t.cos() * s.cos() + t.sin() * s.sin() * d_base.cos();
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Distance in the metric cone C(X): the law of cosines
/// d = sqrt(t^2 + s^2 - 2 t s cos(d_X(x, y))).
pub fn cone_distance(d_base: f64, t: f64, s: f64) -> Result<f64> {
    if d_base > PI + 1e-12 {
        return Err(Error::BaseDistanceTooLarge { value: d_base });
    }
    if t < 0.0 || s < 0.0 {
        return Err(Error::OutOfRange {
            name: "cone radius",
            value: t.min(s),
            range: "[0, inf)",
        });
    }
    let sq = t * t + s * s - 2.0 * t * s * d_base.cos();
    Ok(sq.max(0.0).sqrt())
}

/// Ball at a suspension tip over a rotationally symmetric base profile:
/// the 3-chart dr^2 + sin^2 r (dtheta^2 + R(theta)^2 dalpha^2) on
/// (0, rho) x (0, pi/2) x (0, 2 pi).
pub fn ball_suspension_metric(base: &ProfileFunction, rho: f64) -> Result<ChartMetric> {
    if !(0.0..FRAC_PI_2).contains(&rho) || rho <= 0.0 {
        return Err(Error::OutOfRange {
            name: "rho",
            value: rho,
            range: "(0, pi/2)",
        });
    }
    let (lo, hi) = base.domain();
    let base = base.clone();
    let coords = vec![
        Coord::new("r", (0.0, rho)),
        Coord::new("theta", (lo, hi)),
        Coord::periodic("alpha", (0.0, 2.0 * PI)),
    ];
    Ok(ChartMetric::new(coords, move |p: &[f64]| {
        let sr = p[0].sin();
        let w = base.eval(p[1]);
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, sr * sr, sr * sr * w * w]))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuspensionKind {
    Cone,
    Suspension,
}

/// Suspension or cone over a discrete metric space; produces the distance
/// between two (point index, radius) pairs.
#[derive(Clone, Debug)]
pub struct SuspensionSpace {
    pub kind: SuspensionKind,
    base: crate::gh::DiscreteMetricSpace,
}

impl SuspensionSpace {
    pub fn new(kind: SuspensionKind, base: crate::gh::DiscreteMetricSpace) -> Result<Self> {
        let diam = base.diameter();
        if diam > PI + 1e-12 {
            return Err(Error::BaseDistanceTooLarge { value: diam });
        }
        Ok(Self { kind, base })
    }

    pub fn base(&self) -> &crate::gh::DiscreteMetricSpace {
        &self.base
    }

    pub fn distance(&self, x: usize, t: f64, y: usize, s: f64) -> Result<f64> {
        let d = self.base.distance(x, y);
        match self.kind {
            SuspensionKind::Cone => cone_distance(d, t, s),
            SuspensionKind::Suspension => suspension_distance(d, t, s),
        }
    }
}
