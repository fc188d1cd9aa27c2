//! The one-parameter smoothing family eta used to resolve conical tips.
//!
//! For a tip of cone angle 2 pi / m the resolution adds w sin(theta) near the
//! tip, w = 1 - 1/m (or 1 - 2/m for the branched-cover variant), and must die
//! off before the angle tau while keeping tight control of its first two
//! derivatives. The construction follows the recipe: a master function H with
//! H' = h built from three smooth pieces (a cosine cap, a bridge through zero
//! at tau/2, a negative lobe vanishing past tau, with total integral zero), a
//! scale n large enough that H/n is dominated by delta, a min with w sin
//! crossing once, and a smooth corner bridge at the crossing.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::Serialize;

use crate::bump::{bump, bump_d1, bump_mass, smoothstep, smoothstep_d1};
use crate::error::{Error, Result};
use crate::numerics::{bisect, gauss15_composite, interior_grid, CumulativeIntegral};
use crate::profile::ProfileFunction;
use crate::tol;

/// Parameters of the smoothing family.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SmoothingParams {
    /// Support angle: the perturbation vanishes past tau. Must lie in
    /// (0, pi/4).
    pub tau: f64,
    /// Uniform bound on the perturbation and its first two derivatives away
    /// from the tip.
    pub delta: f64,
    /// Tip slope deficit being repaired: 1 - 1/m for a quotient tip,
    /// 1 - 2/m for the branched cover. Zero selects the trivial family.
    pub weight: f64,
}

impl SmoothingParams {
    pub fn new(tau: f64, delta: f64, weight: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::FRAC_PI_4).contains(&tau) || tau <= 0.0 {
            return Err(Error::OutOfRange {
                name: "tau",
                value: tau,
                range: "(0, pi/4)",
            });
        }
        if delta <= 0.0 {
            return Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                range: "(0, inf)",
            });
        }
        if !(0.0..1.0).contains(&weight) {
            return Err(Error::InvalidWeight {
                value: weight,
                range: "[0, 1)",
            });
        }
        Ok(Self { tau, delta, weight })
    }

    /// Quotient weight 1 - 1/m.
    pub fn quotient_weight(m: u32) -> f64 {
        1.0 - 1.0 / m as f64
    }

    /// Branched-cover weight 1 - 2/m, requiring m >= 3.
    pub fn branched_weight(m: u32) -> Result<f64> {
        if m < 3 {
            return Err(Error::OutOfRange {
                name: "m",
                value: m as f64,
                range: "integers >= 3 for the branched cover",
            });
        }
        Ok(1.0 - 2.0 / m as f64)
    }
}

/// Shape of the master derivative h on [-eps, pi/2]:
/// h = cos(x + eps) q(x) - lambda G(x), where q falls smoothly from 1
/// through 0 at exactly tau/2 to -1 and back to 0 at tau, and G is a bump in
/// the negative lobe whose amplitude lambda makes the total integral vanish.
#[derive(Clone, Debug)]
struct HShape {
    tau: f64,
    eps: f64,
    lambda: f64,
    lobe_center: f64,
    lobe_halfwidth: f64,
}

impl HShape {
    fn new(tau: f64) -> Self {
        // eps >= tau/6 keeps the positive mass dominant, so lambda > 0;
        // pi/16 satisfies that for every tau < pi/4.
        let eps = PI / 16.0;
        let mut shape = Self {
            tau,
            eps,
            lambda: 0.0,
            lobe_center: 0.75 * tau,
            lobe_halfwidth: tau / 6.0,
        };
        let sh = shape.clone();
        let integrand = move |x: f64| (x + sh.eps).cos() * sh.q(x);
        let positive_mass = (tau / 3.0 + eps).sin()
            + gauss15_composite(&integrand, tau / 3.0, tau, 1024);
        shape.lambda = positive_mass;
        shape
    }

    /// Descent-and-lobe factor: 1 before tau/3, zero exactly at tau/2,
    /// -1 on the lobe plateau, back to 0 at tau with smooth contact.
    fn q(&self, x: f64) -> f64 {
        let tau = self.tau;
        if x <= tau / 3.0 {
            1.0
        } else if x < 2.0 * tau / 3.0 {
            // The step argument hits 1/2 exactly at tau/2, where the
            // symmetric smoothstep equals 1/2, so q crosses zero there.
            1.0 - 2.0 * smoothstep((x - tau / 3.0) * 3.0 / tau)
        } else if x < 5.0 * tau / 6.0 {
            -1.0
        } else if x < tau {
            -(1.0 - smoothstep((x - 5.0 * tau / 6.0) * 6.0 / tau))
        } else {
            0.0
        }
    }

    fn q_d1(&self, x: f64) -> f64 {
        let tau = self.tau;
        if x <= tau / 3.0 || x >= tau {
            0.0
        } else if x < 2.0 * tau / 3.0 {
            -2.0 * smoothstep_d1((x - tau / 3.0) * 3.0 / tau) * 3.0 / tau
        } else if x < 5.0 * tau / 6.0 {
            0.0
        } else {
            smoothstep_d1((x - 5.0 * tau / 6.0) * 6.0 / tau) * 6.0 / tau
        }
    }

    /// Normalized lobe bump with unit integral.
    fn g(&self, x: f64) -> f64 {
        let u = (x - self.lobe_center) / self.lobe_halfwidth;
        bump(u) / (self.lobe_halfwidth * bump_mass())
    }

    fn g_d1(&self, x: f64) -> f64 {
        let u = (x - self.lobe_center) / self.lobe_halfwidth;
        bump_d1(u) / (self.lobe_halfwidth * self.lobe_halfwidth * bump_mass())
    }

    fn h(&self, x: f64) -> f64 {
        if x >= self.tau {
            return 0.0;
        }
        (x + self.eps).cos() * self.q(x) - self.lambda * self.g(x)
    }

    fn h_d1(&self, x: f64) -> f64 {
        if x >= self.tau {
            return 0.0;
        }
        -(x + self.eps).sin() * self.q(x) + (x + self.eps).cos() * self.q_d1(x)
            - self.lambda * self.g_d1(x)
    }
}

/// Everything needed to evaluate eta and its first two derivatives.
struct EtaCore {
    params: SmoothingParams,
    /// Crossing of w sin with H/n.
    s_cross: f64,
    /// Half-width of the corner bridge.
    mu: f64,
    inv_n: f64,
    shape: HShape,
    /// Integral of h from tau/3, so H(x) = sin(tau/3 + eps) + h_cum(x).
    h_cum: CumulativeIntegral,
    h_base: f64,
    /// Integral of the bridge slope nu across the corner window.
    window_cum: CumulativeIntegral,
}

impl EtaCore {
    fn big_h(&self, x: f64) -> f64 {
        if x <= self.shape.tau / 3.0 {
            (x + self.shape.eps).sin()
        } else {
            self.h_base + self.h_cum.eval(x.min(self.shape.tau))
        }
    }

    /// Bridge slope across the corner window [s - mu, s + mu]: a smooth
    /// convex blend of the two one-sided slopes w cos and H'/n. The mass it
    /// carries differs from the replaced two-sided slope by O(mu^3), which
    /// the build rejects if it ever rises above rounding level.
    fn nu(&self, x: f64) -> f64 {
        let w = self.params.weight;
        let u = (x - (self.s_cross - self.mu)) / (2.0 * self.mu);
        let sv = smoothstep(u);
        (1.0 - sv) * w * x.cos() + sv * self.inv_n * self.shape.h(x)
    }

    fn nu_d1(&self, x: f64) -> f64 {
        let w = self.params.weight;
        let u = (x - (self.s_cross - self.mu)) / (2.0 * self.mu);
        let sv = smoothstep(u);
        let dv = smoothstep_d1(u) / (2.0 * self.mu);
        dv * (self.inv_n * self.shape.h(x) - w * x.cos())
            + (1.0 - sv) * (-w * x.sin())
            + sv * self.inv_n * self.shape.h_d1(x)
    }

    fn window_start(&self) -> f64 {
        self.s_cross - self.mu
    }

    fn window_end(&self) -> f64 {
        self.s_cross + self.mu
    }

    fn eval(&self, x: f64) -> f64 {
        let w = self.params.weight;
        if w == 0.0 {
            return 0.0;
        }
        if x < self.window_start() {
            w * x.sin()
        } else if x < self.window_end() {
            w * self.window_start().sin() + self.window_cum.eval(x)
        } else if x < self.shape.tau {
            self.inv_n * self.big_h(x)
        } else {
            0.0
        }
    }

    fn d1(&self, x: f64) -> f64 {
        let w = self.params.weight;
        if w == 0.0 {
            return 0.0;
        }
        if x < self.window_start() {
            w * x.cos()
        } else if x < self.window_end() {
            self.nu(x)
        } else if x < self.shape.tau {
            self.inv_n * self.shape.h(x)
        } else {
            0.0
        }
    }

    fn d2(&self, x: f64) -> f64 {
        let w = self.params.weight;
        if w == 0.0 {
            return 0.0;
        }
        if x < self.window_start() {
            -w * x.sin()
        } else if x < self.window_end() {
            self.nu_d1(x)
        } else if x < self.shape.tau {
            self.inv_n * self.shape.h_d1(x)
        } else {
            0.0
        }
    }
}

/// Per-property verification outcome. The margin is the slack against the
/// property's bound; positive means pass.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyMargin {
    pub name: String,
    pub worst: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub vacuous: bool,
}

impl PropertyMargin {
    fn below(name: &str, worst: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            worst,
            bound,
            margin: bound - worst,
            pass: worst <= bound,
            vacuous: false,
        }
    }

    fn strictly_above(name: &str, worst: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            worst,
            bound,
            margin: worst - bound,
            pass: worst > bound,
            vacuous: false,
        }
    }

    fn vacuous(name: &str, bound: f64) -> Self {
        Self {
            name: name.into(),
            worst: 0.0,
            bound,
            margin: bound,
            pass: true,
            vacuous: true,
        }
    }
}

/// Verification certificate over a grid.
#[derive(Clone, Debug, Serialize)]
pub struct EtaCertificate {
    pub params: SmoothingParams,
    pub tau_of_delta: f64,
    pub grid_n: usize,
    pub properties: Vec<PropertyMargin>,
    pub all_pass: bool,
}

/// A member of the smoothing family with its verification certificate.
#[derive(Clone)]
pub struct EtaFunction {
    core: Arc<EtaCore>,
    tau_of_delta: f64,
    certificate: EtaCertificate,
}

impl std::fmt::Debug for EtaFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EtaFunction")
            .field("params", &self.core.params)
            .field("tau_of_delta", &self.tau_of_delta)
            .field("all_pass", &self.certificate.all_pass)
            .finish()
    }
}

impl EtaFunction {
    pub fn params(&self) -> SmoothingParams {
        self.core.params
    }

    pub fn weight(&self) -> f64 {
        self.core.params.weight
    }

    pub fn tau(&self) -> f64 {
        self.core.params.tau
    }

    pub fn delta(&self) -> f64 {
        self.core.params.delta
    }

    /// Inner radius on which eta equals w sin exactly.
    pub fn tau_of_delta(&self) -> f64 {
        self.tau_of_delta
    }

    pub fn certificate(&self) -> &EtaCertificate {
        &self.certificate
    }

    pub fn is_zero(&self) -> bool {
        self.core.params.weight == 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.core.eval(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.core.d1(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.core.d2(x)
    }

    /// The family member as a profile on [0, pi/2] with two closed-form
    /// derivative levels.
    pub fn profile(&self) -> ProfileFunction {
        let c1 = self.core.clone();
        let c2 = self.core.clone();
        let c3 = self.core.clone();
        ProfileFunction::from_fn((0.0, FRAC_PI_2), move |x| c1.eval(x))
            .with_deriv(move |x| c2.d1(x))
            .with_deriv(move |x| c3.d2(x))
    }

    /// The trivial family member for weight zero (an already-smooth tip);
    /// slope and curvature conditions are vacuous.
    pub fn zero(tau: f64, delta: f64) -> Result<Self> {
        let params = SmoothingParams::new(tau, delta, 0.0)?;
        let shape = HShape::new(tau);
        let h2 = shape.clone();
        let core = Arc::new(EtaCore {
            params,
            s_cross: tau / 6.0,
            mu: tau / 60.0,
            inv_n: 0.0,
            h_cum: CumulativeIntegral::new(move |x| h2.h(x), tau / 3.0, tau, 64),
            h_base: (tau / 3.0 + shape.eps).sin(),
            window_cum: CumulativeIntegral::new(|_| 0.0, 0.0, 1.0, 16),
            shape,
        });
        let certificate = EtaCertificate {
            params,
            tau_of_delta: tau / 6.0,
            grid_n: 0,
            properties: vec![
                PropertyMargin::vacuous("exact_sine_near_tip", tol::EXACT_CONSTRUCTION),
                PropertyMargin::vacuous("increasing_before_half_tau", 0.0),
                PropertyMargin::vacuous("nonincreasing_after_half_tau", tol::EXACT_CONSTRUCTION),
                PropertyMargin::vacuous("vanishes_past_tau", tol::EXACT_CONSTRUCTION),
                PropertyMargin::vacuous("log_concavity_ratio", tol::RATIO_SLACK),
                PropertyMargin::vacuous("uniform_smallness", delta),
                PropertyMargin::vacuous("range", delta),
            ],
            all_pass: true,
        };
        Ok(Self {
            core,
            tau_of_delta: tau / 6.0,
            certificate,
        })
    }
}

/// Builds a family member for the given parameters, retrying with a larger
/// master scale and a narrower corner window until the certificate passes.
/// Fails explicitly when no attempt certifies.
pub fn build_eta(params: SmoothingParams) -> Result<EtaFunction> {
    if params.weight == 0.0 {
        return EtaFunction::zero(params.tau, params.delta);
    }
    let mut last_detail = String::new();
    for n_boost in [1.0, 2.0, 4.0, 8.0] {
        for mu_shrink in [1.0, 0.5, 0.25] {
            match try_build(params, n_boost, mu_shrink) {
                Ok(eta) => {
                    if eta.certificate.all_pass {
                        return Ok(eta);
                    }
                    let failing: Vec<String> = eta
                        .certificate
                        .properties
                        .iter()
                        .filter(|p| !p.pass)
                        .map(|p| format!("{} (margin {:.3e})", p.name, p.margin))
                        .collect();
                    last_detail = format!(
                        "certificate failed at n_boost={n_boost}, mu_shrink={mu_shrink}: {}",
                        failing.join(", ")
                    );
                }
                Err(e) => {
                    last_detail = format!("{e}");
                }
            }
        }
    }
    Err(Error::InfeasibleEta {
        tau: params.tau,
        delta: params.delta,
        detail: last_detail,
    })
}

fn try_build(params: SmoothingParams, n_boost: f64, mu_shrink: f64) -> Result<EtaFunction> {
    let tau = params.tau;
    let w = params.weight;
    let shape = HShape::new(tau);
    let h2 = shape.clone();
    let h_cum = CumulativeIntegral::new(move |x| h2.h(x), tau / 3.0, tau, 2048);
    let h_base = (tau / 3.0 + shape.eps).sin();
    let big_h = |x: f64| {
        if x <= tau / 3.0 {
            (x + shape.eps).sin()
        } else {
            h_base + h_cum.eval(x.min(tau))
        }
    };

    // Scale selection: uniform smallness with margin, crossing existence,
    // crossing uniqueness, and the min staying on the master branch past
    // the crossing.
    let grid = interior_grid(tau / 3.0, tau, 2048);
    let vi_sup = grid
        .iter()
        .map(|&x| big_h(x).abs() + shape.h(x).abs() + shape.h_d1(x).abs())
        .fold(0.0, f64::max);
    let h_max = grid.iter().map(|&x| big_h(x)).fold(big_h(tau / 3.0), f64::max);
    let n_smallness = vi_sup / (0.8 * params.delta);
    let n_crossing = 1.25 * (tau / 3.0 + shape.eps).sin() / (w * (tau / 3.0).sin());
    let n_unique = 1.25 / (w * (tau / 3.0).cos());
    let n_branch = 1.25 * h_max / (w * (tau / 3.0).sin());
    let n = (n_smallness.max(n_crossing).max(n_unique).max(n_branch) * n_boost).ceil();
    let inv_n = 1.0 / n;

    // Locate the single crossing of w sin with H/n inside (0, tau/3).
    let gap = |x: f64| w * x.sin() - inv_n * big_h(x);
    let fine = interior_grid(0.0, tau / 3.0, 4096);
    let mut crossings = 0;
    let mut bracket = None;
    let mut prev = gap(1e-15);
    let mut prev_x = 1e-15;
    for &x in fine.iter().chain(std::iter::once(&(tau / 3.0))) {
        let g = gap(x);
        if prev < 0.0 && g >= 0.0 {
            crossings += 1;
            bracket = Some((prev_x, x));
        }
        prev = g;
        prev_x = x;
    }
    if crossings != 1 {
        return Err(Error::InfeasibleEta {
            tau,
            delta: params.delta,
            detail: format!("expected one crossing in (0, tau/3), found {crossings} at scale {n}"),
        });
    }
    let (lo, hi) = bracket.unwrap();
    let s_cross = bisect(&gap, lo, hi, 100).ok_or_else(|| Error::InfeasibleEta {
        tau,
        delta: params.delta,
        detail: "bisection lost the crossing bracket".into(),
    })?;

    let mu = (s_cross.min(tau / 3.0 - s_cross) / 10.0) * mu_shrink;
    if mu <= 0.0 {
        return Err(Error::InfeasibleEta {
            tau,
            delta: params.delta,
            detail: format!("degenerate corner window at crossing {s_cross}"),
        });
    }

    // Window cumulative for values of eta across the corner.
    let nu_closure = {
        let shape = shape.clone();
        move |x: f64| {
            let u = (x - (s_cross - mu)) / (2.0 * mu);
            let sv = smoothstep(u);
            (1.0 - sv) * w * x.cos() + sv * inv_n * shape.h(x)
        }
    };
    let window_cum = CumulativeIntegral::new(nu_closure, s_cross - mu, s_cross + mu, 256);

    let core = Arc::new(EtaCore {
        params,
        s_cross,
        mu,
        inv_n,
        shape: shape.clone(),
        h_cum,
        h_base,
        window_cum,
    });

    // Piece seam diagnostics: the corner bridge must rejoin the master
    // branch at the window end up to rounding.
    let seam = (core.params.weight * (s_cross - mu).sin() + core.window_cum.eval(s_cross + mu)
        - inv_n * core.big_h(s_cross + mu))
        .abs();
    if seam > 1e-13 {
        return Err(Error::InfeasibleEta {
            tau,
            delta: params.delta,
            detail: format!("corner bridge does not rejoin the master branch (gap {seam:.3e})"),
        });
    }

    let tau_of_delta = s_cross - mu;
    let mut eta = EtaFunction {
        core,
        tau_of_delta,
        certificate: EtaCertificate {
            params,
            tau_of_delta,
            grid_n: 0,
            properties: Vec::new(),
            all_pass: false,
        },
    };
    eta.certificate = verify_eta(&eta, 4096);
    Ok(eta)
}

/// Verifies the defining properties of a family member on a grid and
/// reports per-property worst cases and margins.
pub fn verify_eta(eta: &EtaFunction, grid_n: usize) -> EtaCertificate {
    let params = eta.params();
    let (tau, delta, w) = (params.tau, params.delta, params.weight);
    if w == 0.0 {
        return eta.certificate.clone();
    }
    let tau_d = eta.tau_of_delta();

    // (i) exact sine up to tau(delta).
    let worst_i = interior_grid(0.0, tau_d, 256)
        .into_iter()
        .chain(std::iter::once(tau_d))
        .map(|x| (eta.eval(x) - w * x.sin()).abs())
        .fold(0.0, f64::max);

    // (ii) strictly increasing before tau/2.
    let worst_ii = interior_grid(0.0, tau / 2.0, grid_n)
        .into_iter()
        .map(|x| eta.d1(x))
        .fold(f64::INFINITY, f64::min);

    // (iii) nonincreasing from tau/2 on.
    let worst_iii = interior_grid(tau / 2.0, FRAC_PI_2, grid_n)
        .into_iter()
        .chain(std::iter::once(tau / 2.0))
        .map(|x| eta.d1(x))
        .fold(f64::NEG_INFINITY, f64::max);

    // (iv) vanishes past tau.
    let worst_iv = interior_grid(tau, FRAC_PI_2, grid_n)
        .into_iter()
        .chain([tau, FRAC_PI_2])
        .map(|x| eta.eval(x).abs())
        .fold(0.0, f64::max);

    // (v) second derivative dominated: eta''/eta <= -1 on (0, tau/2].
    let worst_v = interior_grid(0.0, tau / 2.0, grid_n)
        .into_iter()
        .chain(std::iter::once(tau / 2.0))
        .filter(|&x| eta.eval(x) > 1e-300)
        .map(|x| eta.d2(x) / eta.eval(x) + 1.0)
        .fold(f64::NEG_INFINITY, f64::max);

    // (vi) uniform smallness of value and two derivatives past tau/3.
    let worst_vi = interior_grid(tau / 3.0, FRAC_PI_2, grid_n)
        .into_iter()
        .chain([tau / 3.0, FRAC_PI_2])
        .map(|x| eta.eval(x).abs() + eta.d1(x).abs() + eta.d2(x).abs())
        .fold(0.0, f64::max);

    // Global range 0 <= eta <= delta.
    let full: Vec<f64> = interior_grid(0.0, FRAC_PI_2, grid_n);
    let min_eta = full.iter().map(|&x| eta.eval(x)).fold(f64::INFINITY, f64::min);
    let max_eta = full.iter().map(|&x| eta.eval(x)).fold(0.0, f64::max);
    let range_worst = (-min_eta).max(max_eta - delta);

    let properties = vec![
        PropertyMargin::below("exact_sine_near_tip", worst_i, tol::EXACT_CONSTRUCTION),
        PropertyMargin::strictly_above("increasing_before_half_tau", worst_ii, 0.0),
        PropertyMargin::below("nonincreasing_after_half_tau", worst_iii, tol::EXACT_CONSTRUCTION),
        PropertyMargin::below("vanishes_past_tau", worst_iv, tol::EXACT_CONSTRUCTION),
        PropertyMargin::below("log_concavity_ratio", worst_v, tol::RATIO_SLACK),
        PropertyMargin::below("uniform_smallness", worst_vi, delta),
        PropertyMargin::below("range", range_worst, tol::EXACT_CONSTRUCTION),
    ];
    let all_pass = properties.iter().all(|p| p.pass)
        // Strict inequality demanded of (ii) and (vi).
        && worst_ii > 0.0
        && worst_vi < delta;
    EtaCertificate {
        params,
        tau_of_delta: eta.tau_of_delta(),
        grid_n,
        properties,
        all_pass,
    }
}

/// Verifies an arbitrary candidate profile against the family properties;
/// used for negative controls where the candidate is not from [`build_eta`].
pub fn verify_candidate(
    candidate: &ProfileFunction,
    params: SmoothingParams,
    inner_radius: f64,
    grid_n: usize,
) -> Vec<PropertyMargin> {
    let (tau, delta, w) = (params.tau, params.delta, params.weight);
    let worst_i = interior_grid(0.0, inner_radius, 128)
        .into_iter()
        .map(|x| (candidate.eval(x) - w * x.sin()).abs())
        .fold(0.0, f64::max);
    let worst_ii = interior_grid(0.0, tau / 2.0, grid_n)
        .into_iter()
        .map(|x| candidate.deriv(x, 1))
        .fold(f64::INFINITY, f64::min);
    let worst_iii = interior_grid(tau / 2.0, FRAC_PI_2, grid_n)
        .into_iter()
        .map(|x| candidate.deriv(x, 1))
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_iv = interior_grid(tau, FRAC_PI_2, grid_n)
        .into_iter()
        .map(|x| candidate.eval(x).abs())
        .fold(0.0, f64::max);
    let worst_v = interior_grid(0.0, tau / 2.0, grid_n)
        .into_iter()
        .filter(|&x| candidate.eval(x).abs() > 1e-12)
        .map(|x| candidate.deriv(x, 2) / candidate.eval(x) + 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_vi = interior_grid(tau / 3.0, FRAC_PI_2, grid_n)
        .into_iter()
        .map(|x| {
            candidate.eval(x).abs() + candidate.deriv(x, 1).abs() + candidate.deriv(x, 2).abs()
        })
        .fold(0.0, f64::max);
    vec![
        PropertyMargin::below("exact_sine_near_tip", worst_i, tol::EXACT_CONSTRUCTION),
        PropertyMargin::strictly_above("increasing_before_half_tau", worst_ii, 0.0),
        PropertyMargin::below("nonincreasing_after_half_tau", worst_iii, tol::EXACT_CONSTRUCTION),
        PropertyMargin::below("vanishes_past_tau", worst_iv, tol::EXACT_CONSTRUCTION),
        PropertyMargin::below("log_concavity_ratio", worst_v, tol::RATIO_SLACK),
        PropertyMargin::below("uniform_smallness", worst_vi, delta),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(tau: f64, delta: f64, m: u32) -> SmoothingParams {
        SmoothingParams::new(tau, delta, SmoothingParams::quotient_weight(m)).unwrap()
    }

    #[test]
    fn build_eta_certifies_parameter_table() {
        for &tau in &[0.1, 0.2, 0.3] {
            for &delta in &[1e-1, 1e-2, 1e-3] {
                let eta = build_eta(params(tau, delta, 2)).unwrap();
                assert!(
                    eta.certificate().all_pass,
                    "tau={tau}, delta={delta}: {:?}",
                    eta.certificate()
                );
                assert!(eta.tau_of_delta() > 0.0 && eta.tau_of_delta() < tau / 3.0);
            }
        }
    }

    #[test]
    fn eta_is_exact_sine_near_tip_and_zero_past_tau() {
        let eta = build_eta(params(0.3, 1e-2, 3)).unwrap();
        let w = eta.weight();
        for x in interior_grid(0.0, eta.tau_of_delta(), 50) {
            assert_eq!(eta.eval(x), w * x.sin());
        }
        for x in interior_grid(0.3, FRAC_PI_2, 50) {
            assert_eq!(eta.eval(x), 0.0);
            assert_eq!(eta.d1(x), 0.0);
        }
    }

    #[test]
    fn eta_derivatives_match_finite_differences() {
        let eta = build_eta(params(0.25, 1e-2, 2)).unwrap();
        let p = eta.profile();
        let pts: Vec<f64> = interior_grid(1e-3, 0.35, 60);
        let worst = p.check_derivative_consistency(&pts, 1e-6);
        assert!(worst < 1e-6, "worst = {worst:.3e}");
    }

    #[test]
    fn smallness_bound_scales_with_delta() {
        for &delta in &[1e-1, 1e-2, 1e-3] {
            let eta = build_eta(params(0.2, delta, 2)).unwrap();
            let worst = interior_grid(0.2 / 3.0, FRAC_PI_2, 2000)
                .into_iter()
                .map(|x| eta.eval(x).abs() + eta.d1(x).abs() + eta.d2(x).abs())
                .fold(0.0, f64::max);
            assert!(worst < delta, "delta={delta}: worst={worst:.3e}");
        }
    }

    #[test]
    fn plain_sine_candidate_fails_support_properties() {
        let p = params(0.3, 1e-2, 2);
        let w = p.weight;
        let sine = ProfileFunction::from_fn((0.0, FRAC_PI_2), move |x| w * x.sin())
            .with_deriv(move |x| w * x.cos())
            .with_deriv(move |x| -w * x.sin());
        let report = verify_candidate(&sine, p, 0.05, 512);
        let by_name = |n: &str| report.iter().find(|m| m.name == n).unwrap();
        assert!(!by_name("nonincreasing_after_half_tau").pass);
        assert!(!by_name("vanishes_past_tau").pass);
        assert!(!by_name("uniform_smallness").pass);
        assert!(by_name("exact_sine_near_tip").pass);
    }

    #[test]
    fn zero_candidate_fails_slope_properties() {
        let p = params(0.3, 1e-2, 2);
        let zero = ProfileFunction::constant((0.0, FRAC_PI_2), 0.0);
        let report = verify_candidate(&zero, p, 0.05, 512);
        let by_name = |n: &str| report.iter().find(|m| m.name == n).unwrap();
        assert!(!by_name("exact_sine_near_tip").pass);
        assert!(!by_name("increasing_before_half_tau").pass);
        assert!(by_name("nonincreasing_after_half_tau").pass);
        assert!(by_name("vanishes_past_tau").pass);
        assert!(by_name("uniform_smallness").pass);
    }

    #[test]
    fn zero_weight_family_is_trivial() {
        let eta = EtaFunction::zero(0.3, 1e-2).unwrap();
        assert!(eta.is_zero());
        assert!(eta.certificate().all_pass);
        assert_eq!(eta.eval(0.1), 0.0);
        assert_eq!(eta.d2(0.1), 0.0);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(SmoothingParams::new(0.0, 1e-2, 0.5).is_err());
        assert!(SmoothingParams::new(0.8, 1e-2, 0.5).is_err());
        assert!(SmoothingParams::new(0.3, 0.0, 0.5).is_err());
        assert!(SmoothingParams::new(0.3, 1e-2, 1.0).is_err());
        assert!(SmoothingParams::branched_weight(2).is_err());
        assert!((SmoothingParams::branched_weight(3).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }
}
