//! Centralized numerical tolerances.
//!
//! Every threshold used by the verification routines lives here together with
//! a short note on where it comes from. Finite-difference accuracy targets are
//! engineering choices balancing truncation against cancellation at double
//! precision; they are not claims inherited from the geometry.

/// Default finite-difference step for chart-metric derivatives, in chart
/// units. Second-order central differences at this step keep both truncation
/// and rounding near 1e-8 for smooth coefficients.
pub const H_FD: f64 = 1e-4;

/// Maximal violation of the Riemann index symmetries for metrics with
/// closed-form coefficient functions.
pub const SYM_ANALYTIC: f64 = 1e-6;

/// Maximal violation of the Riemann index symmetries for metrics whose
/// coefficients are sampled or interpolated.
pub const SYM_SAMPLED: f64 = 1e-3;

/// Agreement between the finite-difference curvature engine and closed-form
/// curvature expressions evaluated with analytic derivatives.
pub const ORACLE: f64 = 1e-4;

/// Agreement between the two warped-product curvature routes
/// (profile second derivative vs. full chart oracle).
pub const WARPED_AGREE: f64 = 1e-5;

/// First-order metric agreement required of blend inputs when both carry
/// closed-form coefficients.
pub const MATCH_CLOSED: f64 = 1e-8;

/// First-order metric agreement required of blend inputs when a side is
/// sampled.
pub const MATCH_SAMPLED: f64 = 1e-4;

/// Pullback-isometry residual for the embedding ODE at the default step.
pub const ODE: f64 = 1e-8;

/// Seam continuity for piecewise profiles built from shared closed forms.
pub const SEAM: f64 = 1e-12;

/// Slack granted to properties that hold exactly by construction; absorbs
/// quadrature residue and rounding.
pub const EXACT_CONSTRUCTION: f64 = 1e-13;

/// Ratio-type inequalities that attain equality on part of the domain.
pub const RATIO_SLACK: f64 = 1e-12;

/// Triangle-inequality slack for discrete metric spaces.
pub const TRIANGLE: f64 = 1e-9;

/// Closed-form endpoint derivatives of the quotient profile.
pub const ENDPOINT_DERIV: f64 = 1e-10;

/// Numerical even-order derivatives at a smooth tip.
pub const EVEN_DERIV: f64 = 1e-6;

/// Curvature of the closed-form profile against its own second derivative.
pub const PROFILE_CURV: f64 = 1e-8;
