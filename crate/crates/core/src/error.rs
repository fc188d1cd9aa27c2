//! Error types shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} is closer than {margin} to the chart boundary")]
    NearBoundary { point: Vec<f64>, margin: f64 },

    #[error("metric matrix is singular or not positive definite at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("plane section is degenerate (Gram determinant {det:.3e})")]
    DegeneratePlane { det: f64 },

    #[error("frame is not orthonormal (max Gram deviation {deviation:.3e})")]
    NonOrthonormalFrame { deviation: f64 },

    #[error("weights ({m_minus}, {m_plus}) are not coprime; the action is not effective")]
    NonCoprimeWeights { m_minus: u32, m_plus: u32 },

    #[error("weight {value} outside the valid range {range}")]
    InvalidWeight { value: f64, range: &'static str },

    #[error("parameter {name} = {value} outside the valid range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("base distance {value} exceeds pi; suspension and cone require diam <= pi")]
    BaseDistanceTooLarge { value: f64 },

    #[error("smoothing family infeasible for tau={tau}, delta={delta}: {detail}")]
    InfeasibleEta { tau: f64, delta: f64, detail: String },

    #[error("profile weight {got} does not match required resolution weight {want}")]
    WeightMismatch { got: f64, want: f64 },

    #[error("pieces disagree at seam {location}: gap {gap:.3e}")]
    SeamMismatch { location: String, gap: f64 },

    #[error("function is not concave on the smoothing region (max second difference {worst:.3e})")]
    NotConcave { worst: f64 },

    #[error("function is not convex on the mollification region (min second difference {worst:.3e})")]
    NotConvex { worst: f64 },

    #[error("metrics do not agree to first order on the interface (max deviation {deviation:.3e}, tolerance {tol:.3e})")]
    FirstOrderMismatch { deviation: f64, tol: f64 },

    #[error("metric depends on the angular coordinate (max variation {variation:.3e})")]
    NotCircleInvariant { variation: f64 },

    #[error("profile has sup R = {sup_r} >= 1; the tip distance {d} case is rigid (round sphere) and is handled by citation, not construction")]
    EmbeddingRigid { sup_r: f64, d: f64 },

    #[error("embedding radicand 1 - R^2 - R'^2 = {value:.3e} below tolerance at r = {r}")]
    NegativeRadicand { r: f64, value: f64 },

    #[error("killing length vanishes on the test region at {point:?}")]
    VanishingKillingLength { point: Vec<f64> },

    #[error("graph is disconnected: node {node} unreachable (grid too coarse)")]
    DisconnectedGraph { node: usize },

    #[error("correspondence does not cover both spaces ({missing} indices missing)")]
    NonCoveringCorrespondence { missing: usize },

    #[error("distance matrix invalid: {detail}")]
    InvalidDistanceMatrix { detail: String },

    #[error("{0}")]
    Invalid(String),
}
