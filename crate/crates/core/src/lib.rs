//! Numerical toolkit for curvature-controlled smoothing of circle-quotient
//! metrics.
//!
//! The library builds the model geometries of a weighted circle action on the
//! round 3-sphere (quotient profiles, spaces of directions, cones and
//! spherical suspensions), resolves their conical singularities through an
//! explicit one-parameter smoothing family, glues and convolves the resulting
//! metrics while tracking sectional-curvature lower bounds, isometrically
//! embeds the smoothed profile spheres into the round 3-sphere, and measures
//! Gromov-Hausdorff distances between the singular models and their
//! resolutions.
//!
//! Every closed-form claim is checked against an independent finite-difference
//! curvature engine ([`curvature`]) that knows nothing about the formulas it
//! verifies.

pub mod bump;
pub mod chart;
pub mod curvature;
pub mod embedding;
pub mod error;
pub mod gh;
pub mod gluing;
pub mod numerics;
pub mod profile;
pub mod quotient;
pub mod report;
pub mod resolve;
pub mod tol;

pub use chart::{ChartMetric, Coord, PlaneSection};
pub use error::{Error, Result};
pub use profile::ProfileFunction;
