//! Coordinate-chart metrics: symmetric positive-definite coefficient fields
//! over rectangular charts in two or three coordinates.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::profile::ProfileFunction;
use crate::tol;

type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A named coordinate with its rectangular range. Periodic coordinates
/// (angles) have no boundary for the purposes of interior checks.
#[derive(Clone, Debug)]
pub struct Coord {
    pub name: String,
    pub range: (f64, f64),
    pub periodic: bool,
}

impl Coord {
    pub fn new(name: &str, range: (f64, f64)) -> Self {
        Self {
            name: name.to_string(),
            range,
            periodic: false,
        }
    }

    pub fn periodic(name: &str, range: (f64, f64)) -> Self {
        Self {
            name: name.to_string(),
            range,
            periodic: true,
        }
    }
}

/// Metric coefficient field g_ij over a rectangular chart.
#[derive(Clone)]
pub struct ChartMetric {
    coords: Vec<Coord>,
    g: MetricFn,
    h_fd: f64,
}

impl ChartMetric {
    pub fn new<F>(coords: Vec<Coord>, g: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        assert!(
            coords.len() == 2 || coords.len() == 3,
            "charts are 2- or 3-dimensional"
        );
        Self {
            coords,
            g: Arc::new(g),
            h_fd: tol::H_FD,
        }
    }

    pub fn with_h_fd(mut self, h: f64) -> Self {
        self.h_fd = h;
        self
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn h_fd(&self) -> f64 {
        self.h_fd
    }

    pub fn at(&self, point: &[f64]) -> DMatrix<f64> {
        (self.g)(point)
    }

    /// Euclidean chart of the given dimension on [-1, 1]^dim.
    pub fn euclidean(dim: usize) -> Self {
        let coords = (0..dim)
            .map(|i| Coord::new(&format!("x{i}"), (-1.0, 1.0)))
            .collect();
        ChartMetric::new(coords, move |_: &[f64]| DMatrix::identity(dim, dim))
    }

    /// Two-dimensional warped product dr^2 + f(r)^2 dphi^2.
    pub fn warped2d(f: ProfileFunction, r_name: &str, phi_name: &str) -> Self {
        let domain = f.domain();
        let coords = vec![
            Coord::new(r_name, domain),
            Coord::periodic(phi_name, (0.0, 2.0 * std::f64::consts::PI)),
        ];
        ChartMetric::new(coords, move |p: &[f64]| {
            let w = f.eval(p[0]);
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, w * w]))
        })
    }

    /// Doubly warped 3-chart f(s,t)^2 ds^2 + dt^2 + p(s,t)^2 dphi^2 with a
    /// periodic last coordinate.
    pub fn doubly_warped<F, P>(
        s_range: (f64, f64),
        t_range: (f64, f64),
        f: F,
        p: P,
    ) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        P: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let coords = vec![
            Coord::new("s", s_range),
            Coord::new("t", t_range),
            Coord::periodic("phi", (0.0, 2.0 * std::f64::consts::PI)),
        ];
        ChartMetric::new(coords, move |q: &[f64]| {
            let fv = f(q[0], q[1]);
            let pv = p(q[0], q[1]);
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![fv * fv, 1.0, pv * pv]))
        })
    }

    /// Checks that the point lies at least `margin` inside every
    /// non-periodic coordinate range.
    pub fn require_interior(&self, point: &[f64], margin: f64) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::Invalid(format!(
                "point dimension {} does not match chart dimension {}",
                point.len(),
                self.dim()
            )));
        }
        for (x, c) in point.iter().zip(self.coords.iter()) {
            if c.periodic {
                continue;
            }
            if *x < c.range.0 + margin || *x > c.range.1 - margin {
                return Err(Error::NearBoundary {
                    point: point.to_vec(),
                    margin,
                });
            }
        }
        Ok(())
    }

    /// Inverse metric at a point.
    pub fn inverse_at(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        self.at(point).try_inverse().ok_or(Error::SingularMetric {
            point: point.to_vec(),
        })
    }

    /// Validates symmetry and positive definiteness on a uniform interior
    /// grid; returns the smallest eigenvalue seen.
    pub fn validate_on_grid(&self, n: usize) -> Result<f64> {
        let mut min_eig = f64::INFINITY;
        for point in self.interior_grid(n) {
            let g = self.at(&point);
            let asym = (&g - g.transpose()).abs().max();
            if asym > 1e-12 {
                return Err(Error::Invalid(format!(
                    "metric not symmetric at {point:?} (deviation {asym:.3e})"
                )));
            }
            let eig = g.symmetric_eigenvalues();
            let lo = eig.min();
            if lo <= 0.0 {
                return Err(Error::SingularMetric { point });
            }
            min_eig = min_eig.min(lo);
        }
        Ok(min_eig)
    }

    /// Uniform grid of points strictly inside the chart (n per axis).
    pub fn interior_grid(&self, n: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .coords
            .iter()
            .map(|c| crate::numerics::interior_grid(c.range.0, c.range.1, n))
            .collect();
        let mut points = vec![Vec::new()];
        for axis in &axes {
            let mut next = Vec::with_capacity(points.len() * axis.len());
            for p in &points {
                for &x in axis {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
            points = next;
        }
        points
    }
}

impl std::fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = self.coords.iter().map(|c| c.name.as_str()).collect();
        f.debug_struct("ChartMetric")
            .field("coords", &names)
            .field("h_fd", &self.h_fd)
            .finish()
    }
}

/// A tangent 2-plane at a chart point, spanned by two coordinate vectors.
#[derive(Clone, Debug)]
pub struct PlaneSection {
    pub point: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl PlaneSection {
    pub fn new(point: Vec<f64>, u: Vec<f64>, v: Vec<f64>) -> Self {
        Self { point, u, v }
    }

    /// Plane spanned by the i-th and j-th coordinate directions.
    pub fn coordinate(point: Vec<f64>, i: usize, j: usize) -> Self {
        let dim = point.len();
        let mut u = vec![0.0; dim];
        let mut v = vec![0.0; dim];
        u[i] = 1.0;
        v[j] = 1.0;
        Self { point, u, v }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_chart_is_identity() {
        let e = ChartMetric::euclidean(3);
        let g = e.at(&[0.1, 0.2, 0.3]);
        assert_eq!(g, DMatrix::identity(3, 3));
    }

    #[test]
    fn interior_check_respects_periodicity() {
        let m = ChartMetric::warped2d(ProfileFunction::sin(), "r", "phi");
        // Radial coordinate near the boundary fails, the angle never does.
        assert!(m.require_interior(&[1e-6, 0.0], 1e-3).is_err());
        assert!(m.require_interior(&[1.0, 1e-9], 1e-3).is_ok());
    }

    #[test]
    fn sphere_chart_validates() {
        let m = ChartMetric::warped2d(ProfileFunction::sin(), "r", "theta");
        let min_eig = m.validate_on_grid(9).unwrap();
        assert!(min_eig > 0.0);
    }

    #[test]
    fn degenerate_metric_rejected() {
        let coords = vec![Coord::new("x", (-1.0, 1.0)), Coord::new("y", (-1.0, 1.0))];
        let m = ChartMetric::new(coords, |p: &[f64]| {
            DMatrix::from_row_slice(2, 2, &[p[0], 0.0, 0.0, 1.0])
        });
        assert!(m.validate_on_grid(5).is_err());
    }
}
