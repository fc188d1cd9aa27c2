//! Finite-difference curvature engine on coordinate charts.
//!
//! This is the independent oracle: it only ever sees metric coefficient
//! values, never the closed forms behind them. Christoffel symbols use
//! second-order central differences of the coefficients, the curvature
//! tensor uses central differences of the Christoffel symbols, and
//! everything downstream (sectional curvatures, curvature operators,
//! Hessians) is assembled from those.
//!
//! Sign convention: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z -
//! nabla_[X,Y] Z and R_ijkl = g(R(e_i,e_j) e_k, e_l), so the round sphere
//! has sectional curvature +1. `self_test` pins this at startup.

use nalgebra::DMatrix;

use crate::chart::{ChartMetric, PlaneSection};
use crate::error::{Error, Result};
use crate::profile::ProfileFunction;

const MAXD: usize = 3;

/// Christoffel symbols Gamma^k_ij at a point, k first index.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub dim: usize,
    data: [[[f64; MAXD]; MAXD]; MAXD],
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[k][i][j]
    }
}

/// Covariant curvature tensor R_ijkl at a point.
#[derive(Clone, Debug)]
pub struct Riemann {
    pub dim: usize,
    data: [[[[f64; MAXD]; MAXD]; MAXD]; MAXD],
}

impl Riemann {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[i][j][k][l]
    }

    /// Largest violation of the four index symmetries
    /// R_ijkl = -R_jikl = -R_ijlk = R_klij.
    pub fn symmetry_violation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst.max((r + self.get(j, i, k, l)).abs());
                        worst = worst.max((r + self.get(i, j, l, k)).abs());
                        worst = worst.max((r - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// R(u, v, v, u), the numerator of the sectional curvature.
    pub fn quadratic(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        acc += self.get(i, j, k, l) * u[i] * v[j] * v[k] * u[l];
                    }
                }
            }
        }
        acc
    }
}

fn metric_partials(metric: &ChartMetric, point: &[f64]) -> Vec<DMatrix<f64>> {
    let h = metric.h_fd();
    let n = metric.dim();
    (0..n)
        .map(|i| {
            let mut pp = point.to_vec();
            let mut pm = point.to_vec();
            pp[i] += h;
            pm[i] -= h;
            (metric.at(&pp) - metric.at(&pm)) / (2.0 * h)
        })
        .collect()
}

/// Christoffel symbols by the coordinate formula
/// Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij).
pub fn christoffel(metric: &ChartMetric, point: &[f64]) -> Result<Christoffel> {
    metric.require_interior(point, 2.0 * metric.h_fd())?;
    christoffel_unchecked(metric, point)
}

fn christoffel_unchecked(metric: &ChartMetric, point: &[f64]) -> Result<Christoffel> {
    let n = metric.dim();
    let ginv = metric.inverse_at(point)?;
    let dg = metric_partials(metric, point);
    let mut data = [[[0.0; MAXD]; MAXD]; MAXD];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                let v = 0.5 * acc;
                if !v.is_finite() {
                    return Err(Error::SingularMetric {
                        point: point.to_vec(),
                    });
                }
                data[k][i][j] = v;
            }
        }
    }
    Ok(Christoffel { dim: n, data })
}

/// Covariant curvature tensor by central differences of the Christoffel
/// symbols: R^m_ijk = d_i G^m_jk - d_j G^m_ik + G^m_ia G^a_jk - G^m_ja G^a_ik,
/// lowered with the metric.
pub fn riemann(metric: &ChartMetric, point: &[f64]) -> Result<Riemann> {
    let h = metric.h_fd();
    metric.require_interior(point, 2.0 * h)?;
    let n = metric.dim();
    let g = metric.at(point);
    let gamma = christoffel_unchecked(metric, point)?;

    // dgamma[i] = d_i Gamma
    let mut dgamma = Vec::with_capacity(n);
    for i in 0..n {
        let mut pp = point.to_vec();
        let mut pm = point.to_vec();
        pp[i] += h;
        pm[i] -= h;
        let gp = christoffel_unchecked(metric, &pp)?;
        let gm = christoffel_unchecked(metric, &pm)?;
        let mut d = [[[0.0; MAXD]; MAXD]; MAXD];
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    d[m][a][b] = (gp.data[m][a][b] - gm.data[m][a][b]) / (2.0 * h);
                }
            }
        }
        dgamma.push(d);
    }

    let mut up = [[[[0.0; MAXD]; MAXD]; MAXD]; MAXD]; // R^m_ijk
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = dgamma[i][m][j][k] - dgamma[j][m][i][k];
                    for a in 0..n {
                        acc += gamma.data[m][i][a] * gamma.data[a][j][k]
                            - gamma.data[m][j][a] * gamma.data[a][i][k];
                    }
                    up[m][i][j][k] = acc;
                }
            }
        }
    }

    let mut data = [[[[0.0; MAXD]; MAXD]; MAXD]; MAXD]; // R_ijkl = g_lm R^m_ijk
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        acc += g[(l, m)] * up[m][i][j][k];
                    }
                    data[i][j][k][l] = acc;
                }
            }
        }
    }
    Ok(Riemann { dim: n, data })
}

/// Sectional curvature of the plane spanned by the section's vectors.
pub fn sectional_curvature(metric: &ChartMetric, section: &PlaneSection) -> Result<f64> {
    let g = metric.at(&section.point);
    let n = metric.dim();
    let ip = |a: &[f64], b: &[f64]| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += g[(i, j)] * a[i] * b[j];
            }
        }
        acc
    };
    let (uu, vv, uv) = (
        ip(&section.u, &section.u),
        ip(&section.v, &section.v),
        ip(&section.u, &section.v),
    );
    let gram = uu * vv - uv * uv;
    if gram <= 1e-12 * uu.abs().max(1.0) * vv.abs().max(1.0) {
        return Err(Error::DegeneratePlane { det: gram });
    }
    let r = riemann(metric, &section.point)?;
    Ok(r.quadratic(&section.u, &section.v) / gram)
}

/// Curvature operator on the bivector space of a 3-chart in an orthonormal
/// frame, with basis b1^b2, b1^b3, b2^b3. Returns the symmetrized matrix and
/// its eigenvalues sorted ascending.
pub fn curvature_operator(
    metric: &ChartMetric,
    point: &[f64],
    frame: &[Vec<f64>; 3],
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let g = metric.at(point);
    let n = metric.dim();
    if n != 3 {
        return Err(Error::Invalid(
            "curvature operator requires a 3-dimensional chart".into(),
        ));
    }
    let ip = |a: &[f64], b: &[f64]| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += g[(i, j)] * a[i] * b[j];
            }
        }
        acc
    };
    let mut dev: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((ip(&frame[i], &frame[j]) - want).abs());
        }
    }
    if dev > 1e-8 {
        return Err(Error::NonOrthonormalFrame { deviation: dev });
    }

    let r = riemann(metric, point)?;
    let value = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        acc += r.get(i, j, k, l) * a[i] * b[j] * c[k] * d[l];
                    }
                }
            }
        }
        acc
    };

    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let mut m = DMatrix::zeros(3, 3);
    for (a, &(i, j)) in PAIRS.iter().enumerate() {
        for (b, &(k, l)) in PAIRS.iter().enumerate() {
            // <R(b_i ^ b_j), b_k ^ b_l> = g(R(b_i, b_j) b_l, b_k)
            m[(a, b)] = value(&frame[i], &frame[j], &frame[l], &frame[k]);
        }
    }
    let sym = (&m + m.transpose()) * 0.5;
    let mut eigs: Vec<f64> = sym.clone().symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((sym, eigs))
}

/// Closed-form sectional curvature -f''(r)/f(r) of the warped product
/// dr^2 + f(r)^2 dphi^2, using the profile's own derivatives.
pub fn warped2d_curvature(f: &ProfileFunction, r: f64) -> Result<f64> {
    let v = f.eval(r);
    if v <= 0.0 {
        return Err(Error::OutOfRange {
            name: "f(r)",
            value: v,
            range: "(0, inf): warp must be positive away from tips",
        });
    }
    Ok(-f.deriv(r, 2) / v)
}

/// Hessian of a scalar field as a symmetric bilinear form:
/// H_ij = d_i d_j f - Gamma^k_ij d_k f, with central differences for f.
pub fn hessian_scalar(
    metric: &ChartMetric,
    func: &dyn Fn(&[f64]) -> f64,
    point: &[f64],
) -> Result<DMatrix<f64>> {
    let h = metric.h_fd();
    metric.require_interior(point, 2.0 * h)?;
    let n = metric.dim();
    let gamma = christoffel_unchecked(metric, point)?;

    let shift = |p: &[f64], i: usize, s: f64| {
        let mut q = p.to_vec();
        q[i] += s;
        q
    };
    let grad: Vec<f64> = (0..n)
        .map(|i| (func(&shift(point, i, h)) - func(&shift(point, i, -h))) / (2.0 * h))
        .collect();

    let f0 = func(point);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let dd = if i == j {
                (func(&shift(point, i, h)) - 2.0 * f0 + func(&shift(point, i, -h))) / (h * h)
            } else {
                let pp = shift(&shift(point, i, h), j, h);
                let pm = shift(&shift(point, i, h), j, -h);
                let mp = shift(&shift(point, i, -h), j, h);
                let mm = shift(&shift(point, i, -h), j, -h);
                (func(&pp) - func(&pm) - func(&mp) + func(&mm)) / (4.0 * h * h)
            };
            let mut conn = 0.0;
            for k in 0..n {
                conn += gamma.get(k, i, j) * grad[k];
            }
            hess[(i, j)] = dd - conn;
        }
    }
    Ok((&hess + hess.transpose()) * 0.5)
}

/// Report of the Killing-length identity check: on a polar chart pair the
/// Hessian of the Killing length phi on the section satisfies
/// -phi * Hess(phi)(v, v) = phi^2 * sec(X ^ v) in the ambient metric.
#[derive(Clone, Debug)]
pub struct KillingHessianReport {
    pub max_deviation: f64,
    pub samples: usize,
}

/// Checks the identity over an interior grid of the section chart, using the
/// section coordinate directions (normalized) as test vectors v.
pub fn killing_hessian_check(
    section: &ChartMetric,
    phi: &dyn Fn(&[f64]) -> f64,
    ambient: &ChartMetric,
    grid_n: usize,
) -> Result<KillingHessianReport> {
    if section.dim() != 2 || ambient.dim() != 3 {
        return Err(Error::Invalid(
            "killing_hessian_check expects a 2-dim section inside a 3-dim ambient chart".into(),
        ));
    }
    // The ambient chart must be the circle-invariant extension of
    // (section, phi): block diagonal with last coefficient phi^2.
    let probe = section
        .interior_grid(3)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invalid("empty section grid".into()))?;
    let amb = ambient.at(&[probe[0], probe[1], 0.1]);
    let sec_g = section.at(&probe);
    let p = phi(&probe);
    let consistent = (amb[(0, 0)] - sec_g[(0, 0)]).abs() < 1e-10
        && (amb[(1, 1)] - sec_g[(1, 1)]).abs() < 1e-10
        && (amb[(2, 2)] - p * p).abs() < 1e-10
        && amb[(0, 1)].abs() < 1e-12
        && amb[(0, 2)].abs() < 1e-12
        && amb[(1, 2)].abs() < 1e-12;
    if !consistent {
        return Err(Error::Invalid(
            "ambient chart is not the circle-invariant extension of (section, phi)".into(),
        ));
    }

    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for pt in section.interior_grid(grid_n) {
        if section.require_interior(&pt, 4.0 * section.h_fd()).is_err() {
            continue;
        }
        let p = phi(&pt);
        if p <= 1e-8 {
            return Err(Error::VanishingKillingLength { point: pt });
        }
        let hess = hessian_scalar(section, phi, &pt)?;
        let g = section.at(&pt);
        let ambient_pt = vec![pt[0], pt[1], 0.1];
        for dir in 0..2 {
            let mut v = vec![0.0; 2];
            v[dir] = 1.0 / g[(dir, dir)].sqrt();
            let lhs = -p * (hess[(dir, dir)] * v[dir] * v[dir]);
            let plane = PlaneSection::new(
                ambient_pt.clone(),
                vec![0.0, 0.0, 1.0],
                vec![v[0], v[1], 0.0],
            );
            let sec = sectional_curvature(ambient, &plane)?;
            let rhs = p * p * sec;
            worst = worst.max((lhs - rhs).abs());
            samples += 1;
        }
    }
    Ok(KillingHessianReport {
        max_deviation: worst,
        samples,
    })
}

/// Startup self-test pinning the sign convention: the round 2-sphere must
/// come out with sectional curvature +1 and the flat plane with 0.
pub fn self_test() -> Result<()> {
    let sphere = ChartMetric::warped2d(ProfileFunction::sin(), "r", "theta");
    let sec = sectional_curvature(
        &sphere,
        &PlaneSection::coordinate(vec![std::f64::consts::FRAC_PI_2, 1.0], 0, 1),
    )?;
    if (sec - 1.0).abs() > 1e-5 {
        return Err(Error::Invalid(format!(
            "sign convention self-test failed: round sphere sec = {sec}, want +1"
        )));
    }
    let flat = ChartMetric::euclidean(2);
    let sec0 = sectional_curvature(&flat, &PlaneSection::coordinate(vec![0.0, 0.0], 0, 1))?;
    if sec0.abs() > 1e-9 {
        return Err(Error::Invalid(format!(
            "sign convention self-test failed: flat plane sec = {sec0}, want 0"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn self_test_passes() {
        self_test().unwrap();
    }

    #[test]
    fn euclidean_christoffel_vanishes() {
        let e = ChartMetric::euclidean(2);
        let c = christoffel(&e, &[0.3, -0.2]).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(c.get(k, i, j).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn flat_polar_christoffel() {
        // dr^2 + r^2 dtheta^2 at r = 1: Gamma^r_tt = -1, Gamma^t_rt = 1.
        let polar = ChartMetric::warped2d(
            ProfileFunction::from_fn((0.0, 3.0), |r| r)
                .with_deriv(|_| 1.0)
                .with_deriv(|_| 0.0),
            "r",
            "theta",
        );
        let c = christoffel(&polar, &[1.0, 0.7]).unwrap();
        assert!((c.get(0, 1, 1) + 1.0).abs() < 1e-7);
        assert!((c.get(1, 0, 1) - 1.0).abs() < 1e-7);
        // Lower-index symmetry.
        assert!((c.get(1, 0, 1) - c.get(1, 1, 0)).abs() < 1e-12);
    }

    #[test]
    fn sphere_christoffel_at_quarter() {
        let sphere = ChartMetric::warped2d(ProfileFunction::sin(), "r", "theta");
        let c = christoffel(&sphere, &[FRAC_PI_4, 0.2]).unwrap();
        let want = -(FRAC_PI_4.sin() * FRAC_PI_4.cos());
        assert!((c.get(0, 1, 1) - want).abs() < 1e-7);
    }

    #[test]
    fn euclidean_riemann_vanishes() {
        let e = ChartMetric::euclidean(3);
        let r = riemann(&e, &[0.0, 0.1, -0.3]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert!(r.get(i, j, k, l).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn round_s3_constant_curvature_one() {
        // dr^2 + sin^2 r (dtheta^2 + sin^2 theta dalpha^2)
        let coords = vec![
            crate::chart::Coord::new("r", (0.0, std::f64::consts::PI)),
            crate::chart::Coord::new("theta", (0.0, std::f64::consts::PI)),
            crate::chart::Coord::periodic("alpha", (0.0, 2.0 * std::f64::consts::PI)),
        ];
        let s3 = ChartMetric::new(coords, |p: &[f64]| {
            let sr = p[0].sin();
            let st = p[1].sin();
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                1.0,
                sr * sr,
                sr * sr * st * st,
            ]))
        });
        let pt = vec![1.1, 1.3, 0.5];
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let sec =
                sectional_curvature(&s3, &PlaneSection::coordinate(pt.clone(), i, j)).unwrap();
            assert!((sec - 1.0).abs() < 1e-5, "plane ({i},{j}): {sec}");
        }
        let r = riemann(&s3, &pt).unwrap();
        assert!(r.symmetry_violation() < 1e-6);
    }

    #[test]
    fn hyperbolic_warp_gives_minus_one() {
        let m = ChartMetric::warped2d(
            ProfileFunction::from_fn((-2.0, 2.0), f64::cosh)
                .with_deriv(f64::sinh)
                .with_deriv(f64::cosh),
            "r",
            "phi",
        );
        let sec = sectional_curvature(&m, &PlaneSection::coordinate(vec![0.4, 1.0], 0, 1)).unwrap();
        assert!((sec + 1.0).abs() < 1e-5);
    }

    #[test]
    fn warped_closed_form_matches_oracle() {
        let f = ProfileFunction::sin();
        let chart = ChartMetric::warped2d(f.clone(), "r", "phi");
        for &r in &[0.5, 1.0, 1.9, 2.6] {
            let closed = warped2d_curvature(&f, r).unwrap();
            let oracle =
                sectional_curvature(&chart, &PlaneSection::coordinate(vec![r, 1.0], 0, 1)).unwrap();
            assert!((closed - oracle).abs() < crate::tol::WARPED_AGREE);
        }
    }

    #[test]
    fn warped_curvature_rejects_nonpositive_warp() {
        let f = ProfileFunction::sin();
        assert!(warped2d_curvature(&f, 0.0).is_err());
    }

    #[test]
    fn sectional_invariant_under_plane_basis_change() {
        let sphere = ChartMetric::warped2d(ProfileFunction::sin(), "r", "theta");
        let p = vec![1.0, 0.3];
        let s1 = PlaneSection::coordinate(p.clone(), 0, 1);
        let s2 = PlaneSection::new(p.clone(), vec![1.0, 0.5], vec![-0.3, 1.0]);
        let k1 = sectional_curvature(&sphere, &s1).unwrap();
        let k2 = sectional_curvature(&sphere, &s2).unwrap();
        assert!((k1 - k2).abs() < 1e-6);
    }

    #[test]
    fn degenerate_plane_rejected() {
        let e = ChartMetric::euclidean(2);
        let s = PlaneSection::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]);
        assert!(matches!(
            sectional_curvature(&e, &s),
            Err(Error::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn near_boundary_rejected() {
        let sphere = ChartMetric::warped2d(ProfileFunction::sin(), "r", "theta");
        assert!(matches!(
            riemann(&sphere, &[1e-6, 1.0]),
            Err(Error::NearBoundary { .. })
        ));
    }

    #[test]
    fn curvature_operator_round_s3_is_identity() {
        let coords = vec![
            crate::chart::Coord::new("r", (0.0, std::f64::consts::PI)),
            crate::chart::Coord::new("theta", (0.0, std::f64::consts::PI)),
            crate::chart::Coord::periodic("alpha", (0.0, 2.0 * std::f64::consts::PI)),
        ];
        let s3 = ChartMetric::new(coords, |p: &[f64]| {
            let sr = p[0].sin();
            let st = p[1].sin();
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                1.0,
                sr * sr,
                sr * sr * st * st,
            ]))
        });
        let pt = vec![1.2, 1.1, 0.4];
        let g = s3.at(&pt);
        let frame = [
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0 / g[(1, 1)].sqrt(), 0.0],
            vec![0.0, 0.0, 1.0 / g[(2, 2)].sqrt()],
        ];
        let (m, eigs) = curvature_operator(&s3, &pt, &frame).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - want).abs() < 1e-5, "entry ({i},{j}) = {}", m[(i, j)]);
            }
        }
        assert!(eigs.iter().all(|e| (e - 1.0).abs() < 1e-5));
    }

    #[test]
    fn curvature_operator_flat_product_is_zero() {
        let flat = ChartMetric::doubly_warped((0.0, 2.0), (0.0, 2.0), |_, _| 1.0, |_, _| 1.0);
        let pt = vec![1.0, 1.0, 0.3];
        let frame = [
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let (m, _) = curvature_operator(&flat, &pt, &frame).unwrap();
        assert!(m.abs().max() < 1e-9);
    }

    #[test]
    fn curvature_operator_rejects_skew_frame() {
        let flat = ChartMetric::doubly_warped((0.0, 2.0), (0.0, 2.0), |_, _| 1.0, |_, _| 1.0);
        let frame = [
            vec![1.0, 0.2, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert!(matches!(
            curvature_operator(&flat, &[1.0, 1.0, 0.0], &frame),
            Err(Error::NonOrthonormalFrame { .. })
        ));
    }

    #[test]
    fn hessian_of_linear_function_vanishes() {
        let e = ChartMetric::euclidean(2);
        let h = hessian_scalar(&e, &|p| 3.0 * p[0] - 2.0 * p[1], &[0.1, 0.1]).unwrap();
        assert!(h.abs().max() < 1e-7);
    }

    #[test]
    fn hessian_of_half_distance_squared_is_identity() {
        let e = ChartMetric::euclidean(2);
        let h = hessian_scalar(&e, &|p| 0.5 * (p[0] * p[0] + p[1] * p[1]), &[0.0, 0.0]).unwrap();
        assert!((h[(0, 0)] - 1.0).abs() < 1e-9);
        assert!((h[(1, 1)] - 1.0).abs() < 1e-9);
        assert!(h[(0, 1)].abs() < 1e-9);
    }

    #[test]
    fn killing_identity_on_flat_cylinder() {
        // Strip section, phi = 1: both sides vanish.
        let coords = vec![
            crate::chart::Coord::new("s", (0.0, 2.0)),
            crate::chart::Coord::new("t", (0.0, 2.0)),
        ];
        let section = ChartMetric::new(coords, |_: &[f64]| DMatrix::identity(2, 2));
        let ambient = ChartMetric::doubly_warped((0.0, 2.0), (0.0, 2.0), |_, _| 1.0, |_, _| 1.0);
        // doubly_warped puts f^2 on ds^2; with f = 1, p = 1 this is the flat block.
        let rep = killing_hessian_check(&section, &|_| 1.0, &ambient, 5).unwrap();
        assert!(rep.max_deviation < 1e-9, "dev = {}", rep.max_deviation);
    }

    #[test]
    fn riemann_symmetries_on_anisotropic_chart() {
        let coords = vec![
            crate::chart::Coord::new("x", (-1.0, 1.0)),
            crate::chart::Coord::new("y", (-1.0, 1.0)),
        ];
        let m = ChartMetric::new(coords, |p: &[f64]| {
            let (x, y) = (p[0], p[1]);
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    1.0 + 0.3 * (x + 2.0 * y).sin().powi(2),
                    0.1 * (x * y).cos(),
                    0.1 * (x * y).cos(),
                    1.5 + 0.2 * (y - x).cos(),
                ],
            )
        });
        let r = riemann(&m, &[0.2, -0.1]).unwrap();
        assert!(r.symmetry_violation() < crate::tol::SYM_ANALYTIC);
    }
}
