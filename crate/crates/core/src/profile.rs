//! One-variable profile functions with evaluable derivatives.
//!
//! A profile is a scalar function on a closed interval together with as many
//! closed-form derivatives as its construction affords. Derivatives beyond
//! the analytic ones fall back to central differences of the highest analytic
//! level, so closed forms are used whenever available and finite differences
//! remain the independent cross-check.

use std::sync::Arc;

use crate::numerics::central_diff;
use crate::tol;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ProfileFunction {
    domain: (f64, f64),
    f: ScalarFn,
    derivs: Vec<ScalarFn>,
    h_fd: f64,
}

impl ProfileFunction {
    /// Profile from a bare closure; all derivatives via finite differences.
    pub fn from_fn<F>(domain: (f64, f64), f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            domain,
            f: Arc::new(f),
            derivs: Vec::new(),
            h_fd: tol::H_FD,
        }
    }

    /// Attach a closed-form derivative one order above the ones already held.
    pub fn with_deriv<F>(mut self, d: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivs.push(Arc::new(d));
        self
    }

    pub fn with_h_fd(mut self, h: f64) -> Self {
        self.h_fd = h;
        self
    }

    /// sin on [0, pi] with derivatives to order 4.
    pub fn sin() -> Self {
        ProfileFunction::from_fn((0.0, std::f64::consts::PI), f64::sin)
            .with_deriv(f64::cos)
            .with_deriv(|x| -x.sin())
            .with_deriv(|x| -x.cos())
            .with_deriv(f64::sin)
    }

    /// Constant profile.
    pub fn constant(domain: (f64, f64), c: f64) -> Self {
        ProfileFunction::from_fn(domain, move |_| c)
            .with_deriv(|_| 0.0)
            .with_deriv(|_| 0.0)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn h_fd(&self) -> f64 {
        self.h_fd
    }

    /// Number of closed-form derivative levels carried.
    pub fn analytic_orders(&self) -> usize {
        self.derivs.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// k-th derivative at x, k <= 4. Uses the closed form when carried and
    /// central differences of the highest closed form otherwise.
    pub fn deriv(&self, x: f64, k: u32) -> f64 {
        if k == 0 {
            return self.eval(x);
        }
        let have = self.derivs.len() as u32;
        if k <= have {
            return (self.derivs[(k - 1) as usize])(x);
        }
        let base = have.min(k);
        let missing = k - base;
        let g: Box<dyn Fn(f64) -> f64> = if base == 0 {
            Box::new(|y| (self.f)(y))
        } else {
            let d = self.derivs[(base - 1) as usize].clone();
            Box::new(move |y| d(y))
        };
        // Step tuned per missing order: wider stencils need larger steps to
        // avoid cancellation.
        let h = match missing {
            1 => self.h_fd.max(1e-6),
            2 => self.h_fd.max(1e-5) * 10.0,
            3 => 1e-3,
            _ => 1e-2,
        };
        central_diff(&g, x, h, missing)
    }

    /// Pointwise sum; domains intersect, shared analytic orders add.
    pub fn add(&self, other: &ProfileFunction) -> ProfileFunction {
        let domain = (
            self.domain.0.max(other.domain.0),
            self.domain.1.min(other.domain.1),
        );
        let (fa, fb) = (self.f.clone(), other.f.clone());
        let mut out = ProfileFunction {
            domain,
            f: Arc::new(move |x| fa(x) + fb(x)),
            derivs: Vec::new(),
            h_fd: self.h_fd.min(other.h_fd),
        };
        for k in 0..self.derivs.len().min(other.derivs.len()) {
            let (da, db) = (self.derivs[k].clone(), other.derivs[k].clone());
            out.derivs.push(Arc::new(move |x| da(x) + db(x)));
        }
        out
    }

    /// Pointwise scaling by a constant.
    pub fn scale(&self, c: f64) -> ProfileFunction {
        let f = self.f.clone();
        let mut out = ProfileFunction {
            domain: self.domain,
            f: Arc::new(move |x| c * f(x)),
            derivs: Vec::new(),
            h_fd: self.h_fd,
        };
        for d in &self.derivs {
            let d = d.clone();
            out.derivs.push(Arc::new(move |x| c * d(x)));
        }
        out
    }

    /// Reflection x -> (a + b) - x of the domain, so tips swap roles.
    pub fn mirror(&self) -> ProfileFunction {
        let (a, b) = self.domain;
        let s = a + b;
        let f = self.f.clone();
        let mut out = ProfileFunction {
            domain: self.domain,
            f: Arc::new(move |x| f(s - x)),
            derivs: Vec::new(),
            h_fd: self.h_fd,
        };
        for (k, d) in self.derivs.iter().enumerate() {
            let d = d.clone();
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            out.derivs.push(Arc::new(move |x| sign * d(s - x)));
        }
        out
    }

    /// Checks that each analytic derivative agrees with a central difference
    /// of the level below it at the given interior points. Returns the worst
    /// absolute deviation.
    pub fn check_derivative_consistency(&self, points: &[f64], h: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..=self.derivs.len() {
            for &x in points {
                let lower: Box<dyn Fn(f64) -> f64> = if k == 1 {
                    let f = self.f.clone();
                    Box::new(move |y| f(y))
                } else {
                    let d = self.derivs[k - 2].clone();
                    Box::new(move |y| d(y))
                };
                let fd = central_diff(&lower, x, h, 1);
                worst = worst.max((self.deriv(x, k as u32) - fd).abs());
            }
        }
        worst
    }
}

impl std::fmt::Debug for ProfileFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProfileFunction")
            .field("domain", &self.domain)
            .field("analytic_orders", &self.derivs.len())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_profile_derivatives() {
        let p = ProfileFunction::sin();
        let x = 1.1;
        assert!((p.deriv(x, 1) - x.cos()).abs() < 1e-15);
        assert!((p.deriv(x, 2) + x.sin()).abs() < 1e-15);
        assert!((p.deriv(x, 4) - x.sin()).abs() < 1e-15);
    }

    #[test]
    fn fd_fallback_tracks_analytic() {
        // Only values carried: all derivatives via differences.
        let p = ProfileFunction::from_fn((0.0, 3.0), f64::sin);
        let x = 0.9;
        assert!((p.deriv(x, 1) - x.cos()).abs() < 1e-8);
        assert!((p.deriv(x, 2) + x.sin()).abs() < 1e-5);
        assert!((p.deriv(x, 4) - x.sin()).abs() < 1e-3);
    }

    #[test]
    fn add_and_scale_compose() {
        let p = ProfileFunction::sin().add(&ProfileFunction::sin().scale(2.0));
        let x = 0.4;
        assert!((p.eval(x) - 3.0 * x.sin()).abs() < 1e-15);
        assert!((p.deriv(x, 1) - 3.0 * x.cos()).abs() < 1e-15);
    }

    #[test]
    fn mirror_swaps_tips() {
        let p = ProfileFunction::sin(); // domain [0, pi]
        let m = p.mirror();
        let x = 0.3;
        assert!((m.eval(x) - (std::f64::consts::PI - x).sin()).abs() < 1e-15);
        // d/dx f(pi - x) = -f'(pi - x)
        assert!((m.deriv(x, 1) + (std::f64::consts::PI - x).cos()).abs() < 1e-15);
        assert!((m.deriv(x, 2) + (std::f64::consts::PI - x).sin()).abs() < 1e-15);
    }

    #[test]
    fn consistency_check_flags_wrong_derivative() {
        let good = ProfileFunction::sin();
        let pts = [0.5, 1.0, 2.0];
        assert!(good.check_derivative_consistency(&pts, 1e-5) < 1e-9);
        let bad = ProfileFunction::from_fn((0.0, 3.0), f64::sin).with_deriv(|x| 1.1 * x.cos());
        assert!(bad.check_derivative_consistency(&pts, 1e-5) > 1e-3);
    }
}
