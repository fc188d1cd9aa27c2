//! Infinitely smooth bump and step primitives built from exp(-1/x).
//!
//! Polynomial smoothsteps are only finitely differentiable; every cutoff,
//! bridge and mollifier kernel in this crate is assembled from these
//! primitives so that the constructions are genuinely C-infinity.

/// exp(-1/u) extended by 0 for u <= 0. Smooth on all of R.
pub fn transition(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// First derivative of [`transition`].
pub fn transition_d1(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp() / (u * u)
    }
}

/// Second derivative of [`transition`].
pub fn transition_d2(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp() * (1.0 - 2.0 * u) / (u * u * u * u)
    }
}

/// Smooth step: 0 for u <= 0, 1 for u >= 1, strictly increasing in between,
/// with all derivatives vanishing at both ends. Symmetric about u = 1/2.
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let b = transition(u);
        let c = transition(1.0 - u);
        b / (b + c)
    }
}

/// First derivative of [`smoothstep`].
pub fn smoothstep_d1(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let b = transition(u);
        let c = transition(1.0 - u);
        let db = transition_d1(u);
        let dc = transition_d1(1.0 - u);
        (db * c + b * dc) / ((b + c) * (b + c))
    }
}

/// Second derivative of [`smoothstep`].
pub fn smoothstep_d2(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let b = transition(u);
        let c = transition(1.0 - u);
        let db = transition_d1(u);
        let dc = transition_d1(1.0 - u);
        let d2b = transition_d2(u);
        let d2c = transition_d2(1.0 - u);
        let s = b + c;
        let n = db * c + b * dc;
        let dn = d2b * c - db * dc + db * dc - b * d2c;
        let ds = db - dc;
        (dn * s - 2.0 * n * ds) / (s * s * s)
    }
}

/// Smooth plateau: 1 on [a1, b0], 0 outside (a0, b1), rising on (a0, a1) and
/// falling on (b0, b1). Requires a0 <= a1 <= b0 <= b1.
pub fn plateau(x: f64, a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    let rise = if a1 > a0 {
        smoothstep((x - a0) / (a1 - a0))
    } else if x >= a1 {
        1.0
    } else {
        0.0
    };
    let fall = if b1 > b0 {
        1.0 - smoothstep((x - b0) / (b1 - b0))
    } else if x <= b0 {
        1.0
    } else {
        0.0
    };
    rise * fall
}

/// Standard compactly supported bump: exp(-1/(1-u^2)) on |u| < 1, else 0.
pub fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// First derivative of [`bump`].
pub fn bump_d1(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - u * u;
        bump(u) * (-2.0 * u / (q * q))
    }
}

/// Second derivative of [`bump`].
pub fn bump_d2(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - u * u;
        let a = -2.0 * u / (q * q);
        let da = (-2.0 * q * q - (-2.0 * u) * 2.0 * q * (-2.0 * u)) / (q * q * q * q);
        bump(u) * (a * a + da)
    }
}

/// Integral of [`bump`] over [-1, 1]; computed once on demand.
pub fn bump_mass() -> f64 {
    use std::sync::OnceLock;
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| crate::numerics::gauss15_composite(&bump, -1.0, 1.0, 64))
}

/// Normalized mollifier kernel of half-width `eps`, unit mass on R.
pub fn mollifier(x: f64, eps: f64) -> f64 {
    bump(x / eps) / (bump_mass() * eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::central_diff;

    #[test]
    fn smoothstep_endpoints_and_symmetry() {
        assert_eq!(smoothstep(-0.5), 0.0);
        assert_eq!(smoothstep(1.5), 1.0);
        assert_eq!(smoothstep(0.5), 0.5);
        for &u in &[0.1, 0.25, 0.4] {
            assert!((smoothstep(u) + smoothstep(1.0 - u) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn smoothstep_derivatives_match_finite_differences() {
        for &u in &[0.12, 0.35, 0.5, 0.61, 0.88] {
            let d1 = central_diff(&smoothstep, u, 1e-6, 1);
            let d2 = central_diff(&smoothstep, u, 1e-4, 2);
            assert!((smoothstep_d1(u) - d1).abs() < 1e-6, "d1 at {u}");
            assert!((smoothstep_d2(u) - d2).abs() < 1e-4, "d2 at {u}");
        }
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        for &u in &[-0.8, -0.3, 0.0, 0.45, 0.9] {
            let d1 = central_diff(&bump, u, 1e-6, 1);
            let d2 = central_diff(&bump, u, 1e-4, 2);
            assert!((bump_d1(u) - d1).abs() < 1e-6, "d1 at {u}");
            assert!((bump_d2(u) - d2).abs() < 1e-4, "d2 at {u}");
        }
    }

    #[test]
    fn mollifier_has_unit_mass() {
        let eps = 0.37;
        let mass = crate::numerics::gauss15_composite(&|x| mollifier(x, eps), -eps, eps, 64);
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plateau_is_one_on_core_zero_outside() {
        assert_eq!(plateau(0.5, 0.0, 0.2, 0.8, 1.0), 1.0);
        assert_eq!(plateau(-0.1, 0.0, 0.2, 0.8, 1.0), 0.0);
        assert_eq!(plateau(1.1, 0.0, 0.2, 0.8, 1.0), 0.0);
        let mid = plateau(0.1, 0.0, 0.2, 0.8, 1.0);
        assert!(mid > 0.0 && mid < 1.0);
    }
}
