//! Small numerical kernels: central differences, quadrature, root finding.

/// Central-difference approximation of the k-th derivative, k in 1..=4.
/// Second-order accurate stencils.
pub fn central_diff(f: &dyn Fn(f64) -> f64, x: f64, h: f64, order: u32) -> f64 {
    match order {
        0 => f(x),
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        4 => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
        _ => panic!("central_diff supports orders 0..=4, got {order}"),
    }
}

/// Composite Simpson rule with n subintervals (n rounded up to even).
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n.max(2) } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// 15-point Gauss-Legendre nodes on [-1, 1].
const GL15_X: [f64; 15] = [
    -0.987992518020485,
    -0.937273392400706,
    -0.848206583410427,
    -0.724417731360170,
    -0.570972172608539,
    -0.394151347077563,
    -0.201194093997435,
    0.0,
    0.201194093997435,
    0.394151347077563,
    0.570972172608539,
    0.724417731360170,
    0.848206583410427,
    0.937273392400706,
    0.987992518020485,
];

/// 15-point Gauss-Legendre weights.
const GL15_W: [f64; 15] = [
    0.030753241996117,
    0.070366047488108,
    0.107159220467172,
    0.139570677926154,
    0.166269205816994,
    0.186161000015562,
    0.198431485327112,
    0.202578241925561,
    0.198431485327112,
    0.186161000015562,
    0.166269205816994,
    0.139570677926154,
    0.107159220467172,
    0.070366047488108,
    0.030753241996117,
];

/// 15-point Gauss-Legendre quadrature on [a, b].
pub fn gauss15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL15_X.iter().zip(GL15_W.iter()) {
        acc += w * f(c + hw * x);
    }
    acc * hw
}

/// Composite 15-point Gauss-Legendre over n panels.
pub fn gauss15_composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| gauss15(f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// Cumulative integral of a smooth function on [a, b], precomputed on a fine
/// panel grid; queries combine the cached prefix sums with a local
/// Gauss-Legendre correction, so evaluation is machine accurate anywhere in
/// the interval.
pub struct CumulativeIntegral {
    a: f64,
    h: f64,
    prefix: Vec<f64>,
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CumulativeIntegral {
    pub fn new<F>(f: F, a: f64, b: f64, panels: usize) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let panels = panels.max(16);
        let h = (b - a) / panels as f64;
        let mut prefix = Vec::with_capacity(panels + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for i in 0..panels {
            acc += gauss15(&f, a + i as f64 * h, a + (i + 1) as f64 * h);
            prefix.push(acc);
        }
        Self {
            a,
            h,
            prefix,
            f: Box::new(f),
        }
    }

    /// Integral of f from the lower endpoint to x.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = ((x - self.a) / self.h).floor();
        let idx = (idx.max(0.0) as usize).min(self.prefix.len() - 2);
        let xk = self.a + idx as f64 * self.h;
        self.prefix[idx] + gauss15(&|t| (self.f)(t), xk, x)
    }
}

/// Bisection for a sign change of f on [a, b]. Requires f(a) and f(b) of
/// opposite sign; returns the midpoint after `iters` halvings.
pub fn bisect(f: &dyn Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> Option<f64> {
    let (mut lo, mut hi) = (a, b);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Uniform grid of n points strictly inside (a, b).
pub fn interior_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / (n + 1) as f64;
    (1..=n).map(|i| a + i as f64 * h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_diff_matches_sin_derivatives() {
        let f = |x: f64| x.sin();
        let x = 0.7;
        assert!((central_diff(&f, x, 1e-5, 1) - x.cos()).abs() < 1e-9);
        assert!((central_diff(&f, x, 1e-4, 2) + x.sin()).abs() < 1e-6);
        assert!((central_diff(&f, x, 1e-2, 3) + x.cos()).abs() < 1e-3);
        assert!((central_diff(&f, x, 1e-2, 4) - x.sin()).abs() < 1e-3);
    }

    #[test]
    fn gauss15_integrates_polynomials_exactly() {
        let f = |x: f64| x.powi(7) - 3.0 * x.powi(4) + x;
        let exact = |x: f64| x.powi(8) / 8.0 - 3.0 * x.powi(5) / 5.0 + x * x / 2.0;
        let got = gauss15(&f, -0.3, 1.1);
        assert!((got - (exact(1.1) - exact(-0.3))).abs() < 1e-14);
    }

    #[test]
    fn cumulative_integral_matches_closed_form() {
        let c = CumulativeIntegral::new(|x: f64| x.cos(), 0.0, 3.0, 64);
        for &x in &[0.0, 0.1, 0.77, 1.5, 2.999, 3.0] {
            assert!((c.eval(x) - x.sin()).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(&|x| x * x - 2.0, 0.0, 2.0, 80).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn simpson_close_on_smooth_integrand() {
        let got = simpson(&|x: f64| (-x * x).exp(), 0.0, 1.0, 200);
        assert!((got - 0.746824132812427).abs() < 1e-10);
    }
}
