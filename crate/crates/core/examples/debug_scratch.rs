// Scratch diagnostics used while tuning numerical parameters.

use orbismooth::quotient::WeightedQuotientProfile;
use orbismooth::resolve::{
    build_eta, greene_wu_smooth, PsiGlue, Rect, SectionGeometry, SmoothingParams, TubeModel,
};

fn main() {
    let q = WeightedQuotientProfile::new(2, 3).unwrap();
    let tube = TubeModel::new(2, q.profile().clone(), 0.8, std::f64::consts::PI).unwrap();
    let eta = build_eta(
        SmoothingParams::new(0.3, 1e-1, SmoothingParams::quotient_weight(2)).unwrap(),
    )
    .unwrap();
    let glue = PsiGlue::new(tube, eta).unwrap();
    let report = glue.seam_jump_report(400);
    let s1 = glue.tube().rho / 2.0;
    let t_sine = glue.tube().hbar_sine_radius(glue.eta());
    let (_t_lo, t_hi) = report.band_t;
    let kink = Rect {
        s0: s1,
        s1,
        t0: t_sine,
        t1: t_hi,
    };
    let pad = 0.9 * t_sine;
    let width = pad / 20.0;
    let g2 = glue.clone();
    let sm = greene_wu_smooth(
        move |s, t| g2.eval(s, t),
        kink,
        pad,
        width,
        SectionGeometry::Sphere,
        Some(s1),
    )
    .unwrap();
    let t = 0.108813;
    // Profile of the mollified field along s at fine spacing.
    let step = width / 8.0;
    println!("width={width:.3e} step={step:.3e}");
    let mut prev2: Option<f64> = None;
    let mut prev: Option<f64> = None;
    for k in -12i64..=12 {
        let s = s1 + k as f64 * step;
        let m = sm.mollified(s, t);
        let raw = glue.eval(s, t);
        let dd = match (prev2, prev) {
            (Some(p2), Some(p1)) => (m - 2.0 * p1 + p2) / (step * step),
            _ => f64::NAN,
        };
        println!(
            "k={k:+3} s-s1={:+.3e} M={m:.12} raw={raw:.12} ddM={dd:+.4e}",
            s - s1
        );
        prev2 = prev;
        prev = Some(m);
    }
}
