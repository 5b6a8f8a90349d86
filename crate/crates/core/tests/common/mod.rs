#![allow(dead_code)]

use perimeter_defense::{PerimeterCurve, PerimeterSpec, Vec2};
use rand::Rng;

/// Hull of 6 to 40 jittered points on a random ellipse.
pub fn random_polygon(rng: &mut impl Rng) -> PerimeterCurve {
    let n = rng.gen_range(6..=40);
    let a = rng.gen_range(0.5..2.0);
    let b = rng.gen_range(0.5..2.0);
    let rot = rng.gen_range(0.0..std::f64::consts::TAU);
    let pts: Vec<Vec2> = (0..n)
        .map(|_| {
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            let k = rng.gen_range(0.85..1.0);
            Vec2::new(a * k * t.cos(), b * k * t.sin()).rotated(rot)
        })
        .collect();
    PerimeterCurve::build(&pts).unwrap_or_else(|_| random_polygon(rng))
}

/// Outward offset of the boundary point at `s`.
pub fn offset_point(c: &PerimeterCurve, s: f64, dist: f64) -> Vec2 {
    let (tm, tp) = c.tangent_at(s);
    let t = (tm + tp).normalized();
    c.point_at(s) + Vec2::new(t.y, -t.x) * dist
}

/// Exterior point at a uniform boundary position and an offset in
/// `[lo, hi] * L`.
pub fn random_exterior(c: &PerimeterCurve, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec2 {
    let l = c.total_length();
    loop {
        let x = offset_point(c, rng.gen_range(0.0..l), rng.gen_range(lo..hi) * l);
        if c.is_exterior(x) {
            return x;
        }
    }
}

pub fn shapes() -> Vec<(&'static str, PerimeterSpec)> {
    vec![
        ("square", PerimeterSpec::square()),
        ("circle", PerimeterSpec::circle(1.0)),
        ("ellipse", PerimeterSpec::piecewise_ellipse()),
    ]
}
