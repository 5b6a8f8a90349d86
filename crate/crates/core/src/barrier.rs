//! Barrier of the one-vs-one game.
//!
//! A barrier point on the left branch is built from a breaching point `s`
//! by backing away from `gamma(s)` along the optimal approach direction
//! until the intruder's travel time equals the defender's:
//! `x = gamma(s) - nu d(s_D -> s) u`, with `u = nu T + sqrt(1 - nu^2) N`.
//! The right branch mirrors this with the defender moving clockwise. At a
//! corner `s` stays put while `u` sweeps between the two one-sided tangents.

use serde::Serialize;

use crate::error::{check_nu, Error, Result};
use crate::geometry::PerimeterCurve;
use crate::solo::{evaluate_solo, Region};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy)]
enum Piece {
    /// Along edge `e` from offset `t0` to `t1`; `d0` is the defender's
    /// travel at `t0`.
    Edge { e: usize, t0: f64, t1: f64, d0: f64 },
    /// Fixed breaching point `p`, tangent angle swept from `a0` to `a1`.
    Fan { p: Vec2, d: f64, a0: f64, a1: f64 },
}

struct Branch<'a> {
    c: &'a PerimeterCurve,
    nu: f64,
    /// Angle between the tangent and the approach direction.
    beta: f64,
    pieces: Vec<(Piece, f64)>,
    total: f64,
}

impl<'a> Branch<'a> {
    fn new(c: &'a PerimeterCurve, s_d: f64, nu: f64, ccw: bool) -> Self {
        let n = c.len();
        let l = c.total_length();
        let root = (1.0 - nu * nu).max(0.0).sqrt();
        let (mut e, t) = c.locate(s_d);
        let turn = |i: usize| {
            let (a, b) = (c.edge_dir((i + n - 1) % n), c.edge_dir(i));
            a.cross(b).atan2(a.dot(b))
        };
        let mut raw = Vec::with_capacity(2 * n + 2);
        let mut d = 0.0;
        if ccw {
            let mut t0 = t;
            while d < l {
                let t1 = c.edge_len(e).min(t0 + (l - d));
                raw.push(Piece::Edge { e, t0, t1, d0: d });
                d += t1 - t0;
                if d >= l {
                    break;
                }
                let next = (e + 1) % n;
                let a0 = c.edge_dir(e).angle();
                raw.push(Piece::Fan {
                    p: c.edge_start(next),
                    d,
                    a0,
                    a1: a0 + turn(next),
                });
                e = next;
                t0 = 0.0;
            }
        } else {
            let mut t0 = t;
            while d < l {
                let t1 = (t0 - (l - d)).max(0.0);
                raw.push(Piece::Edge { e, t0, t1, d0: d });
                d += t0 - t1;
                if d >= l {
                    break;
                }
                let prev = (e + n - 1) % n;
                let a0 = c.edge_dir(e).angle();
                raw.push(Piece::Fan {
                    p: c.edge_start(e),
                    d,
                    a0,
                    a1: a0 - turn(e),
                });
                e = prev;
                t0 = c.edge_len(e);
            }
        }
        let mut total = 0.0;
        let pieces = raw
            .into_iter()
            .map(|p| {
                let len = match p {
                    Piece::Edge { t0, t1, .. } => root * (t1 - t0).abs(),
                    Piece::Fan { d, a0, a1, .. } => nu * d * (a1 - a0).abs(),
                };
                total += len;
                (p, len)
            })
            .collect();
        let beta = if ccw { nu.acos() } else { std::f64::consts::PI - nu.acos() };
        Branch {
            c,
            nu,
            beta,
            pieces,
            total,
        }
    }

    fn point(&self, p: Vec2, tangent_angle: f64, d: f64) -> Vec2 {
        p - Vec2::from_angle(tangent_angle + self.beta) * (self.nu * d)
    }

    /// Barrier point at barrier arc length `sigma`.
    fn at(&self, sigma: f64) -> Vec2 {
        let mut rest = sigma.clamp(0.0, self.total);
        for &(piece, len) in &self.pieces {
            if rest <= len {
                let f = if len > 0.0 { rest / len } else { 0.0 };
                return match piece {
                    Piece::Edge { e, t0, t1, d0 } => {
                        let t = t0 + f * (t1 - t0);
                        let p = self.c.edge_start(e) + self.c.edge_dir(e) * t;
                        self.point(p, self.c.edge_dir(e).angle(), d0 + (t - t0).abs())
                    }
                    Piece::Fan { p, d, a0, a1 } => self.point(p, a0 + f * (a1 - a0), d),
                };
            }
            rest -= len;
        }
        let last = self.pieces.iter().rev().find(|(_, len)| *len > 0.0);
        match last {
            Some(&(Piece::Edge { e, t1, d0, t0 }, _)) => {
                let p = self.c.edge_start(e) + self.c.edge_dir(e) * t1;
                self.point(p, self.c.edge_dir(e).angle(), d0 + (t1 - t0).abs())
            }
            Some(&(Piece::Fan { p, d, a1, .. }, _)) => self.point(p, a1, d),
            None => self.c.point_at(0.0),
        }
    }
}

/// The two branches of the zero level set of `V` for a fixed defender.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Barrier {
    /// From `gamma(s_D)` counter-clockwise to the dispersal junction.
    pub left: Vec<Vec2>,
    /// From `gamma(s_D)` clockwise to the dispersal junction.
    pub right: Vec<Vec2>,
}

impl Barrier {
    /// Closed polyline: right branch reversed, then the left branch.
    pub fn polyline(&self) -> Vec<Vec2> {
        self.right.iter().rev().chain(self.left.iter().skip(1)).copied().collect()
    }

    /// Euclidean distance from `x` to the closed polyline.
    pub fn distance(&self, x: Vec2) -> f64 {
        polyline_distance(&self.polyline(), x, true)
    }
}

/// Distance from `x` to a polyline, optionally closed.
pub fn polyline_distance(points: &[Vec2], x: Vec2, closed: bool) -> f64 {
    let n = points.len();
    if n == 0 {
        return f64::INFINITY;
    }
    if n == 1 {
        return points[0].distance(x);
    }
    let segs = if closed { n } else { n - 1 };
    (0..segs)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            let d = b - a;
            let t = if d.norm_sq() > 0.0 {
                ((x - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (a + d * t).distance(x)
        })
        .fold(f64::INFINITY, f64::min)
}

const TRIM_SCAN: usize = 1024;

/// Samples the barrier with `n_samples` points spread over both branches in
/// proportion to arc length.
pub fn barrier_sample(c: &PerimeterCurve, s_d: f64, nu: f64, n_samples: usize) -> Result<Barrier> {
    check_nu(nu)?;
    if n_samples < 8 {
        return Err(Error::config("n_samples", "need at least 8"));
    }
    let s_d = c.wrap(s_d);
    let left = Branch::new(c, s_d, nu, true);
    let right = Branch::new(c, s_d, nu, false);
    let keep_left = |x: Vec2| match evaluate_solo(c, s_d, x, nu) {
        Ok(e) => e.region == Region::Left,
        Err(_) => true,
    };
    let keep_right = |x: Vec2| match evaluate_solo(c, s_d, x, nu) {
        Ok(e) => e.region != Region::Left,
        Err(_) => true,
    };
    let end_l = trim(&left, keep_left);
    let end_r = trim(&right, keep_right);
    let total = end_l + end_r;
    let n_l = if total > 0.0 {
        ((n_samples as f64 * end_l / total).round() as usize).clamp(2, n_samples - 2)
    } else {
        n_samples / 2
    };
    let n_r = n_samples - n_l;
    let sample = |b: &Branch, end: f64, m: usize| -> Vec<Vec2> {
        (0..m).map(|k| b.at(end * k as f64 / (m - 1) as f64)).collect()
    };
    Ok(Barrier {
        left: sample(&left, end_l, n_l),
        right: sample(&right, end_r, n_r),
    })
}

/// Barrier arc length at which the branch leaves its own region.
fn trim(b: &Branch, keep: impl Fn(Vec2) -> bool) -> f64 {
    let step = b.total / TRIM_SCAN as f64;
    let mut good = 0.0;
    for k in 1..=TRIM_SCAN {
        let sigma = step * k as f64;
        if keep(b.at(sigma)) {
            good = sigma;
            continue;
        }
        let mut bad = sigma;
        for _ in 0..60 {
            let mid = 0.5 * (good + bad);
            if keep(b.at(mid)) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        return good;
    }
    b.total
}

/// Euclidean distance to the barrier from a defender-winning state,
/// `-nu V`.
pub fn distance_to_barrier(c: &PerimeterCurve, s_d: f64, x: Vec2, nu: f64) -> Result<f64> {
    let v = evaluate_solo(c, s_d, x, nu)?.value;
    if v > 0.0 {
        return Err(Error::IntruderWinning(v));
    }
    Ok(-nu * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::PerimeterSpec;

    fn square() -> PerimeterCurve {
        PerimeterSpec::square().build().unwrap()
    }

    #[test]
    fn branch_starts_at_the_defender() {
        let c = square();
        let b = barrier_sample(&c, 0.5, 0.3, 200).unwrap();
        assert!(b.left[0].distance(Vec2::new(0.5, 0.0)) < 1e-12);
        assert!(b.right[0].distance(Vec2::new(0.5, 0.0)) < 1e-12);
    }

    #[test]
    fn involute_point_on_the_square() {
        let c = square();
        let b = Branch::new(&c, 0.5, 1.0, true);
        // Edges contribute no length at nu = 1; the first fan sweeps the
        // quarter turn at (1, 0) with radius 0.5.
        let quarter = 0.5 * std::f64::consts::FRAC_PI_2;
        let p = b.at(quarter);
        assert!(p.distance(Vec2::new(1.0, -0.5)) < 1e-12);
    }

    #[test]
    fn sampled_points_have_zero_value() {
        let c = square();
        let b = barrier_sample(&c, 0.5, 0.3, 400).unwrap();
        for x in b.polyline() {
            if let Ok(e) = evaluate_solo(&c, 0.5, x, 0.3) {
                assert!(e.value.abs() < 1e-6, "V = {} at {:?}", e.value, x);
            }
        }
        let ends = b.left.last().unwrap().distance(*b.right.last().unwrap());
        assert!(ends < 1e-6, "branches end {ends} apart");
    }

    #[test]
    fn square_distance_identity() {
        let c = square();
        let x = Vec2::new(2.0, 0.5);
        let d = distance_to_barrier(&c, 0.5, x, 0.3).unwrap();
        assert!((d - 0.65394).abs() < 1e-4);
        let b = barrier_sample(&c, 0.5, 0.3, 4096).unwrap();
        assert!((b.distance(x) - d).abs() < 2e-3 * 4.0);
    }

    #[test]
    fn intruder_side_has_no_barrier_distance() {
        let c = square();
        let r = distance_to_barrier(&c, 0.5, Vec2::new(0.5, 1.1), 0.3);
        assert!(matches!(r, Err(Error::IntruderWinning(_))));
    }
}
