//! Convex perimeter curves.
//!
//! Every perimeter is stored as a counter-clockwise convex polygon with
//! cumulative arc lengths; smooth shapes are densified before they get here
//! (see [`crate::shapes`]). Arc positions are plain `f64` values in `[0, L)`
//! measured counter-clockwise from vertex 0.
//!
//! All queries that involve an exterior point run in `O(log n)`: the polygon
//! keeps the angle of every vertex around an interior reference point, so the
//! edge facing a query point is found by binary search, and the visible
//! chain of edges is then bracketed by two more binary searches.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Interior-angle deviation from a straight angle above which a vertex counts
/// as a corner (tangent discontinuity).
pub const CORNER_ANGLE: f64 = 1e-6;

/// Relative geometry tolerance; multiplied by the perimeter length.
pub const GEOMETRY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PerimeterCurve {
    vertices: Vec<Vec2>,
    cum_length: Vec<f64>,
    total_length: f64,
    vertex_is_corner: Vec<bool>,
    edge_dir: Vec<Vec2>,
    edge_len: Vec<f64>,
    center: Vec2,
    /// Angle of each vertex around `center`, relative to vertex 0, in `[0, 2pi)`.
    spoke: Vec<f64>,
    spoke0: f64,
    eps: f64,
}

/// The part of the perimeter visible from an exterior point.
///
/// `s_tan_r .. s_tan_l` (ccw) is the segment the point can reach by a straight
/// line without crossing the interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentFan {
    pub s_tan_r: f64,
    pub s_tan_l: f64,
    #[serde(skip)]
    pub(crate) first_edge: usize,
    #[serde(skip)]
    pub(crate) last_edge: usize,
}

impl TangentFan {
    /// Number of edges in the visible chain.
    pub(crate) fn edge_count(&self, n: usize) -> usize {
        (self.last_edge + n - self.first_edge) % n + 1
    }
}

impl PerimeterCurve {
    /// Builds a perimeter from the convex hull of `points`.
    ///
    /// Concave inputs are silently replaced by their hull and interior or
    /// collinear points are dropped. The arc-length origin is the first input
    /// point that survives as a hull vertex, so rebuilding from
    /// [`vertices`](Self::vertices) reproduces the same curve.
    pub fn build(points: &[Vec2]) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::config("points", "non-finite coordinate"));
        }
        let mut sorted: Vec<Vec2> = points.to_vec();
        sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        sorted.dedup();
        if sorted.len() < 3 {
            return Err(Error::TooFewPoints(sorted.len()));
        }
        let hull = monotone_chain(&sorted);
        if hull.len() < 3 {
            return Err(Error::Collinear);
        }
        let anchor = points
            .iter()
            .find_map(|p| hull.iter().position(|h| h == p))
            .unwrap_or(0);
        let mut vertices = hull;
        vertices.rotate_left(anchor);
        Ok(Self::from_convex_ccw(vertices))
    }

    fn from_convex_ccw(vertices: Vec<Vec2>) -> Self {
        let n = vertices.len();
        let mut edge_dir = Vec::with_capacity(n);
        let mut edge_len = Vec::with_capacity(n);
        let mut cum_length = Vec::with_capacity(n);
        let mut total = 0.0;
        for i in 0..n {
            let d = vertices[(i + 1) % n] - vertices[i];
            let len = d.norm();
            cum_length.push(total);
            total += len;
            edge_len.push(len);
            edge_dir.push(d * (1.0 / len));
        }
        let vertex_is_corner = (0..n)
            .map(|i| {
                let a = edge_dir[(i + n - 1) % n];
                let b = edge_dir[i];
                a.cross(b).atan2(a.dot(b)).abs() > CORNER_ANGLE
            })
            .collect();
        let center = vertices.iter().fold(Vec2::ZERO, |acc, &v| acc + v) * (1.0 / n as f64);
        let spoke0 = (vertices[0] - center).angle();
        let spoke = vertices
            .iter()
            .map(|&v| ((v - center).angle() - spoke0).rem_euclid(TAU))
            .collect();
        PerimeterCurve {
            vertices,
            cum_length,
            total_length: total,
            vertex_is_corner,
            edge_dir,
            edge_len,
            center,
            spoke,
            spoke0,
            eps: GEOMETRY_EPS * total,
        }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn cum_length(&self) -> &[f64] {
        &self.cum_length
    }

    pub fn vertex_is_corner(&self) -> &[bool] {
        &self.vertex_is_corner
    }

    /// Perimeter length `L`.
    #[inline]
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Absolute geometry tolerance (`1e-9 L`).
    #[inline]
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    #[inline]
    pub(crate) fn edge_start(&self, e: usize) -> Vec2 {
        self.vertices[e]
    }

    #[inline]
    pub(crate) fn edge_dir(&self, e: usize) -> Vec2 {
        self.edge_dir[e]
    }

    #[inline]
    pub(crate) fn edge_len(&self, e: usize) -> f64 {
        self.edge_len[e]
    }

    /// Largest vertex spacing.
    pub fn max_edge_length(&self) -> f64 {
        self.edge_len.iter().copied().fold(0.0, f64::max)
    }

    /// Reduces an arc position into `[0, L)`.
    #[inline]
    pub fn wrap(&self, s: f64) -> f64 {
        let r = s.rem_euclid(self.total_length);
        if r >= self.total_length {
            0.0
        } else {
            r
        }
    }

    /// Counter-clockwise arc length from `a` to `b`, in `[0, L)`.
    #[inline]
    pub fn arc_distance_ccw(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (self.wrap(a), self.wrap(b));
        if b >= a {
            b - a
        } else {
            self.total_length - (a - b)
        }
    }

    /// Shorter of the two arc lengths between `a` and `b`.
    #[inline]
    pub fn arc_distance(&self, a: f64, b: f64) -> f64 {
        let d = self.arc_distance_ccw(a, b);
        d.min(self.total_length - d)
    }

    /// True when `s` lies on the closed ccw segment from `from` to `to`.
    #[inline]
    pub fn in_ccw_segment(&self, s: f64, from: f64, to: f64) -> bool {
        let span = self.arc_distance_ccw(from, to);
        let d = self.arc_distance_ccw(from, s);
        d <= span + self.eps || d >= self.total_length - self.eps
    }

    /// Edge index and offset along that edge for an arc position.
    pub(crate) fn locate(&self, s: f64) -> (usize, f64) {
        let s = self.wrap(s);
        let e = self.cum_length.partition_point(|&c| c <= s).saturating_sub(1);
        (e, (s - self.cum_length[e]).min(self.edge_len[e]))
    }

    /// Index of a vertex within `eps` of arc position `s`, if any.
    pub(crate) fn vertex_at(&self, s: f64) -> Option<usize> {
        let (e, t) = self.locate(s);
        if t <= self.eps {
            Some(e)
        } else if self.edge_len[e] - t <= self.eps {
            Some((e + 1) % self.len())
        } else {
            None
        }
    }

    /// Boundary point at arc position `s` (reduced mod `L`).
    pub fn point_at(&self, s: f64) -> Vec2 {
        let (e, t) = self.locate(s);
        self.vertices[e] + self.edge_dir[e] * t
    }

    /// One-sided unit tangents `(T-, T+)` at `s`; they differ only at vertices.
    pub fn tangent_at(&self, s: f64) -> (Vec2, Vec2) {
        match self.vertex_at(s) {
            Some(v) => {
                let n = self.len();
                (self.edge_dir[(v + n - 1) % n], self.edge_dir[v])
            }
            None => {
                let (e, _) = self.locate(s);
                (self.edge_dir[e], self.edge_dir[e])
            }
        }
    }

    /// Edge whose angular wedge around the interior reference point holds `x`.
    fn wedge_edge(&self, x: Vec2) -> usize {
        let a = ((x - self.center).angle() - self.spoke0).rem_euclid(TAU);
        self.spoke.partition_point(|&sp| sp <= a).saturating_sub(1)
    }

    /// Signed distance of `x` from the supporting line of edge `e`; positive
    /// outside.
    #[inline]
    fn edge_offset(&self, e: usize, x: Vec2) -> f64 {
        -self.edge_dir[e].cross(x - self.vertices[e])
    }

    /// True when `x` is outside the closed region by more than `eps`.
    pub fn is_exterior(&self, x: Vec2) -> bool {
        self.edge_offset(self.wedge_edge(x), x) > self.eps
    }

    /// True when `x` is inside or on the closed region (within `eps`).
    pub fn contains(&self, x: Vec2) -> bool {
        !self.is_exterior(x)
    }

    #[inline]
    fn faces(&self, e: usize, x: Vec2) -> bool {
        self.edge_offset(e % self.len(), x) > 0.0
    }

    /// Tangent points and visible segment from an exterior point.
    pub fn tangent_points(&self, x: Vec2) -> Result<TangentFan> {
        if !self.is_exterior(x) {
            return Err(Error::NotExterior(x));
        }
        let n = self.len();
        let seen = self.wedge_edge(x);
        let hidden = self.wedge_edge(self.center * 2.0 - x);
        debug_assert!(self.faces(seen, x) && !self.faces(hidden, x));

        // seen .. hidden (ccw): visible then hidden.
        let span = (hidden + n - seen) % n;
        let (mut lo, mut hi) = (0, span);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.faces(seen + mid, x) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let last_edge = (seen + lo) % n;

        // hidden .. seen (ccw): hidden then visible.
        let span = (seen + n - hidden) % n;
        let (mut lo, mut hi) = (0, span);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.faces(hidden + mid, x) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let first_edge = (hidden + hi) % n;

        Ok(TangentFan {
            s_tan_r: self.cum_length[first_edge],
            s_tan_l: self.cum_length[(last_edge + 1) % n],
            first_edge,
            last_edge,
        })
    }

    /// Cosine of the approach angle at the start and end of visible edge `e`.
    #[inline]
    fn edge_cosines(&self, e: usize, x: Vec2) -> (f64, f64) {
        let t = self.edge_dir[e];
        let a = self.vertices[e] - x;
        let b = self.vertices[(e + 1) % self.len()] - x;
        (a.dot(t) / a.norm(), b.dot(t) / b.norm())
    }

    /// Arc position in the visible segment where the cosine of the approach
    /// angle crosses `target`.
    ///
    /// `cos(phi)` is non-decreasing ccw over the visible segment. On an edge
    /// interior the crossing is solved in closed form; when the target falls
    /// in the jump across a vertex the vertex itself is returned. The two
    /// ends of the segment behave as smooth tangencies (`phi = pi` at the
    /// right end, `phi = 0` at the left end).
    pub(crate) fn solve_approach(&self, x: Vec2, fan: &TangentFan, target: f64) -> f64 {
        let n = self.len();
        if target >= 1.0 {
            return fan.s_tan_l;
        }
        if target <= -1.0 {
            return fan.s_tan_r;
        }
        let m = fan.edge_count(n);
        let edge = |j: usize| (fan.first_edge + j) % n;
        // First edge whose end cosine reaches the target.
        let (mut lo, mut hi) = (0usize, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.edge_cosines(edge(mid), x).1 >= target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if lo == m {
            return fan.s_tan_l;
        }
        let e = edge(lo);
        let (c0, _) = self.edge_cosines(e, x);
        if c0 > target {
            return self.cum_length[e];
        }
        let dir = self.edge_dir[e];
        let rel = self.vertices[e] - x;
        let along = rel.dot(dir);
        let h = dir.cross(rel).abs();
        let t = target * h / (1.0 - target * target).sqrt() - along;
        self.wrap(self.cum_length[e] + t.clamp(0.0, self.edge_len[e]))
    }

    /// Closest boundary point to an exterior point.
    pub fn closest_arc(&self, x: Vec2) -> Result<f64> {
        let fan = self.tangent_points(x)?;
        Ok(self.solve_approach(x, &fan, 0.0))
    }

    /// Closest boundary arc position for any point (inside or outside); O(n).
    pub fn nearest_arc_any(&self, x: Vec2) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        for e in 0..self.len() {
            let t = (x - self.vertices[e]).dot(self.edge_dir[e]).clamp(0.0, self.edge_len[e]);
            let d = (self.vertices[e] + self.edge_dir[e] * t).distance(x);
            if d < best.0 {
                best = (d, self.cum_length[e] + t);
            }
        }
        (best.0, self.wrap(best.1))
    }

    /// Signed distance to the boundary: positive outside, negative inside.
    pub fn signed_distance(&self, x: Vec2) -> f64 {
        let (d, _) = self.nearest_arc_any(x);
        if self.is_exterior(x) {
            d
        } else {
            -d
        }
    }

    /// Arc position of a point on (or within `eps` of) the boundary.
    pub fn project_boundary(&self, p: Vec2) -> f64 {
        let e = self.wedge_edge(p);
        let t = (p - self.vertices[e]).dot(self.edge_dir[e]).clamp(0.0, self.edge_len[e]);
        self.wrap(self.cum_length[e] + t)
    }

    /// First parameter `lambda` in `[0, 1]` at which the segment `a -> b`
    /// touches the closed region, if it does.
    pub fn segment_entry(&self, a: Vec2, b: Vec2) -> Option<f64> {
        let d = b - a;
        let mut enter = 0.0f64;
        let mut exit = 1.0f64;
        for e in 0..self.len() {
            // Inside iff cross(T, p - v) >= 0.
            let f0 = self.edge_dir[e].cross(a - self.vertices[e]);
            let df = self.edge_dir[e].cross(d);
            if df.abs() < 1e-300 {
                if f0 < 0.0 {
                    return None;
                }
            } else {
                let lam = -f0 / df;
                if df > 0.0 {
                    enter = enter.max(lam);
                } else {
                    exit = exit.min(lam);
                }
            }
            if enter > exit {
                return None;
            }
        }
        Some(enter)
    }

    /// Approach angles `(phi-, phi+)` at `s` as seen from exterior point `x`.
    ///
    /// `phi = acos(unit(gamma(s) - x) . T(s))`, one value per one-sided
    /// tangent. Fails when `s` is not on the visible segment.
    pub fn approach_angle(&self, x: Vec2, s: f64) -> Result<(f64, f64)> {
        let fan = self.tangent_points(x)?;
        if !self.in_ccw_segment(s, fan.s_tan_r, fan.s_tan_l) {
            return Err(Error::NotVisible {
                s,
                from: fan.s_tan_r,
                to: fan.s_tan_l,
            });
        }
        let u = (self.point_at(s) - x).normalized();
        let (tm, tp) = self.tangent_at(s);
        Ok((
            u.dot(tm).clamp(-1.0, 1.0).acos(),
            u.dot(tp).clamp(-1.0, 1.0).acos(),
        ))
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }
}

/// Andrew's monotone chain on lexicographically sorted, deduplicated points.
/// Returns the strictly convex hull in ccw order.
fn monotone_chain(sorted: &[Vec2]) -> Vec<Vec2> {
    let turn = |o: Vec2, a: Vec2, b: Vec2| (a - o).cross(b - o);
    let mut hull: Vec<Vec2> = Vec::with_capacity(sorted.len() + 1);
    for &p in sorted {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}
