//! CSV level sets, zero contours and SVG snapshots.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::barrier::Barrier;
use crate::duo::evaluate_duo;
use crate::geometry::PerimeterCurve;
use crate::sim::StepRecord;
use crate::solo::evaluate_solo;
use crate::team::{Assignment, Member};
use crate::vec2::Vec2;

/// Values of a scalar field on a regular grid, row-major with `x` fastest.
/// Points inside the perimeter hold `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelGrid {
    pub lo: Vec2,
    pub hi: Vec2,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<Option<f64>>,
}

impl LevelGrid {
    pub fn point(&self, i: usize, j: usize) -> Vec2 {
        let fx = if self.nx > 1 { i as f64 / (self.nx - 1) as f64 } else { 0.0 };
        let fy = if self.ny > 1 { j as f64 / (self.ny - 1) as f64 } else { 0.0 };
        Vec2::new(self.lo.x + fx * (self.hi.x - self.lo.x), self.lo.y + fy * (self.hi.y - self.lo.y))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[j * self.nx + i]
    }

    /// `x,y,value` rows; interior points are skipped.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,value")?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if let Some(v) = self.get(i, j) {
                    let p = self.point(i, j);
                    writeln!(w, "{},{},{}", p.x, p.y, v)?;
                }
            }
        }
        Ok(())
    }

    /// Segments of the zero contour by marching squares. Cells touching the
    /// interior are skipped.
    pub fn zero_contour(&self) -> Vec<(Vec2, Vec2)> {
        let mut out = Vec::new();
        for j in 0..self.ny.saturating_sub(1) {
            for i in 0..self.nx.saturating_sub(1) {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let vals: Option<Vec<f64>> = corners.iter().map(|&(a, b)| self.get(a, b)).collect();
                let Some(vals) = vals else { continue };
                let pts: Vec<Vec2> = corners.iter().map(|&(a, b)| self.point(a, b)).collect();
                let mut cuts = Vec::new();
                for e in 0..4 {
                    let (va, vb) = (vals[e], vals[(e + 1) % 4]);
                    if (va < 0.0) != (vb < 0.0) {
                        let t = va / (va - vb);
                        cuts.push(pts[e].lerp(pts[(e + 1) % 4], t));
                    }
                }
                match cuts.len() {
                    2 => out.push((cuts[0], cuts[1])),
                    4 => {
                        // Saddle: resolve with the cell-centre average.
                        let centre = vals.iter().sum::<f64>() / 4.0;
                        if (centre < 0.0) == (vals[0] < 0.0) {
                            out.push((cuts[0], cuts[3]));
                            out.push((cuts[1], cuts[2]));
                        } else {
                            out.push((cuts[0], cuts[1]));
                            out.push((cuts[2], cuts[3]));
                        }
                    }
                    _ => {}
                }
            }
        }
        out
    }
}

/// Bounding box of the perimeter grown by `pad` on every side.
pub fn padded_bounds(c: &PerimeterCurve, pad: f64) -> (Vec2, Vec2) {
    let (lo, hi) = c.bounds();
    (lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad))
}

/// Samples `f` on an `n x n` grid over `[lo, hi]`.
pub fn sample_grid(c: &PerimeterCurve, lo: Vec2, hi: Vec2, n: usize, f: impl Fn(Vec2) -> Option<f64>) -> LevelGrid {
    let n = n.max(2);
    let mut g = LevelGrid {
        lo,
        hi,
        nx: n,
        ny: n,
        values: Vec::with_capacity(n * n),
    };
    for j in 0..n {
        for i in 0..n {
            let p = g.point(i, j);
            g.values.push(if c.is_exterior(p) { f(p) } else { None });
        }
    }
    g
}

/// One-on-one value `V` over the plane for a fixed defender.
pub fn solo_level_grid(c: &PerimeterCurve, s_d: f64, nu: f64, n: usize, pad: f64) -> LevelGrid {
    let (lo, hi) = padded_bounds(c, pad);
    sample_grid(c, lo, hi, n, |x| evaluate_solo(c, s_d, x, nu).ok().map(|e| e.value))
}

/// Pair value `V_ij` over the plane for a fixed pair.
pub fn duo_level_grid(c: &PerimeterCurve, s_d1: f64, s_d2: f64, nu: f64, n: usize, pad: f64) -> LevelGrid {
    let (lo, hi) = padded_bounds(c, pad);
    sample_grid(c, lo, hi, n, |x| evaluate_duo(c, s_d1, s_d2, x, nu).ok().map(|e| e.value))
}

/// `x,y` rows.
pub fn write_polyline_csv<W: Write>(mut w: W, points: &[Vec2]) -> io::Result<()> {
    writeln!(w, "x,y")?;
    for p in points {
        writeln!(w, "{},{}", p.x, p.y)?;
    }
    Ok(())
}

/// Maps plane coordinates to an SVG canvas with `y` pointing up.
#[derive(Debug, Clone, Copy)]
pub struct Canvas {
    lo: Vec2,
    hi: Vec2,
    width: f64,
}

impl Canvas {
    pub fn new(lo: Vec2, hi: Vec2, width: f64) -> Self {
        Canvas { lo, hi, width }
    }

    pub fn around(c: &PerimeterCurve, extra: &[Vec2], width: f64) -> Self {
        let (mut lo, mut hi) = c.bounds();
        for p in extra {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let pad = 0.08 * (hi - lo).norm().max(1e-9);
        Canvas::new(lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad), width)
    }

    fn scale(&self) -> f64 {
        self.width / (self.hi.x - self.lo.x)
    }

    fn height(&self) -> f64 {
        (self.hi.y - self.lo.y) * self.scale()
    }

    pub fn map(&self, p: Vec2) -> (f64, f64) {
        let k = self.scale();
        ((p.x - self.lo.x) * k, (self.hi.y - p.y) * k)
    }

    pub fn path(&self, points: &[Vec2], closed: bool) -> String {
        let mut d = String::new();
        for (n, &p) in points.iter().enumerate() {
            let (x, y) = self.map(p);
            let _ = write!(d, "{}{:.2},{:.2} ", if n == 0 { 'M' } else { 'L' }, x, y);
        }
        if closed {
            d.push('Z');
        }
        d
    }

    fn open(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.2} {:.2}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            self.width,
            self.height(),
            self.width,
            self.height()
        )
    }

    fn star(&self, p: Vec2, r: f64) -> String {
        let (cx, cy) = self.map(p);
        let pts: Vec<String> = (0..10)
            .map(|k| {
                let a = std::f64::consts::PI * (0.5 + k as f64 / 5.0);
                let rr = if k % 2 == 0 { r } else { 0.45 * r };
                format!("{:.2},{:.2}", cx + rr * a.cos(), cy - rr * a.sin())
            })
            .collect();
        format!(
            "<polygon points=\"{}\" fill=\"gold\" stroke=\"black\" stroke-width=\"0.5\"/>\n",
            pts.join(" ")
        )
    }
}

/// Perimeter and barrier of one defender.
pub fn barrier_svg(c: &PerimeterCurve, s_d: f64, barrier: &Barrier, width: f64) -> String {
    let line = barrier.polyline();
    let cv = Canvas::around(c, &line, width);
    let mut s = cv.open();
    let _ = writeln!(
        s,
        "<path d=\"{}\" fill=\"#eeeeee\" stroke=\"black\" stroke-width=\"1.5\"/>",
        cv.path(c.vertices(), true)
    );
    let _ = writeln!(
        s,
        "<path d=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"1.2\"/>",
        cv.path(&line, false)
    );
    let (x, y) = cv.map(c.point_at(s_d));
    let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"blue\"/>");
    s.push_str("</svg>\n");
    s
}

/// Breaching point an intruder aims at under `assignment`, or against the
/// most threatening defender when unassigned.
fn aim_point(c: &PerimeterCurve, defenders: &[f64], x: Vec2, nu: f64, member: Option<Member>) -> Option<f64> {
    match member {
        Some(Member::Solo(d)) => evaluate_solo(c, defenders[d], x, nu).ok().map(|e| e.target()),
        Some(Member::Pair(i, j)) => evaluate_duo(c, defenders[i], defenders[j], x, nu).ok().map(|e| e.s_opt),
        None => defenders
            .iter()
            .filter_map(|&s| evaluate_solo(c, s, x, nu).ok())
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .map(|e| e.target())
            .or_else(|| c.closest_arc(x).ok()),
    }
}

/// Snapshot of one step: perimeter, defenders (blue), live intruders (red),
/// breaching points (stars) and engagement edges, dash-dotted for one
/// defender and solid for a pair.
pub fn frame_svg(c: &PerimeterCurve, nu: f64, rec: &StepRecord, assignment: &Assignment, width: f64) -> String {
    let live: Vec<(usize, Vec2)> = rec
        .intruders
        .iter()
        .enumerate()
        .filter_map(|(k, p)| p.map(|p| (k, p)))
        .collect();
    let pts: Vec<Vec2> = live.iter().map(|&(_, p)| p).collect();
    let cv = Canvas::around(c, &pts, width);
    let mut s = cv.open();
    let _ = writeln!(
        s,
        "<path d=\"{}\" fill=\"#eeeeee\" stroke=\"black\" stroke-width=\"1.5\"/>",
        cv.path(c.vertices(), true)
    );
    let _ = writeln!(
        s,
        "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"14\">t = {:.3}</text>",
        rec.t
    );
    for &(k, x) in &live {
        let member = assignment.for_intruder(k).map(|e| e.member);
        if let Some(m) = member {
            let dash = match m {
                Member::Solo(_) => " stroke-dasharray=\"8,3,2,3\"",
                Member::Pair(..) => "",
            };
            for d in m.defenders() {
                let (x1, y1) = cv.map(c.point_at(rec.defenders[d]));
                let (x2, y2) = cv.map(x);
                let _ = writeln!(
                    s,
                    "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"gray\" stroke-width=\"1\"{dash}/>"
                );
            }
        }
        if let Some(sb) = aim_point(c, &rec.defenders, x, nu, member) {
            s.push_str(&cv.star(c.point_at(sb), 7.0));
        }
        let (px, py) = cv.map(x);
        let _ = writeln!(s, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"5\" fill=\"red\"/>");
    }
    for &sd in &rec.defenders {
        let (px, py) = cv.map(c.point_at(sd));
        let _ = writeln!(s, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"5\" fill=\"blue\"/>");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::PerimeterSpec;

    #[test]
    fn zero_contour_of_a_linear_field() {
        let c = PerimeterSpec::circle(0.1).build().unwrap();
        let g = sample_grid(&c, Vec2::new(1.0, -1.0), Vec2::new(3.0, 1.0), 21, |p| Some(p.x - 2.05));
        let segs = g.zero_contour();
        assert_eq!(segs.len(), 20);
        for (a, b) in segs {
            assert!((a.x - 2.05).abs() < 1e-12 && (b.x - 2.05).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_is_blank_and_csv_has_header() {
        let c = PerimeterSpec::square().build().unwrap();
        let g = solo_level_grid(&c, 0.5, 0.5, 16, 0.5);
        let centre = g.values.iter().enumerate().find(|(n, _)| {
            let p = g.point(n % g.nx, n / g.nx);
            c.contains(p) && !c.is_exterior(p)
        });
        assert!(centre.is_some_and(|(_, v)| v.is_none()));
        let mut out = Vec::new();
        g.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("x,y,value\n"));
        assert!(text.lines().count() > 100);
    }

    #[test]
    fn solo_zero_contour_passes_near_the_barrier() {
        let c = PerimeterSpec::circle(1.0).build().unwrap();
        let g = solo_level_grid(&c, 0.0, 0.5, 60, 1.0);
        let segs = g.zero_contour();
        assert!(!segs.is_empty());
        for (a, _) in segs.iter().take(20) {
            let v = evaluate_solo(&c, 0.0, *a, 0.5).unwrap().value;
            assert!(v.abs() < 0.2, "{v}");
        }
    }

    #[test]
    fn frame_draws_every_agent() {
        let c = PerimeterSpec::square().build().unwrap();
        let rec = StepRecord {
            t: 0.0,
            defenders: vec![0.5, 2.5],
            intruders: vec![Some(Vec2::new(0.5, 2.0)), None],
            omegas: vec![0.0, 0.0],
            headings: vec![Vec2::default(); 2],
            values: Vec::new(),
        };
        let a = Assignment {
            edges: vec![crate::team::Engagement {
                member: Member::Solo(1),
                intruder: 0,
            }],
            secondary: Vec::new(),
        };
        let svg = frame_svg(&c, 0.5, &rec, &a, 400.0);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
