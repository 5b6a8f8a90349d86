//! Discrete minimax oracle for the sign of the game value.
//!
//! The game is discretized in time so that the defender moves exactly one
//! perimeter cell per step and the intruder moves `nu` times that distance in
//! one of `headings` directions. The value of the discrete game of degree
//! (safe distance at breach, or `-L` if the intruder never breaches) is
//! computed by value iteration on a grid over `(s_D, x, y)`, interpolating
//! bilinearly in the plane. Two information patterns are solved, one where
//! the defender sees the intruder's move and one where the intruder sees the
//! defender's, and the two values are averaged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_nu, Error, Result};
use crate::geometry::PerimeterCurve;
use crate::vec2::Vec2;

/// Iteration stops once no value moves by more than this fraction of `L`.
const CONVERGENCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxConfig {
    /// Perimeter cells; one defender step per cell.
    pub defender_cells: usize,
    /// Grid nodes per axis of the planar box.
    pub grid: usize,
    /// Intruder heading directions.
    pub headings: usize,
    /// Maximum value iterations.
    pub depth: usize,
    /// Box margin around the perimeter, as a fraction of its larger extent.
    pub margin: f64,
}

impl Default for MinimaxConfig {
    fn default() -> Self {
        MinimaxConfig {
            defender_cells: 48,
            grid: 64,
            headings: 16,
            depth: 200,
            margin: 0.6,
        }
    }
}

impl MinimaxConfig {
    fn validate(&self) -> Result<()> {
        if self.defender_cells < 8 {
            return Err(Error::config("oracle.defender_cells", "need at least 8"));
        }
        if self.grid < 8 {
            return Err(Error::config("oracle.grid", "need at least 8 nodes per axis"));
        }
        if !(4..=32).contains(&self.headings) {
            return Err(Error::config("oracle.headings", "must lie in 4..=32"));
        }
        if self.depth == 0 || self.depth > 200 {
            return Err(Error::config("oracle.depth", "must lie in 1..=200"));
        }
        if self.margin.is_nan() || self.margin <= 0.0 {
            return Err(Error::config("oracle.margin", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Outcome {
    Breach { lambda: f64, s_b: f64 },
    Move { idx: [u32; 4], w: [f32; 4] },
    Escape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RolloutEstimate {
    /// `+1` intruder wins, `-1` defender wins.
    pub sign: i8,
    pub value: f64,
    pub iterations: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone)]
pub struct MinimaxOracle {
    curve: PerimeterCurve,
    cfg: MinimaxConfig,
    lo: Vec2,
    h: f64,
    cell: f64,
    maxmin: Vec<f32>,
    minmax: Vec<f32>,
    iterations: usize,
    truncated: bool,
}

impl MinimaxOracle {
    pub fn solve(c: &PerimeterCurve, nu: f64, cfg: MinimaxConfig) -> Result<Self> {
        check_nu(nu)?;
        cfg.validate()?;
        let l = c.total_length();
        let n_s = cfg.defender_cells;
        let g = cfg.grid;
        let nodes = g * g;
        let cell = l / n_s as f64;
        let cap = -(l as f32);

        let (blo, bhi) = c.bounds();
        let extent = (bhi.x - blo.x).max(bhi.y - blo.y);
        let side = extent * (1.0 + 2.0 * cfg.margin);
        let mid = (blo + bhi) * 0.5;
        let lo = mid - Vec2::new(side, side) * 0.5;
        let h = side / (g - 1) as f64;
        let node = |k: usize| lo + Vec2::new((k % g) as f64 * h, (k / g) as f64 * h);

        // Interior nodes carry the breach payoff at their nearest boundary
        // point so that interpolation near the boundary stays consistent.
        let interior: Vec<Option<f64>> = (0..nodes)
            .map(|k| {
                let p = node(k);
                c.contains(p).then(|| c.nearest_arc_any(p).1)
            })
            .collect();

        let step = nu * cell;
        let dirs: Vec<Vec2> = (0..cfg.headings)
            .map(|j| Vec2::from_angle(std::f64::consts::TAU * j as f64 / cfg.headings as f64))
            .collect();
        let outcomes: Vec<Outcome> = (0..nodes)
            .flat_map(|k| {
                let p = node(k);
                let inside = interior[k].is_some();
                dirs.iter()
                    .map(|&d| {
                        if inside {
                            return Outcome::Escape;
                        }
                        let q = p + d * step;
                        if let Some(lambda) = c.segment_entry(p, q) {
                            let hit = p.lerp(q, lambda);
                            return Outcome::Breach {
                                lambda,
                                s_b: c.project_boundary(hit),
                            };
                        }
                        let f = (q - lo) * (1.0 / h);
                        let (ix, iy) = (f.x.floor(), f.y.floor());
                        if ix < 0.0 || iy < 0.0 || ix >= (g - 1) as f64 || iy >= (g - 1) as f64 {
                            return Outcome::Escape;
                        }
                        let (tx, ty) = ((f.x - ix) as f32, (f.y - iy) as f32);
                        let base = iy as usize * g + ix as usize;
                        Outcome::Move {
                            idx: [base as u32, (base + 1) as u32, (base + g) as u32, (base + g + 1) as u32],
                            w: [(1.0 - tx) * (1.0 - ty), tx * (1.0 - ty), (1.0 - tx) * ty, tx * ty],
                        }
                    })
                    .collect::<Vec<_>>()
            })
            .collect();

        let mut maxmin = vec![cap; n_s * nodes];
        for i in 0..n_s {
            for k in 0..nodes {
                if let Some(s) = interior[k] {
                    maxmin[i * nodes + k] = (c.arc_distance(i as f64 * cell, s) - cell) as f32;
                }
            }
        }
        let mut minmax = maxmin.clone();
        let hd = cfg.headings;

        let mut iterations = 0;
        let mut converged = false;
        while iterations < cfg.depth {
            iterations += 1;
            let sweep = |old: &[f32], new: &mut [f32], intruder_first: bool| -> f32 {
                new.par_chunks_mut(nodes)
                    .enumerate()
                    .map(|(i, slice)| {
                        let mut change = 0.0f32;
                        let shift = [(i + n_s - 1) % n_s, i, (i + 1) % n_s];
                        for k in 0..nodes {
                            if interior[k].is_some() {
                                continue;
                            }
                            let mut vals = [[0.0f32; 3]; 32];
                            for (j, row) in vals.iter_mut().enumerate().take(hd) {
                                for (m, v) in row.iter_mut().enumerate() {
                                    *v = match outcomes[k * hd + j] {
                                        Outcome::Breach { lambda, s_b } => {
                                            let omega = m as f64 - 1.0;
                                            let s = (i as f64 + lambda * omega) * cell;
                                            (c.arc_distance(s, s_b) - cell) as f32
                                        }
                                        Outcome::Move { idx, w } => {
                                            let base = shift[m] * nodes;
                                            (0..4).map(|q| w[q] * old[base + idx[q] as usize]).sum()
                                        }
                                        Outcome::Escape => cap,
                                    };
                                }
                            }
                            let rows = &vals[..hd];
                            let v = if intruder_first {
                                rows.iter()
                                    .map(|r| r.iter().copied().fold(f32::INFINITY, f32::min))
                                    .fold(f32::NEG_INFINITY, f32::max)
                            } else {
                                (0..3)
                                    .map(|m| rows.iter().map(|r| r[m]).fold(f32::NEG_INFINITY, f32::max))
                                    .fold(f32::INFINITY, f32::min)
                            };
                            change = change.max((v - slice[k]).abs());
                            slice[k] = v;
                        }
                        change
                    })
                    .reduce(|| 0.0, f32::max)
            };
            let mut next = maxmin.clone();
            let d1 = sweep(&maxmin, &mut next, true);
            maxmin = next;
            let mut next = minmax.clone();
            let d2 = sweep(&minmax, &mut next, false);
            minmax = next;
            if (d1.max(d2) as f64) < CONVERGENCE * l {
                converged = true;
                break;
            }
        }

        Ok(MinimaxOracle {
            curve: c.clone(),
            cfg,
            lo,
            h,
            cell,
            maxmin,
            minmax,
            iterations,
            truncated: !converged,
        })
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// True when `x` lies inside the solved box with room for one grid cell.
    pub fn covers(&self, x: Vec2) -> bool {
        let f = (x - self.lo) * (1.0 / self.h);
        let top = (self.cfg.grid - 2) as f64;
        f.x >= 0.0 && f.y >= 0.0 && f.x < top && f.y < top
    }

    /// Averaged discrete value at an arbitrary state.
    pub fn value(&self, s_d: f64, x: Vec2) -> Result<f64> {
        if !self.covers(x) {
            return Err(Error::config("oracle", "state lies outside the solved box"));
        }
        let g = self.cfg.grid;
        let nodes = g * g;
        let n_s = self.cfg.defender_cells;
        let fs = self.curve.wrap(s_d) / self.cell;
        let i0 = (fs.floor() as usize) % n_s;
        let i1 = (i0 + 1) % n_s;
        let ts = fs - fs.floor();
        let f = (x - self.lo) * (1.0 / self.h);
        let (ix, iy) = (f.x.floor(), f.y.floor());
        let (tx, ty) = (f.x - ix, f.y - iy);
        let base = iy as usize * g + ix as usize;
        let slice = |i: usize| {
            let at = |k: usize| 0.5 * (self.maxmin[i * nodes + k] + self.minmax[i * nodes + k]) as f64;
            (1.0 - tx) * (1.0 - ty) * at(base)
                + tx * (1.0 - ty) * at(base + 1)
                + (1.0 - tx) * ty * at(base + g)
                + tx * ty * at(base + g + 1)
        };
        Ok((1.0 - ts) * slice(i0) + ts * slice(i1))
    }

    pub fn estimate(&self, s_d: f64, x: Vec2) -> Result<RolloutEstimate> {
        let value = self.value(s_d, x)?;
        Ok(RolloutEstimate {
            sign: if value > 0.0 { 1 } else { -1 },
            value,
            iterations: self.iterations,
            truncated: self.truncated,
        })
    }
}

/// Single-state convenience wrapper around [`MinimaxOracle`].
pub fn minimax_rollout(
    c: &PerimeterCurve,
    s_d: f64,
    x: Vec2,
    nu: f64,
    depth: usize,
    branching: usize,
) -> Result<RolloutEstimate> {
    let cfg = MinimaxConfig {
        depth,
        headings: branching,
        ..MinimaxConfig::default()
    };
    MinimaxOracle::solve(c, nu, cfg)?.estimate(s_d, x)
}
