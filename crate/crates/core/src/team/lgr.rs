//! Local game regions.
//!
//! Region `(i, j)` is the two-on-one intruder-winning region of the ordered
//! pair, on the side facing the ccw arc from `D_i` to `D_j`. Region `(i, i)`
//! is the one-on-one intruder-winning region of `D_i`; it is anchored on the
//! whole perimeter. Intruders collected in a region outnumbering the
//! defenders on its arc can force `q_k` breaches.

use serde::Serialize;

use crate::duo::{evaluate_duo_ordered, relevant_region};
use crate::error::{Error, Result};
use crate::geometry::PerimeterCurve;
use crate::vec2::Vec2;

use super::matching::{max_bipartite_matching, mm_from_graph, urgent_first};
use super::mis::mis_from_graph;
use super::{secondary_matching, Assignment, Engagement, EngagementGraph, Member, ScoreBounds};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LgrRegion {
    pub i: usize,
    pub j: usize,
    /// Intruders in the region with their pair value `V_ij`.
    pub intruders: Vec<(usize, f64)>,
    /// Intruders in the paired-defense region of the pair, with `V_ij`.
    pub pair_intruders: Vec<(usize, f64)>,
    pub n_a: usize,
    pub n_d: usize,
    pub q: usize,
    pub n_hat_a: usize,
    pub q_hat: usize,
}

impl LgrRegion {
    pub fn is_degenerate(&self) -> bool {
        self.i == self.j
    }
}

fn regions(
    c: &PerimeterCurve,
    defenders: &[f64],
    intruders: &[Vec2],
    active: &[bool],
    nu: f64,
    solo_value: &[Vec<f64>],
) -> Result<Vec<LgrRegion>> {
    let n = defenders.len();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut members = Vec::new();
            let mut paired = Vec::new();
            let n_d;
            if i == j {
                n_d = n - 1;
                for (k, _) in intruders.iter().enumerate().filter(|&(k, _)| active[k]) {
                    if solo_value[i][k] > 0.0 {
                        members.push((k, solo_value[i][k]));
                    }
                }
            } else {
                if c.arc_distance(defenders[i], defenders[j]) <= c.eps() {
                    continue;
                }
                // The pair itself bounds the region; only defenders between
                // them count.
                n_d = defenders
                    .iter()
                    .filter(|&&s| c.in_ccw_segment(s, defenders[i], defenders[j]))
                    .count()
                    - 2;
                for (k, &x) in intruders.iter().enumerate().filter(|&(k, _)| active[k]) {
                    if !relevant_region(c, defenders[i], defenders[j], x, nu)? {
                        continue;
                    }
                    let v = evaluate_duo_ordered(c, defenders[i], defenders[j], x, nu)?.value;
                    if v > 0.0 {
                        members.push((k, v));
                    } else if solo_value[i][k] > 0.0 && solo_value[j][k] > 0.0 {
                        paired.push((k, v));
                    }
                }
            }
            let q = members.len().saturating_sub(n_d);
            out.push(LgrRegion {
                i,
                j,
                n_a: members.len(),
                n_d,
                q,
                n_hat_a: paired.len(),
                q_hat: q + paired.len(),
                intruders: members,
                pair_intruders: paired,
            });
        }
    }
    Ok(out)
}

/// Maximum total `q` over regions whose arcs have disjoint interiors; arcs
/// may share an endpoint. Degenerate regions overlap everything. Returns the
/// score and the chosen region indices.
pub fn max_disjoint_score(c: &PerimeterCurve, defenders: &[f64], regions: &[LgrRegion]) -> (usize, Vec<usize>) {
    let n = defenders.len();
    let mut best: (usize, Vec<usize>) = (0, Vec::new());
    for (k, r) in regions.iter().enumerate() {
        if r.is_degenerate() && r.q > best.0 {
            best = (r.q, vec![k]);
        }
    }
    if n < 2 {
        return best;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| c.wrap(defenders[a]).total_cmp(&c.wrap(defenders[b])).then(a.cmp(&b)));
    let mut rank = vec![0; n];
    for (r, &d) in order.iter().enumerate() {
        rank[d] = r;
    }
    // No arc of a disjoint selection passes over an endpoint of another, so
    // cutting the circle at some selected endpoint linearizes the problem.
    for g in 0..n {
        let lin = |d: usize| (rank[d] + n - g) % n;
        let mut ending: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
        for (k, r) in regions.iter().enumerate() {
            if r.is_degenerate() || r.q == 0 {
                continue;
            }
            let a = lin(r.i);
            let b = match lin(r.j) {
                0 => n,
                b => b,
            };
            if a < b {
                ending[b].push((a, k));
            }
        }
        let mut dp = vec![0usize; n + 1];
        let mut take: Vec<Option<(usize, usize)>> = vec![None; n + 1];
        for p in 1..=n {
            dp[p] = dp[p - 1];
            for &(a, k) in &ending[p] {
                let v = dp[a] + regions[k].q;
                if v > dp[p] {
                    dp[p] = v;
                    take[p] = Some((a, k));
                }
            }
        }
        if dp[n] > best.0 {
            let mut chosen = Vec::new();
            let mut p = n;
            while p > 0 {
                match take[p] {
                    Some((a, k)) => {
                        chosen.push(k);
                        p = a;
                    }
                    None => p -= 1,
                }
            }
            chosen.reverse();
            best = (dp[n], chosen);
        }
    }
    best
}

/// `Q_MM`, `Q_MIS`, `Q_LG` and the local-game-region table.
pub fn lgr_bounds(c: &PerimeterCurve, defenders: &[f64], intruders: &[Vec2], nu: f64) -> Result<ScoreBounds> {
    let g = EngagementGraph::build(c, defenders, intruders, nu)?;
    let n_a = intruders.len();
    let (_, q_mm) = mm_from_graph(&g, n_a);
    let (_, q_mis) = mis_from_graph(&g, n_a)?;
    let active = vec![true; n_a];
    let table = regions(c, defenders, intruders, &active, nu, &g.solo_value)?;
    let (q_lg, selected) = if defenders.is_empty() {
        (n_a, Vec::new())
    } else {
        max_disjoint_score(c, defenders, &table)
    };
    Ok(ScoreBounds {
        q_mm,
        q_mis,
        q_lg,
        regions: table,
        selected,
    })
}

/// [`lgr_bounds`] for per-defender speed ratios; only homogeneous teams are
/// accepted.
pub fn lgr_bounds_heterogeneous(
    c: &PerimeterCurve,
    defenders: &[f64],
    nus: &[f64],
    intruders: &[Vec2],
) -> Result<ScoreBounds> {
    match nus.split_first() {
        Some((&nu, rest)) if rest.iter().all(|&v| v == nu) && nus.len() == defenders.len() => {
            lgr_bounds(c, defenders, intruders, nu)
        }
        None if defenders.is_empty() => lgr_bounds(c, defenders, intruders, 1.0),
        _ => Err(Error::HeterogeneousSpeeds),
    }
}

/// Three-step defense: give up `Q_LG` intruders, cover paired-defense
/// intruders with pairs, then match the rest one-on-one.
pub fn lgr_defense_assignment(c: &PerimeterCurve, defenders: &[f64], intruders: &[Vec2], nu: f64) -> Result<Assignment> {
    let g = EngagementGraph::build(c, defenders, intruders, nu)?;
    let n_a = intruders.len();
    let n_d = defenders.len();
    let mut active = vec![true; n_a];
    let table = regions(c, defenders, intruders, &active, nu, &g.solo_value)?;
    if n_d == 0 {
        return Ok(Assignment::default());
    }

    // Step 1: in each selected region, drop the intruders no engagement
    // wins against first, then those with the largest value.
    let mut capturable = vec![false; n_a];
    for &(_, k) in &g.solo_edges {
        capturable[k] = true;
    }
    for &(_, k) in &g.pair_edges {
        capturable[k] = true;
    }
    let (_, selected) = max_disjoint_score(c, defenders, &table);
    for &k in &selected {
        let mut members = table[k].intruders.clone();
        members.sort_by(|a, b| {
            capturable[a.0]
                .cmp(&capturable[b.0])
                .then(b.1.total_cmp(&a.1))
                .then(a.0.cmp(&b.0))
        });
        let mut left = table[k].q;
        for (a, _) in members {
            if left == 0 {
                break;
            }
            if active[a] {
                active[a] = false;
                left -= 1;
            }
        }
    }

    // Step 2: pairs for regions that still hold paired-defense intruders.
    let table = regions(c, defenders, intruders, &active, nu, &g.solo_value)?;
    let mut cand: Vec<(f64, usize, usize, usize)> = Vec::new();
    for r in table.iter().filter(|r| !r.is_degenerate() && r.q_hat >= 1) {
        for &(a, v) in &r.pair_intruders {
            cand.push((v, r.i, r.j, a));
        }
    }
    cand.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2, a.3).cmp(&(b.1, b.2, b.3))));
    let mut busy_d = vec![false; n_d];
    let mut busy_a: Vec<bool> = active.iter().map(|&on| !on).collect();
    let mut edges = Vec::new();
    for (_, i, j, a) in cand {
        if busy_d[i] || busy_d[j] || busy_a[a] {
            continue;
        }
        busy_d[i] = true;
        busy_d[j] = true;
        busy_a[a] = true;
        edges.push(Engagement {
            member: Member::pair(i, j),
            intruder: a,
        });
    }

    // Step 3: maximum matching on what is left.
    let adj = urgent_first(&g.solo_value, n_a, |d, k| !busy_d[d] && !busy_a[k]);
    for (d, k) in max_bipartite_matching(&adj, n_a) {
        edges.push(Engagement {
            member: Member::Solo(d),
            intruder: k,
        });
    }

    let dropped: Vec<usize> = (0..n_a).filter(|&k| !active[k]).collect();
    let secondary = secondary_matching(&g.solo_value, n_a, &edges, &dropped);
    Ok(Assignment { edges, secondary })
}
