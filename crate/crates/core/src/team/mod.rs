//! Multi-player assignment.
//!
//! Every policy here reduces the team game to independent one-on-one and
//! two-on-one engagements and picks a conflict-free set of them.

mod greedy;
mod lgr;
mod matching;
mod mis;

use serde::Serialize;

use crate::duo::evaluate_duo;
use crate::error::{check_nu, Result};
use crate::geometry::PerimeterCurve;
use crate::solo::evaluate_solo;
use crate::vec2::Vec2;

pub use greedy::{greedy_heading, greedy_pair, intruder_team_greedy, GreedyChoice};
pub use lgr::{lgr_bounds, lgr_bounds_heterogeneous, lgr_defense_assignment, max_disjoint_score, LgrRegion};
pub use matching::{max_bipartite_matching, mm_assignment, mm_assignment_heterogeneous};
pub use mis::{max_independent_set, mis_assignment, MIS_NODE_CAP};

/// Defender side of an engagement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Member {
    Solo(usize),
    /// Unordered pair, stored with the smaller index first.
    Pair(usize, usize),
}

impl Member {
    pub fn pair(a: usize, b: usize) -> Self {
        Member::Pair(a.min(b), a.max(b))
    }

    pub fn defenders(self) -> impl Iterator<Item = usize> {
        let (a, b) = match self {
            Member::Solo(i) => (i, None),
            Member::Pair(i, j) => (i, Some(j)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn shares_defender(self, other: Member) -> bool {
        self.defenders().any(|d| other.defenders().any(|e| e == d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Engagement {
    pub member: Member,
    pub intruder: usize,
}

/// Conflict-free engagements. `secondary` pairs otherwise idle defenders
/// with otherwise unassigned intruders; they carry no guarantee.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Assignment {
    pub edges: Vec<Engagement>,
    pub secondary: Vec<Engagement>,
}

impl Assignment {
    /// True when no defender or intruder appears in two engagements.
    pub fn is_conflict_free(&self) -> bool {
        let all: Vec<&Engagement> = self.edges.iter().chain(&self.secondary).collect();
        all.iter().enumerate().all(|(a, x)| {
            all[a + 1..]
                .iter()
                .all(|y| x.intruder != y.intruder && !x.member.shares_defender(y.member))
        })
    }

    /// Engagement that covers intruder `k`, if any.
    pub fn for_intruder(&self, k: usize) -> Option<&Engagement> {
        self.edges.iter().chain(&self.secondary).find(|e| e.intruder == k)
    }

    /// Engagement that involves defender `d`, if any.
    pub fn for_defender(&self, d: usize) -> Option<&Engagement> {
        self.edges
            .iter()
            .chain(&self.secondary)
            .find(|e| e.member.defenders().any(|x| x == d))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreBounds {
    pub q_mm: usize,
    pub q_mis: usize,
    pub q_lg: usize,
    pub regions: Vec<LgrRegion>,
    /// Indices into `regions` of an optimal disjoint selection.
    pub selected: Vec<usize>,
}

/// Who can beat whom, alone or in pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngagementGraph {
    /// `solo_value[d][k]`: one-on-one value of defender `d` against intruder `k`.
    pub solo_value: Vec<Vec<f64>>,
    /// Defender `d` wins alone against intruder `k`.
    pub solo_edges: Vec<(usize, usize)>,
    /// Pair wins against intruder `k` although neither member does alone.
    pub pair_edges: Vec<((usize, usize), usize)>,
}

impl EngagementGraph {
    pub fn build(c: &PerimeterCurve, defenders: &[f64], intruders: &[Vec2], nu: f64) -> Result<Self> {
        check_nu(nu)?;
        let solo_value = defenders
            .iter()
            .map(|&s| {
                intruders
                    .iter()
                    .map(|&x| evaluate_solo(c, s, x, nu).map(|e| e.value))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut solo_edges = Vec::new();
        for (d, row) in solo_value.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if v <= 0.0 {
                    solo_edges.push((d, k));
                }
            }
        }
        let mut pair_edges = Vec::new();
        for i in 0..defenders.len() {
            for j in i + 1..defenders.len() {
                if c.arc_distance(defenders[i], defenders[j]) <= c.eps() {
                    continue;
                }
                for (k, &x) in intruders.iter().enumerate() {
                    if solo_value[i][k] <= 0.0 || solo_value[j][k] <= 0.0 {
                        continue;
                    }
                    if evaluate_duo(c, defenders[i], defenders[j], x, nu)?.value <= 0.0 {
                        pair_edges.push(((i, j), k));
                    }
                }
            }
        }
        Ok(EngagementGraph {
            solo_value,
            solo_edges,
            pair_edges,
        })
    }
}

/// Greedily pairs idle defenders with uncovered intruders, best one-on-one
/// value (for the defender) first.
pub(crate) fn secondary_matching(
    solo_value: &[Vec<f64>],
    n_a: usize,
    edges: &[Engagement],
    excluded: &[usize],
) -> Vec<Engagement> {
    let mut busy_d: Vec<bool> = vec![false; solo_value.len()];
    let mut busy_a: Vec<bool> = vec![false; n_a];
    for &k in excluded {
        busy_a[k] = true;
    }
    for e in edges {
        busy_a[e.intruder] = true;
        for d in e.member.defenders() {
            busy_d[d] = true;
        }
    }
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (d, row) in solo_value.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if !busy_d[d] && !busy_a[k] {
                cand.push((v, d, k));
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = Vec::new();
    for (_, d, k) in cand {
        if !busy_d[d] && !busy_a[k] {
            busy_d[d] = true;
            busy_a[k] = true;
            out.push(Engagement {
                member: Member::Solo(d),
                intruder: k,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn member_conflicts() {
        assert!(Member::Solo(1).shares_defender(Member::pair(2, 1)));
        assert!(!Member::pair(0, 1).shares_defender(Member::pair(2, 3)));
        assert_eq!(Member::pair(3, 1), Member::Pair(1, 3));
    }

    #[test]
    fn secondary_matching_prefers_low_values() {
        let v = vec![vec![0.5, 0.1], vec![0.2, 0.9]];
        let out = secondary_matching(&v, 2, &[], &[]);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], Engagement { member: Member::Solo(0), intruder: 1 });
        assert_eq!(out[1], Engagement { member: Member::Solo(1), intruder: 0 });
    }

    #[test]
    fn conflict_detection() {
        let a = Assignment {
            edges: vec![
                Engagement { member: Member::pair(0, 1), intruder: 0 },
                Engagement { member: Member::Solo(1), intruder: 1 },
            ],
            secondary: vec![],
        };
        assert!(!a.is_conflict_free());
    }
}
