use crate::error::{Error, Result};
use crate::geometry::PerimeterCurve;
use crate::vec2::Vec2;

use super::{secondary_matching, Assignment, Engagement, EngagementGraph, Member};

/// Largest conflict graph the exact solver accepts.
pub const MIS_NODE_CAP: usize = 64;

/// Exact maximum independent set. `adj[v]` is the neighbor bitmask of `v`.
pub fn max_independent_set(adj: &[u64]) -> Result<Vec<usize>> {
    let n = adj.len();
    if n > MIS_NODE_CAP {
        return Err(Error::MisCapacity {
            nodes: n,
            cap: MIS_NODE_CAP,
        });
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = (0u32, 0u64);
    search(adj, all, 0, &mut best);
    Ok((0..n).filter(|&v| best.1 >> v & 1 == 1).collect())
}

fn search(adj: &[u64], mut cand: u64, mut chosen: u64, best: &mut (u32, u64)) {
    // Vertices of degree <= 1 inside the candidate set belong to some
    // maximum independent set.
    loop {
        let mut forced = None;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (adj[v] & cand).count_ones() <= 1 {
                forced = Some(v);
                break;
            }
        }
        match forced {
            Some(v) => {
                chosen |= 1 << v;
                cand &= !(adj[v] | 1 << v);
            }
            None => break,
        }
    }
    let size = chosen.count_ones();
    if cand == 0 {
        if size > best.0 {
            *best = (size, chosen);
        }
        return;
    }
    if size + cand.count_ones() <= best.0 {
        return;
    }
    let mut pick = 0;
    let mut deg = 0;
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & cand).count_ones();
        if d > deg {
            deg = d;
            pick = v;
        }
    }
    search(adj, cand & !(adj[pick] | 1 << pick), chosen | 1 << pick, best);
    search(adj, cand & !(1 << pick), chosen, best);
}

pub(crate) fn mis_from_graph(g: &EngagementGraph, n_a: usize) -> Result<(Assignment, usize)> {
    let nodes: Vec<Engagement> = g
        .solo_edges
        .iter()
        .map(|&(d, k)| Engagement {
            member: Member::Solo(d),
            intruder: k,
        })
        .chain(g.pair_edges.iter().map(|&((i, j), k)| Engagement {
            member: Member::pair(i, j),
            intruder: k,
        }))
        .collect();
    if nodes.len() > MIS_NODE_CAP {
        return Err(Error::MisCapacity {
            nodes: nodes.len(),
            cap: MIS_NODE_CAP,
        });
    }
    let adj: Vec<u64> = nodes
        .iter()
        .map(|a| {
            nodes.iter().enumerate().fold(0u64, |m, (w, b)| {
                if a != b && (a.intruder == b.intruder || a.member.shares_defender(b.member)) {
                    m | 1 << w
                } else {
                    m
                }
            })
        })
        .collect();
    let edges: Vec<Engagement> = max_independent_set(&adj)?.into_iter().map(|v| nodes[v]).collect();
    let q = n_a - edges.len();
    let secondary = secondary_matching(&g.solo_value, n_a, &edges, &[]);
    Ok((Assignment { edges, secondary }, q))
}

/// Assignment over single defenders and defender pairs; `Q_MIS = N_A - |MIS|`.
pub fn mis_assignment(c: &PerimeterCurve, defenders: &[f64], intruders: &[Vec2], nu: f64) -> Result<(Assignment, usize)> {
    let g = EngagementGraph::build(c, defenders, intruders, nu)?;
    mis_from_graph(&g, intruders.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(adj: &[u64]) -> usize {
        let n = adj.len();
        (0u64..1 << n)
            .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0))
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn cycle_and_star() {
        // 5-cycle: MIS 2.
        let c5: Vec<u64> = (0..5).map(|v| 1 << ((v + 1) % 5) | 1 << ((v + 4) % 5)).collect();
        assert_eq!(max_independent_set(&c5).unwrap().len(), 2);
        // Star with 4 leaves: MIS 4.
        let star = vec![0b11110, 1, 1, 1, 1];
        assert_eq!(max_independent_set(&star).unwrap(), vec![1, 2, 3, 4]);
        assert!(max_independent_set(&[]).unwrap().is_empty());
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        for _ in 0..200 {
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            let n = (next() % 14) as usize;
            let mut adj = vec![0u64; n];
            for a in 0..n {
                for b in a + 1..n {
                    if next() % 3 == 0 {
                        adj[a] |= 1 << b;
                        adj[b] |= 1 << a;
                    }
                }
            }
            let set = max_independent_set(&adj).unwrap();
            assert_eq!(set.len(), brute(&adj));
            assert!(set.iter().all(|&v| set.iter().all(|&w| adj[v] >> w & 1 == 0)));
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let adj = vec![0u64; 65];
        assert_eq!(
            max_independent_set(&adj),
            Err(Error::MisCapacity { nodes: 65, cap: 64 })
        );
    }
}
