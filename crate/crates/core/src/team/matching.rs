use crate::error::{check_nu, Error, Result};
use crate::geometry::PerimeterCurve;
use crate::solo::evaluate_solo;
use crate::vec2::Vec2;

use super::{secondary_matching, Assignment, Engagement, EngagementGraph, Member};

/// Maximum-cardinality bipartite matching by augmenting paths.
/// `adj[l]` lists the right-side nodes reachable from left node `l`.
/// Returns `(left, right)` pairs.
pub fn max_bipartite_matching(adj: &[Vec<usize>], n_right: usize) -> Vec<(usize, usize)> {
    fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; n_right];
    for l in 0..adj.len() {
        let mut seen = vec![false; n_right];
        augment(l, adj, &mut seen, &mut owner);
    }
    let mut out: Vec<(usize, usize)> = owner
        .iter()
        .enumerate()
        .filter_map(|(r, o)| o.map(|l| (l, r)))
        .collect();
    out.sort_unstable();
    out
}

/// Winnable intruders of each defender, closest call first so that the
/// matching prefers engagements with the least slack.
pub(crate) fn urgent_first(solo_value: &[Vec<f64>], n_a: usize, free: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    solo_value
        .iter()
        .enumerate()
        .map(|(d, row)| {
            let mut ks: Vec<usize> = (0..n_a).filter(|&k| row[k] <= 0.0 && free(d, k)).collect();
            ks.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            ks
        })
        .collect()
}

fn mm_from_values(solo_value: &[Vec<f64>], n_a: usize) -> (Assignment, usize) {
    let adj = urgent_first(solo_value, n_a, |_, _| true);
    let edges: Vec<Engagement> = max_bipartite_matching(&adj, n_a)
        .into_iter()
        .map(|(d, k)| Engagement {
            member: Member::Solo(d),
            intruder: k,
        })
        .collect();
    let q = n_a - edges.len();
    let secondary = secondary_matching(solo_value, n_a, &edges, &[]);
    (Assignment { edges, secondary }, q)
}

/// Maximum matching on the one-on-one win graph; `Q_MM = N_A - |matching|`.
pub fn mm_assignment(c: &PerimeterCurve, defenders: &[f64], intruders: &[Vec2], nu: f64) -> Result<(Assignment, usize)> {
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
    Ok(mm_from_values(&solo_value, intruders.len()))
}

/// [`mm_assignment`] with a separate speed ratio per defender.
pub fn mm_assignment_heterogeneous(
    c: &PerimeterCurve,
    defenders: &[f64],
    nus: &[f64],
    intruders: &[Vec2],
) -> Result<(Assignment, usize)> {
    if nus.len() != defenders.len() {
        return Err(Error::config("nu", "one speed ratio per defender required"));
    }
    let solo_value = defenders
        .iter()
        .zip(nus)
        .map(|(&s, &nu)| {
            intruders
                .iter()
                .map(|&x| evaluate_solo(c, s, x, nu).map(|e| e.value))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mm_from_values(&solo_value, intruders.len()))
}

pub(crate) fn mm_from_graph(g: &EngagementGraph, n_a: usize) -> (Assignment, usize) {
    mm_from_values(&g.solo_value, n_a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(adj: &[Vec<usize>], l: usize, used: &mut Vec<bool>) -> usize {
        if l == adj.len() {
            return 0;
        }
        let mut best = brute(adj, l + 1, used);
        for &r in &adj[l] {
            if !used[r] {
                used[r] = true;
                best = best.max(1 + brute(adj, l + 1, used));
                used[r] = false;
            }
        }
        best
    }

    #[test]
    fn augmenting_paths_beat_greedy() {
        // Greedy would take 0-0 and block 1.
        let adj = vec![vec![0, 1], vec![0]];
        assert_eq!(max_bipartite_matching(&adj, 2), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn matches_brute_force() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        for _ in 0..300 {
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            let nl = (next() % 6) as usize;
            let nr = (next() % 6) as usize;
            let adj: Vec<Vec<usize>> = (0..nl)
                .map(|_| (0..nr).filter(|_| next() % 3 == 0).collect())
                .collect();
            let m = max_bipartite_matching(&adj, nr);
            assert_eq!(m.len(), brute(&adj, 0, &mut vec![false; nr]));
            assert!(m.iter().all(|&(l, r)| adj[l].contains(&r)));
        }
    }

    #[test]
    fn trivial_cases() {
        let (a, q) = mm_from_values(&[vec![-1.0]], 1);
        assert_eq!((a.edges.len(), q), (1, 0));
        let (a, q) = mm_from_values(&[vec![1.0, 2.0]], 2);
        assert_eq!((a.edges.len(), q), (0, 2));
        assert_eq!(a.secondary.len(), 1);
    }
}
