//! Intruder team policy: each intruder picks one adjacent defender pair and
//! plays the two-on-one game against it, ignoring its teammates.

use serde::Serialize;

use crate::duo::{evaluate_duo_ordered, relevant_region_biased};
use crate::error::{check_nu, Result};
use crate::geometry::PerimeterCurve;
use crate::solo::{evaluate_solo, heading_to};
use crate::vec2::Vec2;

/// Relative width of the band in which ties go counter-clockwise.
const TIE_BAND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyChoice {
    /// No defender at all; head for the nearest boundary point.
    Free,
    Solo(usize),
    /// Defender indices, clockwise member first.
    Pair(usize, usize),
}

/// Adjacent pairs in ccw order, skipping coincident defenders.
fn adjacent_pairs(c: &PerimeterCurve, defenders: &[f64]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..defenders.len()).collect();
    order.sort_by(|&a, &b| c.wrap(defenders[a]).total_cmp(&c.wrap(defenders[b])).then(a.cmp(&b)));
    order.dedup_by(|b, a| c.arc_distance(defenders[*a], defenders[*b]) <= c.eps());
    if order.len() < 2 {
        return Vec::new();
    }
    (0..order.len()).map(|m| (order[m], order[(m + 1) % order.len()])).collect()
}

/// Pair (or single defender) the intruder at `x` engages. A previous choice
/// is kept while the state stays within the tie band of it.
pub fn greedy_pair(
    c: &PerimeterCurve,
    defenders: &[f64],
    x: Vec2,
    nu: f64,
    previous: Option<GreedyChoice>,
) -> Result<GreedyChoice> {
    check_nu(nu)?;
    if defenders.is_empty() {
        return Ok(GreedyChoice::Free);
    }
    let pairs = adjacent_pairs(c, defenders);
    if pairs.is_empty() {
        return Ok(GreedyChoice::Solo(0));
    }
    let band = TIE_BAND * c.total_length();
    if let Some(GreedyChoice::Pair(i, j)) = previous {
        if pairs.contains(&(i, j)) && relevant_region_biased(c, defenders[i], defenders[j], x, nu, band)? {
            return Ok(GreedyChoice::Pair(i, j));
        }
    }
    for &(i, j) in &pairs {
        if relevant_region_biased(c, defenders[i], defenders[j], x, nu, 0.0)? {
            return Ok(GreedyChoice::Pair(i, j));
        }
    }
    for &(i, j) in &pairs {
        if relevant_region_biased(c, defenders[i], defenders[j], x, nu, band)? {
            return Ok(GreedyChoice::Pair(i, j));
        }
    }
    // Fall back on the pair whose arc holds the nearest boundary point.
    let near = c.closest_arc(x)?;
    let (i, j) = pairs
        .iter()
        .copied()
        .find(|&(i, j)| c.in_ccw_segment(near, defenders[i], defenders[j]))
        .unwrap_or(pairs[0]);
    Ok(GreedyChoice::Pair(i, j))
}

/// Full-speed heading for an intruder that has committed to `choice`.
pub fn greedy_heading(c: &PerimeterCurve, defenders: &[f64], x: Vec2, nu: f64, choice: GreedyChoice) -> Result<Vec2> {
    match choice {
        GreedyChoice::Free => Ok(heading_to(c, x, c.closest_arc(x)?, nu)),
        GreedyChoice::Solo(d) => {
            let e = evaluate_solo(c, defenders[d], x, nu)?;
            Ok(heading_to(c, x, e.target(), nu))
        }
        GreedyChoice::Pair(i, j) => {
            let e = evaluate_duo_ordered(c, defenders[i], defenders[j], x, nu)?;
            Ok(heading_to(c, x, e.s_opt, nu))
        }
    }
}

/// Controls of every intruder under the independent greedy policy.
pub fn intruder_team_greedy(c: &PerimeterCurve, defenders: &[f64], intruders: &[Vec2], nu: f64) -> Result<Vec<Vec2>> {
    intruders
        .iter()
        .map(|&x| {
            let choice = greedy_pair(c, defenders, x, nu, None)?;
            greedy_heading(c, defenders, x, nu, choice)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duo::evaluate_duo;
    use crate::shapes::PerimeterSpec;
    use crate::solo::intruder_control_1v1;

    fn circle() -> PerimeterCurve {
        PerimeterSpec::circle(1.0).build().unwrap()
    }

    #[test]
    fn single_defender_plays_solo() {
        let c = circle();
        let x = Vec2::new(0.3, 1.8);
        let u = intruder_team_greedy(&c, &[0.4], &[x], 0.5).unwrap();
        let v = intruder_control_1v1(&c, 0.4, x, 0.5).unwrap();
        assert!((u[0] - v).norm() < 1e-12);
        // Coincident defenders behave as one.
        assert_eq!(greedy_pair(&c, &[0.4, 0.4], x, 0.5, None).unwrap(), GreedyChoice::Solo(0));
    }

    #[test]
    fn heads_to_the_midpoint_between_two_defenders() {
        let c = circle();
        let half = 0.5 * c.total_length();
        let x = Vec2::new(0.0, 1.6);
        assert_eq!(greedy_pair(&c, &[0.0, half], x, 0.5, None).unwrap(), GreedyChoice::Pair(0, 1));
        let e = evaluate_duo(&c, 0.0, half, x, 0.5).unwrap();
        let u = intruder_team_greedy(&c, &[0.0, half], &[x], 0.5).unwrap()[0];
        let want = (c.point_at(e.s_mid) - x).normalized() * 0.5;
        assert!((u - want).norm() < 1e-9);
        assert_eq!(greedy_pair(&c, &[half, 0.0], x, 0.5, None).unwrap(), GreedyChoice::Pair(1, 0));
    }

    #[test]
    fn previous_choice_sticks_near_a_tie() {
        let c = circle();
        let l = c.total_length();
        let defenders = [0.0, l / 3.0, 2.0 * l / 3.0];
        // Straight above defender 1: ties between its two pairs.
        let x = c.point_at(l / 3.0) * 1.5;
        let first = greedy_pair(&c, &defenders, x, 0.5, None).unwrap();
        let other = if first == GreedyChoice::Pair(0, 1) {
            GreedyChoice::Pair(1, 2)
        } else {
            GreedyChoice::Pair(0, 1)
        };
        assert_eq!(greedy_pair(&c, &defenders, x, 0.5, Some(other)).unwrap(), other);
        assert_eq!(greedy_pair(&c, &defenders, x, 0.5, Some(first)).unwrap(), first);
    }

    #[test]
    fn no_defenders_means_straight_in() {
        let c = circle();
        let u = intruder_team_greedy(&c, &[], &[Vec2::new(2.0, 0.0)], 0.5).unwrap()[0];
        assert!((u - Vec2::new(-0.5, 0.0)).norm() < 1e-9);
    }
}
