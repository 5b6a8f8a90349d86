//! Two defenders against one intruder.
//!
//! A pair splits the game space in two; in the half that faces the arc from
//! `D_i` (clockwise side) to `D_j` (counter-clockwise side) the intruder
//! plays against `D_i` alone, against `D_j` alone, or aims for the midpoint
//! of their arc.

use serde::Serialize;

use crate::error::{check_nu, Error, Result};
use crate::geometry::{PerimeterCurve, TangentFan};
use crate::solo::{self, evaluate_with_fan, Region, SoloEvaluation};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DuoRegion {
    RI,
    RJ,
    RMid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuoEvaluation {
    /// Index (0 or 1, in argument order) of the clockwise-side defender.
    pub i_cw: usize,
    /// Index of the counter-clockwise-side defender.
    pub j_ccw: usize,
    pub s_di: f64,
    pub s_dj: f64,
    pub s_mid: f64,
    pub s_l: f64,
    pub s_r: f64,
    pub j_mid: f64,
    pub region: DuoRegion,
    pub s_opt: f64,
    pub value: f64,
    pub c_radius: f64,
    /// `cos(phi(s_mid)) / nu`; strictly inside `(-1, 1)` on `R_mid`.
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuoRegionReport {
    pub in_a_c: bool,
    pub in_a_i: bool,
    pub in_r_pair: bool,
}

fn check_pair(c: &PerimeterCurve, s1: f64, s2: f64) -> Result<()> {
    if c.arc_distance(s1, s2) <= c.eps() {
        return Err(Error::DegeneratePair(c.wrap(s1)));
    }
    Ok(())
}

/// Counts a state as left of the defender when it is in the left region or
/// within `band` of the singular surface (ties go counter-clockwise).
fn leans_left(e: &SoloEvaluation, band: f64) -> bool {
    e.region != Region::Right || e.gap().abs() <= band
}

/// True when the intruder lies on the side of the pair that faces the ccw
/// arc from `s_d1` to `s_d2`.
pub fn relevant_region(c: &PerimeterCurve, s_d1: f64, s_d2: f64, x: Vec2, nu: f64) -> Result<bool> {
    relevant_region_biased(c, s_d1, s_d2, x, nu, 0.0)
}

/// [`relevant_region`] with states within `band` of either defender's
/// singular surface counted as left of that defender.
pub fn relevant_region_biased(
    c: &PerimeterCurve,
    s_d1: f64,
    s_d2: f64,
    x: Vec2,
    nu: f64,
    band: f64,
) -> Result<bool> {
    check_nu(nu)?;
    check_pair(c, s_d1, s_d2)?;
    let fan = c.tangent_points(x)?;
    Ok(relevant_with(c, s_d1, s_d2, x, nu, fan, band))
}

fn relevant_with(c: &PerimeterCurve, s1: f64, s2: f64, x: Vec2, nu: f64, fan: TangentFan, band: f64) -> bool {
    let left1 = leans_left(&evaluate_with_fan(c, s1, x, nu, fan), band);
    let left2 = leans_left(&evaluate_with_fan(c, s2, x, nu, fan), band);
    if c.arc_distance_ccw(s1, s2) < 0.5 * c.total_length() {
        left1 && !left2
    } else {
        left1 || !left2
    }
}

/// Orders the pair with [`relevant_region`] and evaluates the game.
pub fn evaluate_duo(c: &PerimeterCurve, s_d1: f64, s_d2: f64, x: Vec2, nu: f64) -> Result<DuoEvaluation> {
    check_nu(nu)?;
    check_pair(c, s_d1, s_d2)?;
    let fan = c.tangent_points(x)?;
    let (i, j) = if relevant_with(c, s_d1, s_d2, x, nu, fan, 0.0) {
        (0, 1)
    } else {
        (1, 0)
    };
    let s = [s_d1, s_d2];
    let mut e = evaluate_ordered_with_fan(c, s[i], s[j], x, nu, fan);
    e.i_cw = i;
    e.j_ccw = j;
    Ok(e)
}

/// Evaluates the game for a fixed ordering: `s_di` on the clockwise side.
pub fn evaluate_duo_ordered(c: &PerimeterCurve, s_di: f64, s_dj: f64, x: Vec2, nu: f64) -> Result<DuoEvaluation> {
    check_nu(nu)?;
    check_pair(c, s_di, s_dj)?;
    let fan = c.tangent_points(x)?;
    Ok(evaluate_ordered_with_fan(c, s_di, s_dj, x, nu, fan))
}

fn evaluate_ordered_with_fan(
    c: &PerimeterCurve,
    s_di: f64,
    s_dj: f64,
    x: Vec2,
    nu: f64,
    fan: TangentFan,
) -> DuoEvaluation {
    let (s_di, s_dj) = (c.wrap(s_di), c.wrap(s_dj));
    let span = c.arc_distance_ccw(s_di, s_dj);
    let half = 0.5 * span;
    let s_mid = c.wrap(s_di + half);
    let (s_l, s_r) = solo::breaching_points(c, x, &fan, nu);
    let mid_point = c.point_at(s_mid);
    let j_mid = half - mid_point.distance(x) / nu;

    let from_i = c.arc_distance_ccw(s_di, s_l);
    let in_ri = from_i < half || from_i >= c.total_length() - c.eps();
    let from_mid = c.arc_distance_ccw(s_mid, s_r);
    let in_rj = from_mid > 0.0 && from_mid <= half + c.eps();

    let left = (DuoRegion::RI, s_l, solo::payoff_left(c, s_l, s_di, x, nu));
    let right = (DuoRegion::RJ, s_r, solo::payoff_right(c, s_r, s_dj, x, nu));
    // Where the afferent surfaces cross, a state can satisfy both; the
    // intruder takes the better breaching point.
    let (region, s_opt, value) = match (in_ri, in_rj) {
        (true, true) if right.2 > left.2 => right,
        (true, _) => left,
        (false, true) => right,
        (false, false) => (DuoRegion::RMid, s_mid, j_mid),
    };
    let (tm, tp) = c.tangent_at(s_mid);
    let beta = (mid_point - x).normalized().dot((tm + tp).normalized()) / nu;
    DuoEvaluation {
        i_cw: 0,
        j_ccw: 1,
        s_di,
        s_dj,
        s_mid,
        s_l,
        s_r,
        j_mid,
        region,
        s_opt,
        value,
        c_radius: nu * half,
        beta,
    }
}

/// Full-speed heading toward `s_opt`.
pub fn intruder_control_2v1(c: &PerimeterCurve, s_d1: f64, s_d2: f64, x: Vec2, nu: f64) -> Result<Vec2> {
    let e = evaluate_duo(c, s_d1, s_d2, x, nu)?;
    Ok(solo::heading_to(c, x, e.s_opt, nu))
}

/// Controls `[omega_1, omega_2]` in argument order. A defender that wins
/// alone plays its one-on-one strategy while the other holds; otherwise the
/// pair closes in from both sides.
pub fn defender_control_2v1(c: &PerimeterCurve, s_d1: f64, s_d2: f64, x: Vec2, nu: f64) -> Result<[f64; 2]> {
    check_nu(nu)?;
    check_pair(c, s_d1, s_d2)?;
    let fan = c.tangent_points(x)?;
    let e1 = evaluate_with_fan(c, s_d1, x, nu, fan);
    if e1.value <= 0.0 {
        return Ok([e1.region.omega(), 0.0]);
    }
    let e2 = evaluate_with_fan(c, s_d2, x, nu, fan);
    if e2.value <= 0.0 {
        return Ok([0.0, e2.region.omega()]);
    }
    if relevant_with(c, s_d1, s_d2, x, nu, fan, 0.0) {
        Ok([1.0, -1.0])
    } else {
        Ok([-1.0, 1.0])
    }
}

pub fn duo_region_report(c: &PerimeterCurve, s_d1: f64, s_d2: f64, x: Vec2, nu: f64) -> Result<DuoRegionReport> {
    let e = evaluate_duo(c, s_d1, s_d2, x, nu)?;
    let fan = c.tangent_points(x)?;
    let v1 = evaluate_with_fan(c, s_d1, x, nu, fan).value;
    let v2 = evaluate_with_fan(c, s_d2, x, nu, fan).value;
    let in_a_c = e.value > 0.0;
    let in_a_i = v1 > 0.0 && v2 > 0.0;
    Ok(DuoRegionReport {
        in_a_c,
        in_a_i,
        in_r_pair: in_a_i && !in_a_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::PerimeterSpec;

    fn circle() -> PerimeterCurve {
        PerimeterSpec::circle(1.0).build().unwrap()
    }

    #[test]
    fn relevant_region_splits_the_circle() {
        let c = circle();
        let half = 0.5 * c.total_length();
        assert!(relevant_region(&c, 0.0, half, Vec2::new(0.0, 1.5), 0.5).unwrap());
        assert!(!relevant_region(&c, 0.0, half, Vec2::new(0.0, -1.5), 0.5).unwrap());
        assert!(matches!(
            relevant_region(&c, 1.0, 1.0, Vec2::new(0.0, 1.5), 0.5),
            Err(Error::DegeneratePair(_))
        ));
    }

    #[test]
    fn midpoint_payoff_on_the_circle() {
        let c = circle();
        let half = 0.5 * c.total_length();
        let e = evaluate_duo(&c, 0.0, half, Vec2::new(0.0, 1.5), 0.5).unwrap();
        assert_eq!(e.region, DuoRegion::RMid);
        assert!((e.value - 0.5708).abs() < 1e-3);
        assert!((e.c_radius - 0.25 * half).abs() < 1e-12);
        assert!(e.beta.abs() < 1e-6);
        // Below the pair, the roles swap.
        let e = evaluate_duo(&c, 0.0, half, Vec2::new(0.0, -1.5), 0.5).unwrap();
        assert_eq!((e.i_cw, e.j_ccw), (1, 0));
    }

    #[test]
    fn near_one_defender_reduces_to_solo() {
        let c = circle();
        let half = 0.5 * c.total_length();
        let x = Vec2::new(1.05, 0.2);
        let e = evaluate_duo(&c, 0.1, half, x, 0.5).unwrap();
        let s = solo::evaluate_solo(&c, 0.1, x, 0.5).unwrap();
        assert_ne!(e.region, DuoRegion::RMid);
        assert!((e.value - s.value).abs() < 1e-12);
    }

    #[test]
    fn paired_defense_region_on_c_circle() {
        let c = circle();
        let half = 0.5 * c.total_length();
        let radius = 0.25 * half;
        let x = Vec2::new(0.0, 1.0 + radius + 1e-6);
        let r = duo_region_report(&c, 0.0, half, x, 0.5).unwrap();
        assert!(!r.in_a_c && r.in_a_i && r.in_r_pair);
        let r = duo_region_report(&c, 0.0, half, Vec2::new(0.0, 1.3), 0.5).unwrap();
        assert!(r.in_a_c && !r.in_r_pair);
        let r = duo_region_report(&c, 0.0, half, Vec2::new(2.0, 0.0), 0.5).unwrap();
        assert!(!r.in_a_i && !r.in_r_pair);
    }

    #[test]
    fn pincer_and_idle_controls() {
        let c = circle();
        let half = 0.5 * c.total_length();
        let w = defender_control_2v1(&c, 0.0, half, Vec2::new(0.0, 1.7), 0.5).unwrap();
        assert_eq!(w, [1.0, -1.0]);
        let w = defender_control_2v1(&c, half, 0.0, Vec2::new(0.0, 1.7), 0.5).unwrap();
        assert_eq!(w, [-1.0, 1.0]);
        let w = defender_control_2v1(&c, 0.0, half, Vec2::new(2.0, 0.1), 0.5).unwrap();
        assert_eq!(w[1], 0.0);
        assert_ne!(w[0], 0.0);
    }
}
