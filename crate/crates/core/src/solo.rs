//! One defender against one intruder.
//!
//! The intruder picks a breaching point that maximizes how much longer the
//! defender needs to get there than the intruder does. Against a defender
//! moving counter-clockwise that point is `s_L`; against a clockwise defender
//! it is `s_R`. The defender in turn runs toward whichever of the two the
//! state's region designates.

use serde::Serialize;

use crate::error::{check_nu, Result};
use crate::geometry::{PerimeterCurve, TangentFan};
use crate::vec2::Vec2;

/// Band on `|J_L* - J_R*|`, relative to `L`, inside which a state is singular.
pub const SINGULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Region {
    Left,
    Right,
    Singular,
}

impl Region {
    /// Defender direction for this region; singular states go clockwise.
    pub fn omega(self) -> f64 {
        match self {
            Region::Left => 1.0,
            Region::Right | Region::Singular => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoloEvaluation {
    pub s_d: f64,
    pub s_d_op: f64,
    pub s_l: f64,
    pub s_r: f64,
    pub j_l: f64,
    pub j_r: f64,
    pub region: Region,
    pub value: f64,
    pub fan: TangentFan,
}

impl SoloEvaluation {
    /// Breaching point the optimal intruder heads for.
    pub fn target(&self) -> f64 {
        match self.region {
            Region::Left => self.s_l,
            _ => self.s_r,
        }
    }

    /// `J_L* - J_R*`; zero on the singular surfaces.
    pub fn gap(&self) -> f64 {
        self.j_l - self.j_r
    }

    pub fn intruder_wins(&self) -> bool {
        self.value > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoloControls {
    pub u_a: Vec2,
    pub omega_d: f64,
}

/// Left and right breaching points on an already computed visible segment.
pub(crate) fn breaching_points(c: &PerimeterCurve, x: Vec2, fan: &TangentFan, nu: f64) -> (f64, f64) {
    (c.solve_approach(x, fan, nu), c.solve_approach(x, fan, -nu))
}

/// Point of the visible segment whose approach angle is `acos(nu)`, or the
/// corner whose one-sided angles bracket it.
pub fn left_breaching_point(c: &PerimeterCurve, x: Vec2, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    let fan = c.tangent_points(x)?;
    Ok(c.solve_approach(x, &fan, nu))
}

/// Mirror of [`left_breaching_point`] with approach angle `pi - acos(nu)`.
pub fn right_breaching_point(c: &PerimeterCurve, x: Vec2, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    let fan = c.tangent_points(x)?;
    Ok(c.solve_approach(x, &fan, -nu))
}

/// `J_L = d(s_D -> s_B) - |gamma(s_B) - x| / nu`.
pub fn payoff_left(c: &PerimeterCurve, s_b: f64, s_d: f64, x: Vec2, nu: f64) -> f64 {
    c.arc_distance_ccw(s_d, s_b) - c.point_at(s_b).distance(x) / nu
}

/// `J_R = d(s_B -> s_D) - |gamma(s_B) - x| / nu`.
pub fn payoff_right(c: &PerimeterCurve, s_b: f64, s_d: f64, x: Vec2, nu: f64) -> f64 {
    c.arc_distance_ccw(s_b, s_d) - c.point_at(s_b).distance(x) / nu
}

pub fn evaluate_solo(c: &PerimeterCurve, s_d: f64, x: Vec2, nu: f64) -> Result<SoloEvaluation> {
    check_nu(nu)?;
    let fan = c.tangent_points(x)?;
    Ok(evaluate_with_fan(c, s_d, x, nu, fan))
}

pub(crate) fn evaluate_with_fan(
    c: &PerimeterCurve,
    s_d: f64,
    x: Vec2,
    nu: f64,
    fan: TangentFan,
) -> SoloEvaluation {
    let s_d = c.wrap(s_d);
    let (s_l, s_r) = breaching_points(c, x, &fan, nu);
    let j_l = payoff_left(c, s_l, s_d, x, nu);
    let j_r = payoff_right(c, s_r, s_d, x, nu);
    let s_d_op = c.wrap(s_d + 0.5 * c.total_length());

    let region = if (j_l - j_r).abs() <= SINGULAR_TOL * c.total_length() {
        Region::Singular
    } else {
        let l_in = c.in_ccw_segment(s_l, s_d, s_d_op);
        let r_in = c.in_ccw_segment(s_r, s_d_op, s_d);
        let left = (l_in && r_in && j_l > j_r) || (l_in && !r_in) || (!l_in && !r_in && j_l < j_r);
        if left {
            Region::Left
        } else {
            Region::Right
        }
    };
    let value = if region == Region::Left { j_l } else { j_r };
    SoloEvaluation {
        s_d,
        s_d_op,
        s_l,
        s_r,
        j_l,
        j_r,
        region,
        value,
        fan,
    }
}

/// Full-speed heading toward the optimal breaching point.
pub fn intruder_control_1v1(c: &PerimeterCurve, s_d: f64, x: Vec2, nu: f64) -> Result<Vec2> {
    let e = evaluate_solo(c, s_d, x, nu)?;
    Ok(heading_to(c, x, e.target(), nu))
}

pub(crate) fn heading_to(c: &PerimeterCurve, x: Vec2, s: f64, speed: f64) -> Vec2 {
    (c.point_at(s) - x).normalized() * speed
}

pub fn defender_control_1v1(c: &PerimeterCurve, s_d: f64, x: Vec2, nu: f64) -> Result<f64> {
    Ok(evaluate_solo(c, s_d, x, nu)?.region.omega())
}

pub fn solo_controls(c: &PerimeterCurve, s_d: f64, x: Vec2, nu: f64) -> Result<SoloControls> {
    let e = evaluate_solo(c, s_d, x, nu)?;
    Ok(SoloControls {
        u_a: heading_to(c, x, e.target(), nu),
        omega_d: e.region.omega(),
    })
}

/// Defender direction with a switching band: inside `|J_L* - J_R*| <= band`
/// the previous direction is kept.
pub fn defender_control_hysteresis(e: &SoloEvaluation, previous: Option<f64>, band: f64) -> f64 {
    match previous {
        Some(w) if w != 0.0 && e.gap().abs() <= band => w,
        _ => e.region.omega(),
    }
}

/// True when the state sits near the afferent branch of `{J_L* = J_R*}`
/// (the one rooted at the defender) rather than the dispersal branch.
pub fn is_afferent(c: &PerimeterCurve, e: &SoloEvaluation, x: Vec2) -> bool {
    let near = c.solve_approach(x, &e.fan, 0.0);
    c.arc_distance(near, e.s_d) < 0.25 * c.total_length()
}

/// First-order estimate of the Euclidean distance from `x` to the surface
/// `{J_L* = J_R*}`: `|J_L* - J_R*| / |grad(J_L* - J_R*)|`.
pub fn singular_distance(c: &PerimeterCurve, e: &SoloEvaluation, x: Vec2, nu: f64) -> f64 {
    let ul = (c.point_at(e.s_l) - x).normalized();
    let ur = (c.point_at(e.s_r) - x).normalized();
    let g = (ul - ur).norm();
    if g <= 0.0 {
        f64::INFINITY
    } else {
        nu * e.gap().abs() / g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::shapes::PerimeterSpec;

    fn square() -> PerimeterCurve {
        PerimeterSpec::square().build().unwrap()
    }

    const X: Vec2 = Vec2::new(2.0, 0.5);

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn square_breaching_points() {
        let c = square();
        let s_l = left_breaching_point(&c, X, 0.3).unwrap();
        let s_r = right_breaching_point(&c, X, 0.3).unwrap();
        assert!(close(s_l, 1.814_485, 1e-6));
        assert!(close(s_r, 1.185_515, 1e-6));
        assert_eq!(left_breaching_point(&c, X, 0.6).unwrap(), 2.0);
        assert_eq!(right_breaching_point(&c, X, 0.6).unwrap(), 1.0);
        assert_eq!(left_breaching_point(&c, X, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn square_evaluation() {
        let c = square();
        let e = evaluate_solo(&c, 0.5, X, 0.3).unwrap();
        assert!(close(e.j_l, -2.1798, 1e-4));
        assert!(close(e.j_r, -0.1798, 1e-4));
        assert_eq!(e.region, Region::Left);
        assert_eq!(e.value, e.j_l);
        assert_eq!(e.s_d_op, 2.5);
        let u = intruder_control_1v1(&c, 0.5, X, 0.3).unwrap();
        assert!(close(u.x, -0.28618, 1e-5) && close(u.y, 0.09000, 1e-5));
        assert_eq!(defender_control_1v1(&c, 0.5, X, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn mirrored_square_turns_clockwise() {
        let c = square();
        // Reflect about y = 0.5: the defender at s = 0.5 maps to s = 2.5.
        let e = evaluate_solo(&c, 2.5, X, 0.3).unwrap();
        assert_eq!(e.region, Region::Right);
        assert!(close(e.value, -2.1798, 1e-4));
    }

    #[test]
    fn symmetric_state_is_singular() {
        let c = square();
        let e = evaluate_solo(&c, 1.5, Vec2::new(-1.0, 0.5), 0.3).unwrap();
        assert_eq!(e.region, Region::Singular);
        assert_eq!(e.region.omega(), -1.0);
        assert_eq!(e.target(), e.s_r);
    }

    #[test]
    fn boundary_contact_payoff() {
        let c = square();
        let p = c.point_at(1.3);
        assert!(close(payoff_left(&c, 1.3, 0.5, p, 0.4), 0.8, 1e-12));
        assert!(close(payoff_right(&c, 1.3, 0.5, p, 0.4), 3.2, 1e-12));
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = square();
        assert_eq!(evaluate_solo(&c, 0.0, X, 1.5), Err(Error::SpeedRatio(1.5)));
        assert!(evaluate_solo(&c, 0.0, Vec2::new(0.5, 0.5), 0.5).is_err());
    }

    #[test]
    fn hysteresis_keeps_direction_in_band() {
        let c = square();
        let e = evaluate_solo(&c, 1.5, Vec2::new(-1.0, 0.5), 0.3).unwrap();
        assert_eq!(defender_control_hysteresis(&e, Some(1.0), 1e-3), 1.0);
        assert_eq!(defender_control_hysteresis(&e, None, 1e-3), -1.0);
        let far = evaluate_solo(&c, 0.5, X, 0.3).unwrap();
        assert_eq!(defender_control_hysteresis(&far, Some(-1.0), 1e-3), 1.0);
    }

    #[test]
    fn afferent_versus_dispersal() {
        let c = square();
        let near = evaluate_solo(&c, 1.5, Vec2::new(1.5, 0.5), 0.3).unwrap();
        assert!(is_afferent(&c, &near, Vec2::new(1.5, 0.5)));
        let far = evaluate_solo(&c, 1.5, Vec2::new(-1.0, 0.5), 0.3).unwrap();
        assert!(!is_afferent(&c, &far, Vec2::new(-1.0, 0.5)));
    }
}
