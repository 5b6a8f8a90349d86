//! Straight-line dominance test.
//!
//! A sufficient certificate that the intruder wins: some visible boundary
//! point is reached by a straight dash before the defender can get there
//! going either way round.

use crate::error::{check_nu, Result};
use crate::geometry::PerimeterCurve;
use crate::vec2::Vec2;

pub fn dominance_test(c: &PerimeterCurve, s_d: f64, x: Vec2, nu: f64, grid_n: usize) -> Result<bool> {
    check_nu(nu)?;
    let fan = c.tangent_points(x)?;
    let span = c.arc_distance_ccw(fan.s_tan_r, fan.s_tan_l);
    let n = grid_n.max(2);
    Ok((0..=n).any(|k| {
        let s = c.wrap(fan.s_tan_r + span * k as f64 / n as f64);
        c.arc_distance(s_d, s) > c.point_at(s).distance(x) / nu
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::PerimeterSpec;
    use crate::solo::evaluate_solo;

    #[test]
    fn close_intruder_far_from_defender_dominates() {
        let c = PerimeterSpec::circle(1.0).build().unwrap();
        let x = Vec2::new(-1.2, 0.0);
        assert!(dominance_test(&c, 0.0, x, 0.5, 256).unwrap());
        assert!(evaluate_solo(&c, 0.0, x, 0.5).unwrap().value > 0.0);
    }

    #[test]
    fn defender_winning_state_is_not_dominated() {
        let c = PerimeterSpec::circle(1.0).build().unwrap();
        let x = Vec2::new(2.0, 0.3);
        assert!(evaluate_solo(&c, 0.0, x, 0.5).unwrap().value < 0.0);
        assert!(!dominance_test(&c, 0.0, x, 0.5, 256).unwrap());
    }
}
