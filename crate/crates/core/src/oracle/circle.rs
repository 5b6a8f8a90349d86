//! Closed-form solution of the game on a circular perimeter.
//!
//! The state reduces to the intruder's radial distance `r` from the circle
//! and its polar angle `theta` relative to the defender.

use serde::Serialize;

use crate::error::{check_nu, Result};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleGameState {
    pub radius: f64,
    pub r: f64,
    pub theta: f64,
    pub nu: f64,
}

impl CircleGameState {
    /// Reduces a planar state. The circle is centered at the origin and the
    /// defender sits at polar angle `s_d / radius`.
    pub fn from_planar(radius: f64, s_d: f64, x: Vec2, nu: f64) -> Self {
        let theta = (x.angle() - s_d / radius + std::f64::consts::PI)
            .rem_euclid(std::f64::consts::TAU)
            - std::f64::consts::PI;
        CircleGameState {
            radius,
            r: x.norm() - radius,
            theta,
            nu,
        }
    }

    pub fn value(&self) -> f64 {
        circle_value(self.radius, self.r, self.theta, self.nu)
    }
}

/// `F(r) = sqrt(((R + r) / (nu R))^2 - 1) - acos(nu R / (R + r))`.
pub fn circle_f(radius: f64, r: f64, nu: f64) -> f64 {
    let q = (radius + r) / (nu * radius);
    (q * q - 1.0).max(0.0).sqrt() - (1.0 / q).clamp(-1.0, 1.0).acos()
}

/// `V = |theta| - F(r) + F(0)`.
pub fn circle_value(radius: f64, r: f64, theta: f64, nu: f64) -> f64 {
    theta.abs() - circle_f(radius, r, nu) + circle_f(radius, 0.0, nu)
}

/// Optimal `(omega_D, psi_A)`. The heading `psi_A` is measured from the
/// inward radial direction, positive toward counter-clockwise travel.
/// Returns `None` at `theta = 0`, where both directions are optimal.
pub fn circle_strategy(radius: f64, r: f64, theta: f64, nu: f64) -> Result<Option<(f64, f64)>> {
    check_nu(nu)?;
    if theta == 0.0 {
        return Ok(None);
    }
    let sign = theta.signum();
    Ok(Some((sign, sign * (nu * radius / (radius + r)).asin())))
}

/// Velocity vector for heading `psi` at intruder position `x`.
pub fn heading_vector(x: Vec2, psi: f64, speed: f64) -> Vec2 {
    let inward = -x.normalized();
    let ccw = x.normalized().perp();
    (inward * psi.cos() + ccw * psi.sin()) * speed
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn frozen_values() {
        assert!((circle_f(1.0, 0.0, 0.5) - 0.684_853_2).abs() < 1e-7);
        assert!((circle_f(1.0, 1.0, 0.5) - 2.554_867_3).abs() < 1e-7);
        assert!((circle_value(1.0, 1.0, FRAC_PI_2, 0.5) + 0.299_217_7).abs() < 1e-7);
        assert!((circle_value(1.0, 1.0, PI, 0.5) - 1.271_58).abs() < 1e-5);
        assert_eq!(circle_value(2.0, 0.0, -0.7, 0.3), 0.7);
    }

    #[test]
    fn strategy_signs_and_boundary_heading() {
        let (w, psi) = circle_strategy(1.0, 0.0, 0.4, 0.6).unwrap().unwrap();
        assert_eq!(w, 1.0);
        assert!((FRAC_PI_2 - psi - 0.6f64.acos()).abs() < 1e-12);
        let (w, psi) = circle_strategy(1.0, 0.5, -0.4, 0.6).unwrap().unwrap();
        assert_eq!(w, -1.0);
        assert!(psi < 0.0);
        assert_eq!(circle_strategy(1.0, 0.5, 0.0, 0.6).unwrap(), None);
    }

    #[test]
    fn planar_reduction() {
        let st = CircleGameState::from_planar(1.0, FRAC_PI_2, Vec2::new(-2.0, 0.0), 0.5);
        assert!((st.theta - FRAC_PI_2).abs() < 1e-12);
        assert!((st.r - 1.0).abs() < 1e-12);
    }
}
