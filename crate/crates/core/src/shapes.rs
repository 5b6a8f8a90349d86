//! Named perimeter shapes and their polygonal densification.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PerimeterCurve;
use crate::vec2::Vec2;

pub const DEFAULT_RESOLUTION: usize = 2048;

/// Quadrant semi-axes `[a, b]` of the default piecewise ellipse, listed for
/// polar angles in `[0, pi/2]`, `[pi/2, pi]`, `[pi, 3pi/2]`, `[3pi/2, 2pi]`.
pub const DEFAULT_ELLIPSE_AXES: [[f64; 2]; 4] = [[5.0, 2.0], [2.0, 2.0], [2.0, 3.0], [5.0, 3.0]];

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

fn default_axes() -> [[f64; 2]; 4] {
    DEFAULT_ELLIPSE_AXES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PerimeterSpec {
    Vertices {
        points: Vec<Vec2>,
    },
    Circle {
        radius: f64,
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
    /// `[a cos t, b sin t]` with a separate `[a, b]` per quadrant.
    PiecewiseEllipse {
        #[serde(default = "default_axes")]
        axes: [[f64; 2]; 4],
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
}

impl PerimeterSpec {
    pub fn circle(radius: f64) -> Self {
        PerimeterSpec::Circle {
            radius,
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn piecewise_ellipse() -> Self {
        PerimeterSpec::PiecewiseEllipse {
            axes: DEFAULT_ELLIPSE_AXES,
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn square() -> Self {
        PerimeterSpec::Vertices {
            points: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
        }
    }

    /// Sample points before hulling.
    pub fn points(&self) -> Result<Vec<Vec2>> {
        match self {
            PerimeterSpec::Vertices { points } => Ok(points.clone()),
            PerimeterSpec::Circle { radius, resolution } => {
                check_resolution(*resolution)?;
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::config("perimeter.radius", "must be positive"));
                }
                Ok((0..*resolution)
                    .map(|k| Vec2::from_angle(TAU * k as f64 / *resolution as f64) * *radius)
                    .collect())
            }
            PerimeterSpec::PiecewiseEllipse { axes, resolution } => {
                check_resolution(*resolution)?;
                if axes.iter().flatten().any(|&a| !(a > 0.0 && a.is_finite())) {
                    return Err(Error::config("perimeter.axes", "semi-axes must be positive"));
                }
                Ok((0..*resolution)
                    .map(|k| {
                        let t = TAU * k as f64 / *resolution as f64;
                        let [a, b] = axes[((t / FRAC_PI_2) as usize).min(3)];
                        Vec2::new(a * t.cos(), b * t.sin())
                    })
                    .collect())
            }
        }
    }

    pub fn build(&self) -> Result<PerimeterCurve> {
        PerimeterCurve::build(&self.points()?)
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 8 {
        return Err(Error::config("perimeter.resolution", "need at least 8 vertices"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_length_and_origin() {
        let c = PerimeterSpec::circle(1.0).build().unwrap();
        let n = DEFAULT_RESOLUTION as f64;
        assert!((c.total_length() - 2.0 * n * (PI / n).sin()).abs() < 1e-12);
        assert!((c.total_length() - TAU).abs() < 1e-5);
        assert_eq!(c.point_at(0.0), Vec2::new(1.0, 0.0));
    }

    #[test]
    fn ellipse_extents() {
        let c = PerimeterSpec::piecewise_ellipse().build().unwrap();
        let (lo, hi) = c.bounds();
        assert!((lo.x + 2.0).abs() < 1e-9 && (hi.x - 5.0).abs() < 1e-9);
        assert!((lo.y + 3.0).abs() < 1e-9 && (hi.y - 2.0).abs() < 1e-9);
        assert_eq!(c.len(), DEFAULT_RESOLUTION);
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = PerimeterSpec::piecewise_ellipse();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("piecewise-ellipse"));
        assert_eq!(serde_json::from_str::<PerimeterSpec>(&text).unwrap(), spec);
        let c: PerimeterSpec = serde_json::from_str(r#"{"kind":"circle","radius":2}"#).unwrap();
        assert_eq!(c, PerimeterSpec::circle(2.0));
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(PerimeterSpec::Circle { radius: 1.0, resolution: 3 }.build().is_err());
        assert!(PerimeterSpec::Circle { radius: -1.0, resolution: 64 }.build().is_err());
    }
}
