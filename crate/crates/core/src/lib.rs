//! Perimeter-defense reach-avoid games on convex shapes.
//!
//! Defenders slide along the boundary of a convex target at unit speed;
//! intruders move freely in the plane at speed ratio `nu <= 1` and try to
//! touch the boundary away from every defender.

pub mod barrier;
pub mod duo;
pub mod error;
pub mod export;
pub mod geometry;
pub mod montecarlo;
pub mod oracle;
pub mod shapes;
pub mod sim;
pub mod solo;
pub mod team;
pub mod vec2;

pub use error::{Error, Result};
pub use geometry::{PerimeterCurve, TangentFan};
pub use shapes::PerimeterSpec;
pub use vec2::Vec2;
