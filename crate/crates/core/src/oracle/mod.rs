//! Independent validators: the circle closed form, the straight-line
//! dominance certificate and a discretized minimax solver.

pub mod circle;
pub mod dominance;
pub mod minimax;

pub use circle::{circle_f, circle_strategy, circle_value, CircleGameState};
pub use dominance::dominance_test;
pub use minimax::{minimax_rollout, MinimaxConfig, MinimaxOracle, RolloutEstimate};
