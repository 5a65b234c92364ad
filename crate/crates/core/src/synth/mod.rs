//! Safety games over the Boolean abstraction and controller extraction.

mod artifact;
mod controller;
mod game;

pub use artifact::{ControllerArtifact, Transition, ARTIFACT_VERSION};
pub use controller::{extract_controller, MealyController};
pub use game::{
    build_game, build_game_with_cap, force, solve_safety, SafetyGame, StateId, WinningRegion,
    DEFAULT_STATE_CAP, INIT,
};

use crate::booleanize::BooleanSpec;
use crate::error::Result;

/// Builds and solves the game, then extracts a controller.
pub fn synthesize(b: &BooleanSpec, cap: u64) -> Result<MealyController> {
    let game = build_game_with_cap(b, cap)?;
    let w = solve_safety(&game);
    extract_controller(&game, &w)
}
