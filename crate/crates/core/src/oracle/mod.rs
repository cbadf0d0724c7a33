//! Exact half-inning scoring probabilities and synthetic seasons with known
//! ground truth.

mod chain;
mod model;
mod sim;
mod synth;

pub use chain::{
    exact_class_rates, exact_score_probability, exact_tsf, resolve, Dest, Edge, HalfInningChain, LiveState, Resolution,
    RunnerMove,
};
pub use model::{AdvancePolicy, ModelError, Outcome, OutcomeModel};
pub use sim::{simulate_from, simulate_half_inning, OutcomeSampler, SimulatedHalfInning, SimulatedPa, PA_CAP};
pub use synth::{
    batter_id, emit_event_file, emit_game, generate_season, high_leverage_appearances, play_token, reliever_id,
    starter_id, PitcherChange, SeasonConfig, SyntheticGame, SyntheticPlay, HOME, VISITOR,
};
