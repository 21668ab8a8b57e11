//! The bin packing game: heuristic packings, improving steps, best-response
//! dynamics and (strong) equilibrium checks.

mod dynamics;
mod heuristics;
mod moves;
mod strong;

pub use dynamics::{best_response_dynamics, run_dynamics, DynamicsRun, Policy};
pub use heuristics::{first_fit, first_fit_decreasing, ss_pack, SsRecord, SsTrace};
pub use moves::{first_improving_move, improving_moves, is_nash, ImprovingMove};
pub use strong::{
    is_strong_nash_direct, is_strong_nash_via_ss, CoalitionDeviation, StrongNashVerdict, Target,
};
